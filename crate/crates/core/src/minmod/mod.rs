//! Lower bound on the minimum modulus: first moments with `delta = 0` over
//! the small primes, then second moments from the quotient-indexed `Theta`
//! table with an explicit cap schedule.

mod theta;

use alloc::vec::Vec;

use crate::float::{sqrt, Inflation};
use crate::moments::ab;
use crate::numtheory::{smooth_recip_sum, PrimeTable};
use crate::{Error, Result};

/// Levels between folds of the lazy `Theta` accumulators.
const FLUSH_EVERY: usize = 64;

pub use theta::{mhat2, theta_step, QuotientGrid, RowExecutor, SerialExecutor, ThetaTable};

/// One second-moment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinModStep {
    pub i: usize,
    pub p: u64,
    pub delta: f64,
    pub mhat2: f64,
    /// Lower bound on the surviving measure after this step.
    pub muhat: f64,
    /// Upper bound on `f_i` with `i_0 = 0`, `kappa = 1`.
    pub f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinModOutcome {
    /// Every step kept `muhat > 0`; `f_end` bounds `f` at the last index.
    Completed { f_end: f64 },
    /// `muhat` dropped to zero or below at step `i`.
    Failed { i: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinModRun {
    pub k: u64,
    pub phase1: usize,
    pub end_k: usize,
    /// Upper bound on `sum 1/d` over `p_{phase1}`-smooth `d >= K`.
    pub smooth_tail: f64,
    pub mu_phase1: f64,
    pub f_phase1: f64,
    pub grid_points: usize,
    pub steps: Vec<MinModStep>,
    pub outcome: MinModOutcome,
}

impl MinModRun {
    /// Success iff the run completed with `f_end <= g_end`.
    pub fn verdict(&self, g_end: f64) -> bool {
        matches!(self.outcome, MinModOutcome::Completed { f_end } if f_end <= g_end)
    }
}

#[derive(Clone, Copy)]
pub struct MinModOptions<'a> {
    pub inflation: Inflation,
    /// Cap on smooth numbers enumerated for the phase-one tail.
    pub enumeration_cap: usize,
    /// Cap on `Theta` table entries.
    pub entry_cap: usize,
    pub executor: &'a dyn RowExecutor,
}

impl Default for MinModOptions<'_> {
    fn default() -> Self {
        MinModOptions {
            inflation: Inflation::default(),
            enumeration_cap: crate::DEFAULT_ENUMERATION_CAP,
            entry_cap: 50_000_000,
            executor: &SerialExecutor,
        }
    }
}

/// `(1 - 1/sqrt p) (1+a)/(1 + sqrt(1 + 4 muhat a(1+a)/mhat2))`.
pub fn phase_two_delta(p: u64, muhat: f64, mhat2: f64) -> f64 {
    if mhat2 <= 0.0 {
        return 0.0;
    }
    let (a, _) = ab(p);
    let d = (1.0 - 1.0 / sqrt(p as f64)) * (1.0 + a) / (1.0 + sqrt(1.0 + 4.0 * muhat * a * (1.0 + a) / mhat2));
    d.min(0.5)
}

/// Run both phases for moduli `>= k`. `visit` sees each second-moment step.
pub fn run_min_modulus(
    primes: &mut PrimeTable,
    k: u64,
    phase1: usize,
    end_k: usize,
    opts: &MinModOptions<'_>,
    mut visit: impl FnMut(&MinModStep),
) -> Result<MinModRun> {
    if k < 2 || phase1 == 0 || end_k <= phase1 {
        return Err(Error::invalid("need K >= 2, phase1 >= 1 and end_k > phase1"));
    }
    let inf = opts.inflation;
    primes.ensure_count(end_k);
    let mut theta = ThetaTable::initial(k, opts.entry_cap)?;
    let grid_points = theta.grid().len();

    let mut prod = 1.0f64;
    for i in 1..=phase1 {
        let p = primes.get(i).expect("sieved");
        let (a, _) = ab(p);
        prod = inf.up(prod * (1.0 + a), 6);
        theta.advance(p, 0.0, inf, opts.executor, FLUSH_EVERY)?;
    }
    let q = primes.get(phase1).expect("sieved");
    let smooth_tail = smooth_recip_sum(primes, q, k, opts.enumeration_cap, inf)?.tail;
    let mut muhat = inf.down(1.0 - smooth_tail, 1);
    let mu_phase1 = muhat;
    if muhat <= 0.0 {
        return Ok(MinModRun {
            k,
            phase1,
            end_k,
            smooth_tail,
            mu_phase1,
            f_phase1: f64::INFINITY,
            grid_points,
            steps: Vec::new(),
            outcome: MinModOutcome::Failed { i: phase1 },
        });
    }
    let f_phase1 = inf.up(prod / muhat, 1);

    let mut steps = Vec::with_capacity(end_k - phase1);
    for i in phase1 + 1..=end_k {
        let p = primes.get(i).expect("sieved");
        let m2 = mhat2(&theta, p, inf);
        let delta = phase_two_delta(p, muhat, m2);
        let removed = if m2 > 0.0 { inf.up(m2 / (4.0 * delta * (1.0 - delta)), 4) } else { 0.0 };
        muhat = inf.down(muhat - removed, 1);
        if !(muhat > 0.0) {
            return Ok(MinModRun {
                k,
                phase1,
                end_k,
                smooth_tail,
                mu_phase1,
                f_phase1,
                grid_points,
                steps,
                outcome: MinModOutcome::Failed { i },
            });
        }
        let (a, _) = ab(p);
        prod = inf.up(prod * (1.0 + a / (1.0 - delta)), 6);
        let step = MinModStep { i, p, delta, mhat2: m2, muhat, f: inf.up(prod / muhat, 1) };
        visit(&step);
        steps.push(step);
        if i < end_k {
            theta.advance(p, delta, inf, opts.executor, FLUSH_EVERY)?;
        }
    }
    let f_end = steps.last().map_or(f_phase1, |s| s.f);
    Ok(MinModRun {
        k,
        phase1,
        end_k,
        smooth_tail,
        mu_phase1,
        f_phase1,
        grid_points,
        steps,
        outcome: MinModOutcome::Completed { f_end },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{moment_envelope, DeltaSchedule, PrimeCapProfile};

    #[test]
    fn delta_rule() {
        assert_eq!(phase_two_delta(101, 0.6, 0.0), 0.0);
        let d = phase_two_delta(101, 0.6, 1e-6);
        assert!(d > 0.0 && d < 0.5);
        let (a, _) = ab(101);
        let direct = (1.0 - 1.0 / 101f64.sqrt()) * (1.0 + a) / (1.0 + (1.0 + 2.4 * a * (1.0 + a) / 1e-6).sqrt());
        assert!((d - direct).abs() < 1e-15);
    }

    #[test]
    fn mhat2_on_empty_table_is_geometric() {
        let t = ThetaTable::initial(100, 1 << 20).unwrap();
        let m = mhat2(&t, 101, Inflation::none());
        assert!((m - 1.0 / 10_000.0).abs() < 1e-18);
        // p below K: only p^j >= K contributes
        let m = mhat2(&t, 7, Inflation::none());
        let tail: f64 = (3..60).map(|j| 7f64.powi(-j)).sum();
        assert!((m - tail * tail).abs() < 1e-18);
    }

    #[test]
    fn mhat2_below_generic_envelope() {
        let mut primes = PrimeTable::with_count(40);
        let mut t = ThetaTable::initial(500, 1 << 20).unwrap();
        let mut deltas = Vec::new();
        for i in 1..30 {
            let p = primes.get(i).unwrap();
            let d = if i < 5 { 0.0 } else { 0.3 };
            deltas.push(d);
            t = theta_step(&t, p, d, Inflation::default(), &SerialExecutor).unwrap();
            let next = primes.get(i + 1).unwrap();
            let m = mhat2(&t, next, Inflation::default());
            let sched = DeltaSchedule::new(deltas.clone()).unwrap();
            let (_, env) =
                moment_envelope(primes.as_slice(), i + 1, &sched, &PrimeCapProfile::unbounded(), Inflation::default())
                    .unwrap();
            assert!(m <= env, "i={}: {m} > {env}", i + 1);
        }
        assert!(primes.nth(1).is_ok());
    }

    #[test]
    fn quick_run_is_monotone() {
        let mut primes = PrimeTable::new();
        let run = run_min_modulus(&mut primes, 10_000, 25, 300, &MinModOptions::default(), |_| {}).unwrap();
        // moduli >= 10^4 are too small for this schedule: the measure runs out
        assert_eq!(run.outcome, MinModOutcome::Failed { i: 44 });
        assert_eq!(run.steps.len(), 18);
        assert!(run.steps.windows(2).all(|w| w[1].muhat <= w[0].muhat));
        assert!(run.steps.iter().all(|s| s.delta > 0.0 && s.delta < 0.5));
        assert!(run.steps.iter().all(|s| s.muhat > 0.0));
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut primes = PrimeTable::new();
        let o = MinModOptions::default();
        assert!(run_min_modulus(&mut primes, 1, 5, 10, &o, |_| {}).is_err());
        assert!(run_min_modulus(&mut primes, 100, 5, 5, &o, |_| {}).is_err());
        assert!(run_min_modulus(&mut primes, 100, 0, 5, &o, |_| {}).is_err());
    }
}
