use alloc::format;
use alloc::vec::Vec;

use crate::float::{ln, sqrt, Inflation};
use crate::numtheory::PrimeSource;
use crate::{Error, Result};

/// `a = (3p-1)/(p-1)^2` and `b = 1/(4(p-1)^2)`.
#[inline]
pub fn ab(p: u64) -> (f64, f64) {
    let q = p as f64 - 1.0;
    ((3.0 * p as f64 - 1.0) / (q * q), 1.0 / (4.0 * q * q))
}

/// One step of the recursion at prime `p`:
/// `(1 + a/(1-delta)) (1 - b f/(delta(1-delta)))^{-1} f`, times the inflation
/// factor. `None` when the guard `b f < delta (1 - delta)` fails.
pub fn f_step(p: u64, f_prev: f64, delta: f64, inflation: Inflation) -> Option<f64> {
    if !(delta > 0.0 && delta <= 0.5) || !(f_prev > 0.0) {
        return None;
    }
    let (a, b) = ab(p);
    let spread = delta * (1.0 - delta);
    let load = b * f_prev;
    if !(inflation.up(load, 2) < inflation.down(spread, 2)) {
        return None;
    }
    let grow = 1.0 + a / (1.0 - delta);
    let shrink = 1.0 - load / spread;
    Some(inflation.up(grow / shrink * f_prev, 1))
}

/// The cap minimizing the next value: `(1+a)/(1 + sqrt(1 + a(1+a)/(b f)))`,
/// clamped to `1/2`.
pub fn delta_opt(p: u64, f_prev: f64) -> f64 {
    let (a, b) = ab(p);
    let d = (1.0 + a) / (1.0 + sqrt(1.0 + a * (1.0 + a) / (b * f_prev)));
    d.min(0.5)
}

/// `(ln k + ln ln k - 3)^2 k`.
pub fn termination_threshold(k: u64) -> f64 {
    let kf = k as f64;
    let lam = ln(kf) + ln(ln(kf)) - 3.0;
    lam * lam * kf
}

/// Whether `f_k` is small enough to end the recursion at `k >= 10`.
pub fn termination_ok(k: u64, f: f64) -> Result<bool> {
    if k < 10 {
        return Err(Error::invalid("termination criterion needs k >= 10"));
    }
    Ok(f <= Inflation::default().down(termination_threshold(k), 6))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkRow {
    pub i: usize,
    pub p: u64,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryStatus {
    /// The termination criterion held at step `k`.
    Success { k: usize },
    /// The guard failed at step `i`.
    GuardFailure { i: usize },
    /// Neither happened up to `k_max`.
    Inconclusive { k_max: usize },
}

impl TrajectoryStatus {
    pub fn is_success(self) -> bool {
        matches!(self, TrajectoryStatus::Success { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FkTrajectory {
    pub k0: usize,
    pub f_start: f64,
    pub inflation: f64,
    /// Rows for the steps `k0 < i <= end`.
    pub rows: Vec<FkRow>,
    pub status: TrajectoryStatus,
}

/// Iterate the recursion from `f_{k0} = f_start` with optimal caps, calling
/// `visit` on every completed step, until termination, guard failure or `k_max`.
pub fn walk_trajectory<S: PrimeSource + ?Sized>(
    primes: &mut S,
    k0: usize,
    f_start: f64,
    k_max: usize,
    inflation: Inflation,
    mut visit: impl FnMut(&FkRow),
) -> Result<TrajectoryStatus> {
    if k0 == 0 {
        return Err(Error::invalid("trajectory start index must be at least 1"));
    }
    if !(f_start > 0.0) || !f_start.is_finite() {
        return Err(Error::invalid(format!("starting value {} must be positive", f_start)));
    }
    if k0 >= 10 && termination_ok(k0 as u64, f_start)? {
        return Ok(TrajectoryStatus::Success { k: k0 });
    }
    let mut f = f_start;
    for i in k0 + 1..=k_max {
        let p = primes.nth_prime(i);
        let delta = delta_opt(p, f);
        let Some(next) = f_step(p, f, delta, inflation) else {
            return Ok(TrajectoryStatus::GuardFailure { i });
        };
        let (a, b) = ab(p);
        f = next;
        visit(&FkRow { i, p, a, b, delta, f });
        if i >= 10 && termination_ok(i as u64, f)? {
            return Ok(TrajectoryStatus::Success { k: i });
        }
    }
    Ok(TrajectoryStatus::Inconclusive { k_max })
}

/// [`walk_trajectory`] keeping every row.
pub fn run_trajectory<S: PrimeSource + ?Sized>(
    primes: &mut S,
    k0: usize,
    f_start: f64,
    k_max: usize,
    inflation: Inflation,
) -> Result<FkTrajectory> {
    let mut rows = Vec::new();
    let status = walk_trajectory(primes, k0, f_start, k_max, inflation, |r| rows.push(*r))?;
    Ok(FkTrajectory { k0, f_start, inflation: inflation.factor(), rows, status })
}

/// Which starting value the binary chop searches over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChopStart {
    /// Chop on `f_2`; the first recursion step is `i = 3`.
    #[default]
    F2,
    /// Chop on `f_3`.
    F3,
}

impl ChopStart {
    pub fn index(self) -> usize {
        match self {
            ChopStart::F2 => 2,
            ChopStart::F3 => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkOptions {
    pub start: ChopStart,
    pub inflation: Inflation,
    /// Stop when `(hi - lo)/lo` drops below this.
    pub rel_precision: f64,
    pub k_max: usize,
}

impl Default for GkOptions {
    fn default() -> Self {
        GkOptions { start: ChopStart::F2, inflation: Inflation::default(), rel_precision: 1e-7, k_max: 10_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkRow {
    pub k: usize,
    pub p_k: u64,
    pub g_k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GkTable {
    pub start_index: usize,
    /// Largest starting value found to succeed.
    pub f_start: f64,
    /// Smallest starting value found to fail.
    pub failing_start: f64,
    /// Step at which the retained trajectory met the termination criterion.
    pub termination_index: usize,
    pub chop_iterations: u32,
    pub rows: Vec<GkRow>,
}

/// Largest table index accepted by [`gk_table`].
pub const GK_MAX_INDEX: usize = 51_000;

/// Binary-chop the largest successful starting value, then read `g_k` off
/// its trajectory for each requested `k`.
pub fn gk_table<S: PrimeSource + ?Sized>(primes: &mut S, k_list: &[usize], opts: &GkOptions) -> Result<GkTable> {
    let k0 = opts.start.index();
    if let Some(&k) = k_list.iter().find(|&&k| k < k0 || k > GK_MAX_INDEX) {
        return Err(Error::invalid(format!("k = {} outside {}..={}", k, k0, GK_MAX_INDEX)));
    }
    if !(opts.rel_precision > 0.0) {
        return Err(Error::invalid("relative precision must be positive"));
    }
    let succeeds = |primes: &mut S, f: f64| -> Result<bool> {
        match walk_trajectory(primes, k0, f, opts.k_max, opts.inflation, |_| {})? {
            TrajectoryStatus::Success { .. } => Ok(true),
            // an undecided run is not a proof, so it counts as failing
            TrajectoryStatus::GuardFailure { .. } | TrajectoryStatus::Inconclusive { .. } => Ok(false),
        }
    };

    let mut iterations = 0u32;
    let mut lo = 1.0f64;
    while !succeeds(primes, lo)? {
        lo /= 2.0;
        iterations += 1;
        if iterations > 200 {
            return Err(Error::Inconclusive("no successful starting value found".into()));
        }
    }
    let mut hi = lo * 2.0;
    while succeeds(primes, hi)? {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
        if iterations > 400 {
            return Err(Error::Inconclusive("no failing starting value found".into()));
        }
    }
    while (hi - lo) / lo > opts.rel_precision {
        let mid = 0.5 * (lo + hi);
        if succeeds(primes, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let mut values: Vec<(usize, u64, f64)> = Vec::new();
    let status = walk_trajectory(primes, k0, lo, opts.k_max, opts.inflation, |r| {
        if k_list.contains(&r.i) {
            values.push((r.i, r.p, r.f));
        }
    })?;
    let TrajectoryStatus::Success { k: termination_index } = status else {
        return Err(Error::Inconclusive("retained starting value no longer succeeds".into()));
    };
    let mut rows = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let row = if k == k0 {
            GkRow { k, p_k: primes.nth_prime(k), g_k: lo }
        } else {
            match values.iter().find(|v| v.0 == k) {
                Some(&(k, p_k, g_k)) => GkRow { k, p_k, g_k },
                None => {
                    return Err(Error::Inconclusive(format!(
                        "trajectory terminated at {} before reaching k = {}",
                        termination_index, k
                    )))
                }
            }
        };
        rows.push(row);
    }
    Ok(GkTable { start_index: k0, f_start: lo, failing_start: hi, termination_index, chop_iterations: iterations, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::PrimeTable;

    #[test]
    fn ab_at_five() {
        assert_eq!(ab(5), (14.0 / 16.0, 1.0 / 64.0));
    }

    #[test]
    fn step_tends_to_identity() {
        // large p makes both correction factors close to 1
        let f = f_step(1_000_000_007, 1.0, 0.5, Inflation::none()).unwrap();
        assert!((f - 1.0).abs() < 1e-5);
    }

    #[test]
    fn step_at_five_matches_formula() {
        let d = delta_opt(5, 1.0);
        let direct = (1.0 + (7.0 / 8.0) / (1.0 - d)) / (1.0 - (1.0 / 64.0) / (d * (1.0 - d)));
        assert_eq!(f_step(5, 1.0, d, Inflation::none()).unwrap(), direct);
        assert!(f_step(5, 1.0, 0.01, Inflation::none()).is_none());
        assert!(f_step(5, 1.0, 0.0, Inflation::none()).is_none());
    }

    #[test]
    fn delta_opt_matches_grid_argmin() {
        let d = delta_opt(5, 1.0);
        assert!((d - 0.166).abs() < 1e-3);
        for &(p, f) in &[(5u64, 1.0f64), (7, 3.0), (29, 30.0), (541, 1500.0), (13, 0.2)] {
            let d = delta_opt(p, f);
            let mut best = (f64::INFINITY, 0.0);
            for k in 1..=10_000 {
                let g = k as f64 / 20_000.0;
                if let Some(v) = f_step(p, f, g, Inflation::none()) {
                    if v < best.0 {
                        best = (v, g);
                    }
                }
            }
            assert!((best.1 - d).abs() < 1e-4 || (d == 0.5 && best.1 == 0.5), "p={} f={}", p, f);
            assert!(f_step(p, f, d, Inflation::none()).unwrap() <= best.0);
        }
    }

    #[test]
    fn delta_opt_clamps() {
        assert_eq!(delta_opt(3, 1e12), 0.5);
    }

    #[test]
    fn termination_examples() {
        assert!(!termination_ok(10, 36.72).unwrap());
        assert!((termination_threshold(10) - 0.1866).abs() < 1e-3);
        assert!(termination_ok(1_000_000, 1.0).unwrap());
        assert!((termination_threshold(1_000_000) - 1.8e8).abs() < 1e7);
        assert!(termination_ok(9, 1.0).is_err());
    }

    #[test]
    fn trajectories() {
        let mut t = PrimeTable::new();
        let inf = Inflation::default();
        assert!(run_trajectory(&mut t, 2, 1.0, 10_000_000, inf).unwrap().status.is_success());
        assert!(matches!(
            run_trajectory(&mut t, 3, 10.0, 10_000_000, inf).unwrap().status,
            TrajectoryStatus::GuardFailure { .. }
        ));
        assert!(run_trajectory(&mut t, 3, 2.55, 10_000_000, inf).unwrap().status.is_success());
        assert!(run_trajectory(&mut t, 3, 0.0, 100, inf).is_err());
    }
}
