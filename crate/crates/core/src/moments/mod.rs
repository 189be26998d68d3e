//! Computable bounds: the product envelopes for the first two moments of
//! `alpha_i`, the `f_k` recursion with its optimal caps, the threshold
//! table `g_k`, the main-theorem `eta` bound and the certificates.

mod certificates;
mod eta;
mod recursion;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::float::{powi, Inflation};
use crate::{Error, Result};

pub use certificates::{certificates, Certificate, Comparison, SchinzelInputs, Verdict};
pub use eta::{main_theorem_eta, Claim1Method, EtaBound, TAIL_MAJORANT};
pub use recursion::{
    ab, delta_opt, f_step, gk_table, run_trajectory, termination_ok, termination_threshold, walk_trajectory,
    ChopStart, FkRow, FkTrajectory, GkOptions, GkRow, GkTable, TrajectoryStatus, GK_MAX_INDEX,
};

/// Caps `delta_j in [0, 1/2]`, one per prime index starting at 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DeltaSchedule {
    entries: Vec<f64>,
}

impl DeltaSchedule {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some((j, d)) = entries.iter().enumerate().find(|(_, &d)| !(0.0..=0.5).contains(&d)) {
            return Err(Error::invalid(format!("delta_{} = {} outside [0, 1/2]", j + 1, d)));
        }
        Ok(DeltaSchedule { entries })
    }

    pub fn zeros(n: usize) -> Self {
        DeltaSchedule { entries: alloc::vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `delta_j` for 1-based `j`.
    pub fn get(&self, j: usize) -> f64 {
        self.entries[j - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }
}

/// Optional caps `gamma_j` on the exponent of the `j`-th prime (1-based).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrimeCapProfile {
    caps: BTreeMap<usize, u32>,
}

impl PrimeCapProfile {
    pub fn unbounded() -> Self {
        PrimeCapProfile::default()
    }

    pub fn with_cap(mut self, j: usize, gamma: u32) -> Result<Self> {
        if gamma == 0 {
            return Err(Error::invalid("exponent caps must be at least 1"));
        }
        self.caps.insert(j, gamma);
        Ok(self)
    }

    pub fn cap(&self, j: usize) -> Option<u32> {
        self.caps.get(&j).copied()
    }
}

/// `sum_{t >= 1} (2t+1)/p^t`, truncated at `t <= gamma` when capped.
fn odd_power_sum(p: u64, cap: Option<u32>) -> f64 {
    let pf = p as f64;
    match cap {
        None => (3.0 * pf - 1.0) / ((pf - 1.0) * (pf - 1.0)),
        Some(g) => (1..=g).map(|t| (2 * t + 1) as f64 / powi(pf, t as i32)).sum(),
    }
}

fn odd_power_sum_exact(p: u64, cap: Option<u32>) -> BigRational {
    let pr = BigRational::from_integer(p.into());
    let one = BigRational::one();
    match cap {
        None => (BigRational::from_integer(3.into()) * &pr - &one) / ((&pr - &one) * (&pr - &one)),
        Some(g) => {
            let mut acc = BigRational::zero();
            let mut pow = one.clone();
            for t in 1..=g {
                pow *= &pr;
                acc += BigRational::from_integer((2 * t + 1).into()) / &pow;
            }
            acc
        }
    }
}

/// Envelopes `(M1, M2)` for step `i` over the prime sequence `primes`
/// (`p_i = primes[i-1]`), rounded upward:
/// `M1 <= 1/(p_i-1) prod_{j<i} (1 + 1/((1-delta_j)(p_j-1)))` and
/// `M2 <= 1/(p_i-1)^2 prod_{j<i} (1 + s_j/(1-delta_j))`.
pub fn moment_envelope(
    primes: &[u64],
    i: usize,
    schedule: &DeltaSchedule,
    caps: &PrimeCapProfile,
    inflation: Inflation,
) -> Result<(f64, f64)> {
    check_envelope_args(primes.len(), i, schedule.len())?;
    let mut m1 = 1.0f64;
    let mut m2 = 1.0f64;
    for j in 1..i {
        let pj = primes[j - 1] as f64;
        let keep = 1.0 - schedule.get(j);
        m1 = inflation.up(m1 * (1.0 + 1.0 / (keep * (pj - 1.0))), 5);
        let ops = 6 + cap_ops(caps.cap(j));
        m2 = inflation.up(m2 * (1.0 + odd_power_sum(primes[j - 1], caps.cap(j)) / keep), ops);
    }
    let pi = primes[i - 1] as f64 - 1.0;
    Ok((inflation.up(m1 / pi, 2), inflation.up(m2 / (pi * pi), 3)))
}

fn cap_ops(cap: Option<u32>) -> u32 {
    cap.map_or(4, |g| 4 * g)
}

/// Exact rational form of [`moment_envelope`].
pub fn moment_envelope_exact(
    primes: &[u64],
    i: usize,
    schedule: &[BigRational],
    caps: &PrimeCapProfile,
) -> Result<(BigRational, BigRational)> {
    check_envelope_args(primes.len(), i, schedule.len())?;
    let one = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    let mut m1 = one.clone();
    let mut m2 = one.clone();
    for j in 1..i {
        let d = &schedule[j - 1];
        if *d < BigRational::zero() || *d > half {
            return Err(Error::invalid(format!("delta_{} outside [0, 1/2]", j)));
        }
        let keep = &one - d;
        let pm1 = BigRational::from_integer((primes[j - 1] - 1).into());
        m1 *= &one + (&keep * &pm1).recip();
        m2 *= &one + odd_power_sum_exact(primes[j - 1], caps.cap(j)) / &keep;
    }
    let pi = BigRational::from_integer((primes[i - 1] - 1).into());
    Ok((m1 / &pi, m2 / (&pi * &pi)))
}

fn check_envelope_args(n_primes: usize, i: usize, n_sched: usize) -> Result<()> {
    if i == 0 || i > n_primes {
        return Err(Error::invalid(format!("prime index {} outside 1..={}", i, n_primes)));
    }
    if n_sched + 1 < i {
        return Err(Error::invalid(format!("schedule must cover indices below {}", i)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: [u64; 6] = [2, 3, 5, 7, 11, 13];

    #[test]
    fn envelope_examples() {
        let none = Inflation::none();
        let (m1, _) = moment_envelope(&P, 1, &DeltaSchedule::zeros(0), &PrimeCapProfile::unbounded(), none).unwrap();
        assert_eq!(m1, 1.0);
        let (_, m2) = moment_envelope(&P, 2, &DeltaSchedule::zeros(1), &PrimeCapProfile::unbounded(), none).unwrap();
        assert_eq!(m2, 1.5);
        let exact = moment_envelope_exact(&P, 2, &[BigRational::zero()], &PrimeCapProfile::unbounded()).unwrap();
        assert_eq!(exact.1, BigRational::new(3.into(), 2.into()));
    }

    #[test]
    fn capped_prime_three_contributes_two() {
        // caps of 1 on the prime 3 turn its factor into 1 + 3/3
        let caps = PrimeCapProfile::unbounded().with_cap(2, 1).unwrap();
        let z = [BigRational::zero(), BigRational::zero()];
        let (_, capped) = moment_envelope_exact(&P, 3, &z, &caps).unwrap();
        let (_, free) = moment_envelope_exact(&P, 3, &z, &PrimeCapProfile::unbounded()).unwrap();
        // prime 2 gives 1 + 5, prime 3 gives 1 + 1 capped or 1 + 8/4 free
        assert_eq!(capped, BigRational::new(12.into(), 16.into()));
        assert_eq!(free, BigRational::new(18.into(), 16.into()));
        assert_eq!(odd_power_sum_exact(3, Some(1)), BigRational::one());
        assert_eq!(odd_power_sum_exact(3, None), BigRational::from_integer(2.into()));
        assert_eq!(odd_power_sum_exact(5, Some(2)), BigRational::new(20.into(), 25.into()));
    }

    #[test]
    fn float_envelope_dominates_exact() {
        let sched = DeltaSchedule::new(alloc::vec![0.25, 0.5, 0.0, 0.125, 0.375]).unwrap();
        let exact: Vec<BigRational> = sched.as_slice().iter().map(|&d| BigRational::from_float(d).unwrap()).collect();
        for i in 1..=6 {
            let (f1, f2) = moment_envelope(&P, i, &sched, &PrimeCapProfile::unbounded(), Inflation::default()).unwrap();
            let (e1, e2) = moment_envelope_exact(&P, i, &exact, &PrimeCapProfile::unbounded()).unwrap();
            assert!(crate::float::ratio_le_f64(&e1, f1));
            assert!(crate::float::ratio_le_f64(&e2, f2));
        }
    }

    #[test]
    fn envelope_rejects_bad_arguments() {
        let s = DeltaSchedule::zeros(2);
        assert!(moment_envelope(&P, 0, &s, &PrimeCapProfile::unbounded(), Inflation::none()).is_err());
        assert!(moment_envelope(&P, 5, &s, &PrimeCapProfile::unbounded(), Inflation::none()).is_err());
        assert!(DeltaSchedule::new(alloc::vec![0.6]).is_err());
        assert!(PrimeCapProfile::unbounded().with_cap(1, 0).is_err());
    }
}
