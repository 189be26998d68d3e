//! Exact simulation of the distortion sieve on concrete systems.
//!
//! Weights are exact rationals indexed by residues mod `Q_i`. The fibre of
//! `x` mod `Q_{i-1}` is `{x + k Q_{i-1} : 0 <= k < p_i^{gamma_i}}`, which by
//! the Chinese remainder theorem meets every class mod `p_i^{gamma_i}` once.

mod instance;
mod lemmas;
mod measure;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::float::{exp, ratio_to_f64, Inflation};
use crate::numtheory::{mu_eps, FactoredInt};
use crate::{Error, Result};

pub use instance::{build_instance, ArithmeticProgression, CoveringInstance};
pub use lemmas::{verify_sieve_lemmas, LemmaCheck, LemmaReport};
pub use measure::{alpha_counts, alpha_values, fibre_factors, step_measure, validate_schedule, MeasureState};

/// Residues mod `Q_{i-1}` sharing one value of `alpha_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaBin {
    pub alpha: BigRational,
    pub residues: u64,
    /// `Pr_{i-1}` of those residues.
    pub mass: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub prime: u64,
    pub gamma: u32,
    pub delta: BigRational,
    pub alpha_histogram: Vec<AlphaBin>,
    /// `Pr_i(B_i)`.
    pub removed_mass: BigRational,
    /// `E_{i-1}[alpha_i]`.
    pub m1: BigRational,
    /// `E_{i-1}[alpha_i^2]`.
    pub m2: BigRational,
    /// The summand of `eta` contributed by this step.
    pub eta_term: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SieveReport {
    pub q: u64,
    pub prime_order: Vec<u64>,
    pub steps: Vec<StepReport>,
    pub eta: BigRational,
    /// `2 * sum_{d in D} nu(d)/d`.
    pub distortion_budget: BigRational,
    /// Lower bound on the uncovered density, present when `eta < 1`.
    pub density_bound: Option<f64>,
    /// `Pr_n(R)`, the final measure of the uncovered set.
    pub final_uncovered_mass: BigRational,
    /// `Pr_0(R)`, counted over `Z_Q`.
    pub exact_density: BigRational,
}

impl SieveReport {
    pub fn eta_below_one(&self) -> bool {
        self.eta < BigRational::one()
    }
}

/// `nu(d)` for the given schedule, indexed by exposure step.
pub fn nu(instance: &CoveringInstance, schedule: &[BigRational], d: &FactoredInt) -> BigRational {
    let one = BigRational::one();
    d.primes().fold(BigRational::one(), |acc, p| {
        let j = instance.prime_order().iter().position(|&q| q == p).expect("prime of Q");
        acc / (&one - &schedule[j])
    })
}

/// `sum_{d in D_i} nu(d)/d`.
pub fn nu_sum(instance: &CoveringInstance, schedule: &[BigRational], i: usize) -> BigRational {
    instance.exposed_by(i).fold(BigRational::zero(), |acc, a| {
        acc + nu(instance, schedule, a.modulus()) / BigRational::from_integer(a.modulus().value().into())
    })
}

/// `min{m1, m2 / (4 delta (1 - delta))}`, reading the second term as
/// infinite when `delta = 0`.
pub fn eta_term(m1: &BigRational, m2: &BigRational, delta: &BigRational) -> BigRational {
    if delta.is_zero() {
        return m1.clone();
    }
    let four = BigRational::from_integer(4.into());
    let second = m2 / (four * delta * (BigRational::one() - delta));
    if second < *m1 {
        second
    } else {
        m1.clone()
    }
}

/// `(1 - eta) exp(-2/(1 - eta) * s)` rounded downward, or `None` when `eta >= 1`.
pub fn density_lower_bound(eta: &BigRational, nu_sum: &BigRational) -> Option<f64> {
    if *eta >= BigRational::one() {
        return None;
    }
    let slack = ratio_to_f64(&(BigRational::one() - eta));
    let arg = 2.0 * ratio_to_f64(nu_sum) / slack;
    let value = slack * exp(-arg);
    // each rounding is within one ulp; the exponential also amplifies the
    // error of its argument by |arg|
    let ops = 8 + libm::ceil(arg) as u32;
    Some(Inflation::default().down(value, ops))
}

/// The two sums of the moment theorem that sit between the exact moments
/// and the product envelopes:
/// `sum p^{-j} nu(m)/m` over `m p^j in N_i`, and the analogous double sum
/// with `nu(lcm)/lcm`.
pub fn moment_sums(instance: &CoveringInstance, schedule: &[BigRational], i: usize) -> (BigRational, BigRational) {
    let p = instance.prime(i);
    let parts: Vec<(FactoredInt, BigRational)> = instance
        .new_at(i)
        .map(|a| {
            let d = a.modulus();
            let j = d.exponent_of(p);
            let m = FactoredInt::from_factors(d.factors().iter().copied().filter(|&(q, _)| q != p).collect())
                .expect("sub-factorization");
            let pj = BigRational::from_integer(num_bigint::BigInt::from(p).pow(j));
            (m, pj.recip())
        })
        .collect();
    let weight = |m: &FactoredInt| nu(instance, schedule, m) / BigRational::from_integer(m.value().into());
    let first = parts.iter().fold(BigRational::zero(), |acc, (m, w)| acc + w * weight(m));
    let mut second = BigRational::zero();
    for (m1, w1) in &parts {
        for (m2, w2) in &parts {
            let l = m1.lcm(m2).expect("lcm divides Q");
            second += w1 * w2 * weight(&l);
        }
    }
    (first, second)
}

/// Run all steps of the sieve and collect the moments, `eta`, the density
/// bound and the exact uncovered density.
pub fn run_exact_sieve(instance: &CoveringInstance, schedule: &[BigRational]) -> Result<SieveReport> {
    validate_schedule(instance, schedule)?;
    let mut state = MeasureState::initial();
    let mut steps = Vec::with_capacity(instance.steps());
    let mut eta = BigRational::zero();
    for i in 1..=instance.steps() {
        let delta = &schedule[i - 1];
        let mask = instance.removed_mask(i);
        let counts = measure::alpha_counts_from_mask(instance, i, &mask);
        let size = instance.fibre_size(i);
        let mut bins: BTreeMap<u64, (u64, BigRational)> = BTreeMap::new();
        for (x, &c) in counts.iter().enumerate() {
            let bin = bins.entry(c).or_insert_with(|| (0, BigRational::zero()));
            bin.0 += 1;
            bin.1 += state.weight(x as u64);
        }
        let mut m1 = BigRational::zero();
        let mut m2 = BigRational::zero();
        let alpha_histogram: Vec<AlphaBin> = bins
            .into_iter()
            .map(|(c, (residues, mass))| {
                let alpha = BigRational::new(c.into(), size.into());
                m1 += &alpha * &mass;
                m2 += &alpha * &alpha * &mass;
                AlphaBin { alpha, residues, mass }
            })
            .collect();
        let next = measure::advance(instance, &state, delta, &mask, &counts);
        let removed_mass = next
            .weights()
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .fold(BigRational::zero(), |acc, (w, _)| acc + w);
        let term = eta_term(&m1, &m2, delta);
        eta += &term;
        steps.push(StepReport {
            step: i,
            prime: instance.prime(i),
            gamma: instance.gamma(i),
            delta: delta.clone(),
            alpha_histogram,
            removed_mass,
            m1,
            m2,
            eta_term: term,
        });
        state = next;
    }
    let uncovered = instance.uncovered_mask();
    let final_uncovered_mass = state
        .weights()
        .iter()
        .zip(&uncovered)
        .filter(|(_, &u)| u)
        .fold(BigRational::zero(), |acc, (w, _)| acc + w);
    let count = uncovered.iter().filter(|&&u| u).count() as u64;
    let exact_density = BigRational::new(count.into(), instance.q().into());
    let s = nu_sum(instance, schedule, instance.steps());
    let density_bound = density_lower_bound(&eta, &s);
    Ok(SieveReport {
        q: instance.q(),
        prime_order: instance.prime_order().to_vec(),
        steps,
        eta,
        distortion_budget: s * BigRational::from_integer(2.into()),
        density_bound,
        final_uncovered_mass,
        exact_density,
    })
}

/// `e^{-4C}/2` with `C = sum_{d} mu(d)/d` for the weight
/// `mu(p^i) = 1 + (ln p)^{3+eps}/p`.
pub fn density_bound_main_theorem(moduli: &[FactoredInt], eps: f64) -> Result<f64> {
    let mut values: Vec<u64> = moduli.iter().map(|d| d.value()).collect();
    values.sort_unstable();
    if values.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("moduli must be distinct"));
    }
    let c: f64 = moduli
        .iter()
        .map(|d| d.primes().map(|p| mu_eps(p, eps)).product::<f64>() / d.value() as f64)
        .sum();
    Ok(exp(-4.0 * c) / 2.0)
}
