use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::measure::{advance, alpha_counts_from_mask, validate_schedule, MeasureState};
use super::{density_lower_bound, eta_term, nu, nu_sum, CoveringInstance};
use crate::float::{ln_ratio, ratio_lt_f64};
use crate::numtheory::FactoredInt;
use crate::Result;

/// Outcome of one family of checks, with the first violation found.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub checked: u64,
    pub witness: Option<String>,
}

impl LemmaCheck {
    fn new(name: &'static str) -> Self {
        LemmaCheck { name, checked: 0, witness: None }
    }

    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(LemmaCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LemmaCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

// Relative slack for the one check that needs logarithms.
const LOG_SLACK: f64 = 1e-9;

/// Check every structural property of the measures step by step in exact
/// arithmetic: normalization, preservation of `Q_{i-1}`-measurable sets,
/// domination (atomwise and on `random_sets` random sets per step), the
/// bound on `Pr_i(B_i)`, the progression bound `nu(gcd(d, Q_i))/d`, the
/// average distortion bound, and finally the density bound itself.
pub fn verify_sieve_lemmas<R: Rng + ?Sized>(
    instance: &CoveringInstance,
    schedule: &[BigRational],
    rng: &mut R,
    random_sets: usize,
) -> Result<LemmaReport> {
    validate_schedule(instance, schedule)?;
    let mut normalization = LemmaCheck::new("normalization");
    let mut preservation = LemmaCheck::new("measurable-preservation");
    let mut domination = LemmaCheck::new("domination");
    let mut removed_bound = LemmaCheck::new("removed-set-bound");
    let mut progression = LemmaCheck::new("progression-bound");
    let mut distortion = LemmaCheck::new("average-distortion");
    let mut density = LemmaCheck::new("density-bound");

    let one = BigRational::one();
    let mut state = MeasureState::initial();
    let mut eta = BigRational::zero();
    for i in 1..=instance.steps() {
        let delta = &schedule[i - 1];
        let mask = instance.removed_mask(i);
        let counts = alpha_counts_from_mask(instance, i, &mask);
        let next = advance(instance, &state, delta, &mask, &counts);
        let prev = instance.q_at(i - 1) as usize;
        let size = instance.fibre_size(i);
        let size_r = BigRational::from_integer(size.into());
        let inflate = (&one - delta).recip();

        let total = next.total();
        let nonneg = next.weights().iter().all(|w| *w >= BigRational::zero());
        normalization.record(total.is_one() && nonneg, || format!("step {}: total weight {}", i, total));

        // uniform spread of Pr_{i-1} over Z_{Q_i}
        let spread: Vec<BigRational> = state.weights().iter().map(|w| w / &size_r).collect();
        let atom = |z: usize| &spread[z % prev];

        for x in 0..prev {
            let mut fibre = BigRational::zero();
            let mut z = x;
            while z < next.weights().len() {
                fibre += &next.weights()[z];
                z += prev;
            }
            let before = state.weight(x as u64);
            preservation.record(fibre == *before, || format!("step {}: fibre of {} has {} not {}", i, x, fibre, before));
        }

        for (z, w) in next.weights().iter().enumerate() {
            let cap = atom(z) * &inflate;
            domination.record(*w <= cap, || format!("step {}: atom {} exceeds 1/(1-delta) growth", i, z));
            if mask[z] {
                domination.record(w <= atom(z), || format!("step {}: removed atom {} grew", i, z));
            }
        }
        for s in 0..random_sets {
            let mut after = BigRational::zero();
            let mut before = BigRational::zero();
            let mut after_b = BigRational::zero();
            let mut before_b = BigRational::zero();
            for (z, w) in next.weights().iter().enumerate() {
                if rng.gen::<bool>() {
                    after += w;
                    before += atom(z);
                    if mask[z] {
                        after_b += w;
                        before_b += atom(z);
                    }
                }
            }
            domination.record(after <= &before * &inflate, || format!("step {}: random set {} grew too much", i, s));
            domination.record(after_b <= before_b, || format!("step {}: random subset {} of B_i grew", i, s));
        }

        let mut m1 = BigRational::zero();
        let mut m2 = BigRational::zero();
        for (x, &c) in counts.iter().enumerate() {
            let alpha = BigRational::new(c.into(), size.into());
            m1 += &alpha * state.weight(x as u64);
            m2 += &alpha * &alpha * state.weight(x as u64);
        }
        let removed = next
            .weights()
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .fold(BigRational::zero(), |acc, (w, _)| acc + w);
        let term = eta_term(&m1, &m2, delta);
        removed_bound.record(removed <= term, || format!("step {}: Pr(B_i) = {} above {}", i, removed, term));
        eta += term;

        let primes = &instance.prime_order()[..i];
        for (g, marginal) in next.all_marginals(primes) {
            let gf = FactoredInt::factorize(g)?;
            let cap = nu(instance, schedule, &gf) / BigRational::from_integer(g.into());
            for (b, w) in marginal.iter().enumerate() {
                progression.record(*w <= cap, || format!("step {}: class {} mod {} has {} above {}", i, b, g, w, cap));
            }
        }

        let qi = BigRational::from_integer(instance.q_at(i).into());
        let mut expected = 0.0f64;
        for w in next.weights() {
            if w.is_zero() {
                continue;
            }
            let l = ln_ratio(&(w * &qi));
            if l > 0.0 {
                expected += crate::float::ratio_to_f64(w) * l;
            }
        }
        let budget = nu_sum(instance, schedule, i) * BigRational::from_integer(2.into());
        let upper = expected * (1.0 + LOG_SLACK);
        distortion.record(!ratio_lt_f64(&budget, upper), || {
            format!("step {}: average distortion {} above {}", i, expected, budget)
        });

        state = next;
    }

    let uncovered = instance.uncovered_mask();
    let count = uncovered.iter().filter(|&&u| u).count() as u64;
    let exact = BigRational::new(count.into(), instance.q().into());
    let surviving = state
        .weights()
        .iter()
        .zip(&uncovered)
        .filter(|(_, &u)| u)
        .fold(BigRational::zero(), |acc, (w, _)| acc + w);
    density.record(surviving >= &one - &eta, || format!("Pr_n(R) = {} below 1 - eta = {}", surviving, &one - &eta));
    if let Some(bound) = density_lower_bound(&eta, &nu_sum(instance, schedule, instance.steps())) {
        density.record(!ratio_lt_f64(&exact, bound), || format!("density {} below bound {}", exact, bound));
    }

    Ok(LemmaReport { checks: vec![normalization, preservation, domination, removed_bound, progression, distortion, density] })
}
