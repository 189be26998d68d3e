use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::CoveringInstance;
use crate::{Error, Result};

/// Exact probability measure `Pr_i` on `Z_{Q_i}`, one weight per residue.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureState {
    level: usize,
    weights: Vec<BigRational>,
}

impl MeasureState {
    /// The trivial measure on `Z_1`.
    pub fn initial() -> Self {
        MeasureState { level: 0, weights: vec![BigRational::one()] }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// `Q_i`, the number of residues carrying a weight.
    pub fn modulus(&self) -> u64 {
        self.weights.len() as u64
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn weight(&self, x: u64) -> &BigRational {
        &self.weights[x as usize]
    }

    pub fn total(&self) -> BigRational {
        self.weights.iter().fold(BigRational::zero(), |acc, w| acc + w)
    }

    /// Measure of `b + g Z` for every `b` in `0..g`, where `g | Q_i`.
    pub fn marginal(&self, g: u64) -> Vec<BigRational> {
        assert!(g > 0 && self.modulus().is_multiple_of(g), "marginal modulus must divide Q_i");
        let mut out = vec![BigRational::zero(); g as usize];
        for (z, w) in self.weights.iter().enumerate() {
            out[z % g as usize] += w;
        }
        out
    }

    /// Marginals on `Z_g` for every divisor `g` of `Q_i`, obtained by walking
    /// down the divisor lattice one prime at a time.
    pub fn all_marginals(&self, primes: &[u64]) -> BTreeMap<u64, Vec<BigRational>> {
        let q = self.modulus();
        let mut out = BTreeMap::new();
        out.insert(q, self.weights.clone());
        let mut frontier = vec![q];
        while let Some(g) = frontier.pop() {
            for &p in primes {
                if g % p != 0 {
                    continue;
                }
                let h = g / p;
                if out.contains_key(&h) {
                    continue;
                }
                let parent = &out[&g];
                let mut m = vec![BigRational::zero(); h as usize];
                for (z, w) in parent.iter().enumerate() {
                    m[z % h as usize] += w;
                }
                out.insert(h, m);
                frontier.push(h);
            }
        }
        out
    }
}

/// Check that every cap lies in `[0, 1/2]` and that there is one per step.
pub fn validate_schedule(instance: &CoveringInstance, schedule: &[BigRational]) -> Result<()> {
    if schedule.len() != instance.steps() {
        return Err(Error::invalid(format!(
            "schedule has {} entries but the instance has {} prime steps",
            schedule.len(),
            instance.steps()
        )));
    }
    for (i, d) in schedule.iter().enumerate() {
        if outside_cap_range(d) {
            return Err(Error::invalid(format!("delta_{} = {} outside [0, 1/2]", i + 1, d)));
        }
    }
    Ok(())
}

fn outside_cap_range(delta: &BigRational) -> bool {
    *delta < BigRational::zero() || *delta > BigRational::new(1.into(), 2.into())
}

/// Number of removed points in the fibre of each `x` mod `Q_{i-1}`.
pub fn alpha_counts(instance: &CoveringInstance, i: usize) -> Vec<u64> {
    alpha_counts_from_mask(instance, i, &instance.removed_mask(i))
}

pub(crate) fn alpha_counts_from_mask(instance: &CoveringInstance, i: usize, mask: &[bool]) -> Vec<u64> {
    let prev = instance.q_at(i - 1) as usize;
    let mut counts = vec![0u64; prev];
    for (z, &m) in mask.iter().enumerate() {
        if m {
            counts[z % prev] += 1;
        }
    }
    counts
}

/// `alpha_i(x)` for every `x` mod `Q_{i-1}`: the removed share of its fibre.
/// Pure counting, so no measure is needed.
pub fn alpha_values(instance: &CoveringInstance, i: usize) -> Vec<BigRational> {
    let size = BigRational::from_integer(instance.fibre_size(i).into());
    alpha_counts(instance, i)
        .into_iter()
        .map(|c| BigRational::from_integer(c.into()) / &size)
        .collect()
}

/// Scale factors `(removed, survivor)` applied to a fibre with removed share `alpha`.
pub fn fibre_factors(alpha: &BigRational, delta: &BigRational) -> (BigRational, BigRational) {
    let one = BigRational::one();
    if alpha <= delta {
        let survivor = if alpha.is_one() { BigRational::zero() } else { (&one - alpha).recip() };
        (BigRational::zero(), survivor)
    } else {
        let removed = (alpha - delta) / (alpha * (&one - delta));
        (removed, (&one - delta).recip())
    }
}

/// Apply one step of the update rule, moving from `Pr_{i-1}` to `Pr_i`.
pub fn step_measure(instance: &CoveringInstance, state: &MeasureState, delta: &BigRational) -> Result<MeasureState> {
    if outside_cap_range(delta) {
        return Err(Error::invalid(format!("delta {} outside [0, 1/2]", delta)));
    }
    let i = state.level + 1;
    if i > instance.steps() {
        return Err(Error::invalid("measure is already at the final level"));
    }
    let mask = instance.removed_mask(i);
    let counts = alpha_counts_from_mask(instance, i, &mask);
    Ok(advance(instance, state, delta, &mask, &counts))
}

pub(crate) fn advance(
    instance: &CoveringInstance,
    state: &MeasureState,
    delta: &BigRational,
    mask: &[bool],
    counts: &[u64],
) -> MeasureState {
    let i = state.level + 1;
    let prev = instance.q_at(i - 1) as usize;
    let size = instance.fibre_size(i);
    let size_r = BigRational::from_integer(size.into());
    let mut weights = vec![BigRational::zero(); instance.q_at(i) as usize];
    for (x, (w, &count)) in state.weights[..prev].iter().zip(&counts[..prev]).enumerate() {
        let base = w / &size_r;
        let alpha = BigRational::new(count.into(), size.into());
        let (removed, survivor) = fibre_factors(&alpha, delta);
        let removed = &base * removed;
        let survivor = &base * survivor;
        let mut z = x;
        while z < weights.len() {
            weights[z] = if mask[z] { removed.clone() } else { survivor.clone() };
            z += prev;
        }
    }
    MeasureState { level: i, weights }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{build_instance, ArithmeticProgression};

    fn inst(pairs: &[(u64, u64)]) -> CoveringInstance {
        let aps = pairs.iter().map(|&(r, m)| ArithmeticProgression::from_values(r, m).unwrap()).collect();
        build_instance(aps, None, crate::DEFAULT_RESIDUE_CAP).unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn alpha_single_progressions() {
        assert_eq!(alpha_values(&inst(&[(0, 3)]), 1), vec![r(1, 3)]);
        assert_eq!(alpha_values(&inst(&[(1, 4)]), 1), vec![r(1, 4)]);
        // {0 mod 6, 1 mod 2}: step 2 is prime 3 after prime 2
        let i = inst(&[(0, 6), (1, 2)]);
        assert_eq!(alpha_values(&i, 2), vec![r(1, 3), r(0, 1)]);
    }

    #[test]
    fn zero_delta_keeps_uniform_measure() {
        let i = inst(&[(1, 4)]);
        let s = step_measure(&i, &MeasureState::initial(), &r(0, 1)).unwrap();
        assert_eq!(s.weights(), &[r(1, 4), r(1, 4), r(1, 4), r(1, 4)]);
    }

    #[test]
    fn alpha_at_most_delta_kills_removed_points() {
        let i = inst(&[(1, 4)]);
        let s = step_measure(&i, &MeasureState::initial(), &r(1, 4)).unwrap();
        assert_eq!(s.weights(), &[r(1, 3), r(0, 1), r(1, 3), r(1, 3)]);
    }

    #[test]
    fn empty_fibre_is_unchanged() {
        let i = inst(&[(0, 6), (1, 2)]);
        let s1 = step_measure(&i, &MeasureState::initial(), &r(1, 2)).unwrap();
        assert_eq!(s1.weights(), &[BigRational::one(), BigRational::zero()]);
        let s2 = step_measure(&i, &s1, &r(1, 2)).unwrap();
        // residues 1, 3, 5 mod 6 sit over x = 1 which had weight 0
        for z in [1u64, 3, 5] {
            assert!(s2.weight(z).is_zero());
        }
        assert_eq!(s2.total(), BigRational::one());
    }

    #[test]
    fn cap_clamps_removed_weight() {
        let (removed, survivor) = fibre_factors(&r(1, 3), &r(1, 2));
        assert!(removed.is_zero());
        assert_eq!(survivor, r(3, 2));
        let (removed, survivor) = fibre_factors(&r(1, 2), &r(1, 4));
        assert_eq!(removed, r(2, 3));
        assert_eq!(survivor, r(4, 3));
        assert_eq!(fibre_factors(&BigRational::one(), &r(1, 2)).0, BigRational::one());
    }

    #[test]
    fn delta_out_of_range() {
        let i = inst(&[(0, 2)]);
        assert!(step_measure(&i, &MeasureState::initial(), &r(3, 5)).is_err());
        assert!(step_measure(&i, &MeasureState::initial(), &r(-1, 5)).is_err());
        assert!(validate_schedule(&i, &[]).is_err());
    }

    #[test]
    fn marginals_agree_with_direct_sums() {
        let i = inst(&[(1, 4), (2, 6), (5, 9), (3, 10)]);
        let mut s = MeasureState::initial();
        for _ in 1..=i.steps() {
            s = step_measure(&i, &s, &r(1, 5)).unwrap();
        }
        let all = s.all_marginals(i.prime_order());
        assert_eq!(all.len(), 3 * 3 * 2);
        for (g, m) in &all {
            assert_eq!(m, &s.marginal(*g));
        }
    }
}
