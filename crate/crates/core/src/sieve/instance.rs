use alloc::format;
use alloc::vec::Vec;

use crate::numtheory::FactoredInt;
use crate::{Error, Result};

/// The progression `residue + modulus * Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithmeticProgression {
    residue: u64,
    modulus: FactoredInt,
}

impl ArithmeticProgression {
    pub fn new(residue: u64, modulus: FactoredInt) -> Result<Self> {
        if residue >= modulus.value() {
            return Err(Error::invalid(format!("residue {} not below modulus {}", residue, modulus)));
        }
        Ok(ArithmeticProgression { residue, modulus })
    }

    /// Convenience constructor factoring the modulus.
    pub fn from_values(residue: u64, modulus: u64) -> Result<Self> {
        Self::new(residue, FactoredInt::factorize(modulus)?)
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> &FactoredInt {
        &self.modulus
    }

    #[inline]
    pub fn contains(&self, z: u64) -> bool {
        z % self.modulus.value() == self.residue
    }
}

/// A finite system of progressions with distinct moduli, together with the
/// prime-by-prime exposure structure used by the sieve.
///
/// Steps are numbered `1..=n`. Step `i` exposes the prime `p_i` to the
/// power `gamma_i`, and the progressions whose moduli divide `Q_i` but not
/// `Q_{i-1}` are the new ones at that step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringInstance {
    progressions: Vec<ArithmeticProgression>,
    primes: Vec<u64>,
    gammas: Vec<u32>,
    partial: Vec<u64>,
    stage: Vec<usize>,
}

/// Validate the progressions and fill in `Q`, the `Q_i` and the exposure
/// stage of every modulus. With no explicit order the primes are taken in
/// increasing order.
pub fn build_instance(
    progressions: Vec<ArithmeticProgression>,
    prime_order: Option<&[u64]>,
    cap: u64,
) -> Result<CoveringInstance> {
    let mut moduli: Vec<u64> = progressions.iter().map(|a| a.modulus.value()).collect();
    moduli.sort_unstable();
    if let Some(w) = moduli.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::invalid(format!("duplicate modulus {}", w[0])));
    }
    if moduli.first() == Some(&1) {
        return Err(Error::invalid("modulus 1 covers every integer on its own"));
    }

    let mut q = FactoredInt::one();
    for a in &progressions {
        q = match q.lcm(&a.modulus) {
            Some(l) if l.value() <= cap => l,
            _ => return Err(Error::cap("lcm of the moduli", cap)),
        };
    }

    let primes: Vec<u64> = match prime_order {
        None => q.primes().collect(),
        Some(order) => {
            let mut sorted = order.to_vec();
            sorted.sort_unstable();
            sorted.dedup();
            let expected: Vec<u64> = q.primes().collect();
            if sorted.len() != order.len() || sorted != expected {
                return Err(Error::invalid("prime order is not a permutation of the primes of Q"));
            }
            order.to_vec()
        }
    };
    let gammas: Vec<u32> = primes.iter().map(|&p| q.exponent_of(p)).collect();
    let mut partial = Vec::with_capacity(primes.len() + 1);
    partial.push(1u64);
    for (&p, &g) in primes.iter().zip(&gammas) {
        let last = *partial.last().unwrap();
        partial.push(last * p.pow(g));
    }
    let stage = progressions
        .iter()
        .map(|a| {
            a.modulus
                .primes()
                .map(|p| primes.iter().position(|&r| r == p).unwrap() + 1)
                .max()
                .unwrap_or(0)
        })
        .collect();
    Ok(CoveringInstance { progressions, primes, gammas, partial, stage })
}

impl CoveringInstance {
    pub fn progressions(&self) -> &[ArithmeticProgression] {
        &self.progressions
    }

    /// Number of prime steps `n`.
    pub fn steps(&self) -> usize {
        self.primes.len()
    }

    pub fn q(&self) -> u64 {
        *self.partial.last().unwrap()
    }

    /// `Q_i` for `0 <= i <= n`.
    pub fn q_at(&self, i: usize) -> u64 {
        self.partial[i]
    }

    pub fn prime_order(&self) -> &[u64] {
        &self.primes
    }

    /// Prime exposed at step `i` (1-based).
    pub fn prime(&self, i: usize) -> u64 {
        self.primes[i - 1]
    }

    pub fn gamma(&self, i: usize) -> u32 {
        self.gammas[i - 1]
    }

    /// `p_i^{gamma_i}`, the fibre size at step `i`.
    pub fn fibre_size(&self, i: usize) -> u64 {
        self.partial[i] / self.partial[i - 1]
    }

    /// Step at which a progression first appears.
    pub fn stage_of(&self, index: usize) -> usize {
        self.stage[index]
    }

    /// Progressions in `N_i`.
    pub fn new_at(&self, i: usize) -> impl Iterator<Item = &ArithmeticProgression> + '_ {
        self.progressions.iter().zip(&self.stage).filter(move |(_, &s)| s == i).map(|(a, _)| a)
    }

    /// Progressions in `D_i`.
    pub fn exposed_by(&self, i: usize) -> impl Iterator<Item = &ArithmeticProgression> + '_ {
        self.progressions.iter().zip(&self.stage).filter(move |(_, &s)| s <= i).map(|(a, _)| a)
    }

    /// Membership mask of `B_i` on `Z_{Q_i}`.
    pub fn removed_mask(&self, i: usize) -> Vec<bool> {
        let qi = self.q_at(i);
        let mut mask = alloc::vec![false; qi as usize];
        for a in self.new_at(i) {
            let d = a.modulus.value();
            let mut z = a.residue;
            while z < qi {
                mask[z as usize] = true;
                z += d;
            }
        }
        mask
    }

    /// Mask of the final uncovered set `R` on `Z_Q`.
    pub fn uncovered_mask(&self) -> Vec<bool> {
        let q = self.q();
        let mut mask = alloc::vec![true; q as usize];
        for a in &self.progressions {
            let d = a.modulus.value();
            let mut z = a.residue;
            while z < q {
                mask[z as usize] = false;
                z += d;
            }
        }
        mask
    }
}
