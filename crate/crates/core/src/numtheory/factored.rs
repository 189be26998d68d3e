use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::{Error, Result};

/// A positive integer together with its prime factorization.
///
/// Factors are kept as `(prime, exponent)` pairs with strictly increasing
/// primes and exponents at least one; `1` has no factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredInt {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInt {
    pub fn one() -> Self {
        FactoredInt { value: 1, factors: Vec::new() }
    }

    /// Factor `n` by trial division.
    pub fn factorize(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("cannot factor zero"));
        }
        let mut rest = n;
        let mut factors = Vec::new();
        let mut push = |p: u64, rest: &mut u64| {
            let mut e = 0;
            while (*rest).is_multiple_of(p) {
                *rest /= p;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
        };
        push(2, &mut rest);
        push(3, &mut rest);
        let mut p = 5u64;
        while p.saturating_mul(p) <= rest {
            push(p, &mut rest);
            push(p + 2, &mut rest);
            p += 6;
        }
        if rest > 1 {
            factors.push((rest, 1));
        }
        Ok(FactoredInt { value: n, factors })
    }

    /// Build from an explicit factorization. Primality of the bases is the
    /// caller's responsibility; ordering, exponents and overflow are checked.
    pub fn from_factors(mut factors: Vec<(u64, u32)>) -> Result<Self> {
        factors.sort_unstable_by_key(|&(p, _)| p);
        let mut value: u64 = 1;
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::invalid("repeated prime in factorization"));
            }
        }
        for &(p, e) in &factors {
            if p < 2 || e == 0 {
                return Err(Error::invalid("factor must be (prime >= 2, exponent >= 1)"));
            }
            let pe = p.checked_pow(e).ok_or_else(|| Error::invalid("factorization overflows u64"))?;
            value = value.checked_mul(pe).ok_or_else(|| Error::invalid("factorization overflows u64"))?;
        }
        Ok(FactoredInt { value, factors })
    }

    pub(crate) fn from_parts_unchecked(value: u64, factors: Vec<(u64, u32)>) -> Self {
        debug_assert_eq!(factors.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), value);
        FactoredInt { value, factors }
    }

    pub fn prime(p: u64) -> Self {
        FactoredInt { value: p, factors: vec![(p, 1)] }
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }

    pub fn is_one(&self) -> bool {
        self.value == 1
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn divides(&self, other: &FactoredInt) -> bool {
        other.value.is_multiple_of(self.value)
    }

    fn merge(&self, other: &FactoredInt, pick: impl Fn(u32, u32) -> u32) -> Vec<(u64, u32)> {
        let (a, b) = (&self.factors, &other.factors);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            let (p, e) = match ord {
                Ordering::Less => {
                    i += 1;
                    (a[i - 1].0, pick(a[i - 1].1, 0))
                }
                Ordering::Greater => {
                    j += 1;
                    (b[j - 1].0, pick(0, b[j - 1].1))
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (a[i - 1].0, pick(a[i - 1].1, b[j - 1].1))
                }
            };
            if e > 0 {
                out.push((p, e));
            }
        }
        out
    }

    /// Least common multiple; `None` on u64 overflow.
    pub fn lcm(&self, other: &FactoredInt) -> Option<FactoredInt> {
        let factors = self.merge(other, |x, y| x.max(y));
        let mut value: u64 = 1;
        for &(p, e) in &factors {
            value = value.checked_mul(p.checked_pow(e)?)?;
        }
        Some(FactoredInt { value, factors })
    }

    pub fn gcd(&self, other: &FactoredInt) -> FactoredInt {
        let factors = self.merge(other, |x, y| x.min(y));
        let value = factors.iter().map(|&(p, e)| p.pow(e)).product();
        FactoredInt { value, factors }
    }

    /// Product; `None` on u64 overflow.
    pub fn checked_mul(&self, other: &FactoredInt) -> Option<FactoredInt> {
        let value = self.value.checked_mul(other.value)?;
        Some(FactoredInt { value, factors: self.merge(other, |x, y| x + y) })
    }

    /// All divisors in increasing order.
    pub fn divisors(&self) -> Vec<FactoredInt> {
        let mut out = vec![FactoredInt::one()];
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut pk = 1u64;
            for k in 1..=e {
                pk *= p;
                for i in 0..len {
                    let base = &out[i];
                    let mut factors = base.factors.clone();
                    factors.push((p, k));
                    out.push(FactoredInt { value: base.value * pk, factors });
                }
            }
        }
        out.sort_unstable_by_key(|d| d.value);
        out
    }
}

impl fmt::Display for FactoredInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PartialOrd for FactoredInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FactoredInt {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}
