use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::FactoredInt;
use crate::float::{ln, powf};
use crate::{Error, Result};

/// Per-prime cap parameters `delta_p` defining the weight
/// `nu(d) = prod_{p | d} 1/(1 - delta_p)`; primes not listed have weight 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NuSchedule {
    entries: Vec<(u64, BigRational)>,
}

impl NuSchedule {
    pub fn new(mut entries: Vec<(u64, BigRational)>) -> Result<Self> {
        entries.sort_by_key(|(p, _)| *p);
        let half = BigRational::new(1.into(), 2.into());
        for (i, (p, d)) in entries.iter().enumerate() {
            if i > 0 && entries[i - 1].0 == *p {
                return Err(Error::invalid("prime listed twice in nu schedule"));
            }
            if *d < BigRational::from_integer(0.into()) || *d > half {
                return Err(Error::invalid("delta must lie in [0, 1/2]"));
            }
        }
        Ok(NuSchedule { entries })
    }

    pub fn delta(&self, p: u64) -> Option<&BigRational> {
        self.entries.binary_search_by_key(&p, |(q, _)| *q).ok().map(|i| &self.entries[i].1)
    }

    /// `1/(1 - delta_p)`, or 1 outside the schedule.
    pub fn prime_weight(&self, p: u64) -> BigRational {
        match self.delta(p) {
            Some(d) => (BigRational::one() - d).recip(),
            None => BigRational::one(),
        }
    }

    pub fn eval(&self, d: &FactoredInt) -> BigRational {
        d.primes().fold(BigRational::one(), |acc, p| acc * self.prime_weight(p))
    }
}

/// The multiplicative weights appearing in the density conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum MultiplicativeSpec {
    /// `mu(p^i) = 1 + (ln p)^{3+eps}/p` for every `i >= 1`.
    MuEps(f64),
    /// `mu(p^i) = 1 + lambda/p` for every `i >= 1`.
    MuLambda(f64),
    /// `nu(p^t) = 1/(1 - delta_p)`.
    Nu(NuSchedule),
    /// Number of ordered pairs with the given lcm: `chi(p^t) = 2t + 1`.
    Chi,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MultValue {
    Exact(BigRational),
    Real(f64),
}

impl MultValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            MultValue::Exact(r) => crate::float::ratio_to_f64(r),
            MultValue::Real(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            MultValue::Exact(r) => Some(r),
            MultValue::Real(_) => None,
        }
    }
}

#[inline]
pub fn mu_eps(p: u64, eps: f64) -> f64 {
    1.0 + powf(ln(p as f64), 3.0 + eps) / p as f64
}

#[inline]
pub fn mu_lambda(p: u64, lambda: f64) -> f64 {
    1.0 + lambda / p as f64
}

pub fn eval_multiplicative(spec: &MultiplicativeSpec, d: &FactoredInt) -> MultValue {
    match spec {
        MultiplicativeSpec::MuEps(eps) => MultValue::Real(d.primes().map(|p| mu_eps(p, *eps)).product()),
        MultiplicativeSpec::MuLambda(l) => MultValue::Real(d.primes().map(|p| mu_lambda(p, *l)).product()),
        MultiplicativeSpec::Nu(schedule) => MultValue::Exact(schedule.eval(d)),
        MultiplicativeSpec::Chi => {
            let v: BigInt = d.factors().iter().map(|&(_, t)| BigInt::from(2 * t as u64 + 1)).product();
            MultValue::Exact(BigRational::from_integer(v))
        }
    }
}
