//! Floating point helpers that work without `std`.
//!
//! Upper bounds computed in `f64` are pushed upward with an explicit
//! inflation factor; see [`Inflation`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

/// Multiplicative slack applied once per combining step of an upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inflation(f64);

impl Inflation {
    pub fn new(factor: f64) -> crate::Result<Self> {
        if !(factor >= 1.0) || !factor.is_finite() {
            return Err(crate::Error::invalid("inflation factor must be finite and >= 1"));
        }
        Ok(Inflation(factor))
    }

    pub const fn none() -> Self {
        Inflation(1.0)
    }

    #[inline]
    pub fn factor(self) -> f64 {
        self.0
    }

    /// Inflate an upper bound that took `ops` rounding operations to produce.
    #[inline]
    pub fn up(self, value: f64, ops: u32) -> f64 {
        if ops <= 1 {
            value * self.0
        } else {
            value * powi(self.0, ops as i32)
        }
    }

    /// Deflate a lower bound that took `ops` rounding operations to produce.
    #[inline]
    pub fn down(self, value: f64, ops: u32) -> f64 {
        if ops <= 1 {
            value / self.0
        } else {
            value / powi(self.0, ops as i32)
        }
    }
}

impl Default for Inflation {
    fn default() -> Self {
        Inflation(crate::DEFAULT_INFLATION)
    }
}

/// Natural log of a positive big integer, accurate to f64 precision.
pub fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    if bits <= 1000 {
        return ln(n.to_f64().unwrap_or(f64::INFINITY));
    }
    let shift = bits - 60;
    let top: BigInt = n >> shift;
    ln(top.to_f64().unwrap_or(1.0)) + shift as f64 * core::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_ratio(r: &BigRational) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

/// Nearest f64 of a rational (not directed).
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * exp(ln_ratio(&r.abs()))
}

/// Exact rational value of a finite f64.
pub fn f64_to_ratio(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Exact comparison `lhs < rhs` where `rhs` is an f64.
pub fn ratio_lt_f64(lhs: &BigRational, rhs: f64) -> bool {
    match f64_to_ratio(rhs) {
        Some(r) => *lhs < r,
        None => rhs == f64::INFINITY,
    }
}

/// Exact comparison `lhs <= rhs` where `rhs` is an f64.
pub fn ratio_le_f64(lhs: &BigRational, rhs: f64) -> bool {
    match f64_to_ratio(rhs) {
        Some(r) => *lhs <= r,
        None => rhs == f64::INFINITY,
    }
}
