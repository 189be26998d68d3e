use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;

use super::multiplicative::mu_eps;
use super::{FactoredInt, PrimeTable};
use crate::float::{exp, ln, powf, Inflation};
use crate::{Error, Result};

fn interval_end(n: u64, k: f64) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("interval start must be >= 1"));
    }
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::invalid("interval ratio K must be a finite real >= 1"));
    }
    Ok(libm::floor(k * n as f64) as u64)
}

/// `sum_{d in [n, K n]} mu(d)/d` with `mu(p^i) = 1 + (ln p)^{3+eps}/p`,
/// by direct summation over the integers of the interval.
pub fn mu_sum_interval(n: u64, k: f64, eps: f64, cap: usize) -> Result<f64> {
    let end = interval_end(n, k)?;
    if end - n + 1 > cap as u64 {
        return Err(Error::cap("interval length", cap as u64));
    }
    let mut sum = 0.0;
    for d in n..=end {
        let f = FactoredInt::factorize(d)?;
        sum += f.primes().map(|p| mu_eps(p, eps)).product::<f64>() / d as f64;
    }
    Ok(sum)
}

/// Prefix sums of `mu(d)/d` for sweeping `mu_sum_interval` over many `n`.
#[derive(Debug, Clone)]
pub struct MuIntervalSweep {
    k: f64,
    prefix: Vec<f64>,
}

impl MuIntervalSweep {
    /// Prepare sums for every `n <= n_max` at ratio `k`.
    pub fn new(n_max: u64, k: f64, eps: f64, cap: usize) -> Result<Self> {
        let top = interval_end(n_max.max(1), k)?;
        if top > cap as u64 {
            return Err(Error::cap("interval sweep length", cap as u64));
        }
        let top = top as usize;
        // smallest prime factor table
        let mut spf = vec![0u32; top + 1];
        for i in 2..=top {
            if spf[i] == 0 {
                let mut j = i;
                while j <= top {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let mut mu = vec![1.0f64; top + 1];
        for d in 2..=top {
            let p = spf[d] as usize;
            let mut rest = d / p;
            while rest.is_multiple_of(p) {
                rest /= p;
            }
            mu[d] = mu[rest] * mu_eps(p as u64, eps);
        }
        let mut prefix = vec![0.0f64; top + 1];
        for d in 1..=top {
            prefix[d] = prefix[d - 1] + mu[d] / d as f64;
        }
        Ok(MuIntervalSweep { k, prefix })
    }

    pub fn n_max(&self) -> u64 {
        let top = (self.prefix.len() - 1) as f64;
        libm::floor(top / self.k) as u64
    }

    pub fn value(&self, n: u64) -> Result<f64> {
        let end = interval_end(n, self.k)? as usize;
        if end >= self.prefix.len() {
            return Err(Error::invalid("n beyond prepared sweep range"));
        }
        Ok(self.prefix[end] - self.prefix[n as usize - 1])
    }

    /// `(argmax, max)` of the interval sum over `1 <= n <= n_max`.
    pub fn max_up_to(&self, n_max: u64) -> Result<(u64, f64)> {
        let mut best = (0u64, f64::NEG_INFINITY);
        for n in 1..=n_max {
            let v = self.value(n)?;
            if v > best.1 {
                best = (n, v);
            }
        }
        Ok(best)
    }
}

/// An upper bound for `mu_sum_interval(n, k, eps)` valid for every `n >= 1`.
///
/// Write `mu = 1 * g` with `g >= 0` supported on square-free numbers and
/// `g(p) = mu(p) - 1`. Splitting `d = e m` gives
/// `sum_{n <= d <= kn} mu(d)/d <= (1 + log k) prod_p (1 + g(p)/p)`.
/// The product runs over primes up to `prime_limit`; the remaining primes are
/// bounded by `int_P^inf (log x)^a / x^2 dx <= L^(a+1) / (P (L - a))` with
/// `a = 3 + eps`, `L = log P`.
pub fn mu_interval_constant(k: f64, eps: f64, prime_limit: u64, inflation: Inflation) -> Result<f64> {
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::invalid("interval ratio K must be a finite real >= 1"));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid("eps must be a positive real"));
    }
    let a = 3.0 + eps;
    let l = ln(prime_limit as f64);
    // the tail bound needs log P > a + 1 (so the integrand decreases past P)
    if !(l > a + 1.0) {
        return Err(Error::invalid("prime limit too small for the tail bound"));
    }
    let table = PrimeTable::with_limit(prime_limit);
    let primes = table.primes_up_to(prime_limit);
    let log_product: f64 = primes.iter().map(|&p| libm::log1p((mu_eps(p, eps) - 1.0) / p as f64)).sum();
    let tail = powf(l, a + 1.0) / (prime_limit as f64 * (l - a));
    let ops = 8 * u32::try_from(primes.len()).unwrap_or(u32::MAX / 8).min(u32::MAX / 8);
    let total = inflation.up(log_product + tail, ops);
    Ok(inflation.up((1.0 + ln(k)) * exp(total), 8))
}

/// `sum_{a in A} sum_{b in B} 1/lcm(a, b)`, exactly.
pub fn lcm_sum_pairs(a: &[FactoredInt], b: &[FactoredInt]) -> BigRational {
    let mut total = BigRational::zero();
    for x in a {
        for y in b {
            let l = x.lcm(y).expect("lcm overflows u64");
            total += BigRational::new(1.into(), l.value().into());
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::float::{ln, powf};

    fn set(v: &[u64]) -> Vec<FactoredInt> {
        v.iter().map(|&x| FactoredInt::factorize(x).unwrap()).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn interval_two_to_four() {
        let mu = |p: f64| 1.0 + powf(ln(p), 4.0) / p;
        let oracle = mu(2.0) / 2.0 + mu(3.0) / 3.0 + mu(2.0) / 4.0;
        let got = mu_sum_interval(2, 2.0, 1.0, 1000).unwrap();
        assert!((got - oracle).abs() < 1e-15);
        assert!((got - 1.33).abs() < 0.01);
    }

    #[test]
    fn singleton_interval() {
        for n in [1u64, 7, 12, 625187] {
            let f = FactoredInt::factorize(n).unwrap();
            let mu: f64 = f.primes().map(|p| mu_eps(p, 0.5)).product();
            assert_eq!(mu_sum_interval(n, 1.0, 0.5, 10).unwrap(), mu / n as f64);
        }
    }

    #[test]
    fn interval_constant_bounds_the_sweep() {
        let c = mu_interval_constant(2.0, 1.0, 1_000_000, Inflation::default()).unwrap();
        let sweep = MuIntervalSweep::new(20_000, 2.0, 1.0, 100_000).unwrap();
        let (_, max) = sweep.max_up_to(20_000).unwrap();
        assert!(max < c);
        // K = 1 still needs the extra 1 from the harmonic bound
        let c1 = mu_interval_constant(1.0, 1.0, 1_000_000, Inflation::default()).unwrap();
        assert!(c1 < c);
        assert!(mu_interval_constant(2.0, 1.0, 100, Inflation::default()).is_err());
        assert!(mu_interval_constant(0.5, 1.0, 1_000_000, Inflation::default()).is_err());
    }

    #[test]
    fn interval_errors() {
        assert!(mu_sum_interval(0, 2.0, 1.0, 10).is_err());
        assert!(mu_sum_interval(5, 0.5, 1.0, 10).is_err());
        assert!(matches!(mu_sum_interval(1, 1e9, 1.0, 1000), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn sweep_matches_direct_sum() {
        let sweep = MuIntervalSweep::new(5000, 2.0, 1.0, 1 << 20).unwrap();
        for n in [1u64, 2, 3, 17, 100, 999, 5000] {
            let direct = mu_sum_interval(n, 2.0, 1.0, 1 << 20).unwrap();
            assert!((sweep.value(n).unwrap() - direct).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn lcm_sums_from_antichain_notes() {
        assert_eq!(lcm_sum_pairs(&set(&[1]), &set(&[1])), q(1, 1));
        assert_eq!(lcm_sum_pairs(&set(&[2, 3]), &set(&[2, 3])), q(7, 6));
        assert_eq!(lcm_sum_pairs(&set(&[2, 3, 5]), &set(&[2, 3, 5])), q(17, 10));
    }

    #[test]
    fn lcm_sum_symmetric_and_monotone() {
        let a = set(&[4, 6, 9]);
        let b = set(&[2, 15]);
        let b_sup = set(&[2, 15, 49]);
        assert_eq!(lcm_sum_pairs(&a, &b), lcm_sum_pairs(&b, &a));
        assert!(lcm_sum_pairs(&a, &b_sup) > lcm_sum_pairs(&a, &b));
    }
}
