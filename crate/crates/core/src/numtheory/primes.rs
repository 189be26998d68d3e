use alloc::vec;
use alloc::vec::Vec;

use crate::float::ln;
use crate::{Error, Result};

const SEGMENT: usize = 1 << 18;

/// Every prime up to `limit`, grown on demand by a segmented sieve of
/// Eratosthenes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    primes: Vec<u64>,
    limit: u64,
}

impl Default for PrimeTable {
    fn default() -> Self {
        PrimeTable::new()
    }
}

impl PrimeTable {
    pub fn new() -> Self {
        PrimeTable { primes: Vec::new(), limit: 1 }
    }

    pub fn with_limit(limit: u64) -> Self {
        let mut t = PrimeTable::new();
        t.extend_to(limit);
        t
    }

    pub fn with_count(count: usize) -> Self {
        let mut t = PrimeTable::new();
        t.ensure_count(count);
        t
    }

    /// Rebuild from a stored list (used by on-disk caches). The list must be
    /// exactly the primes up to `limit`; a cheap structural check is done.
    pub fn from_parts(primes: Vec<u64>, limit: u64) -> Result<Self> {
        if primes.first().is_some_and(|&p| p != 2) || primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("stored prime list is not an increasing list starting at 2"));
        }
        if primes.last().is_some_and(|&p| p > limit) || (limit >= 2 && primes.is_empty()) {
            return Err(Error::invalid("stored prime list inconsistent with its limit"));
        }
        // spot-check a prefix against a fresh sieve
        let check = primes.len().min(1000);
        if check > 0 {
            let fresh = PrimeTable::with_limit(primes[check - 1]);
            if fresh.primes[..] != primes[..check] {
                return Err(Error::invalid("stored prime list disagrees with the sieve"));
            }
        }
        Ok(PrimeTable { primes, limit })
    }

    pub fn into_parts(self) -> (Vec<u64>, u64) {
        (self.primes, self.limit)
    }

    #[inline]
    pub fn limit(&self) -> u64 {
        self.limit
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    /// The `k`-th prime, 1-based, if already sieved.
    #[inline]
    pub fn get(&self, k: usize) -> Option<u64> {
        k.checked_sub(1).and_then(|i| self.primes.get(i).copied())
    }

    /// The `k`-th prime (1-based), sieving further if needed.
    pub fn nth(&mut self, k: usize) -> Result<u64> {
        if k == 0 {
            return Err(Error::invalid("prime index is 1-based"));
        }
        self.ensure_count(k);
        Ok(self.primes[k - 1])
    }

    /// Primes `<= x`; requires `x <= limit()`.
    pub fn primes_up_to(&self, x: u64) -> &[u64] {
        debug_assert!(x <= self.limit);
        let n = self.primes.partition_point(|&p| p <= x);
        &self.primes[..n]
    }

    /// Membership for `x <= limit()`.
    pub fn is_prime(&self, x: u64) -> Option<bool> {
        (x <= self.limit).then(|| self.primes.binary_search(&x).is_ok())
    }

    /// 1-based index of prime `p`, if `p` is a sieved prime.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok().map(|i| i + 1)
    }

    pub fn ensure_count(&mut self, count: usize) {
        while self.primes.len() < count {
            let target = nth_prime_upper_estimate(count).max(self.limit.saturating_mul(2)).max(64);
            self.extend_to(target);
        }
    }

    /// Sieve every prime up to `new_limit`.
    pub fn extend_to(&mut self, new_limit: u64) {
        if new_limit <= self.limit {
            return;
        }
        let base = simple_sieve(isqrt(new_limit));
        let mut seg = vec![true; SEGMENT];
        let mut lo = self.limit + 1;
        while lo <= new_limit {
            let hi = (lo + SEGMENT as u64 - 1).min(new_limit);
            let len = (hi - lo + 1) as usize;
            seg[..len].iter_mut().for_each(|b| *b = true);
            for &p in &base {
                if p * p > hi {
                    break;
                }
                let mut m = (lo.div_ceil(p) * p).max(p * p);
                while m <= hi {
                    seg[(m - lo) as usize] = false;
                    m += p;
                }
            }
            for (off, &is_p) in seg[..len].iter().enumerate() {
                let n = lo + off as u64;
                if is_p && n >= 2 {
                    self.primes.push(n);
                }
            }
            lo = hi + 1;
        }
        self.limit = new_limit;
    }
}

/// Access to the sequence of primes by 1-based index, growing as needed.
pub trait PrimeSource {
    fn nth_prime(&mut self, k: usize) -> u64;
}

impl PrimeSource for PrimeTable {
    fn nth_prime(&mut self, k: usize) -> u64 {
        if k > self.primes.len() {
            let want = k.max(self.primes.len() * 2);
            self.ensure_count(want);
        }
        self.primes[k - 1]
    }
}

/// Sequential prime source that keeps only the current sieve segment, for
/// walks far past what a stored table can hold. Requests for an index
/// below the current segment restart the stream.
#[derive(Debug, Clone)]
pub struct PrimeStream {
    base: Vec<u64>,
    base_limit: u64,
    seg: Vec<u64>,
    /// 1-based index of `seg[0]`.
    first_index: usize,
    next_lo: u64,
}

impl Default for PrimeStream {
    fn default() -> Self {
        PrimeStream::new()
    }
}

impl PrimeStream {
    pub fn new() -> Self {
        PrimeStream { base: simple_sieve(1 << 16), base_limit: 1 << 16, seg: Vec::new(), first_index: 1, next_lo: 2 }
    }

    fn restart(&mut self) {
        self.seg.clear();
        self.first_index = 1;
        self.next_lo = 2;
    }

    fn advance(&mut self) {
        let lo = self.next_lo;
        let hi = lo + SEGMENT as u64 - 1;
        if isqrt(hi) > self.base_limit {
            self.base_limit = isqrt(hi) * 2;
            self.base = simple_sieve(self.base_limit);
        }
        self.first_index += self.seg.len();
        let mut mark = vec![true; SEGMENT];
        for &p in &self.base {
            if p * p > hi {
                break;
            }
            let mut m = (lo.div_ceil(p) * p).max(p * p);
            while m <= hi {
                mark[(m - lo) as usize] = false;
                m += p;
            }
        }
        self.seg.clear();
        self.seg.extend(mark.iter().enumerate().filter(|(_, &b)| b).map(|(o, _)| lo + o as u64).filter(|&n| n >= 2));
        self.next_lo = hi + 1;
    }
}

impl PrimeSource for PrimeStream {
    fn nth_prime(&mut self, k: usize) -> u64 {
        if k < self.first_index {
            self.restart();
        }
        while k >= self.first_index + self.seg.len() {
            self.advance();
        }
        self.seg[k - self.first_index]
    }
}

fn simple_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut is = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if is[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
    }
    out
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = crate::float::sqrt(n as f64) as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// An upper bound for the `k`-th prime: `k(ln k + ln ln k)` for `k >= 6`.
pub fn nth_prime_upper_estimate(k: usize) -> u64 {
    if k < 6 {
        return 13;
    }
    let k = k as f64;
    (k * (ln(k) + ln(ln(k)))) as u64 + 1
}

/// Lower bound `k (ln k + ln ln k - 1)` on the `k`-th prime, valid for `k >= 2`.
pub fn dusart_lower(k: u64) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid("dusart_lower needs k >= 2"));
    }
    let k = k as f64;
    Ok(k * (ln(k) + ln(ln(k)) - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_primes() {
        let mut t = PrimeTable::new();
        assert_eq!(t.nth(1).unwrap(), 2);
        assert_eq!(t.nth(10).unwrap(), 29);
        assert_eq!(&t.as_slice()[..6], &[2, 3, 5, 7, 11, 13]);
        assert!(t.nth(0).is_err());
    }

    #[test]
    fn indices_used_by_the_bounds() {
        let mut t = PrimeTable::new();
        assert_eq!(t.nth(51).unwrap(), 233);
        assert_eq!(t.nth(100).unwrap(), 541);
        assert_eq!(t.nth(1000).unwrap(), 7919);
        assert_eq!(t.nth(10000).unwrap(), 104729);
        assert_eq!(t.nth(51000).unwrap(), 625187);
    }

    #[test]
    fn segmented_matches_simple_sieve() {
        let mut t = PrimeTable::with_limit(1000);
        t.extend_to(700_001);
        assert_eq!(t.as_slice(), &simple_sieve(700_001)[..]);
        assert_eq!(t.is_prime(700_001), Some(true));
        assert_eq!(t.is_prime(699_999), Some(false));
        assert_eq!(t.is_prime(699_967), Some(true));
        assert_eq!(t.is_prime(800_000), None);
    }

    #[test]
    fn dusart_small_values() {
        let two = dusart_lower(2).unwrap();
        let expect = 2.0 * (ln(2.0) + ln(ln(2.0)) - 1.0);
        assert!((two - expect).abs() < 1e-15);
        assert!((two + 1.346731).abs() < 1e-6);
        let ten = dusart_lower(10).unwrap();
        assert!((ten - 21.37).abs() < 0.01);
        assert!(29.0 > ten);
        assert!(dusart_lower(1).is_err());
    }

    #[test]
    fn dusart_holds_on_sweep() {
        let t = PrimeTable::with_count(1_000_000);
        for k in 2..=1_000_000u64 {
            assert!(t.get(k as usize).unwrap() as f64 > dusart_lower(k).unwrap(), "k={k}");
        }
    }

    #[test]
    fn stream_matches_table() {
        let mut t = PrimeTable::with_count(300_000);
        let mut s = PrimeStream::new();
        for k in (1..=300_000).step_by(7) {
            assert_eq!(s.nth_prime(k), t.nth_prime(k));
        }
        assert_eq!(s.nth_prime(51), 233);
        assert_eq!(s.nth_prime(1_000_000), 15_485_863);
    }

    #[test]
    fn from_parts_rejects_garbage() {
        assert!(PrimeTable::from_parts(vec![2, 3, 4], 10).is_err());
        assert!(PrimeTable::from_parts(vec![3, 5], 10).is_err());
        let t = PrimeTable::with_limit(100);
        let (p, l) = t.clone().into_parts();
        assert_eq!(PrimeTable::from_parts(p, l).unwrap(), t);
    }
}
