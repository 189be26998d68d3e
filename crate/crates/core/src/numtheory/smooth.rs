use alloc::vec::Vec;

use super::{FactoredInt, PrimeTable};
use crate::float::{powf, Inflation};
use crate::{Error, Result};

fn check_q(table: &PrimeTable, q: u64) -> Result<&[u64]> {
    if q > table.limit() {
        return Err(Error::invalid("prime table does not reach the smoothness bound"));
    }
    if table.is_prime(q) != Some(true) {
        return Err(Error::invalid("smoothness bound must be prime"));
    }
    Ok(table.primes_up_to(q))
}

fn collect_values(primes: &[u64], from: usize, cur: u64, limit: u64, out: &mut Vec<u64>, cap: usize) -> Result<()> {
    if out.len() >= cap {
        return Err(Error::cap("smooth number enumeration", cap as u64));
    }
    out.push(cur);
    for (j, &p) in primes.iter().enumerate().skip(from) {
        match cur.checked_mul(p) {
            Some(next) if next <= limit => collect_values(primes, j, next, limit, out, cap)?,
            _ => break,
        }
    }
    Ok(())
}

/// All integers `<= limit` whose prime factors lie in `primes` (ascending), sorted.
pub fn smooth_values(primes: &[u64], limit: u64, cap: usize) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    if limit >= 1 {
        collect_values(primes, 0, 1, limit, &mut out, cap)?;
    }
    out.sort_unstable();
    Ok(out)
}

fn collect_factored(
    primes: &[u64],
    from: usize,
    cur: u64,
    factors: &mut Vec<(u64, u32)>,
    limit: u64,
    out: &mut Vec<FactoredInt>,
    cap: usize,
) -> Result<()> {
    if out.len() >= cap {
        return Err(Error::cap("smooth number enumeration", cap as u64));
    }
    out.push(FactoredInt::from_parts_unchecked(cur, factors.clone()));
    for (j, &p) in primes.iter().enumerate().skip(from) {
        let Some(mut next) = cur.checked_mul(p).filter(|&n| n <= limit) else {
            break;
        };
        let mut e = 1;
        loop {
            factors.push((p, e));
            collect_factored(primes, j + 1, next, factors, limit, out, cap)?;
            factors.pop();
            match next.checked_mul(p) {
                Some(n) if n <= limit => {
                    next = n;
                    e += 1;
                }
                _ => break,
            }
        }
    }
    Ok(())
}

/// The `q`-smooth integers `d <= limit` in increasing order, each factored.
pub fn smooth_numbers(table: &PrimeTable, q: u64, limit: u64, cap: usize) -> Result<Vec<FactoredInt>> {
    let primes = check_q(table, q)?;
    let mut out = Vec::new();
    if limit >= 1 {
        collect_factored(primes, 0, 1, &mut Vec::new(), limit, &mut out, cap)?;
    }
    out.sort_unstable();
    Ok(out)
}

/// Upper bound on `prod_{p in primes} (1 + 1/(p-1))`, the sum of `1/d` over all smooth `d`.
pub fn smooth_recip_product(primes: &[u64], inflation: Inflation) -> f64 {
    primes.iter().fold(1.0, |acc, &p| inflation.up(acc * (p as f64 / (p - 1) as f64), 2))
}

/// Lower bound on `sum 1/d` over smooth `d < below`, with the number of terms.
pub fn smooth_head_sum(primes: &[u64], below: u64, cap: usize, inflation: Inflation) -> Result<(f64, usize)> {
    if below <= 1 {
        return Ok((0.0, 0));
    }
    let values = smooth_values(primes, below - 1, cap)?;
    // compensated summation, smallest terms first
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &d in values.iter().rev() {
        let y = 1.0 / d as f64 - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok((inflation.down(sum, 2), values.len()))
}

/// Upper bound on the reciprocal sum of `q`-smooth numbers, split into head and tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothTail {
    /// Upper bound on the full sum over all `q`-smooth numbers.
    pub product: f64,
    /// Lower bound on the sum over `q`-smooth `d < tail_from`.
    pub head: f64,
    /// Number of head terms enumerated.
    pub head_terms: usize,
    /// Upper bound on the sum over `q`-smooth `d >= tail_from`.
    pub tail: f64,
}

/// Upper bound on `sum_{d >= tail_from, d q-smooth} 1/d`; `tail_from = 0`
/// requests the full sum `prod_{p <= q} (1 + 1/(p-1))`.
pub fn smooth_recip_sum(
    table: &PrimeTable,
    q: u64,
    tail_from: u64,
    cap: usize,
    inflation: Inflation,
) -> Result<SmoothTail> {
    let primes = check_q(table, q)?;
    let product = smooth_recip_product(primes, inflation);
    let (head, head_terms) = smooth_head_sum(primes, tail_from, cap, inflation)?;
    let tail = inflation.up((product - head).max(0.0), 1);
    Ok(SmoothTail { product, head, head_terms, tail })
}

/// Rankin-style upper bound on `sum_{d >= m, d smooth} 1/d`:
/// `m^{-s} prod_p (1 - p^{s-1})^{-1}`, minimized over `s` on a grid in (0, 1).
pub fn smooth_tail_rankin(primes: &[u64], m: u64, inflation: Inflation) -> f64 {
    if m <= 1 {
        return smooth_recip_product(primes, inflation);
    }
    let mf = m as f64;
    let mut best = f64::INFINITY;
    for step in 1..200 {
        let s = step as f64 / 200.0;
        let mut val = powf(mf, -s);
        for &p in primes {
            val /= 1.0 - powf(p as f64, s - 1.0);
        }
        let ops = 2 * primes.len() as u32 + 2;
        best = best.min(inflation.up(val, ops));
    }
    best
}
