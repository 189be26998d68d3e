use alloc::vec;
use alloc::vec::Vec;

use crate::float::Inflation;
use crate::{Error, Result};

/// The distinct values `ceil(K/m)` for `m >= 1`, ascending. Closed under
/// `s -> ceil(s/q)` for every integer `q >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGrid {
    k: u64,
    values: Vec<u64>,
}

impl QuotientGrid {
    pub fn new(k: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid("threshold K must be at least 2"));
        }
        let mut values = Vec::new();
        let mut m = 1u64;
        loop {
            let v = k.div_ceil(m);
            values.push(v);
            if v == 1 {
                break;
            }
            // smallest m' with ceil(K/m') <= v - 1
            m = k.div_ceil(v - 1);
        }
        values.reverse();
        Ok(QuotientGrid { k, values })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn index(&self, v: u64) -> Option<usize> {
        self.values.binary_search(&v).ok()
    }

    /// For each grid index, the indices of `ceil(s/p^j)` for `j = 0, 1, ...`
    /// while the value exceeds 1. Flattened with offsets.
    fn chains(&self, p: u64) -> Chains {
        let mut offsets = Vec::with_capacity(self.len() + 1);
        let mut flat = Vec::new();
        offsets.push(0);
        for &s in &self.values {
            let mut v = s;
            while v > 1 {
                flat.push(self.index(v).expect("grid is closed under division") as u32);
                v = v.div_ceil(p);
            }
            offsets.push(flat.len() as u32);
        }
        Chains { offsets, flat }
    }
}

struct Chains {
    offsets: Vec<u32>,
    flat: Vec<u32>,
}

impl Chains {
    fn depth(&self, n: usize) -> usize {
        (0..n).map(|a| self.get(a).len()).max().unwrap_or(0)
    }

    #[inline]
    fn get(&self, a: usize) -> &[u32] {
        &self.flat[self.offsets[a] as usize..self.offsets[a + 1] as usize]
    }
}

/// Runs a row-wise task; implementations may run rows concurrently. Each
/// row is written by exactly one call, so results do not depend on the
/// implementation.
pub trait RowExecutor {
    fn run_rows(&self, rows: Vec<&mut [f64]>, task: &(dyn Fn(usize, &mut [f64]) + Sync));
}

/// Runs every row on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct SerialExecutor;

impl RowExecutor for SerialExecutor {
    fn run_rows(&self, rows: Vec<&mut [f64]>, task: &(dyn Fn(usize, &mut [f64]) + Sync)) {
        for (a, row) in rows.into_iter().enumerate() {
            task(a, row);
        }
    }
}

/// Upper bounds on `Theta_i(s, t)`: the sum of `nu(lcm(m1, m2))/lcm(m1, m2)`
/// over `p_i`-smooth `m1 >= s`, `m2 >= t`, for `s, t` on the quotient grid.
/// Stored as the upper triangle, row `a` holding columns `a..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaTable {
    grid: QuotientGrid,
    level: usize,
    offsets: Vec<usize>,
    data: Vec<f64>,
    // Entries with both indices below `settled` hold a base value; the
    // actual bound adds `lazy_u[a] + lazy_u[b] + lazy_v`.
    settled: usize,
    lazy_u: Vec<f64>,
    lazy_v: f64,
    inflation: Inflation,
}

fn row_offsets(n: usize) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(n + 1);
    let mut acc = 0;
    for a in 0..n {
        offsets.push(acc);
        acc += n - a;
    }
    offsets.push(acc);
    offsets
}

impl ThetaTable {
    /// Level 0: only `m1 = m2 = 1`, so the value is 1 at `(1, 1)` and 0 elsewhere.
    pub fn initial(k: u64, entry_cap: usize) -> Result<Self> {
        let grid = QuotientGrid::new(k)?;
        let n = grid.len();
        let entries = n * (n + 1) / 2;
        if entries > entry_cap {
            return Err(Error::cap("theta table entries", entry_cap as u64));
        }
        let offsets = row_offsets(n);
        let mut data = vec![0.0; entries];
        data[0] = 1.0;
        Ok(ThetaTable {
            grid,
            level: 0,
            offsets,
            data,
            settled: 0,
            lazy_u: vec![0.0; n],
            lazy_v: 0.0,
            inflation: Inflation::none(),
        })
    }

    pub fn grid(&self) -> &QuotientGrid {
        &self.grid
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn entries(&self) -> usize {
        self.data.len()
    }

    #[inline]
    fn at(&self, a: usize, b: usize) -> f64 {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let d = self.data[self.offsets[a] + b - a];
        if b < self.settled {
            self.inflation.up(d + self.lazy_u[a] + self.lazy_u[b] + self.lazy_v, 3)
        } else {
            d
        }
    }

    /// Fold the lazy accumulators into the stored values.
    fn flush(&mut self) {
        let l = self.settled;
        for a in 0..l {
            for b in a..l {
                let idx = self.offsets[a] + b - a;
                self.data[idx] = self.inflation.up(self.data[idx] + self.lazy_u[a] + self.lazy_u[b] + self.lazy_v, 3);
            }
        }
        self.lazy_u.iter_mut().for_each(|u| *u = 0.0);
        self.lazy_v = 0.0;
        self.settled = 0;
    }

    /// In-place form of [`theta_step`]. Entries whose arguments are both
    /// at most `p` get the update `c (Theta(s,1) + Theta(1,t)) + e` through
    /// per-index accumulators; the accumulators are folded back every
    /// `flush_every` levels, so every stored quantity only ever grows.
    pub fn advance(
        &mut self,
        p: u64,
        delta: f64,
        inflation: Inflation,
        exec: &dyn RowExecutor,
        flush_every: usize,
    ) -> Result<()> {
        check_step(p, delta)?;
        if self.settled == 0 || self.level.is_multiple_of(flush_every.max(1)) {
            self.flush();
            self.inflation = inflation;
            self.settled = self.grid.values.partition_point(|&v| v <= p);
        }
        let n = self.grid.len();
        let l = self.settled;
        let chains = self.grid.chains(p);
        let w = Weights::new(p, chains.depth(n));
        let nu = 1.0 / (1.0 - delta);

        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for a in 0..n {
            offsets.push(acc);
            acc += n - a.max(l);
        }
        let mut fresh = vec![0.0; acc];
        {
            let mut rows = Vec::with_capacity(n);
            let mut rest = &mut fresh[..];
            for a in 0..n {
                let (row, tail) = rest.split_at_mut(n - a.max(l));
                rows.push(row);
                rest = tail;
            }
            let this = &*self;
            let task = |a: usize, row: &mut [f64]| {
                let start = a.max(l);
                for (off, slot) in row.iter_mut().enumerate() {
                    *slot = full_update(this, &chains, &w, nu, inflation, a, start + off);
                }
            };
            exec.run_rows(rows, &task);
        }

        let c = inflation.up(nu * w.r, 2);
        let e = inflation.up(nu * w.r * (1.0 + 2.0 * w.r) * self.at(0, 0), 5);
        let u_old: Vec<f64> = (0..l).map(|a| self.at(a, 0)).collect();
        for a in 0..n {
            let start = a.max(l);
            let src = &fresh[offsets[a]..offsets[a] + n - start];
            let dst = self.offsets[a] + start - a;
            self.data[dst..dst + src.len()].copy_from_slice(src);
        }
        for (a, u) in u_old.into_iter().enumerate() {
            self.lazy_u[a] = inflation.up(self.lazy_u[a] + c * u, 3);
        }
        self.lazy_v = inflation.up(self.lazy_v + e, 1);
        self.level += 1;
        Ok(())
    }

    /// `Theta(s, t)` for grid values `s`, `t`.
    pub fn value(&self, s: u64, t: u64) -> Option<f64> {
        Some(self.at(self.grid.index(s)?, self.grid.index(t)?))
    }

    fn rows_mut(data: &mut [f64], n: usize) -> Vec<&mut [f64]> {
        let mut rows = Vec::with_capacity(n);
        let mut rest = data;
        for a in 0..n {
            let (row, tail) = rest.split_at_mut(n - a);
            rows.push(row);
            rest = tail;
        }
        rows
    }
}

/// Geometric weights for prime `p`, with `x = 1/p`.
struct Weights {
    pow: Vec<f64>,
    /// `1/(p-1) = x/(1-x)`.
    r: f64,
}

impl Weights {
    fn new(p: u64, depth: usize) -> Self {
        let x = 1.0 / p as f64;
        let mut pow = Vec::with_capacity(depth + 2);
        let mut v = 1.0;
        for _ in 0..depth + 2 {
            pow.push(v);
            v *= x;
        }
        Weights { pow, r: 1.0 / (p as f64 - 1.0) }
    }

    /// `sum_{j >= from} x^j`.
    #[inline]
    fn tail(&self, from: usize) -> f64 {
        self.pow[from] * (1.0 + self.r)
    }

    /// `sum_{j >= big_j} x^{max(j, k)}`, minus the `j = k = 0` term when present.
    #[inline]
    fn g(&self, big_j: usize, k: usize) -> f64 {
        if big_j == 0 && k == 0 {
            self.r
        } else if k < big_j {
            self.tail(big_j)
        } else {
            (k - big_j + 1) as f64 * self.pow[k] + self.pow[k] * self.r
        }
    }

    /// `sum_{j >= a, k >= b} x^{max(j, k)}` for `a <= b`, minus the `(0, 0)` term.
    #[inline]
    fn h(&self, a: usize, b: usize) -> f64 {
        if b == 0 {
            // (1+x)/(1-x)^2 - 1 = (3p-1)/(p-1)^2
            self.r * (3.0 + 2.0 * self.r)
        } else {
            self.tail(b) * ((b - a + 1) as f64 + 2.0 * self.r)
        }
    }
}

/// Advance `Theta` by the prime `p` with cap `delta`:
/// `Theta_i(s,t) = Theta_{i-1}(s,t) + 1/(1-delta) sum_{j,k >= 0, j+k > 0}
/// p^{-max(j,k)} Theta_{i-1}(ceil(s/p^j), ceil(t/p^k))`, with the infinite
/// tails where an argument reaches 1 summed in closed form.
pub fn theta_step(
    old: &ThetaTable,
    p: u64,
    delta: f64,
    inflation: Inflation,
    exec: &dyn RowExecutor,
) -> Result<ThetaTable> {
    check_step(p, delta)?;
    let n = old.grid.len();
    let chains = old.grid.chains(p);
    let w = Weights::new(p, chains.depth(n));
    let nu = 1.0 / (1.0 - delta);
    let mut data = vec![0.0; old.data.len()];
    {
        let rows = ThetaTable::rows_mut(&mut data, n);
        let task = |a: usize, row: &mut [f64]| {
            for (off, slot) in row.iter_mut().enumerate() {
                *slot = full_update(old, &chains, &w, nu, inflation, a, a + off);
            }
        };
        exec.run_rows(rows, &task);
    }
    Ok(ThetaTable {
        grid: old.grid.clone(),
        level: old.level + 1,
        offsets: old.offsets.clone(),
        data,
        settled: 0,
        lazy_u: vec![0.0; n],
        lazy_v: 0.0,
        inflation,
    })
}

fn check_step(p: u64, delta: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&delta) {
        return Err(Error::invalid("delta outside [0, 1/2]"));
    }
    if p < 2 {
        return Err(Error::invalid("theta step needs a prime"));
    }
    Ok(())
}

/// New value at `(a, b)`, `a <= b`, in a fixed summation order.
#[inline]
fn full_update(old: &ThetaTable, chains: &Chains, w: &Weights, nu: f64, inflation: Inflation, a: usize, b: usize) -> f64 {
    let cs = chains.get(a);
    let ct = chains.get(b);
    let (js, jt) = (cs.len(), ct.len());
    let mut sum = 0.0;
    let mut terms = 0u32;
    for (j, &sj) in cs.iter().enumerate() {
        for (k, &tk) in ct.iter().enumerate() {
            if j == 0 && k == 0 {
                continue;
            }
            sum += w.pow[j.max(k)] * old.at(sj as usize, tk as usize);
            terms += 1;
        }
    }
    for (k, &tk) in ct.iter().enumerate() {
        sum += w.g(js, k) * old.at(0, tk as usize);
        terms += 1;
    }
    for (j, &sj) in cs.iter().enumerate() {
        sum += w.g(jt, j) * old.at(sj as usize, 0);
        terms += 1;
    }
    sum += w.h(js, jt) * old.at(0, 0);
    inflation.up(old.at(a, b) + nu * sum, 4 * terms + 12)
}

/// Second-moment bound at the next prime `p`:
/// `sum_{j,k >= 1} p^{-j-k} Theta(ceil(K/p^j), ceil(K/p^k))`.
pub fn mhat2(table: &ThetaTable, p: u64, inflation: Inflation) -> f64 {
    let k = table.grid.k();
    let mut idx = Vec::new();
    let mut v = k.div_ceil(p);
    while v > 1 {
        idx.push(table.grid.index(v).expect("grid is closed under division"));
        v = v.div_ceil(p);
    }
    // explicit j = 1..=idx.len(), tail from j = idx.len() + 1
    let w = Weights::new(p, idx.len() + 1);
    let tail = w.tail(idx.len() + 1);
    let mut sum = 0.0;
    let mut terms = 0u32;
    for (j, &sj) in idx.iter().enumerate() {
        for (k, &tk) in idx.iter().enumerate() {
            sum += w.pow[j + 1] * w.pow[k + 1] * table.at(sj, tk);
            terms += 1;
        }
    }
    let mut cross = 0.0;
    for (j, &sj) in idx.iter().enumerate() {
        cross += w.pow[j + 1] * table.at(sj, 0);
        terms += 1;
    }
    sum += 2.0 * tail * cross + tail * tail * table.at(0, 0);
    inflation.up(sum, 4 * terms + 12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_grid(k: u64) -> Vec<u64> {
        let mut v: Vec<u64> = (1..=k).map(|m| k.div_ceil(m)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    #[test]
    fn grid_matches_brute_force() {
        for k in [2u64, 3, 10, 97, 1000, 10_007] {
            let g = QuotientGrid::new(k).unwrap();
            assert_eq!(g.values(), &brute_grid(k)[..], "K={k}");
            for &s in g.values() {
                for q in 2..50 {
                    assert!(g.index(s.div_ceil(q)).is_some());
                }
            }
        }
        assert!(QuotientGrid::new(1).is_err());
    }

    #[test]
    fn initial_table() {
        let t = ThetaTable::initial(100, 1 << 20).unwrap();
        assert_eq!(t.value(1, 1), Some(1.0));
        assert_eq!(t.value(2, 1), Some(0.0));
        assert_eq!(t.value(100, 100), Some(0.0));
        assert!(matches!(ThetaTable::initial(1_000_000, 10), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn corner_grows_by_odd_power_sum() {
        let mut t = ThetaTable::initial(1000, 1 << 20).unwrap();
        let mut expect = 1.0;
        for p in [2u64, 3, 5, 7, 11] {
            t = theta_step(&t, p, 0.0, Inflation::none(), &SerialExecutor).unwrap();
            let pf = p as f64;
            expect *= 1.0 + (3.0 * pf - 1.0) / ((pf - 1.0) * (pf - 1.0));
            let got = t.value(1, 1).unwrap();
            assert!((got - expect).abs() < 1e-13 * expect, "p={p}: {got} vs {expect}");
        }
    }

    #[test]
    fn lazy_advance_matches_direct_step() {
        let primes = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];
        let mut direct = ThetaTable::initial(3000, 1 << 20).unwrap();
        let mut lazy = direct.clone();
        for (i, &p) in primes.iter().enumerate() {
            let delta = if i < 4 { 0.0 } else { 0.25 + 0.01 * i as f64 };
            direct = theta_step(&direct, p, delta, Inflation::default(), &SerialExecutor).unwrap();
            lazy.advance(p, delta, Inflation::default(), &SerialExecutor, 7).unwrap();
        }
        let n = direct.grid().len();
        for a in 0..n {
            for b in a..n {
                let (x, y) = (direct.at(a, b), lazy.at(a, b));
                assert!((x - y).abs() <= 1e-12 * x.max(1e-300), "({a},{b}): {x} vs {y}");
            }
        }
    }

    #[test]
    fn prime_seven_against_truncated_sum() {
        let t0 = ThetaTable::initial(50, 1 << 20).unwrap();
        let t = theta_step(&t0, 7, 0.0, Inflation::none(), &SerialExecutor).unwrap();
        // pairs (7^j, 7^k) with 7^j >= 2, weight 7^{-max(j,k)}
        let mut oracle = 0.0;
        for j in 1..40 {
            for k in 0..40 {
                oracle += 7f64.powi(-j.max(k));
            }
        }
        let got = t.value(2, 1).unwrap();
        assert!((got - oracle).abs() < 1e-14, "{got} vs {oracle}");
    }
}
