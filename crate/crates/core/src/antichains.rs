//! Bounded-exhaustive checks of three facts about divisibility antichains
//! of 3- and 5-smooth numbers, plus the compression map used to reduce
//! them to finitely many shapes.
//!
//! Pair sums `sum_{a in A, b in B} 1/lcm(a,b)` are an inner product:
//! `gcd(a,b) = sum_{d | a, d | b} phi(d)` gives
//! `S(A,B) = sum_d phi(d) u_A(d) u_B(d)` with `u_A(d) = sum_{a in A, d | a} 1/a`.
//! Cauchy-Schwarz therefore bounds `S(A,B) <= sqrt(S(A,A) S(B,B))`, which
//! drives all pruning below.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::float::sqrt;
use crate::numtheory::FactoredInt;
use crate::{Error, Result};

/// A set of pairwise non-dividing integers whose prime factors are at most `smooth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Antichain {
    elements: Vec<FactoredInt>,
    smooth: u64,
}

impl Antichain {
    pub fn new(mut elements: Vec<FactoredInt>, smooth: u64) -> Result<Self> {
        elements.sort();
        elements.dedup();
        if let Some(d) = elements.iter().find(|d| d.largest_prime().unwrap_or(1) > smooth) {
            return Err(Error::invalid(format!("{} is not {}-smooth", d.value(), smooth)));
        }
        for (i, x) in elements.iter().enumerate() {
            if let Some(y) = elements[i + 1..].iter().find(|y| x.divides(y)) {
                return Err(Error::invalid(format!("{} divides {}", x.value(), y.value())));
            }
        }
        Ok(Antichain { elements, smooth })
    }

    pub fn from_values(values: &[u64], smooth: u64) -> Result<Self> {
        let elements = values.iter().map(|&v| FactoredInt::factorize(v)).collect::<Result<Vec<_>>>()?;
        Antichain::new(elements, smooth)
    }

    pub fn elements(&self) -> &[FactoredInt] {
        &self.elements
    }

    pub fn values(&self) -> Vec<u64> {
        self.elements.iter().map(|d| d.value()).collect()
    }

    pub fn smooth(&self) -> u64 {
        self.smooth
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn reciprocal_sum(&self) -> BigRational {
        self.elements.iter().map(|d| recip(d.value())).fold(BigRational::zero(), |a, b| a + b)
    }
}

fn recip(n: u64) -> BigRational {
    BigRational::new(1.into(), n.into())
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Exact `sum_{a in A, b in B} 1/lcm(a, b)`.
pub fn pair_sum(a: &[u64], b: &[u64]) -> BigRational {
    let mut total = BigRational::zero();
    for &x in a {
        for &y in b {
            total += recip(lcm(x, y));
        }
    }
    total
}

fn pair_sum_f64(a: &[u64], b: &[u64]) -> f64 {
    a.iter().flat_map(|&x| b.iter().map(move |&y| 1.0 / lcm(x, y) as f64)).sum()
}

/// Push a 3-smooth antichain to its compressed form of the same size:
/// exponents of 2 drop by exactly one and exponents of 3 rise by exactly
/// one from each element to the next.
pub fn compress_3smooth(chain: &Antichain) -> Result<Antichain> {
    if chain.elements.iter().any(|d| d.largest_prime().unwrap_or(1) > 3) {
        return Err(Error::invalid("compression needs a 3-smooth antichain"));
    }
    let mut exps: Vec<(u32, u32)> = chain.elements.iter().map(|d| (d.exponent_of(2), d.exponent_of(3))).collect();
    // decreasing in the exponent of 2 forces increasing in the exponent of 3
    exps.sort_by_key(|x| core::cmp::Reverse(x.0));
    let k = exps.len();
    let Some(&(a_last, _)) = exps.last() else {
        return Ok(chain.clone());
    };
    let b_first = exps[0].1;
    let values: Vec<u64> = (0..k)
        .map(|i| 2u64.pow(a_last + (k - 1 - i) as u32) * 3u64.pow(b_first + i as u32))
        .collect();
    Antichain::from_values(&values, chain.smooth.max(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma {
    /// 5-smooth antichains without prime powers: `sum 1/d <= 1/3`.
    NoPrimePowers,
    /// Pairs of 3-smooth antichains: pair sum `<= 31/36` outside two exceptions.
    ThreeSmoothPairs,
    /// Pairs of 5-smooth antichains: pair sum `<= 17/10`.
    FiveSmoothPairs,
}

impl Lemma {
    pub fn bound(self) -> BigRational {
        match self {
            Lemma::NoPrimePowers => rat(1, 3),
            Lemma::ThreeSmoothPairs => rat(31, 36),
            Lemma::FiveSmoothPairs => rat(17, 10),
        }
    }

    /// Default `(exponent cap, size cap)` for the exhaustive search.
    pub fn default_caps(self) -> (u32, usize) {
        (8, 6)
    }

    pub fn name(self) -> &'static str {
        match self {
            Lemma::NoPrimePowers => "no-prime-powers",
            Lemma::ThreeSmoothPairs => "three-smooth-pairs",
            Lemma::FiveSmoothPairs => "five-smooth-pairs",
        }
    }

    fn primes(self) -> &'static [u64] {
        match self {
            Lemma::ThreeSmoothPairs => &[2, 3],
            _ => &[2, 3, 5],
        }
    }
}

/// One extremal configuration; `b` is absent for single-set sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Maximizer {
    pub a: Vec<u64>,
    pub b: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub exp_cap: u32,
    pub size_cap: usize,
    pub bound: BigRational,
    /// Largest value outside the excepted configurations.
    pub max: BigRational,
    pub maximizers: Vec<Maximizer>,
    /// Excepted configurations with their values.
    pub exceptions: Vec<(Maximizer, BigRational)>,
    /// Inequalities the reduction to finitely many shapes relies on.
    pub reductions: Vec<(String, bool)>,
    /// Search nodes visited.
    pub nodes: u64,
    pub verdict: bool,
}

/// Smooth numbers over `primes` with every exponent `<= exp_cap`, ascending, without 1.
fn grid_elements(primes: &[u64], exp_cap: u32) -> Vec<u64> {
    let mut out = vec![1u64];
    for &p in primes {
        let mut next = Vec::new();
        for &x in &out {
            let mut v = x;
            for _ in 0..=exp_cap {
                next.push(v);
                v *= p;
            }
        }
        out = next;
    }
    out.retain(|&x| x != 1);
    out.sort_unstable();
    out
}

struct Search<'a> {
    elems: &'a [u64],
    size_cap: usize,
    node_cap: u64,
    nodes: u64,
    chosen: Vec<u64>,
}

impl Search<'_> {
    fn visit(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(Error::cap("antichain search nodes", self.node_cap));
        }
        Ok(())
    }

    fn compatible(&self, x: u64) -> bool {
        self.chosen.iter().all(|&c| !x.is_multiple_of(c))
    }
}

/// Branch and bound for the largest `sum 1/d`.
fn max_reciprocal(search: &mut Search<'_>, from: usize, sum: f64, best: &mut f64, hits: &mut Vec<Vec<u64>>) -> Result<()> {
    search.visit()?;
    if !search.chosen.is_empty() {
        if sum > *best * (1.0 + 1e-12) {
            *best = sum;
            hits.clear();
        }
        if sum >= *best * (1.0 - 1e-12) {
            hits.push(search.chosen.clone());
        }
    }
    let room = search.size_cap - search.chosen.len();
    if room == 0 {
        return Ok(());
    }
    for i in from..search.elems.len() {
        let bound = sum + search.elems[i..].iter().take(room).map(|&x| 1.0 / x as f64).sum::<f64>();
        if bound < *best * (1.0 - 1e-12) {
            break;
        }
        let x = search.elems[i];
        if !search.compatible(x) {
            continue;
        }
        search.chosen.push(x);
        max_reciprocal(search, i + 1, sum + 1.0 / x as f64, best, hits)?;
        search.chosen.pop();
    }
    Ok(())
}

/// Branch and bound for the largest `S(A, A)`. Elements are ascending and
/// `lcm(a, b) >= 2 max(a, b)` inside an antichain, so adding `r` more
/// elements `b_1 < ... < b_r` raises the value by at most
/// `sum_k (|A| + k)/b_k`.
fn max_self_pair(search: &mut Search<'_>, from: usize, value: f64, best: &mut f64, hits: &mut Vec<Vec<u64>>) -> Result<()> {
    search.visit()?;
    if !search.chosen.is_empty() {
        if value > *best * (1.0 + 1e-12) {
            *best = value;
            hits.clear();
        }
        if value >= *best * (1.0 - 1e-12) {
            hits.push(search.chosen.clone());
        }
    }
    let size = search.chosen.len();
    let room = search.size_cap - size;
    if room == 0 {
        return Ok(());
    }
    for i in from..search.elems.len() {
        let bound = value
            + search.elems[i..]
                .iter()
                .take(room)
                .enumerate()
                .map(|(k, &x)| (size + k + 1) as f64 / x as f64)
                .sum::<f64>();
        if bound < *best * (1.0 - 1e-12) {
            break;
        }
        let x = search.elems[i];
        if !search.compatible(x) {
            continue;
        }
        let gain = 1.0 / x as f64 + 2.0 * search.chosen.iter().map(|&c| 1.0 / lcm(c, x) as f64).sum::<f64>();
        search.chosen.push(x);
        max_self_pair(search, i + 1, value + gain, best, hits)?;
        search.chosen.pop();
    }
    Ok(())
}

/// Every non-empty antichain within the caps (1 excluded).
fn all_antichains(search: &mut Search<'_>, from: usize, out: &mut Vec<Vec<u64>>) -> Result<()> {
    search.visit()?;
    if !search.chosen.is_empty() {
        out.push(search.chosen.clone());
    }
    if search.chosen.len() == search.size_cap {
        return Ok(());
    }
    for i in from..search.elems.len() {
        let x = search.elems[i];
        if search.compatible(x) {
            search.chosen.push(x);
            all_antichains(search, i + 1, out)?;
            search.chosen.pop();
        }
    }
    Ok(())
}

fn reductions(lemma: Lemma) -> Vec<(String, bool)> {
    let mut out = Vec::new();
    match lemma {
        Lemma::NoPrimePowers => {
            // 2^{-a} - 3^{-a} peaks at a = 1; 6(2^{-1-a} - 3^{-1-a}) peaks at a = 1
            let peak0 = (2..=64u32).all(|a| two_minus_three(a) < rat(1, 6));
            out.push(("2^-a - 3^-a < 1/6 for 2 <= a <= 64".into(), peak0));
            let peak1 = (2..=64u32).all(|a| rat(6, 1) * two_minus_three(a + 1) < rat(5, 6));
            out.push(("6(2^-1-a - 3^-1-a) < 5/6 for 2 <= a <= 64".into(), peak1));
            let tail = rat(1, 6) + rat(11, 5 * 18) + rat(1, 6) * rat(1, 4);
            out.push(("1/6 + 11/90 + sum_{i>=2} 1/(6 5^{i-1}) = 119/360 < 1/3".into(), tail == rat(119, 360) && tail < rat(1, 3)));
        }
        Lemma::ThreeSmoothPairs => {
            let ok = (5..=64u32).all(|k| BigRational::from_integer((6 * k).into()) * two_minus_three(k) < rat(31, 36));
            out.push(("6k(2^-k - 3^-k) < 31/36 for 5 <= k <= 64".into(), ok));
            // the expression decreases beyond its peak, so the finite range covers all k >= 5
            let dec = (5..64u32).all(|k| {
                BigRational::from_integer((k + 1).into()) * two_minus_three(k + 1)
                    <= BigRational::from_integer(k.into()) * two_minus_three(k)
            });
            out.push(("k(2^-k - 3^-k) is decreasing for 5 <= k <= 64".into(), dec));
        }
        Lemma::FiveSmoothPairs => {
            let series = rat(15, 8);
            out.push(("(31/36)(15/8) < 17/10 - 1/12".into(), rat(31, 36) * &series < rat(17, 10) - rat(1, 12)));
            out.push(("(1 - 31/36)/5 < 1/12".into(), (BigRational::one() - rat(31, 36)) / rat(5, 1) < rat(1, 12)));
            let mixed = (rat(7, 6) - rat(31, 36)) / rat(5, 1) + (BigRational::one() - rat(31, 36)) / rat(25, 1);
            out.push(("(7/6 - 31/36)/5 + (1 - 31/36)/25 = 1/15 < 1/12".into(), mixed == rat(1, 15) && mixed < rat(1, 12)));
        }
    }
    out
}

fn two_minus_three(k: u32) -> BigRational {
    BigRational::new(1.into(), num_bigint::BigInt::from(2u8).pow(k)) - BigRational::new(1.into(), num_bigint::BigInt::from(3u8).pow(k))
}

/// Exhaustive check within exponent and size caps.
pub fn verify_lemma(lemma: Lemma, exp_cap: u32, size_cap: usize, node_cap: u64) -> Result<LemmaReport> {
    if exp_cap < 1 || size_cap < 1 {
        return Err(Error::invalid("caps must be at least 1"));
    }
    let mut elems = grid_elements(lemma.primes(), exp_cap);
    if lemma == Lemma::NoPrimePowers {
        elems.retain(|&x| FactoredInt::factorize(x).map(|f| !f.is_prime_power()).unwrap_or(false));
    }
    let mut search = Search { elems: &elems, size_cap, node_cap, nodes: 0, chosen: Vec::new() };
    let bound = lemma.bound();
    let mut exceptions = Vec::new();
    let (max, maximizers) = match lemma {
        Lemma::NoPrimePowers => {
            let (mut best, mut hits) = (0.0, Vec::new());
            max_reciprocal(&mut search, 0, 0.0, &mut best, &mut hits)?;
            exact_best(hits, |s| s.iter().map(|&x| recip(x)).fold(BigRational::zero(), |a, b| a + b), |s| Maximizer {
                a: s,
                b: None,
            })
        }
        Lemma::FiveSmoothPairs => {
            // S(A,B) <= max(S(A,A), S(B,B)) with equality only for A = B
            let (mut best, mut hits) = (1.0, vec![vec![1]]);
            max_self_pair(&mut search, 0, 0.0, &mut best, &mut hits)?;
            exact_best(hits, |s| pair_sum(s, s), |s| Maximizer { a: s.clone(), b: Some(s) })
        }
        Lemma::ThreeSmoothPairs => {
            let mut sets = vec![vec![1u64]];
            all_antichains(&mut search, 0, &mut sets)?;
            let excepted = |a: &[u64], b: &[u64]| a == b && (a == [1] || a == [2, 3]);
            for s in [vec![1u64], vec![2, 3]] {
                if s.iter().all(|x| x == &1 || elems.contains(x)) && s.len() <= size_cap {
                    let v = pair_sum(&s, &s);
                    exceptions.push((Maximizer { a: s.clone(), b: Some(s) }, v));
                }
            }
            let mut norms: Vec<(f64, usize)> = sets.iter().enumerate().map(|(i, s)| (sqrt(pair_sum_f64(s, s)), i)).collect();
            norms.sort_by(|x, y| y.0.total_cmp(&x.0));
            let mut best = BigRational::zero();
            let mut best_f = 0.0f64;
            let mut hits: Vec<(usize, usize)> = Vec::new();
            for (x, &(nx, i)) in norms.iter().enumerate() {
                if nx * norms[x].0 < best_f * (1.0 - 1e-9) {
                    break;
                }
                for &(ny, j) in &norms[x..] {
                    search.visit()?;
                    if nx * ny < best_f * (1.0 - 1e-9) {
                        break;
                    }
                    if excepted(&sets[i], &sets[j]) {
                        continue;
                    }
                    if pair_sum_f64(&sets[i], &sets[j]) < best_f * (1.0 - 1e-9) {
                        continue;
                    }
                    let v = pair_sum(&sets[i], &sets[j]);
                    if v > best {
                        best_f = crate::float::ratio_to_f64(&v);
                        best = v;
                        hits.clear();
                        hits.push((i, j));
                    } else if v == best {
                        hits.push((i, j));
                    }
                }
            }
            let mut maximizers: Vec<Maximizer> = hits
                .into_iter()
                .map(|(i, j)| {
                    let (a, b) = if sets[i] <= sets[j] { (i, j) } else { (j, i) };
                    Maximizer { a: sets[a].clone(), b: Some(sets[b].clone()) }
                })
                .collect();
            maximizers.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
            maximizers.dedup();
            (best, maximizers)
        }
    };
    let reductions = reductions(lemma);
    let exceptions_ok = match lemma {
        Lemma::ThreeSmoothPairs => exceptions.iter().all(|(m, v)| {
            (m.a == [1] && *v == BigRational::one()) || (m.a == [2, 3] && *v == rat(7, 6))
        }),
        _ => true,
    };
    let verdict = max <= bound && exceptions_ok && reductions.iter().all(|r| r.1);
    Ok(LemmaReport { lemma, exp_cap, size_cap, bound, max, maximizers, exceptions, reductions, nodes: search.nodes, verdict })
}

/// Re-evaluate float-screened candidates exactly and keep the true maxima.
fn exact_best(
    hits: Vec<Vec<u64>>,
    value: impl Fn(&[u64]) -> BigRational,
    wrap: impl Fn(Vec<u64>) -> Maximizer,
) -> (BigRational, Vec<Maximizer>) {
    let mut best = BigRational::zero();
    let mut keep = Vec::new();
    for s in hits {
        let v = value(&s);
        if v > best {
            best = v;
            keep.clear();
            keep.push(s);
        } else if v == best {
            keep.push(s);
        }
    }
    keep.sort();
    keep.dedup();
    (best, keep.into_iter().map(wrap).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const NODES: u64 = 50_000_000;

    fn chain(v: &[u64], smooth: u64) -> Antichain {
        Antichain::from_values(v, smooth).unwrap()
    }

    #[test]
    fn antichain_validation() {
        assert!(Antichain::from_values(&[2, 4], 5).is_err());
        assert!(Antichain::from_values(&[7], 5).is_err());
        assert_eq!(chain(&[15, 6, 10], 5).values(), [6, 10, 15]);
        assert_eq!(chain(&[6, 10, 15], 5).reciprocal_sum(), rat(1, 3));
    }

    #[test]
    fn compression_examples() {
        assert_eq!(compress_3smooth(&chain(&[2, 9], 3)).unwrap().values(), [2, 3]);
        assert_eq!(compress_3smooth(&chain(&[6], 3)).unwrap().values(), [6]);
        assert_eq!(compress_3smooth(&chain(&[8, 12, 18, 27], 3)).unwrap().values(), [8, 12, 18, 27]);
        assert!(compress_3smooth(&chain(&[10], 5)).is_err());
    }

    #[test]
    fn named_shapes_case_analysis() {
        let shapes: [&[u64]; 6] = [&[1], &[2, 3], &[2, 9], &[3, 4], &[4, 6, 9], &[8, 12, 18, 27]];
        for a in shapes {
            for b in shapes {
                let v = pair_sum(a, b);
                if a == b && a == [1] {
                    assert_eq!(v, rat(1, 1));
                } else if a == b && a == [2, 3] {
                    assert_eq!(v, rat(7, 6));
                } else {
                    assert!(v <= rat(31, 36), "{a:?} {b:?}: {v}");
                }
            }
        }
        assert_eq!(pair_sum(&[4, 6, 9], &[4, 6, 9]), rat(31, 36));
    }

    #[test]
    fn no_prime_powers_lemma() {
        let r = verify_lemma(Lemma::NoPrimePowers, 6, 6, NODES).unwrap();
        assert_eq!(r.max, rat(1, 3));
        assert_eq!(r.maximizers, [Maximizer { a: vec![6, 10, 15], b: None }]);
        assert!(r.verdict);
    }

    #[test]
    fn three_smooth_pairs_lemma() {
        let r = verify_lemma(Lemma::ThreeSmoothPairs, 5, 5, NODES).unwrap();
        assert_eq!(r.max, rat(31, 36));
        assert_eq!(r.exceptions.len(), 2);
        assert_eq!(r.exceptions[0].1, rat(1, 1));
        assert_eq!(r.exceptions[1].1, rat(7, 6));
        assert!(r.maximizers.contains(&Maximizer { a: vec![4, 6, 9], b: Some(vec![4, 6, 9]) }));
        assert!(r.verdict);
    }

    #[test]
    fn five_smooth_pairs_lemma() {
        let r = verify_lemma(Lemma::FiveSmoothPairs, 4, 5, NODES).unwrap();
        assert_eq!(r.max, rat(17, 10));
        assert_eq!(r.maximizers, [Maximizer { a: vec![2, 3, 5], b: Some(vec![2, 3, 5]) }]);
        assert!(r.verdict);
    }

    #[test]
    fn five_smooth_pairs_against_brute_force() {
        // every pair of antichains over exponents <= 1, no pruning
        let elems = grid_elements(&[2, 3, 5], 1);
        let mut search = Search { elems: &elems, size_cap: 8, node_cap: NODES, nodes: 0, chosen: Vec::new() };
        let mut sets = vec![vec![1u64]];
        all_antichains(&mut search, 0, &mut sets).unwrap();
        let mut best = BigRational::zero();
        for a in &sets {
            for b in &sets {
                best = best.max(pair_sum(a, b));
            }
        }
        assert_eq!(verify_lemma(Lemma::FiveSmoothPairs, 1, 8, NODES).unwrap().max, best);
    }

    #[test]
    fn reductions_hold() {
        for l in [Lemma::NoPrimePowers, Lemma::ThreeSmoothPairs, Lemma::FiveSmoothPairs] {
            assert!(reductions(l).iter().all(|r| r.1), "{l:?}");
        }
    }

    #[test]
    fn node_cap_is_enforced() {
        assert!(matches!(verify_lemma(Lemma::ThreeSmoothPairs, 8, 6, 10), Err(Error::ResourceCap { .. })));
    }
}
