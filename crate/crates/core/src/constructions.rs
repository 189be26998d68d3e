//! Explicit systems of progressions with square-free moduli built from
//! sets of primes: a chain of blocks whose reciprocal sum stays below one
//! while the uncovered density falls, and a tree of blocks whose
//! `mu_lambda`-weighted sum stays bounded.
//!
//! Residues are chosen greedily: each new modulus takes the class meeting
//! the most still-uncovered points (smallest residue on ties), so every
//! modulus `d` removes at least a `1/d` share of what is left.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::float::{exp, f64_to_ratio, ln, powf, ratio_le_f64, Inflation};
use crate::numtheory::{FactoredInt, PrimeSource, PrimeTable};
use crate::sieve::{build_instance, run_exact_sieve, ArithmeticProgression};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionMode {
    Block,
    Tree,
}

impl ConstructionMode {
    pub fn name(self) -> &'static str {
        match self {
            ConstructionMode::Block => "block",
            ConstructionMode::Tree => "tree",
        }
    }
}

/// A named inequality and whether it held for the system built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionResult {
    pub mode: ConstructionMode,
    /// Derived and echoed parameters, as display strings.
    pub parameters: Vec<(String, String)>,
    /// Prime sets in the order they were chosen (blocks, or tree nodes breadth first).
    pub prime_sets: Vec<Vec<u64>>,
    /// The emitted system.
    pub progressions: Vec<ArithmeticProgression>,
    /// `sum 1/d` over the emitted moduli.
    pub reciprocal_sum: BigRational,
    /// `sum 1/d` before trimming; equals `reciprocal_sum` in tree mode.
    pub untrimmed_sum: BigRational,
    /// Exact uncovered density after each stage, before trimming.
    pub stage_densities: Vec<BigRational>,
    /// The value each stage density is held to.
    pub stage_bounds: Vec<f64>,
    /// Exact uncovered density of the emitted system.
    pub density: BigRational,
    /// `sum mu_lambda(d)/d` over the emitted moduli (tree mode).
    pub mu_sum: Option<BigRational>,
    pub checks: Vec<Check>,
}

impl ConstructionResult {

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn moduli(&self) -> Vec<u64> {
        self.progressions.iter().map(|a| a.modulus().value()).collect()
    }
}

fn ratio(x: f64) -> Result<BigRational> {
    f64_to_ratio(x).ok_or_else(|| Error::invalid("parameter is not finite"))
}

fn recip(d: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(d))
}

fn check(name: impl Into<String>, holds: bool) -> Check {
    Check { name: name.into(), holds }
}

fn moduli_check(progs: &[ArithmeticProgression], m: u64) -> Check {
    let mut values: Vec<u64> = progs.iter().map(|a| a.modulus().value()).collect();
    values.sort_unstable();
    let distinct = values.windows(2).all(|w| w[0] < w[1]);
    let ok = progs.iter().all(|a| a.modulus().is_squarefree() && a.modulus().value() >= m);
    check("moduli distinct, square-free and >= M", distinct && ok)
}

/// First 1-based prime index with `p >= m`.
fn first_index_from(primes: &mut PrimeTable, m: u64) -> usize {
    primes.extend_to(m.max(2));
    primes.as_slice().partition_point(|&p| p < m) + 1
}

/// Class mod `d` meeting the most uncovered points of `mask`, smallest on ties.
fn best_class(mask: &[bool], d: u64) -> u64 {
    let mut counts = vec![0u64; d as usize];
    for (z, _) in mask.iter().enumerate().filter(|(_, &u)| u) {
        counts[z % d as usize] += 1;
    }
    let mut best = 0;
    for (r, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = r;
        }
    }
    best as u64
}

fn cover(mask: &mut [bool], residue: u64, d: u64) {
    let mut z = residue as usize;
    while z < mask.len() {
        mask[z] = false;
        z += d as usize;
    }
}

fn uncovered(mask: &[bool]) -> u64 {
    mask.iter().filter(|&&u| u).count() as u64
}

fn progression(residue: u64, primes: &[u64]) -> Result<ArithmeticProgression> {
    let modulus = FactoredInt::from_factors(primes.iter().map(|&p| (p, 1)).collect())?;
    ArithmeticProgression::new(residue, modulus)
}

/// Parameters of the chain of prime blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockPlan {
    /// Least allowed prime (hence least modulus).
    pub m: u64,
    pub eps: f64,
    pub delta: f64,
    /// Number of blocks `N`.
    pub blocks: usize,
}

impl BlockPlan {
    /// `delta` solving `delta/(1 - e^{-delta}) = (1 + c0)/2`, and the least
    /// `N` with `e^{-delta N} < eps/3`.
    pub fn from_eps(m: u64, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::invalid("eps must lie in (0, 1)"));
        }
        let target = (2.0 + eps / 3.0) / 2.0;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while c_of(hi) < target {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if c_of(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let delta = lo;
        let mut blocks = (ln(3.0 / eps) / delta) as usize;
        while exp(-delta * blocks as f64) >= eps / 3.0 {
            blocks += 1;
        }
        let plan = BlockPlan { m, eps, delta, blocks };
        plan.validate()?;
        Ok(plan)
    }

    pub fn c0(&self) -> f64 {
        1.0 + self.eps / 3.0
    }

    /// `c = delta/(1 - e^{-delta})`.
    pub fn c(&self) -> f64 {
        c_of(self.delta)
    }

    /// Whether `e^{-delta N} < eps/3`, the condition that makes the final
    /// stage density small.
    pub fn tail_small(&self) -> bool {
        exp(-self.delta * self.blocks as f64) < self.eps / 3.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::invalid("M must be at least 2"));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::invalid("eps must lie in (0, 1)"));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::invalid("delta must be positive"));
        }
        if self.blocks == 0 {
            return Err(Error::invalid("at least one block is needed"));
        }
        if !(self.c() < self.c0()) {
            return Err(Error::invalid("delta too large: delta/(1 - e^-delta) must stay below 1 + eps/3"));
        }
        Ok(())
    }
}

fn c_of(delta: f64) -> f64 {
    delta / -libm::expm1(-delta)
}

/// Block construction with `delta` and `N` derived from `eps`.
pub fn build_block_construction(m: u64, eps: f64, residue_cap: u64) -> Result<ConstructionResult> {
    if m < 2 {
        return Err(Error::invalid("M must be at least 2"));
    }
    build_block_plan(&BlockPlan::from_eps(m, eps)?, residue_cap)
}

/// Block construction for an explicit plan.
///
/// Blocks are filled smallest prime first, skipping any prime that would
/// overshoot the window; a block that cannot be completed while `Q_N`
/// stays within `residue_cap` makes the plan infeasible.
pub fn build_block_plan(plan: &BlockPlan, residue_cap: u64) -> Result<ConstructionResult> {
    plan.validate()?;
    let inf = Inflation::default();
    let n = plan.blocks;
    if plan.m > residue_cap {
        return Err(Error::cap("block plan residues (M exceeds the cap)", residue_cap));
    }
    let width = (plan.c0() - plan.c()) / n as f64;
    let mut primes = PrimeTable::new();
    let mut idx = first_index_from(&mut primes, plan.m);
    let mut blocks: Vec<Vec<u64>> = Vec::with_capacity(n);
    let mut q = 1u64;
    for j in 0..n {
        let base = plan.delta * exp(-plan.delta * j as f64);
        // the first window starts at delta itself, which needs no rounding
        let lower = ratio(if j == 0 { base } else { inf.up(base, 4) })?;
        let upper = ratio(inf.down(base + width, 6))?;
        if lower > upper {
            return Err(Error::invalid(format!("block plan infeasible: window {} is empty", j + 1)));
        }
        let mut sum = BigRational::zero();
        let mut block = Vec::new();
        let mut next_q = q;
        while sum < lower {
            let p = primes.nth_prime(idx);
            if next_q.checked_mul(p).is_none_or(|v| v > residue_cap) {
                return Err(Error::cap(format!("block plan residues (block {} cannot be filled)", j + 1), residue_cap));
            }
            idx += 1;
            let term = recip(p * q);
            if &sum + &term <= upper {
                sum += term;
                block.push(p);
                next_q *= p;
            }
        }
        blocks.push(block);
        q = next_q;
    }

    let mut mask = vec![true; q as usize];
    let mut progs = Vec::new();
    let mut stage_densities = Vec::with_capacity(n);
    let mut stage_bounds = Vec::with_capacity(n);
    let mut checks = Vec::new();
    let mut path: Vec<u64> = Vec::new();
    for (j, block) in blocks.iter().enumerate() {
        let q_prev: u64 = path.iter().product();
        for &p in block {
            let d = p * q_prev;
            let r = best_class(&mask, d);
            cover(&mut mask, r, d);
            let mut ps = path.clone();
            ps.push(p);
            ps.sort_unstable();
            progs.push(progression(r, &ps)?);
        }
        path.extend_from_slice(block);
        let eps_j = BigRational::new(uncovered(&mask).into(), q.into());
        let bound = inf.down(exp(-plan.delta * (j + 1) as f64), 2);
        checks.push(check(format!("stage {} density <= e^(-delta*{})", j + 1, j + 1), ratio_le_f64(&eps_j, bound)));
        stage_densities.push(eps_j);
        stage_bounds.push(bound);
    }

    let untrimmed_sum = progs.iter().fold(BigRational::zero(), |acc, a| acc + recip(a.modulus().value()));
    let one = BigRational::one();
    let mut kept = Vec::new();
    let mut dropped_sum = BigRational::zero();
    let mut reciprocal_sum = BigRational::zero();
    for a in progs {
        let r = recip(a.modulus().value());
        if &reciprocal_sum + &r < one {
            reciprocal_sum += r;
            kept.push(a);
        } else {
            dropped_sum += r;
        }
    }
    let eps_n = stage_densities.last().cloned().unwrap_or_else(BigRational::one);
    let density = if dropped_sum.is_zero() {
        eps_n.clone()
    } else {
        let mut mask = vec![true; q as usize];
        for a in &kept {
            cover(&mut mask, a.residue(), a.modulus().value());
        }
        BigRational::new(uncovered(&mask).into(), q.into())
    };

    let eps_r = ratio(plan.eps)?;
    let three = BigRational::from_integer(3.into());
    let c0 = &one + &eps_r / &three;
    checks.insert(0, moduli_check(&kept, plan.m));
    checks.push(check("sum 1/d over D <= 1 + eps/3", untrimmed_sum <= c0));
    checks.push(check("sum 1/d over kept moduli < 1", reciprocal_sum < one));
    checks.push(check("density <= final stage density + dropped sum", density <= &eps_n + &dropped_sum));
    checks.push(check(
        "density <= eps/3 + dropped sum + 1/M",
        density <= &eps_r / &three + &dropped_sum + recip(plan.m),
    ));

    let parameters = vec![
        ("M".to_string(), plan.m.to_string()),
        ("eps".to_string(), format!("{}", plan.eps)),
        ("delta".to_string(), format!("{}", plan.delta)),
        ("c".to_string(), format!("{}", plan.c())),
        ("c0".to_string(), format!("{}", plan.c0())),
        ("N".to_string(), n.to_string()),
        ("e^(-delta N) < eps/3".to_string(), plan.tail_small().to_string()),
        ("Q_N".to_string(), q.to_string()),
    ];
    Ok(ConstructionResult {
        mode: ConstructionMode::Block,
        parameters,
        prime_sets: blocks,
        progressions: kept,
        reciprocal_sum,
        untrimmed_sum,
        stage_densities,
        stage_bounds,
        density,
        mu_sum: None,
        checks,
    })
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(m as i128) as u64
}

/// The `z mod a*b` with `z = x mod a`, `z = y mod b`, for coprime `a`, `b`.
fn crt(x: u64, a: u64, y: u64, b: u64) -> u64 {
    if b == 1 {
        return x;
    }
    let diff = (y as i128 - x as i128).rem_euclid(b as i128) as u128;
    let k = diff * mod_inverse(a, b) as u128 % b as u128;
    (x as u128 + a as u128 * k) as u64
}

struct TreeNode {
    /// Product of the prime sets on the path above.
    q_path: u64,
    /// Point mod `q_path` this node refines.
    x: u64,
    /// `mu_lambda(q_path)`.
    mu_path: BigRational,
    path_primes: Vec<u64>,
}

/// Depth-`n` tree construction for `mu(p) = 1 + lambda/p`.
///
/// Each node takes a fresh prime set with `t - 1 <= prod (1 + 1/p) <= t`
/// and progressions with moduli `d * q_path`, `1 < d | Q_node`, inside the
/// fibre of its point. `residue_cap` bounds the total number of fibre
/// residues materialized over all nodes.
pub fn build_tree_construction(m: u64, lambda: f64, t: f64, n: usize, residue_cap: u64) -> Result<ConstructionResult> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda must be positive"));
    }
    if !(t > 2.0 && t.is_finite()) {
        return Err(Error::invalid("t must exceed 2"));
    }
    if !(powf(t, lambda) < exp(t - 3.0)) {
        return Err(Error::invalid("need t^lambda < e^(t-3)"));
    }
    if m < 2 || (m as f64) < lambda {
        return Err(Error::invalid("M must be at least 2 and at least lambda"));
    }
    let inf = Inflation::default();
    let t_r = ratio(t)?;
    let lambda_r = ratio(lambda)?;
    let one = BigRational::one();
    let low = &t_r - &one;
    let mu_of = |p: u64| &one + &lambda_r / BigRational::from_integer(p.into());

    let mut primes = PrimeTable::new();
    let mut idx = first_index_from(&mut primes, m);
    let mut budget = residue_cap;
    let mut prime_sets = Vec::new();
    let mut progs = Vec::new();
    let mut mu_sum = BigRational::zero();
    let mut stage_densities = Vec::with_capacity(n);
    let mut stage_bounds = Vec::with_capacity(n);
    let mut products_ok = true;
    let mut level =
        if n == 0 { Vec::new() } else { vec![TreeNode { q_path: 1, x: 0, mu_path: one.clone(), path_primes: Vec::new() }] };

    for i in 1..=n {
        let mut density = BigRational::zero();
        let mut next = Vec::new();
        for node in &level {
            let mut prod = one.clone();
            let mut set = Vec::new();
            let mut q_node = 1u64;
            while prod < low {
                let p = primes.nth_prime(idx);
                let fits = q_node.checked_mul(p).filter(|&v| v <= budget);
                if fits.is_none() {
                    return Err(Error::cap(format!("tree residues (depth {} node)", i), residue_cap));
                }
                idx += 1;
                let grown = &prod * (&one + recip(p));
                if grown <= t_r {
                    prod = grown;
                    set.push(p);
                    q_node *= p;
                }
            }
            products_ok &= prod >= low && prod <= t_r;
            budget -= q_node;
            if node.q_path.checked_mul(q_node).is_none() {
                return Err(Error::cap("tree moduli exceed 64 bits", u64::MAX));
            }

            let mut divisors: Vec<(u64, Vec<u64>)> = vec![(1, Vec::new())];
            for &p in &set {
                for k in 0..divisors.len() {
                    let (d, mut ps) = divisors[k].clone();
                    ps.push(p);
                    divisors.push((d * p, ps));
                }
            }
            divisors.sort_unstable();
            let mut mask = vec![true; q_node as usize];
            for (d, ps) in divisors.iter().skip(1) {
                let r = best_class(&mask, *d);
                cover(&mut mask, r, *d);
                let mut all = node.path_primes.clone();
                all.extend_from_slice(ps);
                all.sort_unstable();
                let modulus = d * node.q_path;
                progs.push(progression(crt(node.x, node.q_path, r, *d), &all)?);
                let mu = ps.iter().fold(node.mu_path.clone(), |acc, &p| acc * mu_of(p));
                mu_sum += mu / BigRational::from_integer(modulus.into());
            }
            let left = uncovered(&mask);
            let q_full = node.q_path * q_node;
            density += BigRational::new(left.into(), q_full.into());
            if i < n {
                let mu_path = set.iter().fold(node.mu_path.clone(), |acc, &p| acc * mu_of(p));
                let mut path_primes = node.path_primes.clone();
                path_primes.extend_from_slice(&set);
                for (y, _) in mask.iter().enumerate().filter(|(_, &u)| u) {
                    next.push(TreeNode {
                        q_path: q_full,
                        x: crt(node.x, node.q_path, y as u64, q_node),
                        mu_path: mu_path.clone(),
                        path_primes: path_primes.clone(),
                    });
                }
            }
            prime_sets.push(set);
        }
        stage_bounds.push(inf.down(exp((2.0 - t) * i as f64), 2));
        stage_densities.push(density);
        level = next;
    }

    let density = stage_densities.last().cloned().unwrap_or_else(BigRational::one);
    let reciprocal_sum = progs.iter().fold(BigRational::zero(), |acc, a| acc + recip(a.modulus().value()));
    let two = BigRational::from_integer(2.into());
    let mut checks = vec![moduli_check(&progs, m), check("node prime products in [t-1, t]", products_ok)];
    for (i, (eps_i, &bound)) in stage_densities.iter().zip(&stage_bounds).enumerate() {
        checks.push(check(format!("depth {} density <= e^((2-t)*{})", i + 1, i + 1), ratio_le_f64(eps_i, bound)));
    }
    checks.push(check("sum mu_lambda(d)/d < 2 t^2", mu_sum < &two * &t_r * &t_r));

    let parameters = vec![
        ("M".to_string(), m.to_string()),
        ("lambda".to_string(), format!("{}", lambda)),
        ("t".to_string(), format!("{}", t)),
        ("n".to_string(), n.to_string()),
    ];
    Ok(ConstructionResult {
        mode: ConstructionMode::Tree,
        parameters,
        prime_sets,
        progressions: progs,
        untrimmed_sum: reciprocal_sum.clone(),
        reciprocal_sum,
        stage_densities,
        stage_bounds,
        density,
        mu_sum: Some(mu_sum),
        checks,
    })
}

/// Recompute the uncovered density of an emitted system with the exact
/// sieve (all caps zero) and compare it with the recorded value.
pub fn cross_check_density(result: &ConstructionResult, residue_cap: u64) -> Result<bool> {
    if result.progressions.is_empty() {
        return Ok(result.density.is_one());
    }
    let instance = build_instance(result.progressions.clone(), None, residue_cap)?;
    let schedule = vec![BigRational::zero(); instance.steps()];
    let report = run_exact_sieve(&instance, &schedule)?;
    Ok(report.exact_density == result.density)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent count: test every residue against every progression.
    fn brute_density(progs: &[ArithmeticProgression]) -> BigRational {
        let q = progs.iter().fold(1u64, |acc, a| num_integer::lcm(acc, a.modulus().value()));
        let left = (0..q).filter(|&z| !progs.iter().any(|a| a.contains(z))).count() as u64;
        BigRational::new(left.into(), q.into())
    }

    fn desk_block() -> ConstructionResult {
        let plan = BlockPlan { m: 2, eps: 0.9, delta: 0.5, blocks: 2 };
        build_block_plan(&plan, 10_000_000).unwrap()
    }

    #[test]
    fn plan_from_eps() {
        let plan = BlockPlan::from_eps(1000, 0.9).unwrap();
        let target = (1.0 + plan.c0()) / 2.0;
        assert!((plan.c() - target).abs() < 1e-12);
        assert!(plan.c() > 1.0 && plan.c() < plan.c0());
        assert!(plan.tail_small());
        assert!(exp(-plan.delta * (plan.blocks - 1) as f64) >= plan.eps / 3.0);
        assert!(BlockPlan::from_eps(2, 1.5).is_err());
    }

    #[test]
    fn desk_block_system() {
        let r = desk_block();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.prime_sets, vec![vec![2], vec![3, 5, 11]]);
        assert_eq!(r.moduli(), vec![2, 6, 10, 22]);
        let residues: Vec<u64> = r.progressions.iter().map(|a| a.residue()).collect();
        assert_eq!(residues, vec![0, 1, 1, 1]);
        assert_eq!(r.reciprocal_sum, BigRational::new(67.into(), 165.into()) * BigRational::from_integer(2.into()));
        assert_eq!(r.stage_densities[0], BigRational::new(1.into(), 2.into()));
        assert_eq!(r.density, BigRational::new(8.into(), 33.into()));
        assert_eq!(r.density, brute_density(&r.progressions));
        assert!(cross_check_density(&r, 10_000_000).unwrap());
    }

    #[test]
    fn trimming_keeps_a_system_already_below_one() {
        let r = desk_block();
        assert_eq!(r.untrimmed_sum, r.reciprocal_sum);
        assert_eq!(r.density, *r.stage_densities.last().unwrap());
    }

    #[test]
    fn greedy_beats_the_product_bound() {
        let r = desk_block();
        let mut bound = BigRational::one();
        for d in r.moduli() {
            bound *= BigRational::one() - recip(d);
        }
        assert!(r.density <= bound);
    }

    #[test]
    fn block_plans_outgrow_desk_caps() {
        let err = build_block_construction(2, 0.9, 10_000_000).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { .. }), "{err:?}");
        let err = build_block_construction(1 << 40, 0.5, 1000).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { .. }));
        let bad = BlockPlan { m: 2, eps: 0.3, delta: 0.5, blocks: 2 };
        assert!(matches!(build_block_plan(&bad, 1000), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn desk_tree_system() {
        let r = build_tree_construction(2, 0.25, 3.5, 1, 1_000_000).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.prime_sets, vec![vec![2, 3, 5, 7]]);
        assert_eq!(r.progressions.len(), 15);
        assert_eq!(r.density, brute_density(&r.progressions));
        assert!(cross_check_density(&r, 1_000_000).unwrap());
        let mu = r.mu_sum.clone().unwrap();
        // prod (1 + mu(p)/p) - 1 over {2, 3, 5, 7} with lambda = 1/4
        let lam = BigRational::new(1.into(), 4.into());
        let mut expect = BigRational::one();
        for p in [2u64, 3, 5, 7] {
            let pr = BigRational::from_integer(p.into());
            expect *= BigRational::one() + (BigRational::one() + &lam / &pr) / pr;
        }
        assert_eq!(mu, expect - BigRational::one());
        // the greedy choice covers Z_210 outright
        assert!(r.density.is_zero());
        let deeper = build_tree_construction(2, 0.25, 3.5, 2, 1_000_000).unwrap();
        assert_eq!(deeper.progressions, r.progressions);
    }

    #[test]
    fn tree_edge_cases() {
        let empty = build_tree_construction(2, 1.0, 5.0, 0, 100).unwrap();
        assert!(empty.progressions.is_empty());
        assert!(empty.density.is_one());
        assert!(empty.mu_sum.unwrap().is_zero());
        assert!(matches!(build_tree_construction(2, 10.0, 2.5, 1, 100), Err(Error::InvalidInput(_))));
        assert!(matches!(build_tree_construction(2, 1.0, 5.0, 1, 1_000_000), Err(Error::ResourceCap { .. })));
        assert!(matches!(build_tree_construction(2, 0.125, 3.2, 2, 10_000_000), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn tree_with_uncovered_points() {
        let r = build_tree_construction(2, 0.125, 3.2, 1, 1_000_000).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.prime_sets, vec![vec![2, 3, 5]]);
        let residues: Vec<u64> = r.progressions.iter().map(|a| a.residue()).collect();
        assert_eq!(residues, vec![0, 0, 0, 1, 1, 2, 23]);
        assert_eq!(r.density, BigRational::new(1.into(), 30.into()));
        assert_eq!(r.mu_sum, Some(BigRational::new(684_673.into(), 460_800.into())));
        assert_eq!(r.density, brute_density(&r.progressions));
        assert!(cross_check_density(&r, 1_000_000).unwrap());
    }

    #[test]
    fn crt_combines_classes() {
        for (x, a, y, b) in [(3u64, 7u64, 4u64, 11u64), (0, 1, 5, 6), (5, 6, 0, 1), (209, 210, 12, 13)] {
            let z = crt(x, a, y, b);
            assert!(z < a * b);
            assert_eq!(z % a, x);
            assert_eq!(z % b, y);
        }
    }
}
