use crate::float::{ln, powf, Inflation};
use crate::numtheory::{smooth_recip_sum, smooth_tail_rankin, PrimeTable};
use crate::{Error, Result};

/// How the small-prime part was bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim1Method {
    /// Full product minus an enumerated head.
    ExactHead,
    /// Rankin's trick, used when the head does not fit the enumeration cap.
    Rankin,
}

/// Upper bound on `eta` for an arbitrary distinct-moduli system with all
/// moduli `>= m`, using `delta_i = 0` for `i <= k_star` and
/// `delta_i = (mu_i - 1)/mu_i`, `mu_i = 1 + (ln p_i)^{3+eps}/p_i` beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaBound {
    pub eps: f64,
    pub k_star: usize,
    pub m: u64,
    pub cutoff: usize,
    /// Bound on `sum 1/d` over `p_{k_star}`-smooth `d >= m`.
    pub claim1: f64,
    pub claim1_method: Claim1Method,
    /// Explicit sum of the second-moment terms for `k_star < i <= cutoff`.
    pub head: f64,
    /// Head steps where `delta_i` was clamped at 1/2.
    pub clamped: usize,
    /// Exponent `A` in the tail product bound `P_i <= P_{c+1} (ln i / ln c)^A`.
    pub tail_exponent: f64,
    /// Coefficient `K` in the tail term bound `K (ln i)^{A-4-eps} / i`.
    pub tail_coefficient: f64,
    /// `K (ln c)^{A-3-eps} / (3+eps-A)`.
    pub tail: f64,
    pub total: f64,
    /// `total <= 1/2`.
    pub below_half: bool,
}

/// How the tail beyond the cutoff is bounded, for reports.
pub const TAIL_MAJORANT: &str = "for i > c: s_j mu_j <= A/(p_j-1) with A = (3 + 2/(p_{c+1}-1)) mu(p_{c+1}); \
p_j - 1 >= j ln j (j >= 20) gives P_i <= P_{c+1} (ln i/ln c)^A; each term is at most \
K (ln i)^{A-4-eps}/i, summed by the integral K (ln c)^{A-3-eps}/(3+eps-A)";

fn mu(p: u64, eps: f64) -> f64 {
    let pf = p as f64;
    1.0 + powf(ln(pf), 3.0 + eps) / pf
}

pub fn main_theorem_eta(
    table: &mut PrimeTable,
    eps: f64,
    k_star: usize,
    m: u64,
    cutoff: usize,
    cap: usize,
    inflation: Inflation,
) -> Result<EtaBound> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid("eps must be positive"));
    }
    if k_star == 0 || cutoff <= k_star {
        return Err(Error::invalid("need 1 <= k_star < cutoff"));
    }
    if cutoff < 20 {
        return Err(Error::invalid("cutoff must be at least 20"));
    }
    table.ensure_count(cutoff + 1);
    let p_star = table.get(k_star).expect("sieved");

    let small = table.primes_up_to(p_star);
    let (claim1, claim1_method) = match smooth_recip_sum(table, p_star, m, cap, inflation) {
        Ok(s) => (s.tail, Claim1Method::ExactHead),
        Err(Error::ResourceCap { .. }) => (smooth_tail_rankin(small, m, inflation), Claim1Method::Rankin),
        Err(e) => return Err(e),
    };

    // running product P_i = prod_{j<i} (1 + s_j/(1-delta_j))
    let mut prod = 1.0f64;
    for j in 1..=k_star {
        let p = table.get(j).expect("sieved") as f64;
        prod = inflation.up(prod * (1.0 + (3.0 * p - 1.0) / ((p - 1.0) * (p - 1.0))), 6);
    }
    let mut head = 0.0f64;
    let mut clamped = 0;
    for i in k_star + 1..=cutoff {
        let p = table.get(i).expect("sieved");
        let pf = p as f64;
        let mu_i = mu(p, eps);
        let mut delta = (mu_i - 1.0) / mu_i;
        if delta > 0.5 {
            delta = 0.5;
            clamped += 1;
        }
        let m2 = prod / ((pf - 1.0) * (pf - 1.0));
        head = inflation.up(head + m2 / (4.0 * delta * (1.0 - delta)), 12);
        prod = inflation.up(prod * (1.0 + (3.0 * pf - 1.0) / ((pf - 1.0) * (pf - 1.0) * (1.0 - delta))), 8);
    }

    let next = table.get(cutoff + 1).expect("sieved");
    let nf = next as f64;
    let expo = 3.0 + eps;
    if nf <= crate::float::exp(expo) || powf(ln(nf), expo) / nf > 1.0 {
        return Err(Error::Inconclusive("cutoff too small for the tail majorant".into()));
    }
    let mu_next = mu(next, eps);
    let a = inflation.up((3.0 + 2.0 / (nf - 1.0)) * mu_next, 8);
    if a >= expo {
        return Err(Error::Inconclusive("tail exponent A is not below 3 + eps".into()));
    }
    let lc = inflation.down(ln(cutoff as f64), 1);
    let ratio = nf / (nf - 1.0);
    let k = inflation.up(prod * mu_next * mu_next * ratio * ratio / (4.0 * powf(lc, a)), 16);
    let tail = inflation.up(k * powf(lc, a - expo) / inflation.down(expo - a, 2), 8);
    let total = inflation.up(claim1 + head + tail, 2);
    Ok(EtaBound {
        eps,
        k_star,
        m,
        cutoff,
        claim1,
        claim1_method,
        head,
        clamped,
        tail_exponent: a,
        tail_coefficient: k,
        tail,
        total,
        below_half: total <= 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn searched_parameters_give_half() {
        let mut t = PrimeTable::new();
        let b = main_theorem_eta(&mut t, 1.0, 1000, u64::MAX, 100_000, 1_000_000, Inflation::default()).unwrap();
        assert_eq!(b.claim1_method, Claim1Method::Rankin);
        assert!(b.below_half, "{:?}", b);
        assert_eq!(b.clamped, 0);
        assert!(b.tail_exponent < 4.0);
    }

    #[test]
    fn small_parameters_are_not_enough() {
        let mut t = PrimeTable::new();
        let b = main_theorem_eta(&mut t, 1.0, 1, 2, 100_000, 1000, Inflation::default()).unwrap();
        assert!(b.total > 1.0);
        assert!(b.clamped > 0);
        assert!(!b.below_half);
    }

    #[test]
    fn exact_head_used_when_it_fits() {
        let mut t = PrimeTable::new();
        // 2-smooth numbers >= 64 sum to 1/32
        let b = main_theorem_eta(&mut t, 1.0, 1, 64, 100_000, 1000, Inflation::default()).unwrap();
        assert_eq!(b.claim1_method, Claim1Method::ExactHead);
        assert!(b.claim1 >= 1.0 / 32.0 && b.claim1 < 1.0 / 32.0 + 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut t = PrimeTable::new();
        let inf = Inflation::default();
        assert!(main_theorem_eta(&mut t, 0.0, 10, 100, 1000, 10, inf).is_err());
        assert!(main_theorem_eta(&mut t, 1.0, 10, 100, 10, 10, inf).is_err());
        assert!(matches!(main_theorem_eta(&mut t, 1.0, 10, 100, 30, 10, inf), Err(Error::Inconclusive(_))));
    }
}
