use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::recursion::walk_trajectory;
use super::{odd_power_sum_exact, TrajectoryStatus};
use crate::float::{ratio_lt_f64, ratio_to_f64, Inflation};
use crate::numtheory::PrimeSource;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

/// One checked relation `lhs op rhs`, with both sides as printed values.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub lhs: String,
    pub op: &'static str,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub name: &'static str,
    /// Named intermediate constants, exact where possible.
    pub constants: Vec<(String, String)>,
    pub comparisons: Vec<Comparison>,
    pub verdict: Verdict,
}

/// Constants for the Schinzel certificate, taken from the antichain checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SchinzelInputs {
    /// Maximum pair sum over 5-smooth antichains.
    pub kappa: BigRational,
    /// Maximum reciprocal sum over 5-smooth antichains without prime powers.
    pub removed_bound: BigRational,
    /// Whether both antichain searches confirmed their bounds.
    pub antichains_verified: bool,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn show(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

struct Builder {
    name: &'static str,
    constants: Vec<(String, String)>,
    comparisons: Vec<Comparison>,
}

impl Builder {
    fn new(name: &'static str) -> Self {
        Builder { name, constants: Vec::new(), comparisons: Vec::new() }
    }

    fn constant(&mut self, name: &str, value: String) {
        self.constants.push((name.into(), value));
    }

    fn exact(&mut self, lhs: &str, op: &'static str, rhs: &str, holds: bool) {
        self.comparisons.push(Comparison { lhs: lhs.into(), op, rhs: rhs.into(), holds });
    }

    fn finish(self) -> Certificate {
        let verdict = if self.comparisons.iter().all(|c| c.holds) { Verdict::Pass } else { Verdict::Fail };
        Certificate { name: self.name, constants: self.constants, comparisons: self.comparisons, verdict }
    }
}

fn below_threshold(b: &mut Builder, f: &BigRational, k: usize, g: f64) {
    b.exact(
        &alloc::format!("f_{} = {}", k, show(f)),
        "<",
        &alloc::format!("g_{} = {}", k, g),
        ratio_lt_f64(f, g),
    );
}

fn trajectory_check<S: PrimeSource + ?Sized>(
    b: &mut Builder,
    primes: &mut S,
    k: usize,
    f: &BigRational,
    inflation: Inflation,
) -> Result<()> {
    let start = Inflation::default().up(ratio_to_f64(f), 1);
    let status = walk_trajectory(primes, k, start, 10_000_000, inflation, |_| {})?;
    b.exact(
        &alloc::format!("recursion from f_{} = {}", k, show(f)),
        "terminates",
        &match status {
            TrajectoryStatus::Success { k } => alloc::format!("at k = {}", k),
            TrajectoryStatus::GuardFailure { i } => alloc::format!("guard failure at {}", i),
            TrajectoryStatus::Inconclusive { k_max } => alloc::format!("no verdict by {}", k_max),
        },
        status.is_success(),
    );
    Ok(())
}

/// The three non-covering certificates. Each compares an exact `f_{i_0}`
/// against the independently computed threshold and also re-runs the
/// recursion from that starting value.
pub fn certificates<S: PrimeSource + ?Sized>(
    primes: &mut S,
    g2: f64,
    g3: f64,
    schinzel: &SchinzelInputs,
    inflation: Inflation,
) -> Result<Vec<Certificate>> {
    let one = BigRational::one();

    // no modulus divisible by 2 or 3: nothing is removed at the first two
    // steps and kappa is an empty product
    let mut hn = Builder::new("hough-nielsen");
    let kappa = one.clone();
    let mu2 = &one - BigRational::zero();
    let f2 = &kappa / &mu2;
    hn.constant("i0", "2".into());
    hn.constant("kappa", show(&kappa));
    hn.constant("mu_2", show(&mu2));
    hn.constant("f_2", show(&f2));
    hn.constant("g_2", alloc::format!("{}", g2));
    hn.exact(&alloc::format!("f_2 = {}", show(&f2)), "=", "1", f2.is_one());
    below_threshold(&mut hn, &f2, 2, g2);
    trajectory_check(&mut hn, primes, 2, &f2, inflation)?;

    // Q = 3Q' with 9 not dividing Q and no factor 2 or 5
    let mut tnf = Builder::new("2-9-15");
    let kappa = &one + odd_power_sum_exact(3, Some(1)) / (&one - BigRational::zero());
    let m2_first = rat(1, 3);
    let mu3 = &one - &m2_first;
    let f3 = &kappa / &mu3;
    tnf.constant("i0", "3".into());
    tnf.constant("delta_1..3", "0".into());
    tnf.constant("kappa", show(&kappa));
    tnf.constant("M_2^(1) bound", show(&m2_first));
    tnf.constant("mu_3 lower bound", show(&mu3));
    tnf.constant("f_3", show(&f3));
    tnf.constant("g_3", alloc::format!("{}", g3));
    tnf.exact(&alloc::format!("kappa = {}", show(&kappa)), "=", "1 + 3/p_2 = 2", kappa == rat(2, 1));
    tnf.exact(&alloc::format!("mu_3 >= {}", show(&mu3)), ">=", "2/3", mu3 >= rat(2, 3));
    tnf.exact(&alloc::format!("f_3 = {}", show(&f3)), "<=", "3", f3 <= rat(3, 1));
    below_threshold(&mut tnf, &f3, 3, g3);
    trajectory_check(&mut tnf, primes, 3, &f3, inflation)?;

    let mut sch = Builder::new("schinzel");
    let mu3 = &one - &schinzel.removed_bound;
    let f3 = &schinzel.kappa / &mu3;
    sch.constant("i0", "3".into());
    sch.constant("delta_1..3", "0".into());
    sch.constant("kappa", show(&schinzel.kappa));
    sch.constant("removed measure bound", show(&schinzel.removed_bound));
    sch.constant("mu_3 lower bound", show(&mu3));
    sch.constant("f_3", show(&f3));
    sch.constant("g_3", alloc::format!("{}", g3));
    sch.exact("antichain lemmas", "verified", "within caps", schinzel.antichains_verified);
    sch.exact(&alloc::format!("kappa = {}", show(&schinzel.kappa)), "=", "17/10", schinzel.kappa == rat(17, 10));
    sch.exact(&alloc::format!("mu_3 >= {}", show(&mu3)), ">=", "2/3", mu3 >= rat(2, 3));
    sch.exact(&alloc::format!("f_3 = {}", show(&f3)), "=", "51/20", f3 == rat(51, 20));
    below_threshold(&mut sch, &f3, 3, g3);
    trajectory_check(&mut sch, primes, 3, &f3, inflation)?;

    Ok(vec![hn.finish(), tnf.finish(), sch.finish()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::PrimeTable;

    fn inputs() -> SchinzelInputs {
        SchinzelInputs { kappa: rat(17, 10), removed_bound: rat(1, 3), antichains_verified: true }
    }

    #[test]
    fn pass_with_table_thresholds() {
        let mut t = PrimeTable::new();
        let certs = certificates(&mut t, 1.260997, 3.007888, &inputs(), Inflation::default()).unwrap();
        assert_eq!(certs.len(), 3);
        for c in &certs {
            assert_eq!(c.verdict, Verdict::Pass, "{:?}", c);
        }
        assert!(certs[2].constants.iter().any(|(k, v)| k == "f_3" && v == "51/20"));
    }

    #[test]
    fn fail_when_threshold_too_small() {
        let mut t = PrimeTable::new();
        let certs = certificates(&mut t, 0.9, 2.5, &inputs(), Inflation::default()).unwrap();
        assert!(certs.iter().all(|c| c.verdict == Verdict::Fail));
        let bad = SchinzelInputs { antichains_verified: false, ..inputs() };
        let certs = certificates(&mut t, 1.260997, 3.007888, &bad, Inflation::default()).unwrap();
        assert_eq!(certs[2].verdict, Verdict::Fail);
    }
}
