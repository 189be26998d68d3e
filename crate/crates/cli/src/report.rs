//! JSON forms of the core results. Exact rationals are written as `"p/q"`.

use std::path::Path;

use covering_core::constructions::ConstructionResult;
use covering_core::float::Inflation;
use covering_core::sieve::{build_instance, ArithmeticProgression, CoveringInstance, SieveReport};
use covering_core::{BigInt, BigRational};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::Settings;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn rat(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `p/q`, an integer, or a decimal such as `0.25`, exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    let s = s.trim();
    let bad = || CliError::Invalid(format!("not a rational number: {:?}", s));
    let int = |t: &str| t.parse::<BigInt>().map_err(|_| bad());
    if let Some((n, d)) = s.split_once('/') {
        let d = int(d)?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(int(n)?, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole = if whole.is_empty() || whole == "-" { BigInt::from(0) } else { int(whole)? };
        let scale = BigInt::from(10u8).pow(frac.len() as u32);
        let f = BigRational::new(int(frac)?, scale);
        let w = BigRational::from_integer(whole);
        return Ok(if negative { w - f } else { w + f });
    }
    Ok(BigRational::from_integer(int(s)?))
}

pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| CliError::Invalid(format!("{}: cannot parse {:?}", what, t))))
        .collect()
}

/// One progression as stored in instance files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionRecord {
    pub residue: u64,
    pub modulus: u64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum InstanceFile {
    List(Vec<ProgressionRecord>),
    Report { progressions: Vec<ProgressionRecord> },
    Envelope { result: Progressions },
}

#[derive(Deserialize)]
struct Progressions {
    progressions: Vec<ProgressionRecord>,
}

/// Read a list of progressions: bare, under a `progressions` key, or inside
/// a full `construct` report.
pub fn read_progressions(path: &Path) -> Result<Vec<ProgressionRecord>, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("instance {}: {}", path.display(), e)))?;
    let parsed: InstanceFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("instance {}: malformed JSON: {}", path.display(), e)))?;
    Ok(match parsed {
        InstanceFile::List(v) => v,
        InstanceFile::Report { progressions } => progressions,
        InstanceFile::Envelope { result } => result.progressions,
    })
}

pub fn load_instance(path: &Path, prime_order: Option<&[u64]>, cap: u64) -> Result<CoveringInstance, CliError> {
    let progs = read_progressions(path)?
        .into_iter()
        .map(|r| {
            if r.modulus == 0 {
                return Err(CliError::Invalid("modulus must be positive".into()));
            }
            Ok(ArithmeticProgression::from_values(r.residue, r.modulus)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(build_instance(progs, prime_order, cap)?)
}

pub fn progressions_json(progs: &[ArithmeticProgression]) -> Value {
    Value::Array(progs.iter().map(|a| json!({"residue": a.residue(), "modulus": a.modulus().value()})).collect())
}

pub fn sieve_report_json(r: &SieveReport) -> Value {
    let steps: Vec<Value> = r
        .steps
        .iter()
        .map(|s| {
            json!({
                "step": s.step,
                "prime": s.prime,
                "gamma": s.gamma,
                "delta": rat(&s.delta),
                "alpha_histogram": s.alpha_histogram.iter().map(|b| json!({
                    "alpha": rat(&b.alpha),
                    "residues": b.residues,
                    "mass": rat(&b.mass),
                })).collect::<Vec<_>>(),
                "removed_mass": rat(&s.removed_mass),
                "m1": rat(&s.m1),
                "m2": rat(&s.m2),
                "eta_term": rat(&s.eta_term),
            })
        })
        .collect();
    json!({
        "q": r.q,
        "prime_order": r.prime_order,
        "steps": steps,
        "eta": rat(&r.eta),
        "distortion_budget": rat(&r.distortion_budget),
        "density_bound": r.density_bound,
        "final_uncovered_mass": rat(&r.final_uncovered_mass),
        "exact_density": rat(&r.exact_density),
    })
}

pub fn construction_json(r: &ConstructionResult, cross_check: Option<bool>) -> Value {
    let params: serde_json::Map<String, Value> =
        r.parameters.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    json!({
        "progressions": progressions_json(&r.progressions),
        "stats": {
            "mode": r.mode.name(),
            "parameters": params,
            "prime_sets": r.prime_sets,
            "moduli": r.progressions.len(),
            "reciprocal_sum": rat(&r.reciprocal_sum),
            "untrimmed_sum": rat(&r.untrimmed_sum),
            "stage_densities": r.stage_densities.iter().map(rat).collect::<Vec<_>>(),
            "stage_bounds": r.stage_bounds,
            "density": rat(&r.density),
            "mu_sum": r.mu_sum.as_ref().map(rat),
            "checks": r.checks.iter().map(|c| json!({"name": c.name, "holds": c.holds})).collect::<Vec<_>>(),
            "sieve_cross_check": cross_check,
        }
    })
}

/// The common report envelope.
pub fn envelope(command: &str, settings: &Settings, inflation: Inflation, passed: bool, result: Value) -> Value {
    json!({
        "tool": "covering-sieve",
        "version": VERSION,
        "command": command,
        "inflation": inflation.factor(),
        "config": settings.echo(),
        "passed": passed,
        "result": result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("1/4").unwrap(), r(1, 4));
        assert_eq!(parse_rational("0.25").unwrap(), r(1, 4));
        assert_eq!(parse_rational(" 3 ").unwrap(), r(3, 1));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        assert_eq!(parse_rational("-0.5").unwrap(), r(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("half").is_err());
        assert!(parse_rational("0.").is_err());
        assert_eq!(rat(&r(6, 4)), "3/2");
        assert_eq!(rat(&r(2, 1)), "2/1");
    }

    #[test]
    fn instance_files_in_both_shapes() {
        let dir = tempfile::tempdir().unwrap();
        let bare = dir.path().join("bare.json");
        std::fs::write(&bare, r#"[{"residue":0,"modulus":2},{"residue":0,"modulus":3}]"#).unwrap();
        let wrapped = dir.path().join("wrapped.json");
        std::fs::write(&wrapped, r#"{"progressions":[{"residue":0,"modulus":2},{"residue":0,"modulus":3}],"stats":{}}"#)
            .unwrap();
        let a = load_instance(&bare, None, 1000).unwrap();
        let b = load_instance(&wrapped, None, 1000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.q(), 6);
    }
}
