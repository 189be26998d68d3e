use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use covering_core::antichains::{verify_lemma, Lemma, LemmaReport, Maximizer};
use covering_core::constructions::{build_block_plan, build_tree_construction, cross_check_density, BlockPlan};
use covering_core::float::{ratio_lt_f64, Inflation};
use covering_core::minmod::{run_min_modulus, MinModOptions, MinModOutcome, MinModRun, RowExecutor, SerialExecutor};
use covering_core::moments::{certificates, gk_table, ChopStart, GkOptions, SchinzelInputs, Verdict, GK_MAX_INDEX};
use covering_core::numtheory::{mu_interval_constant, MuIntervalSweep, PrimeTable};
use covering_core::sieve::{run_exact_sieve, verify_sieve_lemmas, CoveringInstance};
use covering_core::{BigRational, DEFAULT_ENUMERATION_CAP, DEFAULT_INFLATION, DEFAULT_RESIDUE_CAP};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cache::{cache_path, load_primes, save_if_grown};
use crate::config::Settings;
use crate::executor::RayonExecutor;
use crate::report::{
    construction_json, envelope, load_instance, parse_list, parse_rational, progressions_json, rat, sieve_report_json,
};
use crate::{CliError, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_PASS};

const DEFAULT_GK_LIST: &str = "2,3,4,5,6,7,8,9,10,100,1000";
const DEFAULT_EG_LIST: &str = "1,10,100,1000,10000,100000,1000000";

#[derive(Parser, Debug)]
#[command(name = "covering-sieve", version, about = "Sieve bounds and certificates for covering systems")]
pub struct Cli {
    /// Line-based key=value file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Per-operation inflation factor for rounded upper bounds (>= 1).
    #[arg(long, global = true)]
    inflation: Option<f64>,
    /// Worker threads for parallel table updates.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Prime cache file (else config `prime_cache`, else $COVERING_SIEVE_CACHE).
    #[arg(long = "prime-cache", global = true)]
    prime_cache: Option<String>,
    /// Output format: json or csv.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Threshold table g_k (CSV k,p_k,g_k by default).
    Gk(GkArgs),
    /// Minimum-modulus run.
    Minmod(MinmodArgs),
    /// Exact sieve on a system of progressions.
    Simulate(InstanceArgs),
    /// Exact checks of the measure lemmas on a system.
    Verify(VerifyArgs),
    /// Exhaustive smooth-antichain checks.
    Antichains(AntichainArgs),
    /// Build a block or tree construction.
    Construct(ConstructArgs),
    /// The three non-covering certificates.
    Certificates(CertificateArgs),
    /// Interval sums of mu(d)/d over [n, K n].
    #[command(name = "eg-sum")]
    EgSum(EgSumArgs),
}

#[derive(Args, Debug)]
struct GkArgs {
    /// Comma-separated indices.
    #[arg(long)]
    k: Option<String>,
    #[arg(long = "k-max")]
    k_max: Option<usize>,
    /// Relative width at which the chop stops.
    #[arg(long)]
    precision: Option<f64>,
    /// Chop on f2 or f3.
    #[arg(long)]
    start: Option<String>,
}

#[derive(Args, Debug)]
struct MinmodArgs {
    #[arg(long = "K")]
    k: Option<u64>,
    #[arg(long)]
    phase1: Option<usize>,
    #[arg(long = "end-k")]
    end_k: Option<usize>,
    /// Use the full-size defaults (616000, 51, 51000) instead of the quick ones.
    #[arg(long)]
    slow: bool,
    /// Threshold to beat at the end index (computed when absent).
    #[arg(long = "g-end")]
    g_end: Option<f64>,
    /// Write per-step CSV i,p_i,delta_i,mhat2,muhat,f_i here.
    #[arg(long = "steps-csv")]
    steps_csv: Option<String>,
    #[arg(long = "entry-cap")]
    entry_cap: Option<usize>,
    #[arg(long = "enumeration-cap")]
    enumeration_cap: Option<usize>,
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// JSON list of {residue, modulus}.
    #[arg(long)]
    file: Option<String>,
    /// Comma-separated caps, one per prime step (p/q, integer or decimal).
    #[arg(long)]
    delta: Option<String>,
    /// Comma-separated prime order.
    #[arg(long = "prime-order")]
    prime_order: Option<String>,
    #[arg(long = "residue-cap")]
    residue_cap: Option<u64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Random sets tested per step.
    #[arg(long = "random-sets")]
    random_sets: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct AntichainArgs {
    /// no-prime-powers, three-smooth-pairs, five-smooth-pairs or all.
    #[arg(long)]
    lemma: Option<String>,
    #[arg(long = "exp-cap")]
    exp_cap: Option<u32>,
    #[arg(long = "size-cap")]
    size_cap: Option<usize>,
    #[arg(long = "node-cap")]
    node_cap: Option<u64>,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    /// block or tree.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long = "M")]
    m: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Block mode: explicit delta instead of the derived one.
    #[arg(long)]
    delta: Option<f64>,
    /// Block mode: explicit number of blocks.
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "residue-cap")]
    residue_cap: Option<u64>,
    /// Also write the bare progression list here.
    #[arg(long)]
    emit: Option<String>,
}

#[derive(Args, Debug)]
struct CertificateArgs {
    #[arg(long)]
    g2: Option<f64>,
    #[arg(long)]
    g3: Option<f64>,
    #[arg(long = "k-max")]
    k_max: Option<usize>,
    #[arg(long = "exp-cap")]
    exp_cap: Option<u32>,
    #[arg(long = "size-cap")]
    size_cap: Option<usize>,
}

#[derive(Args, Debug)]
struct EgSumArgs {
    /// Comma-separated interval starts.
    #[arg(long)]
    n: Option<String>,
    #[arg(long = "K")]
    k: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    cap: Option<usize>,
    /// Fail unless every interval sum up to the largest n stays at or below
    /// this (default: the proven constant).
    #[arg(long)]
    bound: Option<f64>,
    /// Primes used explicitly in the proven constant.
    #[arg(long = "prime-limit")]
    prime_limit: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

/// A finished command: the text to emit and whether its checks passed.
#[derive(Debug, Clone)]
pub struct Output {
    pub body: String,
    pub passed: bool,
}

struct Ctx {
    settings: Settings,
    inflation: Inflation,
    workers: usize,
    cache: Option<PathBuf>,
    format: Option<Format>,
}

impl Ctx {
    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn finish(&self, command: &str, passed: bool, result: Value) -> Output {
        let report = envelope(command, &self.settings, self.inflation, passed, result);
        Output { body: pretty(&report), passed }
    }

    /// CSV bodies stay table-shaped; the echo goes to stderr as one JSON line.
    fn finish_csv(&self, command: &str, passed: bool, body: String, summary: Value) -> Output {
        let report = envelope(command, &self.settings, self.inflation, passed, summary);
        eprintln!("{}", report);
        Output { body, passed }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Parse `args`, run the command and write its report to `out` (or the
/// `--output` file). Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
        }
    };
    let target = cli.output.clone();
    match execute(cli) {
        Ok(output) => {
            let written = match &target {
                Some(path) => std::fs::write(path, &output.body),
                None => out.write_all(output.body.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: writing report: {}", e);
                return EXIT_INVALID;
            }
            if output.passed {
                EXIT_PASS
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    }
}

/// Resolve global settings and run the subcommand.
pub fn execute(cli: Cli) -> Result<Output, CliError> {
    let mut settings = Settings::load(cli.config.as_deref())?;
    let factor = settings.get("inflation", cli.inflation, DEFAULT_INFLATION)?;
    let inflation = Inflation::new(factor)?;
    let workers = settings.get("workers", cli.workers, 1usize)?;
    if workers == 0 {
        return Err(CliError::Invalid("workers must be at least 1".into()));
    }
    let cache = cache_path(settings.get_opt::<String>("prime_cache", cli.prime_cache)?.map(PathBuf::from));
    let format = match settings.get_opt::<String>("format", cli.format)?.as_deref() {
        None => None,
        Some("json") => Some(Format::Json),
        Some("csv") => Some(Format::Csv),
        Some(other) => return Err(CliError::Invalid(format!("unknown format {:?}", other))),
    };
    let mut ctx = Ctx { settings, inflation, workers, cache, format };
    match cli.command {
        Command::Gk(a) => cmd_gk(&mut ctx, a),
        Command::Minmod(a) => cmd_minmod(&mut ctx, a),
        Command::Simulate(a) => cmd_simulate(&mut ctx, a),
        Command::Verify(a) => cmd_verify(&mut ctx, a),
        Command::Antichains(a) => cmd_antichains(&mut ctx, a),
        Command::Construct(a) => cmd_construct(&mut ctx, a),
        Command::Certificates(a) => cmd_certificates(&mut ctx, a),
        Command::EgSum(a) => cmd_eg_sum(&mut ctx, a),
    }
}

fn json_only(ctx: &Ctx, command: &str) -> Result<(), CliError> {
    match ctx.format(Format::Json) {
        Format::Json => Ok(()),
        Format::Csv => Err(CliError::Invalid(format!("{} has no CSV form", command))),
    }
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii"))
}

fn compute_g(
    primes: &mut PrimeTable,
    ks: &[usize],
    start: ChopStart,
    k_max: usize,
    precision: f64,
    inflation: Inflation,
) -> Result<covering_core::moments::GkTable, CliError> {
    let opts = GkOptions { start, inflation, rel_precision: precision, k_max };
    Ok(gk_table(primes, ks, &opts)?)
}

fn cmd_gk(ctx: &mut Ctx, a: GkArgs) -> Result<Output, CliError> {
    let s = &mut ctx.settings;
    let ks: Vec<usize> = parse_list(&s.get("k", a.k, DEFAULT_GK_LIST.to_string())?, "k")?;
    let k_max = s.get("k-max", a.k_max, GkOptions::default().k_max)?;
    let precision = s.get("precision", a.precision, GkOptions::default().rel_precision)?;
    let start = match s.get("start", a.start, "f2".to_string())?.as_str() {
        "f2" => ChopStart::F2,
        "f3" => ChopStart::F3,
        other => return Err(CliError::Invalid(format!("start must be f2 or f3, not {:?}", other))),
    };
    if ks.is_empty() {
        return Err(CliError::Invalid("no k given".into()));
    }
    let mut primes = load_primes(ctx.cache.as_deref(), 0)?;
    let before = primes.len();
    let table = compute_g(&mut primes, &ks, start, k_max, precision, ctx.inflation)?;
    save_if_grown(ctx.cache.as_deref(), &primes, before)?;
    let summary = json!({
        "start_index": table.start_index,
        "f_start": table.f_start,
        "failing_start": table.failing_start,
        "termination_index": table.termination_index,
        "chop_iterations": table.chop_iterations,
    });
    match ctx.format(Format::Csv) {
        Format::Csv => {
            let rows = table.rows.iter().map(|r| vec![r.k.to_string(), r.p_k.to_string(), format!("{}", r.g_k)]);
            Ok(ctx.finish_csv("gk", true, csv_string(&["k", "p_k", "g_k"], rows)?, summary))
        }
        Format::Json => {
            let mut result = summary;
            result["rows"] = table.rows.iter().map(|r| json!({"k": r.k, "p_k": r.p_k, "g_k": r.g_k})).collect();
            Ok(ctx.finish("gk", true, result))
        }
    }
}

fn minmod_json(run: &MinModRun, g_end: Option<f64>, passed: bool) -> Value {
    let outcome = match run.outcome {
        MinModOutcome::Completed { f_end } => json!({"completed": true, "f_end": f_end}),
        MinModOutcome::Failed { i } => json!({"completed": false, "failed_at": i}),
    };
    let last = run.steps.last().map(|s| {
        json!({"i": s.i, "p_i": s.p, "delta_i": s.delta, "mhat2": s.mhat2, "muhat": s.muhat, "f_i": s.f})
    });
    json!({
        "K": run.k,
        "phase1": run.phase1,
        "end_k": run.end_k,
        "grid_points": run.grid_points,
        "smooth_tail": run.smooth_tail,
        "mu_phase1": run.mu_phase1,
        "f_phase1": run.f_phase1,
        "steps": run.steps.len(),
        "last_step": last,
        "outcome": outcome,
        "g_end": g_end,
        "verdict": if passed { "PASS" } else { "FAIL" },
    })
}

fn steps_csv(run: &MinModRun) -> Result<String, CliError> {
    let rows = run.steps.iter().map(|s| {
        vec![
            s.i.to_string(),
            s.p.to_string(),
            format!("{}", s.delta),
            format!("{}", s.mhat2),
            format!("{}", s.muhat),
            format!("{}", s.f),
        ]
    });
    csv_string(&["i", "p_i", "delta_i", "mhat2", "muhat", "f_i"], rows)
}

fn cmd_minmod(ctx: &mut Ctx, a: MinmodArgs) -> Result<Output, CliError> {
    let s = &mut ctx.settings;
    let slow = s.flag("slow", a.slow)?;
    let (dk, dp, de) = if slow { (616_000, 51, 51_000) } else { (10_000, 25, 2_000) };
    let k = s.get("K", a.k, dk)?;
    let phase1 = s.get("phase1", a.phase1, dp)?;
    let end_k = s.get("end-k", a.end_k, de)?;
    let g_given = s.get_opt("g-end", a.g_end)?;
    let csv_path = s.get_opt::<String>("steps-csv", a.steps_csv)?;
    let entry_cap = s.get("entry-cap", a.entry_cap, MinModOptions::default().entry_cap)?;
    let enumeration_cap = s.get("enumeration-cap", a.enumeration_cap, DEFAULT_ENUMERATION_CAP)?;

    let parallel;
    let executor: &dyn RowExecutor = if ctx.workers > 1 {
        parallel = RayonExecutor::new(ctx.workers)?;
        &parallel
    } else {
        &SerialExecutor
    };
    let opts = MinModOptions { inflation: ctx.inflation, enumeration_cap, entry_cap, executor };
    let mut primes = load_primes(ctx.cache.as_deref(), end_k + 1)?;
    let before = primes.len();
    let run = run_min_modulus(&mut primes, k, phase1, end_k, &opts, |_| {})?;
    let g_end = match (run.outcome, g_given) {
        (MinModOutcome::Failed { .. }, g) => g,
        (_, Some(g)) => Some(g),
        (_, None) if end_k <= GK_MAX_INDEX => {
            let d = GkOptions::default();
            let table = compute_g(&mut primes, &[end_k], d.start, d.k_max, d.rel_precision, ctx.inflation)?;
            Some(table.rows[0].g_k)
        }
        _ => return Err(CliError::Invalid(format!("end-k {} needs --g-end", end_k))),
    };
    save_if_grown(ctx.cache.as_deref(), &primes, before)?;
    let passed = g_end.is_some_and(|g| run.verdict(g));
    if let Some(path) = csv_path {
        std::fs::write(Path::new(&path), steps_csv(&run)?)?;
    }
    match ctx.format(Format::Json) {
        Format::Csv => Ok(ctx.finish_csv("minmod", passed, steps_csv(&run)?, minmod_json(&run, g_end, passed))),
        Format::Json => Ok(ctx.finish("minmod", passed, minmod_json(&run, g_end, passed))),
    }
}

fn instance_and_schedule(
    s: &mut Settings,
    a: InstanceArgs,
) -> Result<(CoveringInstance, Vec<BigRational>), CliError> {
    let file = s.get_opt::<String>("file", a.file)?.ok_or_else(|| CliError::Invalid("--file is required".into()))?;
    let cap = s.get("residue-cap", a.residue_cap, DEFAULT_RESIDUE_CAP)?;
    let order: Option<Vec<u64>> =
        s.get_opt::<String>("prime-order", a.prime_order)?.map(|o| parse_list(&o, "prime-order")).transpose()?;
    let instance = load_instance(Path::new(&file), order.as_deref(), cap)?;
    let schedule = match s.get_opt::<String>("delta", a.delta)? {
        None => vec![BigRational::from_integer(0.into()); instance.steps()],
        Some(list) => {
            let parts: Vec<String> = parse_list(&list, "delta")?;
            let sched = parts.iter().map(|p| parse_rational(p)).collect::<Result<Vec<_>, _>>()?;
            if sched.len() != instance.steps() {
                return Err(CliError::Invalid(format!(
                    "delta has {} entries but the system has {} prime steps",
                    sched.len(),
                    instance.steps()
                )));
            }
            sched
        }
    };
    Ok((instance, schedule))
}

fn cmd_simulate(ctx: &mut Ctx, a: InstanceArgs) -> Result<Output, CliError> {
    json_only(ctx, "simulate")?;
    let (instance, schedule) = instance_and_schedule(&mut ctx.settings, a)?;
    let report = run_exact_sieve(&instance, &schedule)?;
    // whenever eta < 1 the exact density must reach the bound
    let holds = report.density_bound.is_none_or(|b| !ratio_lt_f64(&report.exact_density, b));
    let mut result = sieve_report_json(&report);
    result["density_bound_holds"] = json!(holds);
    Ok(ctx.finish("simulate", holds, result))
}

fn cmd_verify(ctx: &mut Ctx, a: VerifyArgs) -> Result<Output, CliError> {
    json_only(ctx, "verify")?;
    let s = &mut ctx.settings;
    let random_sets = s.get("random-sets", a.random_sets, 8usize)?;
    let seed = s.get("seed", a.seed, 0u64)?;
    let (instance, schedule) = instance_and_schedule(s, a.instance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = verify_sieve_lemmas(&instance, &schedule, &mut rng, random_sets)?;
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "checked": c.checked, "passed": c.passed(), "witness": c.witness}))
        .collect();
    let passed = report.all_passed();
    Ok(ctx.finish("verify", passed, json!({"checks": checks, "all_passed": passed})))
}

fn parse_lemma(name: &str) -> Result<Vec<Lemma>, CliError> {
    let all = [Lemma::NoPrimePowers, Lemma::ThreeSmoothPairs, Lemma::FiveSmoothPairs];
    if name == "all" {
        return Ok(all.to_vec());
    }
    all.into_iter()
        .find(|l| l.name() == name)
        .map(|l| vec![l])
        .ok_or_else(|| CliError::Invalid(format!("unknown lemma {:?}", name)))
}

fn maximizer_json(m: &Maximizer) -> Value {
    match &m.b {
        None => json!({"a": m.a}),
        Some(b) => json!({"a": m.a, "b": b}),
    }
}

fn lemma_json(r: &LemmaReport) -> Value {
    json!({
        "lemma": r.lemma.name(),
        "exp_cap": r.exp_cap,
        "size_cap": r.size_cap,
        "bound": rat(&r.bound),
        "max": rat(&r.max),
        "maximizers": r.maximizers.iter().map(maximizer_json).collect::<Vec<_>>(),
        "exceptions": r.exceptions.iter().map(|(m, v)| {
            let mut e = maximizer_json(m);
            e["value"] = json!(rat(v));
            e
        }).collect::<Vec<_>>(),
        "reductions": r.reductions.iter().map(|(n, h)| json!({"name": n, "holds": h})).collect::<Vec<_>>(),
        "nodes": r.nodes,
        "verdict": if r.verdict { "PASS" } else { "FAIL" },
    })
}

fn cmd_antichains(ctx: &mut Ctx, a: AntichainArgs) -> Result<Output, CliError> {
    json_only(ctx, "antichains")?;
    let s = &mut ctx.settings;
    let lemmas = parse_lemma(&s.get("lemma", a.lemma, "all".to_string())?)?;
    let (de, ds) = Lemma::NoPrimePowers.default_caps();
    let exp_cap = s.get("exp-cap", a.exp_cap, de)?;
    let size_cap = s.get("size-cap", a.size_cap, ds)?;
    let node_cap = s.get("node-cap", a.node_cap, 1_000_000_000u64)?;
    let reports = lemmas
        .into_iter()
        .map(|l| verify_lemma(l, exp_cap, size_cap, node_cap))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().all(|r| r.verdict);
    let result = if reports.len() == 1 {
        lemma_json(&reports[0])
    } else {
        json!({
            "reports": reports.iter().map(lemma_json).collect::<Vec<_>>(),
            "verdict": if passed { "PASS" } else { "FAIL" },
        })
    };
    Ok(ctx.finish("antichains", passed, result))
}

fn cmd_construct(ctx: &mut Ctx, a: ConstructArgs) -> Result<Output, CliError> {
    json_only(ctx, "construct")?;
    let s = &mut ctx.settings;
    let mode = s.get_opt::<String>("mode", a.mode)?.ok_or_else(|| CliError::Invalid("--mode is required".into()))?;
    let m = s.get("M", a.m, 2u64)?;
    let cap = s.get("residue-cap", a.residue_cap, DEFAULT_RESIDUE_CAP)?;
    let emit = s.get_opt::<String>("emit", a.emit)?;
    let result = match mode.as_str() {
        "block" => {
            let eps = s.get("eps", a.eps, 0.9)?;
            let delta = s.get_opt("delta", a.delta)?;
            let blocks = s.get_opt("blocks", a.blocks)?;
            if m < 2 {
                return Err(CliError::Invalid("M must be at least 2".into()));
            }
            let mut plan = BlockPlan::from_eps(m, eps)?;
            if let Some(d) = delta {
                plan.delta = d;
            }
            if let Some(b) = blocks {
                plan.blocks = b;
            }
            build_block_plan(&plan, cap)?
        }
        "tree" => {
            let lambda = s.get("lambda", a.lambda, 0.25)?;
            let t = s.get("t", a.t, 3.5)?;
            let n = s.get("n", a.n, 1usize)?;
            build_tree_construction(m, lambda, t, n, cap)?
        }
        other => return Err(CliError::Invalid(format!("mode must be block or tree, not {:?}", other))),
    };
    let cross = match cross_check_density(&result, cap) {
        Ok(v) => Some(v),
        Err(covering_core::Error::ResourceCap { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = emit {
        std::fs::write(Path::new(&path), pretty(&progressions_json(&result.progressions)))?;
    }
    let passed = result.passed() && cross != Some(false);
    Ok(ctx.finish("construct", passed, construction_json(&result, cross)))
}

fn cmd_certificates(ctx: &mut Ctx, a: CertificateArgs) -> Result<Output, CliError> {
    json_only(ctx, "certificates")?;
    let s = &mut ctx.settings;
    let g2 = s.get_opt("g2", a.g2)?;
    let g3 = s.get_opt("g3", a.g3)?;
    let k_max = s.get("k-max", a.k_max, GkOptions::default().k_max)?;
    let (de, ds) = Lemma::FiveSmoothPairs.default_caps();
    let exp_cap = s.get("exp-cap", a.exp_cap, de)?;
    let size_cap = s.get("size-cap", a.size_cap, ds)?;

    let mut primes = load_primes(ctx.cache.as_deref(), 0)?;
    let before = primes.len();
    let (g2, g3) = match (g2, g3) {
        (Some(a), Some(b)) => (a, b),
        (a, b) => {
            let d = GkOptions::default();
            let t = compute_g(&mut primes, &[2, 3], d.start, k_max, d.rel_precision, ctx.inflation)?;
            (a.unwrap_or(t.rows[0].g_k), b.unwrap_or(t.rows[1].g_k))
        }
    };
    let five = verify_lemma(Lemma::FiveSmoothPairs, exp_cap, size_cap, 1_000_000_000)?;
    let npp = verify_lemma(Lemma::NoPrimePowers, exp_cap, size_cap, 1_000_000_000)?;
    let inputs = SchinzelInputs {
        kappa: five.max.clone(),
        removed_bound: npp.max.clone(),
        antichains_verified: five.verdict && npp.verdict,
    };
    let certs = certificates(&mut primes, g2, g3, &inputs, ctx.inflation)?;
    save_if_grown(ctx.cache.as_deref(), &primes, before)?;
    let passed = certs.iter().all(|c| c.verdict == Verdict::Pass);
    let list: Vec<Value> = certs
        .iter()
        .map(|c| {
            let constants: serde_json::Map<String, Value> =
                c.constants.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
            json!({
                "name": c.name,
                "constants": constants,
                "comparisons": c.comparisons.iter().map(|x| json!({
                    "lhs": x.lhs, "op": x.op, "rhs": x.rhs, "holds": x.holds,
                })).collect::<Vec<_>>(),
                "verdict": if c.verdict == Verdict::Pass { "PASS" } else { "FAIL" },
            })
        })
        .collect();
    Ok(ctx.finish("certificates", passed, json!({"g2": g2, "g3": g3, "certificates": list})))
}

fn cmd_eg_sum(ctx: &mut Ctx, a: EgSumArgs) -> Result<Output, CliError> {
    json_only(ctx, "eg-sum")?;
    let s = &mut ctx.settings;
    let ns: Vec<u64> = parse_list(&s.get("n", a.n, DEFAULT_EG_LIST.to_string())?, "n")?;
    let k = s.get("K", a.k, 2.0)?;
    let eps = s.get("eps", a.eps, 1.0)?;
    let cap = s.get("cap", a.cap, DEFAULT_ENUMERATION_CAP)?;
    let bound = s.get_opt("bound", a.bound)?;
    let prime_limit = s.get("prime-limit", a.prime_limit, 10_000_000u64)?;
    let n_max = *ns.iter().max().ok_or_else(|| CliError::Invalid("no n given".into()))?;
    if ns.contains(&0) {
        return Err(CliError::Invalid("interval starts must be >= 1".into()));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(CliError::Invalid("eps must be positive".into()));
    }
    let sweep = MuIntervalSweep::new(n_max, k, eps, cap)?;
    let values = ns.iter().map(|&n| Ok(json!({"n": n, "sum": sweep.value(n)?}))).collect::<Result<Vec<_>, CliError>>()?;
    let (arg, max) = sweep.max_up_to(n_max)?;
    let constant = mu_interval_constant(k, eps, prime_limit, ctx.inflation)?;
    let limit = bound.unwrap_or(constant);
    let passed = max <= limit;
    let result = json!({
        "K": k,
        "eps": eps,
        "values": values,
        "max": {"n": arg, "sum": max},
        "constant": constant,
        "bound": limit,
    });
    Ok(ctx.finish("eg-sum", passed, result))
}
