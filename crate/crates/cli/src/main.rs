//! Batch command-line front end. Every subcommand is a pure function of its
//! flags: fixed seeds, fixed 12-significant-digit float rendering, and
//! thread-count-independent folds, so identical invocations produce
//! byte-identical output.

mod manifest;
mod svg;

use clap::{Args, Parser, Subcommand};
use permlil_core::asymptotics::{
    lil_centering, lil_scale, log_expected_matchings_approx, log_expected_matchings_exact,
    log_moment_bound, refinement_factor, stirling_log_bounds, ModelParams, MomentBoundVariant,
};
use permlil_core::lil::{clt_sample, render_path_csv, run_path, ExperimentConfig};
use permlil_core::moments::{
    census_csv_rows, census_tuples, estimate_kth_moment, exhaustive_kth_moment_exact,
    verify_bound1, MomentEstimate, CENSUS_CSV_HEADER, MOMENT_CSV_HEADER,
};
use permlil_core::numeric::fmt_g12;
use permlil_core::{
    bregman_minc_log_bound, permanent_ryser, Error as CoreError, NestedMatrixStream,
    SquareBitMatrix,
};
use serde_json::{json, Map, Value};
use std::path::PathBuf;
use std::process::ExitCode;

const SEED_ENV: &str = "PERMLIL_SEED";

const EXIT_USAGE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(name = "permlil", version, about = "Exact permanents and iterated-logarithm experiments")]
struct Cli {
    /// Worker thread cap (default: available cores); output never depends on it
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// JSON config file with the same keys as the flags; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write a JSON run manifest (parameters + output checksum) to this path
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact permanent, log-permanent, and degree bound of one matrix
    Perm(PermArgs),
    /// Monte Carlo or exhaustive k-th moments of the matching count of G(n,n,m)
    Moments(MomentsArgs),
    /// Exact census of matching k-tuples with the multinomial bound check
    Census(CensusArgs),
    /// Log-permanent path along nested minors of one seeded stream
    Lil(LilArgs),
    /// Independent replicates at fixed n: deviation vs normalized edge count
    Clt(CltArgs),
    /// Closed-form expected matching counts, centering, and scale
    Expect(ExpectArgs),
    /// Counting bounds: tuple-census bound, Stirling sandwich, refinement factor
    Bounds(BoundsArgs),
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        s.parse()
    };
    parsed.map_err(|_| format!("invalid seed {s:?} (decimal or 0x-hex)"))
}

#[derive(Args)]
struct PermArgs {
    /// Matrix fixture file (first line n, then n lines of 0/1)
    matrix_file: Option<PathBuf>,
    /// Generate the input instead: dimension, edge probability, seed
    #[arg(long, num_args = 3, value_names = ["N", "P", "SEED"])]
    random: Option<Vec<String>>,
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Enumerate every graph instead of sampling
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<u32>,
}

#[derive(Args)]
struct LilArgs {
    #[arg(long, value_parser = parse_seed)]
    seed: Option<u64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Geometric dimension subsequence c, c^2, ... instead of every n
    #[arg(long)]
    subseq: Option<u64>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a self-contained SVG trajectory chart
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct CltArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long, value_parser = parse_seed)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ExpectArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    /// Bernoulli density for centering/scale (default: m/n^2)
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    a: Option<u64>,
    /// Refinement-factor step index t (with --lt)
    #[arg(long)]
    t: Option<u64>,
    /// Overlap l_t for the refinement factor
    #[arg(long)]
    lt: Option<u64>,
}

/// Config-file overlay: flags win, then JSON keys, then env/default.
struct Overlay(Map<String, Value>);

impl Overlay {
    fn load(path: &Option<PathBuf>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self(Map::new())),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", p.display())))?;
                let value: Value = serde_json::from_str(&text)
                    .map_err(|e| CliError::usage(format!("config {}: {e}", p.display())))?;
                match value {
                    Value::Object(map) => Ok(Self(map)),
                    _ => Err(CliError::usage("config file must be a JSON object".into())),
                }
            }
        }
    }

    fn u64(&self, flag: Option<u64>, key: &str) -> Option<u64> {
        flag.or_else(|| match self.0.get(key) {
            Some(Value::Number(n)) => n.as_u64(),
            Some(Value::String(s)) => parse_seed(s).ok(),
            _ => None,
        })
    }

    fn usize(&self, flag: Option<usize>, key: &str) -> Option<usize> {
        self.u64(flag.map(|v| v as u64), key).map(|v| v as usize)
    }

    fn u32(&self, flag: Option<u32>, key: &str) -> Option<u32> {
        self.u64(flag.map(|v| v as u64), key).map(|v| v as u32)
    }

    fn f64(&self, flag: Option<f64>, key: &str) -> Option<f64> {
        flag.or_else(|| self.0.get(key).and_then(Value::as_f64))
    }

    fn seed(&self, flag: Option<u64>) -> u64 {
        self.u64(flag, "seed")
            .or_else(|| std::env::var(SEED_ENV).ok().and_then(|s| parse_seed(&s).ok()))
            .unwrap_or(0)
    }
}

struct CliError {
    message: String,
    exit: u8,
}

impl CliError {
    fn usage(message: String) -> Self {
        Self { message, exit: EXIT_USAGE }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let exit = match e {
            CoreError::BudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Self { message: e.to_string(), exit }
    }
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::usage(format!("missing required value --{flag} (flag or config)")))
}

struct CmdOutput {
    /// main output, checksummed into the manifest
    text: String,
    /// resolved parameters for the manifest
    params: Value,
    /// subcommand name
    name: &'static str,
    /// destination file; stdout when None
    out: Option<PathBuf>,
    violation: bool,
}

fn run(cli: &Cli) -> Result<CmdOutput, CliError> {
    let overlay = Overlay::load(&cli.config)?;
    match &cli.cmd {
        Cmd::Perm(args) => cmd_perm(args, &overlay),
        Cmd::Moments(args) => cmd_moments(args, &overlay),
        Cmd::Census(args) => cmd_census(args, &overlay),
        Cmd::Lil(args) => cmd_lil(args, &overlay),
        Cmd::Clt(args) => cmd_clt(args, &overlay),
        Cmd::Expect(args) => cmd_expect(args, &overlay),
        Cmd::Bounds(args) => cmd_bounds(args, &overlay),
    }
}

fn cmd_perm(args: &PermArgs, _overlay: &Overlay) -> Result<CmdOutput, CliError> {
    let (matrix, source) = match (&args.matrix_file, &args.random) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            (SquareBitMatrix::parse_text(&text)?, json!(path.display().to_string()))
        }
        (None, Some(spec)) => {
            let n: usize = spec[0]
                .parse()
                .map_err(|_| CliError::usage(format!("invalid dimension {:?}", spec[0])))?;
            let p: f64 = spec[1]
                .parse()
                .map_err(|_| CliError::usage(format!("invalid probability {:?}", spec[1])))?;
            let seed = parse_seed(&spec[2]).map_err(CliError::usage)?;
            let m = NestedMatrixStream::new(seed, p).minor(n)?;
            (m, json!({"n": n, "p": p, "seed": seed}))
        }
        _ => {
            return Err(CliError::usage(
                "provide exactly one input: a matrix file or --random N P SEED".into(),
            ))
        }
    };
    let per = permanent_ryser(&matrix)?;
    let log_per = per.ln();
    let bound = bregman_minc_log_bound(&matrix);
    let text = format!(
        "n: {}\npermanent: {}\nlog_permanent: {}\nbregman_minc_log_bound: {}\nengine: ryser\n",
        matrix.n(),
        per.to_decimal(),
        log_per.map(fmt_g12).unwrap_or_else(|| "absent".into()),
        fmt_g12(bound),
    );
    Ok(CmdOutput {
        text,
        params: json!({"input": source}),
        name: "perm",
        out: None,
        violation: false,
    })
}

fn cmd_moments(args: &MomentsArgs, overlay: &Overlay) -> Result<CmdOutput, CliError> {
    let n = require(overlay.usize(args.n, "n"), "n")?;
    let m = require(overlay.usize(args.m, "m"), "m")?;
    let k = require(overlay.u32(args.k, "k"), "k")?;
    let seed = overlay.seed(args.seed);
    let exhaustive = args.exhaustive || overlay.0.get("exhaustive").and_then(Value::as_bool) == Some(true);

    let estimate = if exhaustive {
        let exact = exhaustive_kth_moment_exact(n, m, k)?;
        use permlil_core::numeric::ln_biguint;
        let log_mean = if exact.numer().magnitude().bits() == 0 {
            f64::NEG_INFINITY
        } else {
            ln_biguint(exact.numer().magnitude()).unwrap()
                - ln_biguint(exact.denom().magnitude()).unwrap()
        };
        MomentEstimate {
            n,
            m,
            k,
            log_mean,
            stderr: 0.0,
            replicates: 0,
            seed,
        }
    } else {
        let reps = require(overlay.u64(args.reps, "reps"), "reps")?;
        estimate_kth_moment(n, m, k, reps, seed)?
    };

    // ratio of the estimate to (E X)^k from the closed form
    let log_ratio = log_expected_matchings_exact(ModelParams::new(n as u64, m as u64))
        .map(|log_ex| estimate.log_mean - k as f64 * log_ex);
    let mut text = format!("{MOMENT_CSV_HEADER},log_ratio\n");
    text.push_str(&permlil_core::moments::moment_csv_row(&estimate));
    text.push(',');
    text.push_str(&log_ratio.map(fmt_g12).unwrap_or_default());
    text.push('\n');

    Ok(CmdOutput {
        text,
        params: json!({"n": n, "m": m, "k": k, "seed": seed, "exhaustive": exhaustive,
                       "replicates": estimate.replicates}),
        name: "moments",
        out: None,
        violation: false,
    })
}

fn cmd_census(args: &CensusArgs, overlay: &Overlay) -> Result<CmdOutput, CliError> {
    let n = require(overlay.usize(args.n, "n"), "n")?;
    let k = require(overlay.u32(args.k, "k"), "k")?;
    let census = census_tuples(n, k)?;
    let report = verify_bound1(&census)?;
    let mut text = format!("{CENSUS_CSV_HEADER}\n");
    for row in census_csv_rows(&report) {
        text.push_str(&row);
        text.push('\n');
    }
    Ok(CmdOutput {
        text,
        params: json!({"n": n, "k": k}),
        name: "census",
        out: None,
        violation: !report.ok,
    })
}

fn cmd_lil(args: &LilArgs, overlay: &Overlay) -> Result<CmdOutput, CliError> {
    let seed = overlay.seed(args.seed);
    let p = overlay.f64(args.p, "p").unwrap_or(0.5);
    let n_min = overlay.usize(args.n_min, "n-min").unwrap_or(1);
    let n_max = require(overlay.usize(args.n_max, "n-max"), "n-max")?;
    let subseq = overlay.u64(args.subseq, "subseq");

    let config = match subseq {
        Some(c) => ExperimentConfig::geometric(seed, p, c, n_min, n_max)?,
        None => ExperimentConfig::new(seed, p, (n_min..=n_max).collect())?,
    };
    let path = run_path(&config)?;
    let text = render_path_csv(seed, p, &path);

    if let Some(svg_path) = &args.svg {
        let chart = svg::trajectory_chart(&path);
        std::fs::write(svg_path, chart)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", svg_path.display())))?;
    }

    Ok(CmdOutput {
        text,
        params: json!({"seed": seed, "p": p, "n_min": n_min, "n_max": n_max,
                       "subseq": subseq, "dims": config.dims}),
        name: "lil",
        out: args.out.clone(),
        violation: false,
    })
}

fn cmd_clt(args: &CltArgs, overlay: &Overlay) -> Result<CmdOutput, CliError> {
    let n = require(overlay.usize(args.n, "n"), "n")?;
    let p = overlay.f64(args.p, "p").unwrap_or(0.5);
    let reps = require(overlay.u64(args.reps, "reps"), "reps")?;
    let seed = overlay.seed(args.seed);
    let sample = clt_sample(n, p, reps, seed)?;

    let mut text = String::from("replicate,deviation,e_star\n");
    for pt in &sample.points {
        text.push_str(&format!(
            "{},{},{}\n",
            pt.replicate,
            pt.deviation.map(fmt_g12).unwrap_or_default(),
            fmt_g12(pt.e_star),
        ));
    }
    if let (Some(corr), Some(ks)) = (sample.correlation, sample.ks_e_star) {
        text.push_str(&format!(
            "# summary correlation={} ks_e_star={}\n",
            fmt_g12(corr),
            fmt_g12(ks)
        ));
    }
    Ok(CmdOutput {
        text,
        params: json!({"n": n, "p": p, "reps": reps, "seed": seed}),
        name: "clt",
        out: None,
        violation: false,
    })
}

fn cmd_expect(args: &ExpectArgs, overlay: &Overlay) -> Result<CmdOutput, CliError> {
    let n = require(overlay.u64(args.n, "n"), "n")?;
    let m = require(overlay.u64(args.m, "m"), "m")?;
    let params = ModelParams::new(n, m);
    let p = overlay.f64(args.p, "p").unwrap_or_else(|| params.p_m());
    let absent = || "absent".to_string();
    let text = format!(
        "n: {n}\nm: {m}\np_m: {}\nlog_expected_exact: {}\nlog_expected_approx: {}\nlil_centering: {}\nlil_scale: {}\n",
        fmt_g12(params.p_m()),
        log_expected_matchings_exact(params).map(fmt_g12).unwrap_or_else(absent),
        fmt_g12(log_expected_matchings_approx(params)),
        fmt_g12(lil_centering(n, p)),
        lil_scale(n, p).map(fmt_g12).unwrap_or_else(absent),
    );
    Ok(CmdOutput {
        text,
        params: json!({"n": n, "m": m, "p": p}),
        name: "expect",
        out: None,
        violation: false,
    })
}

fn cmd_bounds(args: &BoundsArgs, overlay: &Overlay) -> Result<CmdOutput, CliError> {
    let n = require(overlay.u64(args.n, "n"), "n")?;
    let k = require(overlay.u64(args.k, "k"), "k")?;
    let a = require(overlay.u64(args.a, "a"), "a")?;
    let t = overlay.u64(args.t, "t");
    let lt = overlay.u64(args.lt, "lt");

    let basic = log_moment_bound(n, k, a, MomentBoundVariant::Basic)?;
    let refined = log_moment_bound(n, k, a, MomentBoundVariant::Refined)
        .map(fmt_g12)
        .unwrap_or_else(|e| format!("unavailable ({e})"));
    let (st_lo, st_hi) = stirling_log_bounds(n);
    let mut text = format!(
        "n: {n}\nk: {k}\na: {a}\nlog_moment_bound_basic: {}\nlog_moment_bound_refined: {}\nstirling_lower: {}\nstirling_upper: {}\n",
        fmt_g12(basic),
        refined,
        fmt_g12(st_lo),
        fmt_g12(st_hi),
    );
    if let Some(t) = t {
        let l_t = lt.unwrap_or(0);
        let rf = refinement_factor(n, k, a, t, l_t)
            .map(fmt_g12)
            .unwrap_or_else(|e| format!("unavailable ({e})"));
        text.push_str(&format!("refinement_factor(t={t},l_t={l_t}): {rf}\n"));
    }
    Ok(CmdOutput {
        text,
        params: json!({"n": n, "k": k, "a": a, "t": t, "lt": lt}),
        name: "bounds",
        out: None,
        violation: false,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are success paths
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if let Some(threads) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized; --threads ignored");
        }
    }

    match run(&cli) {
        Ok(result) => {
            match &result.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &result.text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(EXIT_USAGE);
                    }
                }
                None => print!("{}", result.text),
            }
            if let Some(path) = &cli.manifest {
                if let Err(e) = manifest::write(path, result.name, &result.params, &result.text) {
                    eprintln!("error: cannot write manifest: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            }
            if result.violation {
                eprintln!("error: bound violated; see report rows");
                return ExitCode::from(EXIT_VIOLATION);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit)
        }
    }
}
