//! Command-line front end: `flow`, `verify` and `captable`.
//!
//! Exit codes: 0 success, 1 a verification check did not pass, 2 numerical
//! failure, 3 configuration or usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use crate::error::{CapflowError, Result};
use crate::flow::{run, FlowConfig, InitialData};
use crate::io::{fmt_f64, write_file, SCHEMA_VERSION};
use crate::mobius::CapRadius;
use crate::quermass::CapTable;
use crate::verify::{reports_json, run_suite, summary_table, CheckReport, Suite, Verdict, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// Environment variable fixing the rayon pool width.
pub const THREADS_ENV: &str = "CAPFLOW_THREADS";

#[derive(Debug, Parser)]
#[command(name = "capflow", version, about = "Curvature flows of capillary hypersurfaces in the unit ball")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output directory.
    #[arg(long, default_value = "capflow-out")]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Overrides the seed in the config file.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a flow and write its trace and summary.
    Flow {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite.
    Verify {
        /// identities, mobius, geometry, pointwise, af_main, af_thmB, af_thmC,
        /// monotonicity, limits, variational, regularization or all.
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate W_k along the cap family C_{θ,r}.
    Captable {
        #[arg(long, default_value_t = FRAC_PI_2)]
        theta: f64,
        #[arg(long)]
        n: usize,
        /// Comma-separated quermassintegral indices; all of 0..=n+1 by default.
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<usize>>,
        /// Comma-separated radii, `inf` for the flat ball; a log-spaced
        /// default grid otherwise.
        #[arg(long)]
        r: Option<String>,
        #[arg(long, default_value_t = 200)]
        n_beta: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// Flow config file: the flow parameters plus the initial surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub flow: FlowConfig,
    pub initial: InitialData,
    #[serde(default)]
    pub seed: u64,
    /// Trace format; csv unless given here or on the command line.
    #[serde(default)]
    pub format: Option<Format>,
}

pub fn exit_code(e: &CapflowError) -> i32 {
    match e {
        CapflowError::Pole { .. }
        | CapflowError::MeshQuality(_)
        | CapflowError::ConvexityLoss { .. }
        | CapflowError::Numerical(_) => EXIT_NUMERICAL,
        CapflowError::Domain(_)
        | CapflowError::Config(_)
        | CapflowError::Range(_)
        | CapflowError::Io(_)
        | CapflowError::Json(_) => EXIT_CONFIG,
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CapflowError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CapflowError::Config(format!("{}: {e}", path.display())))
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CapflowError::Config(format!("{THREADS_ENV} = {v:?} is not a positive integer")))?;
    // a second initialization in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn cmd_flow(config: &Path, common: &Common) -> Result<i32> {
    let mut cfg: RunConfig = read_json(config)?;
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.flow.validate()?;
    let grid = cfg.initial.build(cfg.flow.grid, cfg.seed)?;
    let trace = run(&cfg.flow, grid)?;
    match common.format.or(cfg.format).unwrap_or(Format::Csv) {
        Format::Csv => write_file(&common.out, "trace.csv", &trace.to_csv())?,
        Format::Json => write_file(&common.out, "trace.json", &serde_json::to_string_pretty(&trace.rows)?)?,
    }
    write_file(
        &common.out,
        "summary.json",
        &serde_json::to_string_pretty(&trace.summary_json(cfg.seed))?,
    )?;
    println!(
        "stop: {:?} after {} steps at t = {}",
        trace.stop,
        trace.steps,
        fmt_f64(trace.t_final)
    );
    if let Some(f) = &trace.failure {
        eprintln!("failure: {f}");
    }
    Ok(if trace.stop.is_failure() { EXIT_NUMERICAL } else { EXIT_OK })
}

fn reports_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("id,verdict,lhs,rhs,margin,relative_margin,tolerance,inputs_digest\n");
    for r in reports {
        let v = serde_json::to_value(r.verdict).ok();
        let v = v.as_ref().and_then(|v| v.as_str()).unwrap_or("");
        out.push_str(&format!(
            "\"{}\",{v},{},{},{},{},{},{}\n",
            r.id.replace('"', "\"\""),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.margin),
            fmt_f64(r.relative_margin),
            fmt_f64(r.tolerance),
            r.inputs_digest
        ));
    }
    out
}

fn cmd_verify(suite: &str, config: Option<&Path>, common: &Common) -> Result<i32> {
    let suite = Suite::parse(suite)?;
    let mut cfg: VerifyConfig = match config {
        Some(p) => read_json(p)?,
        None => VerifyConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    let reports = run_suite(suite, &cfg)?;
    match common.format.unwrap_or(Format::Json) {
        Format::Json => write_file(
            &common.out,
            "report.json",
            &serde_json::to_string_pretty(&reports_json(&reports))?,
        )?,
        Format::Csv => write_file(&common.out, "report.csv", &reports_csv(&reports))?,
    }
    print!("{}", summary_table(&reports));
    Ok(if reports.iter().all(|r| r.verdict == Verdict::Pass) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn parse_radii(s: &str) -> Result<Vec<CapRadius>> {
    let radii = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t {
            "inf" | "infinity" => Ok(CapRadius::Infinite),
            _ => t
                .parse::<f64>()
                .map(CapRadius::from_f64)
                .map_err(|e| CapflowError::Config(format!("bad radius {t:?}: {e}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    if radii.is_empty() {
        return Err(CapflowError::Config("empty radius grid".into()));
    }
    Ok(radii)
}

fn cmd_captable(theta: f64, n: usize, k: Option<&[usize]>, r: Option<&str>, n_beta: usize, common: &Common) -> Result<i32> {
    if n < 1 {
        return Err(CapflowError::Config("n must be at least 1".into()));
    }
    let radii = match r {
        Some(s) => parse_radii(s)?,
        None => CapTable::default_radii(),
    };
    let ks: Vec<usize> = match k {
        Some([]) => return Err(CapflowError::Config("empty k list".into())),
        Some(k) => k.to_vec(),
        None => (0..=n + 1).collect(),
    };
    if let Some(&bad) = ks.iter().find(|&&k| k > n + 1) {
        return Err(CapflowError::Config(format!("k = {bad} exceeds n + 1 = {}", n + 1)));
    }
    let table = CapTable::build(n, theta, n_beta, radii)?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => write_file(&common.out, "captable.csv", &table.to_csv(&ks)?)?,
        Format::Json => {
            let rows: Vec<_> = table
                .radii
                .iter()
                .zip(&table.values)
                .map(|(r, v)| json!({"r": r, "f": ks.iter().map(|&k| v[k]).collect::<Vec<_>>()}))
                .collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "n": n,
                "theta": theta,
                "n_beta": n_beta,
                "k": ks,
                "rows": rows,
            });
            write_file(&common.out, "captable.json", &serde_json::to_string_pretty(&doc)?)?
        }
    }
    Ok(EXIT_OK)
}

pub fn execute(cli: &Cli) -> Result<i32> {
    configure_threads()?;
    match &cli.command {
        Command::Flow { config, common } => cmd_flow(config, common),
        Command::Verify { suite, config, common } => cmd_verify(suite, config.as_deref(), common),
        Command::Captable {
            theta,
            n,
            k,
            r,
            n_beta,
            common,
        } => cmd_captable(*theta, *n, k.as_deref(), r.as_deref(), *n_beta, common),
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
