use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

mod config;
mod demo;
mod report;
mod suites;

use config::{RunConfig, Suite, TwistSpec};
use report::{Metadata, Payload, Report, Summary, SCHEMA};
use suites::Case;
use twistlab::fock::FockSpace;
use twistlab::{npoint, sample, tensor_core::c, twist};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("resource guard: {0}")]
    Guard(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Guard(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "twistlab",
    version,
    about = "Numerical checks for twisted Fock spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites over the cases in a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Restrict to these suites (repeatable).
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Where to write the JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
    },
    /// Write ready-to-run spec files for the gallery.
    Demo {
        #[arg(long)]
        out: PathBuf,
    },
    /// Positivity levels and class tags of one twist.
    Classify {
        /// Gallery name with optional parameters, e.g. `q_flip:q=0.5,d=2`, or a
        /// path to a JSON matrix file.
        #[arg(long)]
        twist: String,
        #[arg(long, default_value_t = 5)]
        nmax: usize,
    },
    /// Per-diagram values of the 2n-point function as JSON.
    Npoint {
        #[arg(long)]
        config: PathBuf,
        /// Number of points 2n.
        #[arg(long)]
        order: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            suites,
            seed,
            out,
            quiet,
        } => run(&config, &suites, seed, out, quiet),
        Command::Demo { out } => demo::write(&out).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
            true
        }),
        Command::Classify { twist, nmax } => classify(&twist, nmax).map(|_| true),
        Command::Npoint {
            config,
            order,
            seed,
        } => npoint_values(&config, order, seed).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("twistlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Returns whether every non-informative check passed.
fn run(
    path: &Path,
    suites: &[String],
    seed: Option<u64>,
    out: Option<PathBuf>,
    quiet: bool,
) -> Result<bool, CliError> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if !suites.is_empty() {
        cfg.suites = suites
            .iter()
            .map(|s| Suite::parse(s))
            .collect::<Result<_, _>>()?;
    }
    let base = base_dir(path);
    let report = execute(&cfg, &base)?;
    if !quiet {
        report.print_summary();
    }
    // A command-line --out is not echoed into the payload, so runs that
    // differ only in where they write stay comparable.
    if let Some(out) = out.as_ref().or(cfg.out.as_ref()) {
        let target = if out.is_absolute() {
            out.clone()
        } else {
            base.join(out)
        };
        std::fs::write(&target, report.to_json())?;
    }
    Ok(report.payload.summary.failures() == 0)
}

pub(crate) fn execute(cfg: &RunConfig, base: &Path) -> Result<Report, CliError> {
    let started = Instant::now();
    let cases = cfg
        .cases
        .iter()
        .map(|spec| Case::build(spec, base))
        .collect::<Result<Vec<_>, _>>()?;
    let selected = cfg.selected_suites();
    let indexed: Vec<(usize, &Case)> = cases.iter().enumerate().collect();
    let outcomes = twistlab::par::map(&indexed, |&(i, case)| {
        suites::run_case(cfg, i, case, &selected)
    });
    let mut reports = Vec::with_capacity(outcomes.len());
    let mut timing = BTreeMap::new();
    for o in outcomes {
        let o = o?;
        reports.push(o.report);
        timing.extend(o.timing);
    }
    timing.insert("total".into(), started.elapsed().as_secs_f64() * 1e3);
    let summary = Summary::of(&reports);
    Ok(Report {
        schema: SCHEMA,
        payload: Payload {
            seed: cfg.seed,
            config: cfg.clone(),
            cases: reports,
            summary,
        },
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION"),
            parallel: twistlab::par::is_parallel(),
            timing_ms: timing,
        },
    })
}

/// `name[:key=value,...]` with keys d and q, or a `.json` matrix file.
fn parse_twist_arg(arg: &str) -> Result<TwistSpec, CliError> {
    if arg.ends_with(".json") {
        return Ok(TwistSpec {
            matrix_file: Some(PathBuf::from(arg)),
            ..TwistSpec::default()
        });
    }
    let (name, params) = arg.split_once(':').unwrap_or((arg, ""));
    let mut spec = TwistSpec {
        gallery: Some(name.to_string()),
        ..TwistSpec::default()
    };
    for kv in params.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected key=value, got '{kv}'")))?;
        let bad = |e: &dyn std::fmt::Display| CliError::Config(format!("{k}: {e}"));
        match k {
            "d" => spec.d = Some(v.parse().map_err(|e| bad(&e))?),
            "q" => spec.q = Some(v.parse().map_err(|e| bad(&e))?),
            other => {
                return Err(CliError::Config(format!(
                    "unknown twist parameter '{other}'"
                )))
            }
        }
    }
    Ok(spec)
}

fn classify(arg: &str, nmax: usize) -> Result<(), CliError> {
    let t = parse_twist_arg(arg)?.build(Path::new(""))?;
    let cl = twist::classify(&t, nmax).map_err(|e| match e {
        twistlab::Error::ResourceGuard { .. } => CliError::Guard(e.to_string()),
        other => CliError::Config(other.to_string()),
    })?;
    println!(
        "d = {}, ||T|| = {:.6}, ybe residual = {:.3e}",
        t.d(),
        t.norm(),
        t.ybe_residual()
    );
    for l in &cl.report.levels {
        println!(
            "  n = {}  min eig {:>12.6}  kernel {}",
            l.n, l.min_eigenvalue, l.kernel_dim
        );
    }
    let tags: Vec<&str> = cl.tags.iter().map(|t| t.as_str()).collect();
    println!(
        "verdict {}  tags [{}]",
        cl.report.verdict.as_str(),
        tags.join(", ")
    );
    Ok(())
}

#[derive(Serialize)]
struct DiagramValue {
    pairs: Vec<(usize, usize)>,
    crossings: usize,
    value: [f64; 2],
}

#[derive(Serialize)]
struct NpointCase {
    name: String,
    wightman: [f64; 2],
    diagrams: Vec<DiagramValue>,
}

fn npoint_values(path: &Path, order: usize, seed: Option<u64>) -> Result<(), CliError> {
    if order == 0 || order % 2 == 1 {
        return Err(CliError::Config(format!(
            "order must be a positive even number, got {order}"
        )));
    }
    let cfg = RunConfig::load(path)?;
    let seed = seed.unwrap_or(cfg.seed);
    let base = base_dir(path);
    let guard = |e: twistlab::Error| match e {
        twistlab::Error::ResourceGuard { .. } => CliError::Guard(e.to_string()),
        other => CliError::Config(other.to_string()),
    };
    let mut out = Vec::new();
    for (i, spec) in cfg.cases.iter().enumerate() {
        let case = Case::build(spec, &base)?;
        let mut rng = sample::rng(seed.wrapping_add(i as u64));
        let vectors: Vec<_> = (0..order)
            .map(|_| sample::vector(&mut rng, case.twist.d()))
            .collect();
        let fs = FockSpace::build(&case.twist, order / 2).map_err(guard)?;
        let w = npoint::wightman(&fs, &case.h, &vectors, c(0.0, 0.0)).map_err(guard)?;
        let vals =
            npoint::diagram_values(&case.twist, &case.h, &vectors, c(0.0, 0.0)).map_err(guard)?;
        out.push(NpointCase {
            name: spec.name.clone(),
            wightman: [w.re, w.im],
            diagrams: vals
                .into_iter()
                .map(|(d, v)| DiagramValue {
                    pairs: d.pairs().to_vec(),
                    crossings: d.crossing_count(),
                    value: [v.re, v.im],
                })
                .collect(),
        });
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&out).expect("serializable")
    );
    Ok(())
}
