//! Command-line front end: build basis polynomials as JSON, run verification
//! suites as CSV reports, emit asymptotic convergence data, and run the
//! scalar identity battery.
//!
//! Exit codes: 0 on success with all assertions passing, 1 when any suite
//! assertion fails (the failing identity anchors are printed to stderr), 2 on
//! bad arguments.

use clap::{Args, Parser, Subcommand};
use qlaurent::bases::{self, Family};
use qlaurent::params::ParameterSet;
use qlaurent::precision::PrecisionBudget;
use qlaurent::report::{self, SuiteKind, SuiteOptions};
use serde::Deserialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qlaurent",
    version,
    about = "Orthogonal Laurent polynomial bases and their verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// JSON configuration: {"q": .., "t": [..], "precision": {"digits": ..,
    /// "product_eps": .., "verify_tol": ..}, "seed": ..}
    #[arg(long)]
    params: Option<PathBuf>,
    /// Override the working precision in decimal digits
    #[arg(long)]
    digits: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit one basis polynomial as JSON
    Build {
        #[command(flatten)]
        common: CommonOpts,
        /// Family: R, S, T, U, X, Y, P, Pprime
        #[arg(long)]
        family: String,
        /// Index (negative allowed for X, Y, P families)
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Run a verification suite and print its CSV report
    Verify {
        #[command(flatten)]
        common: CommonOpts,
        /// One of: cher-orthogonality, operators, recurrences, connections,
        /// sears, racah, nonsymmetric, aw-cross
        #[arg(long)]
        suite: String,
        /// Largest index exercised by the suite
        #[arg(long, default_value_t = 6)]
        max_n: u32,
        /// Truncation order for the discrete suite
        #[arg(long = "N", default_value_t = 4)]
        racah_n: u32,
        /// Truncating pair (3 or 4) for the discrete suite
        #[arg(long, default_value_t = 3)]
        pair: u8,
    },
    /// Emit large-degree convergence data as CSV
    Asymptotics {
        #[command(flatten)]
        common: CommonOpts,
        /// Family: R, S, T or U (default: all four)
        #[arg(long)]
        family: Option<String>,
        /// Unit-circle angles in radians, comma separated, or "default"
        #[arg(long, default_value = "default")]
        points: String,
        /// Degrees to evaluate, comma separated
        #[arg(long, default_value = "8,12,16,20")]
        n_list: String,
    },
    /// Run the scalar identity battery
    Selftest {
        #[command(flatten)]
        common: CommonOpts,
        /// Random instances per identity
        #[arg(long, default_value_t = 50)]
        draws: usize,
    },
}

#[derive(Deserialize, Default)]
struct PrecisionConfig {
    digits: Option<u32>,
    product_eps: Option<f64>,
    verify_tol: Option<f64>,
}

#[derive(Deserialize, Default)]
struct FileConfig {
    q: Option<f64>,
    t: Option<[f64; 4]>,
    precision: Option<PrecisionConfig>,
    seed: Option<u64>,
}

struct Resolved {
    params: ParameterSet,
    budget: PrecisionBudget,
    seed: u64,
}

fn resolve(common: &CommonOpts) -> Result<Resolved, String> {
    let file: FileConfig = match &common.params {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("bad config JSON: {e}"))?
        }
        None => FileConfig::default(),
    };
    let precision = file.precision.unwrap_or_default();
    let mut digits = precision.digits.unwrap_or(60);
    if let Ok(env_digits) = std::env::var("QLAURENT_DIGITS") {
        digits = env_digits
            .parse()
            .map_err(|e| format!("bad QLAURENT_DIGITS: {e}"))?;
    }
    if let Some(d) = common.digits {
        digits = d;
    }
    let defaults = PrecisionBudget::default();
    let budget = PrecisionBudget::new(
        digits,
        precision.product_eps.unwrap_or(defaults.product_eps()),
        defaults.quad_nodes_initial(),
        defaults.quad_max_doublings(),
        precision.verify_tol.unwrap_or(defaults.verify_tol()),
    )
    .map_err(|e| e.to_string())?;
    let q = file.q.unwrap_or(0.35);
    let t = file.t.unwrap_or([0.4, -0.3, 0.25, -0.15]);
    let params = ParameterSet::new(q, t, &budget).map_err(|e| e.to_string())?;
    Ok(Resolved {
        params,
        budget,
        seed: file.seed.unwrap_or_else(|| SuiteOptions::default().seed),
    })
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number {x:?}: {e}"))
        })
        .collect()
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<u32>()
                .map_err(|e| format!("bad integer {x:?}: {e}"))
        })
        .collect()
}

fn run() -> Result<bool, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Build { common, family, n } => {
            let r = resolve(&common)?;
            let fam = Family::parse(&family).ok_or(format!("unknown family {family:?}"))?;
            let poly = bases::build(
                bases::BasisId {
                    family: fam,
                    index: n,
                },
                &r.params,
                &r.budget,
            )
            .map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&poly.to_json()).unwrap());
            Ok(true)
        }
        Command::Verify {
            common,
            suite,
            max_n,
            racah_n,
            pair,
        } => {
            let r = resolve(&common)?;
            let kind = SuiteKind::parse(&suite).ok_or(format!(
                "unknown suite {suite:?}; expected one of {}",
                SuiteKind::ALL
                    .iter()
                    .map(|k| k.name())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))?;
            let opts = SuiteOptions {
                max_n,
                racah_n,
                racah_pair: pair,
                seed: r.seed,
                ..SuiteOptions::default()
            };
            let rows =
                report::run_suite(kind, &r.params, &r.budget, &opts).map_err(|e| e.to_string())?;
            print!("{}", report::to_csv(&rows));
            let failures = report::failures(&rows);
            for f in &failures {
                eprintln!(
                    "FAILED: {} [{}] n={:?} m={:?} residual {:e} tolerance {:e}",
                    f.anchor, f.suite, f.index_n, f.index_m, f.residual, f.tolerance
                );
            }
            Ok(failures.is_empty())
        }
        Command::Asymptotics {
            common,
            family,
            points,
            n_list,
        } => {
            let r = resolve(&common)?;
            let families = match family {
                None => vec![Family::R, Family::S, Family::T, Family::U],
                Some(f) => vec![Family::parse(&f).ok_or(format!("unknown family {f:?}"))?],
            };
            let thetas = if points == "default" {
                qlaurent::asymptotics::DEFAULT_THETAS.to_vec()
            } else {
                parse_f64_list(&points)?
            };
            let n_list = parse_u32_list(&n_list)?;
            let csv = report::asymptotics_csv(&r.params, &r.budget, &families, &thetas, &n_list)
                .map_err(|e| e.to_string())?;
            print!("{csv}");
            Ok(true)
        }
        Command::Selftest { common, draws } => {
            let r = resolve(&common)?;
            let opts = SuiteOptions {
                seed: r.seed,
                battery_draws: draws,
                ..SuiteOptions::default()
            };
            let rows = report::selftest_battery(&r.budget, &opts).map_err(|e| e.to_string())?;
            print!("{}", report::to_csv(&rows));
            let failures = report::failures(&rows);
            for f in &failures {
                eprintln!(
                    "FAILED: {} residual {:e} tolerance {:e}",
                    f.anchor, f.residual, f.tolerance
                );
            }
            Ok(failures.is_empty())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
