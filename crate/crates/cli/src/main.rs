//! schottky: command-line front end for the core library.
//!
//! Every subcommand emits one JSON document (limit-set emits CSV) to
//! stdout or to --out. Exit codes are stable: 2 for configuration and
//! parse problems, 3 for mathematical precondition failures, 4 for
//! resource guardrails, 1 otherwise. Identical invocations produce
//! byte-identical output; the inner parallelism of the exact theta
//! enumerations honors RAYON_NUM_THREADS.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde_json::Value;

mod io;
mod jobs;

use jobs::Mode;

#[derive(Parser)]
#[command(name = "schottky", version, about = "Schottky uniformization toolkit: numeric and exact period matrices, Tate q-series, theta expansions")]
struct Cli {
    /// Write the document to this path instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tate curve coefficient series a4(q), a6(q)
    TateSeries {
        #[arg(long, default_value_t = 50)]
        order: i64,
    },
    /// Verify the Tate parametrization satisfies its cubic through a q-order
    TateVerify {
        #[arg(long, default_value_t = 8)]
        order: u32,
    },
    /// Normalized Eisenstein series of an even weight >= 4
    Eisenstein {
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value_t = 20)]
        order: i64,
    },
    /// The modular j-invariant, scaled to the integral 1728 j expansion
    JInvariant {
        #[arg(long, default_value_t = 10)]
        order: i64,
    },
    /// Run the sigma7, four-squares, and mod-23 trichotomy checks
    Identities {
        #[arg(long, default_value_t = 200)]
        n_max: u64,
        #[arg(long, default_value_t = 500)]
        p_max: u64,
    },
    /// Product of all even theta constants of a degree
    ThetaProduct {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        max_trace: i64,
    },
    /// Degree-g theta series of the half-integral lattice L_dim (or copies)
    LatticeTheta {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long)]
        g: usize,
        #[arg(long)]
        max_trace: i64,
    },
    /// Schottky's degree-4 cusp form J = (4/315)(theta(L8+L8) - theta(L16))
    SchottkyJ {
        #[arg(long, default_value_t = 1)]
        max_trace: i64,
        #[arg(long)]
        allow_large: bool,
    },
    /// Restrict a Fourier expansion to the degree g-1 boundary stratum
    BoundaryRestrict {
        #[arg(long)]
        form: PathBuf,
    },
    /// Multiplicative and additive period matrices of a numeric group
    PeriodsNumeric {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// Disk-disjointness and contraction certificate of a numeric group
    ConvergenceCert {
        #[arg(long)]
        group: PathBuf,
    },
    /// Contour integrals of the holomorphic differentials over every circle
    DifferentialsCheck {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 256)]
        nodes: usize,
    },
    /// Sample the limit set by orbiting fixed points; emits CSV
    LimitSet {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Universal period table over formal multipliers y_1..y_g
    PeriodsUniversal {
        #[arg(long)]
        g: usize,
        #[arg(long, default_value_t = 1)]
        degree: u32,
        #[arg(long, value_enum)]
        mode: Mode,
        /// 2g comma-separated rationals (evaluated mode)
        #[arg(long)]
        points: Option<String>,
        #[arg(long)]
        allow_large: bool,
    },
    /// Universal period table on the hyperelliptic locus x_-k = -x_k
    PeriodsHyperelliptic {
        #[arg(long)]
        g: usize,
        #[arg(long, default_value_t = 1)]
        degree: u32,
        #[arg(long, value_enum)]
        mode: Mode,
        /// g comma-separated rationals (evaluated mode)
        #[arg(long)]
        points: Option<String>,
        #[arg(long)]
        allow_large: bool,
    },
    /// Substitute universal periods into a Fourier expansion, report zeroness
    SchottkyCheck {
        #[arg(long)]
        form: PathBuf,
        #[arg(long, default_value_t = 1)]
        degree: u32,
        #[arg(long)]
        hyperelliptic: bool,
        /// A count of generated point sets, or explicit sets "1,2,4;1,3,9"
        #[arg(long, default_value = "3")]
        points: String,
        #[arg(long)]
        allow_large: bool,
    },
    /// Evaluate the lowest-trace layer of an expansion at the cross-ratios
    LowestTerm {
        #[arg(long)]
        form: PathBuf,
        /// Diagonal of the minimal layer, comma-separated: "2,2,2"
        #[arg(long)]
        layer: String,
        /// Exact rational-function sums in symbolic mode are minutes-slow
        /// at genus 3 (no polynomial GCD); evaluated mode is the fast route
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        hyperelliptic: bool,
        #[arg(long, default_value = "3")]
        points: String,
    },
}

enum Output {
    Json(Value),
    Text(String),
}

fn run(cli: &Cli) -> Result<Output> {
    Ok(match &cli.command {
        Command::TateSeries { order } => Output::Json(jobs::tate_series(*order)?),
        Command::TateVerify { order } => Output::Json(jobs::tate_verify(*order)?),
        Command::Eisenstein { weight, order } => Output::Json(jobs::eisenstein(*weight, *order)?),
        Command::JInvariant { order } => Output::Json(jobs::j_invariant(*order)?),
        Command::Identities { n_max, p_max } => Output::Json(jobs::identities(*n_max, *p_max)?),
        Command::ThetaProduct { g, max_trace } => {
            Output::Json(jobs::theta_product(*g, *max_trace)?)
        }
        Command::LatticeTheta {
            dim,
            copies,
            g,
            max_trace,
        } => Output::Json(jobs::lattice_theta(*dim, *copies, *g, *max_trace)?),
        Command::SchottkyJ {
            max_trace,
            allow_large,
        } => Output::Json(jobs::schottky_j(*max_trace, *allow_large)?),
        Command::BoundaryRestrict { form } => Output::Json(jobs::boundary_restrict(form)?),
        Command::PeriodsNumeric { group, n } => Output::Json(jobs::periods_numeric(group, *n)?),
        Command::ConvergenceCert { group } => Output::Json(jobs::convergence_cert(group)?),
        Command::DifferentialsCheck { group, n, nodes } => {
            Output::Json(jobs::differentials_check(group, *n, *nodes)?)
        }
        Command::LimitSet { group, depth } => Output::Text(jobs::limit_set(group, *depth)?),
        Command::PeriodsUniversal {
            g,
            degree,
            mode,
            points,
            allow_large,
        } => Output::Json(jobs::periods_universal(
            *g,
            *degree,
            *mode,
            points.as_deref(),
            *allow_large,
        )?),
        Command::PeriodsHyperelliptic {
            g,
            degree,
            mode,
            points,
            allow_large,
        } => Output::Json(jobs::periods_hyperelliptic(
            *g,
            *degree,
            *mode,
            points.as_deref(),
            *allow_large,
        )?),
        Command::SchottkyCheck {
            form,
            degree,
            hyperelliptic,
            points,
            allow_large,
        } => Output::Json(jobs::schottky_check(
            form,
            *degree,
            *hyperelliptic,
            points,
            *allow_large,
        )?),
        Command::LowestTerm {
            form,
            layer,
            mode,
            hyperelliptic,
            points,
        } => Output::Json(jobs::lowest_term(
            form,
            layer,
            *mode,
            *hyperelliptic,
            points,
        )?),
    })
}

/// 2: configuration or parse problem; 3: mathematical precondition;
/// 4: resource guardrail; 1: anything else.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<schottky_core::Error>() {
            return match core {
                schottky_core::Error::ResourceGuard(_) => 4,
                schottky_core::Error::Parse(_) => 2,
                _ => 3,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some()
            || cause.downcast_ref::<serde_json::Error>().is_some()
        {
            return 2;
        }
    }
    1
}

fn emit(cli: &Cli, output: Output) -> Result<()> {
    let text = match output {
        Output::Json(doc) => {
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s
        }
        Output::Text(s) => s,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|output| emit(&cli, output)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
