//! The `uroe` command-line front end.
//!
//! Every invocation prints one JSON report on standard output and exits with
//! 0 (pass), 1 (fail, with at least one witness) or 2 (input error).

mod commands;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use report::{num, violation, Report, Status, Witness};

#[derive(Debug, Parser)]
#[command(
    name = "uroe",
    version,
    about = "Finite-scale checks for extended metric spaces and their operators"
)]
pub struct Cli {
    /// Indent the JSON report.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Slack for numerical comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for randomized internals. No current command draws random
    /// numbers; the value is accepted for scripting stability.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a metric, optionally as a member of the directed set over a base.
    CheckMetric {
        file: PathBuf,
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Join of two members of the directed set.
    Join {
        #[arg(long)]
        base: PathBuf,
        d1: PathBuf,
        d2: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Base metric on a subset, infinite elsewhere.
    Restrict {
        #[arg(long)]
        base: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<String>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Propagation of an operator under a metric.
    Propagation {
        operator: PathBuf,
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        max: Option<f64>,
    },
    /// Band sparsity and propagation bound certifying membership.
    Certify {
        operator: PathBuf,
        #[arg(long)]
        base: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Path metric of the support graph of an operator.
    SupportMetric {
        operator: PathBuf,
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        radius: f64,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Split an operator into diagonal-times-partial-permutation terms.
    Decompose {
        operator: PathBuf,
        #[arg(long)]
        max_terms: Option<usize>,
    },
    /// Operator norm by power iteration.
    Norm {
        operator: PathBuf,
        #[arg(long)]
        max: Option<f64>,
    },
    /// Greedy separated net.
    Net {
        metric: PathBuf,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// Greedy chain of disjoint balls of growing size.
    Clusters {
        metric: PathBuf,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        min_length: Option<usize>,
    },
    /// Check a Higson-Roe family at a scale.
    HrCheck {
        family: PathBuf,
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = f64::INFINITY)]
        support: f64,
    },
    /// Gram kernel of a family and its smallest eigenvalue.
    Gram { family: PathBuf },
    /// Schur multiplier of a family's Gram kernel applied to an operator.
    Schur {
        family: PathBuf,
        operator: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Completely positive decomposition of the Schur multiplier.
    CpDecompose {
        family: PathBuf,
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        support: f64,
        #[arg(long = "test")]
        tests: Vec<PathBuf>,
    },
    /// Deviations `‖M_k(T) − T‖` along a schedule of families.
    Converge {
        operator: PathBuf,
        #[arg(long)]
        metric: PathBuf,
        /// `R,EPS,FILE` or `R,EPS,S,FILE`.
        #[arg(long = "stage", required = true)]
        stages: Vec<String>,
    },
    /// Check that a map and its inverse form a coarse equivalence.
    CoarseCheck {
        map: PathBuf,
        #[arg(long)]
        dx: PathBuf,
        #[arg(long)]
        dy: PathBuf,
        #[arg(long)]
        surjective: bool,
        /// Also count both sides of the bounded-geometry transfer at this radius.
        #[arg(long)]
        bg_radius: Option<f64>,
    },
    /// Fiber-counting bijection on a subset and its induced conjugation.
    Morita {
        map: PathBuf,
        #[arg(long)]
        dx: PathBuf,
        #[arg(long)]
        dy: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<String>,
        #[arg(long, default_value_t = 4)]
        window: usize,
        #[arg(long)]
        out_window: Option<usize>,
        #[arg(long)]
        operator: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        nested: Option<Vec<String>>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Block permutation embedding of a finite group.
    BlockEmbed {
        /// Supplies the point set.
        metric: PathBuf,
        /// `sym:N` or `cyc:N`.
        #[arg(long)]
        group: String,
        /// `regular:ID,...` or `natural:ID,...`.
        #[arg(long = "block", required = true)]
        blocks: Vec<String>,
        #[arg(long)]
        element: Option<String>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckMetric { .. } => "check-metric",
            Command::Join { .. } => "join",
            Command::Restrict { .. } => "restrict",
            Command::Propagation { .. } => "propagation",
            Command::Certify { .. } => "certify",
            Command::SupportMetric { .. } => "support-metric",
            Command::Decompose { .. } => "decompose",
            Command::Norm { .. } => "norm",
            Command::Net { .. } => "net",
            Command::Clusters { .. } => "clusters",
            Command::HrCheck { .. } => "hr-check",
            Command::Gram { .. } => "gram",
            Command::Schur { .. } => "schur",
            Command::CpDecompose { .. } => "cp-decompose",
            Command::Converge { .. } => "converge",
            Command::CoarseCheck { .. } => "coarse-check",
            Command::Morita { .. } => "morita",
            Command::BlockEmbed { .. } => "block-embed",
        }
    }
}

/// What the process should do: exit code and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one invocation; `args` starts with the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            return Outcome {
                code: 0,
                stdout: e.to_string(),
                stderr: String::new(),
            }
        }
        Err(e) => {
            let command = args
                .iter()
                .skip(1)
                .filter_map(|a| a.to_str())
                .find(|a| !a.starts_with('-'))
                .unwrap_or_default();
            let err = crate::Error::InvalidArgument(format!("usage: {}", e.kind()));
            return Outcome {
                code: 2,
                stdout: Report::error(command, &err).render(false),
                stderr: e.render().to_string(),
            };
        }
    };
    let report = commands::execute(&cli);
    Outcome {
        code: report.status.exit_code(),
        stdout: report.render(cli.pretty),
        stderr: String::new(),
    }
}
