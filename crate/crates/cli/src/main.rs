//! `nibble`: generate instances, check hypotheses, run the matching
//! pipeline and its applications, run the concentration lab, and re-verify
//! reports.
//!
//! Exit codes: 0 success, 1 a report failed verification, 2 a hypothesis
//! check failed under `--strict`, 3 retries exhausted, 4 bad input or I/O.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nibble::matcher::{Overrides, DEFAULT_RETRIES};

#[derive(Debug, Parser)]
#[command(
    name = "nibble",
    version,
    about = "Pseudorandom almost-perfect hypergraph matchings"
)]
pub struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "NIBBLE_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an instance in HGR format.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Output path; stdout when absent.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Evaluate the hypotheses of the matching theorem on an instance.
    Check {
        #[arg(short, long)]
        instance: PathBuf,
        /// Weight function files; ω ≡ 1 when none are given.
        #[arg(short, long)]
        weights: Vec<PathBuf>,
        #[command(flatten)]
        theorem: TheoremArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Exit with status 2 if any hypothesis fails.
        #[arg(long)]
        strict: bool,
    },
    /// Run the matching pipeline and write a report.
    Match {
        #[arg(short, long)]
        instance: PathBuf,
        /// Weight function files; ω ≡ 1 when none are given.
        #[arg(short, long)]
        weights: Vec<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Approximate (n, k, t)-Steiner system with subgraph counts.
    Steiner {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        t: usize,
        /// JSON list of patterns, each a list of k-element edges.
        #[arg(long)]
        patterns: Option<PathBuf>,
        /// Disjoint block pairs carrying the sampled pair weight.
        #[arg(long, default_value_t = nibble::applications::runs::DEFAULT_PAIR_SAMPLES)]
        pair_samples: usize,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rainbow matching in a Latin square or a coloured bipartite graph.
    Rainbow {
        #[arg(long, required_unless_present = "colours")]
        n: Option<usize>,
        #[arg(long, value_enum, default_value_t = LatinArg::Cyclic)]
        kind: LatinArg,
        /// Coloured graph file as written by `gen latin`.
        #[arg(long, conflicts_with = "n")]
        colours: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample ω(E_α) under random labellings and compare with the bound.
    Lab {
        /// A lab configuration; all shipped configurations when absent.
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Exit with status 2 if a mean or tail check fails.
        #[arg(long)]
        strict: bool,
    },
    /// Re-check every claim of a report.
    Verify {
        #[arg(short, long)]
        report: PathBuf,
        /// The instance, for reports written by `match`.
        #[arg(short, long)]
        instance: Option<PathBuf>,
        /// The weight files given to `match`.
        #[arg(short, long)]
        weights: Vec<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    /// Uniformly random r-graph with a codegree cap.
    #[command(name = "random-r-graph", alias = "random")]
    Random {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        codegree: usize,
        #[arg(long, default_value_t = nibble::rng::DEFAULT_SEED)]
        seed: u64,
    },
    /// Random r-graph with every degree close to d.
    #[command(name = "near-regular")]
    NearRegular {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        codegree: usize,
        #[arg(long, default_value_t = nibble::rng::DEFAULT_SEED)]
        seed: u64,
    },
    /// The hypergraph whose matchings are partial (n, k, t)-Steiner systems.
    Steiner { n: usize, k: usize, t: usize },
    /// Rainbow hypergraph of a Latin square; also writes `<output>.colours.json`.
    Latin {
        n: usize,
        #[arg(value_enum, default_value_t = LatinArg::Cyclic)]
        kind: LatinArg,
        #[arg(long, default_value_t = nibble::rng::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatinArg {
    Cyclic,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct TheoremArgs {
    /// Codegree exponent δ in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    /// Degree parameter Δ; the maximum degree when absent.
    #[arg(long = "Delta")]
    pub big_delta: Option<f64>,
    /// Largest tuple arity L; the largest weight arity when absent.
    #[arg(long = "L")]
    pub arity: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub theorem: TheoremArgs,
    /// Number of vertex parts.
    #[arg(long)]
    pub p: Option<usize>,
    /// Number of edge slices per part.
    #[arg(long)]
    pub q: Option<usize>,
    /// Relative tolerance of the partition checks.
    #[arg(long)]
    pub slack: Option<f64>,
    /// Relative tolerance of ω(M) against its target.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, default_value_t = nibble::rng::DEFAULT_SEED)]
    pub seed: u64,
    /// Resamples allowed per step after the first attempt.
    #[arg(long, default_value_t = DEFAULT_RETRIES)]
    pub retries: usize,
    /// Local-search budget per slice decomposition.
    #[arg(long)]
    pub effort: Option<u64>,
    /// Exit with status 2 if a hypothesis of the theorem fails.
    #[arg(long)]
    pub strict: bool,
}

impl PipelineArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            delta: self.theorem.big_delta,
            p: self.p,
            q: self.q,
            slack: self.slack,
            tolerance: self.tolerance,
            retries: Some(self.retries),
            effort: self.effort,
            seed: Some(self.seed),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot start {threads} worker threads: {e}");
            return ExitCode::from(4);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{failure}");
            ExitCode::from(failure.code())
        }
    }
}
