use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub const VERSION: &str = concat!("engine ", env!("CARGO_PKG_VERSION"), ", schema 1");

#[derive(Debug, Parser)]
#[command(name = "blindspot", version = VERSION, about = "Ontological blind-spot analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Write the result here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Pair {
    #[arg(long)]
    pub ideal: PathBuf,
    #[arg(long)]
    pub actual: PathBuf,
}

/// Analysis settings. Flags override `--config`, which overrides defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// AnalysisConfig JSON file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub eps_dom: Option<f64>,
    #[arg(long)]
    pub eps_str: Option<f64>,
    #[arg(long)]
    pub eps_wt: Option<f64>,
    #[arg(long)]
    pub eps_act: Option<f64>,
    #[arg(long)]
    pub theta_mono: Option<f64>,
    #[arg(long)]
    pub eps_mono: Option<f64>,
    #[arg(long)]
    pub eps_chain: Option<f64>,
    #[arg(long)]
    pub theta_res: Option<f64>,
    /// Remediation budget.
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub max_path_len: Option<usize>,
    /// Resilience balance smoothing.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Fixed severity bound instead of the computed one.
    #[arg(long)]
    pub sigma_max: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PatternInputs {
    /// Shock JSON file; enables the resonance detector.
    #[arg(long)]
    pub shock: Option<PathBuf>,
    /// InvestmentHistory JSON file (empty history when absent).
    #[arg(long)]
    pub invest: Option<PathBuf>,
    /// Current time in years; defaults to the actual ontology's `age`
    /// background feature.
    #[arg(long)]
    pub tau_now: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check ontology invariants.
    Validate {
        #[arg(long)]
        ontology: PathBuf,
        /// Also require the ideal-side fields (phi, edge weight and rho).
        #[arg(long)]
        ideal: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Blind spot of the actual ontology relative to the ideal.
    Diff {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        out: Output,
    },
    /// Blind-spot severity and its bound.
    Severity {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Blind-spot taxonomy (types I to IV).
    Classify {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Failure-pattern detectors.
    Patterns {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        inputs: PatternInputs,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Resilience score with its three factors.
    Resilience {
        #[command(flatten)]
        pair: Pair,
        /// InvestmentHistory JSON file for the switch cost.
        #[arg(long)]
        invest: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Validate a case file and print its edge index and coverage.
    Ingest {
        #[arg(long)]
        cases: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Estimate an ideal ontology from similar cases.
    IdealBuild {
        #[arg(long)]
        cases: PathBuf,
        /// JSON object of background features.
        #[arg(long)]
        background: Option<PathBuf>,
        #[arg(long)]
        stage_label: String,
        #[arg(long, default_value_t = 0.0)]
        min_similarity: f64,
        /// JSON list of {dimension, id, phi} overriding the default phi of 1.
        #[arg(long)]
        node_meta: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Edge criticality from a case file.
    Rho {
        #[arg(long)]
        cases: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Synthetic sample-efficiency experiment.
    SimEfficiency(SimArgs),
    /// Full pipeline in one document.
    Report {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        inputs: PatternInputs,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    /// SimConfig JSON file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub ds: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub patterns: Option<usize>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub separation: Option<f64>,
    /// Comma-separated seeds or a half-open range `a..b`.
    #[arg(long, value_parser = parse_seeds)]
    pub seeds: Option<Seeds>,
    #[arg(long)]
    pub eval_size: Option<usize>,
    /// Run the sample-size sweep.
    #[arg(long)]
    pub sweep: bool,
    /// Comma-separated sweep grid (implies --sweep).
    #[arg(long, value_delimiter = ',')]
    pub sweep_grid: Option<Vec<usize>>,
    #[arg(long)]
    pub sweep_seeds: Option<usize>,
    #[arg(long)]
    pub target: Option<f64>,
    /// Write the sweep as CSV (implies --sweep).
    #[arg(long)]
    pub sweep_csv: Option<PathBuf>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seeds(pub Vec<u64>);

pub fn parse_seeds(s: &str) -> Result<Seeds, String> {
    let bad = |e: std::num::ParseIntError| e.to_string();
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (
            a.trim().parse().map_err(bad)?,
            b.trim().parse().map_err(bad)?,
        );
        if a >= b {
            return Err(format!("empty seed range {s}"));
        }
        return Ok(Seeds((a..b).collect()));
    }
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(bad))
        .collect::<Result<Vec<_>, _>>()
        .map(Seeds)
}
