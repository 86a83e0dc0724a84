//! File formats and the command-line frontend for `blindspot-core`.
//!
//! Every document is UTF-8 JSON with object keys in sorted order, so
//! identical inputs give byte-identical outputs.

pub mod args;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use blindspot_core::cases::{build_ideal, Background, CaseDatabase, CaseFile, RhoTable};
use blindspot_core::config::{AnalysisConfig, SigmaMaxPolicy};
use blindspot_core::diff::diff;
use blindspot_core::ontology::{validate, validate_ideal, ValidationReport};
use blindspot_core::patterns::{InvestmentHistory, PatternKind, Shock};
use blindspot_core::pipeline::{
    analyze, dominant_switch_cost, scan_patterns, severity_with_policy, AnalysisReport, Context,
};
use blindspot_core::resilience::resilience;
use blindspot_core::sim::{efficiency_experiment, SimConfig, SweepConfig};
use blindspot_core::taxonomy::classify;
use blindspot_core::{DimensionId, Ontology, ENGINE_VERSION, SCHEMA_VERSION};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::args::{Command, ConfigArgs, Output, Pair, PatternInputs, SimArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] blindspot_core::Error),
    /// Data was written but describes a failure (e.g. validation violations).
    #[error("{0}")]
    Rejected(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_owned(),
        source,
    })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn emit<T: Serialize>(value: &T, out: &Output) -> Result<()> {
    let label = out
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("<stdout>"));
    let text = to_canonical_json(value).map_err(|source| CliError::Json {
        path: label.clone(),
        source,
    })?;
    let io_err = |source| CliError::Io {
        path: label.clone(),
        source,
    };
    match &out.output {
        Some(p) => fs::write(p, text).map_err(io_err),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(io_err),
    }
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

/// Defaults, then the config file, then individual flags.
pub fn effective_config(a: &ConfigArgs) -> Result<AnalysisConfig> {
    let mut c: AnalysisConfig = match &a.config {
        Some(p) => read_json(p)?,
        None => AnalysisConfig::default(),
    };
    let t = &mut c.taxonomy;
    let p = &mut c.patterns;
    let set = |dst: &mut f64, src: Option<f64>| {
        if let Some(v) = src {
            *dst = v;
        }
    };
    set(&mut t.eps_dom, a.eps_dom);
    set(&mut t.eps_str, a.eps_str);
    set(&mut t.eps_wt, a.eps_wt);
    set(&mut t.eps_act, a.eps_act);
    set(&mut p.theta_mono, a.theta_mono);
    set(&mut p.eps_mono, a.eps_mono);
    set(&mut p.eps_chain, a.eps_chain);
    set(&mut p.theta_res, a.theta_res);
    set(&mut p.omega_budget, a.omega);
    set(&mut p.alpha, a.alpha);
    set(&mut p.beta, a.beta);
    set(&mut p.gamma, a.gamma);
    set(&mut c.epsilon, a.epsilon);
    if let Some(n) = a.max_path_len {
        c.patterns.max_path_len = n;
    }
    if let Some(v) = a.sigma_max {
        c.sigma_max = SigmaMaxPolicy::Override(v);
    }
    c.check()?;
    Ok(c)
}

fn read_pair(p: &Pair) -> Result<(Ontology, Ontology)> {
    Ok((read_json(&p.ideal)?, read_json(&p.actual)?))
}

struct LoadedInputs {
    shock: Option<Shock>,
    investments: Option<InvestmentHistory>,
    tau_now: Option<f64>,
}

impl LoadedInputs {
    fn load(i: &PatternInputs, actual: &Ontology) -> Result<Self> {
        let shock = i.shock.as_deref().map(read_json).transpose()?;
        let investments = i.invest.as_deref().map(read_json).transpose()?;
        let tau_now = i.tau_now.or_else(|| actual.background.get("age").copied());
        if tau_now.is_none() {
            warn("no --tau-now and no `age` background feature; window-closure detection skipped");
        }
        if shock.is_none() {
            warn("no --shock; resonance detection skipped");
        }
        Ok(LoadedInputs {
            shock,
            investments,
            tau_now,
        })
    }

    fn context(&self) -> Context<'_> {
        Context {
            shock: self.shock.as_ref(),
            investments: self.investments.as_ref(),
            tau_now: self.tau_now,
        }
    }
}

/// The `report` document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub engine_version: String,
    pub schema_version: String,
    pub analysis: AnalysisReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexEntry {
    pub dimension: DimensionId,
    pub source: String,
    pub target: String,
    pub cases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageCell {
    pub stage_label: String,
    pub pattern_label: Option<PatternKind>,
    pub count: usize,
}

/// The `ingest` document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestSummary {
    pub case_count: usize,
    pub index: Vec<IndexEntry>,
    pub coverage: Vec<CoverageCell>,
}

impl IngestSummary {
    pub fn new(db: &CaseDatabase) -> Self {
        IngestSummary {
            case_count: db.len(),
            index: db
                .index()
                .iter()
                .map(|(e, ids)| IndexEntry {
                    dimension: e.dimension.clone(),
                    source: e.source.clone(),
                    target: e.target.clone(),
                    cases: ids.iter().cloned().collect(),
                })
                .collect(),
            coverage: db
                .coverage()
                .into_iter()
                .map(|((stage_label, pattern_label), count)| CoverageCell {
                    stage_label,
                    pattern_label,
                    count,
                })
                .collect(),
        }
    }
}

/// One entry of an `ideal-build --node-meta` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiOverride {
    pub dimension: DimensionId,
    pub id: String,
    pub phi: f64,
}

fn load_db(path: &Path) -> Result<CaseDatabase> {
    let file: CaseFile = read_json(path)?;
    Ok(CaseDatabase::new(file.cases)?)
}

fn sim_config(a: &SimArgs) -> Result<SimConfig> {
    let mut c: SimConfig = match &a.config {
        Some(p) => read_json(p)?,
        None => SimConfig::default(),
    };
    macro_rules! set {
        ($($field:ident <- $flag:expr),* $(,)?) => {
            $(if let Some(v) = $flag.clone() { c.$field = v; })*
        };
    }
    set!(
        m_dim <- a.m,
        ds_dim <- a.ds,
        n_samples <- a.n,
        n_patterns <- a.patterns,
        noise_sigma <- a.noise,
        center_separation <- a.separation,
        eval_size <- a.eval_size,
    );
    if let Some(s) = &a.seeds {
        c.seeds = s.0.clone();
    }
    let wants_sweep = a.sweep
        || a.sweep_grid.is_some()
        || a.sweep_seeds.is_some()
        || a.target.is_some()
        || a.sweep_csv.is_some();
    if wants_sweep {
        let s = c.sweep.get_or_insert_with(SweepConfig::default);
        if let Some(g) = &a.sweep_grid {
            s.grid = g.clone();
        }
        if let Some(n) = a.sweep_seeds {
            s.seeds = n;
        }
        if let Some(t) = a.target {
            s.target_utility = t;
        }
    }
    c.check()?;
    Ok(c)
}

/// Runs one subcommand.
pub fn run(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Validate {
            ontology,
            ideal,
            out,
        } => {
            let o: Ontology = read_json(ontology)?;
            let report: ValidationReport = if *ideal {
                validate_ideal(&o)
            } else {
                validate(&o)
            };
            emit(&report, out)?;
            if !report.is_valid() {
                return Err(CliError::Rejected(format!(
                    "{}: {} violation(s)",
                    ontology.display(),
                    report.violations.len()
                )));
            }
            Ok(())
        }
        Command::Diff { pair, out } => {
            let (ideal, actual) = read_pair(pair)?;
            emit(&diff(&ideal, &actual)?, out)
        }
        Command::Severity { pair, cfg, out } => {
            let cfg = effective_config(cfg)?;
            let (ideal, actual) = read_pair(pair)?;
            let bs = diff(&ideal, &actual)?;
            emit(&severity_with_policy(&bs, &ideal, &cfg)?, out)
        }
        Command::Classify { pair, cfg, out } => {
            let cfg = effective_config(cfg)?;
            let (ideal, actual) = read_pair(pair)?;
            emit(&classify(&ideal, &actual, &cfg.taxonomy)?, out)
        }
        Command::Patterns {
            pair,
            inputs,
            cfg,
            out,
        } => {
            let cfg = effective_config(cfg)?;
            let (ideal, actual) = read_pair(pair)?;
            let loaded = LoadedInputs::load(inputs, &actual)?;
            let bs = diff(&ideal, &actual)?;
            let sigma = severity_with_policy(&bs, &ideal, &cfg)?.sigma;
            let scan = scan_patterns(&ideal, &actual, &bs, sigma, &loaded.context(), &cfg)?;
            emit(&scan.findings, out)
        }
        Command::Resilience {
            pair,
            invest,
            cfg,
            out,
        } => {
            let cfg = effective_config(cfg)?;
            let (ideal, actual) = read_pair(pair)?;
            let investments: Option<InvestmentHistory> =
                invest.as_deref().map(read_json).transpose()?;
            let bs = diff(&ideal, &actual)?;
            let sev = severity_with_policy(&bs, &ideal, &cfg)?;
            let sc = dominant_switch_cost(&actual, investments.as_ref(), &cfg)?;
            let r = resilience(
                sev.sigma,
                sev.sigma_max,
                &actual,
                sc.cost,
                cfg.patterns.omega_budget,
                cfg.epsilon,
            )?;
            emit(&r, out)
        }
        Command::Ingest { cases, out } => {
            let db = load_db(cases)?;
            debug_assert!(db.index_consistent());
            emit(&IngestSummary::new(&db), out)
        }
        Command::IdealBuild {
            cases,
            background,
            stage_label,
            min_similarity,
            node_meta,
            out,
        } => {
            let db = load_db(cases)?;
            let b: Background = match background {
                Some(p) => read_json(p)?,
                None => BTreeMap::new(),
            };
            let mut ideal = build_ideal(&db, &b, stage_label, *min_similarity)?;
            if let Some(p) = node_meta {
                let overrides: Vec<PhiOverride> = read_json(p)?;
                apply_phi(&mut ideal, &overrides)?;
            }
            emit(&ideal, out)
        }
        Command::Rho { cases, out } => {
            let db = load_db(cases)?;
            emit(&RhoTable::estimate(&db)?, out)
        }
        Command::SimEfficiency(a) => {
            let cfg = sim_config(a)?;
            let result = efficiency_experiment(&cfg)?;
            if let (Some(path), Some(sweep)) = (&a.sweep_csv, &result.sweep) {
                let mut w = csv::Writer::from_path(path)?;
                for p in &sweep.points {
                    w.serialize(p)?;
                }
                w.flush().map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
            }
            emit(&result, &a.out)
        }
        Command::Report {
            pair,
            inputs,
            cfg,
            out,
        } => {
            let cfg = effective_config(cfg)?;
            let (ideal, actual) = read_pair(pair)?;
            let loaded = LoadedInputs::load(inputs, &actual)?;
            let analysis = analyze(&ideal, &actual, &loaded.context(), &cfg)?;
            if let Some(m) = &analysis.stage_mismatch {
                warn(&format!(
                    "ideal stage {} differs from actual stage {}",
                    m.ideal, m.actual
                ));
            }
            emit(
                &ReportDocument {
                    engine_version: ENGINE_VERSION.into(),
                    schema_version: SCHEMA_VERSION.into(),
                    analysis,
                },
                out,
            )
        }
    }
}

fn apply_phi(ideal: &mut Ontology, overrides: &[PhiOverride]) -> Result<()> {
    for o in overrides {
        if !(0.0..=1.0).contains(&o.phi) {
            return Err(CliError::Rejected(format!(
                "phi for {}:{} must lie in [0,1]",
                o.dimension, o.id
            )));
        }
        let node = ideal
            .dimensions
            .get_mut(&o.dimension)
            .and_then(|g| g.nodes.iter_mut().find(|n| n.id == o.id))
            .ok_or_else(|| {
                CliError::Rejected(format!(
                    "node-meta names unknown node {}:{}",
                    o.dimension, o.id
                ))
            })?;
        node.phi = Some(o.phi);
    }
    Ok(())
}
