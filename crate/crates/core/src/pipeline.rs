//! Experiment runner: instances × solvers × runs, evaluated by approximation
//! ratio and written out as a JSON report plus flat CSV tables.
//!
//! Every cell draws its seed from the master seed and its (instance, solver,
//! run) coordinates, so results do not depend on worker count or scheduling.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anneal::{sample_sa, solve_exhaustive, AnnealSchedule, MAX_EXHAUSTIVE_VARS};
use crate::classical::{solve_exact, DEFAULT_NODE_BUDGET};
use crate::evaluation::{aggregate, mean_and_ci95, run_metrics, AggregateMetrics, RunMetrics};
use crate::instance::{parse_instance, Instance};
use crate::qaoa::{run_schedule, OptimizerConfig, ScheduleConfig, MAX_QUBITS};
use crate::qubo::{embed_assignment, encode, Qubo};
use crate::reductor::{reduce, synthesize, ReductionSpec, SyntheticSpec};
use crate::samples::{SampleSet, SampleSetExport};
use crate::seed::derive_seed;

/// Environment variable holding the worker-pool size.
pub const WORKERS_ENV: &str = "SATPLAN_WORKERS";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Exact,
    Sa,
    Qaoa,
    Exhaustive,
}

impl Solver {
    fn code(self) -> u64 {
        match self {
            Solver::Exact => 1,
            Solver::Sa => 2,
            Solver::Qaoa => 3,
            Solver::Exhaustive => 4,
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Exact => "exact",
            Solver::Sa => "sa",
            Solver::Qaoa => "qaoa",
            Solver::Exhaustive => "exhaustive",
        })
    }
}

/// Annealing parameters in a config file; absent fields fall back to the
/// coefficient-scaled schedule of the instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaConfig {
    pub sweeps: Option<usize>,
    pub beta_start: Option<f64>,
    pub beta_end: Option<f64>,
    pub restarts_per_read: Option<usize>,
}

impl SaConfig {
    pub fn schedule_for(&self, q: &Qubo) -> AnnealSchedule {
        let base = AnnealSchedule::scaled_to(q);
        AnnealSchedule {
            sweeps: self.sweeps.unwrap_or(base.sweeps),
            beta_start: self.beta_start.unwrap_or(base.beta_start),
            beta_end: self.beta_end.unwrap_or(base.beta_end),
            restarts_per_read: self.restarts_per_read.unwrap_or(base.restarts_per_read),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub requests: usize,
    #[serde(default = "default_stereo_fraction")]
    pub stereo_fraction: f64,
    pub binary_constraints: usize,
    pub ternary_constraints: usize,
    #[serde(default = "default_max_weight")]
    pub max_weight: u32,
    #[serde(default)]
    pub max_capacity: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_stereo_fraction() -> f64 {
    SyntheticSpec::default().stereo_fraction
}

fn default_max_weight() -> u32 {
    SyntheticSpec::default().max_weight
}

impl SyntheticConfig {
    pub fn spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            requests: self.requests,
            stereo_fraction: self.stereo_fraction,
            binary_constraints: self.binary_constraints,
            ternary_constraints: self.ternary_constraints,
            max_weight: self.max_weight,
            max_capacity: self.max_capacity,
        }
    }
}

/// An instance produced by the reductor as part of the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    /// Source instance file; mutually exclusive with `synthetic`.
    #[serde(default)]
    pub source: Option<PathBuf>,
    #[serde(default)]
    pub synthetic: Option<SyntheticConfig>,
    pub target_requests: usize,
    #[serde(default)]
    pub with_capacity: bool,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub instances: Vec<PathBuf>,
    #[serde(default)]
    pub generate: Vec<GenerateConfig>,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<Solver>,
    #[serde(default = "default_reads")]
    pub reads: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_max_layers")]
    pub max_layers: usize,
    #[serde(default = "default_n_inits")]
    pub n_inits: usize,
    #[serde(default)]
    pub penalty: Option<f64>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_node_budget")]
    pub node_budget: u64,
    #[serde(default)]
    pub sa: SaConfig,
    #[serde(default = "default_tolerance")]
    pub qaoa_tolerance: f64,
    #[serde(default = "default_max_evals")]
    pub qaoa_max_evals: usize,
    /// Evolve under the cost Hamiltonian rescaled to unit largest coefficient.
    #[serde(default = "default_normalize")]
    pub qaoa_normalize: bool,
}

fn default_solvers() -> Vec<Solver> {
    vec![Solver::Exact, Solver::Sa, Solver::Qaoa]
}
fn default_reads() -> u64 {
    2000
}
fn default_runs() -> usize {
    5
}
fn default_max_layers() -> usize {
    10
}
fn default_n_inits() -> usize {
    5
}
fn default_node_budget() -> u64 {
    DEFAULT_NODE_BUDGET
}
fn default_tolerance() -> f64 {
    OptimizerConfig::default().tolerance
}
fn default_max_evals() -> usize {
    OptimizerConfig::default().max_evals
}
fn default_normalize() -> bool {
    true
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.reads == 0 {
            return bad("reads must be at least 1");
        }
        if self.runs == 0 {
            return bad("runs must be at least 1");
        }
        if self.max_layers == 0 {
            return bad("max_layers must be at least 1");
        }
        if self.solvers.is_empty() {
            return bad("no solvers selected");
        }
        if let Some(m) = self.penalty {
            if !(m.is_finite() && m > 0.0) {
                return bad("penalty must be positive");
            }
        }
        if !(self.qaoa_tolerance > 0.0) {
            return bad("qaoa_tolerance must be positive");
        }
        for g in &self.generate {
            if g.source.is_some() == g.synthetic.is_some() {
                return bad("each generate entry needs exactly one of source or synthetic");
            }
        }
        Ok(())
    }

    /// Column labels in config order; QAOA reports its first and last layer.
    pub fn solver_labels(&self) -> Vec<String> {
        self.solvers
            .iter()
            .flat_map(|&s| match s {
                Solver::Qaoa if self.max_layers > 1 => {
                    vec!["qaoa@l1".to_string(), format!("qaoa@l{}", self.max_layers)]
                }
                Solver::Qaoa => vec!["qaoa@l1".to_string()],
                other => vec![other.to_string()],
            })
            .collect()
    }
}

/// Loads every instance named by the config; paths resolve against `base`.
/// Failures are kept per entry so one bad file does not stop the others.
pub fn load_instances(cfg: &ExperimentConfig, base: &Path) -> Vec<(String, Result<Instance, String>)> {
    let read = |p: &Path| -> Result<Instance, String> {
        let path = base.join(p);
        let bytes = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        parse_instance(&bytes).map_err(|e| format!("{}: {e}", path.display()))
    };
    let mut out: Vec<(String, Result<Instance, String>)> = cfg
        .instances
        .iter()
        .map(|p| (p.display().to_string(), read(p)))
        .collect();
    for g in &cfg.generate {
        let src = match (&g.source, &g.synthetic) {
            (Some(p), _) => read(p),
            (None, Some(s)) => Ok(synthesize(&s.spec(), s.seed)),
            (None, None) => Err("generate entry without a source".to_string()),
        };
        let spec = ReductionSpec { target_requests: g.target_requests, with_capacity: g.with_capacity, seed: g.seed };
        let result = src.and_then(|s| reduce(&s, &spec).map(|r| r.instance).map_err(|e| e.to_string()));
        let label = match &result {
            Ok(i) => i.name().to_string(),
            Err(_) => format!("generate(seed={})", g.seed),
        };
        out.push((label, result));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub metrics: RunMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub solver: String,
    pub runs: Vec<RunRecord>,
    pub aggregate: Option<AggregateMetrics>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSummary {
    pub layer: usize,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub expectation: f64,
    pub expected_ar: f64,
    pub best_ar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub name: String,
    pub requests: usize,
    pub variables: usize,
    pub slacks: usize,
    pub f_max: Option<f64>,
    pub proven_optimal: bool,
    pub error: Option<String>,
    pub notes: Vec<String>,
    pub cells: Vec<CellReport>,
    /// Per-run, per-layer QAOA detail.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub qaoa_layers: Vec<Vec<LayerSummary>>,
}

impl InstanceReport {
    /// No cell produced any run.
    pub fn failed(&self) -> bool {
        self.error.is_some() || self.cells.iter().all(|c| c.runs.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub master_seed: u64,
    pub reads: u64,
    pub runs: usize,
    pub solvers: Vec<String>,
    pub instances: Vec<InstanceReport>,
}

impl Report {
    pub fn any_instance_failed(&self) -> bool {
        self.instances.iter().any(InstanceReport::failed)
    }
}

/// One persisted sample set, keyed by where it belongs.
#[derive(Debug, Clone)]
pub struct PersistedSamples {
    pub instance: String,
    pub solver: String,
    pub run: usize,
    pub samples: SampleSetExport,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: Report,
    pub samples: Vec<PersistedSamples>,
}

struct Prepared {
    inst: Instance,
    qubo: Qubo,
    f_max: f64,
    exact_bits: Vec<bool>,
}

/// Result of one (instance, solver, run) job: one sample set per column label.
type JobOutput = Result<(Vec<(String, SampleSet)>, Vec<LayerSummary>), String>;

/// Size of the worker pool: the environment variable when set, else rayon's default.
pub fn worker_count() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()).filter(|&n| n > 0)
}

/// Runs the full experiment on already-loaded instances.
pub fn run_pipeline(cfg: &ExperimentConfig, instances: Vec<(String, Result<Instance, String>)>) -> PipelineOutput {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().expect("thread pool");
    pool.install(|| run_in_pool(cfg, instances))
}

fn prepare(cfg: &ExperimentConfig, inst: Instance) -> (Result<Prepared, String>, Vec<String>, bool) {
    let mut notes = Vec::new();
    let exact = solve_exact(&inst, cfg.node_budget);
    if !exact.proven_optimal {
        notes.push(format!("node budget exhausted after {} nodes; F_max is a lower bound", exact.nodes_explored));
    }
    let proven = exact.proven_optimal;
    if !(exact.best_value > 0.0) {
        return (Err("F_max is zero; approximation ratio undefined".into()), notes, proven);
    }
    let qubo = match encode(&inst, cfg.penalty) {
        Ok(q) => q,
        Err(e) => return (Err(e.to_string()), notes, proven),
    };
    for w in &qubo.warnings {
        notes.push(format!("encoder warning: {w:?}"));
    }
    let size = qubo.num_vars();
    if cfg.solvers.contains(&Solver::Qaoa) && size > MAX_QUBITS {
        notes.push(format!("qaoa skipped: {size} qubits exceed the simulator limit of {MAX_QUBITS}"));
    }
    if cfg.solvers.contains(&Solver::Exhaustive) && size > MAX_EXHAUSTIVE_VARS {
        notes.push(format!("exhaustive skipped: {size} variables exceed the enumeration limit"));
    }
    let exact_bits = embed_assignment(&qubo, &inst, &exact.best_assignment);
    (Ok(Prepared { f_max: exact.best_value, inst, qubo, exact_bits }), notes, proven)
}

fn run_job(cfg: &ExperimentConfig, p: &Prepared, solver: Solver, seed: u64) -> JobOutput {
    let n = p.inst.variable_count();
    let repeat = |bits: &[bool], tag: &str| {
        let counts = std::collections::BTreeMap::from([(bits.to_vec(), cfg.reads)]);
        SampleSet::from_counts(&p.qubo, counts, tag, seed)
    };
    match solver {
        Solver::Exact => Ok((vec![("exact".into(), repeat(&p.exact_bits, "exact"))], vec![])),
        Solver::Exhaustive => {
            if p.qubo.num_vars() > MAX_EXHAUSTIVE_VARS {
                return Err(format!(
                    "skipped: {} variables exceed the enumeration limit of {MAX_EXHAUSTIVE_VARS}",
                    p.qubo.num_vars()
                ));
            }
            let (bits, _) = solve_exhaustive(&p.qubo).map_err(|e| e.to_string())?;
            Ok((vec![("exhaustive".into(), repeat(&bits, "exhaustive"))], vec![]))
        }
        Solver::Sa => {
            let sched = cfg.sa.schedule_for(&p.qubo);
            let set = sample_sa(&p.qubo, cfg.reads, &sched, seed).map_err(|e| e.to_string())?;
            Ok((vec![("sa".into(), set)], vec![]))
        }
        Solver::Qaoa => {
            if p.qubo.num_vars() > MAX_QUBITS {
                return Err(format!("skipped: {} qubits exceed the simulator limit of {MAX_QUBITS}", p.qubo.num_vars()));
            }
            let scfg = ScheduleConfig {
                max_layers: cfg.max_layers,
                n_inits: cfg.n_inits,
                reads: cfg.reads,
                optimizer: OptimizerConfig {
                    tolerance: cfg.qaoa_tolerance,
                    max_evals: cfg.qaoa_max_evals,
                    ..OptimizerConfig::default()
                },
                seed,
                normalize: cfg.qaoa_normalize,
            };
            let score = |s: &SampleSet| run_metrics(&p.inst, p.f_max, s, n).map_or(0.0, |m| m.expected_ar);
            let layers = run_schedule(&p.qubo, &scfg, Some(&score)).map_err(|e| e.to_string())?;
            let mut summaries = Vec::with_capacity(layers.len());
            for l in &layers {
                let m = run_metrics(&p.inst, p.f_max, &l.samples, n).map_err(|e| e.to_string())?;
                summaries.push(LayerSummary {
                    layer: l.layer,
                    gammas: l.params.gammas.clone(),
                    betas: l.params.betas.clone(),
                    expectation: l.expectation,
                    expected_ar: m.expected_ar,
                    best_ar: m.best_ar,
                });
            }
            let first = layers.first().expect("at least one layer");
            let mut sets = vec![("qaoa@l1".to_string(), first.samples.clone())];
            if layers.len() > 1 {
                let last = layers.last().expect("non-empty");
                sets.push((format!("qaoa@l{}", last.layer), last.samples.clone()));
            }
            Ok((sets, summaries))
        }
    }
}

fn run_in_pool(cfg: &ExperimentConfig, instances: Vec<(String, Result<Instance, String>)>) -> PipelineOutput {
    use rayon::prelude::*;

    let prepared: Vec<(String, Result<Prepared, String>, Vec<String>, bool)> = instances
        .into_par_iter()
        .map(|(label, inst)| match inst {
            Ok(inst) => {
                let name = inst.name().to_string();
                let (p, notes, proven) = prepare(cfg, inst);
                (name, p, notes, proven)
            }
            Err(e) => (label, Err(e), Vec::new(), false),
        })
        .collect();

    let jobs: Vec<(usize, Solver, usize)> = prepared
        .iter()
        .enumerate()
        .filter(|(_, p)| p.1.is_ok())
        .flat_map(|(i, _)| {
            cfg.solvers
                .iter()
                .flat_map(move |&s| (0..cfg.runs).map(move |r| (i, s, r)))
        })
        .collect();
    let outputs: Vec<JobOutput> = jobs
        .par_iter()
        .map(|&(i, solver, run)| {
            let p = prepared[i].1.as_ref().expect("filtered to prepared instances");
            let seed = derive_seed(cfg.master_seed, &[i as u64, solver.code(), run as u64]);
            run_job(cfg, p, solver, seed)
        })
        .collect();

    let labels = cfg.solver_labels();
    let mut samples_out = Vec::new();
    let mut reports: Vec<InstanceReport> = prepared
        .iter()
        .map(|(name, p, notes, proven)| match p {
            Ok(p) => InstanceReport {
                name: name.clone(),
                requests: p.inst.requests().len(),
                variables: p.inst.variable_count(),
                slacks: p.qubo.registry.slack_count(),
                f_max: Some(p.f_max),
                proven_optimal: *proven,
                error: None,
                notes: notes.clone(),
                cells: labels
                    .iter()
                    .map(|l| CellReport { solver: l.clone(), runs: vec![], aggregate: None, error: None })
                    .collect(),
                qaoa_layers: vec![],
            },
            Err(e) => InstanceReport {
                name: name.clone(),
                requests: 0,
                variables: 0,
                slacks: 0,
                f_max: None,
                proven_optimal: *proven,
                error: Some(e.clone()),
                notes: notes.clone(),
                cells: vec![],
                qaoa_layers: vec![],
            },
        })
        .collect();

    for (&(i, solver, run), out) in jobs.iter().zip(outputs) {
        let p = prepared[i].1.as_ref().expect("prepared");
        let report = &mut reports[i];
        let seed = derive_seed(cfg.master_seed, &[i as u64, solver.code(), run as u64]);
        match out {
            Ok((sets, layers)) => {
                for (label, set) in sets {
                    let cell = report.cells.iter_mut().find(|c| c.solver == label).expect("label");
                    match run_metrics(&p.inst, p.f_max, &set, p.inst.variable_count()) {
                        Ok(metrics) => cell.runs.push(RunRecord { run, seed, metrics }),
                        Err(e) => cell.error = Some(e.to_string()),
                    }
                    samples_out.push(PersistedSamples {
                        instance: report.name.clone(),
                        solver: label,
                        run,
                        samples: set.to_export(),
                    });
                }
                if !layers.is_empty() {
                    report.qaoa_layers.push(layers);
                }
            }
            Err(e) => {
                let prefix = solver.to_string();
                for cell in report.cells.iter_mut().filter(|c| c.solver.starts_with(&prefix)) {
                    cell.error.get_or_insert_with(|| e.clone());
                }
            }
        }
    }
    for report in &mut reports {
        for cell in &mut report.cells {
            let metrics: Vec<RunMetrics> = cell.runs.iter().map(|r| r.metrics).collect();
            cell.aggregate = aggregate(&metrics).ok();
        }
    }

    PipelineOutput {
        report: Report {
            master_seed: cfg.master_seed,
            reads: cfg.reads,
            runs: cfg.runs,
            solvers: labels,
            instances: reports,
        },
        samples: samples_out,
    }
}

fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

/// Flat table: one row per run, plus a `mean` row per cell when `runs >= 2`.
pub fn runs_csv(report: &Report) -> String {
    let mut w = csv_writer();
    w.write_record(["instance", "solver", "run", "expected_ar", "best_ar", "ci95_expected", "ci95_best"])
        .expect("in-memory write");
    for inst in &report.instances {
        for cell in &inst.cells {
            for r in &cell.runs {
                w.write_record([
                    inst.name.as_str(),
                    &cell.solver,
                    &r.run.to_string(),
                    &fmt_num(r.metrics.expected_ar),
                    &fmt_num(r.metrics.best_ar),
                    "",
                    "",
                ])
                .expect("in-memory write");
            }
            if let Some(a) = &cell.aggregate {
                w.write_record([
                    inst.name.as_str(),
                    &cell.solver,
                    "mean",
                    &fmt_num(a.mean_expected_ar),
                    &fmt_num(a.mean_best_ar),
                    &fmt_num(a.ci95_expected),
                    &fmt_num(a.ci95_best),
                ])
                .expect("in-memory write");
            }
        }
    }
    finish(w)
}

/// Plot tables for expected AR and best AR: instances as rows ordered by
/// request count, each solver column followed by its CI half-width.
pub fn emit_plot_data(report: &Report) -> (String, String) {
    let mut order: Vec<&InstanceReport> = report.instances.iter().collect();
    order.sort_by_key(|i| i.requests);
    let table = |pick: &dyn Fn(&RunMetrics) -> f64| {
        let mut w = csv_writer();
        let mut header = vec!["instance".to_string()];
        for s in &report.solvers {
            header.push(s.clone());
            header.push(format!("{s}_ci95"));
        }
        w.write_record(&header).expect("in-memory write");
        for inst in &order {
            let mut row = vec![inst.name.clone()];
            for s in &report.solvers {
                let values: Vec<f64> = inst
                    .cells
                    .iter()
                    .find(|c| &c.solver == s)
                    .map(|c| c.runs.iter().map(|r| pick(&r.metrics)).collect())
                    .unwrap_or_default();
                if values.is_empty() {
                    row.extend([String::new(), String::new()]);
                } else {
                    let (mean, ci) = mean_and_ci95(&values);
                    row.push(fmt_num(mean));
                    row.push(fmt_num(ci));
                }
            }
            w.write_record(&row).expect("in-memory write");
        }
        finish(w)
    };
    (table(&|m| m.expected_ar), table(&|m| m.best_ar))
}

/// Writes `report.json`, `runs.csv`, `expected_ar.csv`, `best_ar.csv` and the
/// sample sets under `samples/`.
pub fn write_outputs(out: &PipelineOutput, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(&out.report).expect("report serializes");
    std::fs::write(dir.join("report.json"), json + "\n")?;
    std::fs::write(dir.join("runs.csv"), runs_csv(&out.report))?;
    let (expected, best) = emit_plot_data(&out.report);
    std::fs::write(dir.join("expected_ar.csv"), expected)?;
    std::fs::write(dir.join("best_ar.csv"), best)?;
    let sdir = dir.join("samples");
    for s in &out.samples {
        let d = sdir.join(sanitize(&s.instance));
        std::fs::create_dir_all(&d)?;
        let file = d.join(format!("{}-run{}.json", sanitize(&s.solver), s.run));
        std::fs::write(file, serde_json::to_string(&s.samples).expect("samples serialize"))?;
    }
    Ok(())
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.@".contains(c) { c } else { '_' })
        .collect()
}
