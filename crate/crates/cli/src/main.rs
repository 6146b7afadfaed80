use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use satplan::pipeline::{
    emit_plot_data, load_instances, run_pipeline, write_outputs, ExperimentConfig, Report, Solver, WORKERS_ENV,
};
use satplan::reductor::{reduce, synthesize, ReductionSpec, SyntheticSpec};
use satplan::{encode, parse_instance, serialize_instance, to_ising, Instance};
use serde_json::json;

const EXIT_PARTIAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "satplan", version, about = "Satellite mission planning as QUBO: encode, sample, evaluate")]
struct Cli {
    /// Worker threads for the job pool.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a source or synthetic instance to a smaller one.
    Generate(GenerateArgs),
    /// Write the QUBO (or Ising model) of an instance as JSON.
    Encode(EncodeArgs),
    /// Run one solver once on one instance and print its metrics.
    Solve(SolveArgs),
    /// Run a full experiment from a config file.
    Run(RunArgs),
    /// Turn a report into the expected-AR and best-AR plot tables.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Source instance; a synthetic pool is drawn when omitted.
    #[arg(long)]
    source: Option<PathBuf>,
    /// Requests in the synthetic pool.
    #[arg(long, default_value_t = SyntheticSpec::default().requests)]
    pool: usize,
    #[arg(long, default_value_t = SyntheticSpec::default().binary_constraints)]
    pool_binary: usize,
    #[arg(long, default_value_t = SyntheticSpec::default().ternary_constraints)]
    pool_ternary: usize,
    /// Number of requests to keep.
    #[arg(long, short = 'n')]
    target: usize,
    /// Keep a disk capacity constraint.
    #[arg(long)]
    capacity: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    instance: PathBuf,
    #[arg(long)]
    penalty: Option<f64>,
    /// Emit the Ising form instead of the QUBO.
    #[arg(long)]
    ising: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    solver: SolverArg,
    #[arg(long)]
    reads: Option<u64>,
    #[arg(long)]
    max_layers: Option<usize>,
    #[arg(long)]
    n_inits: Option<usize>,
    #[arg(long)]
    penalty: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON). Instance paths resolve against its directory.
    #[arg(long, short)]
    config: PathBuf,
    #[arg(long, short, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',')]
    solvers: Option<Vec<SolverArg>>,
    #[arg(long)]
    reads: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    max_layers: Option<usize>,
    #[arg(long)]
    n_inits: Option<usize>,
    #[arg(long)]
    penalty: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReportArgs {
    /// A `report.json` written by `run`.
    report: PathBuf,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SolverArg {
    Exact,
    Sa,
    Qaoa,
    Exhaustive,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Exact => Solver::Exact,
            SolverArg::Sa => Solver::Sa,
            SolverArg::Qaoa => Solver::Qaoa,
            SolverArg::Exhaustive => Solver::Exhaustive,
        }
    }
}

/// Error carrying the exit code it maps to.
struct Failure(u8, String);

fn config_err(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_CONFIG, msg.to_string())
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let bytes = std::fs::read(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    parse_instance(&bytes).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure(EXIT_PARTIAL, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn generate(a: GenerateArgs) -> Result<(), Failure> {
    let src = match &a.source {
        Some(p) => read_instance(p)?,
        None => {
            let spec = SyntheticSpec {
                requests: a.pool,
                binary_constraints: a.pool_binary,
                ternary_constraints: a.pool_ternary,
                ..SyntheticSpec::default()
            };
            synthesize(&spec, a.seed)
        }
    };
    let spec = ReductionSpec { target_requests: a.target, with_capacity: a.capacity, seed: a.seed };
    let r = reduce(&src, &spec).map_err(config_err)?;
    if r.filled_randomly {
        eprintln!("note: constraints ran out; remaining requests drawn uniformly");
    }
    if r.zero_capacity {
        eprintln!("note: derived capacity is zero");
    }
    let text = String::from_utf8(serialize_instance(&r.instance)).expect("json is utf-8");
    emit(&text, a.output.as_deref())
}

fn encode_cmd(a: EncodeArgs) -> Result<(), Failure> {
    let inst = read_instance(&a.instance)?;
    let q = encode(&inst, a.penalty).map_err(config_err)?;
    let value = if a.ising {
        let ising = to_ising(&q);
        let couplings: Vec<_> = ising.j.iter().map(|(&(i, j), &v)| json!([i, j, v])).collect();
        json!({ "h": ising.h, "j": couplings, "offset": ising.offset })
    } else {
        serde_json::to_value(q.to_export()).expect("export serializes")
    };
    emit(&(serde_json::to_string_pretty(&value).expect("json") + "\n"), a.output.as_deref())
}

fn solve(a: SolveArgs) -> Result<(), Failure> {
    let inst = read_instance(&a.instance)?;
    let mut cfg = ExperimentConfig {
        solvers: vec![a.solver.into()],
        runs: 1,
        penalty: a.penalty,
        master_seed: a.seed,
        ..ExperimentConfig::default()
    };
    if let Some(r) = a.reads {
        cfg.reads = r;
    }
    if let Some(l) = a.max_layers {
        cfg.max_layers = l;
    }
    if let Some(k) = a.n_inits {
        cfg.n_inits = k;
    }
    cfg.validate().map_err(config_err)?;
    let label = a.instance.display().to_string();
    let out = run_pipeline(&cfg, vec![(label, Ok(inst))]);
    let inst = &out.report.instances[0];
    println!("{}", serde_json::to_string_pretty(inst).expect("json"));
    if inst.failed() {
        return Err(Failure(EXIT_PARTIAL, "solver produced no result".into()));
    }
    Ok(())
}

fn run(a: RunArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&a.config).map_err(|e| config_err(format!("{}: {e}", a.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text).map_err(config_err)?;
    if let Some(s) = a.solvers {
        cfg.solvers = s.into_iter().map(Solver::from).collect();
    }
    if let Some(r) = a.reads {
        cfg.reads = r;
    }
    if let Some(r) = a.runs {
        cfg.runs = r;
    }
    if let Some(l) = a.max_layers {
        cfg.max_layers = l;
    }
    if let Some(k) = a.n_inits {
        cfg.n_inits = k;
    }
    if a.penalty.is_some() {
        cfg.penalty = a.penalty;
    }
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    cfg.validate().map_err(config_err)?;
    if cfg.instances.is_empty() && cfg.generate.is_empty() {
        return Err(config_err("config names no instances"));
    }

    let base = a.config.parent().unwrap_or(Path::new("."));
    let out = run_pipeline(&cfg, load_instances(&cfg, base));
    write_outputs(&out, &a.out).map_err(|e| Failure(EXIT_PARTIAL, format!("{}: {e}", a.out.display())))?;
    for inst in &out.report.instances {
        for note in &inst.notes {
            eprintln!("{}: {note}", inst.name);
        }
        if let Some(e) = &inst.error {
            eprintln!("{}: failed: {e}", inst.name);
        }
        for cell in inst.cells.iter().filter(|c| c.error.is_some()) {
            eprintln!("{} / {}: {}", inst.name, cell.solver, cell.error.as_deref().unwrap_or_default());
        }
    }
    if out.report.any_instance_failed() {
        return Err(Failure(EXIT_PARTIAL, "at least one instance produced no results".into()));
    }
    Ok(())
}

fn report(a: ReportArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&a.report).map_err(|e| config_err(format!("{}: {e}", a.report.display())))?;
    let report: Report = serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", a.report.display())))?;
    let (expected, best) = emit_plot_data(&report);
    match a.out {
        Some(dir) => {
            let io = |e: std::io::Error| Failure(EXIT_PARTIAL, format!("{}: {e}", dir.display()));
            std::fs::create_dir_all(&dir).map_err(io)?;
            std::fs::write(dir.join("expected_ar.csv"), expected).map_err(io)?;
            std::fs::write(dir.join("best_ar.csv"), best).map_err(io)?;
        }
        None => print!("# expected_ar\n{expected}# best_ar\n{best}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        // The pipeline reads the pool size from the environment.
        std::env::set_var(WORKERS_ENV, n.to_string());
    }
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Encode(a) => encode_cmd(a),
        Command::Solve(a) => solve(a),
        Command::Run(a) => run(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
