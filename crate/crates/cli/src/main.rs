mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use config::{RunConfig, Source};
use ldd_core::constitutive::constants_report;
use ldd_core::geometry::{build_partition, triangulate, Model};
use ldd_core::ldd::{check_scenario, Engine, ExecutionMode, LddError};
use ldd_core::verify::{emit_report, Scenario, VerifyError, PRESET_NAMES};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config: unknown key `{0}`")]
    UnknownKey(String),
    #[error("config: invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("config: give exactly one of `preset` and `scenario`")]
    ConflictingSource,
    #[error("no scenario given; use --config or --preset")]
    MissingSource,
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Scenario(#[from] VerifyError),
    #[error(transparent)]
    Solver(#[from] LddError),
    #[error(transparent)]
    Geometry(#[from] ldd_core::geometry::GeometryError),
}

#[derive(Parser)]
#[command(
    name = "ldd",
    version,
    about = "Hybrid two-phase/Richards flow solver with domain decomposition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write the CSV reports.
    Run(Common),
    /// Evaluate the contraction conditions for a scenario.
    Check(Common),
    /// Print the built-in scenario names.
    ListScenarios,
    /// Build the mesh and print per-subdomain sizes.
    MeshInfo(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario, instead of a config file.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory; relative paths are placed under `LDD_OUT_DIR` when set.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    resolution: Option<usize>,
    /// Worker threads; 0 uses every hardware thread.
    #[arg(long)]
    threads: Option<usize>,
    /// Exit with status 2 when a time step does not converge.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    verbose: bool,
}

impl Common {
    fn config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(name) = &self.preset {
            cfg.set_source(Source::Preset(name.clone()))?;
        }
        cfg.out = self.out.clone().or(cfg.out);
        cfg.steps = self.steps.or(cfg.steps);
        cfg.resolution = self.resolution.or(cfg.resolution);
        cfg.threads = self.threads.or(cfg.threads);
        cfg.strict |= self.strict;
        cfg.verbose |= self.verbose;
        Ok(cfg)
    }
}

fn out_dir(cfg: &RunConfig, scenario: &Scenario) -> PathBuf {
    let out = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&scenario.name));
    match std::env::var_os("LDD_OUT_DIR") {
        Some(root) if out.is_relative() => PathBuf::from(root).join(out),
        _ => out,
    }
}

fn execution_mode(cfg: &RunConfig, equations: usize) -> ExecutionMode {
    let hw = std::thread::available_parallelism().map_or(1, |n| n.get());
    let threads = match cfg.threads {
        Some(0) => hw,
        Some(k) => k,
        None => equations.min(hw),
    };
    if threads <= 1 {
        ExecutionMode::Sequential
    } else {
        ExecutionMode::Parallel { threads }
    }
}

fn equation_count(s: &Scenario) -> usize {
    (0..s.num_subdomains())
        .map(|l| if s.model(l) == Model::TwoPhase { 2 } else { 1 })
        .sum()
}

fn run(cfg: &RunConfig) -> Result<ExitCode, CliError> {
    let scenario = cfg.scenario()?;
    let out = out_dir(cfg, &scenario);
    std::fs::create_dir_all(&out).map_err(|source| CliError::Io {
        path: out.display().to_string(),
        source,
    })?;
    let mode = execution_mode(cfg, equation_count(&scenario));
    let steps = scenario.solver.steps;
    let resolved = serde_json::to_string_pretty(&scenario)?;
    let mut engine = Engine::new(scenario, mode)?;
    engine.set_diagnostics(cfg.verbose);
    log::info!(
        "{} steps on {} cells, {mode:?}",
        steps,
        engine.mesh().cells().len()
    );
    let outcome = engine.run_steps(steps)?;
    let report = &outcome.report;
    let scenario_path = out.join("scenario.json");
    std::fs::write(&scenario_path, resolved + "\n").map_err(|source| CliError::Io {
        path: scenario_path.display().to_string(),
        source,
    })?;
    let written = emit_report(report, &out, cfg.verbose)?;
    for path in &written {
        log::info!("wrote {}", path.display());
    }
    println!(
        "{}: {} steps, {} LDD iterations, {} linear solves, output in {}",
        report.scenario,
        report.steps.len(),
        report.total_iterations(),
        report.total_linear_solves(),
        out.display()
    );
    if let Some(last) = report.steps.last() {
        let errs: Vec<String> = report
            .fields
            .iter()
            .zip(&last.relative_errors)
            .map(|(f, e)| format!("{}={e:.3e}", f.label()))
            .collect();
        println!("final relative errors: {}", errs.join(" "));
    }
    let bad = report.non_converged_steps();
    if bad > 0 {
        eprintln!("warning: {bad} time step(s) hit the iteration limit; see iterations.csv");
        if cfg.strict {
            return Ok(ExitCode::from(2));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn check(cfg: &RunConfig) -> Result<ExitCode, CliError> {
    let scenario = cfg.scenario()?;
    let report = check_scenario(&scenario)?;
    println!(
        "{}: tau = {:e}, M = {}",
        scenario.name, report.tau, report.m_estimate
    );
    for c in &report.subdomains {
        let model = match c.model {
            Model::Richards => "Richards",
            Model::TwoPhase => "two-phase",
        };
        let tau_max = c
            .tau_max
            .map_or("unavailable".to_string(), |t| format!("{t:.4e}"));
        let l = c.subdomain;
        let full = constants_report(&scenario.materials[l], &scenario.curves[l], [0.0, 1.0])
            .map_err(|source| VerifyError::Material {
                subdomain: l,
                source,
            })?;
        let full_floor = match c.model {
            Model::Richards => full.m_floor_w,
            Model::TwoPhase => full.m_floor,
        };
        println!(
            "  subdomain {} ({model}): margin {:.4}, c {:.4}, floor {:.3e} (full range {:.3e}), tau_max {tau_max}: {}",
            l + 1,
            c.margin,
            c.c,
            c.m_floor,
            full_floor,
            if c.satisfied { "ok" } else { "VIOLATED" }
        );
    }
    println!(
        "overall: {}",
        if report.satisfied { "ok" } else { "VIOLATED" }
    );
    Ok(ExitCode::SUCCESS)
}

fn mesh_info(cfg: &RunConfig) -> Result<ExitCode, CliError> {
    let scenario = cfg.scenario()?;
    let mesh = triangulate(&build_partition(&scenario.geometry)?, scenario.resolution)?;
    println!(
        "{}: resolution {}, {} vertices, {} cells",
        scenario.name,
        scenario.resolution,
        mesh.vertices().len(),
        mesh.cells().len()
    );
    for (l, sub) in mesh.submeshes().iter().enumerate() {
        println!(
            "  subdomain {} ({:?}): h {:.4}, {} dofs, {} cells, neighbours {:?}",
            l + 1,
            mesh.model(l),
            sub.h,
            sub.num_dofs(),
            sub.cells.len(),
            mesh.neighbors(l).iter().map(|k| k + 1).collect::<Vec<_>>()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verbose = match &cli.command {
        Command::Run(c) | Command::Check(c) | Command::MeshInfo(c) => c.verbose,
        Command::ListScenarios => false,
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if verbose {
        "info"
    } else {
        "warn"
    }))
    .init();
    let result = match &cli.command {
        Command::ListScenarios => {
            let mut out = std::io::stdout().lock();
            for name in PRESET_NAMES {
                if writeln!(out, "{name}").is_err() {
                    break;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(c) => c.config().and_then(|cfg| run(&cfg)),
        Command::Check(c) => c.config().and_then(|cfg| check(&cfg)),
        Command::MeshInfo(c) => c.config().and_then(|cfg| mesh_info(&cfg)),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}
