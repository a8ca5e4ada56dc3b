mod args;
mod output;

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use crdsa::engine::{sweep_all, ExperimentConfig, Scheme, SimError};
use crdsa::figures::{generate, FigureError, FigureOptions};
use crdsa::report::{write_stability_csv, write_sweep_csv};
use crdsa::stability::{
    equilibrium_contour, find_equilibria, ClosedLoop, CurveSelector, PopulationModel, StabilityError,
    ThroughputCurve,
};

use args::{Cli, Command, FiguresArgs, StabilityArgs, SweepArgs};

/// Only the default figures directory may come from the environment.
const OUTPUT_DIR_ENV: &str = "SIMULATE_OUTPUT_DIR";

#[derive(Debug)]
enum Failure {
    Config(String),
    Input(String),
    Output(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Output(_) => 1,
            Self::Config(_) => 3,
            Self::Input(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Input(m) => write!(f, "input error: {m}"),
            Self::Output(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        if e.is_config() {
            Self::Config(e.to_string())
        } else {
            Self::Output(e.to_string())
        }
    }
}

impl From<StabilityError> for Failure {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::Input(_) | StabilityError::InvalidCurve(_) => Self::Input(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<FigureError> for Failure {
    fn from(e: FigureError) -> Self {
        match e {
            FigureError::Sim(e) => e.into(),
            FigureError::Stability(e) => e.into(),
            FigureError::Io(e) => Self::Output(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).format_target(false).init();

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(1);
        }
    };
    let result = pool.install(|| match cli.command {
        Command::Throughput(a) | Command::Plr(a) => run_sweep(a, &[0.0]),
        Command::Efficiency(a) => run_sweep(a, &crdsa::figures::FIGURE_SNR_DB),
        Command::Stability(a) => run_stability(a),
        Command::Figures(a) => run_figures(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn sweep_configs(a: &SweepArgs, default_snr: &[f64]) -> Vec<ExperimentConfig> {
    let mut configs = Vec::new();
    for &scheme in &a.scheme {
        // Slotted Aloha has a single series whatever the distributions.
        let dists = if scheme == Scheme::SlottedAloha { &a.dist[..1] } else { &a.dist[..] };
        for dist in dists {
            let mut c = ExperimentConfig::new(scheme, dist.clone()).with_window(a.window);
            c.max_iterations = a.imax;
            c.memory_multiplier = a.memory_multiplier;
            c.loads = a.loads.0.clone();
            c.snr_db = a.snr_db.clone().unwrap_or_else(|| default_snr.to_vec());
            c.total_slots = a.slots;
            if let Some(w) = a.warmup {
                c.warmup_slots = w;
            }
            c.seed = a.seed;
            c.confidence = a.confidence;
            configs.push(c);
        }
    }
    configs
}

fn run_sweep(a: SweepArgs, default_snr: &[f64]) -> Result<(), Failure> {
    let configs = sweep_configs(&a, default_snr);
    for c in &configs {
        eprintln!(
            "config: scheme={} dist={} window={} imax={} memory={}x loads={:?} snr_db={:?} slots={} warmup={} seed={} confidence={}",
            c.scheme,
            c.effective_distribution(),
            c.window,
            c.max_iterations,
            c.memory_multiplier,
            c.loads,
            c.snr_db,
            c.total_slots,
            c.warmup_slots,
            c.seed,
            c.confidence
        );
    }
    let rows = sweep_all(&configs)?;
    output::write_atomic(&a.output, |w| write_sweep_csv(w, &rows))
}

fn run_stability(a: StabilityArgs) -> Result<(), Failure> {
    eprintln!(
        "config: curve={} population={} p_tx={} p_retx={} scheme={:?} dist={:?} grid={} contour={:?}",
        a.curve.display(),
        a.population,
        a.p_tx,
        a.p_retx,
        a.scheme,
        a.dist,
        a.grid,
        a.contour
    );
    let model = PopulationModel::new(a.population, a.p_tx, a.p_retx)?;
    let file = File::open(&a.curve).map_err(|e| Failure::Input(format!("{}: {e}", a.curve.display())))?;
    let selector = CurveSelector { scheme: a.scheme, dist: a.dist };
    let curve = ThroughputCurve::from_csv(file, &selector)?;
    let channel = ClosedLoop::new(model, curve)?;
    let equilibria = find_equilibria(&channel, a.grid)?;
    let contour = match a.contour {
        Some(n) => equilibrium_contour(&channel, n)?,
        None => Vec::new(),
    };
    for p in &equilibria.points {
        if p.tangent {
            log::warn!("equilibrium at n_b = {} is a tangency, reported as unstable", p.n_b);
        }
    }
    output::write_atomic(&a.output, |w| write_stability_csv(w, &contour, &equilibria))
}

fn run_figures(a: FiguresArgs) -> Result<(), Failure> {
    let dir = a
        .output
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"));
    eprintln!("config: output={} seed={} slots={}", dir.display(), a.seed, a.slots);
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Output(format!("{}: {e}", dir.display())))?;
    let files = generate(&FigureOptions { seed: a.seed, total_slots: a.slots })?;
    for f in files {
        let path: &Path = &dir.join(&f.name);
        output::write_atomic(path, |w| w.write_all(&f.contents))?;
        log::info!("wrote {}", path.display());
    }
    Ok(())
}
