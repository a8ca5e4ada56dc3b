use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use crdsa::{DegreeDistribution, Scheme};

#[derive(Debug, Parser)]
#[command(name = "simulate", version, about = "Slotted random access with interference cancellation")]
pub struct Cli {
    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Repeat for more log output; -vvv prints one line per decoder event.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the offered load and report throughput.
    Throughput(SweepArgs),
    /// Sweep the offered load and report packet loss.
    Plr(SweepArgs),
    /// Sweep the offered load and report normalized efficiency (default SNRs 0, 6, 12, 18 dB).
    Efficiency(SweepArgs),
    /// Find the equilibria of a channel with retransmissions.
    Stability(StabilityArgs),
    /// Run the canned experiments and write fig2.csv .. fig7.csv.
    Figures(FiguresArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Access schemes: sa, fb, sw (comma separated or repeated).
    #[arg(long, value_delimiter = ',', value_parser = parse_scheme, default_value = "sw")]
    pub scheme: Vec<Scheme>,

    /// Burst degree distributions, e.g. "x^2", "0.5x^2+0.5x^3" or "irsa8" (repeatable).
    #[arg(long, value_parser = parse_dist, default_value = "x^2")]
    pub dist: Vec<DegreeDistribution>,

    /// Offered loads as start:stop:step (inclusive) or a comma separated list.
    #[arg(long = "g", value_parser = parse_loads, default_value = "0.1:1.2:0.05")]
    pub loads: Loads,

    /// SNR values in dB (comma separated).
    #[arg(long = "snr-db", value_delimiter = ',', allow_hyphen_values = true)]
    pub snr_db: Option<Vec<f64>>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Simulated slots per load point.
    #[arg(long, default_value_t = crdsa::engine::DEFAULT_TOTAL_SLOTS)]
    pub slots: u64,

    /// Warm-up slots excluded from statistics (default: 10 windows).
    #[arg(long)]
    pub warmup: Option<u64>,

    /// Frame length N_S / sliding window N_sw in slots.
    #[arg(long, default_value_t = crdsa::engine::DEFAULT_WINDOW)]
    pub window: u64,

    /// Maximum peeling iterations.
    #[arg(long, default_value_t = crdsa::engine::DEFAULT_MAX_ITERATIONS)]
    pub imax: usize,

    /// Sliding receiver memory in windows.
    #[arg(long, default_value_t = crdsa::engine::DEFAULT_MEMORY_MULTIPLIER)]
    pub memory_multiplier: usize,

    /// Confidence level of the PLR intervals.
    #[arg(long, default_value_t = crdsa::engine::DEFAULT_CONFIDENCE)]
    pub confidence: f64,

    /// Output CSV file, "-" for stdout.
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    /// Throughput CSV written by a sweep subcommand.
    #[arg(long)]
    pub curve: PathBuf,

    /// Number of users M.
    #[arg(long)]
    pub population: u32,

    /// Per-slot transmission probability of a user with fresh traffic.
    #[arg(long = "p-tx")]
    pub p_tx: f64,

    /// Per-slot retransmission probability of a backlogged user.
    #[arg(long = "p-retx")]
    pub p_retx: f64,

    /// Use only curve rows of this scheme.
    #[arg(long)]
    pub scheme: Option<String>,

    /// Use only curve rows of this distribution.
    #[arg(long)]
    pub dist: Option<String>,

    /// Intervals of the backlog grid scanned for sign changes.
    #[arg(long, default_value_t = crdsa::stability::DEFAULT_GRID_POINTS)]
    pub grid: usize,

    /// Also write the contour tabulated over this many backlog intervals.
    #[arg(long)]
    pub contour: Option<usize>,

    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    /// Output directory (default: $SIMULATE_OUTPUT_DIR or ./results).
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Simulated slots per load point.
    #[arg(long, default_value_t = crdsa::engine::DEFAULT_TOTAL_SLOTS)]
    pub slots: u64,
}

/// A validated list of offered loads.
#[derive(Debug, Clone, PartialEq)]
pub struct Loads(pub Vec<f64>);

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: crdsa::SimError| e.to_string())
}

fn parse_dist(s: &str) -> Result<DegreeDistribution, String> {
    s.parse().map_err(|e: crdsa::DistributionError| e.to_string())
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("load {s} must be a finite value >= 0"))
    }
}

/// `start:stop:step` keeps every grid point below `stop + step / 2`, so the
/// end point is included within half a step; otherwise a comma separated list.
pub fn parse_loads(s: &str) -> Result<Loads, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts[..] {
        [start, stop, step] => {
            let (start, stop, step) = (parse_number(start)?, parse_number(stop)?, parse_number(step)?);
            if step <= 0.0 {
                return Err("step must be > 0".into());
            }
            if stop < start {
                return Err("stop must not be below start".into());
            }
            let n = ((stop - start) / step + 0.5).ceil() as usize - 1;
            Ok(Loads(crdsa::figures::load_grid(start, step, n + 1)))
        }
        [_] => s.split(',').map(parse_number).collect::<Result<_, _>>().map(Loads),
        _ => Err(format!("{s:?}: expected start:stop:step or a comma separated list")),
    }
}
