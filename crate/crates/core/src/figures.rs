//! Canned experiments for the standard figure set.
//!
//! All figures use a 200-slot frame / window and at most 50 peeling
//! iterations. Loads run from 0.1 to 1.2 in steps of 0.05.
//!
//! | file     | content                                                      |
//! |----------|--------------------------------------------------------------|
//! | fig2.csv | throughput, FB and SW with `x^2`, `x^3`, `irsa8`              |
//! | fig3.csv | packet loss ratio, same series as fig2                       |
//! | fig4.csv | normalized efficiency at 0 dB, fig2 series plus SA           |
//! | fig5.csv | normalized efficiency at 6 dB                                |
//! | fig6.csv | normalized efficiency at 12 dB and 18 dB                     |
//! | fig7.csv | equilibrium contour and equilibria for SW(`x^2`)              |

use crate::degree::DegreeDistribution;
use crate::engine::{sweep_all, ExperimentConfig, Scheme, SimError, SweepRow, DEFAULT_TOTAL_SLOTS};
use crate::report::{write_sweep_csv, write_stability_csv};
use crate::stability::{
    equilibrium_contour, find_equilibria, ClosedLoop, PopulationModel, StabilityError, ThroughputCurve,
};

pub const FIGURE_SNR_DB: [f64; 4] = [0.0, 6.0, 12.0, 18.0];

/// Population used for the equilibrium contour. The new-traffic line
/// crosses the SW(`x^2`) throughput contour three times: near the origin
/// (stable), on the falling side of the throughput peak (unstable) and close
/// to full backlog (stable).
pub const CONTOUR_POPULATION: PopulationModel = PopulationModel { users: 400, p_tx: 0.00125, p_retx: 0.01 };

/// Intervals of the backlog grid in fig7.
pub const CONTOUR_INTERVALS: usize = 400;

#[derive(Debug, thiserror::Error)]
pub enum FigureError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    pub seed: u64,
    pub total_slots: u64,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self { seed: 0, total_slots: DEFAULT_TOTAL_SLOTS }
    }
}

/// A generated CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigureFile {
    pub name: String,
    pub contents: Vec<u8>,
}

/// `steps` values `start, start + step, ...`, rounded to 1e-9 so that grids
/// print cleanly.
pub fn load_grid(start: f64, step: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|i| ((start + step * i as f64) * 1e9).round() / 1e9).collect()
}

/// 0.1, 0.15, ..., 1.2
pub fn figure_loads() -> Vec<f64> {
    load_grid(0.1, 0.05, 23)
}

/// The three distributions compared in every figure.
pub fn figure_distributions() -> Vec<DegreeDistribution> {
    vec![
        DegreeDistribution::regular(2).expect("valid"),
        DegreeDistribution::regular(3).expect("valid"),
        DegreeDistribution::irsa8(),
    ]
}

/// SA first, then FB and SW for each distribution.
pub fn figure_configs(opts: &FigureOptions) -> Vec<ExperimentConfig> {
    let finish = |mut c: ExperimentConfig| {
        c.loads = figure_loads();
        c.snr_db = FIGURE_SNR_DB.to_vec();
        c.total_slots = opts.total_slots;
        c.seed = opts.seed;
        c
    };
    let mut configs = vec![finish(ExperimentConfig::slotted_aloha())];
    for scheme in [Scheme::FrameBased, Scheme::SlidingWindow] {
        for dist in figure_distributions() {
            configs.push(finish(ExperimentConfig::new(scheme, dist)));
        }
    }
    configs
}

/// SW(`x^2`) over a load range wide enough for [`CONTOUR_POPULATION`].
pub fn contour_config(opts: &FigureOptions) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(Scheme::SlidingWindow, DegreeDistribution::regular(2).expect("valid"));
    c.loads = load_grid(0.05, 0.05, 84);
    c.total_slots = opts.total_slots;
    c.seed = opts.seed;
    c
}

/// Throughput curve of one series, taken from its rows at the first SNR.
pub fn curve_from_rows(rows: &[SweepRow]) -> Result<ThroughputCurve, StabilityError> {
    let first_snr = rows.first().map(|r| r.efficiency.snr_db);
    let points = rows
        .iter()
        .filter(|r| Some(r.efficiency.snr_db) == first_snr)
        .map(|r| (r.stats.offered_load, r.stats.throughput))
        .collect();
    ThroughputCurve::new(points)
}

fn csv_file(name: &str, rows: &[SweepRow]) -> Result<FigureFile, FigureError> {
    let mut contents = Vec::new();
    write_sweep_csv(&mut contents, rows)?;
    Ok(FigureFile { name: name.to_string(), contents })
}

/// Runs every experiment and renders fig2.csv through fig7.csv.
pub fn generate(opts: &FigureOptions) -> Result<Vec<FigureFile>, FigureError> {
    let rows = sweep_all(&figure_configs(opts))?;
    let at_snr = |snr: &[f64], with_sa: bool| -> Vec<SweepRow> {
        rows.iter()
            .filter(|r| snr.contains(&r.efficiency.snr_db))
            .filter(|r| with_sa || r.scheme != Scheme::SlottedAloha)
            .cloned()
            .collect()
    };
    let crdsa = at_snr(&[0.0], false);

    let contour_rows = sweep_all(&[contour_config(opts)])?;
    let channel = ClosedLoop::new(CONTOUR_POPULATION, curve_from_rows(&contour_rows)?)?;
    let contour = equilibrium_contour(&channel, CONTOUR_INTERVALS)?;
    let equilibria = find_equilibria(&channel, CONTOUR_INTERVALS * 10)?;
    let mut fig7 = Vec::new();
    write_stability_csv(&mut fig7, &contour, &equilibria)?;

    Ok(vec![
        csv_file("fig2.csv", &crdsa)?,
        csv_file("fig3.csv", &crdsa)?,
        csv_file("fig4.csv", &at_snr(&[0.0], true))?,
        csv_file("fig5.csv", &at_snr(&[6.0], true))?,
        csv_file("fig6.csv", &at_snr(&[12.0, 18.0], true))?,
        FigureFile { name: "fig7.csv".to_string(), contents: fig7 },
    ])
}
