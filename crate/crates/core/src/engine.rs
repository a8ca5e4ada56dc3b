//! End-to-end Monte Carlo runs and parameter sweeps.
//!
//! Every load point is simulated independently with its own ChaCha stream,
//! seeded from a SHA-256 digest of the master seed, the scheme, the
//! distribution and the load value. Points can therefore run in any order
//! and on any number of threads without changing their results.

use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::decoder::{decode_frame, DecodeEvent, DecoderError, SlidingDecoder, SlotGrid};
use crate::degree::{DegreeDistribution, DistributionError};
use crate::metrics::{EfficiencyPoint, MetricsError, RunStats};
use crate::traffic::{
    next_frame_start, place_fb, place_sw, ArrivalProcess, ReplicaPlacement, SlotIndex, TrafficError,
};

pub const DEFAULT_WINDOW: u64 = 200;
pub const DEFAULT_MAX_ITERATIONS: usize = 50;
pub const DEFAULT_MEMORY_MULTIPLIER: usize = 5;
pub const DEFAULT_TOTAL_SLOTS: u64 = 200_000;
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Traffic(#[from] TrafficError),
    #[error(transparent)]
    Decoder(#[from] DecoderError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("packet accounting broken: {0}")]
    Conservation(String),
    #[error("{scheme}({dist}) at G = {load}: {source}")]
    AtPoint { scheme: Scheme, dist: String, load: f64, source: Box<SimError> },
}

impl SimError {
    /// True when the failure comes from the configuration rather than a bug.
    pub fn is_config(&self) -> bool {
        match self {
            Self::Config(_) | Self::Distribution(_) | Self::Traffic(_) | Self::Metrics(_) => true,
            Self::AtPoint { source, .. } => source.is_config(),
            Self::Decoder(_) | Self::Conservation(_) => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// One copy per packet in the slot after it becomes ready.
    SlottedAloha,
    /// Frame-based CRDSA.
    FrameBased,
    /// Sliding-window CRDSA.
    SlidingWindow,
}

impl Scheme {
    pub fn id(self) -> &'static str {
        match self {
            Self::SlottedAloha => "sa",
            Self::FrameBased => "fb",
            Self::SlidingWindow => "sw",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Scheme {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sa" | "aloha" => Ok(Self::SlottedAloha),
            "fb" | "fb-crdsa" | "fb_crdsa" => Ok(Self::FrameBased),
            "sw" | "sw-crdsa" | "sw_crdsa" => Ok(Self::SlidingWindow),
            other => Err(SimError::Config(format!("unknown scheme {other:?} (expected sa, fb or sw)"))),
        }
    }
}

/// Everything needed to simulate one scheme over a grid of loads.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub distribution: DegreeDistribution,
    /// Frame length `N_S` for frame-based access, window `N_sw` otherwise.
    pub window: u64,
    pub max_iterations: usize,
    /// Sliding receiver memory in units of `window`.
    pub memory_multiplier: usize,
    pub loads: Vec<f64>,
    pub snr_db: Vec<f64>,
    pub total_slots: u64,
    /// Packets that become ready before this slot are not counted.
    pub warmup_slots: u64,
    pub seed: u64,
    pub confidence: f64,
}

impl ExperimentConfig {
    /// Defaults: 200-slot window, 50 iterations, memory of five windows,
    /// 2e5 slots per point with a warm-up of ten windows.
    pub fn new(scheme: Scheme, distribution: DegreeDistribution) -> Self {
        Self {
            scheme,
            distribution,
            window: DEFAULT_WINDOW,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            memory_multiplier: DEFAULT_MEMORY_MULTIPLIER,
            loads: Vec::new(),
            snr_db: vec![0.0],
            total_slots: DEFAULT_TOTAL_SLOTS,
            warmup_slots: 10 * DEFAULT_WINDOW,
            seed: 0,
            confidence: DEFAULT_CONFIDENCE,
        }
    }

    /// Slotted Aloha always sends a single copy.
    pub fn slotted_aloha() -> Self {
        Self::new(Scheme::SlottedAloha, DegreeDistribution::regular(1).expect("degree 1 is valid"))
    }

    pub fn with_window(mut self, window: u64) -> Self {
        self.window = window;
        self.warmup_slots = 10 * window;
        self
    }

    pub fn with_loads(mut self, loads: impl Into<Vec<f64>>) -> Self {
        self.loads = loads.into();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The distribution actually simulated: `x` for Slotted Aloha.
    pub fn effective_distribution(&self) -> DegreeDistribution {
        match self.scheme {
            Scheme::SlottedAloha => DegreeDistribution::regular(1).expect("degree 1 is valid"),
            _ => self.distribution.clone(),
        }
    }

    pub fn buffer_capacity(&self) -> usize {
        self.memory_multiplier * self.window as usize
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::Config(msg));
        if self.window == 0 {
            return bad("window / frame length must be at least one slot".into());
        }
        let max_degree = self.effective_distribution().max_degree();
        if u64::from(max_degree) > self.window {
            return bad(format!(
                "degree {max_degree} does not fit in a window of {} slots",
                self.window
            ));
        }
        if self.max_iterations == 0 {
            return bad("iteration limit must be at least 1".into());
        }
        if self.memory_multiplier == 0 {
            return bad("memory multiplier must be at least 1".into());
        }
        if self.total_slots <= self.warmup_slots {
            return bad(format!(
                "total slots ({}) must exceed warm-up slots ({})",
                self.total_slots, self.warmup_slots
            ));
        }
        if let Some(g) = self.loads.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return bad(format!("load {g} must be a finite value >= 0"));
        }
        if let Some(s) = self.snr_db.iter().find(|s| !s.is_finite()) {
            return bad(format!("SNR {s} dB is not finite"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return bad(format!("confidence {} must lie in (0, 1)", self.confidence));
        }
        Ok(())
    }

    pub fn point_seed(&self, g: f64) -> u64 {
        point_seed(self.seed, self.scheme, &self.effective_distribution().id(), g)
    }
}

/// Seed of one load point: the first eight bytes of
/// `SHA-256(master seed, scheme, distribution id, load bits)`.
pub fn point_seed(master: u64, scheme: Scheme, dist_id: &str, g: f64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(scheme.id().as_bytes());
    h.update([0]);
    h.update(dist_id.as_bytes());
    h.update([0]);
    h.update(g.to_bits().to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Running totals over the measured packets of one run.
#[derive(Debug, Default)]
struct Tally {
    sent: u64,
    decoded: u64,
    lost: u64,
    delay_sum: u64,
}

impl Tally {
    fn counts(&self, ready: SlotIndex, config: &ExperimentConfig) -> bool {
        ready >= config.warmup_slots && ready < config.total_slots
    }
}

/// Simulates one load point.
pub fn run_point(config: &ExperimentConfig, g: f64) -> Result<RunStats, SimError> {
    config.validate()?;
    let arrivals = ArrivalProcess::new(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.point_seed(g));
    let dist = config.effective_distribution();
    let tally = match config.scheme {
        Scheme::FrameBased => run_frames(config, &dist, &arrivals, &mut rng)?,
        Scheme::SlidingWindow | Scheme::SlottedAloha => run_sliding(config, &dist, &arrivals, &mut rng)?,
    };
    if tally.decoded + tally.lost != tally.sent {
        return Err(SimError::Conservation(format!(
            "sent {} != decoded {} + lost {}",
            tally.sent, tally.decoded, tally.lost
        )));
    }
    Ok(RunStats::from_counts(
        g,
        tally.sent,
        tally.decoded,
        tally.lost,
        config.total_slots - config.warmup_slots,
        tally.delay_sum,
        config.confidence,
    )?)
}

fn run_frames(
    config: &ExperimentConfig,
    dist: &DegreeDistribution,
    arrivals: &ArrivalProcess,
    rng: &mut ChaCha8Rng,
) -> Result<Tally, SimError> {
    let frame = config.window;
    let mut tally = Tally::default();
    let mut next_id = 0u64;
    let mut ready_of = Vec::new();
    let mut frame_start = 0;
    while frame_start < config.total_slots {
        let target = next_frame_start(frame_start, frame);
        let mut grid = SlotGrid::new(target, frame as usize);
        ready_of.clear();
        for ready in frame_start..(frame_start + frame).min(config.total_slots) {
            for _ in 0..arrivals.draw(rng) {
                let degree = dist.sample(rng.random());
                grid.insert(place_fb(next_id, degree, target, frame, rng)?)?;
                ready_of.push(ready);
                if tally.counts(ready, config) {
                    tally.sent += 1;
                }
                next_id += 1;
            }
        }
        let first_id = next_id - ready_of.len() as u64;
        let outcome = decode_frame(grid, config.max_iterations);
        let frame_end = target + frame - 1;
        for id in outcome.decoded {
            let ready = ready_of[(id - first_id) as usize];
            if tally.counts(ready, config) {
                tally.decoded += 1;
                tally.delay_sum += frame_end - ready;
            }
        }
        for id in outcome.lost {
            if tally.counts(ready_of[(id - first_id) as usize], config) {
                tally.lost += 1;
            }
        }
        frame_start += frame;
    }
    Ok(tally)
}

fn run_sliding(
    config: &ExperimentConfig,
    dist: &DegreeDistribution,
    arrivals: &ArrivalProcess,
    rng: &mut ChaCha8Rng,
) -> Result<Tally, SimError> {
    let window = config.window;
    let mut decoder = SlidingDecoder::new(config.buffer_capacity(), config.max_iterations)?;
    // Bucket `s % (window + 1)` holds the bursts to be received in slot `s`.
    let ring = (window + 1) as usize;
    let mut scheduled: Vec<Vec<Rc<ReplicaPlacement>>> = vec![Vec::new(); ring];
    let mut ready_of: Vec<SlotIndex> = Vec::new();
    let mut events = Vec::new();
    let mut tally = Tally::default();
    let drain = window + decoder.capacity() as u64;

    for slot in 0..config.total_slots + drain {
        let bucket = &mut scheduled[(slot % ring as u64) as usize];
        let received = std::mem::take(bucket);
        events.clear();
        decoder.ingest_into(slot, received.iter().map(|p| p.as_ref()), &mut events)?;
        for event in &events {
            match *event {
                DecodeEvent::Decoded { packet_id, slot: at, .. } => {
                    let ready = ready_of[packet_id as usize];
                    if tally.counts(ready, config) {
                        tally.decoded += 1;
                        tally.delay_sum += at - ready;
                    }
                }
                DecodeEvent::Lost { packet_id, .. } => {
                    if tally.counts(ready_of[packet_id as usize], config) {
                        tally.lost += 1;
                    }
                }
            }
        }
        // Reuse the bucket's allocation for slot + ring.
        let mut recycled = received;
        recycled.clear();
        scheduled[(slot % ring as u64) as usize] = recycled;

        if slot < config.total_slots {
            for _ in 0..arrivals.draw(rng) {
                let id = ready_of.len() as u64;
                let degree = dist.sample(rng.random());
                let placement = Rc::new(place_sw(id, degree, slot, window, rng)?);
                for &s in &placement.slots {
                    scheduled[(s % ring as u64) as usize].push(Rc::clone(&placement));
                }
                ready_of.push(slot);
                if tally.counts(slot, config) {
                    tally.sent += 1;
                }
            }
        }
    }
    if decoder.pending_count() != 0 {
        return Err(SimError::Conservation(format!(
            "{} packets still pending after drain",
            decoder.pending_count()
        )));
    }
    Ok(tally)
}

/// One output row: a simulated point evaluated at one SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub dist: String,
    pub mean_degree: f64,
    pub seed: u64,
    pub stats: RunStats,
    pub efficiency: EfficiencyPoint,
}

/// Runs every load of `config`; one row per (load, SNR).
pub fn sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>, SimError> {
    sweep_all(std::slice::from_ref(config))
}

/// Runs the load grids of several configurations in parallel on the current
/// rayon pool. Rows come out grouped by configuration, then load, then SNR,
/// regardless of scheduling.
pub fn sweep_all(configs: &[ExperimentConfig]) -> Result<Vec<SweepRow>, SimError> {
    for c in configs {
        c.validate()?;
        if c.snr_db.is_empty() {
            return Err(SimError::Config("at least one SNR value is required".into()));
        }
    }
    let points: Vec<(&ExperimentConfig, f64)> =
        configs.iter().flat_map(|c| c.loads.iter().map(move |&g| (c, g))).collect();
    let stats: Vec<RunStats> = points
        .par_iter()
        .map(|&(c, g)| {
            run_point(c, g).map_err(|e| SimError::AtPoint {
                scheme: c.scheme,
                dist: c.effective_distribution().id(),
                load: g,
                source: Box::new(e),
            })
        })
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    for ((c, g), stats) in points.into_iter().zip(stats) {
        let dist = c.effective_distribution();
        let (dist_id, mean_degree) = (dist.id(), dist.mean_degree());
        for &snr_db in &c.snr_db {
            let efficiency = EfficiencyPoint::new(&stats, c.scheme.id(), dist_id.clone(), mean_degree, snr_db)?;
            rows.push(SweepRow {
                scheme: c.scheme,
                dist: dist_id.clone(),
                mean_degree,
                seed: c.point_seed(g),
                stats: stats.clone(),
                efficiency,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x2() -> DegreeDistribution {
        DegreeDistribution::regular(2).unwrap()
    }

    fn small(scheme: Scheme) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(scheme, x2()).with_window(50);
        c.total_slots = 20_000;
        c
    }

    #[test]
    fn zero_load_point() {
        for scheme in [Scheme::SlottedAloha, Scheme::FrameBased, Scheme::SlidingWindow] {
            let s = run_point(&small(scheme), 0.0).unwrap();
            assert_eq!((s.packets_sent, s.plr, s.throughput), (0, 0.0, 0.0));
        }
    }

    #[test]
    fn conservation_holds() {
        for scheme in [Scheme::SlottedAloha, Scheme::FrameBased, Scheme::SlidingWindow] {
            for g in [0.3, 0.7, 1.5] {
                let s = run_point(&small(scheme), g).unwrap();
                assert_eq!(s.packets_sent, s.packets_decoded + s.packets_lost);
                assert!(s.packets_sent > 0);
            }
        }
    }

    #[test]
    fn deterministic_per_point() {
        let c = small(Scheme::SlidingWindow).with_seed(9);
        assert_eq!(run_point(&c, 0.6).unwrap(), run_point(&c, 0.6).unwrap());
        let other = c.clone().with_seed(10);
        assert_ne!(run_point(&c, 0.6).unwrap(), run_point(&other, 0.6).unwrap());
    }

    #[test]
    fn seeds_depend_on_every_key() {
        let base = point_seed(7, Scheme::FrameBased, "x^2", 0.5);
        assert_ne!(base, point_seed(8, Scheme::FrameBased, "x^2", 0.5));
        assert_ne!(base, point_seed(7, Scheme::SlidingWindow, "x^2", 0.5));
        assert_ne!(base, point_seed(7, Scheme::FrameBased, "x^3", 0.5));
        assert_ne!(base, point_seed(7, Scheme::FrameBased, "x^2", 0.55));
        assert_eq!(base, point_seed(7, Scheme::FrameBased, "x^2", 0.5));
    }

    #[test]
    fn config_errors() {
        let mut c = small(Scheme::FrameBased);
        c.window = 1;
        assert!(matches!(run_point(&c, 0.5), Err(SimError::Config(_))));
        let mut c = small(Scheme::FrameBased);
        c.warmup_slots = c.total_slots;
        assert!(run_point(&c, 0.5).unwrap_err().is_config());
        assert!(matches!(run_point(&small(Scheme::FrameBased), -1.0), Err(SimError::Traffic(_))));
        let mut c = small(Scheme::SlidingWindow);
        c.max_iterations = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn aloha_ignores_distribution() {
        let mut c = small(Scheme::SlottedAloha);
        c.distribution = DegreeDistribution::irsa8();
        assert_eq!(c.effective_distribution().id(), "x");
        c.window = 2;
        c.warmup_slots = 20;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("SW".parse::<Scheme>().unwrap(), Scheme::SlidingWindow);
        assert_eq!("fb".parse::<Scheme>().unwrap(), Scheme::FrameBased);
        assert_eq!("sa".parse::<Scheme>().unwrap(), Scheme::SlottedAloha);
        assert!("csma".parse::<Scheme>().is_err());
    }

    #[test]
    fn sweep_rows_per_snr_and_order_insensitive() {
        let mut c = small(Scheme::SlidingWindow).with_loads([0.2, 0.6]).with_seed(3);
        c.snr_db = vec![0.0, 6.0];
        let rows = sweep(&c).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].stats, rows[1].stats);
        assert_eq!(rows[1].efficiency.snr_db, 6.0);

        let reversed = sweep(&c.clone().with_loads([0.6, 0.2])).unwrap();
        assert_eq!(rows[0], reversed[2]);
        assert_eq!(rows[3], reversed[1]);
    }
}
