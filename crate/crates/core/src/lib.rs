//! Monte Carlo simulation and analysis of slotted random access with
//! iterative interference cancellation.
//!
//! Three schemes are modelled on a common slot grid:
//!
//! * Slotted Aloha, one copy per packet.
//! * Frame-based CRDSA, where every replica of a packet lands in the next
//!   frame and the receiver peels each frame on its own.
//! * Sliding-window CRDSA, where the first replica goes out in the next slot,
//!   the rest within a window of `N_sw` slots, and a streaming receiver peels
//!   over a bounded buffer of recent slots.
//!
//! On top of the simulated throughput and packet loss the crate computes the
//! normalized efficiency under an average power constraint and analyses the
//! equilibria of a channel with retransmissions.
//!
//! ```
//! use crdsa::{run_point, DegreeDistribution, ExperimentConfig, Scheme};
//!
//! let mut config = ExperimentConfig::new(Scheme::SlidingWindow, DegreeDistribution::regular(2)?);
//! config.total_slots = 20_000;
//! let stats = run_point(&config, 0.4)?;
//! assert_eq!(stats.packets_sent, stats.packets_decoded + stats.packets_lost);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod decoder;
pub mod degree;
pub mod engine;
pub mod figures;
pub mod metrics;
pub mod report;
pub mod stability;
pub mod traffic;

pub use decoder::{
    decode_frame, oracle_peel, peel, peel_with_scan_order, DecodeEvent, DecoderError, FrameOutcome,
    PeelOutcome, SlidingDecoder, SlotGrid,
};
pub use degree::{DegreeDistribution, DistributionError};
pub use engine::{point_seed, run_point, sweep, sweep_all, ExperimentConfig, Scheme, SimError, SweepRow};
pub use metrics::{
    normalized_efficiency, snr_db_to_linear, throughput, wilson_interval, EfficiencyPoint, MetricsError,
    RunStats,
};
pub use stability::{
    classify_equilibrium, equilibrium_contour, find_equilibria, global_stability, BacklogChannel,
    ClosedLoop, CurveSelector, EquilibriumKind, EquilibriumPoint, EquilibriumSet, FnChannel,
    PopulationModel, StabilityError, ThroughputCurve,
};
pub use traffic::{
    draw_arrival_counts, next_frame_start, place_fb, place_sw, PacketArrival, PacketId, ReplicaPlacement,
    SlotIndex, TrafficError,
};
