//! Poisson packet arrivals and replica placement on the slot grid.
//!
//! Time is measured in slots and arrivals are aligned to slot starts. A
//! packet that becomes ready during slot `t` can transmit at the earliest in
//! slot `t + 1`.
//!
//! * Frame-based placement puts every replica inside the next frame that
//!   starts after the packet became ready, uniformly without replacement.
//! * Sliding-window placement sends the first replica in slot `t + 1` and
//!   spreads the remaining ones uniformly without replacement over the
//!   following `N_sw - 1` slots.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

pub type PacketId = u64;
pub type SlotIndex = u64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrafficError {
    #[error("invalid load {0}: G must be a finite value >= 0")]
    InvalidLoad(f64),
    #[error("cannot place {degree} distinct replicas in a window of {window} slots")]
    PlacementInfeasible { degree: u32, window: u64 },
}

/// A logical packet that became ready for transmission at `ready_slot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PacketArrival {
    pub packet_id: PacketId,
    pub ready_slot: SlotIndex,
}

/// A packet together with the slots holding its replicas.
///
/// `slots` is sorted ascending and has no duplicates: replicas of one packet
/// never share a slot. Every burst carries this slot set as its pointers to
/// the sibling replicas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicaPlacement {
    pub packet_id: PacketId,
    pub slots: Vec<SlotIndex>,
}

impl ReplicaPlacement {
    pub fn new(packet_id: PacketId, mut slots: Vec<SlotIndex>) -> Self {
        slots.sort_unstable();
        slots.dedup();
        Self { packet_id, slots }
    }

    pub fn degree(&self) -> usize {
        self.slots.len()
    }

    pub fn first_slot(&self) -> SlotIndex {
        self.slots[0]
    }

    pub fn last_slot(&self) -> SlotIndex {
        *self.slots.last().expect("placement has at least one slot")
    }
}

fn check_load(g: f64) -> Result<(), TrafficError> {
    if g.is_finite() && g >= 0.0 {
        Ok(())
    } else {
        Err(TrafficError::InvalidLoad(g))
    }
}

/// A sampler for the number of packets that become ready in one slot.
#[derive(Debug, Clone, Copy)]
pub struct ArrivalProcess {
    poisson: Option<Poisson<f64>>,
}

impl ArrivalProcess {
    pub fn new(g: f64) -> Result<Self, TrafficError> {
        check_load(g)?;
        let poisson = if g > 0.0 {
            Some(Poisson::new(g).map_err(|_| TrafficError::InvalidLoad(g))?)
        } else {
            None
        };
        Ok(Self { poisson })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.poisson {
            Some(p) => p.sample(rng) as u64,
            None => 0,
        }
    }
}

/// Independent Poisson(`g`) packet counts for `n_slots` consecutive slots.
pub fn draw_arrival_counts<R: Rng + ?Sized>(
    g: f64,
    n_slots: usize,
    rng: &mut R,
) -> Result<Vec<u64>, TrafficError> {
    let process = ArrivalProcess::new(g)?;
    Ok((0..n_slots).map(|_| process.draw(rng)).collect())
}

/// First slot of the frame a packet ready at `ready_slot` transmits in.
///
/// Frames are back to back from slot 0. A packet ready at any point of frame
/// `k`, including its very first slot, waits for frame `k + 1`.
pub fn next_frame_start(ready_slot: SlotIndex, frame_len: u64) -> SlotIndex {
    (ready_slot / frame_len + 1) * frame_len
}

/// Places `degree` replicas uniformly without replacement in
/// `[frame_start, frame_start + frame_len)`.
pub fn place_fb<R: Rng + ?Sized>(
    packet_id: PacketId,
    degree: u32,
    frame_start: SlotIndex,
    frame_len: u64,
    rng: &mut R,
) -> Result<ReplicaPlacement, TrafficError> {
    if degree == 0 || u64::from(degree) > frame_len {
        return Err(TrafficError::PlacementInfeasible { degree, window: frame_len });
    }
    let slots = index::sample(rng, frame_len as usize, degree as usize)
        .into_iter()
        .map(|offset| frame_start + offset as u64)
        .collect();
    Ok(ReplicaPlacement::new(packet_id, slots))
}

/// Places the first replica at `ready_slot + 1` and the other `degree - 1`
/// uniformly without replacement in `(ready_slot + 1, ready_slot + window]`.
pub fn place_sw<R: Rng + ?Sized>(
    packet_id: PacketId,
    degree: u32,
    ready_slot: SlotIndex,
    window: u64,
    rng: &mut R,
) -> Result<ReplicaPlacement, TrafficError> {
    if degree == 0 || u64::from(degree) > window {
        return Err(TrafficError::PlacementInfeasible { degree, window });
    }
    let first = ready_slot + 1;
    let mut slots = Vec::with_capacity(degree as usize);
    slots.push(first);
    if degree > 1 {
        slots.extend(
            index::sample(rng, (window - 1) as usize, (degree - 1) as usize)
                .into_iter()
                .map(|offset| first + 1 + offset as u64),
        );
    }
    Ok(ReplicaPlacement::new(packet_id, slots))
}
