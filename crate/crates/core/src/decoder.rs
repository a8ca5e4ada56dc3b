//! Iterative interference cancellation ("peeling") receivers.
//!
//! The receiver sees a sequence of slots. A slot holding exactly one burst
//! yields that burst's packet; every burst carries pointers to the sibling
//! replicas, so once a packet is known its other replicas are subtracted from
//! their slots. That can leave further slots with a single burst, and so on.
//! Cancellation is assumed perfect and there is no capture: a slot with two
//! or more bursts yields nothing.
//!
//! One iteration decodes every packet sitting alone in a slot at the start of
//! the iteration and then removes all their replicas. Slots that become
//! singletons during iteration `k` are decoded in iteration `k + 1`.
//!
//! Two receivers are provided:
//!
//! * [`decode_frame`] peels one self-contained frame ([`SlotGrid`]).
//! * [`SlidingDecoder`] ingests an unbounded stream of slots, keeping a FIFO
//!   buffer of the most recent `capacity` slots.
//!
//! [`oracle_peel`] is a deliberately naive fixed-point reference used by the
//! tests.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::traffic::{PacketId, ReplicaPlacement, SlotIndex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecoderError {
    #[error("replica of packet {packet_id} at slot {slot} lies outside the grid [{start}, {end})")]
    OutOfRange { packet_id: PacketId, slot: SlotIndex, start: SlotIndex, end: SlotIndex },
    #[error("packet {0} was already added to the grid")]
    DuplicatePacket(PacketId),
    #[error("slot {slot} ingested after slot {last}; slots must arrive in increasing order")]
    OutOfOrder { slot: SlotIndex, last: SlotIndex },
    #[error("burst of packet {packet_id} delivered in slot {slot} which is not one of its replica slots")]
    ForeignBurst { packet_id: PacketId, slot: SlotIndex },
    #[error("packet {packet_id} delivered twice in slot {slot}")]
    RepeatedBurst { packet_id: PacketId, slot: SlotIndex },
    #[error("packet {0} changed its replica set between bursts")]
    InconsistentReplicas(PacketId),
    #[error("invalid decoder parameter: {0}")]
    InvalidParameter(&'static str),
}

/// Bursts received over a contiguous range of slots.
///
/// Each slot keeps the packets whose burst is still present, i.e. not yet
/// cancelled. A packet appears at most once per slot.
#[derive(Debug, Clone, Default)]
pub struct SlotGrid {
    first_slot: SlotIndex,
    slots: Vec<Vec<usize>>,
    packets: Vec<ReplicaPlacement>,
    decoded: Vec<bool>,
    ids: HashSet<PacketId>,
}

impl SlotGrid {
    /// An empty grid covering `[first_slot, first_slot + len)`.
    pub fn new(first_slot: SlotIndex, len: usize) -> Self {
        Self {
            first_slot,
            slots: vec![Vec::new(); len],
            packets: Vec::new(),
            decoded: Vec::new(),
            ids: HashSet::new(),
        }
    }

    pub fn from_placements(
        first_slot: SlotIndex,
        len: usize,
        placements: impl IntoIterator<Item = ReplicaPlacement>,
    ) -> Result<Self, DecoderError> {
        let mut grid = Self::new(first_slot, len);
        for p in placements {
            grid.insert(p)?;
        }
        Ok(grid)
    }

    /// Adds every replica of `placement`; all of them must fall in the grid.
    pub fn insert(&mut self, placement: ReplicaPlacement) -> Result<(), DecoderError> {
        let end = self.end_slot();
        if let Some(&slot) =
            placement.slots.iter().find(|&&s| s < self.first_slot || s >= end)
        {
            return Err(DecoderError::OutOfRange {
                packet_id: placement.packet_id,
                slot,
                start: self.first_slot,
                end,
            });
        }
        if !self.ids.insert(placement.packet_id) {
            return Err(DecoderError::DuplicatePacket(placement.packet_id));
        }
        let idx = self.packets.len();
        for &s in &placement.slots {
            self.slots[(s - self.first_slot) as usize].push(idx);
        }
        self.packets.push(placement);
        self.decoded.push(false);
        Ok(())
    }

    pub fn first_slot(&self) -> SlotIndex {
        self.first_slot
    }

    pub fn end_slot(&self) -> SlotIndex {
        self.first_slot + self.slots.len() as u64
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn placements(&self) -> &[ReplicaPlacement] {
        &self.packets
    }

    /// Number of bursts still present in `slot`.
    pub fn occupancy(&self, slot: SlotIndex) -> usize {
        self.slot_offset(slot).map_or(0, |o| self.slots[o].len())
    }

    /// Packets whose burst is still present in `slot`.
    pub fn bursts(&self, slot: SlotIndex) -> Vec<PacketId> {
        self.slot_offset(slot)
            .map(|o| self.slots[o].iter().map(|&i| self.packets[i].packet_id).collect())
            .unwrap_or_default()
    }

    /// Packets not decoded so far.
    pub fn undecoded(&self) -> Vec<PacketId> {
        self.packets
            .iter()
            .zip(&self.decoded)
            .filter(|(_, &d)| !d)
            .map(|(p, _)| p.packet_id)
            .collect()
    }

    fn slot_offset(&self, slot: SlotIndex) -> Option<usize> {
        (slot >= self.first_slot && slot < self.end_slot())
            .then(|| (slot - self.first_slot) as usize)
    }
}

/// Result of a peeling pass.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PeelOutcome {
    /// Decoded packets in decoding order.
    pub decoded: Vec<PacketId>,
    /// Iterations that decoded at least one packet.
    pub iterations: usize,
}

/// Peels `grid` in place for at most `max_iterations` iterations.
///
/// Stops early once an iteration has nothing to decode. On return the grid
/// holds only the bursts of undecoded packets.
pub fn peel(grid: &mut SlotGrid, max_iterations: usize) -> PeelOutcome {
    peel_inner(grid, max_iterations, None)
}

/// Like [`peel`], but slots are visited within each iteration in the order
/// given by `scan_order`, a permutation of the grid's slot offsets.
///
/// The decoded set does not depend on the scan order.
pub fn peel_with_scan_order(
    grid: &mut SlotGrid,
    max_iterations: usize,
    scan_order: &[usize],
) -> PeelOutcome {
    assert_eq!(scan_order.len(), grid.len(), "scan order must cover every slot");
    let mut rank = vec![0usize; grid.len()];
    for (r, &offset) in scan_order.iter().enumerate() {
        rank[offset] = r;
    }
    peel_inner(grid, max_iterations, Some(&rank))
}

fn peel_inner(grid: &mut SlotGrid, max_iterations: usize, rank: Option<&[usize]>) -> PeelOutcome {
    let mut outcome = PeelOutcome::default();
    let mut frontier: Vec<usize> = (0..grid.slots.len()).filter(|&o| grid.slots[o].len() == 1).collect();
    while outcome.iterations < max_iterations {
        frontier.retain(|&o| grid.slots[o].len() == 1);
        if frontier.is_empty() {
            break;
        }
        if let Some(rank) = rank {
            frontier.sort_unstable_by_key(|&o| rank[o]);
        }
        outcome.iterations += 1;
        let mut next = Vec::new();
        for &o in &frontier {
            // Emptied earlier in this iteration by its own packet's decoding.
            let [idx] = grid.slots[o][..] else { continue };
            grid.decoded[idx] = true;
            let packet = &grid.packets[idx];
            outcome.decoded.push(packet.packet_id);
            log::trace!(
                "{},{},decoded,{}",
                grid.first_slot + o as u64,
                packet.packet_id,
                outcome.iterations
            );
            for &s in &packet.slots {
                let so = (s - grid.first_slot) as usize;
                let bursts = &mut grid.slots[so];
                if let Some(pos) = bursts.iter().position(|&i| i == idx) {
                    bursts.swap_remove(pos);
                    if bursts.len() == 1 {
                        next.push(so);
                    }
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        frontier = next;
    }
    outcome
}

/// Outcome of decoding one frame.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrameOutcome {
    pub decoded: Vec<PacketId>,
    /// Packets with replicas in the frame that could not be decoded.
    pub lost: Vec<PacketId>,
    pub iterations: usize,
}

/// Frame-based receiver: every collision is resolvable within the frame, so
/// whatever is undecoded after peeling is lost and the frame can be dropped.
pub fn decode_frame(mut grid: SlotGrid, max_iterations: usize) -> FrameOutcome {
    let PeelOutcome { decoded, iterations } = peel(&mut grid, max_iterations);
    let lost = grid.undecoded();
    for id in &lost {
        log::trace!("{},{},lost,{}", grid.end_slot().saturating_sub(1), id, iterations);
    }
    FrameOutcome { decoded, lost, iterations }
}

/// Reference fixed point: repeatedly finds the first slot holding a single
/// burst, decodes it, and restarts the scan from scratch. No iteration cap.
pub fn oracle_peel(grid: &SlotGrid) -> BTreeSet<PacketId> {
    let replicas: BTreeMap<PacketId, &[SlotIndex]> =
        grid.placements().iter().map(|p| (p.packet_id, &p.slots[..])).collect();
    let mut slots: BTreeMap<SlotIndex, BTreeSet<PacketId>> = BTreeMap::new();
    for slot in grid.first_slot()..grid.end_slot() {
        let bursts: BTreeSet<PacketId> = grid.bursts(slot).into_iter().collect();
        if !bursts.is_empty() {
            slots.insert(slot, bursts);
        }
    }
    let mut decoded = BTreeSet::new();
    loop {
        let single = slots
            .values()
            .find(|b| b.len() == 1)
            .and_then(|b| b.iter().next().copied());
        let Some(packet) = single else { break };
        decoded.insert(packet);
        for slot in replicas[&packet] {
            if let Some(b) = slots.get_mut(slot) {
                b.remove(&packet);
            }
        }
    }
    decoded
}

/// Something the streaming receiver concluded about a packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeEvent {
    /// Decoded while `slot` was the newest ingested slot.
    Decoded { packet_id: PacketId, slot: SlotIndex, iteration: usize },
    /// The slot holding the packet's last replica was evicted at `slot`.
    Lost { packet_id: PacketId, slot: SlotIndex },
}

#[derive(Debug, Clone)]
struct PacketEntry {
    slots: Vec<SlotIndex>,
    decoded: bool,
}

impl PacketEntry {
    fn last_slot(&self) -> SlotIndex {
        *self.slots.last().expect("non-empty replica set")
    }
}

/// Streaming receiver for unframed (sliding window) access.
///
/// Slots are ingested one at a time in increasing order. After each ingest
/// the decoder runs a peeling pass over the buffered slots with a fresh
/// budget of `max_iterations`, then evicts the oldest slots beyond
/// `capacity`. Replicas of already decoded packets are cancelled as they
/// arrive. A packet becomes lost when the slot holding its last replica is
/// evicted while it is still undecoded; until then it is pending, and its
/// remaining bursts keep interfering.
#[derive(Debug, Clone)]
pub struct SlidingDecoder {
    capacity: usize,
    max_iterations: usize,
    /// Absolute index of `buffer[0]`.
    oldest: SlotIndex,
    buffer: VecDeque<Vec<PacketId>>,
    packets: HashMap<PacketId, PacketEntry>,
    /// Singleton slots left over when the iteration budget ran out.
    frontier: Vec<SlotIndex>,
    last_ingested: Option<SlotIndex>,
    decoded: u64,
    lost: u64,
    iterations_used: usize,
}

impl SlidingDecoder {
    pub fn new(capacity: usize, max_iterations: usize) -> Result<Self, DecoderError> {
        if capacity == 0 {
            return Err(DecoderError::InvalidParameter("buffer capacity must be at least one slot"));
        }
        if max_iterations == 0 {
            return Err(DecoderError::InvalidParameter("iteration budget must be at least 1"));
        }
        Ok(Self {
            capacity,
            max_iterations,
            oldest: 0,
            buffer: VecDeque::with_capacity(capacity + 1),
            packets: HashMap::new(),
            frontier: Vec::new(),
            last_ingested: None,
            decoded: 0,
            lost: 0,
            iterations_used: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Total packets decoded so far.
    pub fn decoded_count(&self) -> u64 {
        self.decoded
    }

    /// Total packets declared lost so far.
    pub fn lost_count(&self) -> u64 {
        self.lost
    }

    /// Packets seen but neither decoded nor lost.
    pub fn pending_count(&self) -> usize {
        self.packets.values().filter(|e| !e.decoded).count()
    }

    /// Iterations used by the most recent ingest.
    pub fn iterations_used(&self) -> usize {
        self.iterations_used
    }

    /// Buffered slot range `[oldest, newest]`, if any slot is buffered.
    pub fn buffered_range(&self) -> Option<(SlotIndex, SlotIndex)> {
        (!self.buffer.is_empty()).then(|| (self.oldest, self.oldest + self.buffer.len() as u64 - 1))
    }

    /// Number of uncancelled bursts in a buffered slot.
    pub fn occupancy(&self, slot: SlotIndex) -> usize {
        self.offset(slot).map_or(0, |o| self.buffer[o].len())
    }

    pub fn ingest<'a>(
        &mut self,
        slot: SlotIndex,
        bursts: impl IntoIterator<Item = &'a ReplicaPlacement>,
    ) -> Result<Vec<DecodeEvent>, DecoderError> {
        let mut events = Vec::new();
        self.ingest_into(slot, bursts, &mut events)?;
        Ok(events)
    }

    /// Ingests `slot` and appends the resulting events to `events`.
    ///
    /// Skipped slot indices are treated as empty slots.
    pub fn ingest_into<'a>(
        &mut self,
        slot: SlotIndex,
        bursts: impl IntoIterator<Item = &'a ReplicaPlacement>,
        events: &mut Vec<DecodeEvent>,
    ) -> Result<(), DecoderError> {
        match self.last_ingested {
            Some(last) if slot <= last => return Err(DecoderError::OutOfOrder { slot, last }),
            Some(last) => {
                for empty in last + 1..slot {
                    self.push_slot(empty, Vec::new(), events);
                }
            }
            None => self.oldest = slot,
        }

        let mut contents = Vec::new();
        for placement in bursts {
            let id = placement.packet_id;
            if placement.slots.binary_search(&slot).is_err() {
                return Err(DecoderError::ForeignBurst { packet_id: id, slot });
            }
            if contents.contains(&id) {
                return Err(DecoderError::RepeatedBurst { packet_id: id, slot });
            }
            match self.packets.get(&id) {
                Some(entry) => {
                    if entry.slots != placement.slots {
                        return Err(DecoderError::InconsistentReplicas(id));
                    }
                    if entry.decoded {
                        // Known content: cancelled on arrival.
                        if entry.last_slot() == slot {
                            self.packets.remove(&id);
                        }
                        continue;
                    }
                }
                None => {
                    self.packets.insert(
                        id,
                        PacketEntry { slots: placement.slots.clone(), decoded: false },
                    );
                }
            }
            contents.push(id);
        }
        self.push_slot(slot, contents, events);
        Ok(())
    }

    fn push_slot(&mut self, slot: SlotIndex, contents: Vec<PacketId>, events: &mut Vec<DecodeEvent>) {
        if contents.len() == 1 {
            self.frontier.push(slot);
        }
        self.buffer.push_back(contents);
        self.last_ingested = Some(slot);
        self.iterations_used = self.peel_buffer(slot, events);
        self.evict(slot, events);
    }

    fn offset(&self, slot: SlotIndex) -> Option<usize> {
        (slot >= self.oldest && slot < self.oldest + self.buffer.len() as u64)
            .then(|| (slot - self.oldest) as usize)
    }

    fn peel_buffer(&mut self, now: SlotIndex, events: &mut Vec<DecodeEvent>) -> usize {
        let mut iterations = 0;
        let mut frontier = std::mem::take(&mut self.frontier);
        while iterations < self.max_iterations {
            frontier.retain(|&s| self.offset(s).is_some_and(|o| self.buffer[o].len() == 1));
            frontier.sort_unstable();
            frontier.dedup();
            if frontier.is_empty() {
                break;
            }
            iterations += 1;
            let mut next = Vec::new();
            for &s in &frontier {
                let o = (s - self.oldest) as usize;
                let [id] = self.buffer[o][..] else { continue };
                let entry = self.packets.get_mut(&id).expect("buffered packet is tracked");
                entry.decoded = true;
                self.decoded += 1;
                events.push(DecodeEvent::Decoded { packet_id: id, slot: now, iteration: iterations });
                log::trace!("{now},{id},decoded,{iterations}");
                let last = entry.last_slot();
                let (oldest, len) = (self.oldest, self.buffer.len() as u64);
                for &r in &entry.slots {
                    if r < oldest || r >= oldest + len {
                        continue;
                    }
                    let bursts = &mut self.buffer[(r - oldest) as usize];
                    if let Some(pos) = bursts.iter().position(|&p| p == id) {
                        bursts.swap_remove(pos);
                        if bursts.len() == 1 {
                            next.push(r);
                        }
                    }
                }
                if last <= now {
                    self.packets.remove(&id);
                }
            }
            frontier = next;
        }
        frontier.retain(|&s| self.offset(s).is_some_and(|o| self.buffer[o].len() == 1));
        self.frontier = frontier;
        iterations
    }

    fn evict(&mut self, now: SlotIndex, events: &mut Vec<DecodeEvent>) {
        while self.buffer.len() > self.capacity {
            let evicted = self.oldest;
            let contents = self.buffer.pop_front().expect("buffer over capacity");
            self.oldest += 1;
            for id in contents {
                let last = self.packets.get(&id).map(PacketEntry::last_slot);
                if last == Some(evicted) {
                    self.packets.remove(&id);
                    self.lost += 1;
                    events.push(DecodeEvent::Lost { packet_id: id, slot: now });
                    log::trace!("{now},{id},lost,0");
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn placement(id: PacketId, slots: &[SlotIndex]) -> ReplicaPlacement {
        ReplicaPlacement::new(id, slots.to_vec())
    }

    fn grid(len: usize, packets: &[(PacketId, &[SlotIndex])]) -> SlotGrid {
        SlotGrid::from_placements(0, len, packets.iter().map(|(id, s)| placement(*id, s))).unwrap()
    }

    fn sorted(mut v: Vec<PacketId>) -> Vec<PacketId> {
        v.sort_unstable();
        v
    }

    #[test]
    fn empty_grid_decodes_nothing() {
        let mut g = SlotGrid::new(0, 10);
        assert_eq!(peel(&mut g, 50), PeelOutcome::default());
        assert!(oracle_peel(&g).is_empty());
        assert_eq!(decode_frame(SlotGrid::new(0, 200), 50), FrameOutcome::default());
    }

    #[test]
    fn clean_packet_decodes_in_one_iteration() {
        let mut g = grid(4, &[(7, &[1, 2])]);
        let out = peel(&mut g, 50);
        assert_eq!(out.decoded, vec![7]);
        assert_eq!(out.iterations, 1);
        assert_eq!(g.occupancy(1) + g.occupancy(2), 0);
        assert_eq!(oracle_peel(&grid(4, &[(7, &[1, 2])])), BTreeSet::from([7]));
    }

    #[test]
    fn two_packet_loop_is_unsolvable() {
        let g = grid(4, &[(0, &[1, 2]), (1, &[1, 2])]);
        assert!(oracle_peel(&g).is_empty());
        let mut peeled = g.clone();
        assert!(peel(&mut peeled, 50).decoded.is_empty());
        let out = decode_frame(g, 50);
        assert!(out.decoded.is_empty());
        assert_eq!(sorted(out.lost), vec![0, 1]);
    }

    #[test]
    fn chain_peels_one_packet_per_iteration() {
        let g = grid(5, &[(0, &[1, 2]), (1, &[2, 3]), (2, &[3, 4])]);
        // Slots 1 and 4 start as singletons, so A and C go in iteration 1
        // and B follows once both are cancelled.
        let mut peeled = g.clone();
        let out = peel(&mut peeled, 50);
        assert_eq!(sorted(out.decoded.clone()), vec![0, 1, 2]);
        assert!(out.iterations <= 3);
        assert_eq!(oracle_peel(&g), BTreeSet::from([0, 1, 2]));

        let mut capped = g.clone();
        let out = peel(&mut capped, 1);
        assert_eq!(sorted(out.decoded), vec![0, 2]);
    }

    #[test]
    fn strict_chain_needs_one_iteration_per_link() {
        // Only slot 0 starts clean: A, then B, then C.
        let g = grid(6, &[(0, &[0, 1]), (1, &[1, 2]), (2, &[2, 3]), (9, &[3, 4]), (8, &[4, 5]), (7, &[4, 5])]);
        let mut peeled = g.clone();
        let out = peel(&mut peeled, 50);
        assert_eq!(out.decoded, vec![0, 1, 2, 9]);
        assert_eq!(out.iterations, 4);
        for cap in 1..=4 {
            let mut capped = g.clone();
            assert_eq!(peel(&mut capped, cap).decoded.len(), cap);
        }
        assert_eq!(sorted(decode_frame(g, 50).lost), vec![7, 8]);
    }

    #[test]
    fn grid_rejects_bad_input() {
        let mut g = SlotGrid::new(10, 5);
        assert!(matches!(g.insert(placement(0, &[9, 10])), Err(DecoderError::OutOfRange { .. })));
        assert!(matches!(g.insert(placement(0, &[15])), Err(DecoderError::OutOfRange { .. })));
        g.insert(placement(0, &[10, 14])).unwrap();
        assert_eq!(g.insert(placement(0, &[11])), Err(DecoderError::DuplicatePacket(0)));
    }

    #[test]
    fn scan_order_does_not_change_result() {
        let g = grid(5, &[(0, &[1, 2]), (1, &[2, 3]), (2, &[3, 4])]);
        let mut a = g.clone();
        let mut b = g.clone();
        let fwd = peel_with_scan_order(&mut a, 50, &[0, 1, 2, 3, 4]);
        let rev = peel_with_scan_order(&mut b, 50, &[4, 3, 2, 1, 0]);
        assert_eq!(sorted(fwd.decoded), sorted(rev.decoded));
        assert_eq!(fwd.iterations, rev.iterations);
    }

    #[test]
    fn sliding_single_packet() {
        let mut dec = SlidingDecoder::new(10, 50).unwrap();
        let p = placement(1, &[1, 2]);
        assert!(dec.ingest(0, []).unwrap().is_empty());
        let ev = dec.ingest(1, [&p]).unwrap();
        assert_eq!(ev, vec![DecodeEvent::Decoded { packet_id: 1, slot: 1, iteration: 1 }]);
        // The second replica is cancelled on arrival.
        assert!(dec.ingest(2, [&p]).unwrap().is_empty());
        assert_eq!(dec.occupancy(2), 0);
        assert_eq!(dec.decoded_count(), 1);
        assert_eq!(dec.pending_count(), 0);
    }

    #[test]
    fn sliding_loop_is_lost_after_eviction() {
        let mut dec = SlidingDecoder::new(3, 50).unwrap();
        let a = placement(0, &[1, 2]);
        let b = placement(1, &[1, 2]);
        let mut events = Vec::new();
        dec.ingest_into(1, [&a, &b], &mut events).unwrap();
        dec.ingest_into(2, [&a, &b], &mut events).unwrap();
        assert!(events.is_empty());
        assert_eq!(dec.pending_count(), 2);
        for s in 3..=4 {
            dec.ingest_into(s, [], &mut events).unwrap();
        }
        // Slot 1 evicted: both packets still have slot 2 buffered.
        assert!(events.is_empty());
        dec.ingest_into(5, [], &mut events).unwrap();
        let mut lost: Vec<_> = events
            .iter()
            .map(|e| match e {
                DecodeEvent::Lost { packet_id, slot } => {
                    assert_eq!(*slot, 5);
                    *packet_id
                }
                other => panic!("unexpected {other:?}"),
            })
            .collect();
        lost.sort_unstable();
        assert_eq!(lost, vec![0, 1]);
        assert_eq!(dec.lost_count(), 2);
        assert_eq!(dec.pending_count(), 0);
    }

    #[test]
    fn sliding_resolves_across_window() {
        // B = {2,3} collides with A in slot 2 and C in slot 3; C's clean copy
        // at slot 5 arrives last and unlocks the chain backwards.
        let a = placement(0, &[1, 2]);
        let b = placement(1, &[2, 3]);
        let c = placement(2, &[3, 5]);
        let d = placement(3, &[1, 4]);
        let e = placement(4, &[4, 6]);
        let mut dec = SlidingDecoder::new(100, 50).unwrap();
        let mut events = Vec::new();
        dec.ingest_into(1, [&a, &d], &mut events).unwrap();
        dec.ingest_into(2, [&a, &b], &mut events).unwrap();
        dec.ingest_into(3, [&b, &c], &mut events).unwrap();
        dec.ingest_into(4, [&d, &e], &mut events).unwrap();
        assert!(events.is_empty());
        dec.ingest_into(5, [&c], &mut events).unwrap();
        let decoded: Vec<_> = events
            .iter()
            .filter_map(|e| match e {
                DecodeEvent::Decoded { packet_id, .. } => Some(*packet_id),
                _ => None,
            })
            .collect();
        assert_eq!(decoded, vec![2, 1, 0, 3, 4]);
        assert_eq!(dec.iterations_used(), 5);
        dec.ingest_into(6, [&e], &mut events).unwrap();
        assert_eq!(dec.decoded_count(), 5);
    }

    #[test]
    fn sliding_rejects_bad_input() {
        assert!(SlidingDecoder::new(0, 50).is_err());
        assert!(SlidingDecoder::new(5, 0).is_err());
        let mut dec = SlidingDecoder::new(5, 50).unwrap();
        let p = placement(0, &[3, 4]);
        dec.ingest(3, [&p]).unwrap();
        assert_eq!(dec.ingest(3, []), Err(DecoderError::OutOfOrder { slot: 3, last: 3 }));
        assert_eq!(dec.ingest(2, []), Err(DecoderError::OutOfOrder { slot: 2, last: 3 }));
        assert_eq!(
            dec.ingest(5, [&p]),
            Err(DecoderError::ForeignBurst { packet_id: 0, slot: 5 })
        );
        let q = placement(1, &[6]);
        assert_eq!(
            dec.ingest(6, [&q, &q]),
            Err(DecoderError::RepeatedBurst { packet_id: 1, slot: 6 })
        );
    }

    #[test]
    fn sliding_gap_counts_as_empty_slots() {
        let mut dec = SlidingDecoder::new(2, 50).unwrap();
        let a = placement(0, &[0, 1]);
        let b = placement(1, &[0, 1]);
        dec.ingest(0, [&a, &b]).unwrap();
        dec.ingest(1, [&a, &b]).unwrap();
        let ev = dec.ingest(10, []).unwrap();
        assert_eq!(ev.len(), 2);
        assert_eq!(dec.buffered_range(), Some((9, 10)));
    }
}
