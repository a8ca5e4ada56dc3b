#![allow(dead_code)]

use crdsa::{ReplicaPlacement, SlotGrid};
use proptest::prelude::*;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small grids: up to `max_packets` packets over `1..=max_slots` slots,
/// degrees `1..=max_degree` capped by the grid length.
pub fn instance(
    max_packets: usize,
    max_slots: usize,
    max_degree: usize,
) -> impl Strategy<Value = (usize, Vec<Vec<u64>>)> {
    (1..=max_slots).prop_flat_map(move |len| {
        let degree = 1..=max_degree.min(len);
        let packet = degree.prop_flat_map(move |d| {
            proptest::sample::subsequence((0..len as u64).collect::<Vec<_>>(), d)
        });
        (Just(len), proptest::collection::vec(packet, 0..=max_packets))
    })
}

pub fn grid(len: usize, packets: &[Vec<u64>]) -> SlotGrid {
    SlotGrid::from_placements(
        0,
        len,
        packets.iter().enumerate().map(|(i, s)| ReplicaPlacement::new(i as u64, s.clone())),
    )
    .unwrap()
}

/// The fixed corpus of small instances, drawn from a seeded generator.
pub fn corpus(count: usize, seed: u64) -> Vec<(usize, Vec<Vec<u64>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.random_range(1..=20usize);
            let n = rng.random_range(0..=12usize);
            let packets = (0..n)
                .map(|_| {
                    let d = rng.random_range(1..=4usize.min(len));
                    let mut s: Vec<u64> =
                        index::sample(&mut rng, len, d).into_iter().map(|x| x as u64).collect();
                    s.sort_unstable();
                    s
                })
                .collect();
            (len, packets)
        })
        .collect()
}
