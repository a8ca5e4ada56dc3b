//! Workload generators shared by the benchmarks.

use crdsa::{next_frame_start, place_fb, DegreeDistribution, SlotGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One frame of `frame_len` slots carrying `round(load * frame_len)` packets.
pub fn random_frame(frame_len: u64, load: f64, dist: &DegreeDistribution, seed: u64) -> SlotGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = next_frame_start(0, frame_len);
    let packets = (load * frame_len as f64).round() as u64;
    let mut grid = SlotGrid::new(start, frame_len as usize);
    for id in 0..packets {
        let degree = dist.sample(rng.random());
        let p = place_fb(id, degree, start, frame_len, &mut rng).expect("degree fits the frame");
        grid.insert(p).expect("fresh packet id");
    }
    grid
}
