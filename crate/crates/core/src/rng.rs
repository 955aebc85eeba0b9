//! Reproducible random streams: a master seed fans out into indexed child streams,
//! so parallel work items draw the same numbers regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Child stream `index` of `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Master seed for a named sub-task.
pub fn derive(master_seed: u64, task: u64) -> u64 {
    master_seed ^ task.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Child stream for a named sub-task, e.g. `substream(seed, 3, 17)` for item 17 of task 3.
pub fn substream(master_seed: u64, task: u64, index: u64) -> Stream {
    stream(derive(master_seed, task), index)
}
