//! Seed plumbing. Every source of randomness in a run is a ChaCha8 stream
//! derived from one master seed plus a fixed label, so independent concerns
//! (PU split, batch order, mixup draws, init) never share a stream.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// splitmix64 finalizer; decorrelates nearby seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Streams carved out of a single run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Init,
    Split,
    PuConstruction,
    RnMining,
    Batches,
    Mixup,
    Eval,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Init => 1,
            Stream::Split => 2,
            Stream::PuConstruction => 3,
            Stream::RnMining => 4,
            Stream::Batches => 5,
            Stream::Mixup => 6,
            Stream::Eval => 7,
        }
    }
}

pub fn stream(seed: u64, s: Stream) -> Rng {
    Rng::seed_from_u64(mix(seed ^ mix(s.tag())))
}

pub fn from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(mix(seed))
}

/// Seed for the i-th repeat of an experiment.
pub fn repeat_seed(master: u64, repeat: usize) -> u64 {
    master.wrapping_add(1000 * repeat as u64)
}
