//! Splittable counter-based random streams.
//!
//! A [`StreamFamily`] is keyed by a master seed and a tag. Each substream is a
//! ChaCha8 stream selected by a 64-bit index, so trial `t` always sees the same
//! numbers no matter which worker runs it or in what order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministically combines a seed with a path of labels.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(mix64(master), |acc, &p| mix64(acc ^ mix64(p)))
}

/// Identifies the substream that produced a draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub seed: u64,
    pub index: u64,
}

#[derive(Debug, Clone)]
pub struct StreamFamily {
    seed: u64,
    key: [u8; 32],
}

impl StreamFamily {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = seed;
        for chunk in key.chunks_exact_mut(8) {
            state = mix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        Self { seed, key }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream(&self, index: u64) -> Substream {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        Substream {
            rng,
            id: StreamId {
                seed: self.seed,
                index,
            },
        }
    }
}

/// One independent substream; owned by a single worker.
#[derive(Debug, Clone)]
pub struct Substream {
    rng: ChaCha8Rng,
    id: StreamId,
}

impl Substream {
    pub fn id(&self) -> StreamId {
        self.id
    }
}

impl RngCore for Substream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}
