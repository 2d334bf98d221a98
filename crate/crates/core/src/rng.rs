//! Reproducible random streams.
//!
//! Every replicate of every simulation draws from its own ChaCha8 stream.
//! The 256-bit ChaCha key is the output of four successive SplitMix64 steps
//! on the master seed and the 64-bit stream id is the replicate index, so
//! stream `i` is a pure function of `(seed, i)`. Results therefore do not
//! depend on how replicates are scheduled across worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Advance a SplitMix64 state and return the next output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Splits a master seed into independent, index-addressed streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSplitter {
    seed: u64,
    key: [u8; 32],
}

impl SeedSplitter {
    pub fn new(seed: u64) -> Self {
        let mut state = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self { seed, key }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The stream for replicate (or worker) `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }

    /// A splitter for an independent sub-experiment labelled `label`.
    ///
    /// Used when one run needs several families of streams (for example a
    /// chain and a reference sample) that must not overlap.
    pub fn derive(&self, label: u64) -> SeedSplitter {
        let mut state = self.seed ^ label.wrapping_mul(0xD1B5_4A32_D192_ED03);
        SeedSplitter::new(splitmix64(&mut state))
    }
}
