//! Stateless uniform draws keyed by `(seed, row, degree, replica)`.
//!
//! Each key maps to a fixed position of a ChaCha20 keystream: the seed picks
//! the key, the replica picks the stream and `(row, degree)` picks the word
//! offset. Draws never depend on how many other draws were made before them.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::{Error, Result};

/// Word offset reserved per `(row, degree)` slot; one `u64` uses two words.
const WORDS_PER_SLOT: u128 = 2;

#[derive(Clone, Debug)]
pub(crate) struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub(crate) fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub(crate) fn check_indices(rows: usize, degrees: usize) -> Result<()> {
        if rows > u32::MAX as usize {
            return Err(Error::CounterOverflow { what: "row", index: rows });
        }
        if degrees > u32::MAX as usize {
            return Err(Error::CounterOverflow { what: "degree", index: degrees });
        }
        Ok(())
    }

    /// Raw 64 bits at slot `(row, degree)` of stream `replica`.
    pub(crate) fn bits(&self, row: u32, degree: u32, replica: u64) -> u64 {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(replica);
        let slot = ((row as u128) << 32) | degree as u128;
        rng.set_word_pos(slot * WORDS_PER_SLOT);
        rng.next_u64()
    }

    /// Uniform draw on `[0, 1)` with 53 random bits.
    pub(crate) fn uniform(&self, row: u32, degree: u32, replica: u64) -> f64 {
        let bits = self.bits(row, degree, replica);
        (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
