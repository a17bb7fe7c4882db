//! Seeded random bit interleaver.
//!
//! Sits between the channel encoder and the modulator to break up fading
//! bursts. The permutation is a Fisher-Yates shuffle of the index range
//! drawn from a ChaCha stream, so it is reproducible from the seed alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A fixed-length bit permutation and its inverse.
#[derive(Debug, Clone)]
pub struct Interleaver {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Interleaver {
    pub fn new(len: usize, seed: u64) -> Self {
        let mut forward: Vec<usize> = (0..len).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..len).rev() {
            let j = rng.gen_range(0..=i);
            forward.swap(i, j);
        }
        let mut inverse = vec![0; len];
        for (i, &f) in forward.iter().enumerate() {
            inverse[f] = i;
        }
        Self { forward, inverse }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// out[i] = in[forward[i]]
    pub fn interleave<T: Copy>(&self, bits: &[T]) -> Vec<T> {
        assert_eq!(bits.len(), self.forward.len());
        self.forward.iter().map(|&i| bits[i]).collect()
    }

    /// Exact inverse of [`Self::interleave`].
    pub fn deinterleave<T: Copy>(&self, bits: &[T]) -> Vec<T> {
        assert_eq!(bits.len(), self.inverse.len());
        self.inverse.iter().map(|&i| bits[i]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn round_trip_identity() {
        let il = Interleaver::new(1000, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bits: Vec<bool> = (0..1000).map(|_| rng.gen()).collect();
        assert_eq!(il.deinterleave(&il.interleave(&bits)), bits);
    }

    #[test]
    fn same_seed_same_permutation() {
        let a = Interleaver::new(64, 5);
        let b = Interleaver::new(64, 5);
        assert_eq!(a.forward, b.forward);
    }
}
