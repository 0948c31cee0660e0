//! Counter-based Gaussian noise.
//!
//! Every normal draw is addressed by `(seed, stream, step, mode)`: the seed
//! keys a ChaCha8 generator, the stream selects one of its 2^64 independent
//! streams, and `(step, mode)` fixes the word position. A step can therefore
//! be regenerated in isolation, and trajectories run in any order or on any
//! worker produce identical numbers.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 32-bit words consumed by one Box-Muller pair (two u64 draws).
const WORDS_PER_PAIR: u128 = 4;

fn expand_seed(seed: u64) -> [u8; 32] {
    // splitmix64 expansion of the user seed
    let mut state = seed;
    let mut out = [0u8; 32];
    for chunk in out.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    out
}

#[inline]
fn unit_open(bits: u64) -> f64 {
    // (0, 1]: never zero so the logarithm stays finite
    ((bits >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn box_muller(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = unit_open(rng.next_u64());
    let u2 = unit_open(rng.next_u64());
    let radius = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (radius * c, radius * s)
}

/// A reproducible source of standard normal vectors of fixed width.
#[derive(Clone, Debug)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
    width: usize,
    next_step: u64,
}

impl NoiseStream {
    pub fn new(seed: u64, stream: u64, width: usize) -> Self {
        let mut rng = ChaCha8Rng::from_seed(expand_seed(seed));
        rng.set_stream(stream);
        Self {
            rng,
            width,
            next_step: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    fn words_per_step(&self) -> u128 {
        WORDS_PER_PAIR * self.width.div_ceil(2) as u128
    }

    /// Fills `out` with the normals of `step`, regardless of what was drawn before.
    pub fn normals_at(&mut self, step: u64, out: &mut [f64]) {
        self.rng.set_word_pos(step as u128 * self.words_per_step());
        self.next_step = step;
        self.fill_next(out);
    }

    /// Fills `out` with the normals of the next step in sequence.
    pub fn fill_next(&mut self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.width);
        let mut chunks = out.chunks_exact_mut(2);
        for pair in &mut chunks {
            let (a, b) = box_muller(&mut self.rng);
            pair[0] = a;
            pair[1] = b;
        }
        if let [last] = chunks.into_remainder() {
            // the second value of the pair is discarded so each step has a fixed footprint
            *last = box_muller(&mut self.rng).0;
        }
        self.next_step += 1;
    }

    pub fn next_vec(&mut self) -> Vec<f64> {
        let mut out = vec![0.0; self.width];
        self.fill_next(&mut out);
        out
    }
}

/// Draws `count` standard normal vectors of length `width` from a dedicated stream.
pub fn normal_table(seed: u64, stream: u64, width: usize, count: usize) -> Vec<Vec<f64>> {
    let mut noise = NoiseStream::new(seed, stream, width);
    (0..count).map(|_| noise.next_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_access_matches_sequential() {
        let mut seq = NoiseStream::new(7, 3, 5);
        let drawn: Vec<Vec<f64>> = (0..20).map(|_| seq.next_vec()).collect();
        let mut ra = NoiseStream::new(7, 3, 5);
        for step in [13u64, 0, 19, 4] {
            let mut out = vec![0.0; 5];
            ra.normals_at(step, &mut out);
            assert_eq!(out, drawn[step as usize]);
        }
    }

    #[test]
    fn streams_differ() {
        let a = NoiseStream::new(1, 0, 4).next_vec();
        let b = NoiseStream::new(1, 1, 4).next_vec();
        let c = NoiseStream::new(2, 0, 4).next_vec();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn moments_are_standard() {
        let mut noise = NoiseStream::new(11, 0, 3);
        let n = 200_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n / 3 {
            for v in noise.next_vec() {
                s1 += v;
                s2 += v * v;
            }
        }
        let count = (n / 3 * 3) as f64;
        let mean = s1 / count;
        let var = s2 / count - mean * mean;
        assert!(mean.abs() < 4.0 / count.sqrt());
        assert!((var - 1.0).abs() < 4.0 * (2.0 / count).sqrt());
    }
}
