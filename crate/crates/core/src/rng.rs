//! Counter-based random streams.
//!
//! Every random draw in the crate comes from a [`Stream`] keyed by
//! `(master seed, domain, index)`. The `n`-th output of a stream is a pure
//! function of the key and `n`:
//!
//! ```text
//! key    = mix(mix(mix(seed + GAMMA) ^ domain * K1) ^ index * K2)
//! out[n] = mix(key + (n + 1) * GAMMA)
//! ```
//!
//! where `mix` is the SplitMix64 finalizer. A stream therefore never depends
//! on how many other streams were consumed before it, which is what makes
//! permutation and bootstrap iterations reproducible under any thread count.

use rand::RngCore;

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const K1: u64 = 0xd1b5_4a32_d192_ed03;
const K2: u64 = 0xaef1_7502_108e_f2d9;

/// Domain tags separating the streams of different consumers.
pub mod domain {
    pub const TCP: u64 = 0x7463_7000;
    pub const TMD: u64 = 0x746d_6400;
    pub const TPT: u64 = 0x7470_7400;
    pub const BOOTSTRAP: u64 = 0x626f_6f74;
    pub const SYNTH: u64 = 0x7379_6e74;
}

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    pub fn new(seed: u64, domain: u64, index: u64) -> Self {
        let mut key = mix64(seed.wrapping_add(GAMMA));
        key = mix64(key ^ domain.wrapping_mul(K1));
        key = mix64(key ^ index.wrapping_mul(K2));
        Stream { key, counter: 0 }
    }

    /// Position of the next draw.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    #[inline]
    fn step(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform double in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.step() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)` (Lemire's multiply-and-reject).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let m = (self.step() as u128) * (bound as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Fisher-Yates shuffle, drawing indices from high to low.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

impl RngCore for Stream {
    fn next_u32(&mut self) -> u32 {
        (self.step() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.step()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.step().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn streams_are_pure_functions_of_key_and_position() {
        let mut a = Stream::new(7, domain::TCP, 3);
        let first: Vec<u64> = (0..5).map(|_| a.next_u64()).collect();
        // Consuming an unrelated stream in between changes nothing.
        let mut other = Stream::new(7, domain::TCP, 4);
        other.next_u64();
        let mut b = Stream::new(7, domain::TCP, 3);
        let second: Vec<u64> = (0..5).map(|_| b.next_u64()).collect();
        assert_eq!(first, second);
    }

    #[test]
    fn different_keys_diverge() {
        let x = Stream::new(1, domain::TCP, 0).next_u64();
        assert_ne!(x, Stream::new(2, domain::TCP, 0).next_u64());
        assert_ne!(x, Stream::new(1, domain::TMD, 0).next_u64());
        assert_ne!(x, Stream::new(1, domain::TCP, 1).next_u64());
    }

    #[test]
    fn below_stays_in_range_and_covers_it() {
        let mut s = Stream::new(11, 0, 0);
        let mut seen = [0u32; 7];
        for _ in 0..7000 {
            let v = s.below(7) as usize;
            seen[v] += 1;
        }
        assert!(seen.iter().all(|&c| c > 850 && c < 1150), "{seen:?}");
    }

    #[test]
    fn unit_interval() {
        let mut s = Stream::new(5, 0, 9);
        for _ in 0..10_000 {
            let u = s.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut s = Stream::new(3, 0, 0);
        let mut v: Vec<u32> = (0..24).collect();
        s.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..24).collect::<Vec<_>>());
        assert_ne!(v, sorted);
    }
}
