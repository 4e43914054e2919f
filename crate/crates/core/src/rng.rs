//! Counter-based random streams.
//!
//! Each lattice site (i, j) owns an independent stream keyed by
//! `(seed, i, j)`, so a sub-rectangle of a larger field reproduces the same
//! weights and replicates can be generated in any order by any number of
//! workers. Streams advance a SplitMix64-style counter; the k-th output is a
//! pure function of (key, k). Draws are exactly reproducible for a fixed
//! toolchain; cross-platform identity holds up to the platform libm's
//! rounding of `ln`/`cos`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const REPLICATE_STREAM: u64 = 0xA24B_AED4_963E_E407;

/// SplitMix64 finalizer; bijective with strong avalanche.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Field seed for one Monte Carlo replicate. Replicate index, not worker
/// identity, determines the stream.
#[inline]
pub fn replicate_seed(run_seed: u64, replicate: u64) -> u64 {
    mix64(run_seed ^ mix64(replicate.wrapping_mul(REPLICATE_STREAM).wrapping_add(GOLDEN)))
}

/// Counter stream for a single lattice site.
#[derive(Debug, Clone)]
pub struct SiteRng {
    state: u64,
}

impl SiteRng {
    #[inline]
    pub fn for_site(seed: u64, i: u32, j: u32) -> Self {
        let cell = ((i as u64) << 32) | j as u64;
        SiteRng {
            state: mix64(seed ^ mix64(cell.wrapping_add(GOLDEN))),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform on [0, 1) with 53 random bits.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (0, 1]; safe to pass through `ln`.
    #[inline]
    pub fn next_uniform_pos(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
