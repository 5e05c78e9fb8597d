//! Splittable pseudorandom number streams.
//!
//! The generator is the SplitMix construction of Steele, Lea and Vigna:
//! a 64-bit counter advanced by a per-stream odd increment ("gamma"),
//! passed through a finalizing avalanche mix. Every stream is fully
//! determined by a [`RngState`] value `(seed, stream_id)`, so simulations
//! can hand one substream to each replication and stay reproducible no
//! matter how work is scheduled across threads.
//!
//! The integer sequence is bit-identical across platforms. Floating-point
//! samplers (normal, gamma, Student-t) additionally depend on `ln`/`exp`
//! from the platform libm, which may differ in the last ulp between
//! systems; within one platform all output is bit-stable.

use serde::{Deserialize, Serialize};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const INV_2_POW_53: f64 = 1.0 / 9_007_199_254_740_992.0;

/// Stafford "variant 13" finalizer of the SplitMix64 generator.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a per-stream increment: odd, and patched away from the
/// low-entropy gammas the SplitMix authors flag as weak.
#[inline]
fn mix_gamma(z: u64) -> u64 {
    let g = mix64(z.wrapping_add(GOLDEN_GAMMA)) | 1;
    if (g ^ (g >> 1)).count_ones() < 24 {
        g ^ 0xAAAA_AAAA_AAAA_AAAA
    } else {
        g
    }
}

/// Identifier of one pseudorandom stream: the run seed plus a substream
/// selector. Identical values produce identical streams; distinct
/// `stream_id`s produce statistically independent streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngState {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngState {
    /// Stream 0 of the given seed.
    pub fn new(seed: u64) -> Self {
        RngState { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        RngState { seed, stream_id }
    }

    /// Child stream `index`, derived by avalanche mixing so that children
    /// of different parents never collide in practice.
    pub fn substream(self, index: u64) -> Self {
        let tag = mix64(self.stream_id).wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1)));
        RngState {
            seed: self.seed,
            stream_id: mix64(tag),
        }
    }

    /// Instantiates the generator for this state.
    pub fn stream(self) -> Stream {
        Stream::from_state(self)
    }
}

/// A running generator. Owned by exactly one worker at a time; create one
/// per replication from an [`RngState`] instead of sharing.
#[derive(Clone, Debug)]
pub struct Stream {
    state: u64,
    gamma: u64,
    spare_normal: Option<f64>,
}

impl Stream {
    fn from_state(rs: RngState) -> Self {
        // Decouple the starting counter from the raw seed so that nearby
        // seeds do not start in nearby counter positions.
        let state = mix64(rs.seed ^ mix64(rs.stream_id ^ GOLDEN_GAMMA));
        Stream {
            state,
            gamma: mix_gamma(rs.stream_id),
            spare_normal: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(self.gamma);
        mix64(self.state)
    }

    /// Uniform draw from the open interval (0, 1): 53-bit resolution,
    /// offset half an ulp so 0.0 and 1.0 never occur.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * INV_2_POW_53
    }

    /// Unbiased uniform integer in `[0, bound)` via rejection sampling.
    #[inline]
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        // Reject the low `2^64 mod bound` values so every residue class
        // is equally likely.
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    /// Standard normal draw (Marsaglia polar method; the second value of
    /// each accepted pair is cached).
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s < 1.0 && s > 0.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * f);
                return u * f;
            }
        }
    }

    /// Gamma(shape, 1) draw by the Marsaglia-Tsang squeeze method.
    pub fn next_gamma(&mut self, shape: f64) -> f64 {
        debug_assert!(shape > 0.0);
        if shape < 1.0 {
            // Boost: G(a) = G(a+1) * U^(1/a).
            let g = self.next_gamma(shape + 1.0);
            return g * self.next_f64().powf(1.0 / shape);
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.next_normal();
            let t = 1.0 + c * x;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u = self.next_f64();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 {
                return d * v;
            }
            if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }

    /// Chi-squared draw with `df` degrees of freedom.
    pub fn next_chi_squared(&mut self, df: u32) -> f64 {
        2.0 * self.next_gamma(f64::from(df) / 2.0)
    }
}

/// Partial Fisher-Yates shuffle: after the call, `items[..k]` is a uniform
/// random k-subset of the slice in uniform random order. The tail holds
/// the remaining elements; re-shuffling the same slice again is still
/// uniform, so a scratch buffer never needs resetting.
pub fn partial_shuffle<T>(items: &mut [T], k: usize, stream: &mut Stream) {
    let len = items.len();
    assert!(k <= len);
    for i in 0..k {
        let j = i + stream.next_below((len - i) as u64) as usize;
        items.swap(i, j);
    }
}

/// Uniform random `k`-subset of `{1, ..., pool_size}`, in draw order.
pub fn draw_subset(pool_size: u32, k: u32, stream: &mut Stream) -> Vec<u32> {
    let mut pool: Vec<u32> = (1..=pool_size).collect();
    partial_shuffle(&mut pool, k as usize, stream);
    pool.truncate(k as usize);
    pool
}
