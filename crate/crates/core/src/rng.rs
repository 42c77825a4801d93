//! Seeded, labelled random streams.
//!
//! Every stochastic phase of a run draws from its own stream so that, for
//! example, changing the sharing model does not perturb agent placement or the
//! random walk. A stream is ChaCha8 keyed with `seed_from_u64(seed)` (PCG32
//! key expansion, as implemented by `rand_chacha`) and the ChaCha stream id set
//! to the label's discriminant. All transforms from raw 64-bit words to floats
//! are defined here rather than borrowed from a distribution library, so the
//! draw sequences are fixed by this file alone:
//!
//! * uniform `[0, 1)`: the top 53 bits of one word, scaled by 2⁻⁵³;
//! * uniform integer below `n`: rejection on the top of the 64-bit range;
//! * standard normal: Marsaglia's polar method, `ln` from the `libm` port so
//!   the result does not depend on the platform's C math library. Both values
//!   of each accepted pair are used; the second is cached.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. The discriminant is the ChaCha stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum StreamLabel {
    Placement = 1,
    Walk = 2,
    MemeContent = 3,
    Decisions = 4,
    Perception = 5,
    Recruitment = 6,
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    label: StreamLabel,
    inner: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, label: StreamLabel) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(label as u64);
        Self {
            seed,
            label,
            inner,
            spare_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> StreamLabel {
        self.label
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        // Largest multiple of n that fits; draws at or above it are rejected.
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }

    /// Bernoulli draw: true with probability `p`. Consumes exactly one word.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniformly distributed unit vector in the plane, by rejection from the
    /// unit disc (no trigonometry involved).
    pub fn unit_direction(&mut self) -> (f64, f64) {
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let r = s.sqrt();
                return (u / r, v / r);
            }
        }
    }
}

/// One standard-normal draw (Marsaglia polar method, see module docs).
pub fn sample_standard_normal(rng: &mut RngStream) -> f64 {
    if let Some(z) = rng.spare_normal.take() {
        return z;
    }
    loop {
        let u = 2.0 * rng.uniform() - 1.0;
        let v = 2.0 * rng.uniform() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            let factor = (-2.0 * libm::log(s) / s).sqrt();
            rng.spare_normal = Some(v * factor);
            return u * factor;
        }
    }
}

/// SplitMix64 finalizer; used to derive child seeds from (seed, key) pairs.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for a keyed sub-stream, e.g. one agent's perception of one meme.
pub fn derive_seed(seed: u64, key: u64) -> u64 {
    mix64(seed ^ mix64(key))
}
