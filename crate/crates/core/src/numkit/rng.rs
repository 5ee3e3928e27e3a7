//! Reproducible random-number streams.
//!
//! Every random draw in the crate comes from a stream addressed by a 64-bit
//! seed plus a [`StreamId`] of (repetition, condition, chain, purpose). Two
//! streams with the same address produce the same sequence; distinct
//! addresses yield statistically independent sequences. Results therefore
//! never depend on thread scheduling, only on the addresses a caller asks
//! for.
//!
//! The generator is counter-based (ChaCha) keyed by a SplitMix64 hash of the
//! address, so creating a stream is cheap and streams can be handed to
//! worker threads freely.

use crate::data::DataMatrix;
use crate::error::Result;
use crate::numkit::matrix::SquareMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// What a stream is used for. Part of the stream address, so draws made for
/// one purpose can never perturb another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    /// Root/unspecified.
    Root,
    /// Drawing a complete dataset.
    Simulate,
    /// Drawing a missingness pattern.
    Ampute,
    /// Filling starting values for missing cells.
    Initialize,
    /// One full sweep of the imputation engine at the given iteration.
    Sweep(u32),
}

impl Purpose {
    fn code(self) -> u64 {
        match self {
            Purpose::Root => 0,
            Purpose::Simulate => 1 << 32,
            Purpose::Ampute => 2 << 32,
            Purpose::Initialize => 3 << 32,
            Purpose::Sweep(t) => (4 << 32) | t as u64,
        }
    }
}

/// Address of a random stream within a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub repetition: u64,
    pub condition: u64,
    pub chain: u64,
    pub purpose: Purpose,
}

impl StreamId {
    pub const ROOT: StreamId = StreamId {
        repetition: 0,
        condition: 0,
        chain: 0,
        purpose: Purpose::Root,
    };

    pub fn new(repetition: u64, condition: u64, chain: u64, purpose: Purpose) -> Self {
        Self {
            repetition,
            condition,
            chain,
            purpose,
        }
    }

    pub fn with_chain(mut self, chain: u64) -> Self {
        self.chain = chain;
        self
    }

    pub fn with_purpose(mut self, purpose: Purpose) -> Self {
        self.purpose = purpose;
        self
    }
}

// SplitMix64 finalizer; used to spread the address into key material.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// A value-semantic random stream: a ChaCha generator keyed by
/// (seed, [`StreamId`]).
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    id: StreamId,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64, id: StreamId) -> Self {
        let mut acc = mix64(seed ^ GOLDEN);
        for part in [id.repetition, id.condition, id.chain, id.purpose.code()] {
            acc = mix64(acc.wrapping_add(GOLDEN) ^ part);
        }
        let mut key = [0u8; 32];
        let mut s = acc;
        for chunk in key.chunks_exact_mut(8) {
            s = s.wrapping_add(GOLDEN);
            chunk.copy_from_slice(&mix64(s).to_le_bytes());
        }
        Self {
            seed,
            id,
            rng: ChaCha12Rng::from_seed(key),
        }
    }

    /// A fresh stream under the same seed at a different address. The current
    /// stream's own draw position is irrelevant to the result.
    pub fn substream(&self, id: StreamId) -> Self {
        Self::new(self.seed, id)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn id(&self) -> StreamId {
        self.id
    }

    /// One standard-normal draw.
    pub fn std_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// One chi-square draw as the sum of `df` squared standard normals, so
    /// `chi_square(1)` is exactly `std_normal()^2` on a fresh stream.
    pub fn chi_square(&mut self, df: u32) -> f64 {
        assert!(df >= 1, "chi_square requires df >= 1");
        (0..df).map(|_| self.std_normal().powi(2)).sum()
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0);
        self.rng.random_range(0..n)
    }

    /// Fair coin.
    pub fn coin(&mut self) -> bool {
        self.rng.random()
    }
}

/// Draws `n` rows from a multivariate normal with the given mean and
/// positive-definite covariance, via `mean + L z` with `L` the Cholesky
/// factor. Columns are named `v1..vp`; callers rename as needed.
pub fn draw_mvn(
    rng: &mut RngStream,
    mean: &[f64],
    cov: &SquareMatrix,
    n: usize,
) -> Result<DataMatrix> {
    let p = cov.dim();
    assert_eq!(mean.len(), p, "mean length must match covariance dimension");
    let l = cov.cholesky()?;
    let mut values = Vec::with_capacity(n * p);
    let mut z = vec![0.0; p];
    for _ in 0..n {
        for zj in z.iter_mut() {
            *zj = rng.std_normal();
        }
        for i in 0..p {
            let mut x = mean[i];
            for k in 0..=i {
                x += l.get(i, k) * z[k];
            }
            values.push(x);
        }
    }
    let names = (1..=p).map(|j| format!("v{j}")).collect();
    DataMatrix::from_row_major(names, n, values)
}
