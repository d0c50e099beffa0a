//! Seeded, chunked random draws.
//!
//! Every chunk of `CHUNK` consecutive draws owns a ChaCha8 stream keyed by
//! `(seed, chunk index)`, so the output does not depend on how chunks are
//! scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use rayon::prelude::*;

use crate::dist::{Discrete, Distribution, Family, SamplerLaw};

pub(crate) const CHUNK: usize = 1 << 16;

/// A law in a form that is cheap to draw from.
#[derive(Debug, Clone)]
pub(crate) enum PreparedLaw {
    Point(f64),
    Atoms { atoms: Vec<f64>, cdf: Vec<f64> },
    Uniform { lo: f64, width: f64 },
    Gaussian(Normal<f64>),
}

impl PreparedLaw {
    pub(crate) fn new(law: &Distribution) -> Self {
        match law {
            Distribution::Analytic(Family::Uniform { a, b }) => PreparedLaw::Uniform { lo: *a, width: b - a },
            Distribution::Sampler(SamplerLaw::Gaussian { mean, sd }) => {
                PreparedLaw::Gaussian(Normal::new(*mean, *sd).expect("validated parameters"))
            }
            other => {
                let d = other.to_discrete().expect("discrete closure");
                Self::from_discrete(&d)
            }
        }
    }

    fn from_discrete(d: &Discrete) -> Self {
        if d.len() == 1 {
            return PreparedLaw::Point(d.atoms()[0]);
        }
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = d
            .probs()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        // the last atom must absorb every u in [0, 1)
        *cdf.last_mut().unwrap() = f64::INFINITY;
        PreparedLaw::Atoms {
            atoms: d.atoms().to_vec(),
            cdf,
        }
    }

    #[inline]
    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            PreparedLaw::Point(x) => *x,
            PreparedLaw::Atoms { atoms, cdf } => {
                let u: f64 = rng.random();
                let idx = if cdf.len() <= 8 {
                    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
                } else {
                    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
                };
                atoms[idx]
            }
            PreparedLaw::Uniform { lo, width } => lo + width * rng.random::<f64>(),
            PreparedLaw::Gaussian(normal) => normal.sample(rng),
        }
    }
}

pub(crate) fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Fills `out` with draws produced by `draw`, chunk by chunk.
pub(crate) fn fill_chunked<F>(out: &mut [f64], seed: u64, draw: F)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(chunk, slot)| {
        let mut rng = chunk_rng(seed, chunk);
        for x in slot.iter_mut() {
            *x = draw(&mut rng);
        }
    });
}
