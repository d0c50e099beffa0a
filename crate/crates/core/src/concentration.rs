//! Lévy concentration function `Q(F, λ) = sup_x F{[x, x + λ]}`.
//!
//! Exact values come from a two-pointer sweep over sorted atoms; estimates
//! for arbitrary weighted sums come from the same sweep over sorted Monte
//! Carlo draws, with a distribution-free confidence half-width.

use serde::{Deserialize, Serialize};

use crate::dist::{Discrete, Distribution, SumSpec};
use crate::error::{invalid, Error, Result};
use crate::sampling::{fill_chunked, PreparedLaw};

/// Default atom-pair budget for [`exact_convolution`].
pub const DEFAULT_ATOM_CAP: usize = 10_000_000;
/// Smallest sample size accepted by [`q_monte_carlo`].
pub const MIN_MC_COUNT: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "monte-carlo" | "mc" => Ok(Method::MonteCarlo),
            other => Err(invalid(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationEstimate {
    pub lambda: f64,
    pub value: f64,
    pub method: Method,
    pub sample_count: u64,
    pub ci_half_width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("lambda must be finite and nonnegative, got {lambda}")))
    }
}

/// Exact `Q(F, λ)` of a finite discrete law.
pub fn q_exact(f: &Distribution, lambda: f64) -> Result<ConcentrationEstimate> {
    check_lambda(lambda)?;
    let d = f.require_discrete("q_exact")?;
    Ok(ConcentrationEstimate {
        lambda,
        value: q_discrete(&d, lambda),
        method: Method::Exact,
        sample_count: 0,
        ci_half_width: 0.0,
        seed: None,
    })
}

/// Largest mass of a closed window `[x, x + λ]`. Windows anchored at an atom
/// realise the supremum, so only those are scanned.
pub fn q_discrete(d: &Discrete, lambda: f64) -> f64 {
    let xs = d.atoms();
    // double-double prefix sums keep window masses correctly rounded
    let mut cum = Vec::with_capacity(xs.len() + 1);
    cum.push((0.0, 0.0));
    let (mut hi_acc, mut lo_acc) = (0.0, 0.0);
    for &p in d.probs() {
        let (s, e) = two_sum(hi_acc, p);
        hi_acc = s;
        lo_acc += e;
        let (s, e) = two_sum(hi_acc, lo_acc);
        hi_acc = s;
        lo_acc = e;
        cum.push((hi_acc, lo_acc));
    }
    let mut best = 0.0_f64;
    let mut hi = 0;
    for lo in 0..xs.len() {
        if hi < lo {
            hi = lo;
        }
        while hi + 1 < xs.len() && xs[hi + 1] - xs[lo] <= lambda {
            hi += 1;
        }
        let (a, b) = (cum[hi + 1], cum[lo]);
        best = best.max((a.0 - b.0) + (a.1 - b.1));
    }
    best.min(1.0)
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Largest number of sorted points inside a closed window of width `λ`.
pub fn max_window_count(sorted: &[f64], lambda: f64) -> usize {
    let mut best = 0;
    let mut hi = 0;
    for lo in 0..sorted.len() {
        if hi < lo {
            hi = lo;
        }
        while hi + 1 < sorted.len() && sorted[hi + 1] - sorted[lo] <= lambda {
            hi += 1;
        }
        best = best.max(hi + 1 - lo);
    }
    best
}

/// Half-width `2·sqrt(ln(2/δ) / (2N))`: a uniform CDF deviation bound applied
/// to both ends of the window.
pub fn dkw_half_width(count: usize, delta: f64) -> f64 {
    2.0 * ((2.0 / delta).ln() / (2.0 * count as f64)).sqrt()
}

/// Draws `count` values of `Σ a_k X_k`, reproducible from `seed`.
pub fn sample_sum(spec: &SumSpec, count: usize, seed: u64) -> Vec<f64> {
    let laws: Vec<PreparedLaw> = match spec.iid_law() {
        Some(law) => vec![PreparedLaw::new(law)],
        None => (0..spec.n()).map(|k| PreparedLaw::new(spec.summand(k))).collect(),
    };
    let coeffs = spec.coeffs();
    let mut out = vec![0.0; count];
    fill_chunked(&mut out, seed, |rng| {
        let mut s = 0.0;
        for (k, a) in coeffs.iter().enumerate() {
            let law = if laws.len() == 1 { &laws[0] } else { &laws[k] };
            s += a * law.draw(rng);
        }
        s
    });
    out
}

/// Sliding-window estimate of `Q(F_a, λ)` from `count` draws of the sum.
///
/// The empirical maximum over windows is biased upward for small `count`; it
/// is consistent as `count → ∞` and lies within `ci_half_width` of the true
/// value with probability at least `1 − δ`.
pub fn q_monte_carlo(
    spec: &SumSpec,
    lambda: f64,
    count: usize,
    seed: u64,
    delta: f64,
) -> Result<ConcentrationEstimate> {
    check_lambda(lambda)?;
    if count < MIN_MC_COUNT {
        return Err(invalid(format!(
            "monte carlo needs at least {MIN_MC_COUNT} draws, got {count}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    if lambda == 0.0 && spec.any_continuous() {
        return Err(invalid(
            "lambda = 0 with continuous summands: the window estimator degenerates",
        ));
    }
    let mut xs = sample_sum(spec, count, seed);
    xs.sort_unstable_by(f64::total_cmp);
    let hits = max_window_count(&xs, lambda);
    Ok(ConcentrationEstimate {
        lambda,
        value: hits as f64 / count as f64,
        method: Method::MonteCarlo,
        sample_count: count as u64,
        ci_half_width: dkw_half_width(count, delta),
        seed: Some(seed),
    })
}

/// `1 + ⌊μ/λ⌋`, the factor in `Q(F, μ) ≤ (1 + ⌊μ/λ⌋) Q(F, λ)`.
pub fn regularity_factor(mu: f64, lambda: f64) -> Result<u64> {
    if !(mu > 0.0 && lambda > 0.0) || !(mu / lambda).is_finite() {
        return Err(invalid(format!(
            "regularity factor needs positive arguments, got ({mu}, {lambda})"
        )));
    }
    Ok(1 + (mu / lambda).floor() as u64)
}

/// Exact law of `Σ a_k X_k` by iterated convolution.
///
/// `atom_cap` bounds the number of atom pairs formed at any single step
/// (atoms are merged after each step).
pub fn exact_convolution(spec: &SumSpec, atom_cap: usize) -> Result<Discrete> {
    let mut acc = Discrete::point_mass(0.0);
    for (k, &a) in spec.coeffs().iter().enumerate() {
        let term = spec.summand(k).require_discrete("exact_convolution")?.scaled(a);
        let needed = acc.len().saturating_mul(term.len());
        if needed > atom_cap {
            return Err(Error::AtomBudget { needed, cap: atom_cap });
        }
        acc = acc.convolve(&term);
    }
    Ok(acc)
}
