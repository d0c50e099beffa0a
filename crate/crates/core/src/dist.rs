//! One-dimensional laws and the scalar functionals built on their
//! symmetrizations.
//!
//! Finite discrete laws are the exact core: symmetrization, convolution and
//! every functional below are computed on atoms without approximation beyond
//! floating-point rounding. The analytic families exist for their closed-form
//! characteristic functions (and convert to atoms when they are discrete).
//! Sampler-backed laws only feed Monte Carlo paths.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sampling::{fill_chunked, PreparedLaw};

/// Relative distance below which two atoms are merged.
pub const MERGE_TOL: f64 = 1e-12;
/// Accepted deviation of the input probabilities from a total of one.
pub const PROB_SUM_TOL: f64 = 1e-9;
/// Deepest dyadic shell kept by [`dyadic_profile`]; finer atoms are folded into `q`.
pub const MAX_SHELL: usize = 60;

#[inline]
fn merge_width(x: f64) -> f64 {
    MERGE_TOL * x.abs().max(1.0)
}

/// A finite discrete law: strictly increasing atoms with positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrete {
    atoms: Vec<f64>,
    probs: Vec<f64>,
}

impl Discrete {
    /// Validating constructor; see [`make_discrete`].
    pub fn new(atoms: &[f64], probs: &[f64]) -> Result<Self> {
        if atoms.len() != probs.len() {
            return Err(Error::LengthMismatch {
                atoms: atoms.len(),
                probs: probs.len(),
            });
        }
        if atoms.is_empty() {
            return Err(Error::Empty);
        }
        for &x in atoms {
            if !x.is_finite() {
                return Err(Error::NonFinite(x));
            }
        }
        let mut total = 0.0;
        for &p in probs {
            if !p.is_finite() {
                return Err(Error::NonFinite(p));
            }
            if p < 0.0 {
                return Err(Error::NegativeProbability(p));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::ProbabilitySum(total));
        }
        let scale = if (total - 1.0).abs() > 1e-12 { total } else { 1.0 };
        let pairs = atoms.iter().zip(probs).map(|(&x, &p)| (x, p / scale)).collect();
        Ok(Self::from_pairs(pairs))
    }

    pub fn point_mass(x: f64) -> Self {
        Discrete {
            atoms: vec![x],
            probs: vec![1.0],
        }
    }

    /// Sorts, drops null weights and merges atoms closer than [`MERGE_TOL`]
    /// (relative). The merged atom keeps the smallest value of its group.
    pub(crate) fn from_pairs(mut pairs: Vec<(f64, f64)>) -> Self {
        pairs.retain(|&(_, p)| p > 0.0);
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, p) in pairs {
            match atoms.last() {
                Some(&anchor) if x - anchor <= merge_width(anchor) => {
                    *probs.last_mut().unwrap() += p;
                }
                _ => {
                    atoms.push(x);
                    probs.push(p);
                }
            }
        }
        Discrete { atoms, probs }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().zip(self.probs.iter().copied())
    }

    /// Law of `s·X`.
    pub fn scaled(&self, s: f64) -> Self {
        Self::from_pairs(self.iter().map(|(x, p)| (s * x, p)).collect())
    }

    /// Law of `X + b`.
    pub fn shifted(&self, b: f64) -> Self {
        Self::from_pairs(self.iter().map(|(x, p)| (x + b, p)).collect())
    }

    /// Symmetry about zero, atom by atom, within the merge tolerance.
    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            let j = n - 1 - i;
            (self.atoms[i] + self.atoms[j]).abs() <= merge_width(self.atoms[i])
                && (self.probs[i] - self.probs[j]).abs() <= 1e-12
        })
    }

    pub fn max_abs_atom(&self) -> f64 {
        self.atoms.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn mean_abs(&self) -> f64 {
        self.iter().map(|(x, p)| p * x.abs()).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Exact law of `X + Y` for independent `X ~ self`, `Y ~ other`.
    pub fn convolve(&self, other: &Discrete) -> Discrete {
        let mut pairs = Vec::with_capacity(self.len() * other.len());
        for (x, p) in self.iter() {
            for (y, q) in other.iter() {
                pairs.push((x + y, p * q));
            }
        }
        Self::from_pairs(pairs)
    }
}

/// Analytic families with closed-form characteristic functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Rademacher,
    Bernoulli { p: f64 },
    Uniform { a: f64, b: f64 },
    PointMass { x: f64 },
}

/// Laws available only through a seeded generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplerLaw {
    Gaussian { mean: f64, sd: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Discrete(Discrete),
    Analytic(Family),
    Sampler(SamplerLaw),
}

impl From<Discrete> for Distribution {
    fn from(d: Discrete) -> Self {
        Distribution::Discrete(d)
    }
}

impl Distribution {
    pub fn rademacher() -> Self {
        Distribution::Analytic(Family::Rademacher)
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("bernoulli parameter {p} outside [0, 1]")));
        }
        Ok(Distribution::Analytic(Family::Bernoulli { p }))
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(invalid(format!("uniform bounds [{a}, {b}] are not a proper interval")));
        }
        Ok(Distribution::Analytic(Family::Uniform { a, b }))
    }

    pub fn point_mass(x: f64) -> Self {
        Distribution::Analytic(Family::PointMass { x })
    }

    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        if !(mean.is_finite() && sd.is_finite() && sd > 0.0) {
            return Err(invalid(format!("gaussian({mean}, {sd}) is not a proper law")));
        }
        Ok(Distribution::Sampler(SamplerLaw::Gaussian { mean, sd }))
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Distribution::Discrete(_) => "finite-discrete",
            Distribution::Analytic(Family::Uniform { .. }) => "uniform",
            Distribution::Analytic(_) => "analytic",
            Distribution::Sampler(_) => "sampler-backed",
        }
    }

    /// Atom representation when the law is finite discrete.
    pub fn to_discrete(&self) -> Option<Discrete> {
        match self {
            Distribution::Discrete(d) => Some(d.clone()),
            Distribution::Analytic(Family::Rademacher) => Some(Discrete {
                atoms: vec![-1.0, 1.0],
                probs: vec![0.5, 0.5],
            }),
            Distribution::Analytic(Family::Bernoulli { p }) => {
                Some(Discrete::from_pairs(vec![(0.0, 1.0 - p), (1.0, *p)]))
            }
            Distribution::Analytic(Family::PointMass { x }) => Some(Discrete::point_mass(*x)),
            Distribution::Analytic(Family::Uniform { .. }) | Distribution::Sampler(_) => None,
        }
    }

    pub(crate) fn require_discrete(&self, op: &'static str) -> Result<Discrete> {
        self.to_discrete().ok_or(Error::Unsupported {
            op,
            variant: self.variant_name(),
        })
    }

    /// True for laws without atoms (the sliding-window estimator degenerates at λ = 0).
    pub fn is_continuous(&self) -> bool {
        matches!(
            self,
            Distribution::Analytic(Family::Uniform { .. }) | Distribution::Sampler(_)
        )
    }

    /// Pushforward by `x ↦ s·x`.
    pub fn scaled(&self, s: f64) -> Distribution {
        match self {
            Distribution::Analytic(Family::Uniform { a, b }) => {
                if s == 0.0 {
                    Distribution::point_mass(0.0)
                } else {
                    let (lo, hi) = if s > 0.0 { (s * a, s * b) } else { (s * b, s * a) };
                    Distribution::Analytic(Family::Uniform { a: lo, b: hi })
                }
            }
            Distribution::Sampler(SamplerLaw::Gaussian { mean, sd }) => {
                if s == 0.0 {
                    Distribution::point_mass(0.0)
                } else {
                    Distribution::Sampler(SamplerLaw::Gaussian {
                        mean: s * mean,
                        sd: s.abs() * sd,
                    })
                }
            }
            other => Distribution::Discrete(other.to_discrete().unwrap().scaled(s)),
        }
    }

    /// Largest |x| in the support, if bounded.
    pub fn max_abs_support(&self) -> Option<f64> {
        match self {
            Distribution::Analytic(Family::Uniform { a, b }) => Some(a.abs().max(b.abs())),
            Distribution::Sampler(_) => None,
            other => Some(other.to_discrete().unwrap().max_abs_atom()),
        }
    }

    /// `E|X|`; `None` for sampler-backed laws.
    pub fn mean_abs(&self) -> Option<f64> {
        match self {
            Distribution::Analytic(Family::Uniform { a, b }) => Some(if *a >= 0.0 || *b <= 0.0 {
                ((a + b) / 2.0).abs()
            } else {
                (a * a + b * b) / (2.0 * (b - a))
            }),
            Distribution::Sampler(_) => None,
            other => Some(other.to_discrete().unwrap().mean_abs()),
        }
    }
}

/// Builds a finite discrete law, merging duplicate atoms.
pub fn make_discrete(atoms: &[f64], probs: &[f64]) -> Result<Distribution> {
    Discrete::new(atoms, probs).map(Distribution::Discrete)
}

/// Law of `X₁ − X₂` for independent copies of `X ~ f`.
///
/// Only positive differences are formed; the negative half is their mirror
/// image, so the result is exactly symmetric.
pub fn symmetrize(f: &Distribution) -> Result<Distribution> {
    let d = f.require_discrete("symmetrize")?;
    Ok(Distribution::Discrete(symmetrize_discrete(&d)))
}

pub(crate) fn symmetrize_discrete(d: &Discrete) -> Discrete {
    let xs = d.atoms();
    let ps = d.probs();
    let mut zero = 0.0;
    let mut positive = Vec::with_capacity(xs.len() * (xs.len().saturating_sub(1)) / 2);
    for i in 0..xs.len() {
        zero += ps[i] * ps[i];
        for j in i + 1..xs.len() {
            positive.push((xs[j] - xs[i], ps[i] * ps[j]));
        }
    }
    let half = Discrete::from_pairs(positive);
    let mut atoms = Vec::with_capacity(2 * half.len() + 1);
    let mut probs = Vec::with_capacity(2 * half.len() + 1);
    for (x, p) in half.iter().collect::<Vec<_>>().into_iter().rev() {
        atoms.push(-x);
        probs.push(p);
    }
    atoms.push(0.0);
    probs.push(zero);
    for (x, p) in half.iter() {
        atoms.push(x);
        probs.push(p);
    }
    Discrete { atoms, probs }
}

fn require_symmetric(g: &Distribution, op: &'static str) -> Result<Discrete> {
    let d = g.require_discrete(op)?;
    if !d.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(d)
}

/// `M(τ) = E min(X̃²/τ², 1)` for a symmetric finite law `g` (the law of X̃).
pub fn m_tau(g: &Distribution, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(invalid(format!("tau must be positive, got {tau}")));
    }
    let d = require_symmetric(g, "m_tau")?;
    Ok(m_tau_discrete(&d, tau))
}

pub(crate) fn m_tau_discrete(d: &Discrete, tau: f64) -> f64 {
    // atom order matters: dyadic_profile sums beta in the same order so that
    // beta >= M(1)/4 survives rounding
    let mut total = 0.0;
    for (x, p) in d.iter() {
        let r = x / tau;
        total += p * (r * r).min(1.0);
    }
    total.min(1.0)
}

/// `M(τ)` of the symmetrization of `f`.
///
/// Uniform laws use the closed form for the triangular law of `X₁ − X₂`.
pub fn m_tau_of(f: &Distribution, tau: f64) -> Result<f64> {
    if let Distribution::Analytic(Family::Uniform { a, b }) = f {
        if !(tau > 0.0) {
            return Err(invalid(format!("tau must be positive, got {tau}")));
        }
        let w = b - a;
        let m = if tau >= w {
            w * w / (6.0 * tau * tau)
        } else {
            2.0 / (w * w) * (w * tau / 3.0 - tau * tau / 4.0 + 0.5 * (w - tau) * (w - tau))
        };
        return Ok(m.clamp(0.0, 1.0));
    }
    m_tau(&symmetrize(f)?, tau)
}

/// Decomposition of a symmetric law into the mass at zero and dyadic shells
/// `A₀ = {|x| > 1}`, `A_j = {2^{-j} < |x| ≤ 2^{-j+1}}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicProfile {
    /// Mass at zero, including shells deeper than [`MAX_SHELL`].
    pub q: f64,
    /// `p_j` for `j = 0..=depth`.
    pub shells: Vec<f64>,
    /// `β_j = 2^{-2j} p_j`.
    pub beta_shells: Vec<f64>,
    pub beta: f64,
    /// `μ_j = β_j / β`; empty when `β = 0`.
    pub mu: Vec<f64>,
    /// Final number of shells minus one.
    pub depth: usize,
}

/// Index `j` of the dyadic shell holding `|x|`, or `None` for zero and for
/// shells past [`MAX_SHELL`].
pub fn shell_index(x: f64) -> Option<usize> {
    let ax = x.abs();
    if ax == 0.0 {
        return None;
    }
    if ax > 1.0 {
        return Some(0);
    }
    let mut j = ((-ax.log2()).floor() as i64 + 1).max(1);
    while ax <= 2f64.powi(-(j as i32)) {
        j += 1;
    }
    while j > 1 && ax > 2f64.powi(-(j as i32) + 1) {
        j -= 1;
    }
    if j as usize > MAX_SHELL {
        None
    } else {
        Some(j as usize)
    }
}

/// Shell masses and `β = Σ 2^{-2j} p_j` of a symmetric finite law.
///
/// `min_depth` is the smallest number of shells to report; the depth grows to
/// cover every atom down to `2^{-MAX_SHELL}`. Atoms below that are folded
/// into `q`, which can undercut `β ≥ M(1)/4` by at most `2^{-2·MAX_SHELL}`
/// times their mass.
pub fn dyadic_profile(g: &Distribution, min_depth: usize) -> Result<DyadicProfile> {
    let d = require_symmetric(g, "dyadic_profile")?;
    let mut depth = min_depth.min(MAX_SHELL);
    let mut q = 0.0;
    let mut beta = 0.0;
    let mut indexed = Vec::with_capacity(d.len());
    for (x, p) in d.iter() {
        match shell_index(x) {
            Some(j) => {
                depth = depth.max(j);
                beta += p * 4f64.powi(-(j as i32));
                indexed.push((j, p));
            }
            None => q += p,
        }
    }
    let mut shells = vec![0.0; depth + 1];
    for (j, p) in indexed {
        shells[j] += p;
    }
    let beta_shells: Vec<f64> = shells
        .iter()
        .enumerate()
        .map(|(j, p)| p * 4f64.powi(-(j as i32)))
        .collect();
    let mu = if beta > 0.0 {
        let s: f64 = beta_shells.iter().sum();
        beta_shells.iter().map(|b| b / s).collect()
    } else {
        Vec::new()
    };
    Ok(DyadicProfile {
        q,
        shells,
        beta_shells,
        beta,
        mu,
        depth,
    })
}

/// `count` draws from `f`, reproducible from `(seed, count)`.
pub fn sample(f: &Distribution, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(invalid("sample count must be at least 1"));
    }
    let law = PreparedLaw::new(f);
    let mut out = vec![0.0; count];
    fill_chunked(&mut out, seed, |rng| law.draw(rng));
    Ok(out)
}

/// Coefficients plus summand laws: the law of `Σ a_k X_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumSpec {
    coeffs: Vec<f64>,
    summands: Summands,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Summands {
    Iid(Distribution),
    Each(Vec<Distribution>),
}

impl SumSpec {
    pub fn iid(coeffs: Vec<f64>, law: Distribution) -> Result<Self> {
        check_coeffs(&coeffs)?;
        Ok(SumSpec {
            coeffs,
            summands: Summands::Iid(law),
        })
    }

    pub fn independent(coeffs: Vec<f64>, laws: Vec<Distribution>) -> Result<Self> {
        check_coeffs(&coeffs)?;
        if laws.len() != coeffs.len() {
            return Err(invalid(format!(
                "{} coefficients but {} summand laws",
                coeffs.len(),
                laws.len()
            )));
        }
        Ok(SumSpec {
            coeffs,
            summands: Summands::Each(laws),
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn summands(&self) -> &Summands {
        &self.summands
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn summand(&self, k: usize) -> &Distribution {
        match &self.summands {
            Summands::Iid(d) => d,
            Summands::Each(ds) => &ds[k],
        }
    }

    pub fn iid_law(&self) -> Option<&Distribution> {
        match &self.summands {
            Summands::Iid(d) => Some(d),
            Summands::Each(_) => None,
        }
    }

    /// Euclidean norm `‖a‖`.
    pub fn norm(&self) -> f64 {
        norm(&self.coeffs)
    }

    /// `‖a‖_∞`.
    pub fn max_norm(&self) -> f64 {
        max_norm(&self.coeffs)
    }

    /// Same summands with coefficients multiplied by `s`; `s = 1/τ` gives `V_{a,τ}`.
    pub fn with_scaled_coeffs(&self, s: f64) -> SumSpec {
        SumSpec {
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
            summands: self.summands.clone(),
        }
    }

    pub fn any_continuous(&self) -> bool {
        (0..self.n()).any(|k| self.summand(k).is_continuous())
    }
}

fn check_coeffs(coeffs: &[f64]) -> Result<()> {
    if coeffs.is_empty() {
        return Err(invalid("a sum needs at least one coefficient"));
    }
    if let Some(&x) = coeffs.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(x));
    }
    Ok(())
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn max_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// JSON form of a law: `{"type":"discrete","atoms":[..],"probs":[..]}`,
/// `{"type":"rademacher"}`, `{"type":"bernoulli","p":..}`,
/// `{"type":"uniform","a":..,"b":..}`, `{"type":"pointmass","x":..}` or the
/// sampler-backed `{"type":"gaussian","mean":..,"sd":..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistSpec {
    Discrete { atoms: Vec<f64>, probs: Vec<f64> },
    Rademacher,
    Bernoulli { p: f64 },
    Uniform { a: f64, b: f64 },
    Pointmass { x: f64 },
    Gaussian { mean: f64, sd: f64 },
}

impl TryFrom<DistSpec> for Distribution {
    type Error = Error;

    fn try_from(spec: DistSpec) -> Result<Self> {
        match spec {
            DistSpec::Discrete { atoms, probs } => make_discrete(&atoms, &probs),
            DistSpec::Rademacher => Ok(Distribution::rademacher()),
            DistSpec::Bernoulli { p } => Distribution::bernoulli(p),
            DistSpec::Uniform { a, b } => Distribution::uniform(a, b),
            DistSpec::Pointmass { x } => {
                if !x.is_finite() {
                    return Err(Error::NonFinite(x));
                }
                Ok(Distribution::point_mass(x))
            }
            DistSpec::Gaussian { mean, sd } => Distribution::gaussian(mean, sd),
        }
    }
}

impl From<&Distribution> for DistSpec {
    fn from(d: &Distribution) -> Self {
        match d {
            Distribution::Discrete(d) => DistSpec::Discrete {
                atoms: d.atoms().to_vec(),
                probs: d.probs().to_vec(),
            },
            Distribution::Analytic(Family::Rademacher) => DistSpec::Rademacher,
            Distribution::Analytic(Family::Bernoulli { p }) => DistSpec::Bernoulli { p: *p },
            Distribution::Analytic(Family::Uniform { a, b }) => DistSpec::Uniform { a: *a, b: *b },
            Distribution::Analytic(Family::PointMass { x }) => DistSpec::Pointmass { x: *x },
            Distribution::Sampler(SamplerLaw::Gaussian { mean, sd }) => DistSpec::Gaussian { mean: *mean, sd: *sd },
        }
    }
}

impl Distribution {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DistSpec = serde_json::from_str(text).map_err(|e| Error::Spec(format!("distribution: {e}")))?;
        spec.try_into()
    }
}
