//! Right-hand sides of the concentration inequalities with explicit constants.
//!
//! Every inequality has the form `Q ≤ C_front · A + C_exp · exp(−E)` where the
//! algebraic term `A` and the exponent `E` depend on the inputs only (the
//! exponent may also scale with the rate constant). [`Shape`] captures that
//! constant-free part so the harness can refit constants without recomputing
//! anything, and [`Rhs`] is the evaluated value.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Power of `p` inside the exponential of the Friedland–Sodin style bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum PExponent {
    One,
    Two,
}

impl PExponent {
    pub fn power(self) -> i32 {
        match self {
            PExponent::One => 1,
            PExponent::Two => 2,
        }
    }
}

impl TryFrom<u8> for PExponent {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            1 => Ok(PExponent::One),
            2 => Ok(PExponent::Two),
            _ => Err(format!("p_exponent must be 1 or 2, got {v}")),
        }
    }
}

impl From<PExponent> for u8 {
    fn from(p: PExponent) -> u8 {
        p.power() as u8
    }
}

/// Explicit values for the absolute constants hidden in `≪`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantSet {
    /// Multiplier of the algebraic term.
    #[serde(rename = "C_front", default = "one")]
    pub c_front: f64,
    /// Multiplier of the exponential term.
    #[serde(rename = "C_exp", default = "one")]
    pub c_exp_mult: f64,
    /// Rate inside the exponential.
    #[serde(rename = "c_exp", default = "one")]
    pub c_rate: f64,
    #[serde(default = "default_p_exponent")]
    pub p_exponent: PExponent,
}

fn one() -> f64 {
    1.0
}

fn default_p_exponent() -> PExponent {
    PExponent::Two
}

impl Default for ConstantSet {
    fn default() -> Self {
        ConstantSet {
            c_front: 1.0,
            c_exp_mult: 1.0,
            c_rate: 1.0,
            p_exponent: PExponent::Two,
        }
    }
}

impl ConstantSet {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("C_front", self.c_front),
            ("C_exp", self.c_exp_mult),
            ("c_exp", self.c_rate),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// The exponent of the exponential term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Exponent {
    /// `exp(−c_exp · arg)`.
    Scaled { arg: f64 },
    /// `exp(−value)`, independent of the constants.
    Fixed { value: f64 },
}

/// Constant-free part of a finite bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundShape {
    pub algebraic: f64,
    pub exponent: Option<Exponent>,
}

impl BoundShape {
    fn algebraic(algebraic: f64) -> Self {
        BoundShape {
            algebraic,
            exponent: None,
        }
    }

    fn with_rate(algebraic: f64, arg: f64) -> Self {
        BoundShape {
            algebraic,
            exponent: Some(Exponent::Scaled { arg }),
        }
    }

    /// `exp(−E)` for the given rate, `None` when there is no exponential term.
    pub fn exp_factor(&self, c_rate: f64) -> Option<f64> {
        self.exponent.map(|e| match e {
            Exponent::Scaled { arg } => (-c_rate * arg).exp(),
            Exponent::Fixed { value } => (-value).exp(),
        })
    }

    pub fn evaluate(&self, c: &ConstantSet) -> Rhs {
        Rhs::Finite {
            algebraic: c.c_front * self.algebraic,
            exponential: self.exp_factor(c.c_rate).map_or(0.0, |e| c.c_exp_mult * e),
        }
    }
}

/// A bound shape, or the marker that the inequality gives no information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Finite(BoundShape),
    Vacuous,
}

impl Shape {
    pub fn evaluate(&self, c: &ConstantSet) -> Rhs {
        match self {
            Shape::Finite(s) => s.evaluate(c),
            Shape::Vacuous => Rhs::Vacuous,
        }
    }

    pub fn finite(&self) -> Option<&BoundShape> {
        match self {
            Shape::Finite(s) => Some(s),
            Shape::Vacuous => None,
        }
    }
}

/// Evaluated right-hand side; `Vacuous` stands for `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Rhs {
    Finite { algebraic: f64, exponential: f64 },
    Vacuous,
}

impl Rhs {
    pub fn value(&self) -> Option<f64> {
        match self {
            Rhs::Finite { algebraic, exponential } => Some(algebraic + exponential),
            Rhs::Vacuous => None,
        }
    }

    pub fn is_vacuous(&self) -> bool {
        matches!(self, Rhs::Vacuous)
    }

    /// A vacuous bound is never violated.
    pub fn admits(&self, lhs: f64) -> bool {
        self.value().is_none_or(|v| lhs <= v)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && !v.is_nan() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {v}")))
    }
}

fn unit_interval(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0, 1], got {v}")))
    }
}

fn nonneg_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("alpha must be nonnegative, got {alpha}")))
    }
}

fn open_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("gamma must lie in (0, 1), got {gamma}")))
    }
}

fn sum_scale_shape(lambda: f64, lambda_k: &[f64], weights: &[f64], weight_name: &str) -> Result<Shape> {
    positive("lambda", lambda)?;
    if lambda_k.len() != weights.len() {
        return Err(Error::LengthMismatch {
            atoms: lambda_k.len(),
            probs: weights.len(),
        });
    }
    if lambda_k.is_empty() {
        return Err(invalid("need at least one summand"));
    }
    let mut denom = 0.0;
    for (&lk, &w) in lambda_k.iter().zip(weights) {
        positive("lambda_k", lk)?;
        if lk > lambda {
            return Err(invalid(format!("lambda_k = {lk} exceeds lambda = {lambda}")));
        }
        unit_interval(weight_name, w)?;
        denom += lk * lk * w;
    }
    if denom <= 0.0 {
        return Ok(Shape::Vacuous);
    }
    Ok(Shape::Finite(BoundShape::algebraic(lambda / denom.sqrt())))
}

/// `λ (Σ λ_k² (1 − q_k))^{-1/2}` for a sum of independent terms with
/// `q_k = Q(W_k, λ_k)`.
pub fn kr_shape(lambda: f64, lambda_k: &[f64], q_k: &[f64]) -> Result<Shape> {
    for &q in q_k {
        unit_interval("q_k", q)?;
    }
    let gaps: Vec<f64> = q_k.iter().map(|q| 1.0 - q).collect();
    sum_scale_shape(lambda, lambda_k, &gaps, "1 - q_k")
}

pub fn kr_bound(lambda: f64, lambda_k: &[f64], q_k: &[f64], c: f64) -> Result<Rhs> {
    positive("C", c)?;
    Ok(kr_shape(lambda, lambda_k, q_k)?.evaluate(&front_only(c)))
}

/// `λ (Σ λ_k² M_k(λ_k))^{-1/2}`.
pub fn esseen_prop_shape(lambda: f64, lambda_k: &[f64], m_k: &[f64]) -> Result<Shape> {
    sum_scale_shape(lambda, lambda_k, m_k, "M_k")
}

pub fn esseen_prop_bound(lambda: f64, lambda_k: &[f64], m_k: &[f64], c: f64) -> Result<Rhs> {
    positive("C", c)?;
    Ok(esseen_prop_shape(lambda, lambda_k, m_k)?.evaluate(&front_only(c)))
}

/// `1/sqrt(n M(τ))`, the i.i.d. equal-scale case of [`esseen_prop_shape`].
pub fn iid_rate_shape(n: usize, m: f64) -> Result<Shape> {
    if n == 0 {
        return Err(invalid("need at least one summand"));
    }
    unit_interval("M", m)?;
    if m == 0.0 {
        return Ok(Shape::Vacuous);
    }
    Ok(Shape::Finite(BoundShape::algebraic(1.0 / (n as f64 * m).sqrt())))
}

fn front_only(c: f64) -> ConstantSet {
    ConstantSet {
        c_front: c,
        ..ConstantSet::default()
    }
}

/// `1/(‖a‖ D √p) + exp(−c p^k α²)` under the interval condition, with `k`
/// from the constant set.
pub fn fs_shape(a_norm: f64, d: f64, alpha: f64, p: f64, p_exponent: PExponent) -> Result<Shape> {
    positive("a_norm", a_norm)?;
    positive("D", d)?;
    nonneg_alpha(alpha)?;
    unit_interval("p", p)?;
    if p == 0.0 {
        return Ok(Shape::Vacuous);
    }
    let arg = p.powi(p_exponent.power()) * alpha * alpha;
    Ok(Shape::Finite(BoundShape::with_rate(1.0 / (a_norm * d * p.sqrt()), arg)))
}

pub fn fs_bound(a_norm: f64, d: f64, alpha: f64, p: f64, c: &ConstantSet) -> Result<Rhs> {
    c.validate()?;
    Ok(fs_shape(a_norm, d, alpha, p, c.p_exponent)?.evaluate(c))
}

/// `1/(γ D ‖a‖ √p) + exp(−2 p α²)`; the rate is fixed, so `c_exp` is unused.
pub fn rv_shape(a_norm: f64, d: f64, gamma: f64, alpha: f64, p: f64) -> Result<Shape> {
    positive("a_norm", a_norm)?;
    positive("D", d)?;
    open_gamma(gamma)?;
    nonneg_alpha(alpha)?;
    unit_interval("p", p)?;
    if p == 0.0 {
        return Ok(Shape::Vacuous);
    }
    Ok(Shape::Finite(BoundShape {
        algebraic: 1.0 / (gamma * d * a_norm * p.sqrt()),
        exponent: Some(Exponent::Fixed {
            value: 2.0 * p * alpha * alpha,
        }),
    }))
}

pub fn rv_bound(a_norm: f64, d: f64, gamma: f64, alpha: f64, p: f64, c: &ConstantSet) -> Result<Rhs> {
    c.validate()?;
    Ok(rv_shape(a_norm, d, gamma, alpha, p)?.evaluate(c))
}

/// `1/(‖a‖ D γ √M) + exp(−c α² M)`; `γ = None` drops the `γ` factor.
fn structured_shape(a_norm: f64, d: f64, gamma: Option<f64>, alpha: f64, m: f64) -> Result<Shape> {
    positive("a_norm", a_norm)?;
    positive("D", d)?;
    if let Some(g) = gamma {
        open_gamma(g)?;
    }
    nonneg_alpha(alpha)?;
    unit_interval("M", m)?;
    if m == 0.0 {
        return Ok(Shape::Vacuous);
    }
    let g = gamma.unwrap_or(1.0);
    Ok(Shape::Finite(BoundShape::with_rate(
        1.0 / (a_norm * d * g * m.sqrt()),
        alpha * alpha * m,
    )))
}

/// `1/(‖a‖ √M(1)) + exp(−c α² M(1))` for `Q(F_a, 1)` under the interval
/// condition on `[1/(2‖a‖∞), 1]`.
pub fn thm1_shape(a_norm: f64, alpha: f64, m1: f64) -> Result<Shape> {
    structured_shape(a_norm, 1.0, None, alpha, m1)
}

pub fn thm1_bound(a_norm: f64, alpha: f64, m1: f64, c: &ConstantSet) -> Result<Rhs> {
    c.validate()?;
    Ok(thm1_shape(a_norm, alpha, m1)?.evaluate(c))
}

/// `1/(‖a‖ γ √M(1)) + exp(−c α² M(1))` under the `γ`-weighted condition on `[0, 1]`.
pub fn thm2_shape(a_norm: f64, gamma: f64, alpha: f64, m1: f64) -> Result<Shape> {
    structured_shape(a_norm, 1.0, Some(gamma), alpha, m1)
}

pub fn thm2_bound(a_norm: f64, gamma: f64, alpha: f64, m1: f64, c: &ConstantSet) -> Result<Rhs> {
    c.validate()?;
    Ok(thm2_shape(a_norm, gamma, alpha, m1)?.evaluate(c))
}

/// Shape of the bound on `Q(F_a, τ/D)` for a general `D` and scale `τ`.
///
/// With `a_inf` given and `D < 1/(2‖a‖∞)` no arithmetic condition is needed
/// and only the algebraic term remains. `γ = None` selects the interval
/// condition family, `Some(γ)` the `γ`-weighted one.
pub fn corollary_shape(
    a_norm: f64,
    a_inf: Option<f64>,
    d: f64,
    tau: f64,
    alpha: f64,
    gamma: Option<f64>,
    m_tau: f64,
) -> Result<(Shape, f64)> {
    positive("tau", tau)?;
    positive("D", d)?;
    let lambda = tau / d;
    let small_d = match a_inf {
        Some(ai) => {
            positive("a_inf", ai)?;
            d < 0.5 / ai
        }
        None => false,
    };
    let shape = structured_shape(a_norm, d, gamma, alpha, m_tau)?;
    let shape = match shape {
        Shape::Finite(s) if small_d => Shape::Finite(BoundShape::algebraic(s.algebraic)),
        other => other,
    };
    Ok((shape, lambda))
}

/// Value of [`corollary_shape`] together with the window width `τ/D` it bounds.
#[allow(clippy::too_many_arguments)]
pub fn corollary_bound(
    a_norm: f64,
    a_inf: Option<f64>,
    d: f64,
    tau: f64,
    alpha: f64,
    gamma: Option<f64>,
    m_tau: f64,
    c: &ConstantSet,
) -> Result<(Rhs, f64)> {
    c.validate()?;
    let (shape, lambda) = corollary_shape(a_norm, a_inf, d, tau, alpha, gamma, m_tau)?;
    Ok((shape.evaluate(c), lambda))
}

/// `‖a‖∞ / (‖a‖ √M(τ))` bounding `Q(F_a, τ‖a‖∞)` with no arithmetic
/// condition; returns the window width alongside.
pub fn unconditional_shape(a_norm: f64, a_inf: f64, tau: f64, m_tau: f64) -> Result<(Shape, f64)> {
    positive("a_norm", a_norm)?;
    positive("a_inf", a_inf)?;
    positive("tau", tau)?;
    unit_interval("M", m_tau)?;
    let lambda = tau * a_inf;
    if m_tau == 0.0 {
        return Ok((Shape::Vacuous, lambda));
    }
    Ok((
        Shape::Finite(BoundShape::algebraic(a_inf / (a_norm * m_tau.sqrt()))),
        lambda,
    ))
}

pub fn unconditional_bound(a_norm: f64, a_inf: f64, tau: f64, m_tau: f64, c: f64) -> Result<(Rhs, f64)> {
    positive("C", c)?;
    let (shape, lambda) = unconditional_shape(a_norm, a_inf, tau, m_tau)?;
    Ok((shape.evaluate(&front_only(c)), lambda))
}

/// The inequality a report row instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InequalityId {
    /// Kolmogorov–Rogozin.
    Kr,
    /// Esseen's truncated-moment refinement.
    Esseen,
    /// Friedland–Sodin.
    Fs,
    /// Rudelson–Vershynin.
    Rv,
    /// Interval condition with `M(τ)` in place of `p`.
    Thm1,
    /// `γ`-weighted condition with `M(τ)` in place of `p`.
    Thm2,
    /// No arithmetic condition, window `τ‖a‖∞`.
    Eq4,
}

impl InequalityId {
    pub const ALL: [InequalityId; 7] = [
        InequalityId::Kr,
        InequalityId::Esseen,
        InequalityId::Fs,
        InequalityId::Rv,
        InequalityId::Thm1,
        InequalityId::Thm2,
        InequalityId::Eq4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InequalityId::Kr => "kr",
            InequalityId::Esseen => "esseen",
            InequalityId::Fs => "fs",
            InequalityId::Rv => "rv",
            InequalityId::Thm1 => "thm1",
            InequalityId::Thm2 => "thm2",
            InequalityId::Eq4 => "eq4",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InequalityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown inequality `{s}`")))
    }
}

/// One instance of an inequality: measured left side, bound, inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub experiment_id: String,
    pub bound: InequalityId,
    /// Window width of the measured concentration.
    pub lambda: f64,
    pub lhs: f64,
    pub lhs_method: crate::concentration::Method,
    pub lhs_ci: f64,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub d: Option<f64>,
    pub tau: Option<f64>,
    pub m: Option<f64>,
    pub p: Option<f64>,
    pub a_norm: f64,
    pub a_inf: f64,
    pub shape: Shape,
    pub constants: ConstantSet,
    pub rhs: Rhs,
    pub satisfied: bool,
}

impl BoundReport {
    /// `lhs / rhs`, `None` for a vacuous bound.
    pub fn ratio(&self) -> Option<f64> {
        self.rhs.value().map(|v| self.lhs / v)
    }

    /// Re-evaluates the row under new constants.
    pub fn with_constants(&self, c: ConstantSet) -> BoundReport {
        let rhs = self.shape.evaluate(&c);
        BoundReport {
            constants: c,
            rhs,
            satisfied: rhs.admits(self.lhs),
            ..self.clone()
        }
    }
}

/// Parameters for a single bound evaluation, as accepted by the CLI.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "which", rename_all = "lowercase", deny_unknown_fields)]
pub enum BoundParams {
    Kr {
        lambda: f64,
        lambda_k: Vec<f64>,
        q_k: Vec<f64>,
        #[serde(default = "one")]
        c: f64,
    },
    Esseen {
        lambda: f64,
        lambda_k: Vec<f64>,
        m_k: Vec<f64>,
        #[serde(default = "one")]
        c: f64,
    },
    Fs {
        a_norm: f64,
        #[serde(rename = "D")]
        d: f64,
        alpha: f64,
        p: f64,
        #[serde(default)]
        constants: ConstantSet,
    },
    Rv {
        a_norm: f64,
        #[serde(rename = "D")]
        d: f64,
        gamma: f64,
        alpha: f64,
        p: f64,
        #[serde(default)]
        constants: ConstantSet,
    },
    Thm1 {
        a_norm: f64,
        alpha: f64,
        #[serde(rename = "M1")]
        m1: f64,
        #[serde(default)]
        constants: ConstantSet,
    },
    Thm2 {
        a_norm: f64,
        gamma: f64,
        alpha: f64,
        #[serde(rename = "M1")]
        m1: f64,
        #[serde(default)]
        constants: ConstantSet,
    },
    Corollary {
        a_norm: f64,
        #[serde(default)]
        a_inf: Option<f64>,
        #[serde(rename = "D")]
        d: f64,
        tau: f64,
        alpha: f64,
        #[serde(default)]
        gamma: Option<f64>,
        #[serde(rename = "M_tau")]
        m_tau: f64,
        #[serde(default)]
        constants: ConstantSet,
    },
    Eq4 {
        a_norm: f64,
        a_inf: f64,
        tau: f64,
        #[serde(rename = "M_tau")]
        m_tau: f64,
        #[serde(default = "one")]
        c: f64,
    },
}

/// Evaluated bound with the window width it applies to (when the parameters fix one).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub rhs: Rhs,
    pub lambda: Option<f64>,
}

impl BoundParams {
    pub fn evaluate(&self) -> Result<BoundValue> {
        let plain = |rhs| BoundValue { rhs, lambda: None };
        Ok(match self {
            BoundParams::Kr {
                lambda,
                lambda_k,
                q_k,
                c,
            } => BoundValue {
                rhs: kr_bound(*lambda, lambda_k, q_k, *c)?,
                lambda: Some(*lambda),
            },
            BoundParams::Esseen {
                lambda,
                lambda_k,
                m_k,
                c,
            } => BoundValue {
                rhs: esseen_prop_bound(*lambda, lambda_k, m_k, *c)?,
                lambda: Some(*lambda),
            },
            BoundParams::Fs {
                a_norm,
                d,
                alpha,
                p,
                constants,
            } => BoundValue {
                rhs: fs_bound(*a_norm, *d, *alpha, *p, constants)?,
                lambda: Some(1.0 / d),
            },
            BoundParams::Rv {
                a_norm,
                d,
                gamma,
                alpha,
                p,
                constants,
            } => BoundValue {
                rhs: rv_bound(*a_norm, *d, *gamma, *alpha, *p, constants)?,
                lambda: Some(1.0 / d),
            },
            BoundParams::Thm1 {
                a_norm,
                alpha,
                m1,
                constants,
            } => {
                let mut v = plain(thm1_bound(*a_norm, *alpha, *m1, constants)?);
                v.lambda = Some(1.0);
                v
            }
            BoundParams::Thm2 {
                a_norm,
                gamma,
                alpha,
                m1,
                constants,
            } => {
                let mut v = plain(thm2_bound(*a_norm, *gamma, *alpha, *m1, constants)?);
                v.lambda = Some(1.0);
                v
            }
            BoundParams::Corollary {
                a_norm,
                a_inf,
                d,
                tau,
                alpha,
                gamma,
                m_tau,
                constants,
            } => {
                let (rhs, lambda) = corollary_bound(*a_norm, *a_inf, *d, *tau, *alpha, *gamma, *m_tau, constants)?;
                BoundValue {
                    rhs,
                    lambda: Some(lambda),
                }
            }
            BoundParams::Eq4 {
                a_norm,
                a_inf,
                tau,
                m_tau,
                c,
            } => {
                let (rhs, lambda) = unconditional_bound(*a_norm, *a_inf, *tau, *m_tau, *c)?;
                BoundValue {
                    rhs,
                    lambda: Some(lambda),
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> ConstantSet {
        ConstantSet::default()
    }

    fn val(r: Rhs) -> f64 {
        r.value().unwrap()
    }

    #[test]
    fn kr_examples() {
        assert_eq!(val(kr_bound(1.0, &[1.0], &[0.0], 1.0).unwrap()), 1.0);
        let v = val(kr_bound(1.0, &[1.0; 4], &[0.5; 4], 1.0).unwrap());
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(kr_bound(1.0, &[1.0; 3], &[1.0; 3], 1.0).unwrap().is_vacuous());
        assert!(kr_bound(1.0, &[2.0], &[0.5], 1.0).is_err());
        assert!(kr_bound(1.0, &[0.0], &[0.5], 1.0).is_err());
    }

    #[test]
    fn esseen_examples() {
        let v = val(esseen_prop_bound(1.0, &[1.0], &[0.5], 1.0).unwrap());
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
        assert!(esseen_prop_bound(1.0, &[1.0; 2], &[0.0; 2], 1.0).unwrap().is_vacuous());
        // equal scales reduce to the i.i.d. rate
        let (n, m, tau, c) = (7, 0.3, 0.8, 1.7);
        let full = val(esseen_prop_bound(tau, &vec![tau; n], &vec![m; n], c).unwrap());
        let rate = val(iid_rate_shape(n, m).unwrap().evaluate(&front_only(c)));
        assert!((full - rate).abs() <= 4.0 * f64::EPSILON * rate);
    }

    #[test]
    fn fs_examples() {
        let v = val(fs_bound(1.0, 1.0, f64::INFINITY, 1.0, &unit()).unwrap());
        assert_eq!(v, 1.0);
        let c = ConstantSet {
            c_front: 2.0,
            c_exp_mult: 3.0,
            ..unit()
        };
        let v = val(fs_bound(2.0, 1.5, 0.0, 0.25, &c).unwrap());
        assert!((v - (2.0 / (2.0 * 1.5 * 0.5) + 3.0)).abs() < 1e-15);
        assert!(fs_bound(1.0, 1.0, 1.0, 0.0, &unit()).unwrap().is_vacuous());
    }

    #[test]
    fn fs_p_exponent() {
        let one = ConstantSet {
            p_exponent: PExponent::One,
            ..unit()
        };
        let (a, p) = (2.0, 0.5);
        let Rhs::Finite { exponential: e1, .. } = fs_bound(1.0, 1.0, a, p, &one).unwrap() else {
            panic!()
        };
        let Rhs::Finite { exponential: e2, .. } = fs_bound(1.0, 1.0, a, p, &unit()).unwrap() else {
            panic!()
        };
        assert!((e1 - (-p * a * a).exp()).abs() < 1e-15);
        assert!((e2 - (-p * p * a * a).exp()).abs() < 1e-15);
    }

    #[test]
    fn rv_examples() {
        let g = 1.0 - 1e-12;
        let v = val(rv_bound(1.0, 1.0, g, f64::INFINITY, 1.0, &unit()).unwrap());
        assert!((v - 1.0).abs() < 1e-11);
        let Rhs::Finite { algebraic: a1, .. } = rv_bound(1.0, 1.0, 0.2, 1.0, 0.5, &unit()).unwrap() else {
            panic!()
        };
        let Rhs::Finite { algebraic: a2, .. } = rv_bound(1.0, 1.0, 0.4, 1.0, 0.5, &unit()).unwrap() else {
            panic!()
        };
        assert!((a1 - 2.0 * a2).abs() < 1e-14);
        assert!(rv_bound(1.0, 1.0, 0.5, 1.0, 0.0, &unit()).unwrap().is_vacuous());
        // rate is fixed at 2 regardless of c_exp
        let fast = ConstantSet { c_rate: 7.0, ..unit() };
        assert_eq!(
            rv_bound(1.0, 1.0, 0.5, 1.0, 0.5, &fast).unwrap(),
            rv_bound(1.0, 1.0, 0.5, 1.0, 0.5, &unit()).unwrap()
        );
    }

    #[test]
    fn thm_examples() {
        assert_eq!(val(thm1_bound(2.0, f64::INFINITY, 1.0, &unit()).unwrap()), 0.5);
        let v = val(thm1_bound(1.0, 0.0, 0.25, &unit()).unwrap());
        assert_eq!(v, 3.0);
        assert!(thm1_bound(1.0, 1.0, 0.0, &unit()).unwrap().is_vacuous());
        // Rademacher summands: p = 0 but M(1) = 1/2
        assert!(fs_bound(3.0, 1.0, 1.0, 0.0, &unit()).unwrap().is_vacuous());
        assert!(thm1_bound(3.0, 1.0, 0.5, &unit()).unwrap().value().is_some());
        let t1 = val(thm1_bound(1.3, 0.7, 0.4, &unit()).unwrap());
        let t2 = val(thm2_bound(1.3, 1.0 - 1e-15, 0.7, 0.4, &unit()).unwrap());
        assert!((t1 - t2).abs() < 1e-12);
        let Rhs::Finite { algebraic: h, .. } = thm2_bound(1.3, 0.5, 0.7, 0.4, &unit()).unwrap() else {
            panic!()
        };
        let Rhs::Finite { algebraic: f, .. } = thm1_bound(1.3, 0.7, 0.4, &unit()).unwrap() else {
            panic!()
        };
        assert!((h - 2.0 * f).abs() < 1e-14);
    }

    #[test]
    fn corollary_reductions() {
        let c = ConstantSet {
            c_front: 1.5,
            c_exp_mult: 0.7,
            c_rate: 0.3,
            ..unit()
        };
        let (r, lambda) = corollary_bound(2.0, Some(1.0), 1.0, 1.0, 0.9, None, 0.4, &c).unwrap();
        assert_eq!(lambda, 1.0);
        assert_eq!(r, thm1_bound(2.0, 0.9, 0.4, &c).unwrap());
        // τ = D gives a bound on Q(F_a, 1)
        let (_, lambda) = corollary_bound(2.0, Some(1.0), 3.0, 3.0, 0.9, None, 0.4, &c).unwrap();
        assert_eq!(lambda, 1.0);
        // below 1/(2‖a‖∞) only the algebraic term survives
        let (r, lambda) = corollary_bound(2.0, Some(1.0), 0.25, 0.5, 0.9, Some(0.5), 0.4, &c).unwrap();
        assert_eq!(lambda, 2.0);
        let Rhs::Finite { algebraic, exponential } = r else {
            panic!()
        };
        assert_eq!(exponential, 0.0);
        assert!((algebraic - 1.5 / (2.0 * 0.25 * 0.5 * 0.4f64.sqrt())).abs() < 1e-14);
        assert!(corollary_bound(2.0, None, 1.0, 1.0, 0.9, None, 0.0, &c)
            .unwrap()
            .0
            .is_vacuous());
    }

    #[test]
    fn unconditional_matches_corollary_at_horizon() {
        let (a_norm, a_inf, tau, m) = (3.0, 1.5, 0.6, 0.35);
        let (r, lambda) = unconditional_bound(a_norm, a_inf, tau, m, 1.0).unwrap();
        assert!((lambda - 0.9).abs() < 1e-15);
        let d = 0.5 / a_inf;
        let (cor, cl) = corollary_bound(a_norm, None, d, tau, 0.0, None, m, &unit()).unwrap();
        assert!((cl - 2.0 * lambda).abs() < 1e-14);
        let Rhs::Finite { algebraic, .. } = cor else { panic!() };
        assert!((algebraic - 2.0 * val(r)).abs() < 1e-14);
    }

    #[test]
    fn vacuous_never_fails() {
        assert!(Rhs::Vacuous.admits(1.0));
        assert!(!Rhs::Finite {
            algebraic: 0.2,
            exponential: 0.1
        }
        .admits(0.5));
    }

    #[test]
    fn constants_json() {
        let c: ConstantSet = serde_json::from_str(r#"{"C_front":2,"c_exp":0.5,"p_exponent":1}"#).unwrap();
        assert_eq!(c.c_front, 2.0);
        assert_eq!(c.c_exp_mult, 1.0);
        assert_eq!(c.c_rate, 0.5);
        assert_eq!(c.p_exponent, PExponent::One);
        assert!(serde_json::from_str::<ConstantSet>(r#"{"p_exponent":3}"#).is_err());
        let back: ConstantSet = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn params_json() {
        let p: BoundParams =
            serde_json::from_str(r#"{"which":"thm1","a_norm":2,"alpha":1e300,"M1":1,"constants":{}}"#).unwrap();
        let v = p.evaluate().unwrap();
        assert_eq!(v.rhs.value(), Some(0.5));
        let p: BoundParams = serde_json::from_str(r#"{"which":"fs","a_norm":1,"D":1,"alpha":1,"p":0}"#).unwrap();
        assert!(p.evaluate().unwrap().rhs.is_vacuous());
    }
}
