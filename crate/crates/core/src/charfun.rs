//! Characteristic functions and the Esseen integrals that bracket `Q`.
//!
//! For every law `λ ∫_0^{1/λ} |F̂(t)|² dt ≪ Q(F, λ) ≪ λ ∫_0^{1/λ} |F̂(t)| dt`;
//! when `F̂ ≥ 0` the plain integral `λ ∫_0^{1/λ} F̂(t) dt` is two-sidedly
//! equivalent to `Q`. This module evaluates those integrals together with the
//! auxiliary infinitely divisible laws `H_{z,γ}` and the pointwise estimates
//! that feed the anti-concentration bounds.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::dist::{max_norm, norm, Distribution, Family, SumSpec};
use crate::error::{invalid, Error, Result};
use crate::lattice::lattice_dist;
use crate::quadrature::integrate;
pub use crate::quadrature::QuadratureSettings;

/// Negativity accepted by [`esseen_symmetric`] before the hypothesis fails.
pub const NONNEG_TOL: f64 = 1e-12;
/// Imaginary part accepted by [`esseen_symmetric`] for a "real" transform.
pub const REAL_TOL: f64 = 1e-9;

/// `F̂(t) = E e^{itX}`.
pub fn char_fn(f: &Distribution, t: f64) -> Result<Complex64> {
    match f {
        Distribution::Analytic(Family::Rademacher) => Ok(Complex64::new(t.cos(), 0.0)),
        Distribution::Analytic(Family::Bernoulli { p }) => Ok(Complex64::new(1.0 - p + p * t.cos(), p * t.sin())),
        Distribution::Analytic(Family::PointMass { x }) => Ok(Complex64::cis(t * x)),
        Distribution::Analytic(Family::Uniform { a, b }) => {
            let half = 0.5 * t * (b - a);
            let sinc = if half == 0.0 { 1.0 } else { half.sin() / half };
            Ok(Complex64::cis(0.5 * t * (a + b)) * sinc)
        }
        Distribution::Discrete(d) => {
            let (mut re, mut im) = (0.0, 0.0);
            for (x, p) in d.iter() {
                let (s, c) = (t * x).sin_cos();
                re += p * c;
                im += p * s;
            }
            Ok(Complex64::new(re, im))
        }
        Distribution::Sampler(_) => Err(Error::Unsupported {
            op: "char_fn",
            variant: f.variant_name(),
        }),
    }
}

fn require_char_fn(spec: &SumSpec) -> Result<()> {
    for k in 0..spec.n() {
        if let Distribution::Sampler(_) = spec.summand(k) {
            return Err(Error::Unsupported {
                op: "char_fn",
                variant: spec.summand(k).variant_name(),
            });
        }
    }
    Ok(())
}

/// `F̂_a(t) = Π_k F̂_k(a_k t)`.
pub fn sum_char_fn(spec: &SumSpec, t: f64) -> Result<Complex64> {
    require_char_fn(spec)?;
    Ok(sum_char_fn_unchecked(spec, t))
}

fn sum_char_fn_unchecked(spec: &SumSpec, t: f64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (k, &a) in spec.coeffs().iter().enumerate() {
        acc *= char_fn(spec.summand(k), a * t).expect("checked summands");
    }
    acc
}

/// Highest frequency present in `F̂_a`: `Σ |a_k| · max|supp X_k|`. It also
/// bounds `|d/dt F̂_a| ≤ Σ |a_k| E|X_k|`.
pub fn frequency_bound(spec: &SumSpec) -> f64 {
    spec.coeffs()
        .iter()
        .enumerate()
        .map(|(k, a)| a.abs() * spec.summand(k).max_abs_support().unwrap_or(0.0))
        .sum()
}

/// `Σ |a_k| E|X_k|`, a Lipschitz constant of `F̂_a`.
pub fn derivative_bound(spec: &SumSpec) -> f64 {
    spec.coeffs()
        .iter()
        .enumerate()
        .map(|(k, a)| a.abs() * spec.summand(k).mean_abs().unwrap_or(f64::INFINITY))
        .sum()
}

fn esseen_integral<F>(spec: &SumSpec, lambda: f64, qs: &QuadratureSettings, integrand: F) -> Result<f64>
where
    F: Fn(Complex64) -> f64,
{
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    qs.validate()?;
    require_char_fn(spec)?;
    let upper = 1.0 / lambda;
    if derivative_bound(spec) == 0.0 {
        // F̂_a ≡ 1 on the whole line
        return Ok(lambda * upper * integrand(Complex64::new(1.0, 0.0)));
    }
    let freq = frequency_bound(spec);
    let panel = if freq > 0.0 { PI / freq } else { f64::INFINITY };
    let scaled = QuadratureSettings {
        abs_tolerance: qs.abs_tolerance / lambda,
        ..*qs
    };
    let value = integrate(
        |t| integrand(sum_char_fn_unchecked(spec, t)),
        0.0,
        upper,
        panel,
        &scaled,
    )?;
    Ok(lambda * value)
}

/// `λ ∫_0^{1/λ} |F̂_a(t)| dt`, the upper Esseen integral.
pub fn esseen_upper(spec: &SumSpec, lambda: f64, qs: &QuadratureSettings) -> Result<f64> {
    esseen_integral(spec, lambda, qs, |z| z.norm())
}

/// `λ ∫_0^{1/λ} |F̂_a(t)|² dt`, the lower Esseen integral.
pub fn esseen_lower(spec: &SumSpec, lambda: f64, qs: &QuadratureSettings) -> Result<f64> {
    esseen_integral(spec, lambda, qs, |z| z.norm_sqr())
}

/// `λ ∫_0^{1/λ} F̂_a(t) dt` for a sum whose transform is real and nonnegative
/// on `[0, 1/λ]`; the hypothesis is checked on a grid finer than the
/// quadrature panels before integrating.
pub fn esseen_symmetric(spec: &SumSpec, lambda: f64, qs: &QuadratureSettings) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    require_char_fn(spec)?;
    let upper = 1.0 / lambda;
    let freq = frequency_bound(spec);
    let steps = if freq > 0.0 {
        ((upper * freq / PI) * 8.0).ceil().max(1024.0) as usize
    } else {
        1024
    };
    for i in 0..=steps {
        let t = upper * i as f64 / steps as f64;
        let z = sum_char_fn_unchecked(spec, t);
        if z.re < -NONNEG_TOL || z.im.abs() > REAL_TOL {
            return Err(Error::Hypothesis {
                t,
                value: if z.re < -NONNEG_TOL { z.re } else { z.im },
            });
        }
    }
    esseen_integral(spec, lambda, qs, |z| z.re)
}

/// `Ĥ_{z,γ}(t) = exp(−γ/2 · Σ_k (1 − cos(2 a_k z t)))`, always in `(0, 1]`.
pub fn h_char(a: &[f64], z: f64, gamma: f64, t: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(invalid(format!("gamma must be positive, got {gamma}")));
    }
    let s: f64 = a
        .iter()
        .map(|ak| {
            // 1 − cos θ = 2 sin²(θ/2), without cancellation near θ = 0
            let half = ak * z * t;
            2.0 * half.sin().powi(2)
        })
        .sum();
    Ok((-0.5 * gamma * s).exp())
}

/// Both sides of `|F̂(t)| ≤ exp(−(1 − |F̂(t)|²)/2)`.
///
/// `|F̂|²` is clamped to 1 before use; both sides are then computed from the
/// same value.
pub fn check_bound_6(f: &Distribution, t: f64) -> Result<(f64, f64)> {
    let s = char_fn(f, t)?.norm_sqr().min(1.0);
    Ok((s.sqrt(), (-0.5 * (1.0 - s)).exp()))
}

/// `lhs ≤ rhs` up to two ulps: the inequality is tight at `|F̂| = 1`, where
/// the rounding of `sqrt` and `exp` can land either side.
pub fn bound_6_holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + 2.0 * f64::EPSILON)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeRegime {
    /// `|t| ≤ 1/(2‖a‖∞)`: envelope `exp(−c ‖a‖² t²)`.
    Small,
    /// `1/(2‖a‖∞) ≤ |t| ≤ 1`: envelope `exp(−c dist(ta, ℤⁿ)²)`.
    Lattice,
    /// `|t| > 1`: the lattice envelope, outside the range the estimate is stated for.
    Beyond,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub t: f64,
    pub h: f64,
    pub envelope: f64,
    pub regime: EnvelopeRegime,
    pub holds: bool,
    /// Largest `c` for which `Ĥ_{π,1}(t) ≤ envelope` at this `t` (infinite when the exponent vanishes).
    pub feasible_c: f64,
}

/// Compares `Ĥ_{π,1}(t)` with its Gaussian-type envelope at rate `c_probe`.
pub fn check_bounds_7(a: &[f64], t: f64, c_probe: f64) -> Result<EnvelopeReport> {
    if !(c_probe > 0.0) {
        return Err(invalid(format!("c_probe must be positive, got {c_probe}")));
    }
    let a_inf = max_norm(a);
    if a_inf == 0.0 {
        return Err(Error::DegenerateCoefficients);
    }
    let h = h_char(a, PI, 1.0, t)?;
    let t0 = 1.0 / (2.0 * a_inf);
    let (regime, shape) = if t.abs() <= t0 {
        let an = norm(a);
        (EnvelopeRegime::Small, an * an * t * t)
    } else {
        let d = lattice_dist(a, t);
        let regime = if t.abs() <= 1.0 {
            EnvelopeRegime::Lattice
        } else {
            EnvelopeRegime::Beyond
        };
        (regime, d * d)
    };
    let envelope = (-c_probe * shape).exp();
    let feasible_c = if shape > 0.0 { -h.ln() / shape } else { f64::INFINITY };
    Ok(EnvelopeReport {
        t,
        h,
        envelope,
        regime,
        holds: h <= envelope,
        feasible_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{make_discrete, symmetrize};

    fn single(law: Distribution) -> SumSpec {
        SumSpec::iid(vec![1.0], law).unwrap()
    }

    #[test]
    fn char_fn_examples() {
        let r = Distribution::rademacher();
        assert_eq!(char_fn(&r, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        assert!((char_fn(&r, PI).unwrap().re + 1.0).abs() < 1e-15);
        let pm = Distribution::point_mass(1.7);
        let z = char_fn(&pm, 0.9).unwrap();
        assert!((z.norm() - 1.0).abs() < 1e-15);
        assert!((z.arg() - 1.53).abs() < 1e-12);
        let g = Distribution::gaussian(0.0, 1.0).unwrap();
        assert!(char_fn(&g, 1.0).is_err());
    }

    #[test]
    fn analytic_families_match_atoms() {
        let b = Distribution::bernoulli(0.3).unwrap();
        let bd = Distribution::Discrete(b.to_discrete().unwrap());
        for &t in &[-3.0, 0.2, 1.0, 7.5] {
            assert!((char_fn(&b, t).unwrap() - char_fn(&bd, t).unwrap()).norm() < 1e-15);
        }
        let u = Distribution::uniform(-1.0, 3.0).unwrap();
        let t: f64 = 0.8;
        let closed = (Complex64::cis(3.0 * t) - Complex64::cis(-t)) / Complex64::new(0.0, 4.0 * t);
        assert!((char_fn(&u, t).unwrap() - closed).norm() < 1e-15);
        assert_eq!(char_fn(&u, 0.0).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn sum_char_fn_examples() {
        let two = SumSpec::iid(vec![1.0, 1.0], Distribution::rademacher()).unwrap();
        let t: f64 = 0.7;
        assert!((sum_char_fn(&two, t).unwrap().re - t.cos().powi(2)).abs() < 1e-15);
        assert_eq!(sum_char_fn(&two, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        let mixed = SumSpec::iid(vec![1.0, 2.0], Distribution::rademacher()).unwrap();
        let v = sum_char_fn(&mixed, 0.5).unwrap().re;
        assert!((v - 0.5f64.cos() * 1f64.cos()).abs() < 1e-15);
        assert!((v - 0.4742).abs() < 1e-4);
    }

    #[test]
    fn esseen_analytic_cases() {
        let qs = QuadratureSettings::default();
        let pm = single(Distribution::point_mass(0.0));
        assert_eq!(esseen_upper(&pm, 1.0, &qs).unwrap(), 1.0);
        assert_eq!(esseen_lower(&pm, 1.0, &qs).unwrap(), 1.0);
        let r = single(Distribution::rademacher());
        assert!((esseen_upper(&r, 1.0, &qs).unwrap() - 1f64.sin()).abs() < 1e-8);
        let lam = 2.0 / PI;
        assert!((esseen_upper(&r, lam, &qs).unwrap() - 2.0 / PI).abs() < 1e-8);
        let lower = esseen_lower(&r, 1.0, &qs).unwrap();
        assert!((lower - (0.5 + 2f64.sin() / 4.0)).abs() < 1e-8);
        assert!(lower <= esseen_upper(&r, 1.0, &qs).unwrap());
    }

    #[test]
    fn esseen_point_mass_off_origin() {
        let qs = QuadratureSettings::default();
        let pm = single(Distribution::point_mass(3.0));
        assert!((esseen_upper(&pm, 0.5, &qs).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(esseen_symmetric(&pm, 0.5, &qs), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn esseen_symmetric_cases() {
        let qs = QuadratureSettings::default();
        let g = symmetrize(&Distribution::rademacher()).unwrap();
        let v = esseen_symmetric(&single(g), 1.0, &qs).unwrap();
        assert!((v - (0.5 + 2f64.sin() / 4.0)).abs() < 1e-8);
        let z = single(Distribution::point_mass(0.0));
        assert_eq!(esseen_symmetric(&z, 1.0, &qs).unwrap(), 1.0);
        // Rademacher itself has F̂ = cos t < 0 on (π/2, 3π/2)
        let r = single(Distribution::rademacher());
        assert!(matches!(esseen_symmetric(&r, 0.5, &qs), Err(Error::Hypothesis { .. })));
        assert!(esseen_symmetric(&r, 1.0, &qs).is_ok());
    }

    #[test]
    fn esseen_rejects_sampler_and_bad_lambda() {
        let qs = QuadratureSettings::default();
        let g = single(Distribution::gaussian(0.0, 1.0).unwrap());
        assert!(esseen_upper(&g, 1.0, &qs).is_err());
        let r = single(Distribution::rademacher());
        assert!(esseen_upper(&r, 0.0, &qs).is_err());
    }

    #[test]
    fn h_char_examples() {
        assert_eq!(h_char(&[1.0, 2.0], 1.3, 0.7, 0.0).unwrap(), 1.0);
        let v = h_char(&[1.0], PI, 1.0, 0.5).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        let a = [0.3, -1.2, 2.5];
        let (z, y, g, t) = (0.8, 2.1, 1.7, 0.45);
        let lhs = h_char(&a, z, g, t).unwrap();
        let rhs = h_char(&a, y, g, z * t / y).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
        let pow = h_char(&a, z, 1.0, t).unwrap().powf(g);
        assert!((lhs - pow).abs() < 1e-12);
        assert!(h_char(&a, z, 0.0, t).is_err());
    }

    #[test]
    fn bound_6_examples() {
        let (l, r) = check_bound_6(&Distribution::point_mass(2.0), 1.3).unwrap();
        assert!((l - 1.0).abs() < 1e-15 && (r - 1.0).abs() < 1e-15);
        assert!(bound_6_holds(l, r));
        let (l, r) = check_bound_6(&Distribution::rademacher(), PI / 2.0).unwrap();
        assert!(l < 1e-15);
        assert!((r - (-0.5f64).exp()).abs() < 1e-15);
        assert!(bound_6_holds(l, r));
        let d = make_discrete(&[0.0, 0.3, 2.0], &[0.2, 0.5, 0.3]).unwrap();
        let (l, r) = check_bound_6(&d, 4.0).unwrap();
        assert!(bound_6_holds(l, r));
    }

    #[test]
    fn bounds_7_examples() {
        let rep = check_bounds_7(&[1.0, 2.0], 0.0, 0.3).unwrap();
        assert_eq!((rep.h, rep.envelope, rep.holds), (1.0, 1.0, true));
        let rep = check_bounds_7(&[1.0], 0.25, 0.4).unwrap();
        assert_eq!(rep.regime, EnvelopeRegime::Small);
        assert!((rep.h - (-0.5f64).exp()).abs() < 1e-15);
        assert!((rep.envelope - (-0.4f64 * 0.0625).exp()).abs() < 1e-15);
        assert!(rep.holds);
        let rep = check_bounds_7(&[1.0], 1.0, 5.0).unwrap();
        assert_eq!(rep.regime, EnvelopeRegime::Lattice);
        assert_eq!(rep.envelope, 1.0);
        assert!(rep.holds);
        assert_eq!(check_bounds_7(&[1.0], 2.5, 1.0).unwrap().regime, EnvelopeRegime::Beyond);
        assert!(check_bounds_7(&[0.0, 0.0], 0.5, 1.0).is_err());
        assert!(check_bounds_7(&[1.0], 0.5, 0.0).is_err());
    }
}
