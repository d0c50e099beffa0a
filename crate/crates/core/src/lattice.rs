//! Arithmetic structure of a coefficient vector.
//!
//! Everything here is built on `t ↦ dist(ta, ℤⁿ)`, which is Lipschitz in `t`
//! with constant `‖a‖`. Infima over intervals are certified by a
//! Lipschitz branch-and-bound, and the essential least common denominator is
//! located by safe Lipschitz stepping followed by bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::dist::{max_norm, norm};
use crate::error::{invalid, Error, Result};

/// Evaluation budget for a single certified search.
pub const SEARCH_BUDGET: usize = 50_000_000;

/// `dist(ta, ℤⁿ) = sqrt(Σ_k (t a_k − round(t a_k))²)`; the minimisation over
/// `m ∈ ℤⁿ` separates by coordinate.
pub fn lattice_dist(a: &[f64], t: f64) -> f64 {
    a.iter()
        .map(|ak| {
            let x = t * ak;
            let r = x - x.round_ties_even();
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// A certified bracket `[lower, upper]` for the infimum of a Lipschitz
/// function over an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Infimum {
    pub lower: f64,
    /// Smallest value actually observed.
    pub upper: f64,
    /// Where `upper` was observed.
    pub argmin: f64,
    pub lipschitz: f64,
    pub evaluations: usize,
}

impl Infimum {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Clone, Copy)]
struct Cell {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    bound: f64,
}

impl Cell {
    fn new(lo: f64, hi: f64, f_lo: f64, f_hi: f64, lip: f64) -> Self {
        Cell {
            lo,
            hi,
            f_lo,
            f_hi,
            bound: 0.5 * (f_lo + f_hi) - 0.5 * lip * (hi - lo),
        }
    }
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    // min-heap on the lower bound, ties broken by position for determinism
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// Branch-and-bound minimisation of an `lip`-Lipschitz `f` over `[lo, hi]`,
/// stopping once the bracket is at most `tol` wide.
pub fn lipschitz_infimum<F>(f: F, lo: f64, hi: f64, lip: f64, tol: f64) -> Result<Infimum>
where
    F: Fn(f64) -> f64,
{
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid(format!("invalid interval [{lo}, {hi}]")));
    }
    if !(tol > 0.0) || !(lip >= 0.0) {
        return Err(invalid(
            "tolerance must be positive and the Lipschitz constant nonnegative",
        ));
    }
    let (f_lo, f_hi) = (f(lo), f(hi));
    let (mut upper, mut argmin) = if f_hi < f_lo { (f_hi, hi) } else { (f_lo, lo) };
    let mut evaluations = 2;
    if lo == hi {
        return Ok(Infimum {
            lower: f_lo,
            upper: f_lo,
            argmin: lo,
            lipschitz: lip,
            evaluations: 1,
        });
    }
    let mut heap = BinaryHeap::new();
    heap.push(Cell::new(lo, hi, f_lo, f_hi, lip));
    let lower = loop {
        let Some(cell) = heap.pop() else {
            break upper;
        };
        if upper - cell.bound <= tol {
            break cell.bound.min(upper);
        }
        let mid = 0.5 * (cell.lo + cell.hi);
        if mid <= cell.lo || mid >= cell.hi {
            // interval exhausted at floating-point resolution
            continue;
        }
        let f_mid = f(mid);
        evaluations += 1;
        if evaluations > SEARCH_BUDGET {
            return Err(Error::SearchBudget(SEARCH_BUDGET));
        }
        if f_mid < upper {
            upper = f_mid;
            argmin = mid;
        }
        heap.push(Cell::new(cell.lo, mid, cell.f_lo, f_mid, lip));
        heap.push(Cell::new(mid, cell.hi, f_mid, cell.f_hi, lip));
    };
    Ok(Infimum {
        lower,
        upper,
        argmin,
        lipschitz: lip,
        evaluations,
    })
}

fn nonzero_norms(a: &[f64]) -> Result<(f64, f64)> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(invalid("coefficients must be finite"));
    }
    let (n2, ninf) = (norm(a), max_norm(a));
    if ninf == 0.0 {
        return Err(Error::DegenerateCoefficients);
    }
    Ok((n2, ninf))
}

/// `1/(2‖a‖∞)`: below this time the lattice distance is exactly `t‖a‖`.
pub fn identity_horizon(a: &[f64]) -> Result<f64> {
    nonzero_norms(a).map(|(_, ninf)| 0.5 / ninf)
}

/// Certified bracket for `inf_{t ∈ [t_lo, t_hi]} dist(ta, ℤⁿ)`.
pub fn lattice_infimum(a: &[f64], t_lo: f64, t_hi: f64, tol: f64) -> Result<Infimum> {
    let (n2, _) = nonzero_norms(a)?;
    if !(t_lo > 0.0) || !(t_lo <= t_hi) {
        return Err(invalid(format!("need 0 < t_lo <= t_hi, got [{t_lo}, {t_hi}]")));
    }
    let mut inf = lipschitz_infimum(|t| lattice_dist(a, t), t_lo, t_hi, n2, tol)?;
    inf.lower = inf.lower.max(0.0);
    Ok(inf)
}

/// Largest `α` such that `‖ta − m‖ ≥ α` for all `m ∈ ℤⁿ`, `t ∈ [t_lo, t_hi]`,
/// returned as a certified lower value `v` with the true infimum in `[v, v + tol]`.
pub fn alpha_over_interval(a: &[f64], t_lo: f64, t_hi: f64, tol: f64) -> Result<f64> {
    lattice_infimum(a, t_lo, t_hi, tol).map(|inf| inf.lower)
}

/// Outcome of a certified condition check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub holds: bool,
    /// The check could not separate the margin from zero at the requested tolerance;
    /// `holds` is then `true`.
    pub indeterminate: bool,
    /// Certified lower bound on the margin (`dist − threshold`) over the interval.
    pub margin_lower: f64,
    /// Smallest observed margin.
    pub margin_upper: f64,
    /// Time of the smallest observed margin.
    pub witness: f64,
}

impl ConditionCheck {
    fn from_margin(inf: Infimum, tol: f64) -> Self {
        let (holds, indeterminate) = if inf.upper < -tol {
            (false, false)
        } else if inf.lower >= 0.0 {
            (true, false)
        } else {
            (true, true)
        };
        ConditionCheck {
            holds,
            indeterminate,
            margin_lower: inf.lower,
            margin_upper: inf.upper,
            witness: inf.argmin,
        }
    }

    fn certain(margin: f64, witness: f64) -> Self {
        ConditionCheck {
            holds: true,
            indeterminate: false,
            margin_lower: margin,
            margin_upper: margin,
            witness,
        }
    }
}

/// `‖ta − m‖ ≥ α` for all `m ∈ ℤⁿ` and `t ∈ [1/(2‖a‖∞), D]`.
///
/// Fails only on a witness with distance below `α − tol`.
pub fn check_condition_3b(a: &[f64], d: f64, alpha: f64, tol: f64) -> Result<ConditionCheck> {
    let t0 = identity_horizon(a)?;
    if !(d >= t0) {
        return Err(invalid(format!("D = {d} is below 1/(2‖a‖∞) = {t0}")));
    }
    let inf = lipschitz_infimum(|t| lattice_dist(a, t) - alpha, t0, d, norm(a), tol)?;
    Ok(ConditionCheck::from_margin(inf, tol))
}

/// `dist(ta, ℤⁿ) − min(γ t ‖a‖, α)`.
fn lcd_margin(a: &[f64], a_norm: f64, gamma: f64, alpha: f64, t: f64) -> f64 {
    lattice_dist(a, t) - (gamma * t * a_norm).min(alpha)
}

fn check_gamma_alpha(gamma: f64, alpha: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    if !(alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

/// `‖ta − m‖ ≥ min(γ t ‖a‖, α)` for all `m ∈ ℤⁿ` and `t ∈ [0, D]`.
///
/// On `[0, 1/(2‖a‖∞)]` the distance equals `t‖a‖` and the condition holds
/// outright; the rest of the range is certified with Lipschitz constant
/// `‖a‖(1 + γ)`.
pub fn check_condition_4d(a: &[f64], d: f64, gamma: f64, alpha: f64, tol: f64) -> Result<ConditionCheck> {
    check_gamma_alpha(gamma, alpha)?;
    if !(d > 0.0) {
        return Err(invalid(format!("D must be positive, got {d}")));
    }
    let (n2, ninf) = nonzero_norms(a)?;
    let t0 = 0.5 / ninf;
    if d <= t0 {
        return Ok(ConditionCheck::certain(0.0, 0.0));
    }
    let lip = n2 * (1.0 + gamma);
    let inf = lipschitz_infimum(|t| lcd_margin(a, n2, gamma, alpha, t), t0, d, lip, tol)?;
    Ok(ConditionCheck::from_margin(inf, tol))
}

/// Essential least common denominator, or the fact that none exists below `t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Lcd {
    Finite { value: f64 },
    Beyond { t_max: f64 },
}

impl Lcd {
    pub fn finite(self) -> Option<f64> {
        match self {
            Lcd::Finite { value } => Some(value),
            Lcd::Beyond { .. } => None,
        }
    }
}

/// Practical search horizon `10³ ‖a‖∞ / α`.
pub fn default_t_max(a: &[f64], alpha: f64) -> f64 {
    1e3 * max_norm(a) / alpha
}

/// `D_{α,γ}(a) = inf{t > 0 : dist(ta, ℤⁿ) ≤ min(γ‖ta‖, α)}` searched over `(0, t_max]`.
///
/// From a point with margin `v > 0` the margin stays positive for the next
/// `v/L` units of time (`L = ‖a‖(1 + γ)`), so the walk never steps over a
/// crossing. When the safe step drops below `tol/2` the walk probes `tol/2`
/// ahead instead and bisects any sign change it finds, so the answer is within
/// `tol/2` of the first crossing.
pub fn essential_lcd(a: &[f64], gamma: f64, alpha: f64, t_max: f64, tol: f64) -> Result<Lcd> {
    check_gamma_alpha(gamma, alpha)?;
    if !(t_max > 0.0) || !(tol > 0.0) {
        return Err(invalid("t_max and tol must be positive"));
    }
    let (n2, ninf) = nonzero_norms(a)?;
    let lip = n2 * (1.0 + gamma);
    let margin = |t: f64| lcd_margin(a, n2, gamma, alpha, t);
    let min_step = 0.5 * tol;
    let beyond = Ok(Lcd::Beyond { t_max });

    // on (0, 1/(2‖a‖∞)] the margin is at least (1 − γ) t ‖a‖ > 0
    let mut t = 0.5 / ninf;
    if t > t_max {
        return beyond;
    }
    let mut v = margin(t);
    let mut evaluations = 1usize;
    loop {
        if v <= 0.0 {
            return Ok(Lcd::Finite { value: t });
        }
        let safe = v / lip;
        if t + safe > t_max {
            return beyond;
        }
        evaluations += 1;
        if evaluations > SEARCH_BUDGET {
            return Err(Error::SearchBudget(SEARCH_BUDGET));
        }
        if safe >= min_step {
            t += safe;
            v = margin(t);
            continue;
        }
        let probe = (t + min_step).min(t_max);
        let w = margin(probe);
        if w <= 0.0 {
            let (mut lo, mut hi) = (t, probe);
            while hi - lo > 0.125 * tol {
                let mid = 0.5 * (lo + hi);
                if margin(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Lcd::Finite { value: hi });
        }
        if probe >= t_max {
            return beyond;
        }
        t = probe;
        v = w;
    }
}

/// Everything known about the arithmetic structure of `a` at one setting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArithmeticProfile {
    /// Certified lower value for `inf dist(ta, ℤⁿ)` on `interval`.
    pub alpha_inf: f64,
    pub interval: (f64, f64),
    pub lcd: Lcd,
    pub gamma: f64,
    pub alpha: f64,
    pub lipschitz: f64,
    /// Width of the final bracket for `alpha_inf`.
    pub bracket_width: f64,
    pub tol: f64,
}

pub fn arithmetic_profile(
    a: &[f64],
    interval: (f64, f64),
    gamma: f64,
    alpha: f64,
    t_max: f64,
    tol: f64,
) -> Result<ArithmeticProfile> {
    let inf = lattice_infimum(a, interval.0, interval.1, tol)?;
    let lcd = essential_lcd(a, gamma, alpha, t_max, tol)?;
    Ok(ArithmeticProfile {
        alpha_inf: inf.lower,
        interval,
        lcd,
        gamma,
        alpha,
        lipschitz: inf.lipschitz,
        bracket_width: inf.width(),
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_dist_examples() {
        assert!((lattice_dist(&[3.0, 4.0], 0.1) - 0.5).abs() < 1e-15);
        assert_eq!(lattice_dist(&[3.0, 4.0], 1.0), 0.0);
        assert!((lattice_dist(&[1.0; 4], 0.75) - 0.5).abs() < 1e-15);
        // ties: either rounding gives the same distance
        assert_eq!(lattice_dist(&[1.0], 0.5), 0.5);
        assert_eq!(lattice_dist(&[1.0], 1.5), 0.5);
    }

    #[test]
    fn alpha_examples() {
        let a = [1.0; 4];
        let v = alpha_over_interval(&a, 0.5, 0.75, 1e-6).unwrap();
        assert!((0.5 - 1e-6..=0.5).contains(&v), "{v}");
        let v = alpha_over_interval(&a, 0.5, 1.0, 1e-6).unwrap();
        assert!(v <= 1e-6);
        let b = [0.3, -1.1, 2.0];
        let t = 0.2;
        let v = alpha_over_interval(&b, t, t, 1e-3).unwrap();
        assert!((v - t * norm(&b)).abs() < 1e-12);
    }

    #[test]
    fn alpha_errors() {
        assert!(matches!(
            alpha_over_interval(&[0.0, 0.0], 0.5, 1.0, 1e-3),
            Err(Error::DegenerateCoefficients)
        ));
        assert!(alpha_over_interval(&[1.0], 0.0, 1.0, 1e-3).is_err());
        assert!(alpha_over_interval(&[1.0], 1.0, 0.5, 1e-3).is_err());
        assert!(alpha_over_interval(&[1.0], 0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn condition_3b_examples() {
        let a = [1.0; 4];
        let c = check_condition_3b(&a, 0.5, 0.5, 1e-6).unwrap();
        assert!(c.holds && !c.indeterminate);
        assert!((c.margin_lower - 0.5).abs() < 1e-12);
        let c = check_condition_3b(&a, 1.0, 1e-3, 1e-6).unwrap();
        assert!(!c.holds);
        assert!((c.witness - 1.0).abs() < 1e-6);
        let c = check_condition_3b(&a, 0.75, 0.4, 1e-6).unwrap();
        assert!(c.holds && !c.indeterminate);
        assert!(check_condition_3b(&a, 0.4, 0.1, 1e-6).is_err());
    }

    #[test]
    fn condition_3b_borderline_is_flagged() {
        let a = [1.0; 4];
        // inf over [0.5, 0.75] is exactly 0.5
        let c = check_condition_3b(&a, 0.75, 0.5 + 1e-8, 1e-6).unwrap();
        assert!(c.holds && c.indeterminate);
    }

    #[test]
    fn condition_4d_examples() {
        let a = [1.0; 4];
        assert!(check_condition_4d(&a, 0.5, 0.9, 3.0, 1e-6).unwrap().holds);
        let c = check_condition_4d(&a, 1.0, 0.5, 0.2, 1e-6).unwrap();
        assert!(!c.holds);
        assert!(c.witness >= 0.9 - 1e-6);
        let c = check_condition_4d(&a, 0.85, 0.5, 0.2, 1e-6).unwrap();
        assert!(c.holds && !c.indeterminate);
        assert!(check_condition_4d(&a, 0.85, 1.0, 0.2, 1e-6).is_err());
        assert!(check_condition_4d(&a, 0.85, 0.5, 0.0, 1e-6).is_err());
    }

    #[test]
    fn lcd_analytic_cases() {
        let tol = 1e-6;
        let d = essential_lcd(&[1.0; 4], 0.5, 0.2, 10.0, tol).unwrap().finite().unwrap();
        assert!((d - 0.9).abs() <= tol, "{d}");
        let d = essential_lcd(&[1.0], 0.5, 0.4, 10.0, tol).unwrap().finite().unwrap();
        assert!((d - 2.0 / 3.0).abs() <= tol, "{d}");
    }

    #[test]
    fn lcd_beyond_horizon() {
        assert_eq!(
            essential_lcd(&[1.0; 4], 0.5, 0.2, 0.8, 1e-6).unwrap(),
            Lcd::Beyond { t_max: 0.8 }
        );
        assert_eq!(
            essential_lcd(&[1.0], 0.5, 0.2, 0.3, 1e-6).unwrap(),
            Lcd::Beyond { t_max: 0.3 }
        );
    }

    #[test]
    fn lcd_then_4d_holds_just_below() {
        let a = [1.0, 2f64.sqrt()];
        let tol = 1e-6;
        let d = essential_lcd(&a, 0.1, 0.1, 10.0, tol).unwrap().finite().unwrap();
        let n2 = norm(&a);
        let first = (1..=20_000_000)
            .map(|i| i as f64 * 1e-6)
            .find(|&t| lattice_dist(&a, t) <= (0.1 * t * n2).min(0.1))
            .unwrap();
        assert!((d - first).abs() <= tol, "{d} vs {first}");
        assert!(check_condition_4d(&a, d - tol, 0.1, 0.1, tol).unwrap().holds);
        assert!(!check_condition_4d(&a, d + 10.0 * tol, 0.1, 0.1, tol).unwrap().holds);
        // no admissible time below 10 at the finer level
        assert_eq!(
            essential_lcd(&a, 0.1, 0.01, 10.0, tol).unwrap(),
            Lcd::Beyond { t_max: 10.0 }
        );
    }

    #[test]
    fn profile_collects_both() {
        let p = arithmetic_profile(&[1.0; 4], (0.5, 0.75), 0.5, 0.2, 10.0, 1e-6).unwrap();
        assert!((p.alpha_inf - 0.5).abs() <= 1e-6);
        assert!(p.bracket_width <= 1e-6);
        assert!((p.lcd.finite().unwrap() - 0.9).abs() <= 1e-6);
        assert_eq!(p.lipschitz, 2.0);
    }
}
