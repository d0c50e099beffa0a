//! Fitting the constants of an inequality on a calibration corpus.

use serde::Serialize;

use crate::bounds::{BoundReport, ConstantSet, InequalityId, Shape};

/// Rates tried for `c_exp`, largest first so that ties go to the larger rate.
pub const RATE_GRID: [f64; 5] = [2.0, 1.0, 0.5, 0.25, 0.125];

/// Upper limit on the ulp steps used to absorb rounding after the fit.
const MAX_BUMPS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitStatus {
    Fitted,
    /// No finite row to fit on.
    AllVacuous,
    /// No constant in the search space makes every row hold.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitOutcome {
    pub bound: InequalityId,
    pub status: FitStatus,
    pub constants: Option<ConstantSet>,
    /// Finite rows the fit used.
    pub rows: usize,
    /// Largest `lhs / rhs` on those rows under the fitted constants.
    pub max_ratio: Option<f64>,
}

/// Smallest `C_front` (with `C_exp = 1`) making `lhs ≤ rhs` on every finite
/// row of `bound`, with `c_exp` chosen from [`RATE_GRID`].
///
/// `p_exponent` is taken from the rows. Returns a status rather than an error
/// when nothing can be fitted.
pub fn fit_constants(rows: &[BoundReport], bound: InequalityId) -> FitOutcome {
    let finite: Vec<&BoundReport> = rows
        .iter()
        .filter(|r| r.bound == bound && matches!(r.shape, Shape::Finite(_)))
        .collect();
    let p_exponent = finite
        .first()
        .map(|r| r.constants.p_exponent)
        .unwrap_or(ConstantSet::default().p_exponent);
    let outcome = |status, constants, max_ratio| FitOutcome {
        bound,
        status,
        constants,
        rows: finite.len(),
        max_ratio,
    };
    if finite.is_empty() {
        return outcome(FitStatus::AllVacuous, None, None);
    }

    let mut best: Option<(f64, f64)> = None;
    for &rate in &RATE_GRID {
        let mut need = 0.0_f64;
        let mut feasible = true;
        for r in &finite {
            let s = r.shape.finite().expect("filtered to finite shapes");
            let slack = r.lhs - s.exp_factor(rate).unwrap_or(0.0);
            if slack <= 0.0 {
                continue;
            }
            if !(s.algebraic > 0.0) || !s.algebraic.is_finite() {
                feasible = false;
                break;
            }
            need = need.max(slack / s.algebraic);
        }
        if feasible && need.is_finite() && best.is_none_or(|(c, _)| need < c) {
            best = Some((need, rate));
        }
    }
    let Some((need, rate)) = best else {
        return outcome(FitStatus::Infeasible, None, None);
    };

    let mut constants = ConstantSet {
        c_front: need.max(f64::MIN_POSITIVE),
        c_exp_mult: 1.0,
        c_rate: rate,
        p_exponent,
    };
    let holds = |c: &ConstantSet| finite.iter().all(|r| r.shape.evaluate(c).admits(r.lhs));
    let mut bumps = 0;
    while !holds(&constants) {
        if bumps == MAX_BUMPS {
            return outcome(FitStatus::Infeasible, None, None);
        }
        constants.c_front = constants.c_front.next_up();
        bumps += 1;
    }
    let max_ratio = finite
        .iter()
        .filter_map(|r| r.shape.evaluate(&constants).value().map(|v| r.lhs / v))
        .fold(f64::NEG_INFINITY, f64::max);
    outcome(FitStatus::Fitted, Some(constants), Some(max_ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{BoundShape, Exponent, Rhs};
    use crate::concentration::Method;

    fn row(lhs: f64, shape: Shape) -> BoundReport {
        BoundReport {
            experiment_id: "t".into(),
            bound: InequalityId::Thm1,
            lambda: 1.0,
            lhs,
            lhs_method: Method::Exact,
            lhs_ci: 0.0,
            alpha: None,
            gamma: None,
            d: None,
            tau: None,
            m: None,
            p: None,
            a_norm: 1.0,
            a_inf: 1.0,
            shape,
            constants: ConstantSet::default(),
            rhs: Rhs::Vacuous,
            satisfied: true,
        }
    }

    fn shape(algebraic: f64, arg: f64) -> Shape {
        Shape::Finite(BoundShape {
            algebraic,
            exponent: Some(Exponent::Scaled { arg }),
        })
    }

    #[test]
    fn single_row_ratio() {
        let fit = fit_constants(&[row(0.5, shape(1.0, 1e6))], InequalityId::Thm1);
        assert_eq!(fit.status, FitStatus::Fitted);
        let c = fit.constants.unwrap();
        assert!((c.c_front - 0.5).abs() < 1e-15);
        assert_eq!(c.c_exp_mult, 1.0);
        // exponential term is zero at every rate, so the largest rate wins the tie
        assert_eq!(c.c_rate, 2.0);
    }

    #[test]
    fn all_vacuous() {
        let fit = fit_constants(&[row(0.5, Shape::Vacuous)], InequalityId::Thm1);
        assert_eq!(fit.status, FitStatus::AllVacuous);
        assert!(fit.constants.is_none());
    }

    #[test]
    fn rate_choice_prefers_smaller_front() {
        // rates 0.25 and 0.125 leave exponential terms covering both rows;
        // the tie goes to the larger one
        let rows = [row(0.6, shape(1.0, 1.0)), row(0.3, shape(0.5, 4.0))];
        let fit = fit_constants(&rows, InequalityId::Thm1);
        let c = fit.constants.unwrap();
        assert_eq!(c.c_rate, 0.25);
        assert_eq!(c.c_front, f64::MIN_POSITIVE);
        for r in &rows {
            assert!(r.shape.evaluate(&c).admits(r.lhs));
        }
        assert!(fit.max_ratio.unwrap() <= 1.0);
    }

    #[test]
    fn exponential_term_covers_everything() {
        let fit = fit_constants(&[row(0.1, shape(1.0, 0.0))], InequalityId::Thm1);
        let c = fit.constants.unwrap();
        assert!(c.c_front > 0.0 && c.c_front < 1e-300);
    }

    #[test]
    fn never_violates_calibration() {
        let rows: Vec<BoundReport> = (1..50)
            .map(|i| {
                let x = i as f64;
                row((x * 0.37).fract(), shape(1.0 / x.sqrt(), (x * 0.11).fract()))
            })
            .collect();
        let fit = fit_constants(&rows, InequalityId::Thm1);
        let c = fit.constants.unwrap();
        assert!(rows.iter().all(|r| r.shape.evaluate(&c).admits(r.lhs)));
    }
}
