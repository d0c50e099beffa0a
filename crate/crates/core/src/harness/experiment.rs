//! Evaluation of one experiment: measured concentration against every
//! requested bound, one row per `(λ, bound)`.

use rayon::prelude::*;

use crate::bounds::{
    corollary_shape, esseen_prop_shape, fs_shape, kr_shape, rv_shape, unconditional_shape, BoundReport, ConstantSet,
    InequalityId, Shape,
};
use crate::concentration::{
    dkw_half_width, exact_convolution, max_window_count, q_discrete, sample_sum, Method, MIN_MC_COUNT,
};
use crate::dist::{m_tau_of, sample, Discrete, Distribution, Family, SumSpec};
use crate::error::{Error, Result};
use crate::lattice::{alpha_over_interval, check_condition_4d, default_t_max, essential_lcd, Lcd};

use super::spec::{ExperimentSpec, MethodKind};

/// Source of the left-hand side `Q(F_a, λ)`.
enum Lhs {
    Exact(Discrete),
    Sampled { sorted: Vec<f64>, half_width: f64 },
}

impl Lhs {
    fn prepare(spec: &ExperimentSpec, sum: &SumSpec) -> Result<Lhs> {
        let m = &spec.method;
        let all_discrete = (0..sum.n()).all(|k| sum.summand(k).to_discrete().is_some());
        let exact = match m.kind {
            MethodKind::Mc => None,
            MethodKind::Exact | MethodKind::Auto if all_discrete => match exact_convolution(sum, m.atom_cap) {
                Ok(d) => Some(d),
                Err(e @ Error::AtomBudget { .. }) if m.kind == MethodKind::Exact => return Err(e),
                Err(Error::AtomBudget { .. }) => None,
                Err(e) => return Err(e),
            },
            MethodKind::Exact => {
                return Err(Error::Spec(format!(
                    "experiment `{}`: exact method needs discrete summands",
                    spec.id
                )))
            }
            MethodKind::Auto => None,
        };
        if let Some(d) = exact {
            return Ok(Lhs::Exact(d));
        }
        if m.count < MIN_MC_COUNT {
            return Err(Error::Spec(format!("monte carlo needs at least {MIN_MC_COUNT} draws")));
        }
        if !(m.delta > 0.0 && m.delta < 1.0) {
            return Err(Error::Spec("delta must lie in (0, 1)".into()));
        }
        let mut sorted = sample_sum(sum, m.count, m.seed);
        sorted.sort_unstable_by(f64::total_cmp);
        Ok(Lhs::Sampled {
            sorted,
            half_width: dkw_half_width(m.count, m.delta),
        })
    }

    fn measure(&self, lambda: f64) -> (f64, Method, f64) {
        match self {
            Lhs::Exact(d) => (q_discrete(d, lambda), Method::Exact, 0.0),
            Lhs::Sampled { sorted, half_width } => (
                max_window_count(sorted, lambda) as f64 / sorted.len() as f64,
                Method::MonteCarlo,
                *half_width,
            ),
        }
    }
}

/// Draws used for functionals of sampler-backed summand laws.
const LAW_SAMPLES: usize = 1_000_000;

/// `Q(L(X), w)`: exact for discrete and uniform laws, sampled otherwise.
pub fn law_concentration(law: &Distribution, width: f64, seed: u64) -> Result<f64> {
    if let Some(d) = law.to_discrete() {
        return Ok(q_discrete(&d, width));
    }
    if let Distribution::Analytic(Family::Uniform { a, b }) = law {
        return Ok((width / (b - a)).min(1.0));
    }
    let mut xs = sample(law, LAW_SAMPLES, seed)?;
    xs.sort_unstable_by(f64::total_cmp);
    Ok(max_window_count(&xs, width) as f64 / LAW_SAMPLES as f64)
}

/// `M(τ)` of a summand law: exact where possible, sampled from
/// independent pairs otherwise.
pub fn law_m_tau(law: &Distribution, tau: f64, seed: u64) -> Result<f64> {
    match m_tau_of(law, tau) {
        Err(Error::Unsupported { .. }) => {}
        other => return other,
    }
    let x1 = sample(law, LAW_SAMPLES, seed)?;
    let x2 = sample(law, LAW_SAMPLES, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let total: f64 = x1
        .iter()
        .zip(&x2)
        .map(|(a, b)| {
            let r = (a - b) / tau;
            (r * r).min(1.0)
        })
        .sum();
    Ok(total / LAW_SAMPLES as f64)
}

/// `p = 1 − Q(L(X), 2)`.
pub fn law_p(law: &Distribution, seed: u64) -> Result<f64> {
    Ok((1.0 - law_concentration(law, 2.0, seed)?).max(0.0))
}

struct Context<'a> {
    spec: &'a ExperimentSpec,
    sum: &'a SumSpec,
    a_norm: f64,
    a_inf: f64,
    t0: f64,
    constants: ConstantSet,
}

struct Row {
    alpha: Option<f64>,
    gamma: Option<f64>,
    d: Option<f64>,
    tau: Option<f64>,
    m: Option<f64>,
    p: Option<f64>,
    shape: Shape,
}

impl Context<'_> {
    fn iid(&self, bound: InequalityId) -> Result<&Distribution> {
        self.sum.iid_law().ok_or_else(|| {
            Error::Spec(format!(
                "experiment `{}`: bound `{bound}` needs identically distributed summands",
                self.spec.id
            ))
        })
    }

    fn seed(&self) -> u64 {
        self.spec.method.seed
    }

    fn interval_alpha(&self, d: f64) -> Result<f64> {
        alpha_over_interval(self.sum.coeffs(), self.t0, d.max(self.t0), self.spec.arith.alpha_tol)
    }

    /// Level `α` at which the `γ`-weighted condition holds on `[0, D]`, or
    /// `None` when it fails.
    fn weighted_alpha(&self, d: f64, gamma: f64) -> Result<Option<f64>> {
        let arith = &self.spec.arith;
        let Some(alpha) = arith.alpha else {
            // the interval condition at level α implies the weighted one for any γ < 1
            let alpha = self.interval_alpha(d)?;
            return Ok((alpha > 0.0).then_some(alpha));
        };
        let a = self.sum.coeffs();
        let t_max = arith.t_max.unwrap_or_else(|| default_t_max(a, alpha));
        let holds = match essential_lcd(a, gamma, alpha, t_max, arith.alpha_tol)? {
            Lcd::Finite { value } => d <= value,
            Lcd::Beyond { t_max } if d <= t_max => true,
            Lcd::Beyond { .. } => check_condition_4d(a, d, gamma, alpha, arith.alpha_tol)?.holds,
        };
        Ok(holds.then_some(alpha))
    }

    /// `λ_k = λ|a_k|/‖a‖∞` for the nonzero coefficients, and the laws of the summands.
    fn scales(&self, lambda: f64) -> (Vec<f64>, Vec<&Distribution>) {
        self.sum
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(k, a)| (lambda * a.abs() / self.a_inf, self.sum.summand(k)))
            .unzip()
    }

    fn row(&self, bound: InequalityId, lambda: f64) -> Result<Row> {
        let tau_spec = self.spec.tau;
        let gamma = self.spec.arith.gamma;
        let mut row = Row {
            alpha: None,
            gamma: None,
            d: None,
            tau: None,
            m: None,
            p: None,
            shape: Shape::Vacuous,
        };
        match bound {
            InequalityId::Kr | InequalityId::Esseen => {
                // Q(L(a_k X), λ_k) = Q(L(X), λ/‖a‖∞), likewise for M_k
                let width = lambda / self.a_inf;
                let (lambda_k, laws) = self.scales(lambda);
                let functional = |law: &Distribution| match bound {
                    InequalityId::Kr => law_concentration(law, width, self.seed()),
                    _ => law_m_tau(law, width, self.seed()),
                };
                let values = match self.sum.iid_law() {
                    Some(law) => vec![functional(law)?; laws.len()],
                    None => laws.iter().map(|law| functional(law)).collect::<Result<Vec<f64>>>()?,
                };
                row.tau = Some(width);
                if bound == InequalityId::Esseen && self.sum.iid_law().is_some() {
                    row.m = values.first().copied();
                }
                row.shape = match bound {
                    InequalityId::Kr => kr_shape(lambda, &lambda_k, &values)?,
                    _ => esseen_prop_shape(lambda, &lambda_k, &values)?,
                };
            }
            InequalityId::Eq4 => {
                let law = self.iid(bound)?;
                let tau = lambda / self.a_inf;
                let m = law_m_tau(law, tau, self.seed())?;
                row.tau = Some(tau);
                row.m = Some(m);
                row.shape = unconditional_shape(self.a_norm, self.a_inf, tau, m)?.0;
            }
            InequalityId::Thm1 | InequalityId::Thm2 => {
                let law = self.iid(bound)?;
                let d = tau_spec / lambda;
                let m = law_m_tau(law, tau_spec, self.seed())?;
                row.d = Some(d);
                row.tau = Some(tau_spec);
                row.m = Some(m);
                let (alpha, g) = if bound == InequalityId::Thm1 {
                    (Some(self.interval_alpha(d)?), None)
                } else {
                    row.gamma = Some(gamma);
                    (self.weighted_alpha(d, gamma)?, Some(gamma))
                };
                row.alpha = alpha;
                if let Some(alpha) = alpha {
                    row.shape = corollary_shape(self.a_norm, Some(self.a_inf), d, tau_spec, alpha, g, m)?.0;
                }
            }
            InequalityId::Fs | InequalityId::Rv => {
                let law = self.iid(bound)?;
                let d = 1.0 / lambda;
                let p = law_p(law, self.seed())?;
                row.d = Some(d);
                row.p = Some(p);
                if bound == InequalityId::Fs {
                    // the interval condition is only stated for D ≥ 1/(2‖a‖∞)
                    if d >= self.t0 {
                        let alpha = self.interval_alpha(d)?;
                        row.alpha = Some(alpha);
                        row.shape = fs_shape(self.a_norm, d, alpha, p, self.constants.p_exponent)?;
                    }
                } else {
                    row.gamma = Some(gamma);
                    row.alpha = self.weighted_alpha(d, gamma)?;
                    if let Some(alpha) = row.alpha {
                        row.shape = rv_shape(self.a_norm, d, gamma, alpha, p)?;
                    }
                }
            }
        }
        Ok(row)
    }
}

/// Evaluates every `(λ, bound)` pair of an experiment under fixed constants.
///
/// Rows come out in spec order: λ-major, then bounds in the listed order.
pub fn run_experiment(spec: &ExperimentSpec, constants: &ConstantSet) -> Result<Vec<BoundReport>> {
    constants.validate()?;
    let sum = spec.sum_spec()?;
    let (a_norm, a_inf) = (sum.norm(), sum.max_norm());
    if a_inf == 0.0 {
        return Err(Error::DegenerateCoefficients);
    }
    let lhs = Lhs::prepare(spec, &sum)?;
    let ctx = Context {
        spec,
        sum: &sum,
        a_norm,
        a_inf,
        t0: 0.5 / a_inf,
        constants: *constants,
    };
    let cells: Vec<(f64, InequalityId)> = spec
        .lambdas
        .iter()
        .flat_map(|&l| spec.bounds.iter().map(move |&b| (l, b)))
        .collect();
    cells
        .par_iter()
        .map(|&(lambda, bound)| {
            let (value, method, ci) = lhs.measure(lambda);
            let row = ctx.row(bound, lambda)?;
            let rhs = row.shape.evaluate(constants);
            Ok(BoundReport {
                experiment_id: spec.id.clone(),
                bound,
                lambda,
                lhs: value,
                lhs_method: method,
                lhs_ci: ci,
                alpha: row.alpha,
                gamma: row.gamma,
                d: row.d,
                tau: row.tau,
                m: row.m,
                p: row.p,
                a_norm,
                a_inf,
                shape: row.shape,
                constants: *constants,
                rhs,
                satisfied: rhs.admits(value),
            })
        })
        .collect()
}
