//! Self-contained verification suites with fixed seeds.
//!
//! Each suite produces a list of named checks (`observed` against `limit`);
//! rows without a limit are informational. A suite passes when every limited
//! check passes, including its runtime budget.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{fs_bound, thm1_bound, ConstantSet, InequalityId};
use crate::charfun::{bound_6_holds, check_bound_6, check_bounds_7, esseen_lower, esseen_symmetric, esseen_upper};
use crate::concentration::{exact_convolution, q_discrete, q_exact, regularity_factor, DEFAULT_ATOM_CAP};
use crate::dist::{dyadic_profile, m_tau, m_tau_of, max_norm, norm, symmetrize, Discrete, Distribution, SumSpec};
use crate::error::{invalid, Error, Result};
use crate::lattice::{alpha_over_interval, essential_lcd, lattice_dist, Lcd};
use crate::quadrature::QuadratureSettings;

use super::experiment::run_experiment;
use super::fit::{fit_constants, FitStatus, RATE_GRID};
use super::spec::{ArithSpec, CoeffSpec, ExperimentSpec, MethodKind, MethodSpec, Normalize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Eq4s,
    Esseen,
    Beta,
    Decay,
    Thm1,
    Lcd,
    Regularity,
    Bound6,
    Quadrature,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Eq4s,
        Suite::Esseen,
        Suite::Beta,
        Suite::Decay,
        Suite::Thm1,
        Suite::Lcd,
        Suite::Regularity,
        Suite::Bound6,
        Suite::Quadrature,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Eq4s => "eq4s",
            Suite::Esseen => "esseen",
            Suite::Beta => "beta",
            Suite::Decay => "decay",
            Suite::Thm1 => "thm1",
            Suite::Lcd => "lcd",
            Suite::Regularity => "regularity",
            Suite::Bound6 => "bound6",
            Suite::Quadrature => "quadrature",
        }
    }

    /// Wall-clock budget in seconds.
    pub fn budget(self) -> f64 {
        match self {
            Suite::Eq4s | Suite::Beta | Suite::Regularity | Suite::Quadrature => 1.0,
            Suite::Esseen => 30.0,
            Suite::Decay => 10.0,
            Suite::Bound6 => 5.0,
            Suite::Thm1 | Suite::Lcd => 60.0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub observed: f64,
    pub limit: Option<f64>,
    /// `None` for informational rows.
    pub pass: Option<bool>,
}

fn at_most(check: &str, observed: f64, limit: f64) -> Check {
    Check {
        check: check.into(),
        observed,
        limit: Some(limit),
        pass: Some(observed <= limit),
    }
}

fn at_least(check: &str, observed: f64, limit: f64) -> Check {
    Check {
        check: check.into(),
        observed,
        limit: Some(limit),
        pass: Some(observed >= limit),
    }
}

fn info(check: &str, observed: f64) -> Check {
    Check {
        check: check.into(),
        observed,
        limit: None,
        pass: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass != Some(false))
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.pass == Some(false)).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Spec(format!("writing csv: {e}"));
        w.write_record(["suite", "check", "observed", "limit", "pass"])
            .map_err(err)?;
        for c in &self.checks {
            w.write_record([
                self.suite.as_str().to_string(),
                c.check.clone(),
                format!("{:?}", c.observed),
                c.limit.map(|l| format!("{l:?}")).unwrap_or_default(),
                c.pass.map(|p| p.to_string()).unwrap_or_else(|| "info".into()),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::Spec(format!("writing csv: {e}")))
    }
}

/// Runs one suite and appends its runtime check.
pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut checks = match suite {
        Suite::Eq4s => eq4s()?,
        Suite::Esseen => esseen()?,
        Suite::Beta => beta()?,
        Suite::Decay => decay()?,
        Suite::Thm1 => thm1()?,
        Suite::Lcd => lcd()?,
        Suite::Regularity => regularity()?,
        Suite::Bound6 => bound6()?,
        Suite::Quadrature => quadrature()?,
    };
    let elapsed = start.elapsed();
    checks.push(at_most("runtime_s", elapsed.as_secs_f64(), suite.budget()));
    Ok(SuiteReport { suite, checks, elapsed })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Finite law with `k` atoms drawn from `[-span, span]` and random weights.
pub fn random_law<R: Rng>(rng: &mut R, k: usize, span: f64) -> Discrete {
    let atoms: Vec<f64> = (0..k).map(|_| rng.random_range(-span..=span)).collect();
    let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    Discrete::new(&atoms, &probs).expect("valid random law")
}

/// Equal-weight law on `k` atoms drawn from `[-span, span]`.
pub fn random_uniform_law<R: Rng>(rng: &mut R, k: usize, span: f64) -> Discrete {
    let atoms: Vec<f64> = (0..k).map(|_| rng.random_range(-span..=span)).collect();
    Discrete::new(&atoms, &vec![1.0 / k as f64; k]).expect("valid random law")
}

fn eq4s() -> Result<Vec<Check>> {
    let mut r = rng(0xe45);
    let mut max_err = 0.0_f64;
    for _ in 0..1000 {
        let n = r.random_range(1..=50);
        let scale = 10f64.powf(r.random_range(-2.0..2.0));
        let a: Vec<f64> = (0..n).map(|_| scale * r.random_range(-1.0..1.0)).collect();
        if max_norm(&a) == 0.0 {
            continue;
        }
        let t0 = 0.5 / max_norm(&a);
        let t = r.random_range(-t0..=t0);
        max_err = max_err.max((lattice_dist(&a, t) - t.abs() * norm(&a)).abs());
    }
    // the value at the left end caps any interval infimum; the stronger
    // quarter cap is only probed
    let tol = 1e-4;
    let mut half_cap_excess = f64::NEG_INFINITY;
    let mut quarter_cap_violations = 0;
    for _ in 0..50 {
        let n = r.random_range(1..=8);
        let a: Vec<f64> = (0..n).map(|_| r.random_range(0.1..2.0)).collect();
        let t0 = 0.5 / max_norm(&a);
        let d = t0 * r.random_range(1.0..4.0);
        let alpha = alpha_over_interval(&a, t0, d, tol)?;
        let ratio = norm(&a) / max_norm(&a);
        half_cap_excess = half_cap_excess.max(alpha - (0.5 * ratio + tol));
        if alpha > 0.25 * ratio {
            quarter_cap_violations += 1;
        }
    }
    let witness = alpha_over_interval(&[1.0], 0.5, 0.5, tol)?;
    Ok(vec![
        at_most("max_abs_error", max_err, 1e-9),
        at_most("left_end_cap_excess", half_cap_excess, 0.0),
        info("quarter_cap_violations_of_50", quarter_cap_violations as f64),
        info("quarter_cap_witness_alpha_a1_d0.5", witness),
    ])
}

/// Families of the sandwich corpus: Rademacher, Bernoulli(0.3) and five
/// random three-atom laws.
pub fn esseen_corpus() -> Vec<(String, Distribution)> {
    let mut r = rng(0x35e);
    let mut out = vec![
        ("rademacher".to_string(), Distribution::rademacher()),
        (
            "bernoulli0.3".to_string(),
            Distribution::bernoulli(0.3).expect("valid p"),
        ),
    ];
    for i in 0..5 {
        out.push((
            format!("three_atom_{i}"),
            Distribution::Discrete(random_law(&mut r, 3, 2.0)),
        ));
    }
    out
}

/// Equal-weight five-atom laws used as the holdout family.
pub fn esseen_holdout() -> Vec<(String, Distribution)> {
    let mut r = rng(0x401d);
    (0..5)
        .map(|i| {
            (
                format!("uniform5_{i}"),
                Distribution::Discrete(random_uniform_law(&mut r, 5, 2.0)),
            )
        })
        .collect()
}

pub const ESSEEN_LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];

/// `(q_exact, esseen_lower, esseen_upper)` for `F^{*n}` at `λ`.
pub fn sandwich(law: &Distribution, n: usize, lambda: f64, qs: &QuadratureSettings) -> Result<(f64, f64, f64)> {
    let spec = SumSpec::iid(vec![1.0; n], law.clone())?;
    let conv = exact_convolution(&spec, DEFAULT_ATOM_CAP)?;
    Ok((
        q_discrete(&conv, lambda),
        esseen_lower(&spec, lambda, qs)?,
        esseen_upper(&spec, lambda, qs)?,
    ))
}

fn esseen() -> Result<Vec<Check>> {
    let qs = QuadratureSettings::default();
    let mut order_violations = 0;
    let (mut c_low, mut c_up) = (0.0_f64, 0.0_f64);
    let (mut r_min, mut r_max) = (f64::INFINITY, 0.0_f64);
    for (_, law) in esseen_corpus() {
        let g = symmetrize(&law)?;
        for n in 1..=10 {
            let sym = SumSpec::iid(vec![1.0; n], g.clone())?;
            let sym_conv = exact_convolution(&sym, DEFAULT_ATOM_CAP)?;
            for &lambda in &ESSEEN_LAMBDAS {
                let (q, lo, up) = sandwich(&law, n, lambda, &qs)?;
                if lo > up {
                    order_violations += 1;
                }
                c_low = c_low.max(lo / q);
                c_up = c_up.max(q / up);
                let ratio = q_discrete(&sym_conv, lambda) / esseen_symmetric(&sym, lambda, &qs)?;
                r_min = r_min.min(ratio);
                r_max = r_max.max(ratio);
            }
        }
    }
    let mut holdout_violations = 0;
    for (_, law) in esseen_holdout() {
        for n in 1..=6 {
            for &lambda in &ESSEEN_LAMBDAS {
                let (q, lo, up) = sandwich(&law, n, lambda, &qs)?;
                if lo > up || lo > 1.5 * c_low * q || q > 1.5 * c_up * up {
                    holdout_violations += 1;
                }
            }
        }
    }
    Ok(vec![
        at_most("lower_above_upper", order_violations as f64, 0.0),
        at_most("fitted_c_low", c_low, f64::MAX),
        at_most("fitted_c_up", c_up, f64::MAX),
        at_most("holdout_violations", holdout_violations as f64, 0.0),
        at_least("symmetric_ratio_min", r_min, 0.1),
        at_most("symmetric_ratio_max", r_max, 10.0),
    ])
}

/// Random symmetric law: mirrored atoms at scales spread over many dyadic
/// shells, plus mass at zero half of the time.
pub fn random_symmetric_law<R: Rng>(rng: &mut R) -> Distribution {
    let k = rng.random_range(1..=12);
    let mut atoms = Vec::with_capacity(2 * k + 1);
    let mut probs = Vec::with_capacity(2 * k + 1);
    for _ in 0..k {
        let x = 2f64.powf(rng.random_range(-12.0..4.0));
        let w = rng.random_range(0.05..1.0);
        atoms.extend([x, -x]);
        probs.extend([w, w]);
    }
    if rng.random_bool(0.5) {
        atoms.push(0.0);
        probs.push(rng.random_range(0.05..1.0));
    }
    let total: f64 = probs.iter().sum();
    let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
    Distribution::Discrete(Discrete::new(&atoms, &probs).expect("valid random law"))
}

fn beta() -> Result<Vec<Check>> {
    let mut r = rng(0xbe7a);
    let mut failures = 0;
    let mut min_slack = f64::INFINITY;
    for i in 0..100 {
        let g = if i % 2 == 0 {
            random_symmetric_law(&mut r)
        } else {
            let k = r.random_range(1..=8);
            symmetrize(&Distribution::Discrete(random_law(&mut r, k, 3.0)))?
        };
        let profile = dyadic_profile(&g, 0)?;
        let m1 = m_tau(&g, 1.0)?;
        if !(profile.beta >= m1 / 4.0) {
            failures += 1;
        }
        min_slack = min_slack.min(profile.beta - m1 / 4.0);
    }
    Ok(vec![
        at_most("beta_below_quarter_m1", failures as f64, 0.0),
        info("min_beta_minus_quarter_m1", min_slack),
    ])
}

pub const DECAY_NS: [usize; 5] = [4, 8, 16, 32, 64];

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn decay() -> Result<Vec<Check>> {
    let law = Distribution::rademacher();
    let m1 = m_tau_of(&law, 1.0)?;
    let mut qs = Vec::new();
    for &n in &DECAY_NS {
        let conv = exact_convolution(&SumSpec::iid(vec![1.0; n], law.clone())?, DEFAULT_ATOM_CAP)?;
        qs.push(q_discrete(&conv, 1.0));
    }
    let lx: Vec<f64> = DECAY_NS.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = qs.iter().map(|q| q.ln()).collect();
    let slope = ls_slope(&lx, &ly);
    let c = DECAY_NS
        .iter()
        .zip(&qs)
        .map(|(&n, q)| q * (n as f64 * m1).sqrt())
        .fold(0.0, f64::max);
    let over = DECAY_NS
        .iter()
        .zip(&qs)
        .filter(|(&n, &q)| q > c / (n as f64 * m1).sqrt())
        .count();
    Ok(vec![
        at_most("slope_deviation", (slope + 0.5).abs(), 0.05),
        info("slope", slope),
        info("fitted_c", c),
        at_most("rate_violations", over as f64, 0.0),
    ])
}

/// The inverse golden ratio.
pub fn inv_phi() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Holdout vector `a_k = 1 + (k − 1)/φ`, `k = 1..=30`.
pub fn golden_holdout() -> ExperimentSpec {
    thm1_experiment("golden", 30, inv_phi(), 0x901d)
}

/// Calibration vectors with random spacing away from `1/φ` and random length.
pub fn thm1_calibration() -> Vec<ExperimentSpec> {
    let mut r = rng(0xca1);
    (0..20)
        .map(|i| {
            let step = loop {
                let s = r.random_range(0.1..0.9);
                if (s - inv_phi()).abs() > 0.05 {
                    break s;
                }
            };
            let n = r.random_range(20..=40);
            thm1_experiment(&format!("cal_{i}"), n, step, 0x5eed + i as u64)
        })
        .collect()
}

fn thm1_experiment(id: &str, n: usize, step: f64, seed: u64) -> ExperimentSpec {
    ExperimentSpec {
        id: id.into(),
        dist: Some(crate::dist::DistSpec::Rademacher),
        dists: None,
        coeffs: CoeffSpec::Generated(super::spec::CoeffGenerator::Arith { n, base: 1.0, step }),
        normalize: Normalize::Max,
        lambdas: vec![1.0],
        tau: 1.0,
        method: MethodSpec {
            kind: MethodKind::Mc,
            count: 1_000_000,
            seed,
            ..MethodSpec::default()
        },
        arith: ArithSpec {
            alpha_tol: 1e-4,
            ..ArithSpec::default()
        },
        bounds: vec![InequalityId::Thm1],
    }
}

fn thm1() -> Result<Vec<Check>> {
    let base = ConstantSet::default();
    let mut cal_rows = Vec::new();
    for e in thm1_calibration() {
        cal_rows.extend(run_experiment(&e, &base)?);
    }
    let fit = fit_constants(&cal_rows, InequalityId::Thm1);
    let mut checks = vec![info("calibration_rows", fit.rows as f64)];
    let Some(c) = fit.constants.filter(|_| fit.status == FitStatus::Fitted) else {
        checks.push(at_most("fit_failed", 1.0, 0.0));
        return Ok(checks);
    };
    let hold = run_experiment(&golden_holdout(), &c)?;
    let row = &hold[0];
    checks.extend([
        info("C_front", c.c_front),
        info("c_exp", c.c_rate),
        info("holdout_lhs", row.lhs),
        info("holdout_alpha", row.alpha.unwrap_or(f64::NAN)),
        info("holdout_M1", row.m.unwrap_or(f64::NAN)),
        at_most(
            "holdout_lhs_minus_rhs",
            row.lhs - row.rhs.value().unwrap_or(f64::INFINITY),
            0.0,
        ),
    ]);
    // the smallest C_front may leave the exponential term doing all the work;
    // repeat at the largest rate, where the algebraic term has to carry it
    let rate = RATE_GRID[0];
    let need = cal_rows
        .iter()
        .filter_map(|r| r.shape.finite().map(|s| (s, r.lhs)))
        .map(|(s, lhs)| (lhs - s.exp_factor(rate).unwrap_or(0.0)).max(0.0) / s.algebraic)
        .fold(0.0_f64, f64::max);
    let c2 = ConstantSet {
        c_front: need.max(f64::MIN_POSITIVE),
        c_rate: rate,
        ..c
    };
    let rhs2 = row.shape.evaluate(&c2).value().unwrap_or(f64::INFINITY);
    checks.push(info("rate2_C_front", c2.c_front));
    checks.push(info("rate2_holdout_lhs_minus_rhs", row.lhs - rhs2));
    // p = 0 for Rademacher summands while M(1) = 1/2
    let law = Distribution::rademacher();
    let p = 1.0 - q_exact(&law, 2.0)?.value;
    let m1 = m_tau_of(&law, 1.0)?;
    let fs_vacuous = fs_bound(row.a_norm, 1.0, row.alpha.unwrap_or(0.0), p, &c)?.is_vacuous();
    let thm1_finite = thm1_bound(row.a_norm, row.alpha.unwrap_or(0.0), m1, &c)?
        .value()
        .is_some();
    checks.push(at_least(
        "fs_vacuous_and_thm1_finite",
        (fs_vacuous && thm1_finite) as u8 as f64,
        1.0,
    ));
    Ok(checks)
}

/// First `t` on the grid `step, 2·step, …` with `dist(ta) ≤ min(γt‖a‖, α)`.
pub fn grid_lcd(a: &[f64], gamma: f64, alpha: f64, t_max: f64, step: f64) -> Option<f64> {
    let an = norm(a);
    let steps = (t_max / step).floor() as usize;
    (1..=steps)
        .map(|i| i as f64 * step)
        .find(|&t| lattice_dist(a, t) <= (gamma * t * an).min(alpha))
}

fn lcd() -> Result<Vec<Check>> {
    let tol = 1e-6;
    let d4 = essential_lcd(&[1.0; 4], 0.5, 0.2, 10.0, tol)?;
    let d1 = essential_lcd(&[1.0], 0.5, 0.4, 10.0, tol)?;
    let err = |d: Lcd, exact: f64| d.finite().map_or(f64::INFINITY, |v| (v - exact).abs());
    let mut checks = vec![
        at_most("ones4_error", err(d4, 0.9), tol),
        at_most("one_error", err(d1, 2.0 / 3.0), tol),
    ];

    let mut r = rng(0x1cd);
    let tol = 1e-4;
    let mut max_gap = 0.0_f64;
    let mut disagreements = 0;
    for _ in 0..100 {
        let n = r.random_range(1..=5);
        let a: Vec<f64> = (0..n).map(|_| r.random_range(0.2..2.0)).collect();
        let gamma = r.random_range(0.1..0.9);
        let alpha = r.random_range(0.02..0.3);
        let t_max = 20.0;
        let found = essential_lcd(&a, gamma, alpha, t_max, tol)?.finite();
        let grid = grid_lcd(&a, gamma, alpha, t_max, tol / 10.0);
        match (found, grid) {
            (Some(x), Some(y)) => {
                let gap = (x - y).abs();
                max_gap = max_gap.max(gap);
                if gap > tol {
                    disagreements += 1;
                }
            }
            (None, None) => {}
            // one side found a crossing within tol of the horizon
            (Some(x), None) | (None, Some(x)) if x > t_max - tol => {}
            _ => disagreements += 1,
        }
    }
    checks.push(at_most("grid_disagreements", disagreements as f64, 0.0));
    checks.push(info("grid_max_gap", max_gap));

    let mut scale_errors = 0;
    for _ in 0..20 {
        let n = r.random_range(1..=5);
        let a: Vec<f64> = (0..n).map(|_| r.random_range(0.2..2.0)).collect();
        let s = r.random_range(0.25..4.0);
        let sa: Vec<f64> = a.iter().map(|x| s * x).collect();
        let (gamma, alpha) = (0.5, 0.1);
        let d = essential_lcd(&a, gamma, alpha, 50.0, tol)?;
        let ds = essential_lcd(&sa, gamma, alpha, 50.0 / s, tol / s)?;
        match (d.finite(), ds.finite()) {
            (Some(x), Some(y)) if (x - s * y).abs() <= 2.0 * tol => {}
            (None, None) => {}
            _ => scale_errors += 1,
        }
    }
    checks.push(at_most("scale_covariance_failures", scale_errors as f64, 0.0));
    Ok(checks)
}

fn regularity() -> Result<Vec<Check>> {
    let mut r = rng(0x4e9);
    let mut failures = 0;
    for i in 0..200 {
        let k = r.random_range(1..=20);
        let law = if i % 2 == 0 {
            random_law(&mut r, k, 5.0)
        } else {
            // atoms on a lattice make windows hit atoms exactly
            let atoms: Vec<f64> = (0..k).map(|_| r.random_range(-10..=10) as f64 * 0.5).collect();
            let probs = vec![1.0 / k as f64; k];
            Discrete::new(&atoms, &probs)?
        };
        let (mu, lambda) = if i % 4 == 1 {
            let l = 0.5 * r.random_range(1..=6) as f64;
            (0.5 * r.random_range(1..=20) as f64, l)
        } else {
            (r.random_range(0.01..5.0), r.random_range(0.01..5.0))
        };
        let factor = regularity_factor(mu, lambda)? as f64;
        if q_discrete(&law, mu) > factor * q_discrete(&law, lambda) {
            failures += 1;
        }
    }
    Ok(vec![at_most("regularity_failures", failures as f64, 0.0)])
}

fn bound6() -> Result<Vec<Check>> {
    let mut r = rng(0xb6);
    let mut failures = 0;
    for _ in 0..1000 {
        let k = r.random_range(1..=10);
        let law = Distribution::Discrete(random_law(&mut r, k, 5.0));
        let t = r.random_range(-20.0..20.0);
        let (lhs, rhs) = check_bound_6(&law, t)?;
        if !bound_6_holds(lhs, rhs) {
            failures += 1;
        }
    }
    let mut envelope_failures = 0;
    let mut feasible = f64::INFINITY;
    for _ in 0..20 {
        let n = r.random_range(1..=10);
        let a: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        for i in 0..=400 {
            let t = i as f64 / 400.0;
            let rep = check_bounds_7(&a, t, 0.1)?;
            if !rep.holds {
                envelope_failures += 1;
            }
            feasible = feasible.min(rep.feasible_c);
        }
    }
    Ok(vec![
        at_most("bound6_failures", failures as f64, 0.0),
        at_most("envelope_failures_c0.1", envelope_failures as f64, 0.0),
        at_least("min_feasible_c", feasible, 0.1),
    ])
}

fn quadrature() -> Result<Vec<Check>> {
    let qs = QuadratureSettings::default();
    let pm = SumSpec::iid(vec![1.0], Distribution::point_mass(0.0))?;
    let rad = SumSpec::iid(vec![1.0], Distribution::rademacher())?;
    let two_over_pi = 2.0 / std::f64::consts::PI;
    let cases = [
        ("point_mass_upper", esseen_upper(&pm, 1.0, &qs)?, 1.0),
        ("point_mass_lower", esseen_lower(&pm, 1.0, &qs)?, 1.0),
        ("rademacher_upper", esseen_upper(&rad, 1.0, &qs)?, 1f64.sin()),
        (
            "rademacher_lower",
            esseen_lower(&rad, 1.0, &qs)?,
            0.5 + 2f64.sin() / 4.0,
        ),
        (
            "rademacher_upper_2_over_pi",
            esseen_upper(&rad, two_over_pi, &qs)?,
            two_over_pi,
        ),
    ];
    Ok(cases
        .iter()
        .map(|(name, got, exact)| at_most(&format!("{name}_error"), (got - exact).abs(), 1e-8))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn slope_of_a_line() {
        assert!((ls_slope(&[0.0, 1.0, 2.0], &[1.0, 0.5, 0.0]) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn csv_output() {
        let rep = SuiteReport {
            suite: Suite::Beta,
            checks: vec![at_most("x", 0.0, 0.0), info("y", 1.5)],
            elapsed: Duration::ZERO,
        };
        assert!(rep.passed());
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "suite,check,observed,limit,pass\nbeta,x,0.0,0.0,true\nbeta,y,1.5,,info\n"
        );
    }
}
