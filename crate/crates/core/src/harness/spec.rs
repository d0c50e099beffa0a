//! JSON experiment specifications.

use serde::{Deserialize, Serialize};

use crate::bounds::{ConstantSet, InequalityId};
use crate::concentration::DEFAULT_ATOM_CAP;
use crate::dist::{max_norm, norm, DistSpec, Distribution, SumSpec};
use crate::error::{Error, Result};

/// Coefficient vector: a bare array, `{"coeffs": [..]}` or a generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffSpec {
    List(Vec<f64>),
    Explicit { coeffs: Vec<f64> },
    Generated(CoeffGenerator),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoeffGenerator {
    /// `a_k = base + (k − 1) step` for `k = 1..=n`.
    Arith { n: usize, base: f64, step: f64 },
}

impl CoeffSpec {
    pub fn resolve(&self) -> Result<Vec<f64>> {
        let a = match self {
            CoeffSpec::List(coeffs) | CoeffSpec::Explicit { coeffs } => coeffs.clone(),
            CoeffSpec::Generated(CoeffGenerator::Arith { n, base, step }) => {
                (0..*n).map(|k| base + k as f64 * step).collect()
            }
        };
        if a.is_empty() {
            return Err(Error::Spec("coefficient vector is empty".into()));
        }
        if let Some(x) = a.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(*x));
        }
        Ok(a)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(format!("coefficients: {e}")))
    }
}

/// Rescaling applied to the coefficient vector before use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalize {
    #[default]
    None,
    /// Divide by `‖a‖`.
    Euclidean,
    /// Divide by `‖a‖∞`.
    Max,
}

impl Normalize {
    pub fn apply(self, a: &[f64]) -> Result<Vec<f64>> {
        let scale = match self {
            Normalize::None => return Ok(a.to_vec()),
            Normalize::Euclidean => norm(a),
            Normalize::Max => max_norm(a),
        };
        if scale == 0.0 {
            return Err(Error::DegenerateCoefficients);
        }
        Ok(a.iter().map(|x| x / scale).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    /// Exact when every summand is discrete and the convolution fits the atom cap.
    #[default]
    Auto,
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodSpec {
    pub kind: MethodKind,
    pub count: usize,
    pub seed: u64,
    pub delta: f64,
    pub atom_cap: usize,
}

impl Default for MethodSpec {
    fn default() -> Self {
        MethodSpec {
            kind: MethodKind::Auto,
            count: 1_000_000,
            seed: 0,
            delta: 1e-3,
            atom_cap: DEFAULT_ATOM_CAP,
        }
    }
}

/// Parameters of the arithmetic-structure computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArithSpec {
    /// Tolerance of the certified infimum and LCD searches.
    pub alpha_tol: f64,
    pub gamma: f64,
    /// Level for the `γ`-weighted condition; defaults to the certified
    /// interval infimum.
    pub alpha: Option<f64>,
    /// Horizon of the LCD search; defaults to `10³ ‖a‖∞ / α`.
    pub t_max: Option<f64>,
}

impl Default for ArithSpec {
    fn default() -> Self {
        ArithSpec {
            alpha_tol: 1e-4,
            gamma: 0.5,
            alpha: None,
            t_max: None,
        }
    }
}

fn default_tau() -> f64 {
    1.0
}

fn default_bounds() -> Vec<InequalityId> {
    vec![InequalityId::Thm1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub id: String,
    /// Common law of i.i.d. summands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<DistSpec>,
    /// One law per summand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dists: Option<Vec<DistSpec>>,
    pub coeffs: CoeffSpec,
    #[serde(default)]
    pub normalize: Normalize,
    pub lambdas: Vec<f64>,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub method: MethodSpec,
    #[serde(default)]
    pub arith: ArithSpec,
    #[serde(default = "default_bounds")]
    pub bounds: Vec<InequalityId>,
}

impl ExperimentSpec {
    /// Checks the spec and builds the weighted sum it describes.
    pub fn sum_spec(&self) -> Result<SumSpec> {
        if self.lambdas.is_empty() {
            return Err(Error::Spec(format!("experiment `{}` has no lambdas", self.id)));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::Spec(format!(
                "experiment `{}`: lambda {l} is not positive",
                self.id
            )));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Spec(format!("experiment `{}`: tau must be positive", self.id)));
        }
        if !(self.arith.alpha_tol > 0.0) {
            return Err(Error::Spec("alpha_tol must be positive".into()));
        }
        let a = self.normalize.apply(&self.coeffs.resolve()?)?;
        match (&self.dist, &self.dists) {
            (Some(d), None) => SumSpec::iid(a, Distribution::try_from(d.clone())?),
            (None, Some(ds)) => {
                let laws = ds
                    .iter()
                    .cloned()
                    .map(Distribution::try_from)
                    .collect::<Result<Vec<_>>>()?;
                SumSpec::independent(a, laws)
            }
            _ => Err(Error::Spec(format!(
                "experiment `{}` needs exactly one of `dist` and `dists`",
                self.id
            ))),
        }
    }
}

/// How the constants of each inequality are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ConstantPolicy {
    Fixed(ConstantSet),
    /// Fit on the named experiments, then apply to every row.
    Fit {
        calibration: Vec<String>,
    },
}

impl Default for ConstantPolicy {
    fn default() -> Self {
        ConstantPolicy::Fixed(ConstantSet::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub experiments: Vec<ExperimentSpec>,
    #[serde(default)]
    pub constants: ConstantPolicy,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RunOrSingle {
    Run(RunSpec),
    Single(Box<ExperimentSpec>),
}

impl RunSpec {
    /// Parses either a full run or a single experiment.
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: RunOrSingle = serde_json::from_str(text).map_err(|e| {
            // re-parse as the more common shape to get a useful message
            match serde_json::from_str::<ExperimentSpec>(text) {
                Err(single) if !text.contains("\"experiments\"") => Error::Spec(single.to_string()),
                _ => Error::Spec(e.to_string()),
            }
        })?;
        let run = match parsed {
            RunOrSingle::Run(r) => r,
            RunOrSingle::Single(e) => RunSpec {
                experiments: vec![*e],
                constants: ConstantPolicy::default(),
            },
        };
        if run.experiments.is_empty() {
            return Err(Error::Spec("no experiments".into()));
        }
        let mut ids: Vec<&str> = run.experiments.iter().map(|e| e.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Spec(format!("duplicate experiment id `{}`", w[0])));
        }
        if let ConstantPolicy::Fit { calibration } = &run.constants {
            if let Some(c) = calibration.iter().find(|c| ids.binary_search(&c.as_str()).is_err()) {
                return Err(Error::Spec(format!("calibration id `{c}` names no experiment")));
            }
        }
        Ok(run)
    }
}
