//! Scenario files: one JSON document describing a function, a family of
//! expanding windows, the points to evaluate at, and which checks to run.
//! The schema is versioned; see docs/scenario-schema.md for the full
//! field-by-field description.

use anyhow::{bail, Context, Result};
use dirichlet_lab_core::dirichlet::SumRoute;
use dirichlet_lab_core::sweep::{linspace, SweepPlan};
use dirichlet_lab_core::{FunctionSpec, QuadratureConfig};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    /// DSL source for the function under study.
    pub function: String,
    #[serde(default)]
    pub period_hint: Option<f64>,
    /// `[lo, hi]` outside of which the function is identically zero.
    #[serde(default)]
    pub support_hint: Option<(f64, f64)>,
    pub x_points: XPoints,
    pub sweep: SweepSpec,
    #[serde(default = "default_route")]
    pub route: SumRoute,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    /// Which checks `run` executes, in order.
    #[serde(default)]
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub converge: ConvergeSpec,
    #[serde(default)]
    pub lebesgue: LebesgueSpec,
    #[serde(default)]
    pub class_e: ClassESpec,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default)]
    pub bound: BoundSpec,
}

fn default_route() -> SumRoute {
    SumRoute::KernelConvolution
}

/// Evaluation points: an explicit list, or a uniform grid over an interval.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum XPoints {
    List(Vec<f64>),
    Grid { interval: (f64, f64), count: usize },
}

impl XPoints {
    pub fn resolve(&self) -> Result<Vec<f64>> {
        match self {
            XPoints::List(v) => {
                if v.is_empty() {
                    bail!("x_points: the list must not be empty");
                }
                if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                    bail!("x_points: {bad} is not a finite real");
                }
                Ok(v.clone())
            }
            XPoints::Grid { interval, count } => {
                linspace(interval.0, interval.1, *count).context("x_points: bad interval grid")
            }
        }
    }
}

/// Either explicit `(l, n)` pairs or the doubling rule.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub pairs: Option<Vec<(f64, u32)>>,
    #[serde(default)]
    pub rule: Option<SweepRule>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRule {
    pub l0: f64,
    pub exponent: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn plan(&self) -> Result<SweepPlan> {
        match (&self.pairs, &self.rule) {
            (Some(pairs), None) => {
                SweepPlan::from_pairs(pairs).context("sweep.pairs: invalid sweep")
            }
            (None, Some(rule)) => SweepPlan::doubling(rule.l0, rule.exponent, rule.steps)
                .context("sweep.rule: invalid sweep"),
            (Some(_), Some(_)) => bail!("sweep: give either pairs or rule, not both"),
            (None, None) => bail!("sweep: give either pairs or rule"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckKind {
    #[serde(rename = "coeffs")]
    Coeffs,
    #[serde(rename = "partial-sum")]
    PartialSum,
    #[serde(rename = "error-repr")]
    ErrorRepr,
    #[serde(rename = "lebesgue")]
    Lebesgue,
    #[serde(rename = "bound")]
    Bound,
    #[serde(rename = "k")]
    K,
    #[serde(rename = "class-e")]
    ClassE,
    #[serde(rename = "converge")]
    Converge,
}

/// Assertions attached to the converge check.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergeSpec {
    /// Final worst absolute error must come in at or below this.
    pub threshold: Option<f64>,
    /// Worst error per step must strictly decrease.
    pub require_decreasing: bool,
    /// Also evaluate the three-term bound for every row (costly).
    pub with_bound: bool,
}

impl Default for ConvergeSpec {
    fn default() -> Self {
        ConvergeSpec {
            threshold: None,
            require_decreasing: true,
            with_bound: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct LebesgueSpec {
    pub h_min: f64,
    pub h_max: f64,
    pub points_per_decade: usize,
}

impl Default for LebesgueSpec {
    fn default() -> Self {
        LebesgueSpec {
            h_min: 1e-3,
            h_max: 1e3,
            points_per_decade: 4,
        }
    }
}

/// Window lengths and offsets for tail averages; `None` uses the built-in
/// defaults.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassESpec {
    pub c_list: Option<Vec<f64>>,
    pub t_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSpec {
    /// Sample count for the kernel trace over `[-l, l]`.
    pub points: usize,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec { points: 513 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundSpec {
    /// Random draws per grid for the kernel-factor inequality samplers.
    pub samples: usize,
}

impl Default for BoundSpec {
    fn default() -> Self {
        BoundSpec { samples: 10_000 }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read scenario {}", path.display()))?;
        let sc: Scenario = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse scenario {}", path.display()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            );
        }
        self.function()?;
        self.x_points.resolve()?;
        self.sweep.plan()?;
        self.quadrature.validate().context("quadrature")?;
        if self.lebesgue.points_per_decade == 0 {
            bail!("lebesgue.points_per_decade: must be at least 1");
        }
        if self.kernel.points < 2 {
            bail!("kernel.points: must be at least 2");
        }
        if self.bound.samples == 0 {
            bail!("bound.samples: must be at least 1");
        }
        if let Some(t) = self.converge.threshold {
            if !(t > 0.0) {
                bail!("converge.threshold: must be positive, got {t}");
            }
        }
        Ok(())
    }

    /// The parsed function with hints attached.
    pub fn function(&self) -> Result<FunctionSpec> {
        let mut f = FunctionSpec::parse(&self.function)
            .with_context(|| format!("function: cannot parse {:?}", self.function))?;
        if let Some(m) = self.period_hint {
            f = f.with_period(m).context("period_hint")?;
        }
        if let Some((lo, hi)) = self.support_hint {
            f = f.with_support(lo, hi).context("support_hint")?;
        }
        Ok(f)
    }
}
