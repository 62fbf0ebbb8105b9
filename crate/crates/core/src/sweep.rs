//! Sweeps over a family of windows `[-l_j, l_j]` with orders `n_j`,
//! tracking `S_{n_j}^{l_j}(x) - f(x)` per step. Convergence is a joint
//! limit — `eta = l/n -> 0` with `n, l -> infinity` — so a plan is only
//! valid when `l` strictly increases while `eta` strictly decreases.

use crate::dirichlet::{partial_sum_via_kernel, CoefficientTable, GridParams, SumRoute};
use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::lebesgue::bound_check;
use crate::quadrature::QuadratureConfig;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPlan {
    pub grids: Vec<GridParams>,
}

impl SweepPlan {
    /// Build from explicit `(l, n)` pairs, in sweep order.
    pub fn from_pairs(pairs: &[(f64, u32)]) -> Result<Self> {
        let grids = pairs
            .iter()
            .map(|&(l, n)| GridParams::new(l, n))
            .collect::<Result<Vec<_>>>()?;
        let plan = SweepPlan { grids };
        plan.validate()?;
        Ok(plan)
    }

    /// The doubling rule `l_j = l_0 * 2^j`, `n_j = ceil(l_j^p)`. Any
    /// exponent `p > 1` drives `eta_j = l_j^{1-p}` to zero.
    pub fn doubling(l0: f64, exponent: f64, steps: usize) -> Result<Self> {
        if !(l0 > 0.0) || !l0.is_finite() {
            return Err(Error::InvalidSweep(format!(
                "initial half-length must be positive, got {l0}"
            )));
        }
        if !(exponent > 1.0) {
            return Err(Error::InvalidSweep(format!(
                "order exponent must exceed 1 so that eta shrinks, got {exponent}"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidSweep(
                "a sweep needs at least one step".into(),
            ));
        }
        let mut grids = Vec::with_capacity(steps);
        for j in 0..steps {
            let l = l0 * (1u64 << j) as f64;
            let n = l.powf(exponent).ceil();
            if !(n <= u32::MAX as f64) {
                return Err(Error::InvalidSweep(format!(
                    "step {j} wants order {n}, beyond what a u32 grid can hold"
                )));
            }
            grids.push(GridParams::new(l, n as u32)?);
        }
        let plan = SweepPlan { grids };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grids.is_empty() {
            return Err(Error::InvalidSweep(
                "a sweep needs at least one step".into(),
            ));
        }
        for w in self.grids.windows(2) {
            if !(w[0].l < w[1].l) {
                return Err(Error::InvalidSweep(format!(
                    "half-lengths must strictly increase, got {} then {}",
                    w[0].l, w[1].l
                )));
            }
            if !(w[1].eta() < w[0].eta()) {
                return Err(Error::InvalidSweep(format!(
                    "eta must strictly decrease, got {} then {}",
                    w[0].eta(),
                    w[1].eta()
                )));
            }
        }
        Ok(())
    }
}

/// One `(step, x)` record of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub j: usize,
    pub n: u32,
    pub l: f64,
    pub eta: f64,
    pub x: f64,
    /// The partial-sum value `S_n^l(x)`.
    #[serde(rename = "S")]
    pub value: f64,
    /// `f(x)`.
    pub target: f64,
    pub abs_error: f64,
    /// Right-hand side of the three-term bound, when requested.
    pub bound_rhs: Option<f64>,
}

/// Rows ordered by step, then by the position of `x` in the requested list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    pub route: SumRoute,
    pub rows: Vec<TraceRow>,
}

impl ConvergenceTrace {
    /// Worst absolute error per step, in step order.
    pub fn max_abs_error_by_step(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for row in &self.rows {
            if row.j == out.len() {
                out.push(row.abs_error);
            } else {
                out[row.j] = out[row.j].max(row.abs_error);
            }
        }
        out
    }
}

pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

pub fn run_sweep(
    f: &FunctionSpec,
    xs: &[f64],
    plan: &SweepPlan,
    route: SumRoute,
    with_bound: bool,
    cfg: &QuadratureConfig,
) -> Result<ConvergenceTrace> {
    plan.validate()?;
    if xs.is_empty() {
        return Err(Error::InvalidSweep(
            "a sweep needs at least one evaluation point".into(),
        ));
    }
    let mut rows = Vec::with_capacity(plan.grids.len() * xs.len());
    for (j, grid) in plan.grids.iter().enumerate() {
        let values: Vec<f64> = match route {
            SumRoute::CoefficientSum => {
                // One shared table so the coefficient integrals are paid
                // once per step, not once per point.
                let table = CoefficientTable::new(f, grid.l, *cfg)?;
                xs.iter()
                    .map(|&x| table.partial_sum(x, grid.n))
                    .collect::<Result<_>>()?
            }
            SumRoute::KernelConvolution => xs
                .par_iter()
                .map(|&x| partial_sum_via_kernel(f, x, grid, cfg).map(|r| r.value))
                .collect::<Result<_>>()?,
        };
        let bounds: Vec<Option<f64>> = if with_bound {
            xs.par_iter()
                .map(|&x| bound_check(f, x, grid, cfg).map(|b| Some(b.rhs_total)))
                .collect::<Result<_>>()?
        } else {
            vec![None; xs.len()]
        };
        for ((&x, value), bound_rhs) in xs.iter().zip(values).zip(bounds) {
            let target = f.eval(x);
            rows.push(TraceRow {
                j,
                n: grid.n,
                l: grid.l,
                eta: grid.eta(),
                x,
                value,
                target,
                abs_error: (value - target).abs(),
                bound_rhs,
            });
        }
    }
    Ok(ConvergenceTrace { route, rows })
}

/// Uniform grid of `count` points on `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidSweep(format!(
            "point grid needs a < b and at least 2 points, got [{a}, {b}] with {count}"
        )));
    }
    let step = (b - a) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == count - 1 {
                b
            } else {
                a + i as f64 * step
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn doubling_rule_squares_the_half_length() {
        let plan = SweepPlan::doubling(10.0, 2.0, 4).unwrap();
        let ls: Vec<f64> = plan.grids.iter().map(|g| g.l).collect();
        let ns: Vec<u32> = plan.grids.iter().map(|g| g.n).collect();
        assert_eq!(ls, vec![10.0, 20.0, 40.0, 80.0]);
        assert_eq!(ns, vec![100, 400, 1600, 6400]);
        assert!(strictly_decreasing(
            &plan.grids.iter().map(|g| g.eta()).collect::<Vec<_>>()
        ));
    }

    #[test]
    fn doubling_rule_rejects_flat_exponent() {
        // p = 1 keeps eta constant, which defeats the limit.
        assert!(SweepPlan::doubling(10.0, 1.0, 3).is_err());
    }

    #[test]
    fn plans_must_shrink_eta() {
        // l grows but eta grows too (0.1 then 0.133...).
        let bad = SweepPlan::from_pairs(&[(10.0, 100), (20.0, 150)]);
        assert!(matches!(bad, Err(Error::InvalidSweep(_))));
        // l not increasing.
        let bad = SweepPlan::from_pairs(&[(10.0, 100), (10.0, 400)]);
        assert!(bad.is_err());
        // Fine: eta = 0.2, 0.1, 0.05.
        assert!(SweepPlan::from_pairs(&[(5.0, 25), (10.0, 100), (20.0, 400)]).is_ok());
    }

    #[test]
    fn constant_function_is_reproduced_at_every_step() {
        let f = FunctionSpec::parse("3").unwrap();
        let plan = SweepPlan::from_pairs(&[(5.0, 25), (10.0, 100), (20.0, 400)]).unwrap();
        let xs = [0.0, 1.0];
        for route in [SumRoute::CoefficientSum, SumRoute::KernelConvolution] {
            let trace = run_sweep(&f, &xs, &plan, route, false, &cfg()).unwrap();
            assert_eq!(trace.rows.len(), 6);
            for row in &trace.rows {
                assert_eq!(row.target, 3.0);
                assert!(row.abs_error <= 1e-8, "route {route:?}: {row:?}");
            }
        }
    }

    #[test]
    fn rows_come_out_in_step_major_order() {
        let f = FunctionSpec::parse("piecewise([-1,1]: 1 - t^2; else: 0)")
            .unwrap()
            .with_support(-1.0, 1.0)
            .unwrap();
        let plan = SweepPlan::from_pairs(&[(5.0, 25), (10.0, 100)]).unwrap();
        let xs = [0.0, 0.5, 1.0];
        let trace = run_sweep(&f, &xs, &plan, SumRoute::KernelConvolution, false, &cfg()).unwrap();
        let keys: Vec<(usize, f64)> = trace.rows.iter().map(|r| (r.j, r.x)).collect();
        assert_eq!(
            keys,
            vec![(0, 0.0), (0, 0.5), (0, 1.0), (1, 0.0), (1, 0.5), (1, 1.0)]
        );
        assert!(trace.rows.iter().all(|r| r.eta == r.l / r.n as f64));
    }

    #[test]
    fn support_edge_error_shrinks_with_the_sweep() {
        // At the corner of the parabola the error decays like the inverse
        // of the kernel frequency; two doubling steps should roughly
        // quarter it.
        let f = FunctionSpec::parse("piecewise([-1,1]: 1 - t^2; else: 0)")
            .unwrap()
            .with_support(-1.0, 1.0)
            .unwrap();
        let plan = SweepPlan::doubling(10.0, 2.0, 2).unwrap();
        let trace = run_sweep(
            &f,
            &[1.0],
            &plan,
            SumRoute::KernelConvolution,
            false,
            &cfg(),
        )
        .unwrap();
        let errs = trace.max_abs_error_by_step();
        assert_eq!(errs.len(), 2);
        assert!(errs[0] > 0.01 && errs[0] < 0.04, "{errs:?}");
        assert!(errs[1] < 0.6 * errs[0], "{errs:?}");
    }

    #[test]
    fn bound_column_is_populated_on_request() {
        let f = FunctionSpec::parse("sin(t)").unwrap();
        let plan = SweepPlan::from_pairs(&[(10.0, 100)]).unwrap();
        let trace = run_sweep(
            &f,
            &[0.25],
            &plan,
            SumRoute::KernelConvolution,
            true,
            &cfg(),
        )
        .unwrap();
        let rhs = trace.rows[0].bound_rhs.unwrap();
        assert!(rhs.is_finite() && rhs >= 0.0);
    }

    #[test]
    fn linspace_hits_both_endpoints() {
        let g = linspace(-1.0, 1.0, 21).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], -1.0);
        assert_eq!(g[20], 1.0);
        assert_relative_eq!(g[10], 0.0, epsilon = 1e-15);
        assert!(linspace(1.0, 1.0, 5).is_err());
        assert!(linspace(0.0, 1.0, 1).is_err());
    }
}
