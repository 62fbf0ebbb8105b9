//! Diagnostics for the Lebesgue-style pointwise convergence test: the
//! integrated absolute symmetric difference and its small-/large-scale
//! slopes, the translation modulus at the mesh scale, the three-term error
//! bound assembled from them, and the integration-by-parts decomposition of
//! the weighted tail integral.
//!
//! Little-o hypotheses are judged numerically: a slope sequence counts as
//! *consistent* with decay when it falls by at least a fixed factor per
//! decade across the three outermost decades sampled. That is evidence,
//! not proof, and the API never claims otherwise.

use crate::dirichlet::{cot_sine_factor, split_error_integral, GridParams};
use crate::error::{Error, Result};
use crate::function::{FunctionSpec, SymmetricDifference};
use crate::quadrature::{
    integrate_absolute, integrate_with_breakpoints, IntegralResult, QuadratureConfig,
};
use rand::Rng;
use serde::Serialize;
use std::cell::Cell;
use std::f64::consts::PI;

/// Required per-decade decrease factor for a slope sequence to count as
/// consistent with decay.
pub const DEFAULT_SLOPE_DECREASE: f64 = 1.05;

/// Additive slack granted to the finite-scale bound comparison: the bound
/// only holds up to terms that vanish as `l` grows, so the comparison gets
/// `max(1e-6, 10 / l)`.
pub fn bound_slack(l: f64) -> f64 {
    (10.0 / l).max(1e-6)
}

/// `Phi(h) = \int_0^h |phi_x(t)| dt`.
pub fn phi_integral(
    f: &FunctionSpec,
    x: f64,
    h: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    if !(h >= 0.0) || !h.is_finite() {
        return Err(Error::InvalidBounds { lo: 0.0, hi: h });
    }
    let phi = SymmetricDifference::new(f, x);
    let bps = f.phi_breakpoints(x, 0.0, h);
    integrate_absolute(|t| phi.value(t), 0.0, h, &bps, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiSample {
    pub h: f64,
    /// `Phi(h)`.
    pub integral: f64,
    /// `Phi(h) / h`.
    pub slope: f64,
}

/// Log-spaced profile of `Phi(h) / h` with decay judgements at both ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiProfile {
    pub samples: Vec<PhiSample>,
    /// Largest slope within the smallest sampled decade.
    pub small_slope: f64,
    /// Largest slope within the largest sampled decade.
    pub large_slope: f64,
    /// Slopes fall decade-over-decade toward `h -> 0`.
    pub small_end_consistent: bool,
    /// Slopes fall decade-over-decade toward `h -> infinity`.
    pub large_end_consistent: bool,
}

pub fn phi_profile(
    f: &FunctionSpec,
    x: f64,
    h_min: f64,
    h_max: f64,
    points_per_decade: usize,
    cfg: &QuadratureConfig,
) -> Result<PhiProfile> {
    if !(h_min > 0.0) || !(h_max > h_min) || !h_max.is_finite() {
        return Err(Error::InvalidBounds {
            lo: h_min,
            hi: h_max,
        });
    }
    if points_per_decade == 0 {
        return Err(Error::InvalidConfig(
            "points_per_decade must be at least 1".into(),
        ));
    }
    let mut samples = Vec::new();
    let mut i = 0usize;
    loop {
        let h = (h_min * 10f64.powf(i as f64 / points_per_decade as f64)).min(h_max);
        let integral = phi_integral(f, x, h, cfg)?.value;
        samples.push(PhiSample {
            h,
            integral,
            slope: integral / h,
        });
        if h >= h_max {
            break;
        }
        i += 1;
    }

    // The log grid is uniform, so sample i sits in decade i / points_per_decade.
    let decade_of = |idx: usize| idx / points_per_decade;
    let n_decades = decade_of(samples.len() - 1) + 1;
    let mut decade_max = vec![0.0f64; n_decades];
    for (idx, s) in samples.iter().enumerate() {
        let d = decade_of(idx);
        decade_max[d] = decade_max[d].max(s.slope);
    }

    let falls = |toward: f64, away: f64| toward <= away / DEFAULT_SLOPE_DECREASE;
    let small_end_consistent = n_decades >= 3
        && falls(decade_max[0], decade_max[1])
        && falls(decade_max[1], decade_max[2]);
    let last = n_decades - 1;
    let large_end_consistent = n_decades >= 3
        && falls(decade_max[last], decade_max[last - 1])
        && falls(decade_max[last - 1], decade_max[last - 2]);

    Ok(PhiProfile {
        small_slope: decade_max[0],
        large_slope: decade_max[last],
        small_end_consistent,
        large_end_consistent,
        samples,
    })
}

/// Translation modulus at the mesh scale `eta = l / n`:
/// `\int_eta^l |phi_x(t) - phi_x(t + eta)| / t dt`.
///
/// Needs `f` evaluable out to `x ± (l + eta)`.
pub fn translation_modulus(
    f: &FunctionSpec,
    x: f64,
    grid: &GridParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let eta = grid.eta();
    let l = grid.l;
    let phi = SymmetricDifference::new(f, x);
    // Kinks of phi(t) and of phi(t + eta) both break the integrand.
    let mut bps = Vec::new();
    for p in f.phi_breakpoints(x, 0.0, l + eta) {
        for cand in [p, p - eta] {
            if cand > eta && cand < l {
                bps.push(cand);
            }
        }
    }
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let r = integrate_absolute(
        |t| (phi.value(t) - phi.value(t + eta)) / t,
        eta,
        l,
        &bps,
        cfg,
    )?;
    Ok(r.value)
}

/// The three positive terms bounding the oscillatory error channel, their
/// total, and the measured left-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundBreakdown {
    /// `(pi/2) *` translation modulus.
    pub term_modulus: f64,
    /// `eta * \int_eta^l |phi_x(t)| / t^2 dt`.
    pub term_tail: f64,
    /// `pi * eta^{-1} * \int_0^{2 eta} |phi_x(t)| dt`.
    pub term_local: f64,
    pub rhs_total: f64,
    /// `|sine channel + cosine channel|` of the error integral.
    pub lhs: f64,
    /// Finite-scale allowance added to the right-hand side.
    pub slack: f64,
    pub holds: bool,
}

/// Weighted tail `\int_eta^l |phi_x(t)| / t^2 dt` (no `eta` prefactor).
fn tail_integral(
    f: &FunctionSpec,
    x: f64,
    grid: &GridParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let eta = grid.eta();
    let phi = SymmetricDifference::new(f, x);
    let bps = f.phi_breakpoints(x, eta, grid.l);
    let r = integrate_absolute(|t| phi.value(t) / (t * t), eta, grid.l, &bps, cfg)?;
    Ok(r.value)
}

pub fn bound_check(
    f: &FunctionSpec,
    x: f64,
    grid: &GridParams,
    cfg: &QuadratureConfig,
) -> Result<BoundBreakdown> {
    let eta = grid.eta();
    let l = grid.l;
    if !(2.0 * eta <= l) {
        return Err(Error::InvalidGrid(format!(
            "bound check needs 2 eta <= l, got eta = {eta}, l = {l}"
        )));
    }
    let term_modulus = 0.5 * PI * translation_modulus(f, x, grid, cfg)?;
    let term_tail = eta * tail_integral(f, x, grid, cfg)?;
    let term_local = PI / eta * phi_integral(f, x, 2.0 * eta, cfg)?.value;
    let rhs_total = term_modulus + term_tail + term_local;
    let lhs = split_error_integral(f, x, grid, cfg)?.total.abs();
    let slack = bound_slack(l);
    Ok(BoundBreakdown {
        term_modulus,
        term_tail,
        term_local,
        rhs_total,
        lhs,
        slack,
        holds: lhs <= rhs_total + slack,
    })
}

/// Integration-by-parts decomposition of the weighted tail
/// `eta \int_eta^l |phi_x| / t^2 dt` into two boundary terms and two
/// `Phi / t^3` integrals cut at `t = 1`:
///
/// `direct = boundary_at_l - boundary_at_eta + below_one + above_one`.
///
/// Both sides are computed independently; `residual` is their difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailDecomposition {
    /// `Phi(l) / (n l)`.
    pub boundary_at_l: f64,
    /// `Phi(eta) / eta`.
    pub boundary_at_eta: f64,
    /// `2 eta \int_eta^1 Phi(t) / t^3 dt`.
    pub below_one: f64,
    /// `2 eta \int_1^l Phi(t) / t^3 dt`.
    pub above_one: f64,
    pub parts_total: f64,
    /// `eta \int_eta^l |phi_x| / t^2 dt`, evaluated directly.
    pub direct: f64,
    pub residual: f64,
}

pub fn tail_decomposition(
    f: &FunctionSpec,
    x: f64,
    grid: &GridParams,
    cfg: &QuadratureConfig,
) -> Result<TailDecomposition> {
    let eta = grid.eta();
    let l = grid.l;
    if !(eta < 1.0 && 1.0 < l) {
        return Err(Error::TailSplitDomain { eta, l });
    }

    let boundary_at_l = phi_integral(f, x, l, cfg)?.value / (grid.n as f64 * l);
    let boundary_at_eta = phi_integral(f, x, eta, cfg)?.value / eta;

    // Phi shows up inside another integrand; stash the first inner failure
    // and surface it after the outer integral returns.
    let inner_err: Cell<Option<Error>> = Cell::new(None);
    let big_phi = |t: f64| match phi_integral(f, x, t, cfg) {
        Ok(r) => r.value,
        Err(e) => {
            let first = inner_err.take().unwrap_or(e);
            inner_err.set(Some(first));
            0.0
        }
    };
    let weighted = |t: f64| big_phi(t) / (t * t * t);
    let below_one =
        2.0 * eta * integrate_with_breakpoints(weighted, eta, 1.0, &[], 0.0, cfg)?.value;
    let above_one = 2.0 * eta * integrate_with_breakpoints(weighted, 1.0, l, &[], 0.0, cfg)?.value;
    if let Some(e) = inner_err.take() {
        return Err(e);
    }

    let direct = eta * tail_integral(f, x, grid, cfg)?;
    let parts_total = boundary_at_l - boundary_at_eta + below_one + above_one;
    Ok(TailDecomposition {
        boundary_at_l,
        boundary_at_eta,
        below_one,
        above_one,
        parts_total,
        direct,
        residual: direct - parts_total,
    })
}

/// Largest observed `|(1/2) cot(pi t / 2l) sin(n pi t / l)|` over
/// log-uniform draws of `t` in `(0, l]`. The classical bound is `n pi`
/// (the sharp supremum is `n`, attained in the `t -> 0` limit).
pub fn cot_sine_bound_sample<R: Rng>(grid: &GridParams, samples: usize, rng: &mut R) -> f64 {
    let radius = QuadratureConfig::default().singularity_switch_radius;
    let ln_lo = (grid.l * 1e-9).ln();
    let ln_hi = grid.l.ln();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let t = (rng.gen_range(ln_lo..=ln_hi)).exp();
        worst = worst.max(cot_sine_factor(grid, t, radius).abs());
    }
    worst
}

/// Worst observed ratio `|phi_x(t) W(t)| / |phi_x(t)|` for uniform draws of
/// `t` in the edge strip `[l - eta, l]`, where `W` is the cotangent-weighted
/// sine factor. Points with `phi_x(t) = 0` contribute 0 (the numerator
/// carries the same factor). The edge strip keeps the ratio at or below 1.
pub fn edge_domination_sample<R: Rng>(
    f: &FunctionSpec,
    x: f64,
    grid: &GridParams,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let radius = QuadratureConfig::default().singularity_switch_radius;
    let phi = SymmetricDifference::new(f, x);
    let lo = grid.l - grid.eta();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let t = rng.gen_range(lo..=grid.l);
        let p = phi.value(t);
        if p == 0.0 {
            continue;
        }
        let ratio = (p * cot_sine_factor(grid, t, radius)).abs() / p.abs();
        worst = worst.max(ratio);
    }
    worst
}
