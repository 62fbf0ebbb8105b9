//! Tail-average diagnostics: whether `(1/T) \int |f|` over a fixed-length
//! window at offset `±T` dies off as the offset grows, and the closed-form
//! bound `k M / T` that guarantees it for periodic integrands.
//!
//! "Consistent" uses the same decade-decrease criterion as the slope
//! profile in [`crate::lebesgue`]: the per-decade maxima must fall by
//! [`DEFAULT_SLOPE_DECREASE`](crate::lebesgue::DEFAULT_SLOPE_DECREASE)
//! across the last three decades of the offset grid, on both sides.

use crate::dirichlet::clip_to_support;
use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::lebesgue::DEFAULT_SLOPE_DECREASE;
use crate::quadrature::{integrate_absolute, IntegralResult, QuadratureConfig};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

pub fn default_t_grid() -> Vec<f64> {
    vec![10.0, 10f64.powf(1.5), 100.0, 10f64.powf(2.5), 1000.0]
}

pub fn default_c_list() -> Vec<f64> {
    vec![0.5, 1.0, 2.0 * PI]
}

/// One-sided window averages of `|f|` at offset `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailAverageSample {
    #[serde(rename = "T")]
    pub t: f64,
    pub c: f64,
    /// `(1/T) \int_T^{T+c} |f|`.
    pub right_value: f64,
    /// `(1/T) \int_{-T-c}^{-T} |f|`.
    pub left_value: f64,
}

fn window_integral(
    f: &FunctionSpec,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    let Some((lo, hi)) = clip_to_support(f, lo, hi) else {
        return Ok(IntegralResult::zero());
    };
    let bps = f.breakpoints();
    integrate_absolute(|t| f.eval(t), lo, hi, &bps, cfg)
}

pub fn tail_average(
    f: &FunctionSpec,
    t: f64,
    c: f64,
    cfg: &QuadratureConfig,
) -> Result<TailAverageSample> {
    if !(t > 0.0) || !(c > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tail average needs T > 0 and c > 0, got T = {t}, c = {c}"
        )));
    }
    let right = window_integral(f, t, t + c, cfg)?.value;
    let left = window_integral(f, -t - c, -t, cfg)?.value;
    Ok(TailAverageSample {
        t,
        c,
        right_value: right / t,
        left_value: left / t,
    })
}

/// Samples for one window length, with per-side decay judgements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassESeries {
    pub c: f64,
    pub samples: Vec<TailAverageSample>,
    pub right_consistent: bool,
    pub left_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassEDiagnostic {
    pub series: Vec<ClassESeries>,
    /// All window lengths passed on both sides.
    pub consistent: bool,
}

/// Per-decade maxima of `values` grouped by `floor(log10 t)`, then the
/// decade-decrease test over the last three groups.
fn decades_fall(ts: &[f64], values: &[f64]) -> bool {
    let mut maxima: Vec<(i64, f64)> = Vec::new();
    for (&t, &v) in ts.iter().zip(values) {
        let d = (t.log10() + 1e-9).floor() as i64;
        match maxima.last_mut() {
            Some((last_d, m)) if *last_d == d => *m = m.max(v),
            _ => maxima.push((d, v)),
        }
    }
    if maxima.len() < 3 {
        return false;
    }
    let tail = &maxima[maxima.len() - 3..];
    tail[2].1 <= tail[1].1 / DEFAULT_SLOPE_DECREASE
        && tail[1].1 <= tail[0].1 / DEFAULT_SLOPE_DECREASE
}

pub fn class_e_diagnostic(
    f: &FunctionSpec,
    c_list: &[f64],
    t_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ClassEDiagnostic> {
    if c_list.is_empty() {
        return Err(Error::InvalidConfig("c_list must be nonempty".into()));
    }
    if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig(
            "T grid must be nonempty and strictly increasing".into(),
        ));
    }

    let pairs: Vec<(f64, f64)> = c_list
        .iter()
        .flat_map(|&c| t_grid.iter().map(move |&t| (c, t)))
        .collect();
    let samples: Vec<TailAverageSample> = pairs
        .par_iter()
        .map(|&(c, t)| tail_average(f, t, c, cfg))
        .collect::<Result<_>>()?;

    let mut series = Vec::with_capacity(c_list.len());
    for (i, &c) in c_list.iter().enumerate() {
        let chunk = &samples[i * t_grid.len()..(i + 1) * t_grid.len()];
        let rights: Vec<f64> = chunk.iter().map(|s| s.right_value).collect();
        let lefts: Vec<f64> = chunk.iter().map(|s| s.left_value).collect();
        series.push(ClassESeries {
            c,
            samples: chunk.to_vec(),
            right_consistent: decades_fall(t_grid, &rights),
            left_consistent: decades_fall(t_grid, &lefts),
        });
    }
    let consistent = series
        .iter()
        .all(|s| s.right_consistent && s.left_consistent);
    Ok(ClassEDiagnostic { series, consistent })
}

/// Tail average of a periodic integrand against its closed-form ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodicBoundCheck {
    pub lhs: f64,
    pub bound: f64,
    /// Smallest integer with `c < k * period`: the window meets at most
    /// `k` period cells.
    pub k: u32,
    /// `\int_0^m |f|` over one period `m`.
    pub period_mass: f64,
    pub holds: bool,
}

const PERIODIC_BOUND_TOL: f64 = 1e-8;

pub fn periodic_bound_check(
    f: &FunctionSpec,
    t: f64,
    c: f64,
    cfg: &QuadratureConfig,
) -> Result<PeriodicBoundCheck> {
    let m = f.period_hint.ok_or(Error::MissingPeriodHint)?;
    if !(t > 0.0) || !(c > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "periodic bound needs T > 0 and c > 0, got T = {t}, c = {c}"
        )));
    }
    let k = (c / m).floor() as u32 + 1;
    let period_mass = window_integral(f, 0.0, m, cfg)?.value;
    let bound = k as f64 * period_mass / t;
    let lhs = window_integral(f, t, t + c, cfg)?.value / t;
    Ok(PeriodicBoundCheck {
        lhs,
        bound,
        k,
        period_mass,
        holds: lhs <= bound + PERIODIC_BOUND_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn zero_function_has_zero_averages() {
        let f = FunctionSpec::parse("0").unwrap();
        let s = tail_average(&f, 17.0, 3.0, &cfg()).unwrap();
        assert_eq!(s.right_value, 0.0);
        assert_eq!(s.left_value, 0.0);
    }

    #[test]
    fn sine_average_over_full_period() {
        // One period of |sin| integrates to exactly 4.
        let f = FunctionSpec::parse("sin(t)").unwrap();
        let s = tail_average(&f, 100.0, 2.0 * PI, &cfg()).unwrap();
        assert_relative_eq!(s.right_value, 0.04, epsilon = 1e-8);
        assert_relative_eq!(s.left_value, 0.04, epsilon = 1e-8);
    }

    #[test]
    fn absolute_value_average_does_not_vanish() {
        // \int_T^{T+1} t dt = T + 1/2.
        let f = FunctionSpec::parse("abs(t)").unwrap();
        let s = tail_average(&f, 100.0, 1.0, &cfg()).unwrap();
        assert_relative_eq!(s.right_value, 1.005, epsilon = 1e-8);
        assert_relative_eq!(s.left_value, 1.005, epsilon = 1e-8);
    }

    #[test]
    fn compact_support_gives_exact_zeros() {
        let f = FunctionSpec::parse("piecewise([-1,1]: 1 - t^2; else: 0)")
            .unwrap()
            .with_support(-1.0, 1.0)
            .unwrap();
        let s = tail_average(&f, 10.0, 5.0, &cfg()).unwrap();
        assert_eq!(s.right_value, 0.0);
        assert_eq!(s.left_value, 0.0);
    }

    #[test]
    fn averages_scale_linearly() {
        let f = FunctionSpec::parse("sin(t)").unwrap();
        let g = FunctionSpec::parse("3*sin(t)").unwrap();
        let sf = tail_average(&f, 31.0, 2.5, &cfg()).unwrap();
        let sg = tail_average(&g, 31.0, 2.5, &cfg()).unwrap();
        assert_relative_eq!(sg.right_value, 3.0 * sf.right_value, epsilon = 1e-8);
        assert_relative_eq!(sg.left_value, 3.0 * sf.left_value, epsilon = 1e-8);
    }

    #[test]
    fn diagnostic_accepts_sine_and_rejects_absolute_value() {
        let cs = default_c_list();
        let ts = default_t_grid();
        let sine = FunctionSpec::parse("sin(t)").unwrap();
        let d = class_e_diagnostic(&sine, &cs, &ts, &cfg()).unwrap();
        assert!(d.consistent, "{:?}", d.series);

        let vee = FunctionSpec::parse("abs(t)").unwrap();
        let d = class_e_diagnostic(&vee, &cs, &ts, &cfg()).unwrap();
        assert!(!d.consistent);
        for s in &d.series {
            assert!(!s.right_consistent && !s.left_consistent, "c = {}", s.c);
        }
    }

    #[test]
    fn diagnostic_accepts_compact_support() {
        let f = FunctionSpec::parse("bump(2, 5) + bump(-5, -2)")
            .unwrap()
            .with_support(-5.0, 5.0)
            .unwrap();
        let d = class_e_diagnostic(&f, &default_c_list(), &default_t_grid(), &cfg()).unwrap();
        assert!(d.consistent);
        for s in &d.series {
            for smp in &s.samples {
                assert_eq!(smp.right_value, 0.0);
                assert_eq!(smp.left_value, 0.0);
            }
        }
    }

    #[test]
    fn periodic_bound_for_sine() {
        let f = FunctionSpec::parse("sin(t)")
            .unwrap()
            .with_period(2.0 * PI)
            .unwrap();
        let r = periodic_bound_check(&f, 50.0, 1.0, &cfg()).unwrap();
        assert_eq!(r.k, 1);
        assert_relative_eq!(r.period_mass, 4.0, epsilon = 1e-8);
        assert_relative_eq!(r.bound, 0.08, epsilon = 1e-8);
        assert!(r.holds && r.lhs <= r.bound + 1e-8);
    }

    #[test]
    fn periodic_bound_for_cosine_with_wide_window() {
        // c = 10 spans parts of two period cells of length 2 pi.
        let f = FunctionSpec::parse("cos(t)")
            .unwrap()
            .with_period(2.0 * PI)
            .unwrap();
        for t in [20.0, 200.0] {
            let r = periodic_bound_check(&f, t, 10.0, &cfg()).unwrap();
            assert_eq!(r.k, 2);
            assert_relative_eq!(r.bound, 8.0 / t, epsilon = 1e-8);
            assert!(r.holds, "T = {t}: lhs {} bound {}", r.lhs, r.bound);
        }
    }

    #[test]
    fn periodic_bound_requires_hint() {
        let f = FunctionSpec::parse("sin(t)").unwrap();
        assert!(matches!(
            periodic_bound_check(&f, 10.0, 1.0, &cfg()),
            Err(Error::MissingPeriodHint)
        ));
    }
}
