//! Expanding-interval Fourier machinery: trigonometric coefficients on
//! `[-l, l]`, partial sums by two independent routes, the Dirichlet kernel,
//! and the error representation that drives the convergence diagnostics.

use crate::error::{Error, Result};
use crate::function::{FunctionSpec, SymmetricDifference};
use crate::quadrature::{integrate_with_breakpoints, IntegralResult, QuadratureConfig};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::RwLock;

/// Expansion parameters: half-length `l` of the window `[-l, l]` and the
/// partial-sum order `n`. The induced mesh `eta = l / n` is always derived,
/// never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridParams {
    pub l: f64,
    pub n: u32,
}

impl GridParams {
    pub fn new(l: f64, n: u32) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half-length l must be a positive real, got {l}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidGrid("order n must be at least 1".into()));
        }
        Ok(GridParams { l, n })
    }

    /// Mesh `eta = l / n`.
    pub fn eta(&self) -> f64 {
        self.l / self.n as f64
    }

    /// Fastest angular frequency in the kernel: `(2n + 1) pi / (2 l)`.
    pub fn kernel_freq(&self) -> f64 {
        (2.0 * self.n as f64 + 1.0) * PI / (2.0 * self.l)
    }

    /// Angular frequency of the `k`-th harmonic, `k pi / l`.
    pub fn harmonic_freq(&self, k: u32) -> f64 {
        k as f64 * PI / self.l
    }
}

/// Dirichlet kernel for the window `[-l, l]`:
/// `D(t) = sin((2n+1) pi t / (2l)) / (2 sin(pi t / (2l)))`.
///
/// The kernel is even and `2l`-periodic; the removable singularities at
/// `t ≡ 0 (mod 2l)` are evaluated through the equivalent finite cosine sum
/// inside the relative switch radius. `D(0) = (2n + 1) / 2` exactly.
pub fn kernel(grid: &GridParams, t: f64) -> f64 {
    kernel_with_radius(
        grid,
        t,
        QuadratureConfig::default().singularity_switch_radius,
    )
}

/// [`kernel`] with an explicit relative switch radius (callers integrating
/// the kernel pass the one from their quadrature config).
pub fn kernel_with_radius(grid: &GridParams, t: f64, radius_rel: f64) -> f64 {
    // Evaluate at |t|: the kernel is even, and this makes the symmetry exact
    // in floating point as well.
    let t = t.abs();
    let l = grid.l;
    let period = 2.0 * l;
    let dist = t - period * (t / period).round();
    if dist.abs() < radius_rel * l {
        kernel_cosine_sum(grid, t)
    } else {
        let half_arg = PI * t / (2.0 * l);
        ((2.0 * grid.n as f64 + 1.0) * half_arg).sin() / (2.0 * half_arg.sin())
    }
}

/// The identical kernel as its finite cosine sum
/// `1/2 + sum_{k=1..n} cos(k pi t / l)` — exact at the singular points and
/// the independent route used to cross-check the ratio form.
pub fn kernel_cosine_sum(grid: &GridParams, t: f64) -> f64 {
    let w = PI * t.abs() / grid.l;
    let mut acc = 0.5;
    for k in 1..=grid.n {
        acc += (k as f64 * w).cos();
    }
    acc
}

/// Continuous extension of `(1/2) cot(pi t / 2l) sin(n pi t / l)`, the
/// cotangent-weighted sine factor of the kernel. Near the cotangent poles it
/// switches to the exact finite-sum form
/// `D(t) - cos(n pi t / l) / 2`, which gives the limit value `n` at `t = 0`.
pub fn cot_sine_factor(grid: &GridParams, t: f64, radius_rel: f64) -> f64 {
    let l = grid.l;
    let period = 2.0 * l;
    let dist = t - period * (t / period).round();
    let harmonic = grid.n as f64 * PI * t / l;
    if dist.abs() < radius_rel * l {
        kernel_cosine_sum(grid, t) - 0.5 * harmonic.cos()
    } else {
        let half_arg = PI * t / (2.0 * l);
        0.5 * (half_arg.cos() / half_arg.sin()) * harmonic.sin()
    }
}

/// Pair of trigonometric coefficients at harmonic `k`:
/// `a = (1/l) \int_{-l}^{l} f(t) cos(k pi t / l) dt` and the sine analogue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientPair {
    pub k: u32,
    pub cos_coef: f64,
    pub sin_coef: f64,
}

/// Integration bounds for integrals of `f` itself over `[lo, hi]`, shrunk
/// to the declared support. `None` means the integral is exactly zero.
pub(crate) fn clip_to_support(f: &FunctionSpec, lo: f64, hi: f64) -> Option<(f64, f64)> {
    match f.support_hint {
        Some((s_lo, s_hi)) => {
            let a = lo.max(s_lo);
            let b = hi.min(s_hi);
            (a < b).then_some((a, b))
        }
        None => Some((lo, hi)),
    }
}

pub fn coeff(f: &FunctionSpec, l: f64, k: u32, cfg: &QuadratureConfig) -> Result<CoefficientPair> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "half-length l must be a positive real, got {l}"
        )));
    }
    let Some((lo, hi)) = clip_to_support(f, -l, l) else {
        return Ok(CoefficientPair {
            k,
            cos_coef: 0.0,
            sin_coef: 0.0,
        });
    };
    let freq = k as f64 * PI / l;
    let bps = f.breakpoints();
    let cos_int =
        integrate_with_breakpoints(|t| f.eval(t) * (freq * t).cos(), lo, hi, &bps, freq, cfg)?;
    let sin_coef = if k == 0 {
        // sin(0 * t) vanishes identically; skip the integral.
        0.0
    } else {
        integrate_with_breakpoints(|t| f.eval(t) * (freq * t).sin(), lo, hi, &bps, freq, cfg)?.value
            / l
    };
    Ok(CoefficientPair {
        k,
        cos_coef: cos_int.value / l,
        sin_coef,
    })
}

/// Coefficients of a fixed `(f, l)` computed once and cached up to the
/// largest harmonic requested so far. Safe to share across threads: a racing
/// fill may duplicate work but each slot is published exactly once.
pub struct CoefficientTable<'f> {
    f: &'f FunctionSpec,
    l: f64,
    cfg: QuadratureConfig,
    pairs: RwLock<Vec<CoefficientPair>>,
}

impl<'f> CoefficientTable<'f> {
    pub fn new(f: &'f FunctionSpec, l: f64, cfg: QuadratureConfig) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half-length l must be a positive real, got {l}"
            )));
        }
        cfg.validate()?;
        Ok(CoefficientTable {
            f,
            l,
            cfg,
            pairs: RwLock::new(Vec::new()),
        })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    fn ensure(&self, k_max: u32) -> Result<()> {
        let have = self.pairs.read().unwrap().len();
        if have > k_max as usize {
            return Ok(());
        }
        let mut fresh = Vec::new();
        for k in have..=k_max as usize {
            fresh.push(coeff(self.f, self.l, k as u32, &self.cfg)?);
        }
        let mut slots = self.pairs.write().unwrap();
        for pair in fresh {
            // A racing thread may have published these already.
            if (pair.k as usize) == slots.len() {
                slots.push(pair);
            }
        }
        Ok(())
    }

    pub fn pair(&self, k: u32) -> Result<CoefficientPair> {
        self.ensure(k)?;
        Ok(self.pairs.read().unwrap()[k as usize])
    }

    /// Partial sum of order `n` at `x` from the cached coefficients.
    pub fn partial_sum(&self, x: f64, n: u32) -> Result<f64> {
        self.ensure(n)?;
        let pairs = self.pairs.read().unwrap();
        let mut acc = 0.5 * pairs[0].cos_coef;
        let w = PI * x / self.l;
        for pair in &pairs[1..=n as usize] {
            let arg = pair.k as f64 * w;
            acc += pair.cos_coef * arg.cos() + pair.sin_coef * arg.sin();
        }
        Ok(acc)
    }
}

/// Which of the two independent partial-sum routes produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumRoute {
    CoefficientSum,
    KernelConvolution,
}

impl SumRoute {
    pub fn as_str(self) -> &'static str {
        match self {
            SumRoute::CoefficientSum => "coefficient_sum",
            SumRoute::KernelConvolution => "kernel_convolution",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialSumResult {
    pub x: f64,
    pub grid: GridParams,
    pub value: f64,
    pub route: SumRoute,
}

/// Partial sum by the coefficient route:
/// `a_0/2 + sum_{k=1..n} (a_k cos(k pi x / l) + b_k sin(k pi x / l))`.
pub fn partial_sum(
    f: &FunctionSpec,
    x: f64,
    grid: &GridParams,
    cfg: &QuadratureConfig,
) -> Result<PartialSumResult> {
    let table = CoefficientTable::new(f, grid.l, *cfg)?;
    Ok(PartialSumResult {
        x,
        grid: *grid,
        value: table.partial_sum(x, grid.n)?,
        route: SumRoute::CoefficientSum,
    })
}

/// The same partial sum by the independent convolution route:
/// `(1/l) \int_{-l}^{l} f(t) D(t - x) dt`.
pub fn partial_sum_via_kernel(
    f: &FunctionSpec,
    x: f64,
    grid: &GridParams,
    cfg: &QuadratureConfig,
) -> Result<PartialSumResult> {
    let value = match clip_to_support(f, -grid.l, grid.l) {
        None => 0.0,
        Some((lo, hi)) => {
            let radius = cfg.singularity_switch_radius;
            let bps = f.breakpoints();
            let integrand = |t: f64| f.eval(t) * kernel_with_radius(grid, t - x, radius);
            integrate_with_breakpoints(integrand, lo, hi, &bps, grid.kernel_freq(), cfg)?.value
                / grid.l
        }
    };
    Ok(PartialSumResult {
        x,
        grid: *grid,
        value,
        route: SumRoute::KernelConvolution,
    })
}

/// The convergence error and its kernel-integral representation:
/// `lhs = S - f(x)`, `integral_term = (1/l) \int_0^l phi_x(t) D(t) dt`, and
/// the residual between them (which vanishes as `l` grows, and is exactly
/// zero — up to quadrature — for compactly supported `f` whose support fits
/// inside the window around `x`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRepresentation {
    pub lhs: f64,
    pub integral_term: f64,
    pub residual: f64,
}

/// Integrates `phi_x(t) D(t)` over `[0, l]`, normalized by `l`.
pub fn phi_kernel_integral(
    f: &FunctionSpec,
    x: f64,
    grid: &GridParams,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    let phi = SymmetricDifference::new(f, x);
    let radius = cfg.singularity_switch_radius;
    let bps = f.phi_breakpoints(x, 0.0, grid.l);
    integrate_with_breakpoints(
        |t| phi.value(t) * kernel_with_radius(grid, t, radius),
        0.0,
        grid.l,
        &bps,
        grid.kernel_freq(),
        cfg,
    )
}

pub fn error_representation(
    f: &FunctionSpec,
    x: f64,
    grid: &GridParams,
    cfg: &QuadratureConfig,
) -> Result<ErrorRepresentation> {
    let s = partial_sum(f, x, grid, cfg)?;
    let lhs = s.value - f.eval(x);
    let integral_term = phi_kernel_integral(f, x, grid, cfg)?.value / grid.l;
    Ok(ErrorRepresentation {
        lhs,
        integral_term,
        residual: lhs - integral_term,
    })
}

/// The error integral split along the kernel identity
/// `D(t) = (1/2) cot(pi t / 2l) sin(n pi t / l) + (1/2) cos(n pi t / l)`:
/// a cotangent-weighted sine channel plus a plain cosine channel. `total`
/// is their sum and matches `(1/l) \int_0^l phi_x D` up to quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionResult {
    pub sine_channel: f64,
    pub cosine_channel: f64,
    pub total: f64,
}

pub fn split_error_integral(
    f: &FunctionSpec,
    x: f64,
    grid: &GridParams,
    cfg: &QuadratureConfig,
) -> Result<DecompositionResult> {
    let phi = SymmetricDifference::new(f, x);
    let radius = cfg.singularity_switch_radius;
    let bps = f.phi_breakpoints(x, 0.0, grid.l);
    let freq = grid.kernel_freq();
    let l = grid.l;
    let sine_channel = integrate_with_breakpoints(
        |t| phi.value(t) * cot_sine_factor(grid, t, radius),
        0.0,
        l,
        &bps,
        freq,
        cfg,
    )?
    .value
        / l;
    let harmonic = grid.n as f64 * PI / l;
    let cosine_channel = integrate_with_breakpoints(
        |t| phi.value(t) * (harmonic * t).cos(),
        0.0,
        l,
        &bps,
        freq,
        cfg,
    )?
    .value
        / (2.0 * l);
    Ok(DecompositionResult {
        sine_channel,
        cosine_channel,
        total: sine_channel + cosine_channel,
    })
}
