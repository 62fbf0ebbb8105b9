//! Adaptive composite Gauss-Legendre quadrature tuned for oscillatory
//! integrands.
//!
//! The caller supplies a frequency hint (the fastest angular frequency it
//! expects in the integrand); the initial panelization places
//! `min_panels_per_oscillation` panels per half-oscillation, plus a floor of
//! one panel per two length units so long slowly varying integrands are not
//! swallowed whole. Each panel carries an a-posteriori error estimate — the
//! difference between its one-panel value and its two-half-panel value — and
//! the worst panel is split until the summed estimate meets the tolerance or
//! the panel budget runs out. Running out is an error that still reports the
//! last value and estimate.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;

/// Hard ceiling on the frequency-derived initial panel count; refinement
/// takes over beyond this.
const MAX_INITIAL_CELLS: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Gauss-Legendre nodes per panel.
    pub nodes_per_panel: usize,
    /// Initial panels per half-oscillation of the hinted frequency.
    pub min_panels_per_oscillation: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Radius, relative to the half-length `l`, inside which kernel-type
    /// integrands switch from the sine-ratio form to the equivalent finite
    /// cosine sum (see the Dirichlet kernel evaluation).
    pub singularity_switch_radius: f64,
    /// Total panel evaluations allowed per integral.
    pub panel_budget: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            nodes_per_panel: 8,
            min_panels_per_oscillation: 4,
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            singularity_switch_radius: 1e-6,
            panel_budget: 1 << 20,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=64).contains(&self.nodes_per_panel) {
            return Err(Error::InvalidConfig(format!(
                "nodes_per_panel must be in 2..=64, got {}",
                self.nodes_per_panel
            )));
        }
        if !(1..=4096).contains(&self.min_panels_per_oscillation) {
            return Err(Error::InvalidConfig(format!(
                "min_panels_per_oscillation must be in 1..=4096, got {}",
                self.min_panels_per_oscillation
            )));
        }
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "abs_tol must be a positive real, got {}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol >= 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "rel_tol must be a non-negative real, got {}",
                self.rel_tol
            )));
        }
        if !(self.singularity_switch_radius > 0.0) || !(self.singularity_switch_radius < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "singularity_switch_radius must be in (0, 0.5), got {}",
                self.singularity_switch_radius
            )));
        }
        if self.panel_budget < 16 {
            return Err(Error::InvalidConfig(format!(
                "panel_budget must be at least 16, got {}",
                self.panel_budget
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    /// Summed disagreement between the two finest refinement levels.
    pub error_estimate: f64,
    /// Total Gauss panel evaluations spent.
    pub panels_used: usize,
}

impl IntegralResult {
    /// Result of integrating over an empty interval.
    pub fn zero() -> Self {
        IntegralResult {
            value: 0.0,
            error_estimate: 0.0,
            panels_used: 1,
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre recurrence and symmetrized exactly.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss rule needs at least one node");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi-style initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() <= 1e-15 * x.abs().max(1.0) {
                    let (_, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // The guess ordering puts the largest root at i = 0; store
            // ascending and mirror for exact symmetry.
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
            nodes[i] = -x;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Integrates `f` over a single panel `[a, b]`.
    fn panel<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// Legendre polynomial `P_n` and its derivative at `x`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

/// A single two-level agreement is not trusted on its own: an oscillatory
/// integrand can make `coarse` and `fine` coincide on a cell that is far
/// from resolved, and a worst-first queue would then never look at that
/// region again. Each child therefore inherits a floor equal to this share
/// of its parent's observed disagreement; a cell whose floor still exceeds
/// its share of the tolerance is guaranteed another split, and the split
/// re-measures the disagreement honestly.
const INHERITED_ERR_DECAY: f64 = 256.0;

/// One refinement cell: its coarse value and the two half-panel values it
/// would split into.
struct Cell {
    a: f64,
    b: f64,
    coarse: f64,
    fine_left: f64,
    fine_right: f64,
    /// Lower bound on the believed error, inherited from the parent.
    floor: f64,
}

impl Cell {
    fn fine(&self) -> f64 {
        self.fine_left + self.fine_right
    }

    fn err(&self) -> f64 {
        (self.coarse - self.fine()).abs().max(self.floor)
    }
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    // Worst error first; interval endpoints break ties so the refinement
    // order (and therefore the output bits) never depends on heap history.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err()
            .total_cmp(&other.err())
            .then(other.a.total_cmp(&self.a))
            .then(other.b.total_cmp(&self.b))
    }
}

fn make_cell<F: Fn(f64) -> f64>(
    f: &F,
    rule: &GaussRule,
    a: f64,
    b: f64,
    coarse: Option<f64>,
    floor: f64,
    panels_used: &mut usize,
) -> Cell {
    let coarse = coarse.unwrap_or_else(|| {
        *panels_used += 1;
        rule.panel(f, a, b)
    });
    let m = 0.5 * (a + b);
    let fine_left = rule.panel(f, a, m);
    let fine_right = rule.panel(f, m, b);
    *panels_used += 2;
    Cell {
        a,
        b,
        coarse,
        fine_left,
        fine_right,
        floor,
    }
}

fn initial_cell_count(len: f64, freq_hint: f64, cfg: &QuadratureConfig) -> usize {
    let half_oscillations = (freq_hint * len / std::f64::consts::PI).ceil();
    let by_freq = if half_oscillations >= MAX_INITIAL_CELLS as f64 {
        MAX_INITIAL_CELLS
    } else {
        (half_oscillations as usize).saturating_mul(cfg.min_panels_per_oscillation)
    };
    let by_len = (len / 2.0).ceil() as usize;
    // Never start from a single cell: the birth floor needs at least one
    // sibling disagreement as evidence (see `INHERITED_ERR_DECAY`).
    by_freq.max(by_len).clamp(2, MAX_INITIAL_CELLS)
}

/// Integrates `f` over `[lo, hi]`.
///
/// `freq_hint` is the fastest angular frequency (radians per unit of `t`)
/// the caller expects in the integrand; pass `0.0` when there is no
/// oscillation to resolve. The returned error estimate is a-posteriori, not
/// a guarantee.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    freq_hint: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    cfg.validate()?;
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::InvalidBounds { lo, hi });
    }
    if !(freq_hint >= 0.0) || !freq_hint.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "freq_hint must be a non-negative real, got {freq_hint}"
        )));
    }
    if lo == hi {
        return Ok(IntegralResult::zero());
    }

    let rule = GaussRule::new(cfg.nodes_per_panel);
    let mut panels_used = 0usize;
    let n_init = initial_cell_count(hi - lo, freq_hint, cfg);

    let mut initial = Vec::with_capacity(n_init);
    let step = (hi - lo) / n_init as f64;
    for i in 0..n_init {
        let a = if i == 0 { lo } else { lo + i as f64 * step };
        let b = if i == n_init - 1 {
            hi
        } else {
            lo + (i + 1) as f64 * step
        };
        initial.push(make_cell(&f, &rule, a, b, None, 0.0, &mut panels_used));
    }
    // Initial cells have no parent to inherit a floor from, so they vouch
    // for each other: a cell whose two levels happen to coincide still
    // starts out as suspect as the worst of its siblings. Equal-width
    // siblings can all alias at once on an integrand commensurate with
    // their common pitch, so a composite over n + 1 cells — a pitch no
    // shared oscillation can divide — serves as a second witness.
    let sibling_err = initial.iter().map(|c| c.err()).fold(0.0f64, f64::max);
    let offset_step = (hi - lo) / (n_init + 1) as f64;
    let mut offset_value = 0.0;
    for i in 0..=n_init {
        let a = lo + i as f64 * offset_step;
        let b = if i == n_init {
            hi
        } else {
            lo + (i + 1) as f64 * offset_step
        };
        offset_value += rule.panel(&f, a, b);
        panels_used += 1;
    }
    let fine_total: f64 = initial.iter().map(|c| c.fine()).sum();
    let cross_err = (fine_total - offset_value).abs();
    let birth_floor = sibling_err.max(cross_err) / INHERITED_ERR_DECAY;

    let mut heap = BinaryHeap::with_capacity(n_init * 2);
    let mut act_value = 0.0;
    let mut act_err = 0.0;
    for mut cell in initial {
        cell.floor = birth_floor;
        act_value += cell.fine();
        act_err += cell.err();
        heap.push(cell);
    }

    // Cells too narrow to split further; their error is irreducible.
    let mut frozen: Vec<Cell> = Vec::new();
    let mut frozen_err = 0.0;

    loop {
        let total_err = (act_err + frozen_err).max(0.0);
        let tol = cfg.abs_tol.max(cfg.rel_tol * act_value.abs());
        if total_err <= tol {
            break;
        }
        if panels_used >= cfg.panel_budget {
            let (value, estimate) = assemble(&heap, &frozen);
            return Err(Error::NonConvergent {
                value,
                estimate,
                panels: panels_used,
            });
        }
        let Some(worst) = heap.pop() else {
            // Everything is frozen; nothing left to refine.
            if total_err <= tol {
                break;
            }
            let (value, estimate) = assemble(&heap, &frozen);
            return Err(Error::NonConvergent {
                value,
                estimate,
                panels: panels_used,
            });
        };
        act_value -= worst.fine();
        act_err -= worst.err();
        let m = 0.5 * (worst.a + worst.b);
        if !(worst.a < m && m < worst.b) {
            frozen_err += worst.err();
            act_value += worst.fine();
            frozen.push(worst);
            continue;
        }
        let child_floor = worst.err() / INHERITED_ERR_DECAY;
        for (a, b, coarse) in [
            (worst.a, m, worst.fine_left),
            (m, worst.b, worst.fine_right),
        ] {
            let child = make_cell(&f, &rule, a, b, Some(coarse), child_floor, &mut panels_used);
            act_value += child.fine();
            act_err += child.err();
            heap.push(child);
        }
    }

    // Reassemble the value left-to-right to shed the drift the running sums
    // picked up during refinement.
    let (value, error_estimate) = assemble(&heap, &frozen);
    Ok(IntegralResult {
        value,
        error_estimate,
        panels_used,
    })
}

fn assemble(heap: &BinaryHeap<Cell>, frozen: &[Cell]) -> (f64, f64) {
    let mut cells: Vec<&Cell> = heap.iter().chain(frozen.iter()).collect();
    cells.sort_by(|p, q| p.a.total_cmp(&q.a).then(p.b.total_cmp(&q.b)));
    let mut value = 0.0;
    let mut err = 0.0;
    for c in cells {
        value += c.fine();
        err += c.err();
    }
    (value, err)
}

/// Integrates piecewise: the interval is cut at every breakpoint that falls
/// strictly inside it and the pieces are integrated independently, so no
/// panel ever straddles a declared kink. The result is the sum of the
/// per-piece results.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    freq_hint: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::InvalidBounds { lo, hi });
    }
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|b| *b > lo && *b < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut value = 0.0;
    let mut error_estimate = 0.0;
    let mut panels_used = 0;
    let mut start = lo;
    for end in cuts.into_iter().chain(std::iter::once(hi)) {
        if end > start {
            let piece = integrate(&f, start, end, freq_hint, cfg)?;
            value += piece.value;
            error_estimate += piece.error_estimate;
            panels_used += piece.panels_used;
        }
        start = end;
    }
    Ok(IntegralResult {
        value,
        error_estimate,
        panels_used: panels_used.max(1),
    })
}

/// Scan resolution for locating sign changes: two crossings closer than
/// this can hide inside one scan step and stay undeclared. Refinement still
/// sees such a lobe through its two-level disagreement, so a miss degrades
/// the estimate rather than the verdict.
const SIGN_SCAN_STEP: f64 = 0.05;

/// Fewest / most scan intervals regardless of interval length.
const SIGN_SCAN_MIN_STEPS: usize = 16;
const SIGN_SCAN_MAX_STEPS: usize = 1 << 16;

/// Locates the interior sign changes of `g` on `[lo, hi]` by uniform scan
/// and bisection. Exact zeros at scan points are skipped: a touch without a
/// crossing is not a kink of `|g|`. Deterministic for a given `g`.
pub fn sign_changes<F: Fn(f64) -> f64>(g: &F, lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Vec::new();
    }
    let steps = (((hi - lo) / SIGN_SCAN_STEP).ceil() as usize)
        .clamp(SIGN_SCAN_MIN_STEPS, SIGN_SCAN_MAX_STEPS);
    let mut out = Vec::new();
    let mut prev_t = lo;
    let mut prev_v = g(lo);
    for i in 1..=steps {
        let t = if i == steps {
            hi
        } else {
            lo + (hi - lo) * i as f64 / steps as f64
        };
        let v = g(t);
        if prev_v != 0.0 && v != 0.0 && (prev_v < 0.0) != (v < 0.0) {
            let (mut a, mut b) = (prev_t, t);
            let mut va = prev_v;
            loop {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let vm = g(m);
                if vm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if (vm < 0.0) == (va < 0.0) {
                    a = m;
                    va = vm;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        prev_t = t;
        prev_v = v;
    }
    out
}

/// Integrates `|g|` over `[lo, hi]`.
///
/// Taking an absolute value turns every sign change of `g` into a kink the
/// caller's declared breakpoints cannot know about, and a panel straddling
/// such a kink can fool the two-level error estimate badly enough to stop
/// refinement early. The sign changes are therefore located first and cut
/// exactly, alongside the declared kinks of `g` itself. The per-piece
/// absolute tolerance is divided by the piece count so the summed estimate
/// still honors `cfg.abs_tol`.
pub fn integrate_absolute<F: Fn(f64) -> f64>(
    g: F,
    lo: f64,
    hi: f64,
    declared: &[f64],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::InvalidBounds { lo, hi });
    }
    let mut cuts: Vec<f64> = declared
        .iter()
        .copied()
        .filter(|b| *b > lo && *b < hi)
        .collect();
    cuts.extend(sign_changes(&g, lo, hi));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut scaled = *cfg;
    scaled.abs_tol = cfg.abs_tol / (cuts.len() + 1) as f64;
    integrate_with_breakpoints(move |t| g(t).abs(), lo, hi, &cuts, 0.0, &scaled)
}
