//! Evaluable functions: a parsed expression plus optional analyst-declared
//! hints, and the second symmetric difference built on top of one.

use crate::error::Error;
use crate::expr::Expr;
use crate::parse::{self, ParseError};

/// A function of `t` as the lab sees it: the original source text, its
/// parsed form, and optional hints the analyst vouches for.
///
/// `support_hint` truncates the function: evaluation outside `[lo, hi]`
/// returns exactly `0.0` without touching the expression. `period_hint` is
/// never used to alter evaluation; it only feeds periodic shortcuts (and is
/// checked by sampling in the test suite).
#[derive(Debug, Clone)]
pub struct FunctionSpec {
    pub source: String,
    pub ast: Expr,
    pub period_hint: Option<f64>,
    pub support_hint: Option<(f64, f64)>,
}

impl FunctionSpec {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let ast = parse::parse(source)?;
        Ok(FunctionSpec {
            source: source.to_string(),
            ast,
            period_hint: None,
            support_hint: None,
        })
    }

    pub fn with_period(mut self, period: f64) -> Result<Self, Error> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidHint(format!(
                "period hint must be a positive real, got {period}"
            )));
        }
        self.period_hint = Some(period);
        Ok(self)
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Result<Self, Error> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidHint(format!(
                "support hint must be a finite interval with lo < hi, got [{lo}, {hi}]"
            )));
        }
        self.support_hint = Some((lo, hi));
        Ok(self)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if let Some((lo, hi)) = self.support_hint {
            if t < lo || t > hi {
                return 0.0;
            }
        }
        let v = self.ast.eval(t);
        if v.is_finite() {
            v
        } else if v.is_nan() {
            0.0
        } else {
            f64::MAX.copysign(v)
        }
    }

    /// Declared kink locations: piecewise endpoints, bump edges, and the
    /// support boundary. Sorted, deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.ast.collect_breakpoints(&mut out);
        if let Some((lo, hi)) = self.support_hint {
            out.push(lo);
            out.push(hi);
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Kink locations of `t -> phi_x(t)` induced by this function's declared
    /// breakpoints: each breakpoint `b` shows up through `f(x + t)` at
    /// `t = b - x` and through `f(x - t)` at `t = x - b`.
    pub fn phi_breakpoints(&self, x: f64, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for b in self.breakpoints() {
            for cand in [b - x, x - b] {
                if cand > lo && cand < hi {
                    out.push(cand);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// Second symmetric difference of `f` about a fixed center `x`:
/// `phi(t) = f(x + t) + f(x - t) - 2 f(x)`.
///
/// The offset `2 f(x)` is evaluated once, so `phi(0)` is exactly zero.
#[derive(Debug, Clone)]
pub struct SymmetricDifference<'f> {
    pub f: &'f FunctionSpec,
    pub x: f64,
    center_twice: f64,
}

impl<'f> SymmetricDifference<'f> {
    pub fn new(f: &'f FunctionSpec, x: f64) -> Self {
        SymmetricDifference {
            f,
            x,
            center_twice: 2.0 * f.eval(x),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.f.eval(self.x + t) + self.f.eval(self.x - t) - self.center_twice
    }
}

/// One-shot second symmetric difference.
pub fn phi(f: &FunctionSpec, x: f64, t: f64) -> f64 {
    SymmetricDifference::new(f, x).value(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn symmetric_difference_of_sine() {
        // For f = sin, phi_x(t) = 2 sin(x) (cos(t) - 1).
        let f = FunctionSpec::parse("sin(t)").unwrap();
        let x = std::f64::consts::FRAC_PI_2;
        assert_relative_eq!(phi(&f, x, 1.0), 2.0 * (1.0f64.cos() - 1.0), epsilon = 1e-15);
        assert_relative_eq!(phi(&f, x, 1.0), -0.919395, epsilon = 1e-6);
    }

    #[test]
    fn symmetric_difference_vanishes_at_zero_exactly() {
        for src in ["sin(t)", "exp(-t^2/50)", "abs(t - 3)", "t^3"] {
            let f = FunctionSpec::parse(src).unwrap();
            assert_eq!(phi(&f, 0.7, 0.0), 0.0, "{src}");
        }
    }

    #[test]
    fn support_hint_truncates_exactly() {
        let f = FunctionSpec::parse("1 + t^2")
            .unwrap()
            .with_support(-1.0, 1.0)
            .unwrap();
        assert_eq!(f.eval(1.0000001), 0.0);
        assert_eq!(f.eval(-7.0), 0.0);
        assert_relative_eq!(f.eval(0.5), 1.25);
    }

    #[test]
    fn phi_breakpoints_mirror_function_breakpoints() {
        let f = FunctionSpec::parse("piecewise([-1,1]: 1 - t^2; else: 0)").unwrap();
        // Center x = 1: f's kinks at -1 and 1 appear at t = |b - x|.
        let bps = f.phi_breakpoints(1.0, 0.0, 10.0);
        assert_eq!(bps, vec![2.0]);
        let bps = f.phi_breakpoints(0.5, 0.0, 10.0);
        assert_eq!(bps, vec![0.5, 1.5]);
    }

    #[test]
    fn invalid_hints_are_rejected() {
        assert!(FunctionSpec::parse("t").unwrap().with_period(-1.0).is_err());
        assert!(FunctionSpec::parse("t")
            .unwrap()
            .with_support(2.0, 2.0)
            .is_err());
    }
}
