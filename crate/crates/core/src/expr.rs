//! Expression AST for real-valued functions of a single variable `t`.
//!
//! The node set is deliberately small: constants, the variable, sums,
//! products, scalar multiples, natural powers, `sin`/`cos`/`exp`/`abs`,
//! interval-based piecewise definitions, and a smooth compactly supported
//! bump. Every node evaluates to a finite real for finite input; `exp`
//! saturates instead of overflowing.

use std::fmt;

/// Precedence levels mirroring the grammar in [`crate::parse`].
const PREC_SUM: u8 = 1;
const PREC_NEG: u8 = 2;
const PREC_PRODUCT: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

/// One branch of a piecewise definition: `body` applies on `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseBranch {
    pub lo: f64,
    pub hi: f64,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// The free variable `t`.
    Var,
    Sum(Box<Expr>, Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    /// Scalar multiple; the parser only produces factor `-1` (unary minus).
    ScalarMul(f64, Box<Expr>),
    /// Power with a natural exponent.
    Pow(Box<Expr>, u32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Abs(Box<Expr>),
    /// First branch whose half-open interval `[lo, hi)` contains `t` wins;
    /// `otherwise` applies outside every branch.
    Piecewise {
        branches: Vec<PiecewiseBranch>,
        otherwise: Box<Expr>,
    },
    /// Smooth bump supported exactly on `[lo, hi]` with peak 1 at the center:
    /// `exp(1 - 1/(1 - u^2))` for `u = (2t - lo - hi)/(hi - lo)`.
    Bump {
        lo: f64,
        hi: f64,
    },
}

impl Expr {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var => t,
            Expr::Sum(a, b) => a.eval(t) + b.eval(t),
            Expr::Product(a, b) => a.eval(t) * b.eval(t),
            Expr::ScalarMul(c, e) => c * e.eval(t),
            Expr::Pow(base, k) => base.eval(t).powi(*k as i32),
            Expr::Sin(e) => e.eval(t).sin(),
            Expr::Cos(e) => e.eval(t).cos(),
            // Saturate rather than overflow to +inf; arguments this large
            // only arise from pathological inputs, not from the lab's use.
            Expr::Exp(e) => e.eval(t).min(700.0).exp(),
            Expr::Abs(e) => e.eval(t).abs(),
            Expr::Piecewise {
                branches,
                otherwise,
            } => {
                for br in branches {
                    if t >= br.lo && t < br.hi {
                        return br.body.eval(t);
                    }
                }
                otherwise.eval(t)
            }
            Expr::Bump { lo, hi } => {
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                let u = (t - mid) / half;
                if u.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - u * u)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// True if the expression depends on the variable `t` anywhere.
    pub fn contains_var(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var | Expr::Bump { .. } => true,
            Expr::Sum(a, b) | Expr::Product(a, b) => a.contains_var() || b.contains_var(),
            Expr::ScalarMul(_, e)
            | Expr::Pow(e, _)
            | Expr::Sin(e)
            | Expr::Cos(e)
            | Expr::Exp(e)
            | Expr::Abs(e) => e.contains_var(),
            Expr::Piecewise {
                branches,
                otherwise,
            } => branches.iter().any(|b| b.body.contains_var()) || otherwise.contains_var(),
        }
    }

    /// Collects the declared kink locations of the expression: piecewise
    /// interval endpoints and bump support endpoints. Quadrature uses them
    /// so panels never straddle a known breakpoint.
    pub fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Expr::Const(_) | Expr::Var => {}
            Expr::Sum(a, b) | Expr::Product(a, b) => {
                a.collect_breakpoints(out);
                b.collect_breakpoints(out);
            }
            Expr::ScalarMul(_, e)
            | Expr::Pow(e, _)
            | Expr::Sin(e)
            | Expr::Cos(e)
            | Expr::Exp(e)
            | Expr::Abs(e) => e.collect_breakpoints(out),
            Expr::Piecewise {
                branches,
                otherwise,
            } => {
                for br in branches {
                    out.push(br.lo);
                    out.push(br.hi);
                    br.body.collect_breakpoints(out);
                }
                otherwise.collect_breakpoints(out);
            }
            Expr::Bump { lo, hi } => {
                out.push(*lo);
                out.push(*hi);
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Const(c) if *c < 0.0 => PREC_NEG,
            Expr::Const(_)
            | Expr::Var
            | Expr::Sin(_)
            | Expr::Cos(_)
            | Expr::Exp(_)
            | Expr::Abs(_)
            | Expr::Piecewise { .. }
            | Expr::Bump { .. } => PREC_ATOM,
            Expr::Sum(..) => PREC_SUM,
            Expr::ScalarMul(c, _) if *c == -1.0 => PREC_NEG,
            Expr::ScalarMul(..) | Expr::Product(..) => PREC_PRODUCT,
            Expr::Pow(..) => PREC_POWER,
        }
    }

    /// Writes `self`, parenthesizing whenever the node binds looser than
    /// `min_prec`. The output re-parses to a structurally identical tree.
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.prec() < min_prec {
            write!(f, "(")?;
            self.fmt_prec(f, PREC_SUM)?;
            return write!(f, ")");
        }
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "t"),
            Expr::Sum(a, b) => {
                a.fmt_prec(f, PREC_SUM)?;
                // Fold a negated right operand back into binary minus.
                match &**b {
                    Expr::Const(c) if *c < 0.0 => write!(f, " - {}", -c),
                    Expr::ScalarMul(c, e) if *c == -1.0 => {
                        write!(f, " - ")?;
                        e.fmt_prec(f, PREC_PRODUCT)
                    }
                    other => {
                        write!(f, " + ")?;
                        other.fmt_prec(f, PREC_NEG)
                    }
                }
            }
            Expr::Product(a, b) => {
                a.fmt_prec(f, PREC_PRODUCT)?;
                write!(f, " * ")?;
                b.fmt_prec(f, PREC_POWER)
            }
            Expr::ScalarMul(c, e) => {
                if *c == -1.0 {
                    write!(f, "-")?;
                    e.fmt_prec(f, PREC_PRODUCT)
                } else if *c < 0.0 {
                    write!(f, "({c}) * ")?;
                    e.fmt_prec(f, PREC_POWER)
                } else {
                    write!(f, "{c} * ")?;
                    e.fmt_prec(f, PREC_POWER)
                }
            }
            Expr::Pow(base, k) => {
                base.fmt_prec(f, PREC_ATOM)?;
                write!(f, "^{k}")
            }
            Expr::Sin(e) => write_call(f, "sin", e),
            Expr::Cos(e) => write_call(f, "cos", e),
            Expr::Exp(e) => write_call(f, "exp", e),
            Expr::Abs(e) => write_call(f, "abs", e),
            Expr::Piecewise {
                branches,
                otherwise,
            } => {
                write!(f, "piecewise(")?;
                for br in branches {
                    write!(f, "[{},{}]: ", br.lo, br.hi)?;
                    br.body.fmt_prec(f, PREC_SUM)?;
                    write!(f, "; ")?;
                }
                write!(f, "else: ")?;
                otherwise.fmt_prec(f, PREC_SUM)?;
                write!(f, ")")
            }
            Expr::Bump { lo, hi } => write!(f, "bump({lo}, {hi})"),
        }
    }
}

fn write_call(f: &mut fmt::Formatter<'_>, name: &str, arg: &Expr) -> fmt::Result {
    write!(f, "{name}(")?;
    arg.fmt_prec(f, PREC_SUM)?;
    write!(f, ")")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, PREC_SUM)
    }
}
