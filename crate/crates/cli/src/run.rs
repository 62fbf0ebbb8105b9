//! Executes the requested checks against a scenario and writes one CSV (or
//! JSON) artifact per check plus a run summary. Failures split two ways:
//! *hard failures* are violated identities and inequalities and fail the
//! run; *flags* are numeric-limit judgements (decade-decay consistency,
//! representation residuals) that are reported but only fail under
//! `--strict`.

use crate::report::{fmt_float, fmt_opt, status_line, write_json, Csv};
use crate::scenario::{CheckKind, Scenario};
use anyhow::{bail, Context, Result};
use dirichlet_lab_core::class_e::{
    class_e_diagnostic, default_c_list, default_t_grid, periodic_bound_check, ClassEDiagnostic,
    PeriodicBoundCheck,
};
use dirichlet_lab_core::dirichlet::{
    coeff, error_representation, kernel, partial_sum_via_kernel, CoefficientTable, SumRoute,
};
use dirichlet_lab_core::lebesgue::{
    bound_check, cot_sine_bound_sample, edge_domination_sample, phi_profile, tail_decomposition,
    PhiProfile,
};
use dirichlet_lab_core::sweep::{linspace, run_sweep, strictly_decreasing, SweepPlan};
use dirichlet_lab_core::{FunctionSpec, QuadratureConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

/// Two independently computed partial sums must agree to this.
pub const ROUTE_AGREEMENT_TOL: f64 = 1e-7;
/// The tail decomposition identity must close to this.
pub const TAIL_IDENTITY_TOL: f64 = 1e-7;
/// Allowance on the edge-strip domination ratio.
pub const EDGE_RATIO_TOL: f64 = 1e-12;
/// Residual allowance for the error representation when the support fits
/// entirely inside the window (flag, not hard failure).
const REPRESENTATION_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Coeffs,
    PartialSum,
    Kernel,
    ErrorRepr,
    Lebesgue,
    Bound,
    K,
    ClassE,
    Converge,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Coeffs => "coeffs",
            Task::PartialSum => "partial-sum",
            Task::Kernel => "kernel",
            Task::ErrorRepr => "error-repr",
            Task::Lebesgue => "lebesgue",
            Task::Bound => "bound",
            Task::K => "k",
            Task::ClassE => "class-e",
            Task::Converge => "converge",
        }
    }
}

impl From<CheckKind> for Task {
    fn from(kind: CheckKind) -> Task {
        match kind {
            CheckKind::Coeffs => Task::Coeffs,
            CheckKind::PartialSum => Task::PartialSum,
            CheckKind::ErrorRepr => Task::ErrorRepr,
            CheckKind::Lebesgue => Task::Lebesgue,
            CheckKind::Bound => Task::Bound,
            CheckKind::K => Task::K,
            CheckKind::ClassE => Task::ClassE,
            CheckKind::Converge => Task::Converge,
        }
    }
}

pub struct RunOptions {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub strict: bool,
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub files: Vec<String>,
    pub hard_failures: Vec<String>,
    pub flags: Vec<String>,
}

impl CheckReport {
    fn new(name: &'static str) -> CheckReport {
        CheckReport {
            name,
            files: Vec::new(),
            hard_failures: Vec::new(),
            flags: Vec::new(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub function: String,
    pub route: SumRoute,
    pub seed: u64,
    pub strict: bool,
    pub quadrature: QuadratureConfig,
    pub checks: Vec<CheckReport>,
    pub hard_failure_count: usize,
    pub flag_count: usize,
    /// No hard failures.
    pub passed: bool,
    /// No hard failures and no flags.
    pub passed_strict: bool,
}

struct Ctx<'a> {
    f: &'a FunctionSpec,
    plan: &'a SweepPlan,
    xs: &'a [f64],
    cfg: &'a QuadratureConfig,
    sc: &'a Scenario,
    opts: &'a RunOptions,
}

impl Ctx<'_> {
    fn path(&self, file: &str) -> PathBuf {
        self.opts.out_dir.join(file)
    }
}

pub fn execute(sc: &Scenario, tasks: &[Task], opts: &RunOptions) -> Result<RunSummary> {
    if tasks.is_empty() {
        bail!("checks: nothing to run (the scenario declares no checks)");
    }
    let f = sc.function()?;
    let plan = sc.sweep.plan()?;
    let xs = sc.x_points.resolve()?;
    std::fs::create_dir_all(&opts.out_dir)
        .with_context(|| format!("cannot create {}", opts.out_dir.display()))?;
    let ctx = Ctx {
        f: &f,
        plan: &plan,
        xs: &xs,
        cfg: &sc.quadrature,
        sc,
        opts,
    };

    let mut checks = Vec::with_capacity(tasks.len());
    for &task in tasks {
        let report = match task {
            Task::Coeffs => check_coeffs(&ctx)?,
            Task::PartialSum => check_partial_sum(&ctx)?,
            Task::Kernel => check_kernel(&ctx)?,
            Task::ErrorRepr => check_error_repr(&ctx)?,
            Task::Lebesgue => check_lebesgue(&ctx)?,
            Task::Bound => check_bound(&ctx)?,
            Task::K => check_k(&ctx)?,
            Task::ClassE => check_class_e(&ctx)?,
            Task::Converge => check_converge(&ctx)?,
        };
        println!(
            "{}",
            status_line(report.name, &report.hard_failures, &report.flags)
        );
        checks.push(report);
    }

    let hard_failure_count = checks.iter().map(|c| c.hard_failures.len()).sum();
    let flag_count = checks.iter().map(|c| c.flags.len()).sum();
    let summary = RunSummary {
        schema_version: crate::scenario::SCHEMA_VERSION,
        function: sc.function.clone(),
        route: sc.route,
        seed: opts.seed,
        strict: opts.strict,
        quadrature: sc.quadrature,
        checks,
        hard_failure_count,
        flag_count,
        passed: hard_failure_count == 0,
        passed_strict: hard_failure_count == 0 && flag_count == 0,
    };
    write_json(&opts.out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Did the run meet the bar the options ask for?
pub fn verdict(summary: &RunSummary, opts: &RunOptions) -> bool {
    if opts.strict {
        summary.passed_strict
    } else {
        summary.passed
    }
}

fn add_file(report: &mut CheckReport, path: &Path) {
    report
        .files
        .push(path.file_name().unwrap().to_string_lossy().into_owned());
}

fn check_coeffs(ctx: &Ctx) -> Result<CheckReport> {
    let mut report = CheckReport::new(Task::Coeffs.name());
    let grid = &ctx.plan.grids[0];
    let mut csv = Csv::new("k,a,b");
    for k in 0..=grid.n {
        let pair = coeff(ctx.f, grid.l, k, ctx.cfg)?;
        csv.row(&[
            k.to_string(),
            fmt_float(pair.cos_coef),
            fmt_float(pair.sin_coef),
        ]);
    }
    let path = ctx.path("coeffs.csv");
    csv.write_to(&path)?;
    add_file(&mut report, &path);
    Ok(report)
}

fn check_partial_sum(ctx: &Ctx) -> Result<CheckReport> {
    let mut report = CheckReport::new(Task::PartialSum.name());
    let mut csv = Csv::new("x,n,l,value,via");
    for grid in &ctx.plan.grids {
        let table = CoefficientTable::new(ctx.f, grid.l, *ctx.cfg)?;
        for &x in ctx.xs {
            let by_coeff = table.partial_sum(x, grid.n)?;
            let by_kernel = partial_sum_via_kernel(ctx.f, x, grid, ctx.cfg)?.value;
            for (value, via) in [
                (by_coeff, SumRoute::CoefficientSum),
                (by_kernel, SumRoute::KernelConvolution),
            ] {
                csv.row(&[
                    fmt_float(x),
                    grid.n.to_string(),
                    fmt_float(grid.l),
                    fmt_float(value),
                    via.as_str().to_string(),
                ]);
            }
            let gap = (by_coeff - by_kernel).abs();
            if gap > ROUTE_AGREEMENT_TOL {
                report.hard_failures.push(format!(
                    "routes disagree by {} at x = {}, n = {}, l = {}",
                    fmt_float(gap),
                    fmt_float(x),
                    grid.n,
                    fmt_float(grid.l)
                ));
            }
        }
    }
    let path = ctx.path("partial_sum.csv");
    csv.write_to(&path)?;
    add_file(&mut report, &path);
    Ok(report)
}

fn check_kernel(ctx: &Ctx) -> Result<CheckReport> {
    let mut report = CheckReport::new(Task::Kernel.name());
    let grid = &ctx.plan.grids[0];
    let ts = linspace(-grid.l, grid.l, ctx.sc.kernel.points)?;
    let mut csv = Csv::new("t,D");
    for t in ts {
        csv.row(&[fmt_float(t), fmt_float(kernel(grid, t))]);
    }
    let path = ctx.path("kernel.csv");
    csv.write_to(&path)?;
    add_file(&mut report, &path);
    Ok(report)
}

fn check_error_repr(ctx: &Ctx) -> Result<CheckReport> {
    let mut report = CheckReport::new(Task::ErrorRepr.name());
    let mut csv = Csv::new("j,n,l,eta,x,lhs,integral_term,residual");
    for (j, grid) in ctx.plan.grids.iter().enumerate() {
        for &x in ctx.xs {
            let r = error_representation(ctx.f, x, grid, ctx.cfg)?;
            csv.row(&[
                j.to_string(),
                grid.n.to_string(),
                fmt_float(grid.l),
                fmt_float(grid.eta()),
                fmt_float(x),
                fmt_float(r.lhs),
                fmt_float(r.integral_term),
                fmt_float(r.residual),
            ]);
            // With the support entirely inside the window the representation
            // is exact up to quadrature; a visible residual is suspicious.
            let support_inside = ctx
                .f
                .support_hint
                .is_some_and(|(lo, hi)| x - grid.l <= lo && hi <= x + grid.l);
            if support_inside && r.residual.abs() > REPRESENTATION_RESIDUAL_TOL {
                report.flags.push(format!(
                    "representation residual {} at x = {}, n = {}, l = {}",
                    fmt_float(r.residual),
                    fmt_float(x),
                    grid.n,
                    fmt_float(grid.l)
                ));
            }
        }
    }
    let path = ctx.path("error_repr.csv");
    csv.write_to(&path)?;
    add_file(&mut report, &path);
    Ok(report)
}

#[derive(Serialize)]
struct LebesgueEntry {
    x: f64,
    profile: PhiProfile,
}

fn check_lebesgue(ctx: &Ctx) -> Result<CheckReport> {
    let mut report = CheckReport::new(Task::Lebesgue.name());
    let section = &ctx.sc.lebesgue;
    let mut entries = Vec::with_capacity(ctx.xs.len());
    for &x in ctx.xs {
        let profile = phi_profile(
            ctx.f,
            x,
            section.h_min,
            section.h_max,
            section.points_per_decade,
            ctx.cfg,
        )?;
        if !profile.small_end_consistent {
            report.flags.push(format!(
                "small-scale decay not seen at x = {}",
                fmt_float(x)
            ));
        }
        if !profile.large_end_consistent {
            report.flags.push(format!(
                "large-scale decay not seen at x = {}",
                fmt_float(x)
            ));
        }
        entries.push(LebesgueEntry { x, profile });
    }
    let path = ctx.path("lebesgue.json");
    write_json(&path, &entries)?;
    add_file(&mut report, &path);
    Ok(report)
}

fn check_bound(ctx: &Ctx) -> Result<CheckReport> {
    let mut report = CheckReport::new(Task::Bound.name());
    let samples = ctx.sc.bound.samples;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.opts.seed);
    let mut csv = Csv::new(
        "j,n,l,eta,x,term_modulus,term_tail,term_local,rhs_total,lhs,slack,holds,\
         cot_sine_max,cot_sine_cap,edge_ratio_max",
    );
    for (j, grid) in ctx.plan.grids.iter().enumerate() {
        let cot_max = cot_sine_bound_sample(grid, samples, &mut rng);
        let cot_cap = grid.n as f64 * PI;
        if cot_max > cot_cap {
            report.hard_failures.push(format!(
                "kernel factor sample {} exceeds cap {} at n = {}, l = {}",
                fmt_float(cot_max),
                fmt_float(cot_cap),
                grid.n,
                fmt_float(grid.l)
            ));
        }
        for &x in ctx.xs {
            let b = bound_check(ctx.f, x, grid, ctx.cfg)?;
            let edge = edge_domination_sample(ctx.f, x, grid, samples, &mut rng);
            csv.row(&[
                j.to_string(),
                grid.n.to_string(),
                fmt_float(grid.l),
                fmt_float(grid.eta()),
                fmt_float(x),
                fmt_float(b.term_modulus),
                fmt_float(b.term_tail),
                fmt_float(b.term_local),
                fmt_float(b.rhs_total),
                fmt_float(b.lhs),
                fmt_float(b.slack),
                b.holds.to_string(),
                fmt_float(cot_max),
                fmt_float(cot_cap),
                fmt_float(edge),
            ]);
            if !b.holds {
                report.hard_failures.push(format!(
                    "three-term bound fails at x = {}, n = {}, l = {}: lhs {} vs rhs {} + {}",
                    fmt_float(x),
                    grid.n,
                    fmt_float(grid.l),
                    fmt_float(b.lhs),
                    fmt_float(b.rhs_total),
                    fmt_float(b.slack)
                ));
            }
            if edge > 1.0 + EDGE_RATIO_TOL {
                report.hard_failures.push(format!(
                    "edge-strip ratio {} exceeds 1 at x = {}, n = {}, l = {}",
                    fmt_float(edge),
                    fmt_float(x),
                    grid.n,
                    fmt_float(grid.l)
                ));
            }
        }
    }
    let path = ctx.path("bound.csv");
    csv.write_to(&path)?;
    add_file(&mut report, &path);
    Ok(report)
}

fn check_k(ctx: &Ctx) -> Result<CheckReport> {
    let mut report = CheckReport::new(Task::K.name());
    let mut csv = Csv::new(
        "j,n,l,eta,x,boundary_at_l,boundary_at_eta,below_one,above_one,parts_total,direct,residual",
    );
    for (j, grid) in ctx.plan.grids.iter().enumerate() {
        for &x in ctx.xs {
            let d = tail_decomposition(ctx.f, x, grid, ctx.cfg)?;
            csv.row(&[
                j.to_string(),
                grid.n.to_string(),
                fmt_float(grid.l),
                fmt_float(grid.eta()),
                fmt_float(x),
                fmt_float(d.boundary_at_l),
                fmt_float(d.boundary_at_eta),
                fmt_float(d.below_one),
                fmt_float(d.above_one),
                fmt_float(d.parts_total),
                fmt_float(d.direct),
                fmt_float(d.residual),
            ]);
            if d.residual.abs() > TAIL_IDENTITY_TOL {
                report.hard_failures.push(format!(
                    "tail decomposition identity off by {} at x = {}, n = {}, l = {}",
                    fmt_float(d.residual),
                    fmt_float(x),
                    grid.n,
                    fmt_float(grid.l)
                ));
            }
        }
    }
    let path = ctx.path("k.csv");
    csv.write_to(&path)?;
    add_file(&mut report, &path);
    Ok(report)
}

#[derive(Serialize)]
struct PeriodicRow {
    c: f64,
    #[serde(rename = "T")]
    t: f64,
    #[serde(flatten)]
    check: PeriodicBoundCheck,
}

#[derive(Serialize)]
struct ClassEReport {
    diagnostic: ClassEDiagnostic,
    periodic: Vec<PeriodicRow>,
}

fn check_class_e(ctx: &Ctx) -> Result<CheckReport> {
    let mut report = CheckReport::new(Task::ClassE.name());
    let c_list = ctx.sc.class_e.c_list.clone().unwrap_or_else(default_c_list);
    let t_grid = ctx.sc.class_e.t_grid.clone().unwrap_or_else(default_t_grid);
    let diagnostic = class_e_diagnostic(ctx.f, &c_list, &t_grid, ctx.cfg)?;

    let mut csv = Csv::new("c,T,right_value,left_value");
    for series in &diagnostic.series {
        for s in &series.samples {
            csv.row(&[
                fmt_float(s.c),
                fmt_float(s.t),
                fmt_float(s.right_value),
                fmt_float(s.left_value),
            ]);
        }
        if !series.right_consistent {
            report.flags.push(format!(
                "right tail averages not decaying for window {}",
                fmt_float(series.c)
            ));
        }
        if !series.left_consistent {
            report.flags.push(format!(
                "left tail averages not decaying for window {}",
                fmt_float(series.c)
            ));
        }
    }
    let csv_path = ctx.path("class_e.csv");
    csv.write_to(&csv_path)?;
    add_file(&mut report, &csv_path);

    let mut periodic = Vec::new();
    if ctx.f.period_hint.is_some() {
        for &c in &c_list {
            for &t in &t_grid {
                let check = periodic_bound_check(ctx.f, t, c, ctx.cfg)?;
                if !check.holds {
                    report.hard_failures.push(format!(
                        "periodic tail bound fails at c = {}, T = {}: lhs {} vs bound {}",
                        fmt_float(c),
                        fmt_float(t),
                        fmt_float(check.lhs),
                        fmt_float(check.bound)
                    ));
                }
                periodic.push(PeriodicRow { c, t, check });
            }
        }
    }
    let json_path = ctx.path("class_e.json");
    write_json(
        &json_path,
        &ClassEReport {
            diagnostic,
            periodic,
        },
    )?;
    add_file(&mut report, &json_path);
    Ok(report)
}

fn check_converge(ctx: &Ctx) -> Result<CheckReport> {
    let mut report = CheckReport::new(Task::Converge.name());
    let section = &ctx.sc.converge;
    let trace = run_sweep(
        ctx.f,
        ctx.xs,
        ctx.plan,
        ctx.sc.route,
        section.with_bound,
        ctx.cfg,
    )?;

    let mut csv = Csv::new("j,n,l,eta,x,S,target,abs_error,bound_rhs");
    for row in &trace.rows {
        csv.row(&[
            row.j.to_string(),
            row.n.to_string(),
            fmt_float(row.l),
            fmt_float(row.eta),
            fmt_float(row.x),
            fmt_float(row.value),
            fmt_float(row.target),
            fmt_float(row.abs_error),
            fmt_opt(row.bound_rhs),
        ]);
    }
    let path = ctx.path("converge.csv");
    csv.write_to(&path)?;
    add_file(&mut report, &path);

    let maxes = trace.max_abs_error_by_step();
    if section.require_decreasing && maxes.len() >= 2 && !strictly_decreasing(&maxes) {
        report.hard_failures.push(format!(
            "worst error per step is not strictly decreasing: [{}]",
            maxes
                .iter()
                .map(|&v| fmt_float(v))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    if let Some(threshold) = section.threshold {
        let final_err = *maxes.last().unwrap();
        if final_err > threshold {
            report.hard_failures.push(format!(
                "final worst error {} exceeds the declared threshold {}",
                fmt_float(final_err),
                fmt_float(threshold)
            ));
        }
    }
    Ok(report)
}
