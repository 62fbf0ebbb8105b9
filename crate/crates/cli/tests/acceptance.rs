//! The acceptance gate: nine numbered criteria covering the kernel shape,
//! route agreement, exact reproduction of harmonics, the tail-integral
//! identity, the three-term bound and its samplers, the two shipped
//! convergence demos (one validated against an independent Riemann oracle),
//! tail-average diagnostics, and byte-level determinism.
//!
//! Each test prints exactly one `criterion N (...): pass` line (visible
//! under `--nocapture`) or panics with the matching `fail` line.

use dirichlet_lab_core::class_e::{
    class_e_diagnostic, default_c_list, default_t_grid, periodic_bound_check,
};
use dirichlet_lab_core::corpus::{draw_function, draw_tail_split_grid, draw_x};
use dirichlet_lab_core::dirichlet::{kernel, partial_sum, partial_sum_via_kernel, GridParams};
use dirichlet_lab_core::lebesgue::{
    bound_check, cot_sine_bound_sample, edge_domination_sample, tail_decomposition,
};
use dirichlet_lab_core::quadrature::integrate;
use dirichlet_lab_core::sweep::linspace;
use dirichlet_lab_core::{FunctionSpec, QuadratureConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn verdict(n: u32, label: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("criterion {n} ({label}): pass");
    } else {
        panic!("criterion {n} ({label}): fail — {}", failures.join("; "));
    }
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

/// Runs the shipped binary, panicking on a nonzero exit.
fn run_demo(scenario_name: &str, out_dir: &Path, extra_env: &[(&str, &str)]) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dirichlet-lab"));
    cmd.args([
        "run",
        "--scenario",
        scenario(scenario_name).to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "5",
    ]);
    for (k, v) in extra_env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("the binary should launch");
    assert!(
        out.status.success(),
        "{scenario_name} exited with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Parses converge.csv into (j, x, S, abs_error) tuples.
fn read_trace(dir: &Path) -> Vec<(usize, f64, f64, f64)> {
    let text = std::fs::read_to_string(dir.join("converge.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "j,n,l,eta,x,S,target,abs_error,bound_rhs"
    );
    lines
        .map(|line| {
            let c: Vec<&str> = line.split(',').collect();
            (
                c[0].parse().unwrap(),
                c[4].parse().unwrap(),
                c[5].parse().unwrap(),
                c[7].parse().unwrap(),
            )
        })
        .collect()
}

fn worst_error_by_step(rows: &[(usize, f64, f64, f64)]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &(j, _, _, err) in rows {
        if j == out.len() {
            out.push(err);
        } else {
            out[j] = out[j].max(err);
        }
    }
    out
}

#[test]
fn criterion_1_kernel_shape() {
    let mut failures = Vec::new();

    // Normalization across the full matrix of small orders and window
    // half-lengths: the kernel integrates to exactly l.
    for n in 1u32..=10 {
        for l in [1.0, 5.0, 20.0] {
            let grid = GridParams::new(l, n).unwrap();
            let norm = integrate(|t| kernel(&grid, t), -l, l, grid.kernel_freq(), &cfg())
                .unwrap()
                .value
                / l;
            if (norm - 1.0).abs() > 1e-8 {
                failures.push(format!("normalization {norm} at l = {l}, n = {n}"));
            }
        }
    }

    for (l, n) in [(5.0, 7u32), (12.5, 40), (20.0, 128), (7.0, 8)] {
        let grid = GridParams::new(l, n).unwrap();
        let tag = format!("l = {l}, n = {n}");

        let norm = integrate(|t| kernel(&grid, t), -l, l, grid.kernel_freq(), &cfg())
            .unwrap()
            .value
            / l;
        if (norm - 1.0).abs() > 1e-8 {
            failures.push(format!("normalization {norm} at {tag}"));
        }

        let peak = 0.5 * (2.0 * n as f64 + 1.0);
        if kernel(&grid, 0.0) != peak {
            failures.push(format!("center value is not ({tag})"));
        }
        let ts = linspace(-l, l, 2001).unwrap();
        if ts.iter().any(|&t| kernel(&grid, t).abs() > peak + 1e-12) {
            failures.push(format!("center is not the maximum ({tag})"));
        }

        let first_zero = 2.0 * l / (2.0 * n as f64 + 1.0);
        if kernel(&grid, first_zero).abs() > 1e-10 {
            failures.push(format!("first zero missed ({tag})"));
        }

        let edge = 0.5 * if n % 2 == 0 { 1.0 } else { -1.0 };
        if (kernel(&grid, l) - edge).abs() > 1e-11 {
            failures.push(format!("edge value off ({tag})"));
        }

        if ts
            .iter()
            .filter(|&&t| t > 0.0)
            .any(|&t| kernel(&grid, t) != kernel(&grid, -t))
        {
            failures.push(format!("evenness is not exact ({tag})"));
        }
    }
    verdict(1, "kernel shape", failures);
}

#[test]
fn criterion_2_route_agreement() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2020);
    for draw in 0..20 {
        let f = draw_function(&mut rng);
        let l = rng.gen_range(5.0..30.0);
        let n = rng.gen_range(4..=60);
        let grid = GridParams::new(l, n).unwrap();
        let x = draw_x(&mut rng, grid.l);
        let a = partial_sum(&f, x, &grid, &cfg()).unwrap().value;
        let b = partial_sum_via_kernel(&f, x, &grid, &cfg()).unwrap().value;
        if (a - b).abs() > 1e-7 {
            failures.push(format!("draw {draw} ({}): {} vs {}", f.source, a, b));
        }
    }
    verdict(2, "route agreement", failures);
}

#[test]
fn criterion_3_harmonics_reproduce_exactly() {
    let mut failures = Vec::new();
    for l in [5.0, 17.0] {
        let xs = linspace(-l / 2.0, l / 2.0, 5).unwrap();
        for k in 1u32..=8 {
            let w = k as f64 * PI / l;
            for source in [format!("cos({w:e}*t)"), format!("sin({w:e}*t)")] {
                let f = FunctionSpec::parse(&source).unwrap();
                for n in k..=8 {
                    let grid = GridParams::new(l, n).unwrap();
                    for &x in &xs {
                        let want = f.eval(x);
                        let by_coeff = partial_sum(&f, x, &grid, &cfg()).unwrap().value;
                        let by_kernel = partial_sum_via_kernel(&f, x, &grid, &cfg()).unwrap().value;
                        if (by_coeff - want).abs() > 1e-8 || (by_kernel - want).abs() > 1e-8 {
                            failures.push(format!(
                                "{source} at l = {l}, n = {n}, x = {x}: \
                                 {by_coeff} / {by_kernel} vs {want}"
                            ));
                        }
                    }
                }
            }
        }
    }
    verdict(3, "harmonics reproduce exactly", failures);
}

#[test]
fn criterion_4_tail_decomposition_identity() {
    let mut failures = Vec::new();

    // Closed forms for f = |t| at x = 0, l = 4, n = 16 (eta = 1/4):
    // the integrated symmetric difference is t^2, so the direct tail integral
    // is 0.5 ln 16, both boundary terms are 1/4, and the two weighted pieces
    // contribute 0.5 ln 4 each.
    let f = FunctionSpec::parse("abs(t)").unwrap();
    let grid = GridParams::new(4.0, 16).unwrap();
    let d = tail_decomposition(&f, 0.0, &grid, &cfg()).unwrap();
    for (name, got, want) in [
        ("direct", d.direct, 0.5 * 16.0f64.ln()),
        ("boundary_at_l", d.boundary_at_l, 0.25),
        ("boundary_at_eta", d.boundary_at_eta, 0.25),
        ("below_one", d.below_one, 0.5 * 4.0f64.ln()),
        ("above_one", d.above_one, 0.5 * 4.0f64.ln()),
    ] {
        if (got - want).abs() > 1e-9 * want.abs().max(1.0) {
            failures.push(format!("closed form {name}: {got} vs {want}"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for draw in 0..10 {
        let f = draw_function(&mut rng);
        let grid = draw_tail_split_grid(&mut rng);
        let x = draw_x(&mut rng, grid.l);
        let d = tail_decomposition(&f, x, &grid, &cfg()).unwrap();
        if d.residual.abs() > 1e-7 {
            failures.push(format!(
                "draw {draw} ({}): residual {}",
                f.source, d.residual
            ));
        }
    }
    verdict(4, "tail decomposition identity", failures);
}

#[test]
fn criterion_5_bound_and_samplers() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for draw in 0..5 {
        let f = draw_function(&mut rng);
        let l = rng.gen_range(20.0..30.0);
        let n = rng.gen_range(50..=200u32);
        let grid = GridParams::new(l, n).unwrap();
        let x = draw_x(&mut rng, grid.l);

        let b = bound_check(&f, x, &grid, &cfg()).unwrap();
        if !b.holds {
            failures.push(format!(
                "draw {draw} ({}): lhs {} above rhs {} + slack {}",
                f.source, b.lhs, b.rhs_total, b.slack
            ));
        }

        let cot_max = cot_sine_bound_sample(&grid, 10_000, &mut rng);
        if cot_max > n as f64 * PI {
            failures.push(format!("draw {draw}: kernel factor reached {cot_max}"));
        }
        let edge_max = edge_domination_sample(&f, x, &grid, 10_000, &mut rng);
        if edge_max > 1.0 + 1e-12 {
            failures.push(format!("draw {draw}: edge ratio reached {edge_max}"));
        }
    }
    verdict(5, "bound and samplers", failures);
}

#[test]
fn criterion_6_pointwise_demo_with_oracle() {
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    run_demo("pointwise_demo.json", dir.path(), &[]);
    let rows = read_trace(dir.path());
    let errs = worst_error_by_step(&rows);
    if !errs.windows(2).all(|w| w[1] < w[0]) {
        failures.push(format!("errors not strictly decreasing: {errs:?}"));
    }
    if *errs.last().unwrap() > 0.05 {
        failures.push(format!("final error {}", errs.last().unwrap()));
    }

    // Independent oracle for the last step: a million-point midpoint rule for
    // the kernel average over the support, with nothing shared with the
    // adaptive integrator.
    let &(j, x, s, _) = rows.last().unwrap();
    assert_eq!(j, 3);
    let grid = GridParams::new(80.0, 6400).unwrap();
    let f = |t: f64| 1.0 - t * t;
    let cells = 1_000_000usize;
    let dt = 2.0 / cells as f64;
    let mut acc = 0.0;
    for i in 0..cells {
        let t = -1.0 + (i as f64 + 0.5) * dt;
        acc += f(t) * kernel(&grid, t - x);
    }
    let oracle = acc * dt / grid.l;
    if (s - oracle).abs() > 1e-6 {
        failures.push(format!("trace value {s} vs oracle {oracle}"));
    }
    verdict(6, "pointwise demo against oracle", failures);
}

#[test]
fn criterion_7_uniform_demo() {
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    run_demo("uniform_demo.json", dir.path(), &[]);
    let rows = read_trace(dir.path());
    assert_eq!(rows.len(), 4 * 21);
    let errs = worst_error_by_step(&rows);
    if !errs.windows(2).all(|w| w[1] < w[0]) {
        failures.push(format!("worst errors not strictly decreasing: {errs:?}"));
    }
    if *errs.last().unwrap() > 1e-8 {
        failures.push(format!("final worst error {}", errs.last().unwrap()));
    }
    verdict(7, "uniform demo", failures);
}

#[test]
fn criterion_8_tail_average_diagnostics() {
    let mut failures = Vec::new();
    let c_list = default_c_list();
    let t_grid = default_t_grid();

    // Periodic cases: one period of |sin| or |cos| has mass exactly 4, and
    // the window bound holds with the cell count k matching the window length.
    for source in ["sin(t)", "cos(t)"] {
        let f = FunctionSpec::parse(source)
            .unwrap()
            .with_period(2.0 * PI)
            .unwrap();
        for &c in &c_list {
            let want_k = (c / (2.0 * PI)).floor() as u32 + 1;
            for &t in &t_grid {
                let p = periodic_bound_check(&f, t, c, &cfg()).unwrap();
                if !p.holds {
                    failures.push(format!("{source}: bound fails at c = {c}, T = {t}"));
                }
                if (p.period_mass - 4.0).abs() > 1e-8 {
                    failures.push(format!(
                        "{source}: period mass {} at c = {c}",
                        p.period_mass
                    ));
                }
                if p.k != want_k {
                    failures.push(format!(
                        "{source}: cell count {} (want {want_k}) at c = {c}",
                        p.k
                    ));
                }
            }
        }
    }

    // Growing case: |t| has window averages approaching the constant c, so
    // no side can pass the decade-decay judgement.
    let g = FunctionSpec::parse("abs(t)").unwrap();
    let diag = class_e_diagnostic(&g, &c_list, &t_grid, &cfg()).unwrap();
    if diag.consistent
        || diag
            .series
            .iter()
            .any(|s| s.right_consistent || s.left_consistent)
    {
        failures.push("growing function passed the decay judgement".into());
    }

    // Compactly supported case: every window past the support is exactly
    // zero, and zero tails count as decaying.
    let h = FunctionSpec::parse("bump(2, 5) + bump(-5, -2)")
        .unwrap()
        .with_support(-5.0, 5.0)
        .unwrap();
    let diag = class_e_diagnostic(&h, &c_list, &t_grid, &cfg()).unwrap();
    if !diag.consistent {
        failures.push("compact support judged inconsistent".into());
    }
    for series in &diag.series {
        for s in &series.samples {
            if s.right_value != 0.0 || s.left_value != 0.0 {
                failures.push(format!("nonzero tail average at c = {}, T = {}", s.c, s.t));
            }
        }
    }
    verdict(8, "tail average diagnostics", failures);
}

#[test]
fn criterion_9_byte_level_determinism() {
    let mut failures = Vec::new();
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    run_demo(
        "constant_smoke.json",
        dirs[0].path(),
        &[("RAYON_NUM_THREADS", "2")],
    );
    run_demo(
        "constant_smoke.json",
        dirs[1].path(),
        &[("RAYON_NUM_THREADS", "8")],
    );
    run_demo(
        "constant_smoke.json",
        dirs[2].path(),
        &[("RAYON_NUM_THREADS", "2")],
    );

    let mut names: Vec<String> = std::fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(
        names.len() >= 10,
        "expected a full artifact set, got {names:?}"
    );
    for name in &names {
        let first = std::fs::read(dirs[0].path().join(name)).unwrap();
        for other in &dirs[1..] {
            if std::fs::read(other.path().join(name)).unwrap() != first {
                failures.push(format!("{name} differs between runs"));
                break;
            }
        }
    }
    verdict(9, "byte-level determinism", failures);
}
