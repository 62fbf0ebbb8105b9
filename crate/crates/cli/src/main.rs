use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dirichlet_lab::run::{execute, verdict, RunOptions, Task};
use dirichlet_lab::scenario::Scenario;
use std::path::PathBuf;

/// Scenario-driven experiments on trigonometric partial sums over
/// expanding intervals.
#[derive(Parser)]
#[command(name = "dirichlet-lab", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(
        long,
        global = true,
        value_name = "FILE",
        default_value = "scenario.json"
    )]
    scenario: PathBuf,
    /// Directory for output artifacts.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Treat consistency flags as failures.
    #[arg(long, global = true)]
    strict: bool,
    /// Seed for the randomized inequality samplers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override: Gauss-Legendre nodes per quadrature panel.
    #[arg(long, global = true, value_name = "N")]
    quad_nodes: Option<usize>,
    /// Override: initial panels per half-oscillation.
    #[arg(long, global = true, value_name = "N")]
    quad_panels_per_osc: Option<usize>,
    /// Override: absolute quadrature tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    quad_abs_tol: Option<f64>,
    /// Override: relative quadrature tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    quad_rel_tol: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the trigonometric coefficients on the first declared grid.
    Coeffs,
    /// Evaluate partial sums by both routes and compare them.
    PartialSum,
    /// Sample the closed-form kernel across one window.
    Kernel,
    /// Run the declared sweep and trace errors against the target.
    Converge,
    /// Profile the integrated symmetric difference across scales.
    LebesgueCheck,
    /// Evaluate the three-term error bound and its inequality samplers.
    BoundCheck,
    /// Verify the tail-integral decomposition identity.
    KCheck,
    /// Tail-average decay diagnostics over growing offsets.
    ClassECheck,
    /// Run every check declared in the scenario.
    Run,
}

fn main() {
    let cli = Cli::parse();
    let code = match run_cli(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run_cli(cli: Cli) -> Result<bool> {
    let mut sc = Scenario::load(&cli.common.scenario)?;
    if let Some(v) = cli.common.quad_nodes {
        sc.quadrature.nodes_per_panel = v;
    }
    if let Some(v) = cli.common.quad_panels_per_osc {
        sc.quadrature.min_panels_per_oscillation = v;
    }
    if let Some(v) = cli.common.quad_abs_tol {
        sc.quadrature.abs_tol = v;
    }
    if let Some(v) = cli.common.quad_rel_tol {
        sc.quadrature.rel_tol = v;
    }
    sc.quadrature
        .validate()
        .context("quadrature overrides are out of range")?;

    let tasks: Vec<Task> = match cli.cmd {
        Cmd::Coeffs => vec![Task::Coeffs],
        Cmd::PartialSum => vec![Task::PartialSum],
        Cmd::Kernel => vec![Task::Kernel],
        Cmd::Converge => vec![Task::Converge],
        Cmd::LebesgueCheck => vec![Task::Lebesgue],
        Cmd::BoundCheck => vec![Task::Bound],
        Cmd::KCheck => vec![Task::K],
        Cmd::ClassECheck => vec![Task::ClassE],
        Cmd::Run => sc.checks.iter().map(|&k| Task::from(k)).collect(),
    };

    let opts = RunOptions {
        out_dir: cli.common.out.clone(),
        seed: cli.common.seed,
        strict: cli.common.strict,
    };
    let summary = execute(&sc, &tasks, &opts)?;
    let ok = verdict(&summary, &opts);
    println!(
        "result: {} ({} hard failure(s), {} flag(s))",
        if ok { "PASS" } else { "FAIL" },
        summary.hard_failure_count,
        summary.flag_count
    );
    Ok(ok)
}
