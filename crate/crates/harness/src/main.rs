use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rsm_core::analysis::{kappa, kappa_sampled, total_curvature, CurvatureMode, CurvatureReport};
use rsm_core::solver::{optimal_value, run_episode};
use rsm_core::{AttackerKind, SelectorKind};

use rsm_harness::config::RunConfig;
use rsm_harness::grid::{run_grid, GridSpec};
use rsm_harness::monte_carlo::{run_monte_carlo, scenario_curvature, trace_bounds};
use rsm_harness::results::{emit_plot_data, emit_results, summarize, write_csv};
use rsm_harness::scenario::{build_scenario, scenario_rng, trial_seed};

#[derive(Parser)]
#[command(
    name = "rsm",
    version,
    about = "Robust sequential sensor selection benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo run; writes the result CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; defaults to the config's `output`, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        selectors: Option<Vec<SelectorKind>>,
        #[arg(long, value_delimiter = ',')]
        attackers: Option<Vec<AttackerKind>>,
        /// Fill the bound columns for RAM rows.
        #[arg(long)]
        bounds: bool,
        /// Directory for per-(selector, attacker) step/mean-error files.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// Curvature of the first trial's objective.
    Curvature {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "sampled")]
        mode: Mode,
        #[arg(long, default_value_t = 2000)]
        samples: u64,
    },
    /// Per-step bound report for one episode of the first trial.
    Bounds {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "ram")]
        selector: SelectorKind,
        #[arg(long, default_value = "worst")]
        attacker: AttackerKind,
    },
    /// Exact max-min value of the first trial (tiny instances only).
    Optimal {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        node_budget: Option<u64>,
    },
    /// Exhaustive grid of bound and inequality checks; exits non-zero on any violation.
    Verify {
        #[arg(long, default_value_t = 20)]
        replicates: usize,
        #[arg(long, default_value_t = 10_000)]
        lemma_trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(
    mut config: RunConfig,
    out: Option<PathBuf>,
    overrides: (Option<usize>, Option<u64>),
    selectors: Option<Vec<SelectorKind>>,
    attackers: Option<Vec<AttackerKind>>,
    bounds: bool,
    plot_dir: Option<PathBuf>,
) -> Result<()> {
    if let Some(t) = overrides.0 {
        config.run.trials = t;
    }
    if let Some(s) = overrides.1 {
        config.run.seed = s;
    }
    if let Some(s) = selectors {
        config.run.selectors = s;
    }
    if let Some(a) = attackers {
        config.run.attackers = a;
    }
    config.run.bounds |= bounds;
    config.validate()?;

    let output = run_monte_carlo(&config)?;
    for f in &output.failures {
        eprintln!("trial {} (seed {}) skipped: {}", f.trial, f.seed, f.reason);
    }
    match out.or(config.run.output.clone()) {
        Some(path) => {
            emit_results(&output.rows, &path)?;
            eprintln!("wrote {} rows to {}", output.rows.len(), path.display());
        }
        None => write_csv(&output.rows, std::io::stdout().lock())?,
    }
    if let Some(dir) = plot_dir {
        emit_plot_data(&output.rows, &dir)?;
    }
    for (key, row) in summarize(&output.rows) {
        eprintln!(
            "{:>6} vs {:<6} t={} mean error {:.4} (se {:.4}, n={})",
            key.selector.name(),
            key.attacker.name(),
            key.step,
            row.error.mean,
            row.error.std_error,
            row.error.count
        );
    }
    Ok(())
}

fn curvature(config: RunConfig, mode: Mode, samples: u64) -> Result<()> {
    let seed = trial_seed(config.run.seed, 0);
    let scenario = build_scenario(&config, seed)?;
    let obj = &scenario.objective;
    let v = obj.grounds().all_set();
    println!("objective {} with |V| = {}", obj.name(), v.len());
    let tag = |r: &CurvatureReport| {
        if r.certified {
            "exact".to_owned()
        } else {
            format!("estimate from {} samples", r.sample_count)
        }
    };
    let mut rng = scenario_rng(seed);
    rng.set_stream(3);
    let mode = match mode {
        Mode::Exact => CurvatureMode::Exact,
        Mode::Sampled => CurvatureMode::Sampled,
    };
    if scenario.submodular() {
        let k = match mode {
            CurvatureMode::Exact => kappa(obj, &v)?,
            CurvatureMode::Sampled => kappa_sampled(obj, &v, samples, &mut rng)?,
        };
        println!("kappa = {:.6} ({})", k.value, tag(&k));
    }
    let c = total_curvature(obj, &v, mode, samples, &mut rng)?;
    println!("total curvature c = {:.6} ({})", c.value, tag(&c));
    Ok(())
}

fn bounds(config: RunConfig, selector: SelectorKind, attacker: AttackerKind) -> Result<()> {
    if selector != SelectorKind::Ram {
        bail!("bounds apply to the ram selector only");
    }
    let seed = trial_seed(config.run.seed, 0);
    let scenario = build_scenario(&config, seed)?;
    let curv = scenario_curvature(&scenario, config.run.curvature_samples, seed)?;
    let trace = run_episode(
        &scenario.objective,
        &scenario.budgets,
        selector,
        attacker,
        seed,
    )?;
    let rows = trace_bounds(&scenario, &trace, &curv)?;
    let tag = if curv.certified { "" } else { " (estimate)" };
    println!(
        "curvature {:.6}{tag}; submodular: {}",
        curv.value,
        scenario.submodular()
    );
    println!("step  f_value  apriori  aposteriori  prefailure");
    let show = |v: Option<f64>| v.map_or("-".to_owned(), |x| format!("{x:.6}"));
    for (step, [a, p, q]) in trace.steps.iter().zip(rows) {
        println!(
            "{:>4}  {:.6}  {}  {}  {}",
            step.step,
            step.value_after_removal,
            show(a),
            show(p),
            show(q)
        );
    }
    Ok(())
}

fn optimal(config: RunConfig, node_budget: Option<u64>) -> Result<()> {
    let seed = trial_seed(config.run.seed, 0);
    let scenario = build_scenario(&config, seed)?;
    let budget = node_budget.unwrap_or(config.run.node_budget);
    let res = optimal_value(&scenario.objective, &scenario.budgets, budget)?;
    println!("f* = {}", res.value);
    if let Some(first) = res.optimal_first_move {
        println!("optimal first selection: {first}");
    }
    println!("nodes visited: {}", res.node_count);
    Ok(())
}

fn verify(replicates: usize, lemma_trials: usize, seed: u64) -> Result<bool> {
    let spec = GridSpec {
        replicates,
        lemma_trials,
        seed,
        ..GridSpec::default()
    };
    let (_, report) = run_grid(&spec)?;
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "{} objectives, {} instances",
        report.objectives, report.instances
    )?;
    for (name, tally) in &report.tallies {
        writeln!(
            out,
            "{name:<24} checked {:>10}  violations {}",
            tally.checked, tally.violations
        )?;
    }
    if report.degenerate_skips > 0 {
        writeln!(
            out,
            "ratio bounds skipped for zero-value references: {}",
            report.degenerate_skips
        )?;
    }
    for v in report.violations.iter().take(20) {
        writeln!(out, "VIOLATION {} [{}]: {}", v.check, v.instance, v.detail)?;
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let load = |p: &PathBuf| RunConfig::load(p).with_context(|| format!("loading {}", p.display()));
    let result = match cli.command {
        Command::Run {
            config,
            out,
            trials,
            seed,
            selectors,
            attackers,
            bounds,
            plot_dir,
        } => load(&config).and_then(|c| {
            run(
                c,
                out,
                (trials, seed),
                selectors,
                attackers,
                bounds,
                plot_dir,
            )
        }),
        Command::Curvature {
            config,
            mode,
            samples,
        } => load(&config).and_then(|c| curvature(c, mode, samples)),
        Command::Bounds {
            config,
            selector,
            attacker,
        } => load(&config).and_then(|c| bounds(c, selector, attacker)),
        Command::Optimal {
            config,
            node_budget,
        } => load(&config).and_then(|c| optimal(c, node_budget)),
        Command::Verify {
            replicates,
            lemma_trials,
            seed,
        } => match verify(replicates, lemma_trials, seed) {
            Ok(true) => Ok(()),
            Ok(false) => {
                eprintln!("verification found violations");
                return ExitCode::FAILURE;
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
