//! Parallel Monte Carlo runs over independently seeded trials.

use rayon::prelude::*;
use rsm_core::analysis::{
    aposteriori_bound, apriori_bound, bisection_lambda, greedy_reference, kappa, prefailure_bound,
    total_curvature, CurvatureMode, CurvatureReport,
};
use rsm_core::solver::run_episode;
use rsm_core::{EpisodeTrace, Error, SelectorKind};

use crate::config::RunConfig;
use crate::error::HarnessError;
use crate::results::ResultRow;
use crate::scenario::{build_scenario, scenario_rng, trial_seed, Scenario};

/// Environment variable holding the worker count; unset or `0` uses every core.
pub const WORKERS_ENV: &str = "RSM_WORKERS";

/// A trial dropped because some component hit its capacity limit.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialFailure {
    pub trial: u64,
    pub seed: u64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MonteCarloOutput {
    /// Ordered by trial, then selector and attacker in config order, then step.
    pub rows: Vec<ResultRow>,
    pub failures: Vec<TrialFailure>,
}

pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Runs `f` on a pool sized by [`worker_count`].
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
    {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// κ for submodular objectives, sampled total curvature otherwise.
pub fn scenario_curvature(
    scenario: &Scenario,
    samples: u64,
    seed: u64,
) -> Result<CurvatureReport, Error> {
    let obj = &scenario.objective;
    let v = obj.grounds().all_set();
    if scenario.submodular() {
        kappa(obj, &v)
    } else {
        let mut rng = scenario_rng(seed);
        rng.set_stream(3);
        total_curvature(obj, &v, CurvatureMode::Sampled, samples, &mut rng)
    }
}

/// Per-step bounds for a RAM trace: a priori, a posteriori and pre-failure.
///
/// A step whose greedy reference has zero value gets no ratio bounds.
pub fn trace_bounds(
    scenario: &Scenario,
    trace: &EpisodeTrace,
    curvature: &CurvatureReport,
) -> Result<Vec<[Option<f64>; 3]>, Error> {
    let obj = &scenario.objective;
    let budgets = &scenario.budgets;
    let sub = scenario.submodular();
    let horizon = trace.horizon();
    let apriori = apriori_bound(sub, curvature, horizon)?.value;
    let mut out = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let reference = greedy_reference(obj, &trace.bait_sets(t), budgets)?;
        let post = match aposteriori_bound(obj, trace, t, &reference, curvature, sub) {
            Ok(b) => Some(b.value),
            Err(Error::Degenerate(_)) => None,
            Err(e) => return Err(e),
        };
        let step = trace.step(t);
        let f_hat = if budgets.beta(t) == 0 {
            step.value_after_removal
        } else {
            bisection_lambda(
                obj,
                &trace.survivors(t - 1),
                &step.selection,
                budgets.beta(t),
                None,
                None,
            )?
            .f_hat
        };
        let pre = match prefailure_bound(obj, f_hat, t, horizon, &reference, curvature, sub) {
            Ok(b) => Some(b.value),
            Err(Error::Degenerate(_)) => None,
            Err(e) => return Err(e),
        };
        out.push([Some(apriori), post, pre]);
    }
    Ok(out)
}

fn run_trial(config: &RunConfig, trial: u64) -> Result<Vec<ResultRow>, HarnessError> {
    let seed = trial_seed(config.run.seed, trial);
    let scenario = build_scenario(config, seed)?;
    let wants_bounds = config.run.bounds && config.run.selectors.contains(&SelectorKind::Ram);
    let curvature = if wants_bounds {
        Some(scenario_curvature(
            &scenario,
            config.run.curvature_samples,
            seed,
        )?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for &selector in &config.run.selectors {
        for &attacker in &config.run.attackers {
            let obj = scenario.objective.fork();
            let trace = run_episode(&obj, &scenario.budgets, selector, attacker, seed)?;
            let bounds = match (&curvature, selector) {
                (Some(c), SelectorKind::Ram) => Some(trace_bounds(&scenario, &trace, c)?),
                _ => None,
            };
            for step in &trace.steps {
                let [apriori, post, pre] = bounds.as_ref().map_or([None; 3], |b| b[step.step - 1]);
                rows.push(ResultRow {
                    trial,
                    selector,
                    attacker,
                    step: step.step,
                    error: obj.cost(step.step, step.value_after_removal),
                    f_value: step.value_after_removal,
                    bound_apriori: apriori,
                    bound_aposteriori: post,
                    bound_prefailure: pre,
                    oracle_calls: step.selector_calls,
                });
            }
        }
    }
    Ok(rows)
}

/// Runs every trial of `config`. Trials that hit a capacity limit are reported in `failures`;
/// any other error aborts the run.
pub fn run_monte_carlo(config: &RunConfig) -> Result<MonteCarloOutput, HarnessError> {
    let results: Vec<_> = with_pool(|| {
        (0..config.run.trials as u64)
            .into_par_iter()
            .map(|trial| (trial, run_trial(config, trial)))
            .collect()
    });
    let mut out = MonteCarloOutput::default();
    for (trial, result) in results {
        match result {
            Ok(rows) => out.rows.extend(rows),
            Err(HarnessError::Core(e @ Error::Capacity { .. })) => {
                out.failures.push(TrialFailure {
                    trial,
                    seed: trial_seed(config.run.seed, trial),
                    reason: e.to_string(),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
