//! Exhaustive verification grid: small coverage and modular instances where `f*` is computable,
//! checked against every bound and curvature inequality.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use rsm_core::analysis::{
    aposteriori_bound, apriori_bound, bisection_lambda, check_sequence_lemmas, check_set_lemmas,
    greedy_reference, kappa, prefailure_bound, total_curvature, CurvatureMode, LemmaReport,
};
use rsm_core::solver::{optimal_value, run_episode};
use rsm_core::{AttackerKind, Budgets, EpisodeTrace, Error, ObjectiveHandle, SelectorKind};

use crate::config::{SyntheticObjective, SyntheticParams};
use crate::monte_carlo::with_pool;
use crate::scenario::{generate_synthetic, scenario_rng, trial_seed};

const TOLERANCE: f64 = 1e-9;

fn at_least(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - TOLERANCE * lhs.abs().max(rhs.abs()).max(1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub objectives: Vec<SyntheticObjective>,
    pub step_sizes: Vec<usize>,
    pub horizons: Vec<usize>,
    /// Random objectives per `(objective, |V_t|, T)`; each is run under every valid `(α, β)`.
    pub replicates: usize,
    /// Random `(A, B)` draws per set inequality and objective.
    pub lemma_trials: usize,
    pub seed: u64,
    pub node_budget: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            objectives: vec![SyntheticObjective::Coverage, SyntheticObjective::Modular],
            step_sizes: vec![3, 4, 5],
            horizons: vec![1, 2],
            replicates: 20,
            lemma_trials: 10_000,
            seed: 0,
            node_budget: rsm_core::solver::DEFAULT_NODE_BUDGET,
        }
    }
}

/// One random objective of the grid.
#[derive(Debug)]
pub struct GridObjective {
    pub kind: SyntheticObjective,
    pub step_size: usize,
    pub horizon: usize,
    pub replicate: usize,
    pub seed: u64,
    pub objective: ObjectiveHandle,
}

impl GridObjective {
    /// Every uniform budget pair `1 <= α <= |V_t|`, `0 <= β <= α`.
    pub fn budgets(&self) -> Vec<Budgets> {
        (1..=self.step_size)
            .flat_map(|alpha| (0..=alpha).map(move |beta| (alpha, beta)))
            .map(|(a, b)| Budgets::uniform(a, b, self.objective.grounds()).expect("valid budgets"))
            .collect()
    }
}

impl fmt::Display for GridObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            SyntheticObjective::Coverage => "coverage",
            SyntheticObjective::Modular => "modular",
        };
        write!(
            f,
            "{kind} |V_t|={} T={} replicate={} seed={}",
            self.step_size, self.horizon, self.replicate, self.seed
        )
    }
}

pub fn grid_objectives(spec: &GridSpec) -> Vec<GridObjective> {
    let mut out = Vec::new();
    for &kind in &spec.objectives {
        for &n in &spec.step_sizes {
            for &horizon in &spec.horizons {
                for replicate in 0..spec.replicates {
                    let seed = trial_seed(spec.seed, out.len() as u64);
                    let params = SyntheticParams {
                        objective: kind,
                        step_size: n,
                        ..SyntheticParams::default()
                    };
                    let objective = generate_synthetic(&mut scenario_rng(seed), &params, horizon)
                        .expect("grid parameters are valid");
                    out.push(GridObjective {
                        kind,
                        step_size: n,
                        horizon,
                        replicate,
                        seed,
                        objective,
                    });
                }
            }
        }
    }
    out
}

/// Names of the grid checks.
pub mod checks {
    pub const APRIORI: &str = "apriori_bound";
    pub const APOSTERIORI: &str = "aposteriori_bound";
    pub const PREFAILURE_VALUE: &str = "prefailure_value";
    pub const PREFAILURE: &str = "prefailure_bound";
    pub const MODULAR_OPTIMAL: &str = "modular_optimal";
    pub const ORACLE_CALLS: &str = "oracle_calls";
    pub const SET_LEMMAS: &str = "set_inequalities";
    pub const SEQUENCE_LEMMAS: &str = "sequence_inequalities";
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridViolation {
    pub check: &'static str,
    pub instance: String,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub checked: u64,
    pub violations: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GridReport {
    pub objectives: usize,
    pub instances: usize,
    pub tallies: BTreeMap<&'static str, Tally>,
    pub violations: Vec<GridViolation>,
    /// Ratio bounds skipped because `f(M_{1:t}) = 0`.
    pub degenerate_skips: u64,
    /// RAM traces under the worst-case attacker, in grid order, for downstream checks.
    pub traces: Vec<(usize, Budgets, EpisodeTrace)>,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn record(
        &mut self,
        check: &'static str,
        ok: bool,
        instance: impl Fn() -> String,
        detail: impl Fn() -> String,
    ) {
        let tally = self.tallies.entry(check).or_default();
        tally.checked += 1;
        if !ok {
            tally.violations += 1;
            self.violations.push(GridViolation {
                check,
                instance: instance(),
                detail: detail(),
            });
        }
    }

    fn absorb_lemmas(&mut self, check: &'static str, report: LemmaReport, instance: &str) {
        let tally = self.tallies.entry(check).or_default();
        tally.checked += report.checked;
        tally.violations += report.violations.len() as u64;
        for v in report.violations {
            self.violations.push(GridViolation {
                check,
                instance: instance.to_owned(),
                detail: format!("{}: {} (lhs {} < rhs {})", v.check, v.witness, v.lhs, v.rhs),
            });
        }
    }

    fn merge(&mut self, other: GridReport) {
        self.objectives += other.objectives;
        self.instances += other.instances;
        for (k, t) in other.tallies {
            let mine = self.tallies.entry(k).or_default();
            mine.checked += t.checked;
            mine.violations += t.violations;
        }
        self.violations.extend(other.violations);
        self.degenerate_skips += other.degenerate_skips;
        self.traces.extend(other.traces);
    }
}

fn budget_label(b: &Budgets) -> String {
    format!("alpha={} beta={}", b.alpha(1), b.beta(1))
}

fn verify_instance(
    index: usize,
    grid: &GridObjective,
    budgets: &Budgets,
    spec: &GridSpec,
    report: &mut GridReport,
) -> Result<(), Error> {
    let obj = grid.objective.fork();
    let label = || format!("{grid} {}", budget_label(budgets));
    let horizon = grid.horizon;
    let v = obj.grounds().all_set();
    let curvature = kappa(&obj, &v)?;
    let c = total_curvature(
        &obj,
        &v,
        CurvatureMode::Exact,
        0,
        &mut scenario_rng(grid.seed),
    )?;

    let trace = run_episode(
        &obj,
        budgets,
        SelectorKind::Ram,
        AttackerKind::Worst,
        grid.seed,
    )?;
    for step in &trace.steps {
        let n = obj.grounds().step(step.step).len() as u64;
        let delta = (budgets.alpha(step.step) - budgets.beta(step.step)) as u64;
        let limit = n + delta * n;
        report.record(
            checks::ORACLE_CALLS,
            step.selector_calls <= limit,
            label,
            || {
                format!(
                    "step {}: {} calls > {limit}",
                    step.step, step.selector_calls
                )
            },
        );
    }

    let f_star: Vec<f64> = (1..=horizon)
        .map(|t| optimal_value(&obj, &budgets.prefix(t), spec.node_budget).map(|r| r.value))
        .collect::<Result<_, _>>()?;
    let f_final = trace.final_value();

    let apriori = apriori_bound(true, &curvature, horizon)?;
    report.record(
        checks::APRIORI,
        at_least(f_final, apriori.value * f_star[horizon - 1]),
        label,
        || {
            format!(
                "f = {f_final} < {} * f* = {}",
                apriori.value,
                f_star[horizon - 1]
            )
        },
    );

    if grid.kind == SyntheticObjective::Modular {
        report.record(
            checks::MODULAR_OPTIMAL,
            f_final == f_star[horizon - 1],
            label,
            || format!("f = {f_final} != f* = {}", f_star[horizon - 1]),
        );
    }

    for t in 1..=horizon {
        let f_t = trace.step(t).value_after_removal;
        let reference = greedy_reference(&obj, &trace.bait_sets(t), budgets)?;
        let post = match aposteriori_bound(&obj, &trace, t, &reference, &curvature, true) {
            Ok(b) => Some(b),
            Err(Error::Degenerate(_)) => {
                report.degenerate_skips += 1;
                None
            }
            Err(e) => return Err(e),
        };
        if let Some(b) = &post {
            report.record(
                checks::APOSTERIORI,
                at_least(f_t, b.value * f_star[t - 1]),
                label,
                || format!("t={t}: f = {f_t} < {} * f*_t = {}", b.value, f_star[t - 1]),
            );
        }
        let beta = budgets.beta(t);
        if beta == 0 {
            continue;
        }
        let state = bisection_lambda(
            &obj,
            &trace.survivors(t - 1),
            &trace.step(t).selection,
            beta,
            None,
            None,
        )?;
        report.record(
            checks::PREFAILURE_VALUE,
            at_least(f_t, state.f_hat),
            label,
            || format!("t={t}: f_hat = {} > f = {f_t}", state.f_hat),
        );
        if post.is_some() {
            let pre =
                prefailure_bound(&obj, state.f_hat, t, horizon, &reference, &curvature, true)?;
            report.record(
                checks::PREFAILURE,
                at_least(f_t, pre.value * f_star[t - 1]),
                label,
                || {
                    format!(
                        "t={t}: f = {f_t} < {} * f*_t = {}",
                        pre.value,
                        f_star[t - 1]
                    )
                },
            );
        }
    }

    let lemmas = check_sequence_lemmas(&obj, budgets, &trace, c.value, f_star[horizon - 1])?;
    report.absorb_lemmas(checks::SEQUENCE_LEMMAS, lemmas, &label());
    report.instances += 1;
    report.traces.push((index, budgets.clone(), trace));
    Ok(())
}

fn verify_objective(
    index: usize,
    grid: &GridObjective,
    spec: &GridSpec,
) -> Result<GridReport, Error> {
    let mut report = GridReport {
        objectives: 1,
        ..GridReport::default()
    };
    let obj = &grid.objective;
    let v = obj.grounds().all_set();
    let c = total_curvature(
        obj,
        &v,
        CurvatureMode::Exact,
        0,
        &mut scenario_rng(grid.seed),
    )?;
    let mut rng = scenario_rng(grid.seed);
    rng.set_stream(4);
    let sets = check_set_lemmas(obj, &v, c.value, spec.lemma_trials, &mut rng)?;
    report.absorb_lemmas(checks::SET_LEMMAS, sets, &grid.to_string());
    for budgets in grid.budgets() {
        verify_instance(index, grid, &budgets, spec, &mut report)?;
    }
    Ok(report)
}

/// Runs every check over the grid. Objectives are processed in parallel and merged in grid order.
pub fn run_grid(spec: &GridSpec) -> Result<(Vec<GridObjective>, GridReport), Error> {
    let objectives = grid_objectives(spec);
    let parts: Vec<Result<GridReport, Error>> = with_pool(|| {
        objectives
            .par_iter()
            .enumerate()
            .map(|(i, g)| verify_objective(i, g, spec))
            .collect()
    });
    let mut report = GridReport::default();
    for part in parts {
        report.merge(part?);
    }
    Ok((objectives, report))
}
