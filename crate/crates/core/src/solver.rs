//! Defender-side selection: RAM, the failure-free online greedy, uniform random selection, and
//! an exhaustive minimax solver for the sequential game.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attacks::{self, AttackerKind};
use crate::error::{Error, Result};
use crate::problem::{Budgets, ElementRef, ElementSet, ObjectiveHandle, SelectionSequence};
use crate::trace::{EpisodeTrace, StepRecord};

/// Default node budget for [`optimal_value`].
pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

/// One RAM step: the bait set `S1`, the greedy set `S2` and `A = S1 ∪ S2`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepPlan {
    pub bait: ElementSet,
    pub greedy: ElementSet,
    pub selection: ElementSet,
    pub oracle_calls: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SelectorKind {
    Ram,
    Greedy,
    Random,
}

impl SelectorKind {
    pub const ALL: [SelectorKind; 3] = [
        SelectorKind::Ram,
        SelectorKind::Greedy,
        SelectorKind::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SelectorKind::Ram => "ram",
            SelectorKind::Greedy => "greedy",
            SelectorKind::Random => "random",
        }
    }
}

impl fmt::Display for SelectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ram" => Ok(SelectorKind::Ram),
            "greedy" => Ok(SelectorKind::Greedy),
            "random" => Ok(SelectorKind::Random),
            other => Err(Error::Argument(format!(
                "unknown selector '{other}' (expected ram, greedy or random)"
            ))),
        }
    }
}

/// Exact value of the sequential max-min game.
#[derive(Clone, Debug, PartialEq)]
pub struct MinimaxResult {
    pub value: f64,
    pub optimal_first_move: Option<ElementSet>,
    pub node_count: u64,
}

fn next_step(obj: &ObjectiveHandle, history: &SelectionSequence) -> Result<usize> {
    let t = history.len() + 1;
    if t > obj.grounds().horizon() {
        return Err(Error::Structure(format!(
            "history of length {} leaves no step within horizon {}",
            history.len(),
            obj.grounds().horizon()
        )));
    }
    Ok(t)
}

/// Adds `rounds` elements from `candidates` to `chosen`, each maximizing `f(prior, chosen ∪ {y})`.
///
/// Candidates are scanned in canonical order and only a strictly larger value replaces the
/// incumbent, so ties go to the smallest `global_id`.
fn greedy_fill(
    obj: &ObjectiveHandle,
    prior: &SelectionSequence,
    candidates: &ElementSet,
    rounds: usize,
) -> Result<ElementSet> {
    let mut chosen = ElementSet::new();
    for _ in 0..rounds {
        let mut best: Option<(ElementRef, f64)> = None;
        for y in candidates.iter().filter(|y| !chosen.contains(y)) {
            let value = obj.evaluate(&prior.extended(chosen.with(*y)))?;
            if best.is_none_or(|(_, b)| value > b) {
                best = Some((*y, value));
            }
        }
        match best {
            Some((y, _)) => {
                chosen.insert(y);
            }
            None => break,
        }
    }
    Ok(chosen)
}

/// One step of RAM given the survivors of steps `1..t-1`.
pub fn ram_step(
    obj: &ObjectiveHandle,
    survivors_history: &SelectionSequence,
    alpha: usize,
    beta: usize,
) -> Result<StepPlan> {
    let t = next_step(obj, survivors_history)?;
    let ground = obj.grounds().step(t);
    if !(beta <= alpha && alpha <= ground.len()) {
        return Err(Error::Argument(format!(
            "step {t}: need 0 <= beta ({beta}) <= alpha ({alpha}) <= |V_t| ({})",
            ground.len()
        )));
    }
    let start = obj.eval_count();

    let mut bait = ElementSet::new();
    if beta > 0 {
        let blank = SelectionSequence::empty(t - 1);
        let mut singles = Vec::with_capacity(ground.len());
        for v in ground {
            singles.push((
                *v,
                obj.evaluate(&blank.extended(ElementSet::singleton(*v)))?,
            ));
        }
        singles.sort_by(|(a, fa), (b, fb)| fb.total_cmp(fa).then(a.cmp(b)));
        bait = singles.iter().take(beta).map(|(v, _)| *v).collect();
    }

    let rest = ElementSet::from_elements(ground.iter().copied()).difference(&bait);
    let greedy = greedy_fill(obj, survivors_history, &rest, alpha - beta)?;
    let selection = bait.union(&greedy);
    Ok(StepPlan {
        bait,
        greedy,
        selection,
        oracle_calls: obj.eval_count() - start,
    })
}

/// Online greedy step: `delta` rounds over `k`, conditioned on the prior choices.
pub fn greedy_step(
    obj: &ObjectiveHandle,
    prior_choices: &SelectionSequence,
    k: &ElementSet,
    delta: usize,
) -> Result<ElementSet> {
    let t = next_step(obj, prior_choices)?;
    if let Some(e) = k.iter().find(|e| e.step != t || !obj.grounds().contains(e)) {
        return Err(Error::Structure(format!("candidate {e} is not in V_{t}")));
    }
    if delta > k.len() {
        return Err(Error::Argument(format!(
            "greedy budget {delta} exceeds {} candidates",
            k.len()
        )));
    }
    greedy_fill(obj, prior_choices, k, delta)
}

/// Uniform `alpha`-subset of `ground`.
pub fn random_step<R: Rng + ?Sized>(
    rng: &mut R,
    ground: &[ElementRef],
    alpha: usize,
) -> Result<ElementSet> {
    if alpha > ground.len() {
        return Err(Error::Argument(format!(
            "cannot draw {alpha} of {} elements",
            ground.len()
        )));
    }
    Ok(rand::seq::index::sample(rng, ground.len(), alpha)
        .iter()
        .map(|i| ground[i])
        .collect())
}

/// Independent generator for one role (selector or attacker) inside an episode.
pub(crate) fn role_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Plays the sequential game for `t = 1..T`: the selector commits to `A_t` given the survivors so
/// far, then the attacker removes `B_t ⊆ A_t`.
///
/// Per-step oracle counts are read off the handle's counter, so the handle must not be shared
/// with concurrent work while the episode runs (use [`ObjectiveHandle::fork`]).
pub fn run_episode(
    obj: &ObjectiveHandle,
    budgets: &Budgets,
    selector: SelectorKind,
    attacker: AttackerKind,
    seed: u64,
) -> Result<EpisodeTrace> {
    let horizon = obj.grounds().horizon();
    if budgets.horizon() != horizon {
        return Err(Error::Argument(format!(
            "budgets cover {} steps, ground sets {horizon}",
            budgets.horizon()
        )));
    }
    let mut select_rng = role_rng(seed, 1);
    let mut attack_rng = role_rng(seed, 2);
    let mut history = SelectionSequence::new();
    let mut steps = Vec::with_capacity(horizon);

    for t in 1..=horizon {
        let (alpha, beta) = (budgets.alpha(t), budgets.beta(t));
        let before = obj.eval_count();
        let plan = match selector {
            SelectorKind::Ram => ram_step(obj, &history, alpha, beta)?,
            SelectorKind::Greedy => {
                let greedy = greedy_step(obj, &history, &obj.grounds().step_set(t), alpha)?;
                StepPlan {
                    bait: ElementSet::new(),
                    selection: greedy.clone(),
                    greedy,
                    oracle_calls: 0,
                }
            }
            SelectorKind::Random => {
                let picked = random_step(&mut select_rng, obj.grounds().step(t), alpha)?;
                StepPlan {
                    bait: ElementSet::new(),
                    selection: picked.clone(),
                    greedy: picked,
                    oracle_calls: 0,
                }
            }
        };
        let selector_calls = obj.eval_count() - before;

        let before = obj.eval_count();
        let outcome = attacks::remove(
            attacker,
            obj,
            &history,
            &plan.selection,
            beta,
            &mut attack_rng,
        )?;
        let attacker_calls = obj.eval_count() - before;

        let survivors = plan.selection.difference(&outcome.removed);
        history.push(survivors.clone());
        steps.push(StepRecord {
            step: t,
            bait: plan.bait,
            greedy: plan.greedy,
            selection: plan.selection,
            removed: outcome.removed,
            survivors,
            value_after_removal: outcome.post_value,
            selector_calls,
            attacker_calls,
        });
    }
    Ok(EpisodeTrace {
        selector,
        attacker,
        seed,
        steps,
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

struct Minimax<'a> {
    obj: &'a ObjectiveHandle,
    budgets: &'a Budgets,
    node_budget: u64,
    nodes: u64,
}

impl Minimax<'_> {
    fn visit(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return Err(Error::Capacity {
                what: "optimal_value",
                required: self.nodes as u128,
                limit: self.node_budget as u128,
            });
        }
        Ok(())
    }

    /// Max over `A_t`, min over `B_t`, recursing on the survivors.
    fn max_node(&mut self, history: &mut SelectionSequence) -> Result<(f64, Option<ElementSet>)> {
        self.visit()?;
        let t = history.len() + 1;
        if t > self.budgets.horizon() {
            return Ok((self.obj.evaluate(history)?, None));
        }
        let ground = self.obj.grounds().step(t);
        let (alpha, beta) = (self.budgets.alpha(t), self.budgets.beta(t));
        let mut best: Option<(f64, ElementSet)> = None;
        for a in ground.iter().copied().combinations(alpha) {
            let a = ElementSet::from_elements(a);
            let mut worst = f64::INFINITY;
            for k in 0..=beta.min(alpha) {
                for b in a.iter().copied().combinations(k) {
                    self.visit()?;
                    let survivors = a.difference(&ElementSet::from_elements(b));
                    history.push(survivors);
                    let value = self.max_node(history);
                    history.pop();
                    worst = worst.min(value?.0);
                }
            }
            if best.as_ref().is_none_or(|(v, _)| worst > *v) {
                best = Some((worst, a));
            }
        }
        let (value, first) = best.expect("alpha <= |V_t| yields at least one candidate");
        Ok((value, Some(first)))
    }
}

/// Exact value of `max_{A_1} min_{B_1} ... max_{A_T} min_{B_T} f(A_1 \ B_1, ..., A_T \ B_T)`
/// over the first `budgets.horizon()` steps.
///
/// `node_count` counts max nodes, min branches and leaves. The search stops with a capacity
/// error as soon as it would exceed `node_budget`.
pub fn optimal_value(
    obj: &ObjectiveHandle,
    budgets: &Budgets,
    node_budget: u64,
) -> Result<MinimaxResult> {
    let horizon = budgets.horizon();
    if horizon == 0 || horizon > obj.grounds().horizon() {
        return Err(Error::Argument(format!(
            "budget horizon {horizon} outside 1..={}",
            obj.grounds().horizon()
        )));
    }
    let mut leaves: u128 = 1;
    for t in 1..=horizon {
        let (alpha, beta) = (budgets.alpha(t), budgets.beta(t));
        let n = obj.grounds().step(t).len();
        if alpha > n || beta > alpha {
            return Err(Error::Argument(format!("step {t}: invalid budgets")));
        }
        let removals: u128 = (0..=beta).map(|k| binomial(alpha, k)).sum();
        leaves = leaves.saturating_mul(binomial(n, alpha).saturating_mul(removals));
    }
    if leaves > node_budget as u128 {
        return Err(Error::Capacity {
            what: "optimal_value",
            required: leaves,
            limit: node_budget as u128,
        });
    }
    let mut search = Minimax {
        obj,
        budgets,
        node_budget,
        nodes: 0,
    };
    let (value, first) = search.max_node(&mut SelectionSequence::new())?;
    Ok(MinimaxResult {
        value,
        optimal_first_move: first,
        node_count: search.nodes,
    })
}
