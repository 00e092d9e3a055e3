use crate::attacks::AttackerKind;
use crate::error::{Error, Result};
use crate::problem::{Budgets, ElementSet, SelectionSequence};
use crate::solver::SelectorKind;

/// What happened at one step of an episode.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// `S_{t,1}`. Empty for selectors without a bait set.
    pub bait: ElementSet,
    /// `S_{t,2}`.
    pub greedy: ElementSet,
    /// `A_t`.
    pub selection: ElementSet,
    /// `B_t`.
    pub removed: ElementSet,
    /// `A_t \ B_t`.
    pub survivors: ElementSet,
    /// `f(A_1 \ B_1, ..., A_t \ B_t)`.
    pub value_after_removal: f64,
    pub selector_calls: u64,
    pub attacker_calls: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeTrace {
    pub selector: SelectorKind,
    pub attacker: AttackerKind,
    pub seed: u64,
    pub steps: Vec<StepRecord>,
}

impl EpisodeTrace {
    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    pub fn step(&self, t: usize) -> &StepRecord {
        &self.steps[t - 1]
    }

    /// `(A_1 \ B_1, ..., A_t \ B_t)`.
    pub fn survivors(&self, t: usize) -> SelectionSequence {
        SelectionSequence::from_sets(
            self.steps[..t]
                .iter()
                .map(|s| s.survivors.clone())
                .collect(),
        )
    }

    /// `(A_1, ..., A_t)`.
    pub fn selections(&self, t: usize) -> SelectionSequence {
        SelectionSequence::from_sets(
            self.steps[..t]
                .iter()
                .map(|s| s.selection.clone())
                .collect(),
        )
    }

    pub fn bait_sets(&self, t: usize) -> Vec<ElementSet> {
        self.steps[..t].iter().map(|s| s.bait.clone()).collect()
    }

    pub fn final_value(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.value_after_removal)
    }

    /// Checks the per-step set identities and budget constraints.
    pub fn validate(&self, budgets: &Budgets) -> Result<()> {
        if self.steps.len() != budgets.horizon() {
            return Err(Error::Structure(format!(
                "trace has {} steps for horizon {}",
                self.steps.len(),
                budgets.horizon()
            )));
        }
        for (i, s) in self.steps.iter().enumerate() {
            let t = i + 1;
            let fail = |what: &str| Err(Error::Structure(format!("step {t}: {what}")));
            if s.step != t {
                return fail("step index out of order");
            }
            if s.selection != s.bait.union(&s.greedy) || !s.bait.is_disjoint(&s.greedy) {
                return fail("selection is not the disjoint union of bait and greedy sets");
            }
            if s.selection.len() != budgets.alpha(t) {
                return fail("selection size differs from alpha");
            }
            if self.selector == SelectorKind::Ram && s.bait.len() != budgets.beta(t) {
                return fail("bait size differs from beta");
            }
            if s.removed.len() > budgets.beta(t) || !s.removed.is_subset(&s.selection) {
                return fail("removal exceeds beta or leaves the selection");
            }
            if s.survivors != s.selection.difference(&s.removed) {
                return fail("survivors differ from selection minus removal");
            }
        }
        Ok(())
    }
}
