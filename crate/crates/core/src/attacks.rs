//! Removal models `B_t ⊆ A_t`: exact worst case, greedy, and uniform random.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::Rng;

use crate::error::{Error, Result};
use crate::problem::{ElementRef, ElementSet, ObjectiveHandle, SelectionSequence};

/// Default cap on the number of candidate removals the worst-case attacker may enumerate.
pub const WORST_CASE_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttackerKind {
    Worst,
    Greedy,
    Random,
}

impl AttackerKind {
    pub const ALL: [AttackerKind; 3] = [
        AttackerKind::Worst,
        AttackerKind::Greedy,
        AttackerKind::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttackerKind::Worst => "worst",
            AttackerKind::Greedy => "greedy",
            AttackerKind::Random => "random",
        }
    }
}

impl fmt::Display for AttackerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "worst" | "worst_case" => Ok(AttackerKind::Worst),
            "greedy" => Ok(AttackerKind::Greedy),
            "random" => Ok(AttackerKind::Random),
            other => Err(Error::Argument(format!(
                "unknown attacker '{other}' (expected worst, greedy or random)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RemovalOutcome {
    pub removed: ElementSet,
    /// `f(history, A_t \ removed)`.
    pub post_value: f64,
}

fn check_selection(history: &SelectionSequence, selection: &ElementSet) -> Result<()> {
    let t = history.len() + 1;
    match selection.iter().find(|e| e.step != t) {
        Some(e) => Err(Error::Structure(format!(
            "selected element {e} does not belong to step {t}"
        ))),
        None => Ok(()),
    }
}

fn removal_count(n: usize, beta: usize) -> u128 {
    let mut total = 0u128;
    let mut c = 1u128;
    for k in 0..=beta.min(n) {
        total += c;
        c = c * (n - k) as u128 / (k + 1) as u128;
    }
    total
}

/// Exact minimizer of `f(history, A_t \ B)` over all `B ⊆ A_t` with `|B| <= beta`.
///
/// Ties go to the lexicographically smallest id vector.
pub fn worst_case_removal(
    obj: &ObjectiveHandle,
    history: &SelectionSequence,
    selection: &ElementSet,
    beta: usize,
    cap: u128,
) -> Result<RemovalOutcome> {
    check_selection(history, selection)?;
    let required = removal_count(selection.len(), beta);
    if required > cap {
        return Err(Error::Capacity {
            what: "worst_case_removal",
            required,
            limit: cap,
        });
    }
    let mut best: Option<(f64, Vec<ElementRef>)> = None;
    for k in 0..=beta.min(selection.len()) {
        for removed in selection.iter().copied().combinations(k) {
            let survivors =
                selection.difference(&ElementSet::from_elements(removed.iter().copied()));
            let value = obj.evaluate(&history.extended(survivors))?;
            let better = match &best {
                None => true,
                Some((v, b)) => value < *v || (value == *v && removed < *b),
            };
            if better {
                best = Some((value, removed));
            }
        }
    }
    let (post_value, removed) = best.expect("the empty removal is always a candidate");
    Ok(RemovalOutcome {
        removed: ElementSet::from_elements(removed),
        post_value,
    })
}

/// `beta` rounds, each removing the element whose loss hurts `f` most; ties to the smallest id.
pub fn greedy_removal(
    obj: &ObjectiveHandle,
    history: &SelectionSequence,
    selection: &ElementSet,
    beta: usize,
) -> Result<RemovalOutcome> {
    check_selection(history, selection)?;
    if beta > selection.len() {
        return Err(Error::Argument(format!(
            "cannot remove {beta} of {} selected elements",
            selection.len()
        )));
    }
    let mut removed = ElementSet::new();
    let mut value = None;
    for _ in 0..beta {
        let mut best: Option<(ElementRef, f64)> = None;
        let remaining = selection.difference(&removed);
        for y in &remaining {
            let survivors = remaining.difference(&ElementSet::singleton(*y));
            let v = obj.evaluate(&history.extended(survivors))?;
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((*y, v));
            }
        }
        let (y, v) = best.expect("beta <= |A_t| leaves a candidate each round");
        removed.insert(y);
        value = Some(v);
    }
    let post_value = match value {
        Some(v) => v,
        None => obj.evaluate(&history.extended(selection.clone()))?,
    };
    Ok(RemovalOutcome {
        removed,
        post_value,
    })
}

/// Uniform `beta`-subset of the selection.
pub fn random_removal<R: Rng + ?Sized>(
    obj: &ObjectiveHandle,
    rng: &mut R,
    history: &SelectionSequence,
    selection: &ElementSet,
    beta: usize,
) -> Result<RemovalOutcome> {
    check_selection(history, selection)?;
    if beta > selection.len() {
        return Err(Error::Argument(format!(
            "cannot remove {beta} of {} selected elements",
            selection.len()
        )));
    }
    let elements = selection.as_slice();
    let removed: ElementSet = rand::seq::index::sample(rng, elements.len(), beta)
        .iter()
        .map(|i| elements[i])
        .collect();
    let post_value = obj.evaluate(&history.extended(selection.difference(&removed)))?;
    Ok(RemovalOutcome {
        removed,
        post_value,
    })
}

pub fn remove<R: Rng + ?Sized>(
    kind: AttackerKind,
    obj: &ObjectiveHandle,
    history: &SelectionSequence,
    selection: &ElementSet,
    beta: usize,
    rng: &mut R,
) -> Result<RemovalOutcome> {
    match kind {
        AttackerKind::Worst => worst_case_removal(obj, history, selection, beta, WORST_CASE_CAP),
        AttackerKind::Greedy => greedy_removal(obj, history, selection, beta),
        AttackerKind::Random => random_removal(obj, rng, history, selection, beta),
    }
}
