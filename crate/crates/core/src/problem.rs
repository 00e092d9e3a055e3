//! Ground sets, budgets, selection sequences and the objective oracle.
//!
//! Every element carries the step it belongs to, so elements of different steps are never
//! equal. Sets are kept sorted by `global_id`; this canonical order drives every tie-break in
//! the solver and the attackers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Values this far below zero are float noise and get clamped; anything lower is a contract breach.
const NEGATIVE_VALUE_TOLERANCE: f64 = 1e-9;

/// One selectable item. `step` is 1-based, `local_index` is the 0-based position in `V_step`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ElementRef {
    pub step: usize,
    pub local_index: usize,
    pub global_id: usize,
}

impl Ord for ElementRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.global_id
            .cmp(&other.global_id)
            .then(self.step.cmp(&other.step))
            .then(self.local_index.cmp(&other.local_index))
    }
}

impl PartialOrd for ElementRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}@{}", self.global_id, self.step)
    }
}

/// A finite set of elements in canonical (`global_id`) order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ElementSet(Vec<ElementRef>);

impl ElementSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn from_elements<I: IntoIterator<Item = ElementRef>>(elements: I) -> Self {
        let mut v: Vec<ElementRef> = elements.into_iter().collect();
        v.sort();
        v.dedup();
        Self(v)
    }

    pub fn singleton(e: ElementRef) -> Self {
        Self(vec![e])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ElementRef> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[ElementRef] {
        &self.0
    }

    pub fn contains(&self, e: &ElementRef) -> bool {
        self.0.binary_search(e).is_ok()
    }

    pub fn insert(&mut self, e: ElementRef) -> bool {
        match self.0.binary_search(&e) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, e);
                true
            }
        }
    }

    pub fn with(&self, e: ElementRef) -> Self {
        let mut out = self.clone();
        out.insert(e);
        out
    }

    pub fn union(&self, other: &ElementSet) -> Self {
        Self::from_elements(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn difference(&self, other: &ElementSet) -> Self {
        Self(
            self.0
                .iter()
                .filter(|e| !other.contains(e))
                .copied()
                .collect(),
        )
    }

    pub fn intersection(&self, other: &ElementSet) -> Self {
        Self(
            self.0
                .iter()
                .filter(|e| other.contains(e))
                .copied()
                .collect(),
        )
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.0.iter().all(|e| other.contains(e))
    }

    pub fn is_disjoint(&self, other: &ElementSet) -> bool {
        self.0.iter().all(|e| !other.contains(e))
    }

    pub fn ids(&self) -> Vec<usize> {
        self.0.iter().map(|e| e.global_id).collect()
    }
}

impl FromIterator<ElementRef> for ElementSet {
    fn from_iter<I: IntoIterator<Item = ElementRef>>(iter: I) -> Self {
        Self::from_elements(iter)
    }
}

impl<'a> IntoIterator for &'a ElementSet {
    type Item = &'a ElementRef;
    type IntoIter = std::slice::Iter<'a, ElementRef>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", e.global_id)?;
        }
        write!(f, "}}")
    }
}

/// The per-step ground sets `V_1, ..., V_T`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundSets {
    per_step: Vec<Vec<ElementRef>>,
    by_id: BTreeMap<usize, ElementRef>,
}

impl GroundSets {
    /// Builds ground sets with contiguous global ids: step 1 gets `0..sizes[0]`, and so on.
    pub fn new(sizes: &[usize]) -> Result<Self> {
        let mut next = 0;
        let per_step = sizes
            .iter()
            .enumerate()
            .map(|(t, &n)| {
                (0..n)
                    .map(|i| {
                        let e = ElementRef {
                            step: t + 1,
                            local_index: i,
                            global_id: next,
                        };
                        next += 1;
                        e
                    })
                    .collect()
            })
            .collect();
        Self::from_steps(per_step)
    }

    pub fn uniform(horizon: usize, per_step: usize) -> Result<Self> {
        Self::new(&vec![per_step; horizon])
    }

    pub fn from_steps(per_step: Vec<Vec<ElementRef>>) -> Result<Self> {
        if per_step.is_empty() {
            return Err(Error::Structure("horizon must be positive".into()));
        }
        let mut by_id = BTreeMap::new();
        for (t, elems) in per_step.iter().enumerate() {
            if elems.is_empty() {
                return Err(Error::Structure(format!("ground set V_{} is empty", t + 1)));
            }
            for (i, e) in elems.iter().enumerate() {
                if e.step != t + 1 || e.local_index != i {
                    return Err(Error::Structure(format!(
                        "element {e} listed at step {} position {i}",
                        t + 1
                    )));
                }
                if by_id.insert(e.global_id, *e).is_some() {
                    return Err(Error::Structure(format!(
                        "global id {} appears more than once",
                        e.global_id
                    )));
                }
            }
        }
        Ok(Self { per_step, by_id })
    }

    pub fn horizon(&self) -> usize {
        self.per_step.len()
    }

    /// `V_t` for 1-based `t`.
    pub fn step(&self, t: usize) -> &[ElementRef] {
        &self.per_step[t - 1]
    }

    pub fn step_set(&self, t: usize) -> ElementSet {
        ElementSet::from_elements(self.step(t).iter().copied())
    }

    pub fn all(&self) -> impl Iterator<Item = &ElementRef> {
        self.per_step.iter().flatten()
    }

    pub fn all_set(&self) -> ElementSet {
        self.all().copied().collect()
    }

    pub fn total_len(&self) -> usize {
        self.by_id.len()
    }

    pub fn lookup(&self, global_id: usize) -> Option<ElementRef> {
        self.by_id.get(&global_id).copied()
    }

    pub fn contains(&self, e: &ElementRef) -> bool {
        self.by_id.get(&e.global_id) == Some(e)
    }

    /// Ground sets of the first `t` steps.
    pub fn prefix(&self, t: usize) -> Result<Self> {
        if t == 0 || t > self.horizon() {
            return Err(Error::Argument(format!(
                "prefix length {t} outside 1..={}",
                self.horizon()
            )));
        }
        Self::from_steps(self.per_step[..t].to_vec())
    }
}

/// Selection sizes `alpha_t` and removal sizes `beta_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budgets {
    alpha: Vec<usize>,
    beta: Vec<usize>,
}

impl Budgets {
    pub fn new(alpha: Vec<usize>, beta: Vec<usize>, grounds: &GroundSets) -> Result<Self> {
        let horizon = grounds.horizon();
        if alpha.len() != horizon || beta.len() != horizon {
            return Err(Error::Argument(format!(
                "budgets have lengths {}/{} for horizon {horizon}",
                alpha.len(),
                beta.len()
            )));
        }
        for t in 1..=horizon {
            let (a, b, n) = (alpha[t - 1], beta[t - 1], grounds.step(t).len());
            if !(b <= a && a <= n) {
                return Err(Error::Argument(format!(
                    "step {t}: need 0 <= beta ({b}) <= alpha ({a}) <= |V_t| ({n})"
                )));
            }
        }
        Ok(Self { alpha, beta })
    }

    /// The same `alpha` and `beta` at every step.
    pub fn uniform(alpha: usize, beta: usize, grounds: &GroundSets) -> Result<Self> {
        let horizon = grounds.horizon();
        Self::new(vec![alpha; horizon], vec![beta; horizon], grounds)
    }

    pub fn horizon(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self, t: usize) -> usize {
        self.alpha[t - 1]
    }

    pub fn beta(&self, t: usize) -> usize {
        self.beta[t - 1]
    }

    pub fn prefix(&self, t: usize) -> Self {
        Self {
            alpha: self.alpha[..t].to_vec(),
            beta: self.beta[..t].to_vec(),
        }
    }
}

/// The tuple `(X_1, ..., X_l)`; steps after `l` are implicitly empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SelectionSequence {
    sets: Vec<ElementSet>,
}

impl SelectionSequence {
    pub fn new() -> Self {
        Self { sets: Vec::new() }
    }

    /// `len` empty steps.
    pub fn empty(len: usize) -> Self {
        Self {
            sets: vec![ElementSet::new(); len],
        }
    }

    pub fn from_sets(sets: Vec<ElementSet>) -> Self {
        Self { sets }
    }

    /// Groups arbitrary elements by step into a sequence of length `horizon`.
    pub fn from_elements<'a, I>(horizon: usize, elements: I) -> Self
    where
        I: IntoIterator<Item = &'a ElementRef>,
    {
        let mut sets = vec![Vec::new(); horizon];
        for e in elements {
            sets[e.step - 1].push(*e);
        }
        Self {
            sets: sets.into_iter().map(ElementSet::from_elements).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    /// True when no step holds any element.
    pub fn is_empty(&self) -> bool {
        self.sets.iter().all(ElementSet::is_empty)
    }

    pub fn sets(&self) -> &[ElementSet] {
        &self.sets
    }

    /// The set at 1-based step `t`.
    pub fn step(&self, t: usize) -> &ElementSet {
        &self.sets[t - 1]
    }

    pub fn push(&mut self, set: ElementSet) {
        self.sets.push(set);
    }

    pub fn pop(&mut self) -> Option<ElementSet> {
        self.sets.pop()
    }

    pub fn extended(&self, set: ElementSet) -> Self {
        let mut out = self.clone();
        out.push(set);
        out
    }

    /// Merges `extra` into the last step.
    pub fn with_merged_last(&self, extra: &ElementSet) -> Self {
        let mut out = self.clone();
        if let Some(last) = out.sets.last_mut() {
            *last = last.union(extra);
        }
        out
    }

    pub fn padded(&self, len: usize) -> Self {
        let mut out = self.clone();
        while out.sets.len() < len {
            out.sets.push(ElementSet::new());
        }
        out
    }

    pub fn prefix(&self, len: usize) -> Self {
        Self {
            sets: self.sets[..len].to_vec(),
        }
    }

    pub fn element_count(&self) -> usize {
        self.sets.iter().map(ElementSet::len).sum()
    }

    pub fn union_all(&self) -> ElementSet {
        self.sets.iter().flat_map(|s| s.iter().copied()).collect()
    }
}

/// A raw set-function evaluator. Implementations must be deterministic and thread safe.
pub trait SetFunction: Send + Sync {
    fn value(&self, seq: &SelectionSequence) -> Result<f64>;

    /// The cost `c(empty)` at sequence length `len` for objectives defined as `f = c(empty) - c`.
    fn baseline_cost(&self, _len: usize) -> Option<f64> {
        None
    }
}

impl<F> SetFunction for F
where
    F: Fn(&SelectionSequence) -> f64 + Send + Sync,
{
    fn value(&self, seq: &SelectionSequence) -> Result<f64> {
        Ok(self(seq))
    }
}

/// Properties the objective claims to have. Monotonicity is mandatory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Claims {
    pub monotone: bool,
    pub submodular: bool,
}

impl Claims {
    pub const SUBMODULAR: Claims = Claims {
        monotone: true,
        submodular: true,
    };
    pub const MONOTONE: Claims = Claims {
        monotone: true,
        submodular: false,
    };
}

/// Oracle access to a normalized non-decreasing set function, with call accounting.
///
/// The wrapped evaluator is shifted so that the empty sequence evaluates to exactly zero.
/// `eval_count` counts logical oracle queries and is safe to bump from several threads;
/// [`ObjectiveHandle::fork`] gives a worker its own counter over the same evaluator.
pub struct ObjectiveHandle {
    name: String,
    grounds: Arc<GroundSets>,
    evaluator: Arc<dyn SetFunction>,
    claims: Claims,
    offset: f64,
    eval_count: AtomicU64,
}

impl fmt::Debug for ObjectiveHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveHandle")
            .field("name", &self.name)
            .field("claims", &self.claims)
            .field("offset", &self.offset)
            .field("eval_count", &self.eval_count())
            .finish()
    }
}

impl ObjectiveHandle {
    pub fn new(
        name: impl Into<String>,
        grounds: Arc<GroundSets>,
        evaluator: Arc<dyn SetFunction>,
        claims: Claims,
    ) -> Result<Self> {
        if !claims.monotone {
            return Err(Error::Argument(
                "objectives must be claimed non-decreasing".into(),
            ));
        }
        let offset = evaluator.value(&SelectionSequence::new())?;
        if !offset.is_finite() {
            return Err(Error::ObjectiveContract(format!(
                "evaluator returned {offset} on the empty sequence"
            )));
        }
        Ok(Self {
            name: name.into(),
            grounds,
            evaluator,
            claims,
            offset,
            eval_count: AtomicU64::new(0),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn claims(&self) -> Claims {
        self.claims
    }

    pub fn grounds(&self) -> &GroundSets {
        &self.grounds
    }

    pub fn grounds_arc(&self) -> Arc<GroundSets> {
        Arc::clone(&self.grounds)
    }

    pub fn eval_count(&self) -> u64 {
        self.eval_count.load(AtomicOrdering::Relaxed)
    }

    pub fn reset_count(&self) {
        self.eval_count.store(0, AtomicOrdering::Relaxed);
    }

    /// Same evaluator, fresh call counter.
    pub fn fork(&self) -> Self {
        Self {
            name: self.name.clone(),
            grounds: Arc::clone(&self.grounds),
            evaluator: Arc::clone(&self.evaluator),
            claims: self.claims,
            offset: self.offset,
            eval_count: AtomicU64::new(0),
        }
    }

    fn check_structure(&self, seq: &SelectionSequence) -> Result<()> {
        if seq.len() > self.grounds.horizon() {
            return Err(Error::Structure(format!(
                "sequence of length {} exceeds horizon {}",
                seq.len(),
                self.grounds.horizon()
            )));
        }
        for (i, set) in seq.sets().iter().enumerate() {
            for e in set {
                if e.step != i + 1 {
                    return Err(Error::Structure(format!(
                        "element {e} placed at step {}",
                        i + 1
                    )));
                }
                if !self.grounds.contains(e) {
                    return Err(Error::Structure(format!(
                        "element {e} is not in the ground sets"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `f(seq)`; exactly one oracle call.
    pub fn evaluate(&self, seq: &SelectionSequence) -> Result<f64> {
        self.check_structure(seq)?;
        self.eval_count.fetch_add(1, AtomicOrdering::Relaxed);
        let raw = self.evaluator.value(seq)?;
        let value = raw - self.offset;
        if value.is_nan() || value < -NEGATIVE_VALUE_TOLERANCE {
            return Err(Error::ObjectiveContract(format!(
                "{} returned {value} (must be finite and non-negative)",
                self.name
            )));
        }
        Ok(value.max(0.0))
    }

    /// `f(base with extra merged into its last step) - f(base)`; exactly two oracle calls.
    pub fn marginal(&self, base: &SelectionSequence, extra: &ElementSet) -> Result<f64> {
        let step = base.len();
        if step == 0 {
            return Err(Error::Structure(
                "marginal needs a base sequence of length >= 1".into(),
            ));
        }
        if let Some(e) = extra.iter().find(|e| e.step != step) {
            return Err(Error::Structure(format!(
                "extra element {e} does not belong to step {step}"
            )));
        }
        let with = self.evaluate(&base.with_merged_last(extra))?;
        let without = self.evaluate(base)?;
        Ok(with - without)
    }

    /// Evaluates a plain subset of `V = V_1 ∪ ... ∪ V_T` as a full-horizon sequence.
    pub fn evaluate_set(&self, elements: &ElementSet) -> Result<f64> {
        let seq = SelectionSequence::from_elements(self.grounds.horizon(), elements);
        self.evaluate(&seq)
    }

    /// The plotted error `c(X) = c(empty) - f(X)` at sequence length `len`.
    ///
    /// Objectives without an underlying cost use `c(empty) = 0`, i.e. `c = -f`.
    pub fn cost(&self, len: usize, value: f64) -> f64 {
        self.evaluator.baseline_cost(len).unwrap_or(0.0) - value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modular(grounds: &Arc<GroundSets>, weights: Vec<f64>) -> ObjectiveHandle {
        let f = move |seq: &SelectionSequence| -> f64 {
            seq.sets()
                .iter()
                .flat_map(|s| s.iter())
                .map(|e| weights[e.global_id])
                .sum()
        };
        ObjectiveHandle::new(
            "modular",
            Arc::clone(grounds),
            Arc::new(f),
            Claims::SUBMODULAR,
        )
        .unwrap()
    }

    #[test]
    fn ground_ids_are_contiguous_and_disjoint() {
        let g = GroundSets::new(&[3, 2]).unwrap();
        assert_eq!(g.horizon(), 2);
        assert_eq!(g.total_len(), 5);
        assert_eq!(g.step(2)[0].global_id, 3);
        assert_eq!(g.step(2)[0].step, 2);
        assert!(g.step_set(1).is_disjoint(&g.step_set(2)));
    }

    #[test]
    fn ground_sets_reject_empty_steps_and_duplicates() {
        assert!(matches!(GroundSets::new(&[2, 0]), Err(Error::Structure(_))));
        let e = ElementRef {
            step: 1,
            local_index: 0,
            global_id: 7,
        };
        let f = ElementRef {
            step: 2,
            local_index: 0,
            global_id: 7,
        };
        assert!(GroundSets::from_steps(vec![vec![e], vec![f]]).is_err());
    }

    #[test]
    fn budgets_validate_ordering() {
        let g = GroundSets::new(&[3, 3]).unwrap();
        assert!(Budgets::new(vec![2, 3], vec![1, 3], &g).is_ok());
        assert!(Budgets::new(vec![2, 4], vec![1, 0], &g).is_err());
        assert!(Budgets::new(vec![1, 1], vec![2, 0], &g).is_err());
        assert!(Budgets::new(vec![1], vec![0], &g).is_err());
    }

    #[test]
    fn evaluate_counts_and_normalizes() {
        let g = Arc::new(GroundSets::new(&[2]).unwrap());
        let obj = modular(&g, vec![3.0, 2.0]);
        assert_eq!(obj.evaluate(&SelectionSequence::new()).unwrap(), 0.0);
        let seq = SelectionSequence::from_sets(vec![g.step_set(1)]);
        assert_eq!(obj.evaluate(&seq).unwrap(), 5.0);
        assert_eq!(obj.eval_count(), 2);
    }

    #[test]
    fn normalization_shifts_raw_offset() {
        let g = Arc::new(GroundSets::new(&[2]).unwrap());
        let f = |seq: &SelectionSequence| 10.0 + seq.element_count() as f64;
        let obj =
            ObjectiveHandle::new("shifted", g.clone(), Arc::new(f), Claims::SUBMODULAR).unwrap();
        assert_eq!(obj.evaluate(&SelectionSequence::empty(1)).unwrap(), 0.0);
        assert_eq!(obj.evaluate_set(&g.step_set(1)).unwrap(), 2.0);
    }

    #[test]
    fn marginal_uses_two_calls() {
        let g = Arc::new(GroundSets::new(&[2]).unwrap());
        let obj = modular(&g, vec![3.0, 2.0]);
        let a = g.step(1)[0];
        let b = g.step(1)[1];
        let base = SelectionSequence::from_sets(vec![ElementSet::singleton(a)]);
        assert_eq!(obj.marginal(&base, &ElementSet::singleton(b)).unwrap(), 2.0);
        assert_eq!(obj.eval_count(), 2);
        assert_eq!(obj.marginal(&base, &ElementSet::new()).unwrap(), 0.0);
        assert_eq!(obj.eval_count(), 4);
    }

    #[test]
    fn structural_errors_are_reported() {
        let g = Arc::new(GroundSets::new(&[2, 2]).unwrap());
        let obj = modular(&g, vec![1.0; 4]);
        let late = g.step(2)[0];
        let wrong_step = SelectionSequence::from_sets(vec![ElementSet::singleton(late)]);
        assert!(matches!(
            obj.evaluate(&wrong_step),
            Err(Error::Structure(_))
        ));
        assert!(matches!(
            obj.evaluate(&SelectionSequence::empty(3)),
            Err(Error::Structure(_))
        ));
        let foreign = ElementRef {
            step: 1,
            local_index: 0,
            global_id: 99,
        };
        let seq = SelectionSequence::from_sets(vec![ElementSet::singleton(foreign)]);
        assert!(matches!(obj.evaluate(&seq), Err(Error::Structure(_))));
        // structural failures do not count as oracle calls
        assert_eq!(obj.eval_count(), 0);
    }

    #[test]
    fn contract_errors_on_negative_or_nan() {
        let g = Arc::new(GroundSets::new(&[2]).unwrap());
        let neg = |seq: &SelectionSequence| -(seq.element_count() as f64);
        let obj =
            ObjectiveHandle::new("neg", g.clone(), Arc::new(neg), Claims::SUBMODULAR).unwrap();
        assert!(matches!(
            obj.evaluate_set(&g.step_set(1)),
            Err(Error::ObjectiveContract(_))
        ));
        let nan = |seq: &SelectionSequence| {
            if seq.is_empty() {
                0.0
            } else {
                f64::NAN
            }
        };
        let obj =
            ObjectiveHandle::new("nan", g.clone(), Arc::new(nan), Claims::SUBMODULAR).unwrap();
        assert!(matches!(
            obj.evaluate_set(&g.step_set(1)),
            Err(Error::ObjectiveContract(_))
        ));
    }

    #[test]
    fn non_monotone_claim_is_rejected() {
        let g = Arc::new(GroundSets::new(&[1]).unwrap());
        let f = |_: &SelectionSequence| 0.0;
        let claims = Claims {
            monotone: false,
            submodular: true,
        };
        assert!(ObjectiveHandle::new("x", g, Arc::new(f), claims).is_err());
    }

    #[test]
    fn element_set_algebra() {
        let g = GroundSets::new(&[4]).unwrap();
        let v = g.step(1);
        let a: ElementSet = [v[2], v[0], v[2]].into_iter().collect();
        assert_eq!(a.ids(), vec![0, 2]);
        let b: ElementSet = [v[1], v[2]].into_iter().collect();
        assert_eq!(a.union(&b).ids(), vec![0, 1, 2]);
        assert_eq!(a.difference(&b).ids(), vec![0]);
        assert_eq!(a.intersection(&b).ids(), vec![2]);
        assert!(!a.is_disjoint(&b));
        assert!(a.intersection(&b).is_subset(&a));
    }

    #[test]
    fn sequence_grouping_and_padding() {
        let g = GroundSets::new(&[2, 2]).unwrap();
        let all = g.all_set();
        let seq = SelectionSequence::from_elements(2, &all);
        assert_eq!(seq.step(1).ids(), vec![0, 1]);
        assert_eq!(seq.step(2).ids(), vec![2, 3]);
        let short = seq.prefix(1).padded(2);
        assert!(short.step(2).is_empty());
        assert_eq!(short.element_count(), 2);
    }
}
