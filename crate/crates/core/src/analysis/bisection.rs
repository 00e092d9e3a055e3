//! Regularized removal `min_B f(history, A \ B) + λ|B|` and the bisection search for the
//! penalty at which the minimizer drops below `β` elements.

use crate::error::{Error, Result};
use crate::problem::{ElementRef, ElementSet, ObjectiveHandle, SelectionSequence};

/// Largest `|A_t|` the exhaustive landscape accepts (`2^20` evaluations).
pub const LANDSCAPE_CAP: usize = 20;

pub const DEFAULT_EPSILON: f64 = 1e-6;

/// `g(B) = f(history, A \ B)` for every `B ⊆ A`, indexed by bitmask over `A`'s elements.
#[derive(Clone, Debug)]
pub struct RemovalLandscape {
    elements: Vec<ElementRef>,
    values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularizedMin {
    /// `B̂(λ)`.
    pub removed: ElementSet,
    /// `f̂(λ) = f(history, A \ B̂(λ))`.
    pub f_hat: f64,
    /// `f̂(λ) + λ|B̂(λ)|`.
    pub objective: f64,
}

impl RemovalLandscape {
    /// Costs `2^|A|` oracle calls.
    pub fn build(
        obj: &ObjectiveHandle,
        history: &SelectionSequence,
        selection: &ElementSet,
    ) -> Result<Self> {
        let n = selection.len();
        if n > LANDSCAPE_CAP {
            return Err(Error::Capacity {
                what: "regularized removal",
                required: 1u128 << n.min(127),
                limit: 1u128 << LANDSCAPE_CAP,
            });
        }
        let t = history.len() + 1;
        if let Some(e) = selection.iter().find(|e| e.step != t) {
            return Err(Error::Structure(format!(
                "selected element {e} does not belong to step {t}"
            )));
        }
        let elements = selection.as_slice().to_vec();
        let mut values = Vec::with_capacity(1 << n);
        for mask in 0..1usize << n {
            let survivors = selection.difference(&mask_set(&elements, mask));
            values.push(obj.evaluate(&history.extended(survivors))?);
        }
        Ok(Self { elements, values })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `g(B)` for the removal encoded by `mask`.
    pub fn value(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    pub fn removal(&self, mask: usize) -> ElementSet {
        mask_set(&self.elements, mask)
    }

    /// `g(empty) = f(history, A)`.
    pub fn full_value(&self) -> f64 {
        self.values[0]
    }

    /// Exact minimizer of `g(B) + λ|B|`; ties go to the smallest `|B|`, then the
    /// lexicographically smallest id vector.
    pub fn minimize(&self, lambda: f64) -> RegularizedMin {
        let mut best: Option<(f64, usize, Vec<usize>, usize)> = None;
        for (mask, g) in self.values.iter().enumerate() {
            let size = mask.count_ones() as usize;
            let objective = g + lambda * size as f64;
            let replace = match &best {
                None => true,
                Some((o, s, ids, _)) => {
                    objective < *o
                        || (objective == *o
                            && (size < *s || (size == *s && mask_ids(&self.elements, mask) < *ids)))
                }
            };
            if replace {
                best = Some((objective, size, mask_ids(&self.elements, mask), mask));
            }
        }
        let (objective, _, _, mask) = best.expect("the landscape has at least the empty removal");
        RegularizedMin {
            removed: self.removal(mask),
            f_hat: self.values[mask],
            objective,
        }
    }
}

fn mask_set(elements: &[ElementRef], mask: usize) -> ElementSet {
    elements
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| *e)
        .collect()
}

fn mask_ids(elements: &[ElementRef], mask: usize) -> Vec<usize> {
    elements
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| e.global_id)
        .collect()
}

pub fn regularized_min_removal(
    obj: &ObjectiveHandle,
    history: &SelectionSequence,
    selection: &ElementSet,
    lambda: f64,
) -> Result<RegularizedMin> {
    if !(lambda >= 0.0) {
        return Err(Error::Argument(format!(
            "penalty {lambda} must be non-negative"
        )));
    }
    Ok(RemovalLandscape::build(obj, history, selection)?.minimize(lambda))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BisectionState {
    pub l: f64,
    pub u: f64,
    /// `λ_t = l` at termination.
    pub lambda_t: f64,
    /// `B̂(λ_t)`.
    pub b_hat: ElementSet,
    /// `f̂_t(λ_t)`.
    pub f_hat: f64,
    pub epsilon: f64,
    pub u0: f64,
    pub iterations: usize,
    /// Every penalty probed, with the size of its minimizer.
    pub visited: Vec<(f64, usize)>,
}

/// Bisection on `λ` over a prebuilt landscape.
///
/// Keeps `|B̂(u)| < β`; moves `l` up whenever `|B̂(λ)| >= β`; stops once `u - l <= ε` and
/// returns `λ_t = l`.
pub fn bisection_on(
    landscape: &RemovalLandscape,
    beta: usize,
    u0: Option<f64>,
    epsilon: Option<f64>,
) -> Result<BisectionState> {
    if beta == 0 {
        return Err(Error::Argument("bisection needs beta >= 1".into()));
    }
    let epsilon = epsilon.unwrap_or(DEFAULT_EPSILON);
    if !(epsilon > 0.0) {
        return Err(Error::Argument(format!(
            "epsilon {epsilon} must be positive"
        )));
    }
    let u0 = u0.unwrap_or(landscape.full_value() + 1.0);
    let at_u0 = landscape.minimize(u0);
    if !(u0 > 0.0) || at_u0.removed.len() >= beta {
        return Err(Error::Argument(format!(
            "u0 = {u0} gives |B̂(u0)| = {} >= beta = {beta}; enlarge u0",
            at_u0.removed.len()
        )));
    }
    let mut visited = vec![(u0, at_u0.removed.len())];
    let (mut l, mut u) = (0.0f64, u0);
    let mut lambda = (l + u) / 2.0;
    let mut iterations = 0;
    while u - l > epsilon {
        let size = landscape.minimize(lambda).removed.len();
        visited.push((lambda, size));
        if size < beta {
            u = lambda;
        } else {
            l = lambda;
        }
        lambda = (l + u) / 2.0;
        iterations += 1;
    }
    let at_l = landscape.minimize(l);
    Ok(BisectionState {
        l,
        u,
        lambda_t: l,
        b_hat: at_l.removed,
        f_hat: at_l.f_hat,
        epsilon,
        u0,
        iterations,
        visited,
    })
}

/// Builds the landscape (`2^|A|` calls) and bisects. `u0` defaults to `f(history, A) + 1`,
/// `epsilon` to `1e-6`.
pub fn bisection_lambda(
    obj: &ObjectiveHandle,
    history: &SelectionSequence,
    selection: &ElementSet,
    beta: usize,
    u0: Option<f64>,
    epsilon: Option<f64>,
) -> Result<BisectionState> {
    if beta == 0 {
        return Err(Error::Argument("bisection needs beta >= 1".into()));
    }
    let landscape = RemovalLandscape::build(obj, history, selection)?;
    bisection_on(&landscape, beta, u0, epsilon)
}
