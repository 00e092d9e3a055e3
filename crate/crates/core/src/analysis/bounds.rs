//! A priori, a posteriori and pre-failure approximation bounds for RAM.

use std::fmt;

use crate::analysis::curvature::CurvatureReport;
use crate::error::{Error, Result};
use crate::problem::{Budgets, ElementSet, ObjectiveHandle, SelectionSequence};
use crate::solver::greedy_step;
use crate::trace::EpisodeTrace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    AprioriSub,
    AprioriNonsub,
    AposterioriSub,
    AposterioriNonsub,
    PrefailureSub,
    PrefailureNonsub,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::AprioriSub => "apriori_sub",
            BoundKind::AprioriNonsub => "apriori_nonsub",
            BoundKind::AposterioriSub => "aposteriori_sub",
            BoundKind::AposterioriNonsub => "aposteriori_nonsub",
            BoundKind::PrefailureSub => "prefailure_sub",
            BoundKind::PrefailureNonsub => "prefailure_nonsub",
        }
    }

    pub fn is_submodular(self) -> bool {
        matches!(
            self,
            BoundKind::AprioriSub | BoundKind::AposterioriSub | BoundKind::PrefailureSub
        )
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inputs a bound was computed from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundComponents {
    pub curvature_used: f64,
    /// `f(A_{1:t} \ B*_{1:t})` or `f̂_t(λ_t)`; absent for a priori bounds.
    pub ratio_numerator: Option<f64>,
    /// `f(M_{1:t})`; absent for a priori bounds.
    pub ratio_denominator: Option<f64>,
    pub t: usize,
    pub horizon: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: f64,
    pub components: BoundComponents,
    /// False when the curvature behind the bound was sampled.
    pub certified: bool,
}

impl BoundReport {
    /// Re-evaluates the closed form from `components`; always equals `value` bit for bit.
    pub fn recompute(&self) -> f64 {
        formula(self.kind, &self.components)
    }

    /// `num / den` for ratio-based bounds.
    pub fn ratio(&self) -> Option<f64> {
        Some(self.components.ratio_numerator? / self.components.ratio_denominator?)
    }
}

/// `(1 - e^{-κ}) / κ`, with its limit 1 at `κ = 0`.
pub fn greedy_factor(kappa: f64) -> f64 {
    if kappa == 0.0 {
        1.0
    } else {
        -(-kappa).exp_m1() / kappa
    }
}

fn formula(kind: BoundKind, c: &BoundComponents) -> f64 {
    let k = c.curvature_used;
    let ratio = || c.ratio_numerator.unwrap_or(0.0) / c.ratio_denominator.unwrap_or(1.0);
    match kind {
        BoundKind::AprioriSub if c.horizon == 1 => greedy_factor(k) * (1.0 - k),
        BoundKind::AprioriSub => (1.0 - k).powi(4),
        BoundKind::AprioriNonsub if c.horizon == 1 => (1.0 - k).powi(3),
        BoundKind::AprioriNonsub => (1.0 - k).powi(5),
        BoundKind::AposterioriSub | BoundKind::PrefailureSub if c.t == 1 => {
            greedy_factor(k) * ratio()
        }
        BoundKind::AposterioriSub | BoundKind::PrefailureSub => ratio() / (1.0 + k),
        BoundKind::AposterioriNonsub | BoundKind::PrefailureNonsub => (1.0 - k) * ratio(),
    }
}

fn check_curvature(value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Argument(format!("curvature {value} outside [0, 1]")))
    }
}

fn build(kind: BoundKind, components: BoundComponents, certified: bool) -> BoundReport {
    BoundReport {
        kind,
        value: formula(kind, &components),
        components,
        certified,
    }
}

/// A priori guarantee on `f(RAM survivors) / f*`, before any removal is observed.
pub fn apriori_bound(
    submodular: bool,
    curvature: &CurvatureReport,
    horizon: usize,
) -> Result<BoundReport> {
    check_curvature(curvature.value)?;
    if horizon == 0 {
        return Err(Error::Argument("horizon must be positive".into()));
    }
    let kind = if submodular {
        BoundKind::AprioriSub
    } else {
        BoundKind::AprioriNonsub
    };
    let components = BoundComponents {
        curvature_used: curvature.value,
        ratio_numerator: None,
        ratio_denominator: None,
        t: horizon,
        horizon,
    };
    Ok(build(kind, components, curvature.certified))
}

fn ratio_bound(
    kind: BoundKind,
    numerator: f64,
    reference_value: f64,
    curvature: &CurvatureReport,
    t: usize,
    horizon: usize,
) -> Result<BoundReport> {
    check_curvature(curvature.value)?;
    if t == 0 || t > horizon {
        return Err(Error::Argument(format!("step {t} outside 1..={horizon}")));
    }
    if reference_value <= 0.0 {
        return Err(Error::Degenerate(format!(
            "greedy reference has value {reference_value} at step {t}; the ratio is undefined"
        )));
    }
    let components = BoundComponents {
        curvature_used: curvature.value,
        ratio_numerator: Some(numerator),
        ratio_denominator: Some(reference_value),
        t,
        horizon,
    };
    Ok(build(kind, components, curvature.certified))
}

/// A posteriori guarantee from the observed survivors value and `f(M_{1:t})`.
pub fn aposteriori_from_values(
    submodular: bool,
    survivors_value: f64,
    reference_value: f64,
    curvature: &CurvatureReport,
    t: usize,
    horizon: usize,
) -> Result<BoundReport> {
    let kind = if submodular {
        BoundKind::AposterioriSub
    } else {
        BoundKind::AposterioriNonsub
    };
    ratio_bound(
        kind,
        survivors_value,
        reference_value,
        curvature,
        t,
        horizon,
    )
}

/// Pre-failure estimate from the bisection value `f̂_t(λ_t)` and `f(M_{1:t})`.
pub fn prefailure_from_values(
    submodular: bool,
    f_hat: f64,
    reference_value: f64,
    curvature: &CurvatureReport,
    t: usize,
    horizon: usize,
) -> Result<BoundReport> {
    let kind = if submodular {
        BoundKind::PrefailureSub
    } else {
        BoundKind::PrefailureNonsub
    };
    ratio_bound(kind, f_hat, reference_value, curvature, t, horizon)
}

/// `M_{1:t}`: online greedy over `K_τ = V_τ \ S_{τ,1}` with `δ_τ = α_τ - β_τ`.
pub fn greedy_reference(
    obj: &ObjectiveHandle,
    bait_sets: &[ElementSet],
    budgets: &Budgets,
) -> Result<SelectionSequence> {
    let mut m = SelectionSequence::new();
    for (i, bait) in bait_sets.iter().enumerate() {
        let t = i + 1;
        let k = obj.grounds().step_set(t).difference(bait);
        let delta = budgets.alpha(t) - budgets.beta(t);
        let chosen = greedy_step(obj, &m, &k, delta)?;
        m.push(chosen);
    }
    Ok(m)
}

/// A posteriori bound at step `t` of a RAM trace; `reference` must be `M_{1:t}`.
pub fn aposteriori_bound(
    obj: &ObjectiveHandle,
    trace: &EpisodeTrace,
    t: usize,
    reference: &SelectionSequence,
    curvature: &CurvatureReport,
    submodular: bool,
) -> Result<BoundReport> {
    if reference.len() != t {
        return Err(Error::Argument(format!(
            "reference covers {} steps, expected {t}",
            reference.len()
        )));
    }
    let reference_value = obj.evaluate(reference)?;
    aposteriori_from_values(
        submodular,
        trace.step(t).value_after_removal,
        reference_value,
        curvature,
        t,
        trace.horizon(),
    )
}

/// Pre-failure estimate at step `t` from the bisection value `f̂_t(λ_t)`; `reference` must be `M_{1:t}`.
pub fn prefailure_bound(
    obj: &ObjectiveHandle,
    f_hat: f64,
    t: usize,
    horizon: usize,
    reference: &SelectionSequence,
    curvature: &CurvatureReport,
    submodular: bool,
) -> Result<BoundReport> {
    if reference.len() != t {
        return Err(Error::Argument(format!(
            "reference covers {} steps, expected {t}",
            reference.len()
        )));
    }
    let reference_value = obj.evaluate(reference)?;
    prefailure_from_values(submodular, f_hat, reference_value, curvature, t, horizon)
}
