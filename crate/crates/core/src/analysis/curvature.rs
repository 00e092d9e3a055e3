//! Curvature `κ_f` and total curvature `c_f` over a set `V` of elements.
//!
//! Both views evaluate plain subsets of `V` as full-horizon sequences.

use rand::Rng;

use crate::error::{Error, Result};
use crate::problem::{ElementRef, ElementSet, ObjectiveHandle};

/// Largest `|V|` for exact total curvature.
pub const EXACT_TOTAL_CAP: usize = 10;

/// Denominators at or below this are treated as zero.
const ZERO_MARGINAL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvatureKind {
    Kappa,
    Total,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvatureMode {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport {
    pub value: f64,
    pub kind: CurvatureKind,
    pub mode: CurvatureMode,
    pub sample_count: u64,
    pub certified: bool,
}

/// `f` on every subset of a small element list, indexed by bitmask over `elements`.
#[derive(Clone, Debug)]
pub struct SubsetTable {
    elements: Vec<ElementRef>,
    values: Vec<f64>,
}

impl SubsetTable {
    /// Costs `2^|V|` oracle calls.
    pub fn build(obj: &ObjectiveHandle, v: &ElementSet, cap: usize) -> Result<Self> {
        let n = v.len();
        if n > cap {
            return Err(Error::Capacity {
                what: "subset table",
                required: 1u128 << n.min(127),
                limit: 1u128 << cap.min(127),
            });
        }
        let elements = v.as_slice().to_vec();
        let mut values = Vec::with_capacity(1 << n);
        for mask in 0..1usize << n {
            values.push(obj.evaluate_set(&Self::set_of(&elements, mask))?);
        }
        Ok(Self { elements, values })
    }

    fn set_of(elements: &[ElementRef], mask: usize) -> ElementSet {
        elements
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| *e)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ElementRef] {
        &self.elements
    }

    pub fn value(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    pub fn set(&self, mask: usize) -> ElementSet {
        Self::set_of(&self.elements, mask)
    }

    pub fn full_mask(&self) -> usize {
        (1 << self.elements.len()) - 1
    }
}

fn check_kappa_inputs(obj: &ObjectiveHandle, v: &ElementSet) -> Result<()> {
    if !obj.claims().submodular {
        return Err(Error::Argument(format!(
            "{} does not claim submodularity; use total curvature instead",
            obj.name()
        )));
    }
    if v.is_empty() {
        return Err(Error::Argument(
            "curvature needs a non-empty element set".into(),
        ));
    }
    Ok(())
}

/// `1 - min [f(V) - f(V \ {v})] / f(v)` over the probed elements `v`.
fn kappa_over<'a>(
    obj: &ObjectiveHandle,
    v: &ElementSet,
    probes: impl IntoIterator<Item = &'a ElementRef>,
) -> Result<f64> {
    let full = obj.evaluate_set(v)?;
    let mut min_ratio = f64::INFINITY;
    for e in probes {
        let single = obj.evaluate_set(&ElementSet::singleton(*e))?;
        if single <= 0.0 {
            return Err(Error::Argument(format!(
                "f({{{e}}}) = 0; drop zero-value elements before computing curvature"
            )));
        }
        let without = obj.evaluate_set(&v.difference(&ElementSet::singleton(*e)))?;
        min_ratio = min_ratio.min((full - without).max(0.0) / single);
    }
    Ok((1.0 - min_ratio).clamp(0.0, 1.0))
}

/// `κ_f = 1 - min_v [f(V) - f(V \ {v})] / f(v)`; costs `2|V| + 1` oracle calls.
pub fn kappa(obj: &ObjectiveHandle, v: &ElementSet) -> Result<CurvatureReport> {
    check_kappa_inputs(obj, v)?;
    Ok(CurvatureReport {
        value: kappa_over(obj, v, v)?,
        kind: CurvatureKind::Kappa,
        mode: CurvatureMode::Exact,
        sample_count: v.len() as u64,
        certified: true,
    })
}

/// κ_f with the minimum taken over `samples` elements drawn from `V` without replacement.
///
/// Costs `2 min(samples, |V|) + 1` calls and under-estimates κ_f unless every element is drawn.
pub fn kappa_sampled<R: Rng + ?Sized>(
    obj: &ObjectiveHandle,
    v: &ElementSet,
    samples: u64,
    rng: &mut R,
) -> Result<CurvatureReport> {
    check_kappa_inputs(obj, v)?;
    let elements = v.as_slice();
    let k = (samples.min(elements.len() as u64)) as usize;
    if k == 0 {
        return Err(Error::Argument(
            "sampled curvature needs samples >= 1".into(),
        ));
    }
    let drawn: Vec<ElementRef> = rand::seq::index::sample(rng, elements.len(), k)
        .iter()
        .map(|i| elements[i])
        .collect();
    Ok(CurvatureReport {
        value: kappa_over(obj, v, &drawn)?,
        kind: CurvatureKind::Kappa,
        mode: CurvatureMode::Sampled,
        sample_count: k as u64,
        certified: k == elements.len(),
    })
}

/// Exact `c_f` from a subset table: per element, the smallest marginal over the largest one.
pub fn total_curvature_from_table(table: &SubsetTable) -> Result<f64> {
    let full = table.full_mask();
    let mut min_ratio = f64::INFINITY;
    for i in 0..table.len() {
        let bit = 1 << i;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for a in (0..=full).filter(|a| a & bit == 0) {
            let m = (table.value(a | bit) - table.value(a)).max(0.0);
            lo = lo.min(m);
            hi = hi.max(m);
        }
        if hi > ZERO_MARGINAL {
            min_ratio = min_ratio.min(lo / hi);
        }
    }
    if min_ratio.is_infinite() {
        return Err(Error::Degenerate(
            "every marginal is zero, total curvature is undefined".into(),
        ));
    }
    Ok((1.0 - min_ratio).clamp(0.0, 1.0))
}

/// `c_f = 1 - min_v min_{A,B ⊆ V\{v}} f(v|A) / f(v|B)`.
///
/// Exact mode costs `2^|V|` calls and needs `|V| <= EXACT_TOTAL_CAP`. Sampled mode draws
/// `sample_budget` triples `(v, A, B)` with each other element joining `A` and `B` independently
/// with probability 1/2, at 4 calls per triple; the result under-estimates `c_f`.
pub fn total_curvature<R: Rng + ?Sized>(
    obj: &ObjectiveHandle,
    v: &ElementSet,
    mode: CurvatureMode,
    sample_budget: u64,
    rng: &mut R,
) -> Result<CurvatureReport> {
    if v.is_empty() {
        return Err(Error::Argument(
            "curvature needs a non-empty element set".into(),
        ));
    }
    match mode {
        CurvatureMode::Exact => {
            let table = SubsetTable::build(obj, v, EXACT_TOTAL_CAP)?;
            Ok(CurvatureReport {
                value: total_curvature_from_table(&table)?,
                kind: CurvatureKind::Total,
                mode,
                sample_count: 1 << v.len(),
                certified: true,
            })
        }
        CurvatureMode::Sampled => {
            let elements = v.as_slice();
            let mut min_ratio = f64::INFINITY;
            for _ in 0..sample_budget {
                let pick = elements[rng.random_range(0..elements.len())];
                let mut a = ElementSet::new();
                let mut b = ElementSet::new();
                for e in elements.iter().filter(|e| **e != pick) {
                    if rng.random_bool(0.5) {
                        a.insert(*e);
                    }
                    if rng.random_bool(0.5) {
                        b.insert(*e);
                    }
                }
                let num = obj.evaluate_set(&a.with(pick))? - obj.evaluate_set(&a)?;
                let den = obj.evaluate_set(&b.with(pick))? - obj.evaluate_set(&b)?;
                if den > ZERO_MARGINAL {
                    min_ratio = min_ratio.min(num.max(0.0) / den);
                }
            }
            let value = if min_ratio.is_finite() {
                (1.0 - min_ratio).clamp(0.0, 1.0)
            } else {
                0.0
            };
            Ok(CurvatureReport {
                value,
                kind: CurvatureKind::Total,
                mode,
                sample_count: sample_budget,
                certified: false,
            })
        }
    }
}
