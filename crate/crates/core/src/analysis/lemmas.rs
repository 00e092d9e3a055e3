//! Executable checks of the curvature inequalities that underpin the bounds.
//!
//! Each check is evaluated with relative tolerance `1e-9`. A failed inequality is reported as a
//! [`Violation`], not as an error.

use itertools::Itertools;
use rand::Rng;

use crate::analysis::bounds::greedy_reference;
use crate::analysis::curvature::SubsetTable;
use crate::error::{Error, Result};
use crate::problem::{Budgets, ElementSet, ObjectiveHandle, SelectionSequence};
use crate::trace::EpisodeTrace;

/// Largest `|V|` for the set checks (the table costs `2^|V|` calls).
pub const LEMMA_TABLE_CAP: usize = 14;
/// Up to this `|V|` every pair `(A, B)` is checked in addition to the random draws.
pub const EXHAUSTIVE_PAIRS_CAP: usize = 6;
/// Cap on the number of feasible `O_{1:T}` enumerated by the sequence checks.
pub const SEQUENCE_ENUM_CAP: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    pub witness: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl Violation {
    /// `lhs - rhs`; negative for a violation.
    pub fn slack(&self) -> f64 {
        self.lhs - self.rhs
    }
}

fn holds(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - 1e-9 * lhs.abs().max(rhs.abs()).max(1.0)
}

struct Recorder {
    violations: Vec<Violation>,
    checked: u64,
}

impl Recorder {
    fn check(&mut self, name: &'static str, lhs: f64, rhs: f64, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !holds(lhs, rhs) {
            self.violations.push(Violation {
                check: name,
                witness: witness(),
                lhs,
                rhs,
            });
        }
    }
}

/// Outcome of a batch of checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LemmaReport {
    pub violations: Vec<Violation>,
    /// Number of inequality instances evaluated.
    pub checked: u64,
}

fn pair_checks(
    table: &SubsetTable,
    singles: &[f64],
    c: f64,
    a: usize,
    b: usize,
    rec: &mut Recorder,
) {
    let f = |m: usize| table.value(m);
    let w = || format!("A={} B={}", table.set(a), table.set(b));
    if a & b == 0 {
        let sum_b: f64 = (0..table.len())
            .filter(|i| b >> i & 1 == 1)
            .map(|i| singles[i])
            .sum();
        rec.check("disjoint_union", f(a | b), (1.0 - c) * (f(a) + f(b)), w);
        rec.check(
            "disjoint_union_singletons",
            f(a | b),
            (1.0 - c) * (f(a) + sum_b),
            w,
        );
        rec.check("singleton_sum", f(a) + sum_b, (1.0 - c) * f(a | b), w);
    }
    if a & !b != 0 {
        rec.check(
            "exchange",
            f(a) + (1.0 - c) * f(b),
            (1.0 - c) * f(a | b) + f(a & b),
            w,
        );
    }
}

/// Checks, for subsets `A, B` of `V` and total curvature `c`:
///
/// * disjoint `A, B`: `f(A ∪ B) >= (1-c)[f(A) + f(B)]`,
///   `f(A ∪ B) >= (1-c)[f(A) + Σ_b f(b)]` and `f(A) + Σ_b f(b) >= (1-c) f(A ∪ B)`;
/// * `A \ B` non-empty: `f(A) + (1-c) f(B) >= (1-c) f(A ∪ B) + f(A ∩ B)`.
///
/// `trials` random pairs are drawn per inequality family; when `|V| <= 6` every pair is also
/// checked.
pub fn check_set_lemmas<R: Rng + ?Sized>(
    obj: &ObjectiveHandle,
    v: &ElementSet,
    c: f64,
    trials: usize,
    rng: &mut R,
) -> Result<LemmaReport> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Argument(format!("curvature {c} outside [0, 1]")));
    }
    let table = SubsetTable::build(obj, v, LEMMA_TABLE_CAP)?;
    let n = table.len();
    let singles: Vec<f64> = (0..n).map(|i| table.value(1 << i)).collect();
    let mut rec = Recorder {
        violations: Vec::new(),
        checked: 0,
    };
    if n <= EXHAUSTIVE_PAIRS_CAP {
        for a in 0..1usize << n {
            for b in 0..1usize << n {
                pair_checks(&table, &singles, c, a, b, &mut rec);
            }
        }
    }
    if n > 0 {
        for _ in 0..trials {
            let (mut a, mut b) = (0usize, 0usize);
            for i in 0..n {
                match rng.random_range(0..3) {
                    0 => a |= 1 << i,
                    1 => b |= 1 << i,
                    _ => {}
                }
            }
            pair_checks(&table, &singles, c, a, b, &mut rec);

            let (a, b) = loop {
                let a: usize = rng.random_range(0..1usize << n);
                let b: usize = rng.random_range(0..1usize << n);
                if a & !b != 0 {
                    break (a, b);
                }
            };
            pair_checks(&table, &singles, c, a, b, &mut rec);
        }
    }
    Ok(LemmaReport {
        violations: rec.violations,
        checked: rec.checked,
    })
}

/// Every `O_{1:T}` with `O_t ⊆ V_t \ S_{t,1}` and `|O_t| <= α_t - β_t`.
fn feasible_sequences(
    obj: &ObjectiveHandle,
    bait: &[ElementSet],
    budgets: &Budgets,
) -> Result<Vec<SelectionSequence>> {
    let mut per_step = Vec::with_capacity(bait.len());
    let mut total: u128 = 1;
    for (i, s1) in bait.iter().enumerate() {
        let t = i + 1;
        let k = obj.grounds().step_set(t).difference(s1);
        let delta = budgets.alpha(t) - budgets.beta(t);
        let options: Vec<ElementSet> = (0..=delta.min(k.len()))
            .flat_map(|size| k.iter().copied().combinations(size))
            .map(ElementSet::from_elements)
            .collect();
        total = total.saturating_mul(options.len() as u128);
        per_step.push(options);
    }
    if total > SEQUENCE_ENUM_CAP {
        return Err(Error::Capacity {
            what: "sequence inequality checks",
            required: total,
            limit: SEQUENCE_ENUM_CAP,
        });
    }
    Ok(per_step
        .into_iter()
        .multi_cartesian_product()
        .map(SelectionSequence::from_sets)
        .collect())
}

/// Checks along a RAM trace with bait sets `S_{t,1}` and greedy sets `S_{t,2}`:
///
/// * `f(S_{1:T,2}) >= (1-c)^2 f(O_{1:T})` for every feasible `O`;
/// * `f(S_{1:T,2}) >= (1-c)^3 f(P_{1:T})` where `P` maximizes `f` over the feasible family;
/// * `f(M_{1:T}) >= (1-c) f(P_{1:T})` for the greedy reference `M`;
/// * `f(P_{1:T}) >= f*`.
///
/// All values are full-horizon evaluations.
pub fn check_sequence_lemmas(
    obj: &ObjectiveHandle,
    budgets: &Budgets,
    trace: &EpisodeTrace,
    c: f64,
    f_star: f64,
) -> Result<LemmaReport> {
    let horizon = trace.horizon();
    let bait = trace.bait_sets(horizon);
    let s2 = SelectionSequence::from_sets(trace.steps.iter().map(|s| s.greedy.clone()).collect());
    let f_s2 = obj.evaluate(&s2)?;
    let mut rec = Recorder {
        violations: Vec::new(),
        checked: 0,
    };
    let mut best: Option<(f64, SelectionSequence)> = None;
    for o in feasible_sequences(obj, &bait, budgets)? {
        let f_o = obj.evaluate(&o)?;
        rec.check("greedy_vs_any", f_s2, (1.0 - c).powi(2) * f_o, || {
            format!(
                "O={:?}",
                o.sets().iter().map(ElementSet::ids).collect::<Vec<_>>()
            )
        });
        if best.as_ref().is_none_or(|(v, _)| f_o > *v) {
            best = Some((f_o, o));
        }
    }
    let (f_p, p) = best.expect("the empty sequence is always feasible");
    let p_ids = || {
        format!(
            "P={:?}",
            p.sets().iter().map(ElementSet::ids).collect::<Vec<_>>()
        )
    };
    rec.check(
        "greedy_vs_local_optimum",
        f_s2,
        (1.0 - c).powi(3) * f_p,
        p_ids,
    );
    let m = greedy_reference(obj, &bait, budgets)?;
    let f_m = obj.evaluate(&m)?;
    rec.check("reference_vs_local_optimum", f_m, (1.0 - c) * f_p, p_ids);
    rec.check("local_optimum_vs_minimax", f_p, f_star, p_ids);
    Ok(LemmaReport {
        violations: rec.violations,
        checked: rec.checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{make_coverage, make_modular, CoverageSpec, ModularSpec};
    use crate::problem::{Claims, GroundSets};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn modular_disjoint_union_is_tight() {
        let g = Arc::new(GroundSets::new(&[4]).unwrap());
        let obj = make_modular(
            g.clone(),
            &ModularSpec {
                weights: vec![1.0, 2.0, 3.0, 4.0],
            },
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = check_set_lemmas(&obj, &g.all_set(), 0.0, 100, &mut rng).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.checked > 0);
        // a curvature that is too small must be caught on a non-modular function
        let spec = CoverageSpec {
            item_weights: vec![1.0; 3],
            covers: vec![vec![0, 1], vec![1, 2], vec![2], vec![0]],
        };
        let cov = make_coverage(g.clone(), &spec).unwrap();
        let r = check_set_lemmas(&cov, &g.all_set(), 0.0, 100, &mut rng).unwrap();
        assert!(!r.violations.is_empty());
        assert!(r.violations.iter().all(|v| v.slack() < 0.0));
    }

    #[test]
    fn half_curvature_pair() {
        let g = Arc::new(GroundSets::new(&[2]).unwrap());
        let f = |seq: &SelectionSequence| match seq.element_count() {
            0 => 0.0,
            1 => 1.0,
            _ => 1.5,
        };
        let obj = ObjectiveHandle::new("pair", g.clone(), Arc::new(f), Claims::SUBMODULAR).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = check_set_lemmas(&obj, &g.all_set(), 0.5, 50, &mut rng).unwrap();
        assert!(r.violations.is_empty());
        // exchange at A={a}, B={b}: 1 + 0.5 >= 0.75 + 0
        assert!(holds(1.0 + 0.5 * 1.0, 0.5 * 1.5 + 0.0));
    }
}
