//! Modular and weighted-coverage set functions, plus random instance generators for them.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::problem::{Claims, GroundSets, ObjectiveHandle, SelectionSequence, SetFunction};

/// Non-negative weight per element, indexed by `global_id`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularSpec {
    pub weights: Vec<f64>,
}

/// Weighted coverage: `f(A)` is the total weight of the universe items covered by `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageSpec {
    pub item_weights: Vec<f64>,
    /// Covered item indices per element, indexed by `global_id`.
    pub covers: Vec<Vec<usize>>,
}

struct Modular {
    weights: Vec<f64>,
}

impl SetFunction for Modular {
    fn value(&self, seq: &SelectionSequence) -> Result<f64> {
        Ok(seq
            .sets()
            .iter()
            .flat_map(|s| s.iter())
            .map(|e| self.weights[e.global_id])
            .sum())
    }
}

struct Coverage {
    item_weights: Vec<f64>,
    covers: Vec<Vec<usize>>,
}

impl SetFunction for Coverage {
    fn value(&self, seq: &SelectionSequence) -> Result<f64> {
        let mut covered = vec![false; self.item_weights.len()];
        for e in seq.sets().iter().flat_map(|s| s.iter()) {
            for &item in &self.covers[e.global_id] {
                covered[item] = true;
            }
        }
        Ok(covered
            .iter()
            .zip(&self.item_weights)
            .filter(|(c, _)| **c)
            .map(|(_, w)| w)
            .sum())
    }
}

fn check_indexed<T>(grounds: &GroundSets, table: &[T], what: &str) -> Result<()> {
    match grounds.all().find(|e| e.global_id >= table.len()) {
        Some(e) => Err(Error::Spec(format!("{what} has no entry for element {e}"))),
        None => Ok(()),
    }
}

pub fn make_modular(grounds: Arc<GroundSets>, spec: &ModularSpec) -> Result<ObjectiveHandle> {
    check_indexed(&grounds, &spec.weights, "modular weights")?;
    if let Some(w) = spec
        .weights
        .iter()
        .find(|w| !(**w >= 0.0) || !w.is_finite())
    {
        return Err(Error::Spec(format!(
            "modular weight {w} is not a non-negative real"
        )));
    }
    let f = Modular {
        weights: spec.weights.clone(),
    };
    ObjectiveHandle::new("modular", grounds, Arc::new(f), Claims::SUBMODULAR)
}

pub fn make_coverage(grounds: Arc<GroundSets>, spec: &CoverageSpec) -> Result<ObjectiveHandle> {
    check_indexed(&grounds, &spec.covers, "coverage map")?;
    if let Some(w) = spec
        .item_weights
        .iter()
        .find(|w| !(**w >= 0.0) || !w.is_finite())
    {
        return Err(Error::Spec(format!(
            "item weight {w} is not a non-negative real"
        )));
    }
    for (id, items) in spec.covers.iter().enumerate() {
        if let Some(item) = items.iter().find(|&&i| i >= spec.item_weights.len()) {
            return Err(Error::Spec(format!(
                "element {id} covers unknown universe item {item}"
            )));
        }
    }
    let f = Coverage {
        item_weights: spec.item_weights.clone(),
        covers: spec.covers.clone(),
    };
    ObjectiveHandle::new("coverage", grounds, Arc::new(f), Claims::SUBMODULAR)
}

/// Integer weights drawn uniformly from `1..=max_weight`; integers keep sums exact.
pub fn random_modular_spec<R: Rng + ?Sized>(
    rng: &mut R,
    grounds: &GroundSets,
    max_weight: u32,
) -> ModularSpec {
    let n = grounds.all().map(|e| e.global_id + 1).max().unwrap_or(0);
    ModularSpec {
        weights: (0..n)
            .map(|_| rng.random_range(1..=max_weight.max(1)) as f64)
            .collect(),
    }
}

/// Random coverage instance over `universe` shared items with integer weights in `1..=3`.
///
/// Each element covers between one and `max_cover` shared items. With probability
/// `private_prob` it also gets an item of its own, which pulls the curvature below one.
pub fn random_coverage_spec<R: Rng + ?Sized>(
    rng: &mut R,
    grounds: &GroundSets,
    universe: usize,
    max_cover: usize,
    private_prob: f64,
) -> CoverageSpec {
    let n = grounds.all().map(|e| e.global_id + 1).max().unwrap_or(0);
    let universe = universe.max(1);
    let mut item_weights: Vec<f64> = (0..universe)
        .map(|_| rng.random_range(1..=3) as f64)
        .collect();
    let mut covers = Vec::with_capacity(n);
    for _ in 0..n {
        let k = rng.random_range(1..=max_cover.clamp(1, universe));
        let mut items: Vec<usize> = rand::seq::index::sample(rng, universe, k).into_vec();
        if rng.random_bool(private_prob.clamp(0.0, 1.0)) {
            items.push(item_weights.len());
            item_weights.push(rng.random_range(1..=3) as f64);
        }
        items.sort_unstable();
        covers.push(items);
    }
    CoverageSpec {
        item_weights,
        covers,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ElementSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn abc_coverage() -> (Arc<GroundSets>, ObjectiveHandle) {
        let g = Arc::new(GroundSets::new(&[3]).unwrap());
        let spec = CoverageSpec {
            item_weights: vec![1.0; 3],
            covers: vec![vec![0, 1], vec![1, 2], vec![2]],
        };
        let obj = make_coverage(g.clone(), &spec).unwrap();
        (g, obj)
    }

    #[test]
    fn modular_values() {
        let g = Arc::new(GroundSets::new(&[2]).unwrap());
        let obj = make_modular(
            g.clone(),
            &ModularSpec {
                weights: vec![1.0, 2.0],
            },
        )
        .unwrap();
        assert_eq!(obj.evaluate_set(&g.step_set(1)).unwrap(), 3.0);
        assert_eq!(obj.evaluate_set(&ElementSet::new()).unwrap(), 0.0);
    }

    #[test]
    fn modular_rejects_negative_weights() {
        let g = Arc::new(GroundSets::new(&[2]).unwrap());
        let spec = ModularSpec {
            weights: vec![1.0, -0.5],
        };
        assert!(matches!(make_modular(g, &spec), Err(Error::Spec(_))));
    }

    #[test]
    fn modular_rejects_missing_weights() {
        let g = Arc::new(GroundSets::new(&[3]).unwrap());
        let spec = ModularSpec {
            weights: vec![1.0, 1.0],
        };
        assert!(make_modular(g, &spec).is_err());
    }

    #[test]
    fn coverage_values() {
        let (g, obj) = abc_coverage();
        let v = g.step(1);
        assert_eq!(obj.evaluate_set(&ElementSet::singleton(v[0])).unwrap(), 2.0);
        let ab: ElementSet = [v[0], v[1]].into_iter().collect();
        assert_eq!(obj.evaluate_set(&ab).unwrap(), 3.0);
        let base = SelectionSequence::from_sets(vec![ElementSet::singleton(v[0])]);
        assert_eq!(
            obj.marginal(&base, &ElementSet::singleton(v[1])).unwrap(),
            1.0
        );
    }

    #[test]
    fn disjoint_coverage_is_additive() {
        let g = Arc::new(GroundSets::new(&[2]).unwrap());
        let spec = CoverageSpec {
            item_weights: vec![1.0, 1.0],
            covers: vec![vec![0], vec![1]],
        };
        let obj = make_coverage(g.clone(), &spec).unwrap();
        assert_eq!(obj.evaluate_set(&g.step_set(1)).unwrap(), 2.0);
    }

    #[test]
    fn coverage_rejects_unknown_items() {
        let g = Arc::new(GroundSets::new(&[1]).unwrap());
        let spec = CoverageSpec {
            item_weights: vec![1.0],
            covers: vec![vec![3]],
        };
        assert!(matches!(make_coverage(g, &spec), Err(Error::Spec(_))));
    }

    #[test]
    fn generators_are_seed_deterministic() {
        let g = GroundSets::new(&[4, 4]).unwrap();
        let a = random_coverage_spec(&mut ChaCha8Rng::seed_from_u64(3), &g, 6, 3, 0.5);
        let b = random_coverage_spec(&mut ChaCha8Rng::seed_from_u64(3), &g, 6, 3, 0.5);
        assert_eq!(a, b);
        assert_eq!(a.covers.len(), 8);
        assert!(a.covers.iter().all(|c| !c.is_empty()));
        let m = random_modular_spec(&mut ChaCha8Rng::seed_from_u64(3), &g, 5);
        assert!(m
            .weights
            .iter()
            .all(|w| (1.0..=5.0).contains(w) && w.fract() == 0.0));
    }
}
