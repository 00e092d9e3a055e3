#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rsm_core::objectives::{
    make_coverage, make_modular, random_coverage_spec, random_modular_spec, LinearGaussianModel,
    Sensor,
};
use rsm_core::{ElementSet, GroundSets, ObjectiveHandle, SelectionSequence};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-scale..=scale))
}

pub fn random_pd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let b = uniform_matrix(rng, n, n, 1.0);
    &b * b.transpose() + DMatrix::identity(n, n) * 0.2
}

/// Small random linear-Gaussian model: `n <= 3`, `T <= 3`, `|V_t| <= 4`.
pub fn random_model(seed: u64) -> LinearGaussianModel {
    let mut r = rng(seed);
    let n = r.random_range(1..=3);
    let horizon = r.random_range(1..=3);
    let f = uniform_matrix(&mut r, n, n, 0.9);
    let q = random_pd(&mut r, n);
    let p0 = random_pd(&mut r, n);
    let banks = (0..horizon)
        .map(|_| {
            let k = r.random_range(1..=4);
            (0..k)
                .map(|_| {
                    let m = r.random_range(1..=2);
                    Sensor {
                        c: uniform_matrix(&mut r, m, n, 1.0),
                        r: random_pd(&mut r, m),
                    }
                })
                .collect()
        })
        .collect();
    LinearGaussianModel::new(f, q, p0, banks).unwrap()
}

pub fn logdet_pd(m: &DMatrix<f64>) -> f64 {
    let chol = m.clone().cholesky().expect("positive definite");
    2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

/// Joint prior covariance of `(x_1, ..., x_len)` assembled from the state recursion.
pub fn joint_prior(model: &LinearGaussianModel, len: usize) -> DMatrix<f64> {
    let n = model.state_dim();
    let f = model.dynamics();
    let mut marginals = Vec::with_capacity(len);
    let mut p = f * model.prior_cov() * f.transpose() + model.process_noise();
    for _ in 0..len {
        marginals.push(p.clone());
        p = f * &p * f.transpose() + model.process_noise();
    }
    let mut sigma = DMatrix::zeros(n * len, n * len);
    for (i, marginal) in marginals.iter().enumerate() {
        let mut cross = marginal.clone();
        for j in i..len {
            // Cov(x_j, x_i) = F^{j-i} P_i
            sigma.view_mut((j * n, i * n), (n, n)).copy_from(&cross);
            sigma
                .view_mut((i * n, j * n), (n, n))
                .copy_from(&cross.transpose());
            cross = f * cross;
        }
    }
    sigma
}

/// `logdet Σ_{1:len}(∅) - logdet Σ_{1:len}(A)` via a covariance-form stacked update.
pub fn batch_logdet_oracle(model: &LinearGaussianModel, seq: &SelectionSequence) -> f64 {
    let len = seq.len();
    if len == 0 {
        return 0.0;
    }
    let n = model.state_dim();
    let prior = joint_prior(model, len);
    let selected: Vec<(usize, &Sensor)> = (1..=len)
        .flat_map(|t| seq.step(t).iter().map(move |e| (t, e)))
        .map(|(t, e)| (t, &model.sensors(t)[e.local_index]))
        .collect();
    if selected.is_empty() {
        return 0.0;
    }
    let rows: usize = selected.iter().map(|(_, s)| s.c.nrows()).sum();
    let mut h = DMatrix::zeros(rows, n * len);
    let mut r = DMatrix::zeros(rows, rows);
    let mut row = 0;
    for (t, s) in &selected {
        let m = s.c.nrows();
        h.view_mut((row, (t - 1) * n), (m, n)).copy_from(&s.c);
        r.view_mut((row, row), (m, m)).copy_from(&s.r);
        row += m;
    }
    let innovation = &h * &prior * h.transpose() + r;
    let gain = &prior * h.transpose() * innovation.try_inverse().unwrap();
    let post = &prior - &gain * &h * &prior;
    let post = (&post + post.transpose()) * 0.5;
    logdet_pd(&prior) - logdet_pd(&post)
}

/// Filtered covariances via the covariance-form (Joseph) update.
pub fn joseph_filter(model: &LinearGaussianModel, seq: &SelectionSequence) -> Vec<DMatrix<f64>> {
    let n = model.state_dim();
    let f = model.dynamics();
    let mut cov = model.prior_cov().clone();
    let mut out = Vec::new();
    for t in 1..=seq.len() {
        let predicted = f * &cov * f.transpose() + model.process_noise();
        let sensors: Vec<&Sensor> = seq
            .step(t)
            .iter()
            .map(|e| &model.sensors(t)[e.local_index])
            .collect();
        cov = if sensors.is_empty() {
            predicted
        } else {
            let rows: usize = sensors.iter().map(|s| s.c.nrows()).sum();
            let mut h = DMatrix::zeros(rows, n);
            let mut r = DMatrix::zeros(rows, rows);
            let mut row = 0;
            for s in &sensors {
                let m = s.c.nrows();
                h.view_mut((row, 0), (m, n)).copy_from(&s.c);
                r.view_mut((row, row), (m, m)).copy_from(&s.r);
                row += m;
            }
            let innovation = &h * &predicted * h.transpose() + &r;
            let k = &predicted * h.transpose() * innovation.try_inverse().unwrap();
            let i_kh = DMatrix::identity(n, n) - &k * &h;
            &i_kh * &predicted * i_kh.transpose() + &k * r * k.transpose()
        };
        out.push(cov.clone());
    }
    out
}

pub fn trace_oracle(model: &LinearGaussianModel, seq: &SelectionSequence) -> f64 {
    let empty = SelectionSequence::empty(seq.len());
    joseph_filter(model, &empty)
        .iter()
        .zip(joseph_filter(model, seq))
        .map(|(e, a)| e.trace() - a.trace())
        .sum()
}

/// All subsets of `v` as element sets, indexed by bitmask.
pub fn all_subsets(v: &ElementSet) -> Vec<ElementSet> {
    let elems = v.as_slice();
    (0..1usize << elems.len())
        .map(|mask| {
            elems
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, e)| *e)
                .collect()
        })
        .collect()
}

/// Coverage instance used throughout the suite: `a -> {u1,u2}`, `b -> {u2,u3}`, `c -> {u3}`.
pub fn abc_coverage() -> ObjectiveHandle {
    let g = Arc::new(GroundSets::new(&[3]).unwrap());
    let spec = rsm_core::objectives::CoverageSpec {
        item_weights: vec![1.0; 3],
        covers: vec![vec![0, 1], vec![1, 2], vec![2]],
    };
    make_coverage(g, &spec).unwrap()
}

pub fn modular_from(weights: Vec<f64>, sizes: &[usize]) -> ObjectiveHandle {
    let g = Arc::new(GroundSets::new(sizes).unwrap());
    make_modular(g, &rsm_core::objectives::ModularSpec { weights }).unwrap()
}

pub fn random_modular(seed: u64, sizes: &[usize]) -> ObjectiveHandle {
    let g = Arc::new(GroundSets::new(sizes).unwrap());
    let spec = random_modular_spec(&mut rng(seed), &g, 9);
    make_modular(g, &spec).unwrap()
}

pub fn random_coverage(seed: u64, sizes: &[usize]) -> ObjectiveHandle {
    let g = Arc::new(GroundSets::new(sizes).unwrap());
    let spec = random_coverage_spec(&mut rng(seed), &g, 6, 3, 0.5);
    make_coverage(g, &spec).unwrap()
}
