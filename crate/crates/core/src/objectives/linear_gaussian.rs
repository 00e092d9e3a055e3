//! Linear-Gaussian sensor scheduling objectives.
//!
//! The model is `x_{t+1} = F x_t + w_t` with `w_t ~ N(0, Q)`, `x_0 ~ N(0, Σ0)`, and at each step
//! a bank of candidate sensors `y = C x + v`, `v ~ N(0, R)`. Selecting sensor `i` at step `t`
//! adds `C_i^T R_i^{-1} C_i` of information to the estimate of `x_t`.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};

use crate::error::{Error, Result};
use crate::problem::{Claims, GroundSets, ObjectiveHandle, SelectionSequence, SetFunction};

const PIVOT_TOLERANCE: f64 = 1e-10;
const PSD_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Sensor {
    /// `m x n` measurement matrix.
    pub c: DMatrix<f64>,
    /// `m x m` noise covariance.
    pub r: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct LinearGaussianModel {
    dynamics: DMatrix<f64>,
    process_noise: DMatrix<f64>,
    prior_cov: DMatrix<f64>,
    sensors: Vec<Vec<Sensor>>,
    /// `C^T R^{-1} C` per sensor, same layout as `sensors`.
    information: Vec<Vec<DMatrix<f64>>>,
}

/// Filtered covariances `Σ_{s|s}` for `s = 1..len` and `logdet Σ_{1:len}`.
#[derive(Clone, Debug)]
pub struct EstimatorOutput {
    pub filtered: Vec<DMatrix<f64>>,
    pub batch_logdet: f64,
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let scale = m.amax().max(1.0);
    (m - m.transpose()).amax() <= 1e-9 * scale
}

/// Cholesky factor of a symmetric matrix whose smallest pivot `L_ii^2` clears the tolerance.
fn checked_cholesky(m: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let chol = symmetrize(m).cholesky()?;
    let min_pivot = chol
        .l_dirty()
        .diagonal()
        .iter()
        .map(|d| d * d)
        .fold(f64::INFINITY, f64::min);
    (min_pivot >= PIVOT_TOLERANCE).then_some(chol)
}

fn logdet(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol
        .l_dirty()
        .diagonal()
        .iter()
        .map(|d| d.ln())
        .sum::<f64>()
}

fn require_pd(m: &DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    if !m.is_square() || !is_symmetric(m) {
        return Err(Error::Spec(format!(
            "{what} must be a symmetric square matrix"
        )));
    }
    checked_cholesky(m).ok_or_else(|| Error::Spec(format!("{what} is not positive definite")))
}

fn invert(m: &DMatrix<f64>, step: usize, what: &str) -> Result<DMatrix<f64>> {
    checked_cholesky(m)
        .map(|c| c.inverse())
        .ok_or_else(|| Error::Numerical {
            step,
            detail: format!("{what} is not positive definite"),
        })
}

impl LinearGaussianModel {
    /// `sensors[t]` is the bank for step `t + 1`.
    pub fn new(
        dynamics: DMatrix<f64>,
        process_noise: DMatrix<f64>,
        prior_cov: DMatrix<f64>,
        sensors: Vec<Vec<Sensor>>,
    ) -> Result<Self> {
        let n = dynamics.nrows();
        if n == 0 || !dynamics.is_square() {
            return Err(Error::Spec(
                "dynamics must be a non-empty square matrix".into(),
            ));
        }
        for (m, what) in [
            (&process_noise, "process noise"),
            (&prior_cov, "prior covariance"),
        ] {
            if m.shape() != (n, n) {
                return Err(Error::Spec(format!("{what} must be {n}x{n}")));
            }
        }
        if !is_symmetric(&process_noise) {
            return Err(Error::Spec("process noise must be symmetric".into()));
        }
        let min_eig = SymmetricEigen::new(symmetrize(&process_noise))
            .eigenvalues
            .min();
        if min_eig < -PSD_TOLERANCE {
            return Err(Error::Spec(format!(
                "process noise is not positive semidefinite (eigenvalue {min_eig})"
            )));
        }
        require_pd(&prior_cov, "prior covariance")?;
        if sensors.is_empty() {
            return Err(Error::Spec("at least one sensor bank is required".into()));
        }
        let mut information = Vec::with_capacity(sensors.len());
        for (t, bank) in sensors.iter().enumerate() {
            let mut infos = Vec::with_capacity(bank.len());
            for (i, s) in bank.iter().enumerate() {
                let what = format!("sensor {i} at step {}", t + 1);
                if s.c.ncols() != n || s.c.nrows() == 0 || s.r.shape() != (s.c.nrows(), s.c.nrows())
                {
                    return Err(Error::Spec(format!("{what} has inconsistent dimensions")));
                }
                let r_inv = require_pd(&s.r, &format!("noise covariance of {what}"))?.inverse();
                infos.push(symmetrize(&(s.c.transpose() * r_inv * &s.c)));
            }
            information.push(infos);
        }
        Ok(Self {
            dynamics,
            process_noise,
            prior_cov,
            sensors,
            information,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.dynamics.nrows()
    }

    pub fn horizon(&self) -> usize {
        self.sensors.len()
    }

    pub fn dynamics(&self) -> &DMatrix<f64> {
        &self.dynamics
    }

    pub fn process_noise(&self) -> &DMatrix<f64> {
        &self.process_noise
    }

    pub fn prior_cov(&self) -> &DMatrix<f64> {
        &self.prior_cov
    }

    pub fn sensors(&self, t: usize) -> &[Sensor] {
        &self.sensors[t - 1]
    }

    /// Ground sets whose step `t` has one element per sensor in bank `t`.
    pub fn ground_sets(&self) -> Result<GroundSets> {
        GroundSets::new(&self.sensors.iter().map(Vec::len).collect::<Vec<_>>())
    }

    pub fn check_grounds(&self, grounds: &GroundSets) -> Result<()> {
        if grounds.horizon() != self.horizon() {
            return Err(Error::Spec(format!(
                "model has {} sensor banks, ground sets have horizon {}",
                self.horizon(),
                grounds.horizon()
            )));
        }
        for t in 1..=self.horizon() {
            if grounds.step(t).len() != self.sensors[t - 1].len() {
                return Err(Error::Spec(format!(
                    "step {t}: {} sensors for {} ground elements",
                    self.sensors[t - 1].len(),
                    grounds.step(t).len()
                )));
            }
        }
        Ok(())
    }

    fn selected_information(&self, seq: &SelectionSequence, t: usize) -> DMatrix<f64> {
        let n = self.state_dim();
        let mut info = DMatrix::zeros(n, n);
        if t <= seq.len() {
            for e in seq.step(t) {
                info += &self.information[t - 1][e.local_index];
            }
        }
        info
    }

    /// Prior covariance of `x_1`: `F Σ0 F^T + Q`.
    fn first_prior(&self) -> DMatrix<f64> {
        &self.dynamics * &self.prior_cov * self.dynamics.transpose() + &self.process_noise
    }

    /// Batch information matrix `J` of `(x_1, ..., x_len)` with no sensors selected.
    fn prior_information(&self, len: usize) -> Result<DMatrix<f64>> {
        let n = self.state_dim();
        let mut j = DMatrix::zeros(n * len, n * len);
        if len == 0 {
            return Ok(j);
        }
        let p1_inv = invert(&self.first_prior(), 1, "prior covariance of x_1")?;
        {
            let mut blk = j.view_mut((0, 0), (n, n));
            blk += &p1_inv;
        }
        if len > 1 {
            let q_inv = invert(&self.process_noise, 2, "process noise")?;
            let f = &self.dynamics;
            let ftqf = f.transpose() * &q_inv * f;
            let qf = &q_inv * f;
            let ftq = qf.transpose();
            for k in 0..len - 1 {
                let (a, b) = (k * n, (k + 1) * n);
                {
                    let mut blk = j.view_mut((a, a), (n, n));
                    blk += &ftqf;
                }
                {
                    let mut blk = j.view_mut((a, b), (n, n));
                    blk -= &ftq;
                }
                {
                    let mut blk = j.view_mut((b, a), (n, n));
                    blk -= &qf;
                }
                {
                    let mut blk = j.view_mut((b, b), (n, n));
                    blk += &q_inv;
                }
            }
        }
        Ok(j)
    }

    fn add_selected(&self, j: &mut DMatrix<f64>, seq: &SelectionSequence) {
        let n = self.state_dim();
        for t in 1..=seq.len() {
            if !seq.step(t).is_empty() {
                let off = (t - 1) * n;
                {
                    let mut blk = j.view_mut((off, off), (n, n));
                    blk += &self.selected_information(seq, t);
                }
            }
        }
    }

    /// Runs both estimators for a sequence whose steps index this model's sensor banks.
    pub fn estimate(&self, seq: &SelectionSequence) -> Result<EstimatorOutput> {
        let len = seq.len();
        if len > self.horizon() {
            return Err(Error::Structure(format!(
                "sequence of length {len} exceeds horizon {}",
                self.horizon()
            )));
        }
        let filtered = self.filter(seq, len)?;
        let mut j = self.prior_information(len)?;
        self.add_selected(&mut j, seq);
        let batch_logdet = if len == 0 {
            0.0
        } else {
            -logdet(&checked_cholesky(&j).ok_or_else(|| Error::Numerical {
                step: len,
                detail: "batch information matrix is not positive definite".into(),
            })?)
        };
        Ok(EstimatorOutput {
            filtered,
            batch_logdet,
        })
    }

    /// Information-form Kalman filter over steps `1..=len`.
    fn filter(&self, seq: &SelectionSequence, len: usize) -> Result<Vec<DMatrix<f64>>> {
        let mut out = Vec::with_capacity(len);
        let mut cov = self.prior_cov.clone();
        for s in 1..=len {
            let predicted = symmetrize(
                &(&self.dynamics * &cov * self.dynamics.transpose() + &self.process_noise),
            );
            let j =
                invert(&predicted, s, "predicted covariance")? + self.selected_information(seq, s);
            cov = symmetrize(&invert(&j, s, "filter information matrix")?);
            out.push(cov.clone());
        }
        Ok(out)
    }
}

struct BatchLogDet {
    model: Arc<LinearGaussianModel>,
    /// `J_len(empty)` and its log-determinant, indexed by `len - 1`.
    empty: Vec<(DMatrix<f64>, f64)>,
}

impl SetFunction for BatchLogDet {
    fn value(&self, seq: &SelectionSequence) -> Result<f64> {
        let len = seq.len();
        if len == 0 {
            return Ok(0.0);
        }
        let (base, base_logdet) = &self.empty[len - 1];
        let mut j = base.clone();
        self.model.add_selected(&mut j, seq);
        let chol = checked_cholesky(&j).ok_or_else(|| Error::Numerical {
            step: len,
            detail: "batch information matrix is not positive definite".into(),
        })?;
        Ok(logdet(&chol) - base_logdet)
    }

    fn baseline_cost(&self, len: usize) -> Option<f64> {
        Some(if len == 0 {
            0.0
        } else {
            -self.empty[len - 1].1
        })
    }
}

struct KalmanTrace {
    model: Arc<LinearGaussianModel>,
    /// `trace Σ_{s|s}(empty)` for `s = 1..T`.
    empty_traces: Vec<f64>,
}

impl SetFunction for KalmanTrace {
    fn value(&self, seq: &SelectionSequence) -> Result<f64> {
        let filtered = self.model.filter(seq, seq.len())?;
        Ok(filtered
            .iter()
            .zip(&self.empty_traces)
            .map(|(cov, empty)| empty - cov.trace())
            .sum())
    }

    fn baseline_cost(&self, len: usize) -> Option<f64> {
        Some(self.empty_traces[..len].iter().sum())
    }
}

/// `f(A_{1:t}) = logdet Σ_{1:t}(empty) - logdet Σ_{1:t}(A_{1:t})`. Requires `Q` positive definite.
pub fn make_batch_logdet(
    model: Arc<LinearGaussianModel>,
    grounds: Arc<GroundSets>,
) -> Result<ObjectiveHandle> {
    model.check_grounds(&grounds)?;
    require_pd(
        &model.process_noise,
        "process noise (batch objective needs Q^-1)",
    )?;
    let mut empty = Vec::with_capacity(model.horizon());
    for len in 1..=model.horizon() {
        let j = model.prior_information(len)?;
        let chol = checked_cholesky(&j).ok_or_else(|| Error::Numerical {
            step: len,
            detail: "prior information matrix is not positive definite".into(),
        })?;
        let ld = logdet(&chol);
        empty.push((j, ld));
    }
    let f = BatchLogDet { model, empty };
    ObjectiveHandle::new("batch_logdet", grounds, Arc::new(f), Claims::SUBMODULAR)
}

/// `f(A_{1:τ}) = Σ_{s≤τ} [trace Σ_{s|s}(empty) - trace Σ_{s|s}(A_{1:τ})]`. Monotone, not submodular in general.
pub fn make_kalman_trace(
    model: Arc<LinearGaussianModel>,
    grounds: Arc<GroundSets>,
) -> Result<ObjectiveHandle> {
    model.check_grounds(&grounds)?;
    let empty_traces = model
        .filter(&SelectionSequence::new(), model.horizon())?
        .iter()
        .map(DMatrix::trace)
        .collect();
    let f = KalmanTrace {
        model,
        empty_traces,
    };
    ObjectiveHandle::new("kalman_trace", grounds, Arc::new(f), Claims::MONOTONE)
}
