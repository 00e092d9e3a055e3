//! Scenario generators: UAV navigation, WSN target tracking, and small synthetic instances.

use std::sync::Arc;

use nalgebra::{DMatrix, Vector3};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rsm_core::objectives::{
    make_batch_logdet, make_coverage, make_kalman_trace, make_modular, random_coverage_spec,
    random_modular_spec, LinearGaussianModel, Sensor,
};
use rsm_core::{Budgets, GroundSets, ObjectiveHandle};

use crate::config::{
    EstimationObjective, RunConfig, ScenarioKind, SyntheticObjective, SyntheticParams, UavParams,
    WsnParams,
};
use crate::error::HarnessError;

/// Seed of trial `trial` under `master`: the first word of ChaCha8 stream `trial`.
///
/// Each trial owns a stream, so adding trials never changes the earlier ones.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial);
    rng.next_u64()
}

/// Generator for scenario randomness; stream 0 of the trial seed (episodes use streams 1 and 2).
pub fn scenario_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Constant-velocity model in 3D: state `[p; v]`, `F = [[I, dt I], [0, I]]`.
pub fn double_integrator(dt: f64) -> DMatrix<f64> {
    let mut f = DMatrix::identity(6, 6);
    for i in 0..3 {
        f[(i, i + 3)] = dt;
    }
    f
}

fn position_selector() -> DMatrix<f64> {
    DMatrix::identity(3, 6)
}

/// GPS, altimeter, then `ground_sensors` random scalar sensors; the same bank at every step.
pub fn generate_uav_scenario<R: Rng + ?Sized>(
    rng: &mut R,
    params: &UavParams,
    horizon: usize,
) -> Result<LinearGaussianModel, HarnessError> {
    let mut bank = vec![
        Sensor {
            c: position_selector(),
            r: DMatrix::identity(3, 3) * params.gps_noise,
        },
        Sensor {
            c: DMatrix::from_fn(1, 6, |_, j| if j == 2 { 1.0 } else { 0.0 }),
            r: DMatrix::from_element(1, 1, params.altimeter_std.powi(2)),
        },
    ];
    for _ in 0..params.ground_sensors {
        let c = DMatrix::from_fn(1, 6, |_, _| rng.sample::<f64, _>(StandardNormal));
        let r = rng.random_range(params.ground_noise_min..=params.ground_noise_max);
        bank.push(Sensor {
            c,
            r: DMatrix::from_element(1, 1, r),
        });
    }
    Ok(LinearGaussianModel::new(
        double_integrator(params.dt),
        DMatrix::identity(6, 6),
        DMatrix::identity(6, 6),
        vec![bank; horizon],
    )?)
}

/// Nominal target positions for steps `1..=horizon`: a straight line at constant altitude from
/// the face `x = 0` to the face `x = side`, sampled at fractions `t / (horizon + 1)`.
pub fn wsn_trajectory<R: Rng + ?Sized>(
    rng: &mut R,
    side: f64,
    horizon: usize,
) -> Vec<Vector3<f64>> {
    let z = rng.random_range(0.0..=side);
    let start = Vector3::new(0.0, rng.random_range(0.0..=side), z);
    let end = Vector3::new(side, rng.random_range(0.0..=side), z);
    (1..=horizon)
        .map(|t| start + (end - start) * (t as f64 / (horizon + 1) as f64))
        .collect()
}

/// Position sensors scattered in a cube; noise grows with the squared distance to the target.
pub fn generate_wsn_scenario<R: Rng + ?Sized>(
    rng: &mut R,
    params: &WsnParams,
    horizon: usize,
) -> Result<LinearGaussianModel, HarnessError> {
    let nodes: Vec<Vector3<f64>> = (0..params.sensors)
        .map(|_| Vector3::from_fn(|_, _| rng.random_range(0.0..=params.side)))
        .collect();
    let path = wsn_trajectory(rng, params.side, horizon);
    let banks = path
        .iter()
        .map(|target| {
            nodes
                .iter()
                .map(|node| {
                    let d2 = (node - target).norm_squared();
                    Sensor {
                        c: position_selector(),
                        r: DMatrix::identity(3, 3) * (params.sigma0.powi(2) + params.gamma * d2),
                    }
                })
                .collect()
        })
        .collect();
    Ok(LinearGaussianModel::new(
        double_integrator(params.dt),
        DMatrix::identity(6, 6),
        DMatrix::identity(6, 6),
        banks,
    )?)
}

pub fn generate_synthetic<R: Rng + ?Sized>(
    rng: &mut R,
    params: &SyntheticParams,
    horizon: usize,
) -> Result<ObjectiveHandle, HarnessError> {
    let grounds = Arc::new(GroundSets::uniform(horizon, params.step_size)?);
    Ok(match params.objective {
        SyntheticObjective::Coverage => {
            let spec = random_coverage_spec(
                rng,
                &grounds,
                params.universe,
                params.max_cover,
                params.private_prob,
            );
            make_coverage(grounds, &spec)?
        }
        SyntheticObjective::Modular => {
            let spec = random_modular_spec(rng, &grounds, params.max_weight);
            make_modular(grounds, &spec)?
        }
    })
}

pub fn estimation_objective(
    model: LinearGaussianModel,
    objective: EstimationObjective,
) -> Result<ObjectiveHandle, HarnessError> {
    let grounds = Arc::new(model.ground_sets()?);
    let model = Arc::new(model);
    Ok(match objective {
        EstimationObjective::Logdet => make_batch_logdet(model, grounds)?,
        EstimationObjective::Trace => make_kalman_trace(model, grounds)?,
    })
}

/// One trial's objective and budgets.
#[derive(Debug)]
pub struct Scenario {
    pub objective: ObjectiveHandle,
    pub budgets: Budgets,
}

impl Scenario {
    pub fn submodular(&self) -> bool {
        self.objective.claims().submodular
    }
}

/// Regenerates the scenario of one trial from its seed.
pub fn build_scenario(config: &RunConfig, seed: u64) -> Result<Scenario, HarnessError> {
    let horizon = config.run.horizon;
    let mut rng = scenario_rng(seed);
    let objective = match config.run.kind {
        ScenarioKind::UavNavigation => {
            let params = config.uav();
            estimation_objective(
                generate_uav_scenario(&mut rng, &params, horizon)?,
                params.objective,
            )?
        }
        ScenarioKind::WsnTracking => {
            let params = config.wsn();
            estimation_objective(
                generate_wsn_scenario(&mut rng, &params, horizon)?,
                params.objective,
            )?
        }
        ScenarioKind::Synthetic => generate_synthetic(&mut rng, &config.synthetic(), horizon)?,
    };
    let budgets = Budgets::uniform(config.run.alpha, config.run.beta, objective.grounds())?;
    Ok(Scenario { objective, budgets })
}
