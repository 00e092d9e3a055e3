mod linear_gaussian;
mod synthetic;

pub use linear_gaussian::{
    make_batch_logdet, make_kalman_trace, EstimatorOutput, LinearGaussianModel, Sensor,
};
pub use synthetic::{
    make_coverage, make_modular, random_coverage_spec, random_modular_spec, CoverageSpec,
    ModularSpec,
};
