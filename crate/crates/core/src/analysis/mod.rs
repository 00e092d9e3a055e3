pub mod bisection;
pub mod bounds;
pub mod curvature;
pub mod lemmas;

pub use bisection::{
    bisection_lambda, bisection_on, regularized_min_removal, BisectionState, RegularizedMin,
    RemovalLandscape,
};
pub use bounds::{
    aposteriori_bound, aposteriori_from_values, apriori_bound, greedy_factor, greedy_reference,
    prefailure_bound, prefailure_from_values, BoundComponents, BoundKind, BoundReport,
};
pub use curvature::{
    kappa, kappa_sampled, total_curvature, total_curvature_from_table, CurvatureKind,
    CurvatureMode, CurvatureReport, SubsetTable,
};
pub use lemmas::{check_sequence_lemmas, check_set_lemmas, LemmaReport, Violation};
