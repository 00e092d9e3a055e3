//! Robust sequential submodular maximization.
//!
//! A defender picks `A_t ⊆ V_t` with `|A_t| = α_t` at each step, an attacker then removes up to
//! `β_t` of the picks, and the defender is scored by `f` on what survives. This crate provides
//! the RAM defender and baselines, exact and heuristic attackers, an exhaustive minimax solver,
//! curvature computations, performance bounds and the linear-Gaussian estimation objectives.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod attacks;
pub mod error;
pub mod objectives;
pub mod problem;
pub mod solver;
pub mod trace;

pub use attacks::{AttackerKind, RemovalOutcome};
pub use error::{Error, Result};
pub use problem::{
    Budgets, Claims, ElementRef, ElementSet, GroundSets, ObjectiveHandle, SelectionSequence,
    SetFunction,
};
pub use solver::{MinimaxResult, SelectorKind, StepPlan};
pub use trace::{EpisodeTrace, StepRecord};
