//! Influence, equilibrium and polarization analysis for a legislature
//! lobbied by a budget-constrained interest group.
//!
//! Legislators care about voting like the colleagues they are susceptible
//! to, so payments to one legislator spill over along the network. The
//! interest group's optimal allocation weights each legislator by a
//! walk-sum influence measure; ideological and affective polarization shift
//! both the influence weights and the resulting vote share.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod affective;
pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod influence;
mod linalg;
pub mod model;
pub mod oracle;
pub mod scenario;
pub mod statics;
pub mod utility;

pub use affective::{
    alpha_star, build_hat_matrix, dq_dalpha, modified_influence, polarization_thresholds,
    solve_affective_equilibrium, AffectiveInfluence, PolarizationThresholds,
};
pub use equilibrium::{
    check_interiority, conditional_probabilities, optimal_investments, solve_equilibrium,
    EquilibriumResult, InteriorityReport,
};
pub use error::{Error, Result};
pub use influence::{compute_influence, incremental_influence, WalkMatrix};
pub use model::{
    build_legislature, validate_params, Legislature, Mode, ModelParams, Party, PartyVector,
};
pub use oracle::{
    brute_force_allocation, fixed_point_probabilities, monte_carlo_frequencies, pivotality_probe,
    SimulationConfig,
};
pub use scenario::Scenario;
pub use statics::{analyze_network_change, dq_dsigma, NetworkChangeReport, SigmaThreshold};
pub use utility::UtilitySpec;
