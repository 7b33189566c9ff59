//! The four-legislator worked example: parties F = {F1, F2}, A = {A1, A2}
//! with indices F1 = 0, F2 = 1, A1 = 2, A2 = 3.
//!
//! Base network: F1 -> F2, F1 -> A1, A1 -> F1, A1 -> F2. F2 is the most
//! influential legislator and F1, A1 tie. The stronger network adds
//! F2 -> A2, which lifts A2 above F1 and A1.

use crate::model::{build_legislature, Legislature, ModelParams};
use crate::utility::UtilitySpec;

pub const EXAMPLE_EDGES: [(usize, usize, f64); 4] =
    [(0, 1, 1.0), (0, 2, 1.0), (2, 0, 1.0), (2, 1, 1.0)];

/// F2 becomes susceptible to A2.
pub const EXAMPLE_NEW_LINK: (usize, usize) = (1, 3);

pub fn example_network() -> Legislature {
    build_legislature(2, 2, &EXAMPLE_EDGES).expect("fixture is valid")
}

pub fn example_stronger_network() -> Legislature {
    example_network()
        .with_link(EXAMPLE_NEW_LINK.0, EXAMPLE_NEW_LINK.1, 1.0)
        .expect("fixture is valid")
}

/// `(theta, delta, M) = (0.03, 0.3, 100)` with `sigma = 3`, `alpha = 0`.
pub fn example_params() -> ModelParams {
    ModelParams::new(0.03, 0.3, 3.0, 0.0, 100.0).expect("fixture is valid")
}

pub fn example_utility() -> UtilitySpec {
    UtilitySpec::sqrt()
}
