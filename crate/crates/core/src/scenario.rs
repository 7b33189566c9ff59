//! JSON scenario files.
//!
//! ```json
//! {
//!   "n_F": 2, "n_A": 2,
//!   "edges": [[0, 1, 1.0], [2, 0, 1.0]],
//!   "theta": 0.03, "delta": 0.3, "sigma": 3.0, "alpha": 0.0, "budget": 100.0,
//!   "utility": {"family": "power", "gamma": 0.5},
//!   "added_edges": [[1, 3, 1.0]]
//! }
//! ```
//!
//! `sigma`, `alpha` and `utility` may be omitted (defaults 0, 0 and square
//! root). `added_edges` lists links added to form a comparison network.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_legislature, Legislature, ModelParams};
use crate::utility::UtilitySpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(rename = "n_F")]
    n_f: usize,
    #[serde(rename = "n_A")]
    n_a: usize,
    #[serde(default)]
    edges: Vec<(usize, usize, f64)>,
    theta: f64,
    delta: f64,
    #[serde(default)]
    sigma: f64,
    #[serde(default)]
    alpha: f64,
    budget: f64,
    #[serde(default)]
    utility: UtilitySpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    added_edges: Vec<(usize, usize, f64)>,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub legislature: Legislature,
    pub params: ModelParams,
    pub utility: UtilitySpec,
    pub added_edges: Vec<(usize, usize, f64)>,
}

impl Scenario {
    pub fn new(
        legislature: Legislature,
        params: ModelParams,
        utility: UtilitySpec,
        added_edges: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        params.check()?;
        utility.check()?;
        let scenario = Scenario {
            legislature,
            params,
            utility,
            added_edges,
        };
        scenario.comparison_network()?;
        Ok(scenario)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let legislature = build_legislature(file.n_f, file.n_a, &file.edges)?;
        let params = ModelParams::new(file.theta, file.delta, file.sigma, file.alpha, file.budget)?;
        Scenario::new(legislature, params, file.utility, file.added_edges)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Scenario::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let file = ScenarioFile {
            n_f: self.legislature.n_f(),
            n_a: self.legislature.n_a(),
            edges: self.legislature.edges(),
            theta: self.params.theta,
            delta: self.params.delta,
            sigma: self.params.sigma,
            alpha: self.params.alpha,
            budget: self.params.budget,
            utility: self.utility,
            added_edges: self.added_edges.clone(),
        };
        serde_json::to_string_pretty(&file).expect("scenario serializes")
    }

    /// The base network with `added_edges` applied, if any were given.
    pub fn comparison_network(&self) -> Result<Option<Legislature>> {
        if self.added_edges.is_empty() {
            return Ok(None);
        }
        self.legislature.with_links(&self.added_edges).map(Some)
    }
}
