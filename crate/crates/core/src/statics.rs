//! Comparative statics of the baseline game: the marginal effect of
//! ideological polarization, and the effect of strengthening the network.

use serde::Serialize;

use crate::equilibrium::{
    baseline_interaction, optimal_investments, solve_equilibrium, EquilibriumResult,
};
use crate::error::{Error, Result};
use crate::influence::{compute_influence, WalkMatrix};
use crate::linalg;
use crate::model::{Legislature, ModelParams, PartyVector};
use crate::utility::UtilitySpec;

/// Tolerance for agreement between sequential rank-one updates and a full
/// recomputation of influence.
pub const INCREMENTAL_TOLERANCE: f64 = 1e-10;

/// `dQ*/dsigma = theta (I_F - I_A)`; the vote share is affine in sigma.
pub fn dq_dsigma(legislature: &Legislature, params: &ModelParams) -> Result<f64> {
    let influence = compute_influence(legislature, params.beta())?;
    Ok(params.theta * (influence.party_f_sum() - influence.party_a_sum()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum SigmaThreshold {
    /// Party F gains at least as much influence as party A: the change
    /// never hurts the interest group.
    AlwaysBeneficial,
    /// The change benefits the interest group iff sigma is below this.
    Below(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkChangeReport {
    pub sigma: f64,
    pub delta_influence: PartyVector,
    pub delta_investments: Vec<f64>,
    pub delta_probabilities: Vec<f64>,
    pub delta_vote_share: f64,
    /// `sum_i I+_i u(m+_i) - sum_i I_i u(m_i)`.
    pub investment_effect: f64,
    pub sigma_hat: SigmaThreshold,
    /// `dq` at sigma = 0.
    delta_probabilities_base: Vec<f64>,
    /// `d(dq)/dsigma`; the probability change is affine in sigma.
    delta_probabilities_slope: Vec<f64>,
    /// Max deviation of the sequential rank-one influence update from the
    /// full recomputation, when every change was a new unit link.
    pub incremental_check: Option<f64>,
    pub base: EquilibriumResult,
    pub stronger: EquilibriumResult,
}

impl NetworkChangeReport {
    /// Per-legislator change in voting probability at another sigma.
    pub fn delta_probabilities_at(&self, sigma: f64) -> Vec<f64> {
        self.delta_probabilities_base
            .iter()
            .zip(&self.delta_probabilities_slope)
            .map(|(b, s)| b + sigma * s)
            .collect()
    }

    pub fn delta_vote_share_at(&self, sigma: f64) -> f64 {
        self.delta_probabilities_at(sigma).iter().sum()
    }

    pub fn is_always_beneficial(&self) -> bool {
        matches!(self.sigma_hat, SigmaThreshold::AlwaysBeneficial)
    }
}

/// Influence of `stronger` reached from `base` by sequential Sherman–Morrison
/// updates, when every change is a new unit-weight link.
fn sequential_influence(
    base: &Legislature,
    stronger: &Legislature,
    beta: f64,
) -> Result<Option<PartyVector>> {
    let mut added = Vec::new();
    for (i, j, w) in stronger.edges() {
        let old = base.weight(i, j);
        if old != w {
            if old != 0.0 || w != 1.0 {
                return Ok(None);
            }
            added.push((i, j));
        }
    }
    let mut walks = WalkMatrix::compute(base, beta)?;
    for (i, j) in added {
        walks = walks.add_unit_link(i, j)?.0;
    }
    Ok(Some(walks.influence()))
}

fn probability_gradient(legislature: &Legislature, params: &ModelParams) -> Result<Vec<f64>> {
    let system = linalg::identity_minus(params.beta(), legislature.adjacency());
    let signs = nalgebra::DVector::from_vec(legislature.sign_vector(1.0));
    let x = linalg::solve(system, &signs, "I - beta G")?;
    Ok(x.iter().map(|v| params.theta * v).collect())
}

/// Compares equilibria under `legislature` and a stronger `new_legislature`.
pub fn analyze_network_change(
    legislature: &Legislature,
    new_legislature: &Legislature,
    params: &ModelParams,
    utility: &UtilitySpec,
) -> Result<NetworkChangeReport> {
    if !new_legislature.is_stronger_than(legislature) {
        return Err(Error::NotStronger);
    }
    let beta = params.beta();
    let base = solve_equilibrium(legislature, params, utility)?;
    let stronger = solve_equilibrium(new_legislature, params, utility)?;

    let incremental_check = sequential_influence(legislature, new_legislature, beta)?
        .map(|seq| linalg::max_abs_diff(seq.entries(), stronger.influence.entries()));
    if let Some(dev) = incremental_check {
        if dev > INCREMENTAL_TOLERANCE {
            return Err(Error::FormulaMismatch(dev));
        }
    }

    let delta_influence = stronger.influence.difference(&base.influence);
    let delta_investments: Vec<f64> = stronger
        .investments
        .iter()
        .zip(&base.investments)
        .map(|(a, b)| a - b)
        .collect();
    let delta_probabilities: Vec<f64> = stronger
        .probabilities
        .iter()
        .zip(&base.probabilities)
        .map(|(a, b)| a - b)
        .collect();
    let delta_vote_share = stronger.vote_share - base.vote_share;
    let investment_effect = stronger.weighted_utility(utility) - base.weighted_utility(utility);

    let gain_f = delta_influence.party_f_sum();
    let gain_a = delta_influence.party_a_sum();
    let sigma_hat = if gain_f >= gain_a {
        SigmaThreshold::AlwaysBeneficial
    } else {
        SigmaThreshold::Below(investment_effect / (gain_a - gain_f))
    };

    let slope_base = probability_gradient(legislature, params)?;
    let slope_new = probability_gradient(new_legislature, params)?;
    let delta_probabilities_slope: Vec<f64> = slope_new
        .iter()
        .zip(&slope_base)
        .map(|(a, b)| a - b)
        .collect();
    let delta_probabilities_base = delta_probabilities
        .iter()
        .zip(&delta_probabilities_slope)
        .map(|(d, s)| d - params.sigma * s)
        .collect();

    Ok(NetworkChangeReport {
        sigma: params.sigma,
        delta_influence,
        delta_investments,
        delta_probabilities,
        delta_vote_share,
        investment_effect,
        sigma_hat,
        delta_probabilities_base,
        delta_probabilities_slope,
        incremental_check,
        base,
        stronger,
    })
}

/// Investment effect computed from influence alone, for callers sweeping many
/// networks without building full equilibria.
pub fn investment_effect(
    base_influence: &[f64],
    new_influence: &[f64],
    utility: &UtilitySpec,
    budget: f64,
) -> Result<f64> {
    let m0 = optimal_investments(base_influence, utility, budget)?;
    let m1 = optimal_investments(new_influence, utility, budget)?;
    Ok(
        crate::equilibrium::weighted_utility(new_influence, &m1, utility)
            - crate::equilibrium::weighted_utility(base_influence, &m0, utility),
    )
}

/// `delta G` as used by the baseline probability system; re-exported for
/// the simulation oracle.
pub(crate) fn interaction(
    legislature: &Legislature,
    params: &ModelParams,
) -> nalgebra::DMatrix<f64> {
    baseline_interaction(legislature, params.delta)
}
