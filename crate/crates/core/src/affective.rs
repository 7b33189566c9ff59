//! Affective polarization: disutility from voting like members of the other
//! party acts as a uniform negative cross-party link of weight `alpha`.
//!
//! With no positive cross-party links the interaction matrix is
//! `Ĝ = [[delta G_FF, -alpha 1], [-alpha 1, delta G_AA]]`, and the modified
//! influence `(I - 2 theta Ĝ^T)^{-1} 1` is the within-party influence scaled
//! per party by
//! `omega_P = (1 - a I0_{P'}) / (1 - a^2 I0_F I0_A)`, `a = 2 theta alpha`.
//! The scaling holds for directed within-party blocks as well; every
//! computation is still cross-checked against a direct solve.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::equilibrium::{
    optimal_investments, probabilities_with, shadow_price, weighted_utility, EquilibriumResult,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{Legislature, Mode, ModelParams, Party, PartyVector};
use crate::utility::UtilitySpec;

/// Agreement required between the omega-scaled and directly solved influence.
pub const FORMULA_TOLERANCE: f64 = 1e-9;
/// Evaluations "at" the open ceiling use `(1 - ALPHA_HAT_MARGIN) * alpha_hat`.
pub const ALPHA_HAT_MARGIN: f64 = 1e-6;

/// Influence computed from the within-party blocks only.
pub fn within_party_influence(legislature: &Legislature, beta: f64) -> Result<PartyVector> {
    let mut entries = Vec::with_capacity(legislature.n());
    for party in [Party::F, Party::A] {
        let g = legislature.block(party, party);
        let system = linalg::identity_minus(beta, &g.transpose());
        let x = linalg::solve(system, &linalg::ones(g.nrows()), "I - beta G_PP^T")?;
        entries.extend(x.iter().copied());
    }
    Ok(PartyVector::new(entries, legislature.n_f()))
}

/// `min(1/I0_F, 1/I0_A) / (2 theta)`.
pub fn alpha_hat(theta: f64, i0_f: f64, i0_a: f64) -> f64 {
    (1.0 / i0_f).min(1.0 / i0_a) / (2.0 * theta)
}

/// `omega` for a party with aggregate within-party influence `own` facing a
/// party with `other`, at rescaled polarization `alpha_tilde`.
pub fn omega(alpha_tilde: f64, own: f64, other: f64) -> f64 {
    (1.0 - alpha_tilde * other) / (1.0 - alpha_tilde * alpha_tilde * own * other)
}

/// `d omega / d alpha` (not with respect to the rescaled value).
pub fn omega_derivative(theta: f64, alpha: f64, own: f64, other: f64) -> f64 {
    let a = 2.0 * theta * alpha;
    let denom = 1.0 - a * a * own * other;
    -2.0 * theta * other * (1.0 + a * a * own * other - 2.0 * a * own) / (denom * denom)
}

/// The affective interaction matrix `Ĝ`.
pub fn build_hat_matrix(legislature: &Legislature, delta: f64, alpha: f64) -> Result<DMatrix<f64>> {
    let cross = legislature.cross_party_links();
    if cross > 0 {
        return Err(Error::CrossPartyLinksPresent(cross));
    }
    let n_f = legislature.n_f();
    let n = legislature.n();
    let mut hat = legislature.adjacency() * delta;
    for i in 0..n {
        for j in 0..n {
            if (i < n_f) != (j < n_f) {
                hat[(i, j)] = -alpha;
            }
        }
    }
    Ok(hat)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffectiveInfluence {
    pub unmodified: PartyVector,
    pub omega_f: f64,
    pub omega_a: f64,
    pub modified: PartyVector,
    pub alpha_hat: f64,
    /// Modified influence of the stronger party minus that of the weaker,
    /// `|I0_F - I0_A| / (1 - a^2 I0_F I0_A)`.
    pub gap: f64,
    /// Max deviation of the omega form from the direct solve.
    pub direct_deviation: f64,
}

impl AffectiveInfluence {
    pub fn omega(&self, party: Party) -> f64 {
        match party {
            Party::F => self.omega_f,
            Party::A => self.omega_a,
        }
    }

    /// `1 - a^2 I0_F I0_A`.
    pub fn denominator(&self, alpha_tilde: f64) -> f64 {
        1.0 - alpha_tilde
            * alpha_tilde
            * self.unmodified.party_f_sum()
            * self.unmodified.party_a_sum()
    }
}

fn unmodified_checked(
    legislature: &Legislature,
    params: &ModelParams,
) -> Result<(PartyVector, f64)> {
    params.check()?;
    let cross = legislature.cross_party_links();
    if cross > 0 {
        return Err(Error::CrossPartyLinksPresent(cross));
    }
    let i0 = within_party_influence(legislature, params.beta())?;
    for (index, &value) in i0.entries().iter().enumerate() {
        if !(value > 0.0) {
            return Err(Error::NonPositiveInfluence { index, value });
        }
    }
    let hat = alpha_hat(params.theta, i0.party_f_sum(), i0.party_a_sum());
    if params.alpha >= hat {
        return Err(Error::AlphaTooLarge {
            alpha: params.alpha,
            alpha_hat: hat,
        });
    }
    Ok((i0, hat))
}

/// Omega-scaled influence, verified against `(I - 2 theta Ĝ^T) I = 1`.
pub fn modified_influence(
    legislature: &Legislature,
    params: &ModelParams,
) -> Result<AffectiveInfluence> {
    let (unmodified, alpha_hat) = unmodified_checked(legislature, params)?;
    let a = params.alpha_tilde();
    let (i0_f, i0_a) = (unmodified.party_f_sum(), unmodified.party_a_sum());
    let (omega_f, omega_a) = if params.alpha == 0.0 {
        (1.0, 1.0)
    } else {
        (omega(a, i0_f, i0_a), omega(a, i0_a, i0_f))
    };
    let modified = unmodified.scaled_blocks(omega_f, omega_a);

    let hat = build_hat_matrix(legislature, params.delta, params.alpha)?;
    let system = linalg::identity_minus(2.0 * params.theta, &hat.transpose());
    let direct = linalg::solve(system, &linalg::ones(legislature.n()), "I - 2 theta Ĝ^T")?;
    let direct: Vec<f64> = direct.iter().copied().collect();
    let direct_deviation = linalg::max_abs_diff(&direct, modified.entries());
    let scale = direct.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if !(direct_deviation <= FORMULA_TOLERANCE * scale) {
        return Err(Error::FormulaMismatch(direct_deviation));
    }

    let gap = (modified.party_f_sum() - modified.party_a_sum()).abs();
    Ok(AffectiveInfluence {
        unmodified,
        omega_f,
        omega_a,
        modified,
        alpha_hat,
        gap,
        direct_deviation,
    })
}

/// Polarization level minimizing the stronger party's omega,
/// `(1 / (2 theta I0_weak)) (1 - sqrt(1 - I0_weak / I0_strong))`.
pub fn alpha_star(i0_strong: f64, i0_weak: f64, theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "theta",
            value: theta,
            reason: "must be positive",
        });
    }
    if !(i0_weak > 0.0) {
        return Err(Error::NonPositiveInfluence {
            index: 1,
            value: i0_weak,
        });
    }
    if (i0_strong - i0_weak).abs() <= 1e-12 * i0_strong.abs().max(i0_weak.abs()) {
        return Err(Error::EqualInfluence);
    }
    if i0_strong < i0_weak {
        return Err(Error::InvalidParameter {
            name: "i0_strong",
            value: i0_strong,
            reason: "must exceed the weaker party's influence",
        });
    }
    Ok((1.0 - (1.0 - i0_weak / i0_strong).sqrt()) / (2.0 * theta * i0_weak))
}

/// Equilibrium with affective polarization: allocation against the modified
/// influence, probabilities from `(I - 2 theta Ĝ)^{-1}`.
pub fn solve_affective_equilibrium(
    legislature: &Legislature,
    params: &ModelParams,
    utility: &UtilitySpec,
) -> Result<EquilibriumResult> {
    utility.check()?;
    let influence = modified_influence(legislature, params)?;
    let hat = build_hat_matrix(legislature, params.delta, params.alpha)?;
    let weights = influence.modified;
    let investments = optimal_investments(weights.entries(), utility, params.budget)?;
    let probabilities = probabilities_with(legislature, params, utility, &investments, &hat)?;
    let vote_share = probabilities.iter().sum();
    let shadow_price = shadow_price(params.theta, weights.entries(), &investments, utility);
    let interior = probabilities.iter().all(|q| *q > 0.0 && *q < 1.0);
    Ok(EquilibriumResult {
        mode: Mode::Affective,
        influence: weights,
        investments,
        probabilities,
        vote_share,
        shadow_price,
        interior,
    })
}

/// `n/2 + theta sum_i I^alpha_i u(m_i) + theta sigma (I0_F - I0_A) / (1 - a^2 I0_F I0_A)`.
pub fn affective_vote_share_closed_form(
    influence: &AffectiveInfluence,
    investments: &[f64],
    params: &ModelParams,
    utility: &UtilitySpec,
) -> f64 {
    let i0 = &influence.unmodified;
    let denom = influence.denominator(params.alpha_tilde());
    i0.len() as f64 / 2.0
        + params.theta * weighted_utility(influence.modified.entries(), investments, utility)
        + params.theta * params.sigma * (i0.party_f_sum() - i0.party_a_sum()) / denom
}

/// `dQ*/dsigma = theta (I0_F - I0_A) / (1 - a^2 I0_F I0_A)`.
pub fn affective_dq_dsigma(legislature: &Legislature, params: &ModelParams) -> Result<f64> {
    let influence = modified_influence(legislature, params)?;
    Ok(params.theta * (influence.modified.party_f_sum() - influence.modified.party_a_sum()))
}

fn party_weighted_utility(
    i0: &PartyVector,
    investments: &[f64],
    utility: &UtilitySpec,
    party: Party,
) -> f64 {
    let offset = if party == Party::F { 0 } else { i0.n_f() };
    let block = i0.block(party);
    weighted_utility(block, &investments[offset..offset + block.len()], utility)
}

/// `dQ*/dalpha` at the current equilibrium investments. The budget is always
/// exhausted, so investment responses drop out and only the omega slopes and
/// the sigma term remain.
pub fn dq_dalpha(
    legislature: &Legislature,
    params: &ModelParams,
    utility: &UtilitySpec,
) -> Result<f64> {
    let eq = solve_affective_equilibrium(legislature, params, utility)?;
    let influence = modified_influence(legislature, params)?;
    Ok(dq_dalpha_at(&influence, &eq.investments, params, utility))
}

fn dq_dalpha_at(
    influence: &AffectiveInfluence,
    investments: &[f64],
    params: &ModelParams,
    utility: &UtilitySpec,
) -> f64 {
    let i0 = &influence.unmodified;
    let (f, a) = (i0.party_f_sum(), i0.party_a_sum());
    let theta = params.theta;
    let at = params.alpha_tilde();
    let denom = 1.0 - at * at * f * a;
    let omega_term = omega_derivative(theta, params.alpha, f, a)
        * party_weighted_utility(i0, investments, utility, Party::F)
        + omega_derivative(theta, params.alpha, a, f)
            * party_weighted_utility(i0, investments, utility, Party::A);
    theta * omega_term + 4.0 * params.sigma * theta * theta * at * a * f * (f - a) / (denom * denom)
}

/// Which party has more within-party influence.
pub fn stronger_party(i0: &PartyVector) -> Option<Party> {
    let (f, a) = (i0.party_f_sum(), i0.party_a_sum());
    if (f - a).abs() <= 1e-12 * f.max(a) {
        None
    } else if f > a {
        Some(Party::F)
    } else {
        Some(Party::A)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarizationThresholds {
    pub stronger: Option<Party>,
    /// Party A stronger: `dQ*/dalpha` near the ceiling is positive iff sigma
    /// is below this.
    pub sigma_1: Option<f64>,
    /// Party F stronger: `Q*` near the ceiling exceeds `Q*(0)` iff sigma is
    /// above this.
    pub sigma_2: Option<f64>,
    /// Party A stronger: `Q*` near the ceiling exceeds `Q*(0)` iff sigma is
    /// below this.
    pub sigma_3: Option<f64>,
    /// Polarization used for the near-ceiling terms.
    pub alpha_near_hat: f64,
}

/// Sigma thresholds of the affective comparative statics. Near-ceiling
/// terms use investments at `(1 - ALPHA_HAT_MARGIN) alpha_hat`, baseline
/// terms use investments at `alpha = 0`.
pub fn polarization_thresholds(
    legislature: &Legislature,
    params: &ModelParams,
    utility: &UtilitySpec,
) -> Result<PolarizationThresholds> {
    let at_zero = params.with_alpha(0.0);
    let base = modified_influence(legislature, &at_zero)?;
    let i0 = base.unmodified.clone();
    let alpha_near_hat = (1.0 - ALPHA_HAT_MARGIN) * base.alpha_hat;
    let stronger = stronger_party(&i0);
    let Some(strong) = stronger else {
        return Ok(PolarizationThresholds {
            stronger,
            sigma_1: None,
            sigma_2: None,
            sigma_3: None,
            alpha_near_hat,
        });
    };
    let m0 = solve_affective_equilibrium(legislature, &at_zero, utility)?.investments;
    let m_hat =
        solve_affective_equilibrium(legislature, &params.with_alpha(alpha_near_hat), utility)?
            .investments;
    let w = |m: &[f64], party| party_weighted_utility(&i0, m, utility, party);
    let (f, a) = (i0.party_f_sum(), i0.party_a_sum());
    Ok(match strong {
        Party::F => PolarizationThresholds {
            stronger,
            sigma_1: None,
            sigma_2: Some((w(&m0, Party::A) - (w(&m_hat, Party::F) - w(&m0, Party::F))) / a),
            sigma_3: None,
            alpha_near_hat,
        },
        Party::A => PolarizationThresholds {
            stronger,
            sigma_1: Some(w(&m_hat, Party::A) / (2.0 * a)),
            sigma_2: None,
            sigma_3: Some((w(&m_hat, Party::A) - w(&m0, Party::A) - w(&m0, Party::F)) / f),
            alpha_near_hat,
        },
    })
}

/// One row of an alpha sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaSweepRow {
    pub alpha: f64,
    pub omega_f: f64,
    pub omega_a: f64,
    pub i_alpha_f: f64,
    pub i_alpha_a: f64,
    pub q_star: f64,
    pub dq_dalpha: f64,
}

/// Evaluates the affective equilibrium at each alpha, in parallel.
pub fn alpha_sweep(
    legislature: &Legislature,
    params: &ModelParams,
    utility: &UtilitySpec,
    alphas: &[f64],
) -> Result<Vec<AlphaSweepRow>> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let p = params.with_alpha(alpha);
            let influence = modified_influence(legislature, &p)?;
            let eq = solve_affective_equilibrium(legislature, &p, utility)?;
            Ok(AlphaSweepRow {
                alpha,
                omega_f: influence.omega_f,
                omega_a: influence.omega_a,
                i_alpha_f: influence.modified.party_f_sum(),
                i_alpha_a: influence.modified.party_a_sum(),
                q_star: eq.vote_share,
                dq_dalpha: dq_dalpha_at(&influence, &eq.investments, &p, utility),
            })
        })
        .collect()
}
