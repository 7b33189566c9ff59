//! Baseline equilibrium: conditional voting probabilities, the interest
//! group's optimal allocation, and the composed equilibrium.
//!
//! Given investments `m`, voting probabilities solve the linear system
//! `q = 1/2 + theta (u(m) + s) + theta W (2q - 1)`, where `s` is the party-sign
//! vector (`+sigma` on F, `-sigma` on A) and `W` is the interaction matrix
//! (`delta G` in the baseline game). Expected vote share is then
//! `n/2 + theta (u(m) + s) . I`, so the interest group maximizes the
//! influence-weighted utility sum `sum_i I_i u(m_i)` subject to the budget.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::influence::compute_influence;
use crate::linalg;
use crate::model::{Legislature, Mode, ModelParams, Party, PartyVector};
use crate::utility::UtilitySpec;

/// Budget residual tolerance of the dual bisection, relative to the budget.
pub const BUDGET_TOLERANCE: f64 = 1e-10;
const MAX_BRACKET_DOUBLINGS: usize = 200;
const MAX_BISECTIONS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult {
    pub mode: Mode,
    /// Influence weights the allocation was optimized against.
    pub influence: PartyVector,
    pub investments: Vec<f64>,
    pub probabilities: Vec<f64>,
    /// Sum of the voting probabilities.
    pub vote_share: f64,
    /// Common value of `theta I_i u'(m_i)`.
    pub shadow_price: f64,
    /// Every probability lies strictly inside (0, 1).
    pub interior: bool,
}

impl EquilibriumResult {
    /// `max_i |theta I_i u'(m_i) - lambda| / lambda`.
    pub fn kkt_residual(&self, theta: f64, utility: &UtilitySpec) -> f64 {
        self.influence
            .entries()
            .iter()
            .zip(&self.investments)
            .map(|(i, m)| {
                (theta * i * utility.marginal(*m) - self.shadow_price).abs() / self.shadow_price
            })
            .fold(0.0, f64::max)
    }

    /// `sum_i I_i u(m_i)`.
    pub fn weighted_utility(&self, utility: &UtilitySpec) -> f64 {
        weighted_utility(self.influence.entries(), &self.investments, utility)
    }
}

pub fn weighted_utility(influence: &[f64], investments: &[f64], utility: &UtilitySpec) -> f64 {
    influence
        .iter()
        .zip(investments)
        .map(|(i, m)| i * utility.value(*m))
        .sum()
}

fn check_investments(legislature: &Legislature, m: &[f64]) -> Result<()> {
    if m.len() != legislature.n() {
        return Err(Error::DimensionMismatch {
            expected: legislature.n(),
            actual: m.len(),
        });
    }
    if let Some(&bad) = m.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "investment",
            value: bad,
            reason: "must be non-negative",
        });
    }
    Ok(())
}

/// `u(m) + s`, the direct incentive to vote for the interest group.
pub(crate) fn incentive(
    legislature: &Legislature,
    sigma: f64,
    utility: &UtilitySpec,
    m: &[f64],
) -> DVector<f64> {
    let signs = legislature.sign_vector(sigma);
    DVector::from_iterator(
        m.len(),
        m.iter().zip(signs).map(|(mi, s)| utility.value(*mi) + s),
    )
}

/// Solves `q = 1/2 + theta (I - 2 theta W)^{-1} (u(m) + s)` for interaction matrix `W`.
pub(crate) fn probabilities_with(
    legislature: &Legislature,
    params: &ModelParams,
    utility: &UtilitySpec,
    m: &[f64],
    interaction: &DMatrix<f64>,
) -> Result<Vec<f64>> {
    check_investments(legislature, m)?;
    let system = linalg::identity_minus(2.0 * params.theta, interaction);
    let rhs = incentive(legislature, params.sigma, utility, m);
    let x = linalg::solve(system, &rhs, "I - 2 theta W")?;
    Ok(x.iter().map(|v| 0.5 + params.theta * v).collect())
}

/// `max_i |q_i - (1/2 + theta (u_i + s_i + sum_j W_ij (2 q_j - 1)))|`.
pub(crate) fn fixed_point_residual_with(
    legislature: &Legislature,
    params: &ModelParams,
    utility: &UtilitySpec,
    m: &[f64],
    q: &[f64],
    interaction: &DMatrix<f64>,
) -> f64 {
    let rhs = incentive(legislature, params.sigma, utility, m);
    let centered = DVector::from_iterator(q.len(), q.iter().map(|v| 2.0 * v - 1.0));
    let peer = interaction * centered;
    (0..q.len())
        .map(|i| (q[i] - (0.5 + params.theta * (rhs[i] + peer[i]))).abs())
        .fold(0.0, f64::max)
}

/// Baseline interaction matrix `delta G`.
pub fn baseline_interaction(legislature: &Legislature, delta: f64) -> DMatrix<f64> {
    legislature.adjacency() * delta
}

/// Equilibrium voting probabilities conditional on investments `m`.
pub fn conditional_probabilities(
    legislature: &Legislature,
    params: &ModelParams,
    utility: &UtilitySpec,
    m: &[f64],
) -> Result<Vec<f64>> {
    probabilities_with(
        legislature,
        params,
        utility,
        m,
        &baseline_interaction(legislature, params.delta),
    )
}

/// Componentwise residual of the per-legislator best-response equations.
pub fn fixed_point_residual(
    legislature: &Legislature,
    params: &ModelParams,
    utility: &UtilitySpec,
    m: &[f64],
    q: &[f64],
) -> f64 {
    fixed_point_residual_with(
        legislature,
        params,
        utility,
        m,
        q,
        &baseline_interaction(legislature, params.delta),
    )
}

/// Budget allocation maximizing `sum_i I_i u(m_i)` subject to `sum_i m_i = M`.
///
/// Square-root utility uses the closed form `m_i = M I_i^2 / sum_j I_j^2`;
/// every other utility goes through [`allocate_by_dual_bisection`]. Because
/// `u'` is unbounded at zero every legislator receives a positive amount, so
/// the non-negativity constraints never bind.
pub fn optimal_investments(
    influence: &[f64],
    utility: &UtilitySpec,
    budget: f64,
) -> Result<Vec<f64>> {
    check_allocation_inputs(influence, budget)?;
    if utility.is_square_root() {
        let total: f64 = influence.iter().map(|i| i * i).sum();
        Ok(influence.iter().map(|i| budget * i * i / total).collect())
    } else {
        allocate_by_dual_bisection(influence, utility, budget).map(|(m, _)| m)
    }
}

fn check_allocation_inputs(influence: &[f64], budget: f64) -> Result<()> {
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::InvalidParameter {
            name: "budget",
            value: budget,
            reason: "must be finite and positive",
        });
    }
    if influence.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: 0,
        });
    }
    if let Some((index, &value)) = influence
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v > 0.0))
    {
        return Err(Error::NonPositiveInfluence { index, value });
    }
    Ok(())
}

/// Solves the allocation through its scalar dual: find `lambda` with
/// `sum_i (u')^{-1}(lambda / I_i) = M`. The left side is strictly decreasing
/// in `lambda`, so a bracket plus bisection always converges. Returns the
/// allocation and the multiplier `lambda` (in units of `I u'`, without `theta`).
pub fn allocate_by_dual_bisection(
    influence: &[f64],
    utility: &UtilitySpec,
    budget: f64,
) -> Result<(Vec<f64>, f64)> {
    check_allocation_inputs(influence, budget)?;
    let n = influence.len() as f64;
    let allocation = |lambda: f64| -> Vec<f64> {
        influence
            .iter()
            .map(|i| utility.marginal_inverse(lambda / i))
            .collect()
    };
    let spend = |lambda: f64| -> f64 { allocation(lambda).iter().sum() };

    let max_i = influence.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_i = influence.iter().copied().fold(f64::INFINITY, f64::min);

    // hi: spending at most M
    let mut hi = max_i * utility.marginal(budget);
    let mut doublings = 0;
    while spend(hi) > budget {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
            return Err(Error::BisectionFailure(
                "upper multiplier bracket not found",
            ));
        }
    }
    // lo: spending at least M
    let mut lo = min_i * utility.marginal(budget / (n * n));
    doublings = 0;
    while spend(lo) < budget {
        lo /= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS || lo <= 0.0 {
            return Err(Error::BisectionFailure(
                "lower multiplier bracket not found",
            ));
        }
    }

    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let spent = spend(mid);
        if (spent - budget).abs() <= BUDGET_TOLERANCE * budget {
            return Ok((allocation(mid), mid));
        }
        if spent > budget {
            lo = mid;
        } else {
            hi = mid;
        }
        if !(mid > lo && mid < hi) && hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Err(Error::BisectionFailure(
        "budget residual tolerance not reached",
    ))
}

/// `n/2 + theta sum_i I_i u(m_i) + theta sigma (I_F - I_A)`.
pub fn vote_share_closed_form(
    influence: &PartyVector,
    investments: &[f64],
    params: &ModelParams,
    utility: &UtilitySpec,
) -> f64 {
    influence.len() as f64 / 2.0
        + params.theta * weighted_utility(influence.entries(), investments, utility)
        + params.theta * params.sigma * (influence.party_f_sum() - influence.party_a_sum())
}

pub(crate) fn shadow_price(
    theta: f64,
    influence: &[f64],
    investments: &[f64],
    utility: &UtilitySpec,
) -> f64 {
    let sum: f64 = influence
        .iter()
        .zip(investments)
        .map(|(i, m)| i * utility.marginal(*m))
        .sum();
    theta * sum / influence.len() as f64
}

/// Baseline equilibrium: influence, then allocation, then probabilities.
pub fn solve_equilibrium(
    legislature: &Legislature,
    params: &ModelParams,
    utility: &UtilitySpec,
) -> Result<EquilibriumResult> {
    params.check()?;
    utility.check()?;
    let influence = compute_influence(legislature, params.beta())?;
    let investments = optimal_investments(influence.entries(), utility, params.budget)?;
    let probabilities = conditional_probabilities(legislature, params, utility, &investments)?;
    let vote_share = probabilities.iter().sum();
    let shadow_price = shadow_price(params.theta, influence.entries(), &investments, utility);
    let interior = probabilities.iter().all(|q| *q > 0.0 && *q < 1.0);
    Ok(EquilibriumResult {
        mode: Mode::Baseline,
        influence,
        investments,
        probabilities,
        vote_share,
        shadow_price,
        interior,
    })
}

/// Worst-case voting probability bounds per party.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartyBounds {
    pub party: Party,
    /// All budget on one legislator, complete network, everyone else voting for.
    pub upper: f64,
    /// No investment, complete network, everyone else voting against.
    pub lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteriorityReport {
    pub mode: Mode,
    pub f: PartyBounds,
    pub a: PartyBounds,
    pub pass: bool,
    /// Affective mode widens the bounds by `alpha n_{P'}` on each side.
    pub affective_extension: bool,
}

/// Sufficient bounds keeping every voting probability inside (0, 1):
/// `upper(P) = 1/2 + theta (u(M) + delta (n-1) + sigma_P)` and
/// `lower(P) = 1/2 + theta (-delta (n-1) + sigma_P)`.
pub fn check_interiority(
    legislature: &Legislature,
    params: &ModelParams,
    utility: &UtilitySpec,
    mode: Mode,
) -> InteriorityReport {
    let n = legislature.n() as f64;
    let network = params.delta * (n - 1.0);
    let bounds = |party: Party| {
        let sigma_p = match party {
            Party::F => params.sigma,
            Party::A => -params.sigma,
        };
        let affect = match mode {
            Mode::Baseline => 0.0,
            Mode::Affective => params.alpha * legislature.size_of(party.other()) as f64,
        };
        PartyBounds {
            party,
            upper: 0.5 + params.theta * (utility.value(params.budget) + network + affect + sigma_p),
            lower: 0.5 + params.theta * (-network - affect + sigma_p),
        }
    };
    let f = bounds(Party::F);
    let a = bounds(Party::A);
    let pass = [&f, &a].iter().all(|b| b.upper < 1.0 && b.lower > 0.0);
    InteriorityReport {
        mode,
        f,
        a,
        pass,
        affective_extension: mode == Mode::Affective,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn sqrt() -> UtilitySpec {
        UtilitySpec::sqrt()
    }

    #[test]
    fn empty_network_probabilities() {
        let leg = Legislature::empty(2, 3).unwrap();
        let params = ModelParams::new(0.05, 0.4, 0.0, 0.0, 10.0).unwrap();
        let q = conditional_probabilities(&leg, &params, &sqrt(), &[0.0; 5]).unwrap();
        assert_eq!(q, vec![0.5; 5]);
        let params = params.with_sigma(2.0);
        let q = conditional_probabilities(&leg, &params, &sqrt(), &[0.0; 5]).unwrap();
        let want = [0.6, 0.6, 0.4, 0.4, 0.4];
        assert!(linalg::max_abs_diff(&q, &want) < 1e-15);
    }

    #[test]
    fn probabilities_solve_best_response_system() {
        let leg = fixtures::example_network();
        let params = fixtures::example_params();
        let m = [10.0, 40.0, 30.0, 20.0];
        let q = conditional_probabilities(&leg, &params, &sqrt(), &m).unwrap();
        assert!(fixed_point_residual(&leg, &params, &sqrt(), &m, &q) < 1e-12);
    }

    #[test]
    fn rejects_bad_investments() {
        let leg = Legislature::empty(1, 1).unwrap();
        let params = fixtures::example_params();
        assert!(conditional_probabilities(&leg, &params, &sqrt(), &[1.0]).is_err());
        assert!(conditional_probabilities(&leg, &params, &sqrt(), &[1.0, -1.0]).is_err());
    }

    #[test]
    fn closed_form_two_legislators() {
        let m = optimal_investments(&[2.0, 1.0], &sqrt(), 100.0).unwrap();
        assert!(linalg::max_abs_diff(&m, &[80.0, 20.0]) < 1e-12);
        let u = sqrt();
        assert!((2.0 * u.marginal(80.0) - u.marginal(20.0)).abs() < 1e-14);
    }

    #[test]
    fn equal_influence_splits_evenly() {
        for u in [sqrt(), UtilitySpec::power(0.3).unwrap()] {
            let m = optimal_investments(&[1.7; 6], &u, 60.0).unwrap();
            assert!(linalg::max_abs_diff(&m, &[10.0; 6]) < 1e-8);
        }
    }

    #[test]
    fn bisection_agrees_with_closed_forms() {
        let influence = [1.3, 1.0, 2.2, 1.05];
        let (m, _) = allocate_by_dual_bisection(&influence, &sqrt(), 100.0).unwrap();
        let closed = optimal_investments(&influence, &sqrt(), 100.0).unwrap();
        assert!(linalg::max_abs_diff(&m, &closed) < 1e-8);
        // power gamma: m_i ∝ I_i^{1/(1-gamma)}
        let gamma = 0.3;
        let u = UtilitySpec::power(gamma).unwrap();
        let m = optimal_investments(&influence, &u, 100.0).unwrap();
        let w: Vec<f64> = influence
            .iter()
            .map(|i: &f64| i.powf(1.0 / (1.0 - gamma)))
            .collect();
        let total: f64 = w.iter().sum();
        let want: Vec<f64> = w.iter().map(|x| 100.0 * x / total).collect();
        assert!(linalg::max_abs_diff(&m, &want) < 1e-7);
        assert!((m.iter().sum::<f64>() - 100.0).abs() <= 1e-8);
    }

    #[test]
    fn allocation_errors() {
        assert!(matches!(
            optimal_investments(&[1.0, 0.0], &sqrt(), 1.0),
            Err(Error::NonPositiveInfluence { index: 1, .. })
        ));
        assert!(optimal_investments(&[1.0], &sqrt(), 0.0).is_err());
    }

    #[test]
    fn example_investment_change() {
        let params = fixtures::example_params();
        let base = solve_equilibrium(&fixtures::example_network(), &params, &sqrt()).unwrap();
        let plus =
            solve_equilibrium(&fixtures::example_stronger_network(), &params, &sqrt()).unwrap();
        let dm: Vec<f64> = plus
            .investments
            .iter()
            .zip(&base.investments)
            .map(|(a, b)| a - b)
            .collect();
        assert!(linalg::max_abs_diff(&dm, &[-0.2249, -0.2331, -0.2249, 0.6829]) < 5e-4);
    }

    #[test]
    fn empty_network_equilibrium() {
        let leg = Legislature::empty(2, 2).unwrap();
        let params = ModelParams::new(0.03, 0.3, 0.0, 0.0, 100.0).unwrap();
        let eq = solve_equilibrium(&leg, &params, &sqrt()).unwrap();
        assert!(linalg::max_abs_diff(&eq.investments, &[25.0; 4]) < 1e-12);
        assert!((eq.vote_share - (2.0 + 0.03 * 4.0 * 5.0)).abs() < 1e-12);
    }

    #[test]
    fn example_equilibrium_invariants() {
        let leg = fixtures::example_network();
        let params = fixtures::example_params();
        let eq = solve_equilibrium(&leg, &params, &sqrt()).unwrap();
        assert!((eq.investments.iter().sum::<f64>() - 100.0).abs() < 1e-9 * 100.0);
        assert!(eq.kkt_residual(params.theta, &sqrt()) < 1e-8);
        assert!(eq.interior);
        let closed = vote_share_closed_form(&eq.influence, &eq.investments, &params, &sqrt());
        assert!((eq.vote_share - closed).abs() < 1e-9);
        let again = solve_equilibrium(&leg, &params.with_sigma(6.0), &sqrt()).unwrap();
        assert_eq!(eq.investments, again.investments);
    }

    #[test]
    fn interiority_bounds() {
        let leg = fixtures::example_network();
        let params = fixtures::example_params();
        let report = check_interiority(&leg, &params, &sqrt(), Mode::Baseline);
        assert!((report.f.upper - 0.917).abs() < 1e-12);
        assert!((report.f.lower - (0.5 + 0.03 * (-0.9 + 3.0))).abs() < 1e-12);
        assert!((report.a.upper - (0.5 + 0.03 * (10.0 + 0.9 - 3.0))).abs() < 1e-12);
        assert!(report.pass);
        let hot = ModelParams {
            theta: 0.2,
            ..params
        };
        let report = check_interiority(&leg, &hot, &sqrt(), Mode::Baseline);
        assert!((report.f.upper - (0.5 + 0.2 * 13.9)).abs() < 1e-12);
        assert!(!report.pass);
        let cold = ModelParams {
            theta: 1e-9,
            ..params
        };
        let report = check_interiority(&leg, &cold, &sqrt(), Mode::Baseline);
        assert!(report.pass && (report.f.upper - 0.5).abs() < 1e-6);
    }

    #[test]
    fn interiority_affective_widening() {
        let leg = fixtures::example_network();
        let params = fixtures::example_params().with_alpha(2.0);
        let base = check_interiority(&leg, &params, &sqrt(), Mode::Baseline);
        let aff = check_interiority(&leg, &params, &sqrt(), Mode::Affective);
        assert!((aff.f.upper - base.f.upper - 0.03 * 2.0 * 2.0).abs() < 1e-12);
        assert!((base.a.lower - aff.a.lower - 0.03 * 2.0 * 2.0).abs() < 1e-12);
        assert!(aff.affective_extension);
    }
}
