//! Walk-sum influence of legislators.
//!
//! Influence is `I = (I - beta G^T)^{-1} 1`: legislator `i`'s influence is one
//! plus the `beta`-discounted influence of everyone directly susceptible to
//! `i`. Entry `x_ij` of the walk matrix counts discounted walks from `j` to
//! `i`, and influence is its row sum.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{Legislature, PartyVector};

/// `X = (I - beta G^T)^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkMatrix {
    entries: DMatrix<f64>,
    beta: f64,
    n_f: usize,
}

impl WalkMatrix {
    pub fn compute(legislature: &Legislature, beta: f64) -> Result<Self> {
        let system = linalg::identity_minus(beta, &legislature.adjacency().transpose());
        let entries = linalg::inverse(system, "I - beta G^T")?;
        Ok(WalkMatrix {
            entries,
            beta,
            n_f: legislature.n_f(),
        })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Discounted walks from `j` to `i`.
    pub fn x(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Row sums, i.e. the influence vector.
    pub fn influence(&self) -> PartyVector {
        let sums = self.entries.row_iter().map(|r| r.sum()).collect();
        PartyVector::new(sums, self.n_f)
    }

    /// Rank-one update for a new unit link `from -> to` (legislator `from`
    /// becomes susceptible to `to`). Returns the updated walk matrix and the
    /// change in every legislator's influence,
    /// `dI_k = beta I_from x_{k,to} / (1 - beta x_{from,to})`.
    pub fn add_unit_link(&self, from: usize, to: usize) -> Result<(WalkMatrix, Vec<f64>)> {
        let n = self.entries.nrows();
        let denom = 1.0 - self.beta * self.x(from, to);
        if !(denom > 0.0) {
            return Err(Error::DenominatorNonPositive(denom));
        }
        let influence_from: f64 = self.entries.row(from).sum();
        let scale = self.beta * influence_from / denom;
        let delta: Vec<f64> = (0..n).map(|k| scale * self.x(k, to)).collect();

        // X+ = X + beta X e_to e_from^T X / (1 - beta x_{from,to})
        let column = self.entries.column(to).into_owned();
        let row = self.entries.row(from).into_owned();
        let entries = &self.entries + (column * row) * (self.beta / denom);
        Ok((
            WalkMatrix {
                entries,
                beta: self.beta,
                n_f: self.n_f,
            },
            delta,
        ))
    }
}

/// Influence vector by dense direct solve of `(I - beta G^T) I = 1`.
pub fn compute_influence(legislature: &Legislature, beta: f64) -> Result<PartyVector> {
    let system = linalg::identity_minus(beta, &legislature.adjacency().transpose());
    let solution = linalg::solve(system, &linalg::ones(legislature.n()), "I - beta G^T")?;
    Ok(PartyVector::new(
        solution.iter().copied().collect(),
        legislature.n_f(),
    ))
}

/// Influence after adding the unit link `from -> to`, by Sherman–Morrison on
/// the prior walk matrix.
pub fn incremental_influence(
    legislature: &Legislature,
    beta: f64,
    new_link: (usize, usize),
) -> Result<PartyVector> {
    let (from, to) = new_link;
    let n = legislature.n();
    for index in [from, to] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    if from == to {
        return Err(Error::SelfLoop(from));
    }
    if legislature.weight(from, to) != 0.0 {
        return Err(Error::LinkAlreadyPresent(from, to));
    }
    let walks = WalkMatrix::compute(legislature, beta)?;
    let prior = walks.influence();
    let (_, delta) = walks.add_unit_link(from, to)?;
    let updated = prior
        .entries()
        .iter()
        .zip(&delta)
        .map(|(i, d)| i + d)
        .collect();
    Ok(PartyVector::new(updated, legislature.n_f()))
}

/// Diagonal and off-diagonal entries of `(I - beta G^c)^{-1}` for the
/// complete network on `n` legislators.
pub fn complete_network_entries(n: usize, beta: f64) -> Result<(f64, f64)> {
    let nf = n as f64;
    let denom = 1.0 - (nf - 2.0) * beta - (nf - 1.0) * beta * beta;
    if !(denom > 0.0) {
        return Err(Error::DegenerateDenominator(denom));
    }
    Ok(((1.0 - (nf - 2.0) * beta) / denom, beta / denom))
}

/// `max_i |I_i - 1 - beta sum_j g_ji I_j|`.
pub fn recursion_residual(legislature: &Legislature, beta: f64, influence: &[f64]) -> f64 {
    let g = legislature.adjacency();
    (0..legislature.n())
        .map(|i| {
            let inflow: f64 = (0..legislature.n()).map(|j| g[(j, i)] * influence[j]).sum();
            (influence[i] - 1.0 - beta * inflow).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{build_legislature, Legislature};

    fn complete(n_f: usize, n_a: usize) -> Legislature {
        let n = n_f + n_a;
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j, 1.0)))
            .collect();
        build_legislature(n_f, n_a, &edges).unwrap()
    }

    #[test]
    fn empty_network_has_unit_influence() {
        let leg = Legislature::empty(3, 2).unwrap();
        let inf = compute_influence(&leg, 0.15).unwrap();
        assert_eq!(inf.entries(), &[1.0; 5]);
        assert_eq!(inf.party_f_sum(), 3.0);
    }

    #[test]
    fn example_network_influence() {
        // I_F1 = I_A1 = 1/(1-beta), I_F2 = 1 + 2 beta/(1-beta), I_A2 = 1
        let beta = 0.018;
        let inf = compute_influence(&fixtures::example_network(), beta).unwrap();
        let side = 1.0 / (1.0 - beta);
        let expected = [side, 1.0 + 2.0 * beta * side, side, 1.0];
        assert!(linalg::max_abs_diff(inf.entries(), &expected) < 1e-14);
        assert!(inf[1] > inf[0] && inf[0] == inf[2] && inf[2] > inf[3]);
        assert!(recursion_residual(&fixtures::example_network(), beta, inf.entries()) < 1e-12);
    }

    #[test]
    fn complete_network_three() {
        let inf = compute_influence(&complete(2, 1), 0.1).unwrap();
        for v in inf.entries() {
            assert!((v - 1.25).abs() < 1e-12);
        }
        let (d, od) = complete_network_entries(3, 0.1).unwrap();
        assert!((d - 0.9 / 0.88).abs() < 1e-12);
        assert!((od - 0.1 / 0.88).abs() < 1e-12);
        assert!((d + 2.0 * od - 1.25).abs() < 1e-12);
        let walks = WalkMatrix::compute(&complete(2, 1), 0.1).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { d } else { od };
                assert!((walks.x(i, j) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn complete_network_two_and_zero_beta() {
        let (d, od) = complete_network_entries(2, 0.1).unwrap();
        assert!((d - 1.0 / 0.99).abs() < 1e-12);
        assert!((od - 0.1 / 0.99).abs() < 1e-12);
        assert_eq!(complete_network_entries(7, 0.0).unwrap(), (1.0, 0.0));
        assert!(matches!(
            complete_network_entries(4, 0.5),
            Err(Error::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn complete_network_matches_matrix_for_many_sizes() {
        for n in 2..8 {
            let beta = 0.9 / n as f64;
            let (d, od) = complete_network_entries(n, beta).unwrap();
            let walks = WalkMatrix::compute(&complete(1, n - 1), beta).unwrap();
            assert!((walks.x(0, 0) - d).abs() < 1e-10);
            assert!((walks.x(0, 1) - od).abs() < 1e-10);
        }
    }

    #[test]
    fn single_link_on_empty_network() {
        let leg = Legislature::empty(1, 2).unwrap();
        let beta = 0.2;
        let after = incremental_influence(&leg, beta, (1, 2)).unwrap();
        assert_eq!(after.entries(), &[1.0, 1.0, 1.0 + beta]);
    }

    #[test]
    fn example_link_addition() {
        let walks = WalkMatrix::compute(&fixtures::example_network(), 0.018).unwrap();
        let (_, delta) = walks.add_unit_link(1, 3).unwrap();
        assert_eq!(&delta[..3], &[0.0, 0.0, 0.0]);
        assert!((delta[3] - 0.0187).abs() < 5e-5);
        let after = incremental_influence(
            &fixtures::example_network(),
            0.018,
            fixtures::EXAMPLE_NEW_LINK,
        )
        .unwrap();
        let full = compute_influence(&fixtures::example_stronger_network(), 0.018).unwrap();
        assert!(linalg::max_abs_diff(after.entries(), full.entries()) < 1e-12);
    }

    #[test]
    fn incremental_errors() {
        let leg = fixtures::example_network();
        assert_eq!(
            incremental_influence(&leg, 0.018, (0, 1)),
            Err(Error::LinkAlreadyPresent(0, 1))
        );
        assert_eq!(
            incremental_influence(&leg, 0.018, (2, 2)),
            Err(Error::SelfLoop(2))
        );
        let cycle = build_legislature(1, 1, &[(1, 0, 1.0)]).unwrap();
        // x_01 = 1 at beta = 1, so closing the 2-cycle zeroes the denominator
        assert!(incremental_influence(&cycle, 1.0, (0, 1)).is_err());
    }

    #[test]
    fn walk_matrix_update_matches_recompute() {
        let leg = fixtures::example_network();
        let walks = WalkMatrix::compute(&leg, 0.018).unwrap();
        let (updated, _) = walks.add_unit_link(1, 3).unwrap();
        let full = WalkMatrix::compute(&fixtures::example_stronger_network(), 0.018).unwrap();
        assert!((updated.entries() - full.entries()).amax() < 1e-12);
        for i in 0..4 {
            assert!(walks.x(i, i) >= 1.0);
        }
    }
}
