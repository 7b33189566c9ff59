//! Thin dense-solve helpers over nalgebra's LU factorization.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `I - scale * m`.
pub(crate) fn identity_minus(scale: f64, m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::identity(n, n) - m * scale
}

pub(crate) fn solve(
    matrix: DMatrix<f64>,
    rhs: &DVector<f64>,
    what: &'static str,
) -> Result<DVector<f64>> {
    let x = matrix.lu().solve(rhs).ok_or(Error::SingularSystem(what))?;
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::SingularSystem(what))
    }
}

pub(crate) fn inverse(matrix: DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>> {
    let inv = matrix
        .lu()
        .try_inverse()
        .ok_or(Error::SingularSystem(what))?;
    if inv.iter().all(|v| v.is_finite()) {
        Ok(inv)
    } else {
        Err(Error::SingularSystem(what))
    }
}

pub(crate) fn ones(n: usize) -> DVector<f64> {
    DVector::from_element(n, 1.0)
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
