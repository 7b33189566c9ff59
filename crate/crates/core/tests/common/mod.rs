#![allow(dead_code)]

use polinflux::{build_legislature, Legislature};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random network on `n_f + n_a` legislators. Each ordered pair is linked
/// with probability `density`; weights are 1 or uniform in (0, 1].
pub fn random_legislature(
    rng: &mut ChaCha8Rng,
    n_f: usize,
    n_a: usize,
    density: f64,
    weighted: bool,
    cross_party: bool,
) -> Legislature {
    let n = n_f + n_a;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || (!cross_party && (i < n_f) != (j < n_f)) {
                continue;
            }
            if rng.gen::<f64>() < density {
                let w = if weighted {
                    1.0 - rng.gen::<f64>()
                } else {
                    1.0
                };
                edges.push((i, j, w));
            }
        }
    }
    build_legislature(n_f, n_a, &edges).unwrap()
}

pub fn dense(leg: &Legislature) -> Vec<Vec<f64>> {
    let n = leg.n();
    (0..n)
        .map(|i| (0..n).map(|j| leg.weight(i, j)).collect())
        .collect()
}

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            let pivot_row = a[col].clone();
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x
}

/// Influence as the truncated walk sum `sum_k beta^k (G^T)^k 1`.
pub fn neumann_influence(leg: &Legislature, beta: f64, terms: usize) -> Vec<f64> {
    let g = dense(leg);
    let n = leg.n();
    let mut term = vec![1.0; n];
    let mut total = term.clone();
    for _ in 0..terms {
        term = (0..n)
            .map(|i| beta * (0..n).map(|j| g[j][i] * term[j]).sum::<f64>())
            .collect();
        for i in 0..n {
            total[i] += term[i];
        }
    }
    total
}

/// `(I - scale M^T)^{-1} 1` for a dense matrix.
pub fn transpose_system_influence(m: &[Vec<f64>], scale: f64) -> Vec<f64> {
    let n = m.len();
    let a = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 1.0 } else { 0.0 } - scale * m[j][i])
                .collect()
        })
        .collect();
    gauss_solve(a, vec![1.0; n])
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
