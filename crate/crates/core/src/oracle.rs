//! Independent validators for the analytic results: Monte Carlo over the
//! preference shocks, plain fixed-point iteration, exhaustive allocation
//! search and the three-member pivot calculation.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::affective::build_hat_matrix;
use crate::equilibrium::{incentive, probabilities_with};
use crate::error::{Error, Result};
use crate::model::{Legislature, Mode, ModelParams};
use crate::statics::interaction;
use crate::utility::UtilitySpec;

/// Identifier of the random generator recorded with every estimate.
pub const GENERATOR_ID: &str = "ChaCha8Rng";
/// Trials per independently seeded stream.
pub const CHUNK_TRIALS: u64 = 65_536;
pub const MAX_FIXED_POINT_ITERATIONS: usize = 100_000;
pub const MAX_BRUTE_FORCE_LEGISLATORS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimulationConfig {
    pub trials: u64,
    pub seed: u64,
    pub mode: Mode,
}

impl SimulationConfig {
    pub fn new(trials: u64, seed: u64, mode: Mode) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidParameter {
                name: "trials",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(SimulationConfig { trials, seed, mode })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub frequencies: Vec<f64>,
    pub analytic: Vec<f64>,
    /// `sqrt(q (1 - q) / trials)` at the analytic probability.
    pub standard_errors: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub generator: &'static str,
}

impl MonteCarloEstimate {
    /// `|freq - q| / se` per legislator.
    pub fn z_scores(&self) -> Vec<f64> {
        self.frequencies
            .iter()
            .zip(&self.analytic)
            .zip(&self.standard_errors)
            .map(|((f, q), se)| {
                let gap = (f - q).abs();
                if gap == 0.0 {
                    0.0
                } else if *se > 0.0 {
                    gap / se
                } else {
                    f64::INFINITY
                }
            })
            .collect()
    }

    pub fn within(&self, standard_errors: f64) -> Vec<bool> {
        self.z_scores()
            .iter()
            .map(|z| *z <= standard_errors)
            .collect()
    }
}

fn mode_interaction(
    legislature: &Legislature,
    params: &ModelParams,
    mode: Mode,
) -> Result<DMatrix<f64>> {
    match mode {
        Mode::Baseline => Ok(interaction(legislature, params)),
        Mode::Affective => build_hat_matrix(legislature, params.delta, params.alpha),
    }
}

/// Simulates votes with beliefs fixed at the analytic probabilities. In each
/// trial legislator `i` draws `eps ~ U[-1/(2 theta), 1/(2 theta)]` and votes
/// for the interest group iff `eps >= -(u(m_i) + s_i + sum_j W_ij (2 q_j - 1))`.
///
/// Trials are split into fixed chunks, each with its own stream of one seeded
/// generator, so the result does not depend on the thread count.
pub fn monte_carlo_frequencies(
    legislature: &Legislature,
    params: &ModelParams,
    utility: &UtilitySpec,
    m: &[f64],
    config: &SimulationConfig,
) -> Result<MonteCarloEstimate> {
    if config.trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let w = mode_interaction(legislature, params, config.mode)?;
    let analytic = probabilities_with(legislature, params, utility, m, &w)?;
    let centered = DVector::from_iterator(analytic.len(), analytic.iter().map(|q| 2.0 * q - 1.0));
    let thresholds: Vec<f64> = (incentive(legislature, params.sigma, utility, m) + &w * centered)
        .iter()
        .map(|h| -h)
        .collect();
    let n = thresholds.len();
    let half_width = 1.0 / (2.0 * params.theta);
    let chunks = config.trials.div_ceil(CHUNK_TRIALS);

    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(chunk);
            let size = CHUNK_TRIALS.min(config.trials - chunk * CHUNK_TRIALS);
            let mut local = vec![0u64; n];
            for _ in 0..size {
                for (count, threshold) in local.iter_mut().zip(&thresholds) {
                    let eps = (rng.gen::<f64>() * 2.0 - 1.0) * half_width;
                    if eps >= *threshold {
                        *count += 1;
                    }
                }
            }
            local
        })
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let trials = config.trials as f64;
    let frequencies = counts.iter().map(|c| *c as f64 / trials).collect();
    let standard_errors = analytic
        .iter()
        .map(|q| (q * (1.0 - q) / trials).max(0.0).sqrt())
        .collect();
    Ok(MonteCarloEstimate {
        frequencies,
        analytic,
        standard_errors,
        trials: config.trials,
        seed: config.seed,
        generator: GENERATOR_ID,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoint {
    pub probabilities: Vec<f64>,
    /// Map applications needed to reach the returned point.
    pub iterations: usize,
}

/// Iterates the best-response map `q <- 1/2 + theta (u + s + W (2q - 1))`
/// from `q = 1/2` until the sup-norm step is below `tol`.
pub fn fixed_point_probabilities(
    legislature: &Legislature,
    params: &ModelParams,
    utility: &UtilitySpec,
    m: &[f64],
    mode: Mode,
    tol: f64,
) -> Result<FixedPoint> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "must be positive",
        });
    }
    if m.len() != legislature.n() {
        return Err(Error::DimensionMismatch {
            expected: legislature.n(),
            actual: m.len(),
        });
    }
    let w = mode_interaction(legislature, params, mode)?;
    let direct = incentive(legislature, params.sigma, utility, m);
    let mut q = DVector::from_element(legislature.n(), 0.5);
    for k in 1..=MAX_FIXED_POINT_ITERATIONS {
        let centered = q.map(|v| 2.0 * v - 1.0);
        let next = (&direct + &w * centered).map(|h| 0.5 + params.theta * h);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NoConvergence(k));
        }
        let step = (&next - &q).amax();
        q = next;
        if step < tol {
            return Ok(FixedPoint {
                probabilities: q.iter().copied().collect(),
                iterations: k - 1,
            });
        }
    }
    Err(Error::NoConvergence(MAX_FIXED_POINT_ITERATIONS))
}

/// Best allocation on the simplex grid with spacing `budget / (grid_points - 1)`.
pub fn brute_force_allocation(
    influence: &[f64],
    utility: &UtilitySpec,
    budget: f64,
    grid_points: usize,
) -> Result<(Vec<f64>, f64)> {
    let n = influence.len();
    if n > MAX_BRUTE_FORCE_LEGISLATORS {
        return Err(Error::TooManyLegislators {
            n,
            max: MAX_BRUTE_FORCE_LEGISLATORS,
        });
    }
    if n == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: 0,
        });
    }
    if grid_points < 2 {
        return Err(Error::InvalidParameter {
            name: "grid_points",
            value: grid_points as f64,
            reason: "need at least 2",
        });
    }
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "budget",
            value: budget,
            reason: "must be finite and positive",
        });
    }
    let units = grid_points - 1;
    let step = budget / units as f64;
    // u at every grid level, shared across legislators
    let levels: Vec<f64> = (0..=units)
        .map(|k| utility.value(k as f64 * step))
        .collect();

    fn search(
        influence: &[f64],
        levels: &[f64],
        remaining: usize,
        chosen: &mut Vec<usize>,
        best: &mut (Vec<usize>, f64),
    ) {
        let depth = chosen.len();
        if depth + 1 == influence.len() {
            chosen.push(remaining);
            let value: f64 = chosen
                .iter()
                .zip(influence)
                .map(|(k, i)| i * levels[*k])
                .sum();
            if value > best.1 {
                *best = (chosen.clone(), value);
            }
            chosen.pop();
            return;
        }
        for k in 0..=remaining {
            chosen.push(k);
            search(influence, levels, remaining - k, chosen, best);
            chosen.pop();
        }
    }

    let mut best = (Vec::new(), f64::NEG_INFINITY);
    search(
        influence,
        &levels,
        units,
        &mut Vec::with_capacity(n),
        &mut best,
    );
    Ok((best.0.iter().map(|k| *k as f64 * step).collect(), best.1))
}

/// Upper bound on how far the best grid allocation can fall below the
/// optimum: every coordinate of the optimum can be rounded to the grid while
/// moving it down by less than one step.
pub fn grid_step_bound(
    influence: &[f64],
    optimum: &[f64],
    utility: &UtilitySpec,
    step: f64,
) -> f64 {
    influence
        .iter()
        .zip(optimum)
        .map(|(i, m)| i * (utility.value(*m) - utility.value((m - step).max(0.0))))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PivotalityReport {
    /// Probability each member is pivotal under majority rule.
    pub pivot: [f64; 3],
    /// Distinct solutions of `pivot_i = 1/3` for all `i` found in the open cube.
    pub equal_third_roots: Vec<[f64; 3]>,
    /// Whether `q = (1/2, 1/2, 1/2)` is among them.
    pub half_is_root: bool,
    /// Sup-norm distance of the probed `q` from `(1/2, 1/2, 1/2)`.
    pub distance_from_half: f64,
    /// Pivot probabilities at `q = (1/2, 1/2, 1/2)`.
    pub pivot_at_half: [f64; 3],
}

fn pivot(q: &[f64; 3]) -> [f64; 3] {
    let p = |j: usize, k: usize| q[j] * (1.0 - q[k]) + q[k] * (1.0 - q[j]);
    [p(1, 2), p(0, 2), p(0, 1)]
}

fn newton_equal_third(start: [f64; 3]) -> Option<[f64; 3]> {
    let mut q = Vector3::from(start);
    for _ in 0..100 {
        let arr = [q[0], q[1], q[2]];
        let pi = pivot(&arr);
        let f = Vector3::new(pi[0] - 1.0 / 3.0, pi[1] - 1.0 / 3.0, pi[2] - 1.0 / 3.0);
        if f.amax() < 1e-14 {
            return q.iter().all(|v| *v > 0.0 && *v < 1.0).then_some(arr);
        }
        let d = |k: usize| 1.0 - 2.0 * q[k];
        let jac = Matrix3::new(0.0, d(2), d(1), d(2), 0.0, d(0), d(1), d(0), 0.0);
        q -= jac.lu().solve(&f)?;
        if q.iter().any(|v| !v.is_finite()) {
            return None;
        }
    }
    None
}

/// Pivot probabilities in a three-member majority vote, plus a multi-start
/// Newton search for the probabilities making every member pivotal with
/// probability one third.
pub fn pivotality_probe(q: [f64; 3]) -> PivotalityReport {
    let grid = [0.05, 0.2, 0.35, 0.65, 0.8, 0.95];
    let mut roots: Vec<[f64; 3]> = Vec::new();
    for &a in &grid {
        for &b in &grid {
            for &c in &grid {
                if let Some(root) = newton_equal_third([a, b, c]) {
                    let fresh = roots
                        .iter()
                        .all(|r| r.iter().zip(&root).any(|(x, y)| (x - y).abs() > 1e-8));
                    if fresh {
                        roots.push(root);
                    }
                }
            }
        }
    }
    roots.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let half_is_root = roots
        .iter()
        .any(|r| r.iter().all(|v| (v - 0.5).abs() < 1e-8));
    PivotalityReport {
        pivot: pivot(&q),
        equal_third_roots: roots,
        half_is_root,
        distance_from_half: q.iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max),
        pivot_at_half: pivot(&[0.5; 3]),
    }
}
