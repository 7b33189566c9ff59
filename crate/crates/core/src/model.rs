//! Domain types shared by every analysis: the two-party legislature with its
//! susceptibility network, scalar model parameters, party-indexed vectors and
//! parameter validation.
//!
//! Legislators are indexed with the whole party-F block first, followed by the
//! party-A block, so party aggregates are sums over contiguous slices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum iterations of the spectral-radius power iteration.
pub const POWER_ITERATIONS: usize = 200;
/// Convergence tolerance of the spectral-radius power iteration.
pub const POWER_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    /// Ideologically aligned with the interest group.
    F,
    /// Ideologically opposed to the interest group.
    A,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::F => Party::A,
            Party::A => Party::F,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Party::F => "F",
            Party::A => "A",
        }
    }
}

/// Which variant of the voting game is being analysed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Susceptibility links only.
    #[default]
    Baseline,
    /// Within-party links plus uniform cross-party affective disutility.
    Affective,
}

/// A two-party legislature and its directed susceptibility network.
///
/// `adjacency[(i, j)]` is the weight with which legislator `i` values voting
/// like legislator `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Legislature {
    n_f: usize,
    n_a: usize,
    adjacency: DMatrix<f64>,
}

/// Builds a validated legislature from an edge list. Unlisted pairs get
/// weight zero; a repeated edge keeps the last weight given.
pub fn build_legislature(
    n_f: usize,
    n_a: usize,
    edges: &[(usize, usize, f64)],
) -> Result<Legislature> {
    if n_f == 0 {
        return Err(Error::EmptyParty("F"));
    }
    if n_a == 0 {
        return Err(Error::EmptyParty("A"));
    }
    let n = n_f + n_a;
    let mut adjacency = DMatrix::zeros(n, n);
    for &(from, to, weight) in edges {
        for index in [from, to] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        if from == to {
            return Err(Error::SelfLoop(from));
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::WeightOutOfRange { from, to, weight });
        }
        adjacency[(from, to)] = weight;
    }
    Ok(Legislature {
        n_f,
        n_a,
        adjacency,
    })
}

impl Legislature {
    /// Validates a dense adjacency matrix under the same rules as [`build_legislature`].
    pub fn from_matrix(n_f: usize, n_a: usize, adjacency: DMatrix<f64>) -> Result<Self> {
        let n = n_f + n_a;
        if adjacency.nrows() != n || adjacency.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: adjacency.nrows().max(adjacency.ncols()),
            });
        }
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, adjacency[(i, j)]))
            .filter(|&(_, _, w)| w != 0.0)
            .collect();
        build_legislature(n_f, n_a, &edges)
    }

    /// The legislature with no links at all.
    pub fn empty(n_f: usize, n_a: usize) -> Result<Self> {
        build_legislature(n_f, n_a, &[])
    }

    pub fn n(&self) -> usize {
        self.n_f + self.n_a
    }

    pub fn n_f(&self) -> usize {
        self.n_f
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn size_of(&self, party: Party) -> usize {
        match party {
            Party::F => self.n_f,
            Party::A => self.n_a,
        }
    }

    pub fn party_of(&self, i: usize) -> Party {
        if i < self.n_f {
            Party::F
        } else {
            Party::A
        }
    }

    /// Index range of a party's block.
    pub fn range(&self, party: Party) -> std::ops::Range<usize> {
        match party {
            Party::F => 0..self.n_f,
            Party::A => self.n_f..self.n(),
        }
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.adjacency[(from, to)]
    }

    /// The `rows × cols` block of links from party `rows` to party `cols`.
    pub fn block(&self, rows: Party, cols: Party) -> DMatrix<f64> {
        let r = self.range(rows);
        let c = self.range(cols);
        self.adjacency
            .view((r.start, c.start), (r.len(), c.len()))
            .into_owned()
    }

    /// Reassembles a legislature from its four party blocks.
    pub fn from_blocks(
        ff: &DMatrix<f64>,
        fa: &DMatrix<f64>,
        af: &DMatrix<f64>,
        aa: &DMatrix<f64>,
    ) -> Result<Self> {
        let n_f = ff.nrows();
        let n_a = aa.nrows();
        if ff.ncols() != n_f || aa.ncols() != n_a {
            return Err(Error::DimensionMismatch {
                expected: n_f,
                actual: ff.ncols(),
            });
        }
        if fa.shape() != (n_f, n_a) || af.shape() != (n_a, n_f) {
            return Err(Error::DimensionMismatch {
                expected: n_f * n_a,
                actual: fa.len().max(af.len()),
            });
        }
        let n = n_f + n_a;
        let mut adjacency = DMatrix::zeros(n, n);
        adjacency.view_mut((0, 0), (n_f, n_f)).copy_from(ff);
        adjacency.view_mut((0, n_f), (n_f, n_a)).copy_from(fa);
        adjacency.view_mut((n_f, 0), (n_a, n_f)).copy_from(af);
        adjacency.view_mut((n_f, n_f), (n_a, n_a)).copy_from(aa);
        Self::from_matrix(n_f, n_a, adjacency)
    }

    /// Non-zero links in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let w = self.adjacency[(i, j)];
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    /// Copy of this legislature with the link `from -> to` set to `weight`.
    pub fn with_link(&self, from: usize, to: usize, weight: f64) -> Result<Self> {
        let mut edges = self.edges();
        edges.push((from, to, weight));
        build_legislature(self.n_f, self.n_a, &edges)
    }

    /// Copy with several links set.
    pub fn with_links(&self, links: &[(usize, usize, f64)]) -> Result<Self> {
        let mut edges = self.edges();
        edges.extend_from_slice(links);
        build_legislature(self.n_f, self.n_a, &edges)
    }

    /// Number of non-zero links between the two parties (either direction).
    pub fn cross_party_links(&self) -> usize {
        self.edges()
            .iter()
            .filter(|&&(i, j, _)| self.party_of(i) != self.party_of(j))
            .count()
    }

    /// `self` is stronger than `base`: same parties, every weight at least
    /// as large, and at least one strictly larger.
    pub fn is_stronger_than(&self, base: &Legislature) -> bool {
        if self.n_f != base.n_f || self.n_a != base.n_a {
            return false;
        }
        let mut strict = false;
        for (new, old) in self.adjacency.iter().zip(base.adjacency.iter()) {
            if new < old {
                return false;
            }
            strict |= new > old;
        }
        strict
    }

    /// Whether `to` can be reached from `from` along directed links
    /// (every legislator reaches itself).
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            for (w, seen_w) in seen.iter_mut().enumerate() {
                if !*seen_w && self.adjacency[(v, w)] > 0.0 {
                    *seen_w = true;
                    stack.push(w);
                }
            }
        }
        false
    }

    /// The party-sign vector: `+sigma` on party F, `-sigma` on party A.
    pub fn sign_vector(&self, sigma: f64) -> Vec<f64> {
        (0..self.n())
            .map(|i| match self.party_of(i) {
                Party::F => sigma,
                Party::A => -sigma,
            })
            .collect()
    }
}

/// Scalar parameters of the voting game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Density of the uniform preference shock on `[-1/(2 theta), 1/(2 theta)]`.
    pub theta: f64,
    /// Network utility per like-voting contact.
    pub delta: f64,
    /// Ideological polarization.
    pub sigma: f64,
    /// Affective polarization.
    pub alpha: f64,
    /// Interest-group budget.
    pub budget: f64,
}

impl ModelParams {
    pub fn new(theta: f64, delta: f64, sigma: f64, alpha: f64, budget: f64) -> Result<Self> {
        let params = ModelParams {
            theta,
            delta,
            sigma,
            alpha,
            budget,
        };
        params.check()?;
        Ok(params)
    }

    pub fn check(&self) -> Result<()> {
        let positive = [
            ("theta", self.theta),
            ("delta", self.delta),
            ("budget", self.budget),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and positive",
                });
            }
        }
        for (name, value) in [("sigma", self.sigma), ("alpha", self.alpha)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and non-negative",
                });
            }
        }
        Ok(())
    }

    /// Walk decay factor `2 theta delta`.
    pub fn beta(&self) -> f64 {
        2.0 * self.theta * self.delta
    }

    /// Rescaled affective polarization `2 theta alpha`.
    pub fn alpha_tilde(&self) -> f64 {
        2.0 * self.theta * self.alpha
    }

    pub fn with_sigma(self, sigma: f64) -> Self {
        ModelParams { sigma, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        ModelParams { alpha, ..self }
    }
}

/// A per-legislator vector with its party block sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartyVector {
    entries: Vec<f64>,
    n_f: usize,
    party_f_sum: f64,
    party_a_sum: f64,
}

impl PartyVector {
    pub fn new(entries: Vec<f64>, n_f: usize) -> Self {
        assert!(n_f <= entries.len(), "party F block larger than the vector");
        let party_f_sum = entries[..n_f].iter().sum();
        let party_a_sum = entries[n_f..].iter().sum();
        PartyVector {
            entries,
            n_f,
            party_f_sum,
            party_a_sum,
        }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_f(&self) -> usize {
        self.n_f
    }

    pub fn party_f_sum(&self) -> f64 {
        self.party_f_sum
    }

    pub fn party_a_sum(&self) -> f64 {
        self.party_a_sum
    }

    pub fn party_sum(&self, party: Party) -> f64 {
        match party {
            Party::F => self.party_f_sum,
            Party::A => self.party_a_sum,
        }
    }

    pub fn block(&self, party: Party) -> &[f64] {
        match party {
            Party::F => &self.entries[..self.n_f],
            Party::A => &self.entries[self.n_f..],
        }
    }

    /// Entry-wise `self - other`.
    pub fn difference(&self, other: &PartyVector) -> PartyVector {
        assert_eq!(self.len(), other.len());
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        PartyVector::new(entries, self.n_f)
    }

    pub fn scaled_blocks(&self, f_factor: f64, a_factor: f64) -> PartyVector {
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if i < self.n_f {
                    v * f_factor
                } else {
                    v * a_factor
                }
            })
            .collect();
        PartyVector::new(entries, self.n_f)
    }
}

impl std::ops::Index<usize> for PartyVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// Estimate of the spectral radius of a non-negative matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralEstimate {
    /// Collatz–Wielandt upper estimate; never below the true radius.
    pub radius: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Spectral radius of a non-negative square matrix by power iteration on the
/// shifted matrix `A + I`, whose Perron root is `rho(A) + 1` and which is
/// aperiodic, so periodic networks (e.g. a 2-cycle) still converge.
///
/// The reported radius is the Collatz–Wielandt bound `max_i (Bx)_i / x_i - 1`
/// with `B = A + I`, which is non-increasing along the iteration. A matrix
/// whose graph has no cycle is nilpotent, where power iteration converges
/// only like `1/k`, so that case is detected first and reported as exactly 0.
pub fn spectral_radius(matrix: &DMatrix<f64>) -> SpectralEstimate {
    let n = matrix.nrows();
    if n == 0 || is_acyclic(matrix) {
        return SpectralEstimate {
            radius: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let shifted = matrix + DMatrix::identity(n, n);
    let mut x = nalgebra::DVector::from_element(n, 1.0);
    let mut previous = f64::INFINITY;
    for iteration in 1..=POWER_ITERATIONS {
        let y = &shifted * &x;
        let bound = y
            .iter()
            .zip(x.iter())
            .map(|(yi, xi)| yi / xi)
            .fold(f64::NEG_INFINITY, f64::max);
        let norm = y.sum();
        x = y / norm;
        if (previous - bound).abs() < POWER_TOLERANCE {
            return SpectralEstimate {
                radius: (bound - 1.0).max(0.0),
                iterations: iteration,
                converged: true,
            };
        }
        previous = bound;
    }
    SpectralEstimate {
        radius: (previous - 1.0).max(0.0),
        iterations: POWER_ITERATIONS,
        converged: false,
    }
}

/// Kahn's algorithm on the graph of non-zero entries.
fn is_acyclic(matrix: &DMatrix<f64>) -> bool {
    let n = matrix.nrows();
    let mut indegree: Vec<usize> = (0..n)
        .map(|j| (0..n).filter(|&i| matrix[(i, j)] != 0.0).count())
        .collect();
    let mut ready: Vec<usize> = (0..n).filter(|&j| indegree[j] == 0).collect();
    let mut removed = 0;
    while let Some(i) = ready.pop() {
        removed += 1;
        for j in 0..n {
            if matrix[(i, j)] != 0.0 {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(j);
                }
            }
        }
    }
    removed == n
}

/// Diagnostics produced by [`validate_params`]. Nothing here is fatal by
/// itself; callers decide.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub mode: Mode,
    /// `beta * n`, the conservative sufficient quantity.
    pub beta_n: f64,
    pub beta_n_below_one: bool,
    pub spectral: SpectralEstimate,
    /// `beta * rho(G)`.
    pub beta_rho: f64,
    pub beta_rho_below_one: bool,
    /// Only populated in affective mode.
    pub affective: Option<AffectiveValidation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffectiveValidation {
    pub cross_party_links: usize,
    /// `None` when the within-party influence could not be computed.
    pub alpha_hat: Option<f64>,
    pub alpha_below_hat: bool,
}

impl ValidationReport {
    /// The invertibility condition needed for every computation in `mode`.
    pub fn is_solvable(&self) -> bool {
        match &self.affective {
            None => self.beta_rho_below_one,
            Some(a) => self.beta_rho_below_one && a.cross_party_links == 0 && a.alpha_below_hat,
        }
    }

    /// Solvable and the sufficient `beta * n < 1` condition holds too.
    pub fn passes(&self) -> bool {
        self.is_solvable() && self.beta_n_below_one
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.beta_n_below_one {
            out.push(format!(
                "beta*n = {:.6} >= 1 (sufficient condition fails)",
                self.beta_n
            ));
        }
        if !self.beta_rho_below_one {
            out.push(format!(
                "beta*rho(G) = {:.6} >= 1 (system not invertible)",
                self.beta_rho
            ));
        }
        if let Some(a) = &self.affective {
            if a.cross_party_links > 0 {
                out.push(format!(
                    "{} cross-party link(s) present in affective mode",
                    a.cross_party_links
                ));
            }
            if !a.alpha_below_hat {
                match a.alpha_hat {
                    Some(h) => out.push(format!("alpha is not below alpha_hat = {h:.6}")),
                    None => out.push("alpha_hat undefined".to_string()),
                }
            }
        }
        out
    }
}

/// Checks the invertibility conditions for `mode`. Always returns a report.
pub fn validate_params(
    legislature: &Legislature,
    params: &ModelParams,
    mode: Mode,
) -> ValidationReport {
    let beta = params.beta();
    let beta_n = beta * legislature.n() as f64;
    let spectral = spectral_radius(legislature.adjacency());
    let beta_rho = beta * spectral.radius;
    let affective = match mode {
        Mode::Baseline => None,
        Mode::Affective => {
            let alpha_hat = crate::affective::within_party_influence(legislature, beta)
                .ok()
                .map(|i0| {
                    crate::affective::alpha_hat(params.theta, i0.party_f_sum(), i0.party_a_sum())
                });
            Some(AffectiveValidation {
                cross_party_links: legislature.cross_party_links(),
                alpha_hat,
                alpha_below_hat: alpha_hat.is_some_and(|h| params.alpha < h),
            })
        }
    };
    ValidationReport {
        mode,
        beta_n,
        beta_n_below_one: beta_n < 1.0,
        spectral,
        beta_rho,
        beta_rho_below_one: beta_rho < 1.0,
        affective,
    }
}
