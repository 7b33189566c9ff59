//! Resource-utility families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A strictly increasing, strictly concave resource utility with
/// `u(0) = 0` and `u'(m) -> infinity` as `m -> 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum UtilitySpec {
    /// `u(m) = m^gamma`, `0 < gamma < 1`.
    Power { gamma: f64 },
}

impl Default for UtilitySpec {
    fn default() -> Self {
        UtilitySpec::Power { gamma: 0.5 }
    }
}

impl UtilitySpec {
    pub fn power(gamma: f64) -> Result<Self> {
        let spec = UtilitySpec::Power { gamma };
        spec.check()?;
        Ok(spec)
    }

    pub fn sqrt() -> Self {
        UtilitySpec::Power { gamma: 0.5 }
    }

    pub fn check(&self) -> Result<()> {
        match *self {
            UtilitySpec::Power { gamma } if gamma > 0.0 && gamma < 1.0 => Ok(()),
            UtilitySpec::Power { gamma } => Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "power utility needs 0 < gamma < 1",
            }),
        }
    }

    pub fn value(&self, m: f64) -> f64 {
        match *self {
            // sqrt is exact where powf(0.5) may be off by an ulp
            UtilitySpec::Power { gamma: 0.5 } => m.sqrt(),
            UtilitySpec::Power { gamma } => m.powf(gamma),
        }
    }

    pub fn marginal(&self, m: f64) -> f64 {
        match *self {
            UtilitySpec::Power { gamma } => gamma * m.powf(gamma - 1.0),
        }
    }

    /// Inverse of [`marginal`](Self::marginal) on `(0, infinity)`.
    pub fn marginal_inverse(&self, y: f64) -> f64 {
        match *self {
            UtilitySpec::Power { gamma } => (y / gamma).powf(1.0 / (gamma - 1.0)),
        }
    }

    /// True when the optimal allocation has the closed form `m_i ∝ I_i^2`.
    pub fn is_square_root(&self) -> bool {
        matches!(*self, UtilitySpec::Power { gamma } if gamma == 0.5)
    }
}
