use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Field;

/// Relative size of the default sensitivity floor against `inf v0`.
pub const DEFAULT_ETA_FACTOR: f64 = 1e-10;

/// Coefficients of the chemotaxis-consumption system with source
/// `f(u) = κu − μu^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Chemotactic sensitivity χ > 0.
    pub chi: f64,
    /// Growth rate κ ≥ 0.
    pub kappa: f64,
    /// Crowding coefficient μ > 0.
    pub mu: f64,
    /// Source exponent α ≥ 2.
    pub alpha: f64,
    /// Floor η > 0 below which the sensitivity `χ/v` is capped.
    pub eta: f64,
}

impl ModelParams {
    /// Logistic model (α = 2) with the sensitivity floor derived from `inf v0`.
    pub fn logistic(chi: f64, kappa: f64, mu: f64, inf_v0: f64) -> Result<Self> {
        ModelParams { chi, kappa, mu, alpha: 2.0, eta: DEFAULT_ETA_FACTOR * inf_v0 }.validated()
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        self.eta = eta;
        self.validated()
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.alpha = alpha;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.chi.is_finite() && self.chi > 0.0) {
            return bad(format!("chi must be positive, got {}", self.chi));
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return bad(format!("kappa must be nonnegative, got {}", self.kappa));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if !(self.alpha.is_finite() && self.alpha >= 2.0) {
            return bad(format!("source exponent alpha must be >= 2, got {}", self.alpha));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return bad(format!("sensitivity floor eta must be positive, got {}", self.eta));
        }
        Ok(())
    }

    /// Logistic carrying capacity `(κ/μ)^{1/(α−1)}`.
    pub fn equilibrium_density(&self) -> f64 {
        if self.alpha == 2.0 {
            self.kappa / self.mu
        } else {
            (self.kappa / self.mu).powf(1.0 / (self.alpha - 1.0))
        }
    }

    #[inline]
    pub(crate) fn source(&self, u: f64) -> f64 {
        if self.alpha == 2.0 {
            self.kappa * u - self.mu * u * u
        } else {
            self.kappa * u - self.mu * u.powf(self.alpha)
        }
    }
}

/// Pointwise `κu − μu^α`. Rejects negative densities.
pub fn source_term(u: &Field, params: &ModelParams) -> Result<Field> {
    if let Some((cell, &value)) = u.values().iter().enumerate().find(|(_, &x)| x < 0.0) {
        return Err(Error::NegativeDensity { cell, value });
    }
    Ok(u.map(|x| params.source(x)))
}

/// Sensitivity `χ/v` capped at `2χ/η` near the singularity.
///
/// Equals `χ/v` for `v ≥ η` and `2χ/η` for `v ≤ η/2`; in between the two are
/// blended with a decreasing cubic smoothstep, so the result is continuous and
/// monotone in `v`.
#[inline]
pub fn sensitivity(v: f64, chi: f64, eta: f64) -> f64 {
    if v >= eta {
        chi / v
    } else if v <= 0.5 * eta {
        2.0 * chi / eta
    } else {
        let s = (v - 0.5 * eta) / (0.5 * eta);
        let zeta = 1.0 - s * s * (3.0 - 2.0 * s);
        zeta * (2.0 * chi / eta) + (1.0 - zeta) * (chi / v)
    }
}

pub fn regularized_sensitivity(v: &Field, chi: f64, eta: f64) -> Field {
    v.map(|x| sensitivity(x, chi, eta))
}
