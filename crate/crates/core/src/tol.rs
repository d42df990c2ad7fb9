use crate::error::{Error, Result};
use alloc::format;

/// Numerical thresholds shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tolerances {
    /// Residual bound for accepting `F(X) = A`.
    pub eps_residual: f64,
    /// Relative threshold for treating a discriminant (or eigenvalue) as zero.
    pub eps_disc: f64,
    /// Relative radius within which two roots or orbit parameters coincide.
    pub cluster_radius: f64,
    /// Relative singular-value cutoff for numerical rank.
    pub eps_rank: f64,
    /// Relative determinant cutoff for invertibility.
    pub eps_singular: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_residual: 1e-9,
            eps_disc: 1e-9,
            cluster_radius: 1e-6,
            eps_rank: 1e-6,
            eps_singular: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eps_residual", self.eps_residual),
            ("eps_disc", self.eps_disc),
            ("cluster_radius", self.cluster_radius),
            ("eps_rank", self.eps_rank),
            ("eps_singular", self.eps_singular),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Whether two parameters agree within the cluster radius, scaled by magnitude.
    pub fn same_param(&self, x: f64, y: f64) -> bool {
        let scale = 1f64.max(x.abs()).max(y.abs());
        (x - y).abs() <= self.cluster_radius * scale
    }
}
