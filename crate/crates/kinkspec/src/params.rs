use serde::{Deserialize, Serialize};

use crate::error::{require, Result};

/// Mass scale `m` and coupling `g`; every other scale is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m: f64,
    pub g: f64,
}

impl ModelParams {
    pub fn new(m: f64, g: f64) -> Result<Self> {
        let p = Self { m, g };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require(self.m.is_finite() && self.m > 0.0, || format!("m must be positive, got {}", self.m))?;
        require(self.g.is_finite() && self.g > 0.0, || format!("g must be positive, got {}", self.g))
    }

    /// Vacuum field value `m/g`.
    pub fn phi0(&self) -> f64 {
        self.m / self.g
    }

    /// Classical rest mass with the coupling scaled out, `4m³/3`.
    pub fn m_cl(&self) -> f64 {
        4.0 * self.m.powi(3) / 3.0
    }

    /// Classical kink mass `m_cl/g²`.
    pub fn big_m_cl(&self) -> f64 {
        self.m_cl() / (self.g * self.g)
    }

    /// Frequency of the shape mode, `√3 m`.
    pub fn omega_d(&self) -> f64 {
        3f64.sqrt() * self.m
    }

    pub fn omega(&self, k: f64) -> f64 {
        (k * k + 4.0 * self.m * self.m).sqrt()
    }

    /// Closed-form semiclassical mass shift `m/(2√3) - 3m/π`.
    pub fn dhn_mass_shift(&self) -> f64 {
        self.m / (2.0 * 3f64.sqrt()) - 3.0 * self.m / std::f64::consts::PI
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { m: 1.0, g: 0.1 }
    }
}
