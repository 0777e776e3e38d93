//! Run configuration, read from and written to TOML.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::grid::{Grid, MomentumGrid, MomentumSpec};
use crate::mollifier::{Mollifier, DEFAULT_XI_NODES};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub x_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MollifierConfig {
    pub xi_nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MassShiftConfig {
    pub x_max: f64,
    pub h: f64,
    pub q_max: f64,
    pub order: usize,
}

/// θ deformation for the 𝕊 diagnostics and packet width σ for the Q sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeformationConfig {
    pub theta: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketConfig {
    pub n_max: usize,
    pub times: Vec<f64>,
    pub q_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FockConfig {
    pub modes: usize,
    pub k_max: f64,
    pub n_max: usize,
    pub trials: usize,
    pub couplings: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub model: ModelParams,
    pub grid: GridConfig,
    pub momentum: MomentumSpec,
    pub mollifier: MollifierConfig,
    /// Cutoffs in units of `m`.
    pub kappas: Vec<f64>,
    pub mass_shift: MassShiftConfig,
    pub deformation: DeformationConfig,
    pub wavepacket: PacketConfig,
    pub fock: FockConfig,
    pub output: OutputConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { x_max: 20.0, points: 4096 }
    }
}

impl Default for MollifierConfig {
    fn default() -> Self {
        Self { xi_nodes: DEFAULT_XI_NODES }
    }
}

impl Default for MassShiftConfig {
    fn default() -> Self {
        Self { x_max: 20.0, h: 0.1, q_max: crate::kernels::Q_MAX, order: 16 }
    }
}

impl Default for DeformationConfig {
    fn default() -> Self {
        Self { theta: 0.0, sigma: 1.0 }
    }
}

impl Default for PacketConfig {
    fn default() -> Self {
        Self { n_max: 4, times: vec![0.0, 1.0, 2.0, 4.0], q_points: 201 }
    }
}

impl Default for FockConfig {
    fn default() -> Self {
        Self { modes: 4, k_max: 3.0, n_max: 8, trials: 50, couplings: vec![0.2, 0.1, 0.05] }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), formats: vec![Format::Csv] }
    }
}

/// Defaults are stated for `m = 1`; lengths scale as `1/m` and momenta as `m`.
impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            model: ModelParams::default(),
            grid: GridConfig::default(),
            momentum: MomentumSpec { k_max: 40.0, panel_width: 0.25, order: 8 },
            mollifier: MollifierConfig::default(),
            kappas: vec![250.0, 500.0, 1000.0, 2000.0],
            mass_shift: MassShiftConfig::default(),
            deformation: DeformationConfig::default(),
            wavepacket: PacketConfig::default(),
            fock: FockConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidParam(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.grid()?;
        MomentumGrid::new(self.momentum)?;
        self.mollifiers()?;
        require(!self.kappas.is_empty(), || "empty cutoff schedule".into())?;
        require(self.kappas.iter().all(|&k| k.is_finite() && k > 1.0), || "cutoffs must exceed m".into())?;
        let ms = &self.mass_shift;
        require(ms.x_max > 0.0 && ms.h > 0.0 && ms.h < ms.x_max, || "mass-shift grid must satisfy 0 < h < x_max".into())?;
        require(ms.q_max > 1.0 && ms.order >= 2, || "mass-shift q_max > 1 and order ≥ 2 required".into())?;
        let d = &self.deformation;
        require(d.theta.is_finite() && (0.0..=1.0).contains(&d.theta), || "theta must lie in [0, 1]".into())?;
        require(d.sigma.is_finite() && d.sigma > 0.0, || "sigma must be positive".into())?;
        let wp = &self.wavepacket;
        require(wp.q_points >= 2 && wp.times.iter().all(|t| t.is_finite()), || "bad packet sampling".into())?;
        let f = &self.fock;
        require(f.modes >= 1 && f.n_max >= 1 && f.n_max < 64, || "Fock truncation out of range".into())?;
        require(f.k_max.is_finite() && f.k_max > 0.0, || "Fock k_max must be positive".into())?;
        require(f.couplings.iter().all(|&g| g.is_finite() && g > 0.0), || "couplings must be positive".into())?;
        require(!self.output.formats.is_empty(), || "no output format selected".into())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.x_max, self.grid.points)
    }

    /// Cutoffs in physical units, `κ = (κ/m)·m`.
    pub fn kappa_values(&self) -> Vec<f64> {
        self.kappas.iter().map(|k| k * self.model.m).collect()
    }

    pub fn mollifiers(&self) -> Result<Vec<Mollifier>> {
        self.kappa_values().into_iter().map(|k| Mollifier::with_nodes(k, self.mollifier.xi_nodes)).collect()
    }

    pub fn wants(&self, f: Format) -> bool {
        self.output.formats.contains(&f)
    }
}
