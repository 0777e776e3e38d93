//! Numerics for the quantized φ⁴ kink: the spectral resolution of the
//! linearized operator `K = -∂² + 4m² - 6m² sech²(mx)`, its distorted Fourier
//! transform, mollifier-regularized kernels, the one-loop mass shift, and
//! small truncated Fock-space experiments.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod fock;
pub mod grid;
pub mod io;
pub mod kernels;
pub mod mass_shift;
pub mod mollifier;
pub mod params;
pub mod quad;
pub mod spectral;
pub mod transform;
pub mod wavepacket;

pub use error::{Error, Result};
pub use grid::{Grid, MomentumGrid};
pub use params::ModelParams;

pub use num_complex::Complex64 as C64;
