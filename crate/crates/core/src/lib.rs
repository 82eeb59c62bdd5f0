//! Simulation of interference-facilitated photon-pair separation through
//! dispersive directional couplers.
//!
//! Two coherently pumped pair sources emit the same two-photon state; the
//! paths interfere on a directional coupler whose splitting ratio depends on
//! wavelength and polarization. The crate evaluates the resulting bunched and
//! anti-bunched outcome probabilities, their classical and interference parts,
//! and the associated visibilities, for arbitrary joint spectral amplitudes.
//!
//! Module map:
//! - [`spectra`]: frequency grids, joint spectral amplitudes, Schmidt analysis.
//! - [`coupler`]: coupling-strength models, splitting ratios, dimensionless
//!   coupler parameters, transfer matrices.
//! - [`interference`]: the outcome-probability engine, closed-form references,
//!   θ and τ scans.
//! - [`sweeps`]: two-parameter maps and Schmidt-number series.
//! - [`compensation`]: tuning-curve asymmetry and 50:50 wavelength optimization.
//! - [`config`], [`export`], [`presets`], [`cli`]: the batch front end.

pub mod cli;
pub mod compensation;
pub mod config;
pub mod coupler;
pub mod error;
pub mod export;
pub mod interference;
pub mod presets;
pub mod spectra;
pub mod sweeps;
pub mod units;

pub use coupler::{CouplerModel, DimensionlessParams, KappaModel, Polarization, Port};
pub use error::{Error, Result};
pub use interference::{OutcomeReport, TwoSourceState, Visibility};
pub use spectra::{GaussianSpec, JointSpectralAmplitude, PolarizationPair, SchmidtReport, SpectralGrid};
