//! Joint spectral amplitudes: grids, builders, delay phases and Schmidt analysis.

mod grid;
mod jsa;
mod schmidt;

pub use grid::{make_grid, make_pair_grid, Axis, GaussianSpec, SpectralGrid, Window, MIN_POINTS_PER_AXIS};
pub use jsa::{
    build_cross_polarized_jsa, build_type1_jsa, JointSpectralAmplitude, JsaFlags,
    PolarizationPair, SourceLabel,
};
pub use schmidt::{schmidt_number, schmidt_of_amplitude, SchmidtReport};

/// Free-function form of [`JointSpectralAmplitude::apply_delay_phase`].
pub fn apply_delay_phase(jsa: &JointSpectralAmplitude, tau: f64) -> JointSpectralAmplitude {
    jsa.apply_delay_phase(tau)
}
