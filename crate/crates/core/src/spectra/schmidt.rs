use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::SpectralGrid;
use super::jsa::JointSpectralAmplitude;
use crate::error::{Error, Result};

/// Schmidt decomposition summary of a pure two-photon spectral state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtReport {
    pub schmidt_number: f64,
    /// Schmidt weights λ_k, sorted descending, summing to 1.
    pub coefficients: Vec<f64>,
}

/// Schmidt analysis of a single spectral block.
///
/// For states built by the Type-I and cross-polarized builders the analysis
/// runs on the photon-labelled amplitude ζ, i.e. before exchange
/// symmetrization, so an uncorrelated pair reports SN = 1 even when the two
/// photons have different spectra. Other states must carry exactly one
/// polarization component.
pub fn schmidt_number(jsa: &JointSpectralAmplitude) -> Result<SchmidtReport> {
    match jsa.labelled() {
        Some(zeta) => schmidt_of_amplitude(jsa.grid(), zeta),
        None => schmidt_of_amplitude(jsa.grid(), jsa.single_component()?.1),
    }
}

/// Singular values of the amplitude matrix scaled by √(dω₁ dω₂).
pub fn schmidt_of_amplitude(grid: &SpectralGrid, amplitude: &Array2<Complex64>) -> Result<SchmidtReport> {
    let (n1, n2) = amplitude.dim();
    if (n1, n2) != grid.shape() {
        return Err(Error::Grid("amplitude shape does not match grid".into()));
    }
    let w1 = grid.axis1().weights();
    let w2 = grid.axis2().weights();
    let m = DMatrix::from_fn(n1, n2, |i, j| amplitude[[i, j]] * (w1[i] * w2[j]).sqrt());
    if m.iter().all(|v| v.norm_sqr() == 0.0) {
        return Err(Error::numerical("Schmidt decomposition of an all-zero amplitude"));
    }
    let singular = m.singular_values();
    let total: f64 = singular.iter().map(|s| s * s).sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::numerical("singular values are not finite"));
    }
    let mut coefficients: Vec<f64> = singular.iter().map(|s| s * s / total).collect();
    coefficients.sort_by(|a, b| b.total_cmp(a));
    let purity: f64 = coefficients.iter().map(|l| l * l).sum();
    Ok(SchmidtReport {
        schmidt_number: 1.0 / purity,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupler::Polarization;
    use crate::spectra::grid::{make_pair_grid, GaussianSpec};
    use crate::spectra::jsa::{build_type1_jsa, PolarizationPair};
    use std::collections::BTreeMap;

    // Purity Tr(ρ²) of the reduced state, computed by explicit matrix
    // products instead of an SVD.
    fn purity_oracle(grid: &SpectralGrid, a: &Array2<Complex64>) -> f64 {
        let w1 = grid.axis1().weights();
        let w2 = grid.axis2().weights();
        let (n1, n2) = a.dim();
        let s = Array2::from_shape_fn((n1, n2), |(i, j)| a[[i, j]] * (w1[i] * w2[j]).sqrt());
        let norm: f64 = s.iter().map(|v| v.norm_sqr()).sum();
        let rho = Array2::from_shape_fn((n1, n1), |(i, k)| {
            (0..n2).map(|j| s[[i, j]] * s[[k, j]].conj()).sum::<Complex64>() / norm
        });
        let mut tr = 0.0;
        for i in 0..n1 {
            for k in 0..n1 {
                tr += (rho[[i, k]] * rho[[k, i]]).re;
            }
        }
        tr
    }

    fn grid() -> SpectralGrid {
        let p = GaussianSpec::from_nm(780.0, 0.25).unwrap();
        make_pair_grid(&p, &p, 4.0, 48).unwrap()
    }

    #[test]
    fn separable_is_one() {
        let g = grid();
        let o = g.omega1().to_vec();
        let c = o[24];
        let a = Array2::from_shape_fn(g.shape(), |(i, j)| {
            let x = (o[i] - c) / 1e11;
            let y = (o[j] - c) / 2e11;
            Complex64::new(1.0, 0.3 * y) * (-x * x - y * y).exp()
        });
        let r = schmidt_of_amplitude(&g, &a).unwrap();
        assert!((r.schmidt_number - 1.0).abs() < 1e-6);
        assert!((r.coefficients.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_equal_modes() {
        let g = grid();
        let n = g.shape().0;
        let mut a = Array2::zeros((n, n));
        a[[3, 7]] = Complex64::new(1.0, 0.0);
        a[[10, 2]] = Complex64::new(0.0, 1.0);
        let r = schmidt_of_amplitude(&g, &a).unwrap();
        assert!((r.schmidt_number - 2.0).abs() < 1e-12);
        assert!((r.coefficients[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_is_error() {
        let g = grid();
        let a = Array2::zeros(g.shape());
        assert!(schmidt_of_amplitude(&g, &a).is_err());
    }

    #[test]
    fn matches_purity_oracle_and_exceeds_one_for_fig4_pump() {
        let pump = GaussianSpec::from_nm(390.0, 0.1).unwrap();
        let p = GaussianSpec::from_nm(780.0, 0.25).unwrap();
        let g = grid();
        let jsa = build_type1_jsa(&pump, &p, &p, Polarization::Te, &g).unwrap();
        let r = schmidt_number(&jsa).unwrap();
        let (_, phi) = jsa.single_component().unwrap();
        let oracle = 1.0 / purity_oracle(&g, phi);
        assert!((r.schmidt_number - oracle).abs() < 1e-9, "{} {}", r.schmidt_number, oracle);
        assert!(r.schmidt_number > 1.0 + 1e-3, "{}", r.schmidt_number);
        let inv: f64 = 1.0 / r.coefficients.iter().map(|l| l * l).sum::<f64>();
        assert!((inv - r.schmidt_number).abs() < 1e-9);
        assert!(r.coefficients.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn flat_pump_distinct_photons_separable() {
        let pump = GaussianSpec::from_nm(390.0, 0.0).unwrap();
        let a = GaussianSpec::from_nm(778.0, 0.3).unwrap();
        let b = GaussianSpec::from_nm(782.0, 0.5).unwrap();
        let g = make_pair_grid(&a, &b, 4.0, 32).unwrap();
        let jsa = build_type1_jsa(&pump, &a, &b, Polarization::Te, &g).unwrap();
        assert!((schmidt_number(&jsa).unwrap().schmidt_number - 1.0).abs() < 1e-6);
    }

    #[test]
    fn multi_component_rejected_without_labelled() {
        let g = grid();
        let mut c = BTreeMap::new();
        let a = Array2::from_elem(g.shape(), Complex64::new(1.0, 0.0));
        c.insert(PolarizationPair(Polarization::Te, Polarization::Te), a.clone());
        c.insert(PolarizationPair(Polarization::Tm, Polarization::Tm), a);
        let jsa = JointSpectralAmplitude::from_components(g, c, 1.0).unwrap();
        assert!(schmidt_number(&jsa).is_err());
    }
}
