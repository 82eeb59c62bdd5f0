use std::collections::BTreeMap;
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{GaussianSpec, SpectralGrid};
use crate::coupler::Polarization;
use crate::error::{Error, Result};

/// Polarizations (α, β) of photon 1 (ω₁) and photon 2 (ω₂).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PolarizationPair(pub Polarization, pub Polarization);

impl fmt::Display for PolarizationPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceLabel {
    A,
    B,
}

/// Set when a builder notices the state has almost no amplitude on the grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsaFlags {
    /// Pump center differs from ω₁₀ + ω₂₀ by more than six pump σ.
    pub pump_mismatch: bool,
}

/// Joint spectral amplitude φ_{αβ}(ω₁, ω₂) on a spectral grid.
///
/// Component matrices are indexed `[i, j]` with `i` along ω₁ and `j` along
/// ω₂. The quadrature norm Σ_{αβ} Σ |φ|² dω₁dω₂ equals [`weight`](Self::weight).
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectralAmplitude {
    grid: SpectralGrid,
    components: BTreeMap<PolarizationPair, Array2<Complex64>>,
    source: Option<SourceLabel>,
    weight: f64,
    // Amplitude of the pair with photons labelled by generation order,
    // before exchange symmetrization. Used for Schmidt analysis.
    labelled: Option<Array2<Complex64>>,
    flags: JsaFlags,
}

/// Σ |a|² w₁ w₂ over a component.
pub(crate) fn quadrature_norm(grid: &SpectralGrid, a: &Array2<Complex64>) -> f64 {
    let w1 = grid.axis1().weights();
    let w2 = grid.axis2().weights();
    a.indexed_iter()
        .map(|((i, j), v)| v.norm_sqr() * w1[i] * w2[j])
        .sum()
}

impl JointSpectralAmplitude {
    /// Wraps arbitrary component matrices and normalizes them to `weight`.
    pub fn from_components(
        grid: SpectralGrid,
        components: BTreeMap<PolarizationPair, Array2<Complex64>>,
        weight: f64,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("joint spectral amplitude needs at least one component"));
        }
        for (pair, c) in &components {
            if c.dim() != grid.shape() {
                return Err(Error::Grid(format!(
                    "component {pair} has shape {:?}, grid is {:?}",
                    c.dim(),
                    grid.shape()
                )));
            }
            if c.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(Error::invalid(format!("component {pair} has non-finite entries")));
            }
        }
        Self {
            grid,
            components,
            source: None,
            weight: 1.0,
            labelled: None,
            flags: JsaFlags::default(),
        }
        .normalized(weight)
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn components(&self) -> &BTreeMap<PolarizationPair, Array2<Complex64>> {
        &self.components
    }

    pub fn component(&self, pair: PolarizationPair) -> Option<&Array2<Complex64>> {
        self.components.get(&pair)
    }

    pub fn polarizations(&self) -> impl Iterator<Item = PolarizationPair> + '_ {
        self.components.keys().copied()
    }

    /// The only component, if exactly one is present.
    pub fn single_component(&self) -> Result<(PolarizationPair, &Array2<Complex64>)> {
        if self.components.len() != 1 {
            return Err(Error::invalid(format!(
                "expected a single polarization component, found {}",
                self.components.len()
            )));
        }
        let (k, v) = self.components.iter().next().unwrap();
        Ok((*k, v))
    }

    pub fn source(&self) -> Option<SourceLabel> {
        self.source
    }

    pub fn with_source(mut self, source: SourceLabel) -> Self {
        self.source = Some(source);
        self
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn flags(&self) -> JsaFlags {
        self.flags
    }

    pub(crate) fn labelled(&self) -> Option<&Array2<Complex64>> {
        self.labelled.as_ref()
    }

    /// Σ_{αβ} Σ |φ|² dω₁dω₂ computed from the stored amplitudes.
    pub fn norm(&self) -> f64 {
        self.components
            .values()
            .map(|c| quadrature_norm(&self.grid, c))
            .sum()
    }

    /// Rescales every component so the quadrature norm equals `weight`.
    pub fn normalized(mut self, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::invalid(format!("JSA weight must be positive, got {weight}")));
        }
        let norm = self.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::numerical(
                "joint spectral amplitude vanishes on the grid (nothing to normalize)",
            ));
        }
        let scale = (weight / norm).sqrt();
        for c in self.components.values_mut() {
            c.mapv_inplace(|v| v * scale);
        }
        if let Some(l) = self.labelled.as_mut() {
            let ln = quadrature_norm(&self.grid, l);
            if ln > 0.0 {
                let s = (weight / ln).sqrt();
                l.mapv_inplace(|v| v * s);
            }
        }
        self.weight = weight;
        Ok(self)
    }

    /// Multiplies every amplitude by exp(−i(ω₁+ω₂)τ).
    pub fn apply_delay_phase(&self, tau: f64) -> Self {
        if tau == 0.0 {
            return self.clone();
        }
        let o1 = self.grid.omega1();
        let o2 = self.grid.omega2();
        let rotate = |a: &Array2<Complex64>| {
            Array2::from_shape_fn(a.dim(), |(i, j)| {
                a[[i, j]] * Complex64::from_polar(1.0, -(o1[i] + o2[j]) * tau)
            })
        };
        Self {
            components: self
                .components
                .iter()
                .map(|(k, v)| (*k, rotate(v)))
                .collect(),
            labelled: self.labelled.as_ref().map(rotate),
            ..self.clone()
        }
    }
}

/// ζ(ω₁,ω₂) = pump(ω₁+ω₂)·photon1(ω₁)·photon2(ω₂) sampled on the grid.
fn gaussian_product(
    pump: &GaussianSpec,
    photon1: &GaussianSpec,
    photon2: &GaussianSpec,
    grid: &SpectralGrid,
) -> Array2<Complex64> {
    let o1 = grid.omega1();
    let o2 = grid.omega2();
    let f1: Vec<f64> = o1.iter().map(|&w| photon1.amplitude(w)).collect();
    let f2: Vec<f64> = o2.iter().map(|&w| photon2.amplitude(w)).collect();
    Array2::from_shape_fn(grid.shape(), |(i, j)| {
        Complex64::new(pump.amplitude(o1[i] + o2[j]) * f1[i] * f2[j], 0.0)
    })
}

fn pump_flags(pump: &GaussianSpec, photon1: &GaussianSpec, photon2: &GaussianSpec) -> JsaFlags {
    let pump_mismatch = !pump.is_flat() && {
        let sum = photon1.center_omega() + photon2.center_omega();
        (pump.center_omega() - sum).abs() > 6.0 * pump.sigma_omega()
    };
    JsaFlags { pump_mismatch }
}

fn check_photons(photon1: &GaussianSpec, photon2: &GaussianSpec) -> Result<()> {
    if photon1.is_flat() || photon2.is_flat() {
        return Err(Error::invalid("photon bandwidths must be positive"));
    }
    Ok(())
}

/// Co-polarized pair amplitude mimicking Type-I SPDC:
/// φ_{σσ}(ω₁,ω₂) = [ζ(ω₁,ω₂) + ζ(ω₂,ω₁)]/√2, normalized to unit weight.
///
/// The grid must be exchange symmetric (identical axes) so the swapped term
/// lands on grid points; the result is then symmetric bit for bit.
pub fn build_type1_jsa(
    pump: &GaussianSpec,
    photon1: &GaussianSpec,
    photon2: &GaussianSpec,
    polarization: Polarization,
    grid: &SpectralGrid,
) -> Result<JointSpectralAmplitude> {
    check_photons(photon1, photon2)?;
    if !grid.is_exchange_symmetric() {
        return Err(Error::Grid(
            "Type-I symmetrization needs identical ω₁ and ω₂ axes (use make_pair_grid)".into(),
        ));
    }
    let zeta = gaussian_product(pump, photon1, photon2, grid);
    let t = zeta.t();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let phi = Array2::from_shape_fn(zeta.dim(), |(i, j)| (zeta[[i, j]] + t[[i, j]]) * inv_sqrt2);
    let mut components = BTreeMap::new();
    components.insert(PolarizationPair(polarization, polarization), phi);
    let mut jsa = JointSpectralAmplitude::from_components(grid.clone(), components, 1.0)?;
    jsa.labelled = Some(zeta);
    jsa.flags = pump_flags(pump, photon1, photon2);
    jsa.normalized(1.0)
}

/// Cross-polarized pair amplitude: the unsymmetrized ζ(ω₁,ω₂) placed in the
/// (TE, TM) component.
pub fn build_cross_polarized_jsa(
    pump: &GaussianSpec,
    photon1: &GaussianSpec,
    photon2: &GaussianSpec,
    grid: &SpectralGrid,
) -> Result<JointSpectralAmplitude> {
    check_photons(photon1, photon2)?;
    let zeta = gaussian_product(pump, photon1, photon2, grid);
    let mut components = BTreeMap::new();
    components.insert(PolarizationPair(Polarization::Te, Polarization::Tm), zeta.clone());
    let mut jsa = JointSpectralAmplitude::from_components(grid.clone(), components, 1.0)?;
    jsa.labelled = Some(zeta);
    jsa.flags = pump_flags(pump, photon1, photon2);
    jsa.normalized(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::grid::{make_grid, make_pair_grid};

    fn specs() -> (GaussianSpec, GaussianSpec, GaussianSpec) {
        (
            GaussianSpec::from_nm(390.0, 0.1).unwrap(),
            GaussianSpec::from_nm(779.0, 0.25).unwrap(),
            GaussianSpec::from_nm(781.0, 0.4).unwrap(),
        )
    }

    #[test]
    fn type1_exchange_symmetric_and_normalized() {
        let (p, a, b) = specs();
        let g = make_pair_grid(&a, &b, 4.0, 48).unwrap();
        let jsa = build_type1_jsa(&p, &a, &b, Polarization::Te, &g).unwrap();
        let (pair, phi) = jsa.single_component().unwrap();
        assert_eq!(pair, PolarizationPair(Polarization::Te, Polarization::Te));
        let n = phi.nrows();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(phi[[i, j]], phi[[j, i]]);
                assert!(phi[[i, j]].re >= 0.0 && phi[[i, j]].im == 0.0);
            }
        }
        assert!((jsa.norm() - 1.0).abs() < 1e-9);
        assert!(!jsa.flags().pump_mismatch);
    }

    #[test]
    fn type1_requires_symmetric_grid() {
        let (p, a, b) = specs();
        let g = make_grid(&a, &b, 4.0, 32).unwrap();
        assert!(build_type1_jsa(&p, &a, &b, Polarization::Te, &g).is_err());
    }

    #[test]
    fn cross_polarized_asymmetry() {
        let (p, a, b) = specs();
        let g = make_pair_grid(&a, &b, 4.0, 32).unwrap();
        let jsa = build_cross_polarized_jsa(&p, &a, &b, &g).unwrap();
        let (pair, phi) = jsa.single_component().unwrap();
        assert_eq!(pair, PolarizationPair(Polarization::Te, Polarization::Tm));
        let asym = phi
            .indexed_iter()
            .map(|((i, j), v)| (v - phi[[j, i]]).norm())
            .fold(0.0, f64::max);
        assert!(asym > 1e-3 * phi.iter().map(|v| v.norm()).fold(0.0, f64::max));
        assert!((jsa.norm() - 1.0).abs() < 1e-9);

        let g = make_pair_grid(&a, &a, 4.0, 32).unwrap();
        let jsa = build_cross_polarized_jsa(&p, &a, &a, &g).unwrap();
        let (_, phi) = jsa.single_component().unwrap();
        for ((i, j), v) in phi.indexed_iter() {
            assert!((v - phi[[j, i]]).norm() <= 1e-15 * v.norm().max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn pump_mismatch_flag() {
        let (_, a, b) = specs();
        let far = GaussianSpec::from_nm(385.0, 0.1).unwrap();
        let g = make_pair_grid(&a, &b, 4.0, 32).unwrap();
        // Far-off pump kills the amplitude entirely on this grid.
        match build_type1_jsa(&far, &a, &b, Polarization::Te, &g) {
            Ok(j) => assert!(j.flags().pump_mismatch),
            Err(e) => assert!(matches!(e, Error::Numerical(_))),
        }
        let near = GaussianSpec::from_nm(390.02, 0.5).unwrap();
        let j = build_type1_jsa(&near, &a, &b, Polarization::Te, &g).unwrap();
        assert!(!j.flags().pump_mismatch);
    }

    #[test]
    fn delay_phase_identity_and_norm() {
        let (p, a, b) = specs();
        let g = make_pair_grid(&a, &b, 4.0, 32).unwrap();
        let jsa = build_type1_jsa(&p, &a, &b, Polarization::Te, &g).unwrap();
        assert_eq!(jsa.apply_delay_phase(0.0), jsa);
        let d = jsa.apply_delay_phase(3.7e-15);
        assert!((d.norm() - jsa.norm()).abs() < 1e-12);
        let (_, x) = jsa.single_component().unwrap();
        let (_, y) = d.single_component().unwrap();
        for (u, v) in x.iter().zip(y.iter()) {
            assert!((u.norm() - v.norm()).abs() <= 1e-15 * u.norm().max(1e-300));
        }
    }

    #[test]
    fn from_components_validation() {
        let (_, a, b) = specs();
        let g = make_grid(&a, &b, 4.0, 16).unwrap();
        let mut c = BTreeMap::new();
        c.insert(
            PolarizationPair(Polarization::Te, Polarization::Te),
            Array2::zeros((16, 16)),
        );
        assert!(matches!(
            JointSpectralAmplitude::from_components(g.clone(), c, 1.0),
            Err(Error::Numerical(_))
        ));
        let mut c = BTreeMap::new();
        c.insert(
            PolarizationPair(Polarization::Te, Polarization::Te),
            Array2::from_elem((4, 4), Complex64::new(1.0, 0.0)),
        );
        assert!(JointSpectralAmplitude::from_components(g, c, 1.0).is_err());
    }
}
