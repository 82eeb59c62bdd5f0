use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{fwhm_wavelength_to_omega, nm, wavelength_to_omega, FWHM_PER_SIGMA};

/// Minimum number of samples per axis for production grids.
pub const MIN_POINTS_PER_AXIS: usize = 16;

/// Gaussian spectrum specified by its center wavelength and intensity FWHM
/// (both in meters). A zero FWHM means "flat": the spectral factor is 1
/// everywhere, which for a pump gives an uncorrelated product state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub center_wavelength: f64,
    pub fwhm_bandwidth: f64,
}

impl GaussianSpec {
    pub fn new(center_wavelength: f64, fwhm_bandwidth: f64) -> Result<Self> {
        if !(center_wavelength.is_finite() && center_wavelength > 0.0) {
            return Err(Error::invalid(format!(
                "center wavelength must be positive, got {center_wavelength}"
            )));
        }
        if !(fwhm_bandwidth.is_finite() && fwhm_bandwidth >= 0.0) {
            return Err(Error::invalid(format!(
                "FWHM bandwidth must be non-negative, got {fwhm_bandwidth}"
            )));
        }
        Ok(Self {
            center_wavelength,
            fwhm_bandwidth,
        })
    }

    pub fn from_nm(center_nm: f64, fwhm_nm: f64) -> Result<Self> {
        Self::new(nm(center_nm), nm(fwhm_nm))
    }

    pub fn center_omega(&self) -> f64 {
        wavelength_to_omega(self.center_wavelength)
    }

    pub fn is_flat(&self) -> bool {
        self.fwhm_bandwidth == 0.0
    }

    /// Standard deviation σ_ω of the intensity profile in angular frequency.
    /// The amplitude is `exp(−(ω−ω₀)²/(4σ_ω²))`.
    pub fn sigma_omega(&self) -> f64 {
        fwhm_wavelength_to_omega(self.center_wavelength, self.fwhm_bandwidth) / FWHM_PER_SIGMA
    }

    /// Spectral amplitude at `omega`, peak value 1.
    pub fn amplitude(&self, omega: f64) -> f64 {
        if self.is_flat() {
            return 1.0;
        }
        let s = self.sigma_omega();
        let d = omega - self.center_omega();
        (-d * d / (4.0 * s * s)).exp()
    }
}

/// One uniformly sampled segment of an axis: `start + k·step`, `k < len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Window {
    pub fn end(&self) -> f64 {
        self.start + self.step * (self.len as f64 - 1.0)
    }

    /// `len` points spanning `[lo, hi]` inclusive.
    pub fn spanning(lo: f64, hi: f64, len: usize) -> Self {
        Self {
            start: lo,
            step: (hi - lo) / (len as f64 - 1.0),
            len,
        }
    }
}

/// Sampled angular-frequency axis made of one or more disjoint uniform
/// windows. Each sample carries the midpoint-rule weight of its window.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    windows: Vec<Window>,
    omega: Vec<f64>,
    weight: Vec<f64>,
}

impl Axis {
    fn build(windows: Vec<Window>, min_points: usize) -> Result<Self> {
        if windows.is_empty() {
            return Err(Error::Grid("axis needs at least one window".into()));
        }
        for w in &windows {
            if w.len < 2 {
                return Err(Error::Grid("each window needs at least two points".into()));
            }
            if !(w.step.is_finite() && w.step > 0.0 && w.start.is_finite() && w.start > 0.0) {
                return Err(Error::Grid(format!(
                    "window must start at positive frequency with positive step: {w:?}"
                )));
            }
        }
        if windows.windows(2).any(|p| p[1].start <= p[0].end()) {
            return Err(Error::Grid("windows must be increasing and disjoint".into()));
        }
        let total: usize = windows.iter().map(|w| w.len).sum();
        if total < min_points {
            return Err(Error::Grid(format!(
                "axis has {total} points, at least {min_points} required"
            )));
        }
        let mut omega = Vec::with_capacity(total);
        let mut weight = Vec::with_capacity(total);
        for w in &windows {
            for k in 0..w.len {
                omega.push(w.start + w.step * k as f64);
                weight.push(w.step);
            }
        }
        Ok(Self {
            windows,
            omega,
            weight,
        })
    }

    pub fn uniform(lo: f64, hi: f64, len: usize) -> Result<Self> {
        if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Grid(format!("empty axis range [{lo}, {hi}]")));
        }
        Self::build(vec![Window::spanning(lo, hi, len)], MIN_POINTS_PER_AXIS)
    }

    pub fn windowed(windows: Vec<Window>) -> Result<Self> {
        Self::build(windows, MIN_POINTS_PER_AXIS)
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    /// The common step when the axis is a single uniform window.
    pub fn step(&self) -> Option<f64> {
        (self.windows.len() == 1).then(|| self.windows[0].step)
    }

    pub fn min_step(&self) -> f64 {
        self.windows.iter().map(|w| w.step).fold(f64::INFINITY, f64::min)
    }

    pub fn max_omega(&self) -> f64 {
        *self.omega.last().unwrap()
    }

    pub fn min_omega(&self) -> f64 {
        self.omega[0]
    }
}

/// Discretization of (ω₁, ω₂) space for midpoint-rule quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    axis1: Axis,
    axis2: Axis,
}

impl SpectralGrid {
    pub fn new(axis1: Axis, axis2: Axis) -> Self {
        Self { axis1, axis2 }
    }

    /// Single-window uniform grid.
    pub fn uniform(omega1: (f64, f64), omega2: (f64, f64), points: usize) -> Result<Self> {
        Ok(Self::new(
            Axis::uniform(omega1.0, omega1.1, points)?,
            Axis::uniform(omega2.0, omega2.1, points)?,
        ))
    }

    /// Uniform grid without the minimum-size rule, for validating the
    /// engine against brute-force enumeration on a handful of points.
    /// Quadrature accuracy is not meaningful on such grids.
    pub fn toy(omega1: &[f64], omega2: &[f64]) -> Result<Self> {
        let axis = |pts: &[f64]| -> Result<Axis> {
            if pts.len() < 2 {
                return Err(Error::Grid("toy axis needs two points".into()));
            }
            let step = pts[1] - pts[0];
            for (k, &p) in pts.iter().enumerate() {
                let expect = pts[0] + step * k as f64;
                if (p - expect).abs() > 1e-12 * expect.abs() {
                    return Err(Error::Grid("toy axis must be uniformly spaced".into()));
                }
            }
            Axis::build(
                vec![Window {
                    start: pts[0],
                    step,
                    len: pts.len(),
                }],
                2,
            )
        };
        Ok(Self::new(axis(omega1)?, axis(omega2)?))
    }

    pub fn axis1(&self) -> &Axis {
        &self.axis1
    }

    pub fn axis2(&self) -> &Axis {
        &self.axis2
    }

    pub fn omega1(&self) -> &[f64] {
        self.axis1.omega()
    }

    pub fn omega2(&self) -> &[f64] {
        self.axis2.omega()
    }

    pub fn d_omega1(&self) -> Option<f64> {
        self.axis1.step()
    }

    pub fn d_omega2(&self) -> Option<f64> {
        self.axis2.step()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.len(), self.axis2.len())
    }

    /// Both axes sample the same frequencies, so exchanging ω₁ and ω₂ maps
    /// grid points onto grid points.
    pub fn is_exchange_symmetric(&self) -> bool {
        self.axis1 == self.axis2
    }

    /// Largest ω₁ + ω₂ on the grid.
    pub fn max_frequency_sum(&self) -> f64 {
        self.axis1.max_omega() + self.axis2.max_omega()
    }
}

fn photon_extent(photon: &GaussianSpec, sigma_span: f64) -> Result<(f64, f64)> {
    if photon.fwhm_bandwidth <= 0.0 {
        return Err(Error::Grid(format!(
            "photon at {:.3} nm has zero bandwidth; no grid extent can be derived",
            photon.center_wavelength / 1e-9
        )));
    }
    let half = sigma_span * photon.sigma_omega();
    let center = photon.center_omega();
    if center - half <= 0.0 {
        return Err(Error::Grid(format!(
            "grid window reaches non-positive frequency (span {sigma_span}σ too wide)"
        )));
    }
    Ok((center - half, center + half))
}

fn check_grid_args(sigma_span: f64, points: usize) -> Result<()> {
    if !(sigma_span.is_finite() && sigma_span > 0.0) {
        return Err(Error::invalid(format!("sigma_span must be positive, got {sigma_span}")));
    }
    if points < MIN_POINTS_PER_AXIS {
        return Err(Error::invalid(format!(
            "points_per_axis must be at least {MIN_POINTS_PER_AXIS}, got {points}"
        )));
    }
    Ok(())
}

/// Grid whose axis `i` covers photon `i`'s center ± `sigma_span`·σ_ω.
pub fn make_grid(
    photon1: &GaussianSpec,
    photon2: &GaussianSpec,
    sigma_span: f64,
    points_per_axis: usize,
) -> Result<SpectralGrid> {
    check_grid_args(sigma_span, points_per_axis)?;
    SpectralGrid::uniform(
        photon_extent(photon1, sigma_span)?,
        photon_extent(photon2, sigma_span)?,
        points_per_axis,
    )
}

/// Exchange-symmetric grid for pair states whose amplitude may place either
/// photon's spectrum on either axis. Both axes hold one window per photon
/// color, merged into one window when the colors overlap, so widely
/// separated narrowband photons stay resolved without sampling the gap.
pub fn make_pair_grid(
    photon1: &GaussianSpec,
    photon2: &GaussianSpec,
    sigma_span: f64,
    points_per_window: usize,
) -> Result<SpectralGrid> {
    check_grid_args(sigma_span, points_per_window)?;
    let mut spans = [
        photon_extent(photon1, sigma_span)?,
        photon_extent(photon2, sigma_span)?,
    ];
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let steps = spans.map(|(lo, hi)| (hi - lo) / (points_per_window as f64 - 1.0));
    let windows = if spans[1].0 <= spans[0].1 {
        let lo = spans[0].0;
        let hi = spans[0].1.max(spans[1].1);
        let step = steps[0].min(steps[1]);
        let len = ((hi - lo) / step).ceil() as usize + 1;
        vec![Window::spanning(lo, hi, len.max(points_per_window))]
    } else {
        spans
            .iter()
            .map(|&(lo, hi)| Window::spanning(lo, hi, points_per_window))
            .collect()
    };
    let axis = Axis::windowed(windows)?;
    Ok(SpectralGrid::new(axis.clone(), axis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::SPEED_OF_LIGHT;
    use std::f64::consts::PI;

    #[test]
    fn center_omega_780() {
        let g = GaussianSpec::from_nm(780.0, 10.0).unwrap();
        let expect = 2.0 * PI * SPEED_OF_LIGHT / 780e-9;
        assert!((g.center_omega() - expect).abs() < 1.0);
        // 2πc/780 nm = 2.41494e15 rad/s
        assert!((g.center_omega() / 2.414_94e15 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn amplitude_has_stated_intensity_fwhm() {
        let g = GaussianSpec::from_nm(1550.0, 3.0).unwrap();
        let half = fwhm_wavelength_to_omega(g.center_wavelength, g.fwhm_bandwidth) / 2.0;
        let i = g.amplitude(g.center_omega() + half).powi(2);
        assert!((i - 0.5).abs() < 1e-12);
        assert_eq!(GaussianSpec::from_nm(390.0, 0.0).unwrap().amplitude(1.0), 1.0);
    }

    #[test]
    fn make_grid_extent() {
        let p = GaussianSpec::from_nm(1550.0, 3.0).unwrap();
        let g = make_grid(&p, &p, 4.0, 64).unwrap();
        let ax = g.omega1();
        assert_eq!(ax.len(), 64);
        let mid = (ax[0] + ax[63]) / 2.0;
        assert!((mid - p.center_omega()).abs() / mid < 1e-14);
        assert!(((ax[63] - ax[0]) / 2.0 - 4.0 * p.sigma_omega()).abs() / ax[63] < 1e-14);
        assert_eq!(g.omega1(), g.omega2());
        let step = g.d_omega1().unwrap();
        for w in ax.windows(2) {
            assert!(((w[1] - w[0]) - step).abs() < 1e-12 * step * 64.0);
        }
    }

    #[test]
    fn make_grid_rejects_bad_inputs() {
        let p = GaussianSpec::from_nm(1550.0, 3.0).unwrap();
        let flat = GaussianSpec::from_nm(1550.0, 0.0).unwrap();
        assert!(make_grid(&flat, &flat, 4.0, 64).is_err());
        assert!(make_grid(&p, &p, 0.0, 64).is_err());
        assert!(make_grid(&p, &p, 4.0, 8).is_err());
        assert!(GaussianSpec::from_nm(-1.0, 1.0).is_err());
        assert!(GaussianSpec::from_nm(780.0, -1.0).is_err());
    }

    #[test]
    fn pair_grid_windows() {
        let a = GaussianSpec::from_nm(730.0, 1e-3).unwrap();
        let b = GaussianSpec::from_nm(830.0, 1e-3).unwrap();
        let g = make_pair_grid(&a, &b, 4.0, 32).unwrap();
        assert_eq!(g.axis1().windows().len(), 2);
        assert_eq!(g.shape(), (64, 64));
        assert!(g.is_exchange_symmetric());
        let c = GaussianSpec::from_nm(780.0, 10.0).unwrap();
        let d = GaussianSpec::from_nm(782.0, 10.0).unwrap();
        let g = make_pair_grid(&c, &d, 4.0, 32).unwrap();
        assert_eq!(g.axis1().windows().len(), 1);
        assert!(g.shape().0 >= 32);
    }

    #[test]
    fn toy_grid() {
        let g = SpectralGrid::toy(&[1e15, 1.1e15], &[2e15, 2.1e15]).unwrap();
        assert_eq!(g.shape(), (2, 2));
        assert!(SpectralGrid::toy(&[1e15], &[1e15, 2e15]).is_err());
        assert!(SpectralGrid::toy(&[1e15, 1.1e15, 1.5e15], &[1e15, 2e15]).is_err());
    }
}
