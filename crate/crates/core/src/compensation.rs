//! Far-from-degeneracy behavior: energy-conserving photon colors, P_S versus
//! non-degeneracy, and recovery by translating the coupler's 50:50 wavelength.

use rayon::prelude::*;
use serde::Serialize;

use crate::coupler::{CouplerModel, Polarization};
use crate::error::{Error, Result};
use crate::interference::{accumulate, TwoSourceState};
use crate::spectra::{build_type1_jsa, make_pair_grid, GaussianSpec};

/// Photon colors on the energy-conservation tuning curve of one pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TuningCurvePoint {
    pub lambda1: f64,
    pub lambda2: f64,
    pub pump_lambda: f64,
}

impl TuningCurvePoint {
    /// Relative violation of 1/λ₁ + 1/λ₂ = 1/λp.
    pub fn energy_mismatch(&self) -> f64 {
        let lhs = 1.0 / self.lambda1 + 1.0 / self.lambda2;
        let rhs = 1.0 / self.pump_lambda;
        (lhs - rhs).abs() / rhs
    }
}

/// Solves 1/λ₁ + 1/λ₂ = 1/λp with λ₂ − λ₁ = `nondegeneracy` ≥ 0.
pub fn central_wavelengths(pump_lambda: f64, nondegeneracy: f64) -> Result<TuningCurvePoint> {
    if !(pump_lambda.is_finite() && pump_lambda > 0.0) {
        return Err(Error::invalid(format!("pump wavelength must be positive, got {pump_lambda}")));
    }
    if !(nondegeneracy.is_finite() && nondegeneracy >= 0.0) {
        return Err(Error::invalid(format!(
            "non-degeneracy must be finite and non-negative, got {nondegeneracy}"
        )));
    }
    let d = nondegeneracy;
    // λ₁ is the positive root of λ² + (d − 2λp)λ − dλp = 0.
    let lambda1 = 0.5 * ((2.0 * pump_lambda - d) + (4.0 * pump_lambda * pump_lambda + d * d).sqrt());
    let lambda2 = lambda1 + d;
    if !(lambda1 > 0.0 && lambda2.is_finite()) {
        return Err(Error::invalid("no positive solution on the tuning curve"));
    }
    Ok(TuningCurvePoint {
        lambda1,
        lambda2,
        pump_lambda,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NondegeneracyPoint {
    pub nondegeneracy: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub ps_total: f64,
    pub vis_s: Option<f64>,
}

/// Spectral settings for [`nondegeneracy_scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpectra {
    /// Pump FWHM in meters; zero for the flat pump.
    pub pump_fwhm: f64,
    /// Photon FWHM in meters (both photons).
    pub photon_fwhm: f64,
    pub polarization: Polarization,
    pub points_per_window: usize,
    pub sigma_span: f64,
}

/// P_S and V_S of Type-I pairs from one pump as the photon colors walk
/// apart along the tuning curve.
pub fn nondegeneracy_scan(
    coupler: &CouplerModel,
    pump_lambda: f64,
    spectra: &ScanSpectra,
    nondegeneracies: &[f64],
    theta: f64,
) -> Result<Vec<NondegeneracyPoint>> {
    nondegeneracies
        .par_iter()
        .map(|&d| {
            let tc = central_wavelengths(pump_lambda, d)?;
            let p1 = GaussianSpec::new(tc.lambda1, spectra.photon_fwhm)?;
            let p2 = GaussianSpec::new(tc.lambda2, spectra.photon_fwhm)?;
            let pump = GaussianSpec::new(pump_lambda, spectra.pump_fwhm)?;
            let grid = make_pair_grid(&p1, &p2, spectra.sigma_span, spectra.points_per_window)?;
            let jsa = build_type1_jsa(&pump, &p1, &p2, spectra.polarization, &grid)?;
            let state = TwoSourceState::identical(&jsa, theta, 0.0)?;
            let r = accumulate(&state, coupler)?.report(theta);
            Ok(NondegeneracyPoint {
                nondegeneracy: d,
                lambda1: tc.lambda1,
                lambda2: tc.lambda2,
                ps_total: r.ps_total,
                vis_s: r.vis_s.value(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompensationResult {
    /// Best translation of the 50:50 wavelength, in meters.
    pub delta_lambda_star: f64,
    pub ps_before: f64,
    pub ps_after: f64,
    /// Number of P_S evaluations.
    pub evaluations: usize,
}

impl CompensationResult {
    pub fn improved(&self) -> bool {
        self.ps_after > self.ps_before
    }
}

const PRESCAN_POINTS: usize = 33;
const INV_PHI: f64 = 0.618_033_988_749_894_9;
/// Gains in P_S at or below this are quadrature noise, not compensation.
pub const MIN_IMPROVEMENT: f64 = 1e-9;

/// Maximizes P_S over translations δλ ∈ [−halfwidth, halfwidth] of the
/// coupler curve: a coarse pre-scan picks the bracket, golden-section search
/// refines it until it is narrower than max(1e-4·halfwidth, 1 pm). Never
/// returns a shift that does worse than δλ = 0, and keeps δλ = 0 unless the
/// gain exceeds [`MIN_IMPROVEMENT`].
pub fn optimize_5050_shift(
    state: &TwoSourceState,
    coupler: &CouplerModel,
    search_halfwidth: f64,
) -> Result<CompensationResult> {
    if !(search_halfwidth.is_finite() && search_halfwidth > 0.0) {
        return Err(Error::invalid(format!(
            "search half-width must be positive, got {search_halfwidth}"
        )));
    }
    let mut evaluations = 0usize;
    let mut ps = |delta: f64| -> Result<f64> {
        evaluations += 1;
        let v = accumulate(state, &coupler.shift_5050(delta))?.report(state.theta).ps_total;
        if !v.is_finite() {
            return Err(Error::numerical(format!("P_S is not finite at δλ = {delta:e} m")));
        }
        Ok(v)
    };

    let ps_before = ps(0.0)?;
    let hw = search_halfwidth;
    let step = 2.0 * hw / (PRESCAN_POINTS - 1) as f64;
    let mut best = (0.0, ps_before);
    let mut best_k = PRESCAN_POINTS / 2;
    for k in 0..PRESCAN_POINTS {
        let x = -hw + step * k as f64;
        let v = if k == PRESCAN_POINTS / 2 { ps_before } else { ps(x)? };
        if v > best.1 {
            best = (x, v);
            best_k = k;
        }
    }

    let mut a = -hw + step * best_k.saturating_sub(1) as f64;
    let mut b = -hw + step * (best_k + 1).min(PRESCAN_POINTS - 1) as f64;
    let tol = (1e-4 * hw).max(1e-12);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = ps(c)?;
    let mut fd = ps(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = ps(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = ps(d)?;
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    if best.1 - ps_before <= MIN_IMPROVEMENT {
        best = (0.0, ps_before);
    }
    Ok(CompensationResult {
        delta_lambda_star: best.0,
        ps_before,
        ps_after: best.1,
        evaluations,
    })
}

/// Splitting ratios at the two photon center wavelengths.
pub fn center_splitting_ratios(
    coupler: &CouplerModel,
    polarization: Polarization,
    lambda1: f64,
    lambda2: f64,
) -> Result<(f64, f64)> {
    Ok((
        coupler.splitting_ratio(polarization, lambda1)?,
        coupler.splitting_ratio(polarization, lambda2)?,
    ))
}
