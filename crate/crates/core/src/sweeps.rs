//! Two-parameter result maps over dimensionless coupler and state
//! parameters, and P_S versus Schmidt number series.

use std::collections::BTreeMap;
use std::fmt;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupler::{CouplerModel, KappaModel, Polarization};
use crate::error::{Error, Result};
use crate::interference::{accumulate, OutcomeReport, TwoSourceState};
use crate::spectra::{
    build_type1_jsa, make_pair_grid, schmidt_number, GaussianSpec, JointSpectralAmplitude,
};
use crate::units::{SPEED_OF_LIGHT, FWHM_PER_SIGMA};

/// First-order dispersion used to turn MΛ and MΔλ/λdeg products into
/// wavelengths when the caller does not choose one.
pub const DEFAULT_REFERENCE_M: f64 = 16.335;

/// Relative bandwidth standing in for a vanishing one.
pub const NARROWBAND_FWHM_REL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Layer {
    #[serde(rename = "P_S")]
    Ps,
    #[serde(rename = "P_S0")]
    Ps0,
    #[serde(rename = "P_SI")]
    Psi,
    #[serde(rename = "P_B")]
    Pb,
    #[serde(rename = "V_S")]
    Vs,
    #[serde(rename = "V_B")]
    Vb,
}

impl Layer {
    pub const ALL: [Layer; 6] = [Layer::Ps, Layer::Ps0, Layer::Psi, Layer::Pb, Layer::Vs, Layer::Vb];

    pub fn name(self) -> &'static str {
        match self {
            Layer::Ps => "P_S",
            Layer::Ps0 => "P_S0",
            Layer::Psi => "P_SI",
            Layer::Pb => "P_B",
            Layer::Vs => "V_S",
            Layer::Vb => "V_B",
        }
    }

    pub fn from_name(name: &str) -> Option<Layer> {
        Layer::ALL.into_iter().find(|l| l.name() == name)
    }

    pub fn of(self, r: &OutcomeReport) -> Option<f64> {
        match self {
            Layer::Ps => Some(r.ps_total),
            Layer::Ps0 => Some(r.ps_classical),
            Layer::Psi => Some(r.ps_interference),
            Layer::Pb => Some(r.pb_total),
            Layer::Vs => r.vis_s.value(),
            Layer::Vb => r.vis_b.value(),
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Row-major result maps: entry `[iy, ix]` belongs to (x_values[ix], y_values[iy]).
/// `None` marks an undefined visibility.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub x_name: String,
    pub x_values: Vec<f64>,
    pub y_name: String,
    pub y_values: Vec<f64>,
    pub layers: BTreeMap<Layer, Array2<Option<f64>>>,
}

impl SweepGrid {
    /// `reports` is row-major over (y, x).
    pub fn from_reports(
        x_name: &str,
        x_values: Vec<f64>,
        y_name: &str,
        y_values: Vec<f64>,
        reports: &[OutcomeReport],
    ) -> Self {
        let shape = (y_values.len(), x_values.len());
        assert_eq!(reports.len(), shape.0 * shape.1, "report count must match the grid");
        let layers = Layer::ALL
            .into_iter()
            .map(|l| {
                let m = Array2::from_shape_fn(shape, |(iy, ix)| l.of(&reports[iy * shape.1 + ix]));
                (l, m)
            })
            .collect();
        Self {
            x_name: x_name.to_string(),
            x_values,
            y_name: y_name.to_string(),
            y_values,
            layers,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.y_values.len(), self.x_values.len())
    }

    pub fn layer(&self, layer: Layer) -> Option<&Array2<Option<f64>>> {
        self.layers.get(&layer)
    }

    pub fn get(&self, layer: Layer, iy: usize, ix: usize) -> Option<f64> {
        self.layers.get(&layer).and_then(|m| m[[iy, ix]])
    }

    /// Checks dimensions and, where all three layers exist, P_S = P_S0 + P_SI.
    pub fn validate(&self) -> Result<()> {
        for (l, m) in &self.layers {
            if m.dim() != self.shape() {
                return Err(Error::invalid(format!("layer {l} has shape {:?}", m.dim())));
            }
        }
        if let (Some(ps), Some(p0), Some(pi)) = (
            self.layer(Layer::Ps),
            self.layer(Layer::Ps0),
            self.layer(Layer::Psi),
        ) {
            for ((a, b), c) in ps.iter().zip(p0).zip(pi) {
                if let (Some(a), Some(b), Some(c)) = (a, b, c) {
                    if (a - b - c).abs() > 1e-9 {
                        return Err(Error::numerical(format!("P_S {a} ≠ P_S0 {b} + P_SI {c}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Spectral shape shared by every point of a sweep, in units of λdeg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateTemplate {
    /// Photon FWHM Δλ/λdeg (both photons).
    pub photon_fwhm_rel: f64,
    /// Pump FWHM Δλ_P/λdeg; zero selects the flat pump (SN = 1).
    pub pump_fwhm_rel: f64,
    pub polarization: Polarization,
    pub points_per_window: usize,
    pub sigma_span: f64,
}

impl StateTemplate {
    pub fn narrowband() -> Self {
        Self {
            photon_fwhm_rel: NARROWBAND_FWHM_REL,
            pump_fwhm_rel: 0.0,
            polarization: Polarization::Te,
            points_per_window: 32,
            sigma_span: 4.0,
        }
    }

    /// 0.25 nm photons and a 0.1 nm pump at 780 nm.
    pub fn fig4() -> Self {
        Self {
            photon_fwhm_rel: 3.205e-4,
            pump_fwhm_rel: 1.282e-4,
            polarization: Polarization::Te,
            points_per_window: 64,
            sigma_span: 4.0,
        }
    }

    /// Photons centered at λdeg(1 ∓ Λ/2), pumped at the energy-conserving
    /// wavelength.
    pub fn photons(&self, lambda_deg: f64, big_lambda: f64) -> Result<(GaussianSpec, GaussianSpec, GaussianSpec)> {
        if !(0.0..2.0).contains(&big_lambda) {
            return Err(Error::invalid(format!(
                "non-degeneracy Λ = {big_lambda} must lie in [0, 2)"
            )));
        }
        let fwhm = self.photon_fwhm_rel * lambda_deg;
        let p1 = GaussianSpec::new(lambda_deg * (1.0 - big_lambda / 2.0), fwhm)?;
        let p2 = GaussianSpec::new(lambda_deg * (1.0 + big_lambda / 2.0), fwhm)?;
        let pump = energy_conserving_pump(&p1, &p2, self.pump_fwhm_rel * lambda_deg)?;
        Ok((pump, p1, p2))
    }

    pub fn build(&self, lambda_deg: f64, big_lambda: f64) -> Result<JointSpectralAmplitude> {
        let (pump, p1, p2) = self.photons(lambda_deg, big_lambda)?;
        let grid = make_pair_grid(&p1, &p2, self.sigma_span, self.points_per_window)?;
        build_type1_jsa(&pump, &p1, &p2, self.polarization, &grid)
    }
}

/// Pump whose center frequency is the sum of the photon center frequencies.
pub fn energy_conserving_pump(p1: &GaussianSpec, p2: &GaussianSpec, fwhm: f64) -> Result<GaussianSpec> {
    let lp = 1.0 / (1.0 / p1.center_wavelength + 1.0 / p2.center_wavelength);
    GaussianSpec::new(lp, fwhm)
}

fn reference_m(m_ref: f64) -> Result<f64> {
    if !(m_ref.is_finite() && m_ref > 0.0) {
        return Err(Error::invalid(format!("reference M must be positive, got {m_ref}")));
    }
    Ok(m_ref)
}

fn lambda_from_product(m_lambda: f64, m_ref: f64) -> Result<f64> {
    let big_lambda = m_lambda / m_ref;
    if !(0.0..2.0).contains(&big_lambda) {
        return Err(Error::invalid(format!(
            "MΛ = {m_lambda} with M = {m_ref} gives Λ = {big_lambda}, outside [0, 2)"
        )));
    }
    Ok(big_lambda)
}

/// Runs the invariant checks on every 20th point.
fn spot_check(reports: &[OutcomeReport]) -> Result<()> {
    for r in reports.iter().step_by(20) {
        r.check_invariants(1e-9).map_err(Error::Numerical)?;
    }
    Ok(())
}

/// Evaluates `eval(iy)` row by row in parallel; each row yields one report per x.
fn assemble<F>(x_name: &str, xs: &[f64], y_name: &str, ys: &[f64], eval: F) -> Result<SweepGrid>
where
    F: Fn(usize) -> Result<Vec<OutcomeReport>> + Sync,
{
    let rows = (0..ys.len()).into_par_iter().map(&eval).collect::<Result<Vec<_>>>()?;
    let reports: Vec<OutcomeReport> = rows.into_iter().flatten().collect();
    spot_check(&reports)?;
    let grid = SweepGrid::from_reports(x_name, xs.to_vec(), y_name, ys.to_vec(), &reports);
    grid.validate()?;
    Ok(grid)
}

/// Map over the coupler offset Δξ (x) and the phase difference MΛ (y).
pub fn sweep_dxi_mlambda(
    template: &StateTemplate,
    lambda_deg: f64,
    theta: f64,
    delta_xi: &[f64],
    m_lambda: &[f64],
    m_ref: f64,
) -> Result<SweepGrid> {
    let m_ref = reference_m(m_ref)?;
    let lambdas = m_lambda
        .iter()
        .map(|&ml| lambda_from_product(ml, m_ref))
        .collect::<Result<Vec<_>>>()?;
    let couplers = delta_xi
        .iter()
        .map(|&dx| CouplerModel::from_dimensionless(dx, m_ref, lambda_deg))
        .collect::<Result<Vec<_>>>()?;
    assemble("delta_xi", delta_xi, "M_Lambda", m_lambda, |iy| {
        let jsa = template.build(lambda_deg, lambdas[iy])?;
        let state = TwoSourceState::identical(&jsa, theta, 0.0)?;
        couplers
            .iter()
            .map(|c| Ok(accumulate(&state, c)?.report(theta)))
            .collect()
    })
}

/// Pump setting for bandwidth maps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpMode {
    /// Flat pump, uncorrelated photons.
    Flat,
    /// Gaussian pump with FWHM Δλ_P/λdeg.
    Relative(f64),
}

/// Map over photon bandwidth MΔλ/λdeg (x) and MΛ (y) at Δξ = 0.
#[allow(clippy::too_many_arguments)]
pub fn sweep_bandwidth_mlambda(
    lambda_deg: f64,
    theta: f64,
    m_bandwidth: &[f64],
    m_lambda: &[f64],
    pump: PumpMode,
    m_ref: f64,
    points_per_window: usize,
    sigma_span: f64,
) -> Result<SweepGrid> {
    let m_ref = reference_m(m_ref)?;
    let lambdas = m_lambda
        .iter()
        .map(|&ml| lambda_from_product(ml, m_ref))
        .collect::<Result<Vec<_>>>()?;
    if m_bandwidth.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::invalid("MΔλ/λdeg values must be non-negative"));
    }
    let pump_rel = match pump {
        PumpMode::Flat => 0.0,
        PumpMode::Relative(r) if r > 0.0 => r,
        PumpMode::Relative(r) => return Err(Error::invalid(format!("pump FWHM must be positive, got {r}"))),
    };
    let coupler = CouplerModel::from_dimensionless(0.0, m_ref, lambda_deg)?;
    assemble("M_dlambda_over_lambda", m_bandwidth, "M_Lambda", m_lambda, |iy| {
        m_bandwidth
            .iter()
            .map(|&x| {
                let template = StateTemplate {
                    photon_fwhm_rel: bandwidth_rel(x, m_ref),
                    pump_fwhm_rel: pump_rel,
                    polarization: Polarization::Te,
                    points_per_window,
                    sigma_span,
                };
                let jsa = template.build(lambda_deg, lambdas[iy])?;
                let state = TwoSourceState::identical(&jsa, theta, 0.0)?;
                Ok(accumulate(&state, &coupler)?.report(theta))
            })
            .collect()
    })
}

/// Δλ/λdeg for a bandwidth product, with zero replaced by the narrowband floor.
fn bandwidth_rel(m_bandwidth: f64, m_ref: f64) -> f64 {
    (m_bandwidth / m_ref).max(NARROWBAND_FWHM_REL / 10.0)
}

/// One entry of a P_S versus Schmidt number series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchmidtPoint {
    pub sn_target: f64,
    pub sn: f64,
    /// Pump FWHM in meters; zero for the flat pump.
    pub pump_fwhm: f64,
    pub ps_total: f64,
    pub ps_classical: f64,
    pub ps_interference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtSeries {
    pub m_bandwidth: f64,
    pub points: Vec<SchmidtPoint>,
}

/// Narrowest pump (FWHM in meters) the grid can still resolve: its
/// amplitude σ spans two grid steps.
pub fn narrowest_resolvable_pump(p1: &GaussianSpec, p2: &GaussianSpec, sigma_span: f64, points: usize) -> Result<f64> {
    let grid = make_pair_grid(p1, p2, sigma_span, points)?;
    let step = grid.axis1().min_step().min(grid.axis2().min_step());
    let pump = energy_conserving_pump(p1, p2, 0.0)?;
    let lp = pump.center_wavelength;
    Ok(2.0 * step * FWHM_PER_SIGMA * lp * lp / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT))
}

fn schmidt_for_pump(p1: &GaussianSpec, p2: &GaussianSpec, pump_fwhm: f64, sigma_span: f64, points: usize) -> Result<(f64, JointSpectralAmplitude)> {
    let pump = energy_conserving_pump(p1, p2, pump_fwhm)?;
    let grid = make_pair_grid(p1, p2, sigma_span, points)?;
    let jsa = build_type1_jsa(&pump, p1, p2, Polarization::Te, &grid)?;
    Ok((schmidt_number(&jsa)?.schmidt_number, jsa))
}

/// Largest Schmidt number reachable by narrowing the pump on this grid.
pub fn max_achievable_schmidt(p1: &GaussianSpec, p2: &GaussianSpec, sigma_span: f64, points: usize) -> Result<f64> {
    let narrowest = narrowest_resolvable_pump(p1, p2, sigma_span, points)?;
    Ok(schmidt_for_pump(p1, p2, narrowest, sigma_span, points)?.0)
}

/// Pump FWHM (meters; zero for flat) whose Type-I state has Schmidt number
/// `target` within 1e-4, found by bisection in log bandwidth.
pub fn pump_for_schmidt(
    p1: &GaussianSpec,
    p2: &GaussianSpec,
    target: f64,
    sigma_span: f64,
    points: usize,
) -> Result<(f64, JointSpectralAmplitude, f64)> {
    if !(target.is_finite() && target >= 1.0) {
        return Err(Error::invalid(format!("Schmidt number target must be ≥ 1, got {target}")));
    }
    let (flat_sn, flat) = schmidt_for_pump(p1, p2, 0.0, sigma_span, points)?;
    if target - flat_sn < 1e-4 {
        return Ok((0.0, flat, flat_sn));
    }
    let mut lo = narrowest_resolvable_pump(p1, p2, sigma_span, points)?.ln();
    let (max_sn, narrow) = schmidt_for_pump(p1, p2, lo.exp(), sigma_span, points)?;
    if target > max_sn + 1e-4 {
        return Err(Error::UnreachableSchmidt {
            requested: target,
            achievable: max_sn,
        });
    }
    if (max_sn - target).abs() < 1e-4 {
        return Ok((lo.exp(), narrow, max_sn));
    }
    // SN falls monotonically towards 1 as the pump widens.
    let mut hi = (lo.exp() * 1e4).ln();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (sn, jsa) = schmidt_for_pump(p1, p2, mid.exp(), sigma_span, points)?;
        if (sn - target).abs() < 1e-4 {
            return Ok((mid.exp(), jsa, sn));
        }
        if sn > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::numerical(format!("pump bisection did not reach SN = {target}")))
}

/// P_S of degenerate co-polarized photons (Δξ = 0, θ = 0) as the pump is
/// narrowed to reach each requested Schmidt number.
pub fn sweep_schmidt(
    lambda_deg: f64,
    m_bandwidth: f64,
    sn_values: &[f64],
    m_ref: f64,
    points_per_window: usize,
    sigma_span: f64,
) -> Result<SchmidtSeries> {
    let m_ref = reference_m(m_ref)?;
    if !(m_bandwidth.is_finite() && m_bandwidth > 0.0) {
        return Err(Error::invalid("MΔλ/λdeg must be positive"));
    }
    let fwhm = m_bandwidth / m_ref * lambda_deg;
    let p = GaussianSpec::new(lambda_deg, fwhm)?;
    let coupler = CouplerModel::from_dimensionless(0.0, m_ref, lambda_deg)?;
    let points = sn_values
        .par_iter()
        .map(|&target| {
            let (pump_fwhm, jsa, sn) = pump_for_schmidt(&p, &p, target, sigma_span, points_per_window)?;
            let state = TwoSourceState::identical(&jsa, 0.0, 0.0)?;
            let r = accumulate(&state, &coupler)?.report(0.0);
            Ok(SchmidtPoint {
                sn_target: target,
                sn,
                pump_fwhm,
                ps_total: r.ps_total,
                ps_classical: r.ps_classical,
                ps_interference: r.ps_interference,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SchmidtSeries { m_bandwidth, points })
}

/// Coupler giving photon 1 (below λdeg) the splitting ratio η₁ and photon 2
/// (above λdeg) η₂, through a phase that is constant on each side.
pub fn two_segment_coupler(eta1: f64, eta2: f64, lambda_deg: f64, polarization: Polarization) -> Result<CouplerModel> {
    for eta in [eta1, eta2] {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::invalid(format!("splitting ratio must lie in [0, 1], got {eta}")));
        }
    }
    let xi = |eta: f64| eta.sqrt().acos();
    let model = KappaModel::piecewise(vec![lambda_deg], vec![xi(eta1), xi(eta2)])?;
    Ok(CouplerModel::new(1.0)?.with_kappa(polarization, model))
}

/// Map over the splitting ratios η⁽¹⁾ (x) and η⁽²⁾ (y) of a two-color
/// narrowband state with non-degeneracy Λ.
pub fn sweep_eta_pair(
    eta1: &[f64],
    eta2: &[f64],
    theta: f64,
    lambda_deg: f64,
    big_lambda: f64,
) -> Result<SweepGrid> {
    if big_lambda.is_nan() || big_lambda <= 0.0 {
        return Err(Error::invalid("the η-pair map needs two distinct colors (Λ > 0)"));
    }
    let template = StateTemplate::narrowband();
    let jsa = template.build(lambda_deg, big_lambda)?;
    let state = TwoSourceState::identical(&jsa, theta, 0.0)?;
    assemble("eta1", eta1, "eta2", eta2, |iy| {
        eta1.iter()
            .map(|&e1| {
                let c = two_segment_coupler(e1, eta2[iy], lambda_deg, template.polarization)?;
                Ok(accumulate(&state, &c)?.report(theta))
            })
            .collect()
    })
}

/// `n` evenly spaced values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![start],
        _ => (0..n)
            .map(|k| start + (end - start) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interference::{constant_eta_vb, narrowband_oracle};
    use crate::units::nm;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn dxi_map_features() {
        let t = StateTemplate::narrowband();
        let xs = linspace(-FRAC_PI_4, FRAC_PI_4, 5);
        let ys = vec![0.0, FRAC_PI_2, PI];
        let g = sweep_dxi_mlambda(&t, nm(780.0), 0.0, &xs, &ys, DEFAULT_REFERENCE_M).unwrap();
        assert_eq!(g.shape(), (3, 5));
        for iy in 0..3 {
            assert!((g.get(Layer::Ps, iy, 2).unwrap() - 1.0).abs() < 2e-3);
        }
        // Demultiplexer point: no bunched classical weight.
        assert!(g.get(Layer::Vb, 1, 2).is_none());
        for (ix, &x) in xs.iter().enumerate() {
            let eta = (FRAC_PI_4 + x).cos().powi(2);
            let vb = g.get(Layer::Vb, 0, ix).unwrap();
            assert!((vb - constant_eta_vb(eta).unwrap()).abs() < 1e-3);
            let o = narrowband_oracle(x, ys[2], 0.0);
            assert!((g.get(Layer::Ps, 2, ix).unwrap() - o.ps_total).abs() < 1e-3);
        }
        let g = sweep_dxi_mlambda(&t, nm(780.0), PI, &xs, &[FRAC_PI_2], DEFAULT_REFERENCE_M).unwrap();
        for ix in 0..5 {
            assert!((g.get(Layer::Ps, 0, ix).unwrap() - 1.0).abs() < 2e-3);
        }
    }

    #[test]
    fn unphysical_nondegeneracy_rejected() {
        let t = StateTemplate::narrowband();
        assert!(sweep_dxi_mlambda(&t, nm(780.0), 0.0, &[0.0], &[3.0], 1.0).is_err());
    }

    #[test]
    fn bandwidth_map_limits() {
        let xs = [0.0, PI / 8.0, PI];
        let g = sweep_bandwidth_mlambda(nm(780.0), 0.0, &xs, &[0.0, PI / 3.0], PumpMode::Flat, DEFAULT_REFERENCE_M, 48, 4.0)
            .unwrap();
        for iy in 0..2 {
            assert!((g.get(Layer::Ps, iy, 0).unwrap() - 1.0).abs() < 2e-3);
            assert!(g.get(Layer::Ps, iy, 1).unwrap() >= 0.9);
            assert!((g.get(Layer::Ps, iy, 2).unwrap() - 0.5).abs() < 0.02);
            assert!(g.get(Layer::Psi, iy, 2).unwrap().abs() < 0.02);
        }
    }

    #[test]
    fn eta_pair_ridge_and_mirror() {
        let e = linspace(0.0, 1.0, 11);
        let g = sweep_eta_pair(&e, &e, 0.0, nm(780.0), 0.05).unwrap();
        assert!((g.get(Layer::Ps, 5, 5).unwrap() - 1.0).abs() < 1e-9);
        for iy in 0..11 {
            // Best column in each row sits on η₁ + η₂ = 1.
            let best = (0..11)
                .max_by(|&a, &b| g.get(Layer::Ps, iy, a).unwrap().total_cmp(&g.get(Layer::Ps, iy, b).unwrap()))
                .unwrap();
            assert_eq!(best, 10 - iy);
            for ix in 0..11 {
                assert_eq!(
                    g.get(Layer::Vs, iy, ix).map(|v| (v * 1e9).round()),
                    g.get(Layer::Vb, iy, 10 - ix).map(|v| (v * 1e9).round())
                );
            }
        }
        // η₁ = 0.3, η₂ = 0.7 straddle the balanced point.
        assert!(g.get(Layer::Ps, 7, 3).unwrap() > 0.9);
    }

    #[test]
    fn schmidt_bisection() {
        let p = GaussianSpec::from_nm(780.0, 100.0).unwrap();
        let (fwhm, _, sn) = pump_for_schmidt(&p, &p, 1.26, 4.0, 64).unwrap();
        assert!(fwhm > 0.0);
        assert!((sn - 1.26).abs() < 1e-3);
        let (fwhm, _, sn) = pump_for_schmidt(&p, &p, 1.0, 4.0, 64).unwrap();
        assert_eq!(fwhm, 0.0);
        assert!((sn - 1.0).abs() < 1e-9);
        match pump_for_schmidt(&p, &p, 1e3, 4.0, 64) {
            Err(Error::UnreachableSchmidt { achievable, .. }) => assert!(achievable > 1.26),
            other => panic!("expected unreachable error, got {other:?}"),
        }
    }

    #[test]
    fn schmidt_series_monotone() {
        let s = sweep_schmidt(nm(780.0), FRAC_PI_4, &[1.0, 1.5, 2.0, 2.5], DEFAULT_REFERENCE_M, 64, 4.0).unwrap();
        for w in s.points.windows(2) {
            assert!(w[1].ps_total >= w[0].ps_total - 1e-3);
        }
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 5.0, 1), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
