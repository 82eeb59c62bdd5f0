//! Outcome probabilities for two coherently pumped pair sources interfering
//! on a dispersive directional coupler.
//!
//! Outcome `pq` means photon 1 (frequency ω₁) leaves through guide `p` and
//! photon 2 through guide `q`. Each source contributes the classical weight
//! |Φ^{j→pq}|²; the two sources interfere through the cross term, which enters
//! separated outcomes with a plus sign and bunched ones with a minus sign.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::coupler::{CouplerModel, Polarization};
use crate::error::{Error, Result};
use crate::spectra::{Axis, JointSpectralAmplitude, PolarizationPair};
use crate::units::omega_to_wavelength;

/// Classical contributions below this are treated as zero when forming visibilities.
pub const VISIBILITY_FLOOR: f64 = 1e-9;

/// Outcomes in the fixed order AA, AB, BA, BB.
const OUTCOMES: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

/// Coherent superposition of two pair sources: source A carries the relative phase θ, source B the
/// delay τ. Both amplitudes live on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSourceState {
    a: JointSpectralAmplitude,
    b: JointSpectralAmplitude,
    pub theta: f64,
    pub tau: f64,
}

impl TwoSourceState {
    /// Equal pumping: each source is rescaled to weight ½.
    pub fn new(
        a: JointSpectralAmplitude,
        b: JointSpectralAmplitude,
        theta: f64,
        tau: f64,
    ) -> Result<Self> {
        Self::with_weights(a.normalized(0.5)?, b.normalized(0.5)?, theta, tau)
    }

    /// Both sources emit the same pair amplitude.
    pub fn identical(jsa: &JointSpectralAmplitude, theta: f64, tau: f64) -> Result<Self> {
        let half = jsa.clone().normalized(0.5)?;
        Self::with_weights(half.clone(), half, theta, tau)
    }

    /// Takes the amplitudes as given; their norms must add up to one.
    pub fn with_weights(
        a: JointSpectralAmplitude,
        b: JointSpectralAmplitude,
        theta: f64,
        tau: f64,
    ) -> Result<Self> {
        if a.grid() != b.grid() {
            return Err(Error::Grid("sources A and B use different grids".into()));
        }
        if !(theta.is_finite() && tau.is_finite()) {
            return Err(Error::invalid("θ and τ must be finite"));
        }
        let total = a.norm() + b.norm();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "combined state norm is {total}, expected 1"
            )));
        }
        Ok(Self { a, b, theta, tau })
    }

    pub fn source_a(&self) -> &JointSpectralAmplitude {
        &self.a
    }

    pub fn source_b(&self) -> &JointSpectralAmplitude {
        &self.b
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self {
            theta,
            ..self.clone()
        }
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        Self { tau, ..self.clone() }
    }
}

/// One value per outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PerOutcome {
    pub aa: f64,
    pub ab: f64,
    pub ba: f64,
    pub bb: f64,
}

impl PerOutcome {
    fn from_array(v: [f64; 4]) -> Self {
        Self {
            aa: v[0],
            ab: v[1],
            ba: v[2],
            bb: v[3],
        }
    }

    pub fn sum(&self) -> f64 {
        self.aa + self.ab + self.ba + self.bb
    }
}

/// Interference visibility, or an explicit marker where the classical
/// denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Visibility {
    Defined(f64),
    Undefined,
}

impl Visibility {
    pub fn ratio(interference: f64, classical: f64) -> Self {
        if classical < VISIBILITY_FLOOR {
            Visibility::Undefined
        } else {
            Visibility::Defined(interference.abs() / classical)
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Visibility::Defined(v) => Some(*v),
            Visibility::Undefined => None,
        }
    }

    pub fn is_undefined(&self) -> bool {
        matches!(self, Visibility::Undefined)
    }
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Visibility::Defined(v) => write!(f, "{v:.4}"),
            Visibility::Undefined => write!(f, "NA"),
        }
    }
}

impl Serialize for Visibility {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value().serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeReport {
    pub theta: f64,
    pub tau: f64,
    /// Classical parts R⁰_pq.
    pub r0: PerOutcome,
    /// Interference parts Rᴵ_pq before the bunching sign.
    pub ri: PerOutcome,
    /// Total R_pq = R⁰_pq ± Rᴵ_pq (minus for bunched outcomes).
    pub r: PerOutcome,
    pub ps_total: f64,
    pub ps_classical: f64,
    pub ps_interference: f64,
    pub pb_total: f64,
    pub pb_classical: f64,
    /// Signed interference contribution to P_B, i.e. −(Rᴵ_AA + Rᴵ_BB).
    pub pb_interference: f64,
    pub vis_s: Visibility,
    pub vis_b: Visibility,
    /// Visibilities are the ideal ones only at τ = 0.
    pub ideal: bool,
}

impl OutcomeReport {
    /// Checks the probability bookkeeping identities at tolerance `tol`.
    pub fn check_invariants(&self, tol: f64) -> std::result::Result<(), String> {
        let checks = [
            ("Σ R_pq = 1", (self.r.sum() - 1.0).abs()),
            ("P_S + P_B = 1", (self.ps_total + self.pb_total - 1.0).abs()),
            ("P_S0 + P_B0 = 1", (self.ps_classical + self.pb_classical - 1.0).abs()),
            (
                "|P_SI| = |P_BI|",
                (self.ps_interference.abs() - self.pb_interference.abs()).abs(),
            ),
        ];
        for (name, err) in checks {
            if err.is_nan() || err > tol {
                return Err(format!("{name} violated by {err:e}"));
            }
        }
        for v in [self.r0.aa, self.r0.ab, self.r0.ba, self.r0.bb] {
            if v < -tol {
                return Err(format!("negative classical part {v}"));
            }
        }
        for v in [self.r.aa, self.r.ab, self.r.ba, self.r.bb] {
            if !(-tol..=1.0 + tol).contains(&v) {
                return Err(format!("probability {v} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// θ-independent sums from which reports at any θ follow.
#[derive(Debug, Clone, Copy)]
pub struct Accumulated {
    pub tau: f64,
    pub r0: [f64; 4],
    /// Σ 2 Φ^{B→pq} Φ^{*A→pq} e^{−i(ω₁+ω₂)τ} dω₁dω₂; Rᴵ_pq = Re(e^{−iθ}·this).
    pub cross: [Complex64; 4],
}

impl Accumulated {
    pub fn report(&self, theta: f64) -> OutcomeReport {
        let rot = Complex64::from_polar(1.0, -theta);
        let ri: [f64; 4] = std::array::from_fn(|k| (rot * self.cross[k]).re);
        let r: [f64; 4] = std::array::from_fn(|k| {
            let (p, q) = OUTCOMES[k];
            if p == q {
                self.r0[k] - ri[k]
            } else {
                self.r0[k] + ri[k]
            }
        });
        let ps_classical = self.r0[1] + self.r0[2];
        let pb_classical = self.r0[0] + self.r0[3];
        let ps_interference = ri[1] + ri[2];
        let pb_interference = -(ri[0] + ri[3]);
        OutcomeReport {
            theta,
            tau: self.tau,
            r0: PerOutcome::from_array(self.r0),
            ri: PerOutcome::from_array(ri),
            r: PerOutcome::from_array(r),
            ps_total: r[1] + r[2],
            ps_classical,
            ps_interference,
            pb_total: r[0] + r[3],
            pb_classical,
            pb_interference,
            vis_s: Visibility::ratio(ps_interference, ps_classical),
            vis_b: Visibility::ratio(pb_interference, pb_classical),
            ideal: self.tau == 0.0,
        }
    }

    /// Complex separated-outcome interference amplitude; its modulus is the
    /// envelope of P_Sᴵ under delay.
    pub fn separated_cross(&self) -> Complex64 {
        self.cross[1] + self.cross[2]
    }
}

/// (cos κL, sin κL) at each axis frequency.
fn path_factors(coupler: &CouplerModel, pol: Polarization, axis: &Axis) -> Result<Vec<(f64, f64)>> {
    axis.omega()
        .iter()
        .map(|&w| {
            let phase = coupler.phase(pol, omega_to_wavelength(w))?;
            Ok((phase.cos(), phase.sin()))
        })
        .collect()
}

fn check_coupler(state: &TwoSourceState, coupler: &CouplerModel) -> Result<Vec<PolarizationPair>> {
    let mut pairs: Vec<PolarizationPair> = state.a.polarizations().collect();
    pairs.extend(state.b.polarizations());
    pairs.sort();
    pairs.dedup();
    for p in &pairs {
        for pol in [p.0, p.1] {
            coupler.kappa_model(pol)?;
        }
    }
    Ok(pairs)
}

/// Quadrature of the classical and cross sums for the state's θ-free part.
pub fn accumulate(state: &TwoSourceState, coupler: &CouplerModel) -> Result<Accumulated> {
    if state.a.grid() != state.b.grid() {
        return Err(Error::Grid("sources A and B use different grids".into()));
    }
    let pairs = check_coupler(state, coupler)?;
    let grid = state.a.grid();
    let (w1, w2) = (grid.axis1().weights(), grid.axis2().weights());
    let (o1, o2) = (grid.omega1(), grid.omega2());
    let tau = state.tau;
    let d1: Vec<Complex64> = o1.iter().map(|w| Complex64::from_polar(1.0, -w * tau)).collect();
    let d2: Vec<Complex64> = o2.iter().map(|w| Complex64::from_polar(1.0, -w * tau)).collect();

    let mut r0 = [0.0; 4];
    let mut cross = [Complex64::new(0.0, 0.0); 4];
    for pair in pairs {
        let g1 = path_factors(coupler, pair.0, grid.axis1())?;
        let g2 = path_factors(coupler, pair.1, grid.axis2())?;
        let phi_a = state.a.component(pair);
        let phi_b = state.b.component(pair);
        let zero = Complex64::new(0.0, 0.0);
        for i in 0..o1.len() {
            let (c1, s1) = g1[i];
            // Source A reaches guide A through, B across; source B the reverse.
            let ga1 = [c1, s1];
            let gb1 = [s1, c1];
            for j in 0..o2.len() {
                let fa = phi_a.map_or(zero, |m| m[[i, j]]);
                let fb = phi_b.map_or(zero, |m| m[[i, j]]);
                let w = w1[i] * w2[j];
                let a2 = fa.norm_sqr() * w;
                let b2 = fb.norm_sqr() * w;
                let x = fb * fa.conj() * d1[i] * d2[j] * (2.0 * w);
                let (c2, s2) = g2[j];
                let ga2 = [c2, s2];
                let gb2 = [s2, c2];
                for (k, &(p, q)) in OUTCOMES.iter().enumerate() {
                    let ga = ga1[p] * ga2[q];
                    let gb = gb1[p] * gb2[q];
                    r0[k] += a2 * ga * ga + b2 * gb * gb;
                    cross[k] += x * (ga * gb);
                }
            }
        }
    }
    Ok(Accumulated { tau, r0, cross })
}

pub fn outcome_probabilities(state: &TwoSourceState, coupler: &CouplerModel) -> Result<OutcomeReport> {
    Ok(accumulate(state, coupler)?.report(state.theta))
}

/// Closed-form narrowband limit for co-polarized photons at the two colors
/// ξ₁ = π/4 + Δξ − MΛ/2 and ξ₂ = π/4 + Δξ + MΛ/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NarrowbandPrediction {
    pub ps_total: f64,
    pub ps_classical: f64,
    pub ps_interference: f64,
    pub vis_s: Visibility,
    pub vis_b: Visibility,
}

pub fn narrowband_oracle(delta_xi: f64, m_lambda: f64, theta: f64) -> NarrowbandPrediction {
    let xi1 = FRAC_PI_4 + delta_xi - m_lambda / 2.0;
    let xi2 = FRAC_PI_4 + delta_xi + m_lambda / 2.0;
    let (c1, s1) = (xi1.cos().powi(2), xi1.sin().powi(2));
    let (c2, s2) = (xi2.cos().powi(2), xi2.sin().powi(2));
    let ps0 = c1 * s2 + s1 * c2;
    let psi = theta.cos() * 0.5 * (2.0 * xi1).sin() * (2.0 * xi2).sin();
    NarrowbandPrediction {
        ps_total: ps0 + psi,
        ps_classical: ps0,
        ps_interference: psi,
        vis_s: Visibility::ratio(psi, ps0),
        vis_b: Visibility::ratio(psi, 1.0 - ps0),
    }
}

/// Bunched-outcome visibility for a wavelength-independent splitting ratio.
pub fn constant_eta_vb(eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid(format!("splitting ratio must lie in [0, 1], got {eta}")));
    }
    let q = 1.0 - eta;
    Ok(2.0 * eta * q / (eta * eta + q * q))
}

/// Interference term of conventional two-photon (HOM) interference on a
/// splitter of constant ratio η, with the photons entering different guides:
/// 2η(1−η)·Re Σ φ(ω₁,ω₂) φ*(ω₂,ω₁) e^{−i(ω₂−ω₁)τ} dω₁dω₂, divided by the
/// state norm. Positive values reduce the coincidence probability.
pub fn hom_interference_term(jsa: &JointSpectralAmplitude, eta: f64, tau: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid(format!("splitting ratio must lie in [0, 1], got {eta}")));
    }
    let grid = jsa.grid();
    if !grid.is_exchange_symmetric() {
        return Err(Error::Grid("HOM overlap needs identical ω₁ and ω₂ axes".into()));
    }
    let (_, phi) = jsa.single_component()?;
    let o = grid.omega1();
    let w = grid.axis1().weights();
    let mut overlap = Complex64::new(0.0, 0.0);
    for ((i, j), v) in phi.indexed_iter() {
        let phase = Complex64::from_polar(1.0, -(o[j] - o[i]) * tau);
        overlap += v * phi[[j, i]].conj() * phase * (w[i] * w[j]);
    }
    Ok(2.0 * eta * (1.0 - eta) * overlap.re / jsa.norm())
}

/// HOM coincidence visibility |term| / (η² + (1−η)²).
pub fn hom_visibility(jsa: &JointSpectralAmplitude, eta: f64, tau: f64) -> Result<f64> {
    let term = hom_interference_term(jsa, eta, tau)?;
    Ok(term.abs() / (eta * eta + (1.0 - eta) * (1.0 - eta)))
}

/// Reports at each θ; the θ-free quadrature runs once.
pub fn theta_scan(
    state: &TwoSourceState,
    coupler: &CouplerModel,
    theta_values: &[f64],
) -> Result<Vec<OutcomeReport>> {
    let acc = accumulate(state, coupler)?;
    Ok(theta_values.iter().map(|&t| acc.report(t)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauSampling {
    /// Fringes resolved: the step must stay below π/(2·max(ω₁+ω₂)).
    Resolved,
    /// Coarse sampling; only the envelope column is meaningful.
    EnvelopeOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauPoint {
    pub tau: f64,
    pub ps_total: f64,
    pub ps_interference: f64,
    /// Upper envelope |P_Sᴵ| at this delay.
    pub envelope: f64,
    /// e^{−iθ}-rotated complex interference amplitude; P_Sᴵ is its real part.
    #[serde(skip)]
    pub cross: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauScan {
    pub points: Vec<TauPoint>,
    /// Full width at half maximum of the envelope, when both half-maximum
    /// crossings fall inside the scan.
    pub envelope_fwhm: Option<f64>,
    #[serde(skip)]
    pub sampling: TauSampling,
}

impl TauScan {
    /// First positive delay at which the interference term has turned
    /// over by π relative to τ = 0, i.e. the separated output has become the
    /// bunched one. Found by linear interpolation of the unwrapped fringe
    /// phase, so only resolved scans that reach τ ≤ 0 qualify.
    pub fn first_inversion(&self) -> Option<f64> {
        if self.sampling != TauSampling::Resolved {
            return None;
        }
        let p = &self.points;
        let start = p.iter().rposition(|q| q.tau <= 0.0)?;
        let mut phase = Vec::with_capacity(p.len() - start);
        let mut prev = p[start].cross.arg();
        phase.push(prev);
        for q in &p[start + 1..] {
            let mut a = q.cross.arg();
            while a - prev > PI {
                a -= 2.0 * PI;
            }
            while a - prev < -PI {
                a += 2.0 * PI;
            }
            phase.push(a);
            prev = a;
        }
        // Phase at τ = 0 by interpolation between the bracketing samples.
        let phase0 = if p[start].tau == 0.0 || start + 1 >= p.len() {
            phase[0]
        } else {
            let (t0, t1) = (p[start].tau, p[start + 1].tau);
            phase[0] + (phase[1] - phase[0]) * (0.0 - t0) / (t1 - t0)
        };
        (1..phase.len()).find_map(|k| {
            let (a, b) = ((phase[k - 1] - phase0).abs(), (phase[k] - phase0).abs());
            (a < PI && b >= PI).then(|| {
                let (t0, t1) = (p[start + k - 1].tau, p[start + k].tau);
                t0 + (PI - a) / (b - a) * (t1 - t0)
            })
        })
    }
}

fn envelope_fwhm(points: &[TauPoint]) -> Option<f64> {
    let (peak_idx, peak) = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.envelope.total_cmp(&b.1.envelope))?;
    let half = peak.envelope / 2.0;
    let cross = |a: &TauPoint, b: &TauPoint| {
        a.tau + (half - a.envelope) / (b.envelope - a.envelope) * (b.tau - a.tau)
    };
    let left = (1..=peak_idx)
        .rev()
        .find(|&k| points[k - 1].envelope < half)
        .map(|k| cross(&points[k - 1], &points[k]))?;
    let right = (peak_idx..points.len() - 1)
        .find(|&k| points[k + 1].envelope < half)
        .map(|k| cross(&points[k], &points[k + 1]))?;
    Some(right - left)
}

/// Largest delay step that still resolves the ω₁+ω₂ fringes of this state.
pub fn max_resolved_tau_step(state: &TwoSourceState) -> f64 {
    std::f64::consts::PI / (2.0 * state.a.grid().max_frequency_sum())
}

/// Evaluates the separated-outcome probability over delays `tau_values`
/// (ascending). Points are computed in parallel and returned in input order.
pub fn tau_scan(
    state: &TwoSourceState,
    coupler: &CouplerModel,
    tau_values: &[f64],
    sampling: TauSampling,
) -> Result<TauScan> {
    if tau_values.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::invalid("delay values must be strictly increasing"));
    }
    if sampling == TauSampling::Resolved {
        let bound = max_resolved_tau_step(state);
        let step = tau_values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max);
        if step >= bound {
            return Err(Error::Aliasing {
                step_fs: step / 1e-15,
                bound_fs: bound / 1e-15,
            });
        }
    }
    check_coupler(state, coupler)?;
    let points = tau_values
        .par_iter()
        .map(|&tau| {
            let acc = accumulate(&state.with_tau(tau), coupler)?;
            let rep = acc.report(state.theta);
            let cross = Complex64::from_polar(1.0, -state.theta) * acc.separated_cross();
            Ok(TauPoint {
                tau,
                ps_total: rep.ps_total,
                ps_interference: rep.ps_interference,
                envelope: cross.norm(),
                cross,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let envelope_fwhm = envelope_fwhm(&points);
    Ok(TauScan {
        points,
        envelope_fwhm,
        sampling,
    })
}
