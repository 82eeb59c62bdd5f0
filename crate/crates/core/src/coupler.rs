//! Directional-coupler dispersion.
//!
//! A symmetric coupler of interaction length `L` transfers power between its
//! two waveguides according to the accumulated coupling phase `Lκ_σ(λ)`. The
//! splitting ratio `η = cos²(Lκ)` is the fraction of power that stays in the
//! input guide, so `η = 1` means no transfer.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{omega_to_wavelength, to_nm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    #[serde(rename = "TE")]
    Te,
    #[serde(rename = "TM")]
    Tm,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::Te, Polarization::Tm];
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::Te => write!(f, "TE"),
            Polarization::Tm => write!(f, "TM"),
        }
    }
}

impl std::str::FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TE" => Ok(Polarization::Te),
            "TM" => Ok(Polarization::Tm),
            other => Err(Error::invalid(format!("unknown polarization {other:?}"))),
        }
    }
}

/// Coupler input (source) or output waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Port {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    Linear,
    Cubic,
}

/// Sampled κ(λ) curve with either piecewise-linear or natural cubic spline
/// interpolation. Queries outside the sampled range are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaTable {
    lambda: Vec<f64>,
    kappa: Vec<f64>,
    interpolation: Interpolation,
    // Second derivatives at the knots; empty for linear interpolation.
    curvature: Vec<f64>,
}

impl KappaTable {
    /// Cubic interpolation when at least four samples are given, linear otherwise.
    pub fn new(lambda: Vec<f64>, kappa: Vec<f64>) -> Result<Self> {
        let interpolation = if lambda.len() >= 4 {
            Interpolation::Cubic
        } else {
            Interpolation::Linear
        };
        Self::with_interpolation(lambda, kappa, interpolation)
    }

    pub fn with_interpolation(
        lambda: Vec<f64>,
        kappa: Vec<f64>,
        interpolation: Interpolation,
    ) -> Result<Self> {
        if lambda.len() != kappa.len() {
            return Err(Error::invalid("tabulated coupler: λ and κ lengths differ"));
        }
        if lambda.len() < 2 {
            return Err(Error::invalid("tabulated coupler needs at least two samples"));
        }
        if interpolation == Interpolation::Cubic && lambda.len() < 4 {
            return Err(Error::invalid("cubic interpolation needs at least four samples"));
        }
        if lambda.iter().chain(&kappa).any(|v| !v.is_finite()) {
            return Err(Error::invalid("tabulated coupler samples must be finite"));
        }
        if lambda.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("tabulated wavelengths must be strictly increasing"));
        }
        let curvature = match interpolation {
            Interpolation::Linear => Vec::new(),
            Interpolation::Cubic => natural_spline_curvature(&lambda, &kappa),
        };
        Ok(Self {
            lambda,
            kappa,
            interpolation,
            curvature,
        })
    }

    pub fn samples(&self) -> (&[f64], &[f64]) {
        (&self.lambda, &self.kappa)
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lambda[0], *self.lambda.last().unwrap())
    }

    fn locate(&self, lambda: f64) -> Result<usize> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&lambda) {
            return Err(Error::OutOfTable {
                lambda_nm: to_nm(lambda),
                min_nm: to_nm(lo),
                max_nm: to_nm(hi),
            });
        }
        let idx = self.lambda.partition_point(|&x| x <= lambda);
        Ok(idx.clamp(1, self.lambda.len() - 1) - 1)
    }

    fn eval(&self, lambda: f64) -> Result<(f64, f64)> {
        let k = self.locate(lambda)?;
        let (x0, x1) = (self.lambda[k], self.lambda[k + 1]);
        let (y0, y1) = (self.kappa[k], self.kappa[k + 1]);
        let h = x1 - x0;
        match self.interpolation {
            Interpolation::Linear => {
                let slope = (y1 - y0) / h;
                Ok((y0 + slope * (lambda - x0), slope))
            }
            Interpolation::Cubic => {
                let (m0, m1) = (self.curvature[k], self.curvature[k + 1]);
                let a = (x1 - lambda) / h;
                let b = (lambda - x0) / h;
                let value =
                    a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
                let slope = (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0
                    + (3.0 * b * b - 1.0) * h * m1 / 6.0;
                Ok((value, slope))
            }
        }
    }

    fn shifted(&self, delta: f64) -> Self {
        Self {
            lambda: self.lambda.iter().map(|x| x + delta).collect(),
            ..self.clone()
        }
    }
}

// Natural boundary conditions; tridiagonal solve (Thomas algorithm).
fn natural_spline_curvature(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut upper = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        if i > 1 {
            let w = h0 / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
    }
    for i in (1..n - 1).rev() {
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    }
    m
}

/// Coupling strength κ(λ) in 1/m as a function of vacuum wavelength in m.
#[derive(Debug, Clone, PartialEq)]
pub enum KappaModel {
    /// κ = slope·λ + intercept.
    Linear { slope: f64, intercept: f64 },
    /// κ = Σ_k c_k (λ − center)^k.
    Polynomial { coefficients: Vec<f64>, center: f64 },
    Tabulated(KappaTable),
    /// Constant κ on each segment: `values[k]` applies between
    /// `breaks[k-1]` and `breaks[k]`, open-ended at both extremes.
    Piecewise { breaks: Vec<f64>, values: Vec<f64> },
}

impl KappaModel {
    pub fn constant(kappa: f64) -> Self {
        KappaModel::Polynomial {
            coefficients: vec![kappa],
            center: 0.0,
        }
    }

    pub fn piecewise(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::invalid("piecewise coupler needs one more value than breaks"));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("piecewise breaks must be strictly increasing"));
        }
        Ok(KappaModel::Piecewise { breaks, values })
    }

    /// κ(λ) and dκ/dλ.
    pub fn eval(&self, lambda: f64) -> Result<(f64, f64)> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::invalid(format!("wavelength must be positive, got {lambda}")));
        }
        Ok(match self {
            KappaModel::Linear { slope, intercept } => (slope * lambda + intercept, *slope),
            KappaModel::Polynomial {
                coefficients,
                center,
            } => {
                let x = lambda - center;
                let mut value = 0.0;
                let mut slope = 0.0;
                for c in coefficients.iter().rev() {
                    slope = slope * x + value;
                    value = value * x + c;
                }
                (value, slope)
            }
            KappaModel::Tabulated(table) => table.eval(lambda)?,
            KappaModel::Piecewise { breaks, values } => {
                let seg = breaks.partition_point(|&b| b <= lambda);
                (values[seg], 0.0)
            }
        })
    }

    /// The same curve translated by `delta` in wavelength: κ'(λ) = κ(λ − δ).
    pub fn shifted(&self, delta: f64) -> Self {
        match self {
            KappaModel::Linear { slope, intercept } => KappaModel::Linear {
                slope: *slope,
                intercept: intercept - slope * delta,
            },
            KappaModel::Polynomial {
                coefficients,
                center,
            } => KappaModel::Polynomial {
                coefficients: coefficients.clone(),
                center: center + delta,
            },
            KappaModel::Tabulated(table) => KappaModel::Tabulated(table.shifted(delta)),
            KappaModel::Piecewise { breaks, values } => KappaModel::Piecewise {
                breaks: breaks.iter().map(|b| b + delta).collect(),
                values: values.clone(),
            },
        }
    }
}

/// How the 2×2 mode transformation is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransferMode {
    /// `[[cos κL, i sin κL], [i sin κL, cos κL]]` at the queried frequency.
    Dispersive,
    /// `[[√η, i√(1−η)], [i√(1−η), √η]]` with η frozen at a reference wavelength.
    NonDispersive { reference_wavelength: f64 },
}

pub type TransferMatrix = [[Complex64; 2]; 2];

/// Dimensionless description of a coupler around a degeneracy wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    /// Offset of Lκ(λdeg) from π/4, folded into (−π/2, π/2].
    pub delta_xi: f64,
    /// First-order dispersion λdeg·L·dκ/dλ.
    pub big_m: f64,
    /// Splitting-ratio oscillation period π·λdeg/|M| in meters; `None` when
    /// M = 0 (infinite period).
    pub period_t_lambda: Option<f64>,
    pub eta_deg: f64,
    pub lambda_deg: f64,
}

impl DimensionlessParams {
    /// Δξ lies outside the [−π/4, π/4] window that maps one-to-one onto η ∈ [0, 1].
    pub fn outside_quarter_window(&self) -> bool {
        self.delta_xi.abs() > FRAC_PI_4 + 1e-12
    }
}

/// Folds an angle into (−π/2, π/2] modulo π.
pub fn fold_half_open(angle: f64) -> f64 {
    let mut d = angle - PI * (angle / PI).round();
    if d <= -FRAC_PI_2 {
        d += PI;
    }
    if d > FRAC_PI_2 {
        d -= PI;
    }
    d
}

/// A symmetric directional coupler with per-polarization coupling strength.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplerModel {
    length: f64,
    te: Option<KappaModel>,
    tm: Option<KappaModel>,
}

impl CouplerModel {
    pub fn new(length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid(format!("interaction length must be positive, got {length}")));
        }
        Ok(Self {
            length,
            te: None,
            tm: None,
        })
    }

    pub fn with_kappa(mut self, polarization: Polarization, model: KappaModel) -> Self {
        match polarization {
            Polarization::Te => self.te = Some(model),
            Polarization::Tm => self.tm = Some(model),
        }
        self
    }

    /// Same κ model for both polarizations (no birefringence).
    pub fn isotropic(length: f64, model: KappaModel) -> Result<Self> {
        Ok(Self::new(length)?
            .with_kappa(Polarization::Te, model.clone())
            .with_kappa(Polarization::Tm, model))
    }

    /// Linear coupler with unit length whose phase is exactly
    /// `ξ(λ) = π/4 + Δξ + (λ/λdeg − 1)·M`, identical for TE and TM.
    pub fn from_dimensionless(delta_xi: f64, big_m: f64, lambda_deg: f64) -> Result<Self> {
        Self::isotropic(1.0, dimensionless_kappa(delta_xi, big_m, lambda_deg)?)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn kappa_model(&self, polarization: Polarization) -> Result<&KappaModel> {
        match polarization {
            Polarization::Te => self.te.as_ref(),
            Polarization::Tm => self.tm.as_ref(),
        }
        .ok_or(Error::MissingPolarization(polarization))
    }

    pub fn supports(&self, polarization: Polarization) -> bool {
        self.kappa_model(polarization).is_ok()
    }

    pub fn kappa(&self, polarization: Polarization, lambda: f64) -> Result<f64> {
        Ok(self.kappa_model(polarization)?.eval(lambda)?.0)
    }

    /// Accumulated coupling phase Lκ(λ).
    pub fn phase(&self, polarization: Polarization, lambda: f64) -> Result<f64> {
        Ok(self.length * self.kappa(polarization, lambda)?)
    }

    pub fn splitting_ratio(&self, polarization: Polarization, lambda: f64) -> Result<f64> {
        let c = self.phase(polarization, lambda)?.cos();
        Ok(c * c)
    }

    pub fn dimensionless_params(
        &self,
        polarization: Polarization,
        lambda_deg: f64,
    ) -> Result<DimensionlessParams> {
        if !(lambda_deg.is_finite() && lambda_deg > 0.0) {
            return Err(Error::invalid("degeneracy wavelength must be positive"));
        }
        let (kappa, slope) = self.kappa_model(polarization)?.eval(lambda_deg)?;
        let phase = self.length * kappa;
        let big_m = lambda_deg * self.length * slope;
        let period = (big_m != 0.0).then(|| PI * lambda_deg / big_m.abs());
        let c = phase.cos();
        Ok(DimensionlessParams {
            delta_xi: fold_half_open(phase - FRAC_PI_4),
            big_m,
            period_t_lambda: period,
            eta_deg: c * c,
            lambda_deg,
        })
    }

    pub fn transfer_matrix(
        &self,
        polarization: Polarization,
        omega: f64,
        mode: TransferMode,
    ) -> Result<TransferMatrix> {
        let (diag, off) = match mode {
            TransferMode::Dispersive => {
                let phase = self.phase(polarization, omega_to_wavelength(omega))?;
                (phase.cos(), phase.sin())
            }
            TransferMode::NonDispersive {
                reference_wavelength,
            } => {
                let eta = self.splitting_ratio(polarization, reference_wavelength)?;
                (eta.sqrt(), (1.0 - eta).max(0.0).sqrt())
            }
        };
        let d = Complex64::new(diag, 0.0);
        let o = Complex64::new(0.0, off);
        Ok([[d, o], [o, d]])
    }

    /// Real path factor from source guide `source` to output guide `output`:
    /// cos(κL) for the through path, sin(κL) for the cross path. The cross
    /// path's factor of `i` is accounted for by the outcome sign convention.
    pub fn g_factor(
        &self,
        polarization: Polarization,
        omega: f64,
        source: Port,
        output: Port,
    ) -> Result<f64> {
        let phase = self.phase(polarization, omega_to_wavelength(omega))?;
        Ok(if source == output {
            phase.cos()
        } else {
            phase.sin()
        })
    }

    /// Translates every κ curve by `delta_lambda`, moving the 50:50 point with it.
    pub fn shift_5050(&self, delta_lambda: f64) -> Self {
        Self {
            length: self.length,
            te: self.te.as_ref().map(|m| m.shifted(delta_lambda)),
            tm: self.tm.as_ref().map(|m| m.shifted(delta_lambda)),
        }
    }
}

/// κ model (for unit length) realizing the dimensionless parametrization.
pub fn dimensionless_kappa(delta_xi: f64, big_m: f64, lambda_deg: f64) -> Result<KappaModel> {
    if !(lambda_deg.is_finite() && lambda_deg > 0.0) {
        return Err(Error::invalid("degeneracy wavelength must be positive"));
    }
    if !(delta_xi.is_finite() && big_m.is_finite()) {
        return Err(Error::invalid("Δξ and M must be finite"));
    }
    Ok(KappaModel::Linear {
        slope: big_m / lambda_deg,
        intercept: FRAC_PI_4 + delta_xi - big_m,
    })
}
