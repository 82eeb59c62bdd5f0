//! JSON run configuration. Physical quantities carry unit-suffixed keys
//! (`_nm`, `_fs`, `_m`, `_per_m`, `_rad`); semantic errors name the line of
//! the offending key.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Deserialize;

use crate::coupler::{CouplerModel, Interpolation, KappaModel, KappaTable, Polarization};
use crate::error::{Error, Result};
use crate::export::OutputFormat;
use crate::spectra::{
    build_cross_polarized_jsa, build_type1_jsa, make_pair_grid, GaussianSpec, JointSpectralAmplitude,
};
use crate::sweeps::{energy_conserving_pump, pump_for_schmidt};
use crate::units::{fs, nm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    /// Co-polarized, exchange-symmetrized pairs.
    #[default]
    Type1,
    /// TE photon 1, TM photon 2, unsymmetrized.
    Cross,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhoton {
    center_nm: f64,
    fwhm_nm: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPump {
    center_nm: Option<f64>,
    #[serde(default)]
    fwhm_nm: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    #[serde(default)]
    kind: StateKind,
    polarization: Option<Polarization>,
    photon1: Option<RawPhoton>,
    photon2: Option<RawPhoton>,
    lambda_deg_nm: Option<f64>,
    nondegeneracy_nm: Option<f64>,
    photon_fwhm_nm: Option<f64>,
    pump: Option<RawPump>,
    sn_target: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawKappa {
    Linear {
        slope_per_m2: f64,
        intercept_per_m: f64,
    },
    Polynomial {
        /// Coefficient k in 1/m per m^k of (λ − center).
        coefficients_per_m: Vec<f64>,
        #[serde(default)]
        center_nm: f64,
    },
    Tabulated {
        lambda_nm: Vec<f64>,
        kappa_per_m: Vec<f64>,
        interpolation: Option<Interpolation>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDimensionless {
    delta_xi: f64,
    #[serde(rename = "M")]
    big_m: f64,
    lambda_deg_nm: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoupler {
    #[serde(rename = "L_m")]
    length_m: Option<f64>,
    lambda_deg_nm: Option<f64>,
    kappa: Option<BTreeMap<Polarization, RawKappa>>,
    dimensionless: Option<BTreeMap<Polarization, RawDimensionless>>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawEvolution {
    #[serde(default)]
    theta_rad: f64,
    #[serde(default)]
    tau_fs: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    #[serde(default = "default_points")]
    points_per_axis: usize,
    #[serde(default = "default_span")]
    sigma_span: f64,
}

impl Default for RawNumerics {
    fn default() -> Self {
        Self {
            points_per_axis: default_points(),
            sigma_span: default_span(),
        }
    }
}

fn default_points() -> usize {
    128
}

fn default_span() -> f64 {
    4.0
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    format: Option<OutputFormat>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    state: Option<RawState>,
    coupler: Option<RawCoupler>,
    #[serde(default)]
    evolution: RawEvolution,
    #[serde(default)]
    numerics: RawNumerics,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    /// Grid points per photon window.
    pub points_per_axis: usize,
    pub sigma_span: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            points_per_axis: default_points(),
            sigma_span: default_span(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateConfig {
    pub kind: StateKind,
    pub polarization: Polarization,
    pub photon1: GaussianSpec,
    pub photon2: GaussianSpec,
    pub pump: GaussianSpec,
    pub sn_target: Option<f64>,
    /// Explicit degeneracy wavelength, if the state was given that way.
    pub lambda_deg: Option<f64>,
}

/// State as built on a grid, with the Schmidt number it actually has.
#[derive(Debug, Clone)]
pub struct BuiltState {
    pub jsa: JointSpectralAmplitude,
    pub pump: GaussianSpec,
    pub schmidt_number: Option<f64>,
}

impl StateConfig {
    pub fn polarizations(&self) -> Vec<Polarization> {
        match self.kind {
            StateKind::Type1 => vec![self.polarization],
            StateKind::Cross => vec![Polarization::Te, Polarization::Tm],
        }
    }

    /// Builds the amplitude; an `sn_target` overrides the pump bandwidth.
    pub fn build(&self, numerics: &Numerics) -> Result<BuiltState> {
        let (p1, p2) = (&self.photon1, &self.photon2);
        let mut pump = self.pump;
        let mut schmidt = None;
        if let Some(target) = self.sn_target {
            let (fwhm, _, sn) = pump_for_schmidt(p1, p2, target, numerics.sigma_span, numerics.points_per_axis)?;
            pump = GaussianSpec::new(pump.center_wavelength, fwhm)?;
            schmidt = Some(sn);
        }
        let grid = make_pair_grid(p1, p2, numerics.sigma_span, numerics.points_per_axis)?;
        let jsa = match self.kind {
            StateKind::Type1 => build_type1_jsa(&pump, p1, p2, self.polarization, &grid)?,
            StateKind::Cross => build_cross_polarized_jsa(&pump, p1, p2, &grid)?,
        };
        if schmidt.is_none() {
            schmidt = Some(crate::spectra::schmidt_number(&jsa)?.schmidt_number);
        }
        Ok(BuiltState {
            jsa,
            pump,
            schmidt_number: schmidt,
        })
    }

    /// Midpoint of the photon center wavelengths unless given explicitly.
    pub fn degeneracy_wavelength(&self) -> f64 {
        self.lambda_deg
            .unwrap_or(0.5 * (self.photon1.center_wavelength + self.photon2.center_wavelength))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub state: Option<StateConfig>,
    pub coupler: Option<CouplerModel>,
    /// Reference wavelength for dimensionless parameters, when derivable.
    pub lambda_deg: Option<f64>,
    pub theta: f64,
    pub tau: f64,
    pub numerics: Numerics,
    pub output_dir: Option<PathBuf>,
    pub output_format: Option<OutputFormat>,
}

impl RunConfig {
    pub fn state(&self) -> Result<&StateConfig> {
        self.state
            .as_ref()
            .ok_or_else(|| Error::Config("configuration has no \"state\" block".into()))
    }

    pub fn coupler(&self) -> Result<&CouplerModel> {
        self.coupler
            .as_ref()
            .ok_or_else(|| Error::Config("configuration has no \"coupler\" block".into()))
    }

    /// Fails with a polarization-naming error when the state uses a
    /// polarization the coupler does not describe.
    pub fn check_polarizations(&self) -> Result<()> {
        if let (Some(s), Some(c)) = (&self.state, &self.coupler) {
            for p in s.polarizations() {
                c.kappa_model(p)?;
            }
        }
        Ok(())
    }
}

/// 1-based line of the last key in `path`, searching each key after the
/// previous one.
fn key_line(text: &str, path: &[&str]) -> Option<usize> {
    let mut pos = 0;
    for key in path {
        let needle = format!("\"{key}\"");
        pos += text[pos..].find(&needle)?;
    }
    Some(text[..pos].matches('\n').count() + 1)
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, path: &[&str], msg: impl std::fmt::Display) -> Error {
        let key = path.join(".");
        match key_line(self.text, path) {
            Some(line) => Error::Config(format!("line {line}: {key}: {msg}")),
            None => Error::Config(format!("{key}: {msg}")),
        }
    }

    fn positive(&self, path: &[&str], v: f64) -> Result<f64> {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(self.err(path, format!("must be positive, got {v}")))
        }
    }

    fn non_negative(&self, path: &[&str], v: f64) -> Result<f64> {
        if v.is_finite() && v >= 0.0 {
            Ok(v)
        } else {
            Err(self.err(path, format!("must be non-negative, got {v}")))
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
        if e.line() > 0 {
            Error::Config(format!("line {}: {e}", e.line()))
        } else {
            Error::Config(e.to_string())
        }
    })?;
    let cx = Ctx { text };

    let numerics = Numerics {
        points_per_axis: raw.numerics.points_per_axis,
        sigma_span: raw.numerics.sigma_span,
    };
    if numerics.points_per_axis < crate::spectra::MIN_POINTS_PER_AXIS {
        return Err(cx.err(
            &["numerics", "points_per_axis"],
            format!("must be at least {}", crate::spectra::MIN_POINTS_PER_AXIS),
        ));
    }
    cx.positive(&["numerics", "sigma_span"], numerics.sigma_span)?;
    for (k, v) in [("theta_rad", raw.evolution.theta_rad), ("tau_fs", raw.evolution.tau_fs)] {
        if !v.is_finite() {
            return Err(cx.err(&["evolution", k], "must be finite"));
        }
    }

    let state = raw.state.map(|s| resolve_state(&cx, s)).transpose()?;
    let (coupler, coupler_lambda) = match raw.coupler {
        Some(c) => {
            let (m, l) = resolve_coupler(&cx, c)?;
            (Some(m), l)
        }
        None => (None, None),
    };
    let lambda_deg = coupler_lambda.or_else(|| state.as_ref().map(StateConfig::degeneracy_wavelength));
    Ok(RunConfig {
        state,
        coupler,
        lambda_deg,
        theta: raw.evolution.theta_rad,
        tau: fs(raw.evolution.tau_fs),
        numerics,
        output_dir: raw.output.dir,
        output_format: raw.output.format,
    })
}

fn resolve_state(cx: &Ctx, s: RawState) -> Result<StateConfig> {
    let explicit = s.photon1.is_some() || s.photon2.is_some();
    let derived = s.lambda_deg_nm.is_some() || s.nondegeneracy_nm.is_some() || s.photon_fwhm_nm.is_some();
    let (photon1, photon2, lambda_deg) = match (explicit, derived) {
        (true, true) => {
            return Err(cx.err(
                &["state"],
                "give either photon1/photon2 or lambda_deg_nm with nondegeneracy_nm, not both",
            ))
        }
        (false, false) => {
            return Err(cx.err(
                &["state"],
                "photon spectra missing: give photon1/photon2 or lambda_deg_nm with photon_fwhm_nm",
            ))
        }
        (true, false) => {
            let spec = |name: &str, p: Option<RawPhoton>| -> Result<GaussianSpec> {
                let p = p.ok_or_else(|| cx.err(&["state"], format!("{name} is missing")))?;
                cx.positive(&["state", name, "center_nm"], p.center_nm)?;
                cx.positive(&["state", name, "fwhm_nm"], p.fwhm_nm)?;
                GaussianSpec::from_nm(p.center_nm, p.fwhm_nm)
            };
            (spec("photon1", s.photon1)?, spec("photon2", s.photon2)?, None)
        }
        (false, true) => {
            let ld = s
                .lambda_deg_nm
                .ok_or_else(|| cx.err(&["state"], "lambda_deg_nm is missing"))?;
            cx.positive(&["state", "lambda_deg_nm"], ld)?;
            let d = cx.non_negative(&["state", "nondegeneracy_nm"], s.nondegeneracy_nm.unwrap_or(0.0))?;
            if d >= 2.0 * ld {
                return Err(cx.err(&["state", "nondegeneracy_nm"], "exceeds twice lambda_deg_nm"));
            }
            let fwhm = s
                .photon_fwhm_nm
                .ok_or_else(|| cx.err(&["state"], "photon_fwhm_nm is missing"))?;
            cx.positive(&["state", "photon_fwhm_nm"], fwhm)?;
            (
                GaussianSpec::from_nm(ld - d / 2.0, fwhm)?,
                GaussianSpec::from_nm(ld + d / 2.0, fwhm)?,
                Some(nm(ld)),
            )
        }
    };
    let pump = match s.pump {
        None => energy_conserving_pump(&photon1, &photon2, 0.0)?,
        Some(p) => {
            let fwhm = nm(cx.non_negative(&["state", "pump", "fwhm_nm"], p.fwhm_nm)?);
            match p.center_nm {
                Some(c) => GaussianSpec::new(nm(cx.positive(&["state", "pump", "center_nm"], c)?), fwhm)?,
                None => energy_conserving_pump(&photon1, &photon2, fwhm)?,
            }
        }
    };
    if let Some(sn) = s.sn_target {
        if !(sn.is_finite() && sn >= 1.0) {
            return Err(cx.err(&["state", "sn_target"], format!("must be at least 1, got {sn}")));
        }
    }
    let polarization = s.polarization.unwrap_or(Polarization::Te);
    if s.kind == StateKind::Cross && s.polarization.is_some() {
        return Err(cx.err(&["state", "polarization"], "cross-polarized states are always TE-TM"));
    }
    Ok(StateConfig {
        kind: s.kind,
        polarization,
        photon1,
        photon2,
        pump,
        sn_target: s.sn_target,
        lambda_deg,
    })
}

fn resolve_coupler(cx: &Ctx, c: RawCoupler) -> Result<(CouplerModel, Option<f64>)> {
    let lambda = c
        .lambda_deg_nm
        .map(|l| cx.positive(&["coupler", "lambda_deg_nm"], l).map(nm))
        .transpose()?;
    match (c.kappa, c.dimensionless) {
        (Some(_), Some(_)) => Err(cx.err(&["coupler"], "give either kappa or dimensionless, not both")),
        (None, None) => Err(cx.err(&["coupler"], "needs a kappa or a dimensionless block")),
        (Some(kappa), None) => {
            let length = c
                .length_m
                .ok_or_else(|| cx.err(&["coupler"], "L_m is required with kappa"))?;
            let mut model = CouplerModel::new(cx.positive(&["coupler", "L_m"], length)?)?;
            if kappa.is_empty() {
                return Err(cx.err(&["coupler", "kappa"], "no polarization given"));
            }
            for (pol, k) in kappa {
                let key = pol.to_string();
                let path = ["coupler", "kappa", key.as_str()];
                let m = match k {
                    RawKappa::Linear {
                        slope_per_m2,
                        intercept_per_m,
                    } => KappaModel::Linear {
                        slope: slope_per_m2,
                        intercept: intercept_per_m,
                    },
                    RawKappa::Polynomial {
                        coefficients_per_m,
                        center_nm,
                    } => {
                        if coefficients_per_m.is_empty() {
                            return Err(cx.err(&path, "polynomial needs at least one coefficient"));
                        }
                        KappaModel::Polynomial {
                            coefficients: coefficients_per_m,
                            center: nm(center_nm),
                        }
                    }
                    RawKappa::Tabulated {
                        lambda_nm,
                        kappa_per_m,
                        interpolation,
                    } => {
                        let l = lambda_nm.into_iter().map(nm).collect();
                        let t = match interpolation {
                            Some(i) => KappaTable::with_interpolation(l, kappa_per_m, i),
                            None => KappaTable::new(l, kappa_per_m),
                        };
                        KappaModel::Tabulated(t.map_err(|e| cx.err(&path, e))?)
                    }
                };
                model = model.with_kappa(pol, m);
            }
            Ok((model, lambda))
        }
        (None, Some(dims)) => {
            if c.length_m.is_some() {
                return Err(cx.err(&["coupler", "L_m"], "not used with a dimensionless coupler"));
            }
            let mut model = CouplerModel::new(1.0)?;
            let mut lambda_deg = lambda;
            for (pol, d) in dims {
                let key = pol.to_string();
                let path = ["coupler", "dimensionless", key.as_str(), "lambda_deg_nm"];
                let l = nm(cx.positive(&path, d.lambda_deg_nm)?);
                if let Some(prev) = lambda_deg {
                    if (prev - l).abs() > 1e-15 {
                        return Err(cx.err(&path, "all polarizations must share one lambda_deg_nm"));
                    }
                }
                lambda_deg = Some(l);
                if !(d.delta_xi.is_finite() && d.big_m.is_finite()) {
                    return Err(cx.err(&["coupler", "dimensionless", key.as_str()], "delta_xi and M must be finite"));
                }
                model = model.with_kappa(pol, crate::coupler::dimensionless_kappa(d.delta_xi, d.big_m, l)?);
            }
            Ok((model, lambda_deg))
        }
    }
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}
