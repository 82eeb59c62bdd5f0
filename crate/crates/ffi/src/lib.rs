//! C ABI over the pairsep engine.
//!
//! Objects are opaque handles created by `ps_*` constructors and released
//! with the matching `_free` function. Every call returns a [`PsStatus`];
//! results go through out-pointers. On failure the message is available from
//! [`ps_last_error_message`] on the same thread until the next failing call.
//! All lengths and wavelengths are SI (meters, seconds).

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pairsep::interference::{accumulate, narrowband_oracle};
use pairsep::spectra::{build_type1_jsa, make_pair_grid, schmidt_number};
use pairsep::sweeps::energy_conserving_pump;
use pairsep::{CouplerModel, Error, GaussianSpec, JointSpectralAmplitude, KappaModel, Polarization, TwoSourceState};

/// Opaque coupler handle.
pub struct PsCoupler(CouplerModel);

/// Opaque two-photon state handle.
pub struct PsState(JointSpectralAmplitude);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    MissingPolarization = 3,
    OutOfRange = 4,
    Numerical = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsPolarization {
    Te = 0,
    Tm = 1,
}

impl From<PsPolarization> for Polarization {
    fn from(p: PsPolarization) -> Self {
        match p {
            PsPolarization::Te => Polarization::Te,
            PsPolarization::Tm => Polarization::Tm,
        }
    }
}

/// Dimensionless coupler parameters. `period_t_lambda` is NaN when M = 0.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PsDimensionless {
    pub delta_xi: f64,
    pub big_m: f64,
    pub period_t_lambda: f64,
    pub eta_deg: f64,
}

/// Outcome probabilities. Undefined visibilities are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PsOutcome {
    pub r_aa: f64,
    pub r_ab: f64,
    pub r_ba: f64,
    pub r_bb: f64,
    pub ps_total: f64,
    pub ps_classical: f64,
    pub ps_interference: f64,
    pub pb_total: f64,
    pub pb_classical: f64,
    pub pb_interference: f64,
    pub vis_s: f64,
    pub vis_b: f64,
}

/// Closed-form narrowband prediction. Undefined visibilities are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PsNarrowband {
    pub ps_total: f64,
    pub ps_classical: f64,
    pub ps_interference: f64,
    pub vis_s: f64,
    pub vis_b: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> PsStatus {
    match err {
        Error::MissingPolarization(_) => PsStatus::MissingPolarization,
        Error::OutOfTable { .. } => PsStatus::OutOfRange,
        Error::Numerical(_) | Error::Io(_) => PsStatus::Numerical,
        _ => PsStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PsStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            PsStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            PsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

fn undefined_as_nan(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

/// Unit-length coupler with κ(λdeg) = π/4 + `delta_xi` and
/// λdeg·dκ/dλ = `big_m`.
///
/// # Safety
/// `out_coupler` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_coupler_from_dimensionless(
    delta_xi: f64,
    big_m: f64,
    lambda_deg: f64,
    out_coupler: *mut *mut PsCoupler,
) -> PsStatus {
    guard(|| {
        let slot = out(out_coupler, "out_coupler")?;
        let c = CouplerModel::from_dimensionless(delta_xi, big_m, lambda_deg)?;
        *slot = Box::into_raw(Box::new(PsCoupler(c)));
        Ok(())
    })
}

/// Polarization-independent coupler with κ(λ) = slope·λ + intercept (1/m).
///
/// # Safety
/// `out_coupler` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_coupler_linear(
    length: f64,
    slope: f64,
    intercept: f64,
    out_coupler: *mut *mut PsCoupler,
) -> PsStatus {
    guard(|| {
        let slot = out(out_coupler, "out_coupler")?;
        let c = CouplerModel::isotropic(length, KappaModel::Linear { slope, intercept })?;
        *slot = Box::into_raw(Box::new(PsCoupler(c)));
        Ok(())
    })
}

/// Releases a coupler. Null is ignored.
///
/// # Safety
/// `coupler` must come from a `ps_coupler_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ps_coupler_free(coupler: *mut PsCoupler) {
    if !coupler.is_null() {
        drop(Box::from_raw(coupler));
    }
}

/// # Safety
/// Pointers must be valid; `coupler` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_coupler_dimensionless_params(
    coupler: *const PsCoupler,
    polarization: PsPolarization,
    lambda_deg: f64,
    out_params: *mut PsDimensionless,
) -> PsStatus {
    guard(|| {
        let c = deref(coupler, "coupler")?;
        let slot = out(out_params, "out_params")?;
        let p = c.0.dimensionless_params(polarization.into(), lambda_deg)?;
        *slot = PsDimensionless {
            delta_xi: p.delta_xi,
            big_m: p.big_m,
            period_t_lambda: undefined_as_nan(p.period_t_lambda),
            eta_deg: p.eta_deg,
        };
        Ok(())
    })
}

/// Cross-coupled power fraction η(λ).
///
/// # Safety
/// Pointers must be valid; `coupler` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_coupler_splitting_ratio(
    coupler: *const PsCoupler,
    polarization: PsPolarization,
    lambda: f64,
    out_eta: *mut f64,
) -> PsStatus {
    guard(|| {
        let c = deref(coupler, "coupler")?;
        let slot = out(out_eta, "out_eta")?;
        *slot = c.0.splitting_ratio(polarization.into(), lambda)?;
        Ok(())
    })
}

/// Co-polarized (Type-I) pair state from two Gaussian photon spectra and an
/// energy-conserving Gaussian pump. `pump_fwhm` = 0 selects a flat pump.
///
/// # Safety
/// `out_state` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ps_state_type1(
    photon1_center: f64,
    photon1_fwhm: f64,
    photon2_center: f64,
    photon2_fwhm: f64,
    pump_fwhm: f64,
    polarization: PsPolarization,
    points_per_axis: usize,
    sigma_span: f64,
    out_state: *mut *mut PsState,
) -> PsStatus {
    guard(|| {
        let slot = out(out_state, "out_state")?;
        let p1 = GaussianSpec::new(photon1_center, photon1_fwhm)?;
        let p2 = GaussianSpec::new(photon2_center, photon2_fwhm)?;
        let pump = energy_conserving_pump(&p1, &p2, pump_fwhm)?;
        let grid = make_pair_grid(&p1, &p2, sigma_span, points_per_axis)?;
        let jsa = build_type1_jsa(&pump, &p1, &p2, polarization.into(), &grid)?;
        *slot = Box::into_raw(Box::new(PsState(jsa)));
        Ok(())
    })
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `state` must come from a `ps_state_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ps_state_free(state: *mut PsState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// Pointers must be valid; `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_state_schmidt_number(state: *const PsState, out_sn: *mut f64) -> PsStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let slot = out(out_sn, "out_sn")?;
        *slot = schmidt_number(&s.0)?.schmidt_number;
        Ok(())
    })
}

/// Both sources emit `state`; source B carries the relative pump phase
/// `theta` (rad) and delay `tau` (s).
///
/// # Safety
/// Pointers must be valid; handles must be live.
#[no_mangle]
pub unsafe extern "C" fn ps_outcome(
    state: *const PsState,
    coupler: *const PsCoupler,
    theta: f64,
    tau: f64,
    out_outcome: *mut PsOutcome,
) -> PsStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let c = deref(coupler, "coupler")?;
        let slot = out(out_outcome, "out_outcome")?;
        if !theta.is_finite() || !tau.is_finite() {
            return Err(Error::InvalidArgument("theta and tau must be finite".into()).into());
        }
        let two = TwoSourceState::identical(&s.0, theta, tau)?;
        let r = accumulate(&two, &c.0)?.report(theta);
        *slot = PsOutcome {
            r_aa: r.r.aa,
            r_ab: r.r.ab,
            r_ba: r.r.ba,
            r_bb: r.r.bb,
            ps_total: r.ps_total,
            ps_classical: r.ps_classical,
            ps_interference: r.ps_interference,
            pb_total: r.pb_total,
            pb_classical: r.pb_classical,
            pb_interference: r.pb_interference,
            vis_s: undefined_as_nan(r.vis_s.value()),
            vis_b: undefined_as_nan(r.vis_b.value()),
        };
        Ok(())
    })
}

/// Closed-form narrowband prediction at (Δξ, MΛ, θ).
///
/// # Safety
/// `out_prediction` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_narrowband_oracle(
    delta_xi: f64,
    m_lambda: f64,
    theta: f64,
    out_prediction: *mut PsNarrowband,
) -> PsStatus {
    guard(|| {
        let slot = out(out_prediction, "out_prediction")?;
        let p = narrowband_oracle(delta_xi, m_lambda, theta);
        *slot = PsNarrowband {
            ps_total: p.ps_total,
            ps_classical: p.ps_classical,
            ps_interference: p.ps_interference,
            vis_s: undefined_as_nan(p.vis_s.value()),
            vis_b: undefined_as_nan(p.vis_b.value()),
        };
        Ok(())
    })
}

/// Message of the last failing call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ps_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ps_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
