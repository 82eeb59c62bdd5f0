//! Generators and invariant checks shared by the property and acceptance suites.

#![allow(dead_code)]

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use pairsep::coupler::TransferMode;
use pairsep::interference::{accumulate, outcome_probabilities};
use pairsep::spectra::{build_cross_polarized_jsa, build_type1_jsa, make_grid, make_pair_grid, schmidt_number};
use pairsep::units::{nm, omega_to_wavelength, wavelength_to_omega};
use pairsep::{CouplerModel, GaussianSpec, JointSpectralAmplitude, KappaModel, Polarization, PolarizationPair, SpectralGrid, TwoSourceState};

pub const CASES: u32 = 256;

/// Photon pair: center (nm), splitting (nm), two bandwidths (nm) and pump
/// FWHM (nm, zero for a flat pump).
pub type Photons = (f64, f64, f64, f64, f64);

pub fn coupler_strategy() -> impl Strategy<Value = CouplerModel> {
    (
        1e-4..5e-3f64,
        (-2e10..2e10f64, -5e3..5e3f64),
        (-2e10..2e10f64, -5e3..5e3f64),
    )
        .prop_map(|(length, (s1, i1), (s2, i2))| {
            CouplerModel::new(length)
                .unwrap()
                .with_kappa(Polarization::Te, KappaModel::Linear { slope: s1, intercept: i1 })
                .with_kappa(Polarization::Tm, KappaModel::Linear { slope: s2, intercept: i2 })
        })
}

pub fn photons_strategy() -> impl Strategy<Value = Photons> {
    (
        1450.0..1650.0f64,
        0.0..150.0f64,
        0.5..20.0f64,
        0.5..20.0f64,
        prop_oneof![Just(0.0), 0.05..5.0f64],
    )
}

fn specs((center, split, bw1, bw2, pump): Photons) -> (GaussianSpec, GaussianSpec, GaussianSpec) {
    let p1 = GaussianSpec::from_nm(center - split / 2.0, bw1).unwrap();
    let p2 = GaussianSpec::from_nm(center + split / 2.0, bw2).unwrap();
    let lp = 1.0 / (1.0 / p1.center_wavelength + 1.0 / p2.center_wavelength);
    (GaussianSpec::new(lp, nm(pump)).unwrap(), p1, p2)
}

pub fn type1_state(photons: Photons) -> JointSpectralAmplitude {
    let (pump, p1, p2) = specs(photons);
    let grid = make_pair_grid(&p1, &p2, 4.0, 16).unwrap();
    build_type1_jsa(&pump, &p1, &p2, Polarization::Te, &grid).unwrap()
}

pub fn cross_state(photons: Photons) -> JointSpectralAmplitude {
    let (pump, p1, p2) = specs(photons);
    let grid = make_grid(&p1, &p2, 4.0, 16).unwrap();
    build_cross_polarized_jsa(&pump, &p1, &p2, &grid).unwrap()
}

pub fn check_conservation(
    coupler: &CouplerModel,
    photons: Photons,
    cross: bool,
    theta: f64,
    tau_fs: f64,
) -> Result<(), TestCaseError> {
    let jsa = if cross { cross_state(photons) } else { type1_state(photons) };
    let state = TwoSourceState::identical(&jsa, theta, tau_fs * 1e-15).unwrap();
    let r = outcome_probabilities(&state, coupler).unwrap();
    prop_assert!((r.r.sum() - 1.0).abs() <= 1e-9, "sum {}", r.r.sum());
    prop_assert!((r.ps_interference.abs() - r.pb_interference.abs()).abs() <= 1e-9);
    prop_assert!([r.r.aa, r.r.ab, r.r.ba, r.r.bb].iter().all(|&v| v >= -1e-12));
    prop_assert!(r.check_invariants(1e-9).is_ok());
    Ok(())
}

pub fn check_unitarity(
    coupler: &CouplerModel,
    lambda_nm: f64,
    reference_nm: f64,
    tm: bool,
    frozen: bool,
) -> Result<(), TestCaseError> {
    let pol = if tm { Polarization::Tm } else { Polarization::Te };
    let mode = if frozen {
        TransferMode::NonDispersive { reference_wavelength: nm(reference_nm) }
    } else {
        TransferMode::Dispersive
    };
    let u = coupler.transfer_matrix(pol, wavelength_to_omega(nm(lambda_nm)), mode).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let dot: Complex64 = (0..2).map(|k| u[k][i].conj() * u[k][j]).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            prop_assert!((dot - expect).norm() <= 1e-12, "U†U[{i}][{j}] = {dot}");
        }
    }
    Ok(())
}

pub fn check_exchange_symmetry(photons: Photons) -> Result<(), TestCaseError> {
    let jsa = type1_state(photons);
    let (_, phi) = jsa.single_component().unwrap();
    let n = phi.nrows();
    for i in 0..n {
        for j in 0..n {
            prop_assert_eq!(phi[[i, j]], phi[[j, i]]);
        }
    }
    Ok(())
}

pub fn check_schmidt(photons: Photons) -> Result<(), TestCaseError> {
    let sn = schmidt_number(&type1_state(photons)).unwrap();
    prop_assert!(sn.schmidt_number >= 1.0 - 1e-9, "SN {}", sn.schmidt_number);
    let total: f64 = sn.coefficients.iter().sum();
    prop_assert!((total - 1.0).abs() < 1e-9);
    Ok(())
}

/// Inputs of the 2×2 brute-force comparison.
#[derive(Debug, Clone)]
pub struct ToyCase {
    pub center_nm: f64,
    pub step_nm: f64,
    pub fa: Vec<(f64, f64)>,
    pub fb: Vec<(f64, f64)>,
    pub tm: (bool, bool),
    pub theta: f64,
    pub tau_fs: f64,
}

pub fn toy_strategy() -> impl Strategy<Value = ToyCase> {
    (
        1400.0..1700.0f64,
        0.5..80.0f64,
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4),
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4),
        (any::<bool>(), any::<bool>()),
        -7.0..7.0f64,
        -20.0..20.0f64,
    )
        .prop_map(|(center_nm, step_nm, fa, fb, tm, theta, tau_fs)| ToyCase { center_nm, step_nm, fa, fb, tm, theta, tau_fs })
}

fn block(pair: PolarizationPair, values: &[(f64, f64)]) -> BTreeMap<PolarizationPair, Array2<Complex64>> {
    let m = Array2::from_shape_fn((2, 2), |(i, j)| {
        let (re, im) = values[2 * i + j];
        Complex64::new(re, im)
    });
    BTreeMap::from([(pair, m)])
}

/// Output probabilities by direct enumeration. Photon 1 (ω₁ axis) and
/// photon 2 (ω₂ axis) each pass the coupler through
/// U = [[cos φ, i sin φ], [i sin φ, cos φ]], φ = κ(λ)L; source B carries the
/// extra phase e^{−i(θ + (ω₁+ω₂)τ)}.
pub fn brute_force(
    a: &JointSpectralAmplitude,
    b: &JointSpectralAmplitude,
    pair: PolarizationPair,
    coupler: &CouplerModel,
    theta: f64,
    tau: f64,
) -> [f64; 4] {
    let grid = a.grid();
    let (w1, w2) = (grid.axis1().weights(), grid.axis2().weights());
    let (o1, o2) = (grid.omega1(), grid.omega2());
    let unitary = |pol: Polarization, omega: f64| {
        let phi = coupler.phase(pol, omega_to_wavelength(omega)).unwrap();
        let (c, s) = (Complex64::new(phi.cos(), 0.0), Complex64::new(0.0, phi.sin()));
        [[c, s], [s, c]]
    };
    let (fa, fb) = (a.component(pair).unwrap(), b.component(pair).unwrap());
    let mut r = [0.0; 4];
    for i in 0..o1.len() {
        for j in 0..o2.len() {
            let u1 = unitary(pair.0, o1[i]);
            let u2 = unitary(pair.1, o2[j]);
            let phase_b = Complex64::from_polar(1.0, -(theta + (o1[i] + o2[j]) * tau));
            for (k, (p, q)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                let amp = u1[p][0] * u2[q][0] * fa[[i, j]] + u1[p][1] * u2[q][1] * fb[[i, j]] * phase_b;
                r[k] += amp.norm_sqr() * w1[i] * w2[j];
            }
        }
    }
    r
}

pub fn check_brute_force(coupler: &CouplerModel, case: &ToyCase) -> Result<(), TestCaseError> {
    let w0 = wavelength_to_omega(nm(case.center_nm));
    let dw = w0 - wavelength_to_omega(nm(case.center_nm + case.step_nm));
    let grid = SpectralGrid::toy(&[w0, w0 + dw], &[w0 - 0.3 * dw, w0 + 0.7 * dw]).unwrap();
    let pol = |tm: bool| if tm { Polarization::Tm } else { Polarization::Te };
    let pair = PolarizationPair(pol(case.tm.0), pol(case.tm.1));
    let a = JointSpectralAmplitude::from_components(grid.clone(), block(pair, &case.fa), 1.0);
    let b = JointSpectralAmplitude::from_components(grid, block(pair, &case.fb), 1.0);
    // All-zero draws cannot be normalized.
    let (Ok(a), Ok(b)) = (a, b) else {
        return Err(TestCaseError::reject("zero amplitude"));
    };
    let tau = case.tau_fs * 1e-15;
    let state = TwoSourceState::new(a, b, case.theta, tau).unwrap();
    let engine = accumulate(&state, coupler).unwrap().report(case.theta);
    let brute = brute_force(state.source_a(), state.source_b(), pair, coupler, case.theta, tau);
    let got = [engine.r.aa, engine.r.ab, engine.r.ba, engine.r.bb];
    for k in 0..4 {
        prop_assert!((got[k] - brute[k]).abs() <= 1e-12, "outcome {k}: {} vs {}", got[k], brute[k]);
    }
    Ok(())
}
