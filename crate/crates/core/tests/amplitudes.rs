// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shallowpocket::oscint::{self, fourier_amplitude, halfline_amplitude, halfline_transform};
use shallowpocket::spectral::{
    self, half_line_mass, lorentzian_density, normalize_check, Side, Support, TailDecay,
};
use shallowpocket::{Complex64, DephasingParams, QuadratureConfig, SpectralDensity};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn lor(gamma: f64, omega0: f64) -> SpectralDensity {
    lorentzian_density(DephasingParams::new(gamma, omega0).unwrap())
}

fn family() -> Vec<SpectralDensity> {
    vec![
        lor(1.0, 0.0),
        lor(3.0, 5.0),
        lor(0.5, -1.0),
        SpectralDensity::exponential(1.0, 0.0).unwrap(),
        SpectralDensity::exponential(2.5, -0.4).unwrap(),
        SpectralDensity::table(vec![(-2.0, 0.0), (-0.5, 1.0), (1.0, 0.2), (3.0, 0.0)]).unwrap(),
    ]
}

#[test]
fn lorentzian_peaks() {
    assert_abs_diff_eq!(
        lor(1.0, 0.0).evaluate(0.0),
        0.636_619_772_367_581_4,
        epsilon = 1e-15
    );
    assert_abs_diff_eq!(
        lor(2.0, 0.0).evaluate(0.0),
        0.318_309_886_183_790_7,
        epsilon = 1e-15
    );
}

#[test]
fn densities_are_normalized_and_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in family() {
        assert_abs_diff_eq!(normalize_check(&d, &cfg()).unwrap(), 1.0, epsilon = 1e-10);
        let s = d.support();
        for _ in 0..10_000 {
            let lo = if s.lo.is_finite() {
                s.lo
            } else {
                d.center() - 1e4 * d.scale()
            };
            let hi = if s.hi.is_finite() {
                s.hi
            } else {
                d.center() + 1e4 * d.scale()
            };
            let e = rng.gen_range(lo..=hi);
            assert!(d.evaluate(e) >= 0.0);
        }
    }
}

#[test]
fn half_line_masses_add_to_one() {
    for d in family() {
        let neg = half_line_mass(&d, Side::Negative, &cfg()).unwrap();
        let pos = half_line_mass(&d, Side::Positive, &cfg()).unwrap();
        assert_abs_diff_eq!(neg + pos, 1.0, epsilon = 1e-9);
    }
}

#[test]
fn lorentzian_half_line_mass_closed_form() {
    for (gamma, omega0) in [(1.0, 0.0), (1.0, 1.0), (0.3, -2.0), (4.0, 7.0)] {
        let neg = half_line_mass(&lor(gamma, omega0), Side::Negative, &cfg()).unwrap();
        let expected = 0.5 - (2.0 * omega0 / gamma).atan() / std::f64::consts::PI;
        assert_abs_diff_eq!(neg, expected, epsilon = 1e-12);
    }
}

#[test]
fn fourier_amplitude_of_lorentzian_family() {
    for gamma in [0.5, 1.0, 2.0] {
        for omega0 in [0.0, 1.0, -3.0] {
            let p = DephasingParams::new(gamma, omega0).unwrap();
            let d = lorentzian_density(p);
            for t in [0.0, 0.25, 1.0, 3.7, 10.0, 20.0, 55.0] {
                let a = fourier_amplitude(&d, t, &cfg()).unwrap();
                assert!(
                    (a - p.exponential_amplitude(t)).norm() <= 1e-9,
                    "γ={gamma} ω₀={omega0} t={t}: {a}"
                );
            }
        }
    }
}

#[test]
fn conjugate_symmetry() {
    for d in family() {
        for t in [0.3, 2.0, 17.0] {
            let a = fourier_amplitude(&d, t, &cfg()).unwrap();
            let b = fourier_amplitude(&d, -t, &cfg()).unwrap();
            assert!((a - b.conj()).norm() <= 1e-10);
        }
    }
}

#[test]
fn contractivity() {
    let times: Vec<f64> = (0..=60).map(|k| k as f64 * 0.5).collect();
    for d in family() {
        let s = oscint::amplitude_series(&d, &times, &cfg()).unwrap();
        for (t, v) in s.iter() {
            assert!(
                v.norm() <= 1.0 + 1e-9,
                "{}: |a({t})| = {}",
                d.label(),
                v.norm()
            );
        }
    }
}

#[test]
fn split_identity() {
    for (gamma, omega0) in [(1.0, 0.0), (0.5, 1.0), (2.0, -0.7)] {
        let p = DephasingParams::new(gamma, omega0).unwrap();
        let d = lorentzian_density(p);
        for t in [0.0, 0.1, 1.0, 4.0, 30.0, 200.0] {
            let neg = halfline_transform(&d, Side::Negative, t, &cfg()).unwrap();
            let pos = halfline_transform(&d, Side::Positive, t, &cfg()).unwrap();
            assert!(
                (neg + pos - p.exponential_amplitude(t)).norm() <= 2.0 * cfg().abs_tol,
                "t={t}"
            );
        }
    }
}

#[test]
fn halfline_amplitudes_approach_frozen_mass() {
    let d = lor(1.0, 0.0);
    for side in [Side::Positive, Side::Negative] {
        let a = halfline_amplitude(&d, side, 200.0, &cfg()).unwrap();
        assert!((a.norm() - 0.5).abs() < 0.01);
        assert_abs_diff_eq!(
            halfline_amplitude(&d, side, 0.0, &cfg()).unwrap().re,
            1.0,
            epsilon = 1e-9
        );
    }
    // With ω₀ ≠ 0 the limit is the mass of the frozen half-line.
    let d = lor(1.0, 1.0);
    let a = halfline_amplitude(&d, Side::Positive, 400.0, &cfg()).unwrap();
    let frozen = half_line_mass(&d, Side::Negative, &cfg()).unwrap();
    assert_abs_diff_eq!(frozen, 0.147_583_617_650_433_27, epsilon = 1e-12);
    assert!((a - Complex64::new(frozen, 0.0)).norm() < 0.01);
}

#[test]
fn riemann_lebesgue_decay() {
    for gamma in [0.5, 1.0, 2.0] {
        let d = lor(gamma, 0.3);
        let env: Vec<f64> = [50.0, 100.0, 200.0]
            .iter()
            .map(|&t| fourier_amplitude(&d, t, &cfg()).unwrap().norm())
            .collect();
        // Values below the tolerance are indistinguishable from zero.
        let tol = cfg().abs_tol;
        assert!(
            env[1] <= env[0] + 2.0 * tol && env[2] <= env[1] + 2.0 * tol,
            "{env:?}"
        );
        assert!(env[2] < 0.05);
    }
}

#[test]
fn exponential_density_transform() {
    let d = SpectralDensity::exponential(1.0, 0.0).unwrap();
    for t in [0.5, 1.0, 8.0, 60.0] {
        let a = fourier_amplitude(&d, t, &cfg()).unwrap();
        assert!((a - Complex64::new(1.0, t).inv()).norm() <= 1e-9, "t={t}");
    }
}

#[test]
fn series_is_deterministic_and_matches_pointwise() {
    let d = lor(0.8, 0.4);
    let times: Vec<f64> = (0..200).map(|k| k as f64 * 0.37).collect();
    let a = oscint::amplitude_series(&d, &times, &cfg()).unwrap();
    let b = oscint::amplitude_series(&d, &times, &cfg()).unwrap();
    assert_eq!(a, b);
    for (t, v) in a.iter() {
        assert_eq!(v, fourier_amplitude(&d, t, &cfg()).unwrap());
    }
}

#[test]
fn failing_time_is_attached() {
    let mut c = cfg();
    c.abs_tol = 1e-16;
    c.rel_tol = 1e-16;
    c.max_subdivisions = 2;
    c.truncation.max_tail_cells = 8;
    let err = oscint::amplitude_series(&lor(1.0, 0.0), &[0.0, 5.0], &c).unwrap_err();
    match err {
        shallowpocket::Error::QuadratureAt { time, .. } => assert!(time == 0.0 || time == 5.0),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn custom_density_requires_declared_metadata() {
    let bad = SpectralDensity::custom(
        "box",
        |e: f64| if e.abs() < 1.0 { 0.5 } else { 0.0 },
        Support::REAL_LINE,
        TailDecay::Compact,
        0.0,
        1.0,
    );
    assert!(bad.is_err());
    let good = SpectralDensity::custom(
        "box",
        |e: f64| if e.abs() < 1.0 { 0.5 } else { 0.0 },
        Support::new(-1.0, 1.0).unwrap(),
        TailDecay::Compact,
        0.0,
        1.0,
    )
    .unwrap();
    assert_abs_diff_eq!(
        spectral::normalize_check(&good, &cfg()).unwrap(),
        1.0,
        epsilon = 1e-12
    );
    let a = fourier_amplitude(&good, 2.0, &cfg()).unwrap();
    assert_abs_diff_eq!(a.re, 2f64.sin() / 2.0, epsilon = 1e-9);
}
