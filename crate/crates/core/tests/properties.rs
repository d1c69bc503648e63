// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use shallowpocket::diagnostics::{paley_wiener_integral, ClosedForm};
use shallowpocket::gkls::{generator_from_rates, propagate, Convention};
use shallowpocket::oscint::{fourier_amplitude, halfline_transform};
use shallowpocket::pocket::{reduced_state, PocketModel};
use shallowpocket::potential::{induced_map, PotentialFn};
use shallowpocket::spectral::{lorentzian_density, Side};
use shallowpocket::{Complex64, DephasingParams, InitialStateSpec, QuadratureConfig, QubitState};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn any_params() -> impl Strategy<Value = DephasingParams> {
    (0.1f64..4.0, -3.0f64..3.0).prop_map(|(g, w)| DephasingParams::new(g, w).unwrap())
}

fn any_state() -> impl Strategy<Value = QubitState> {
    (0.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 0.0f64..1.0).prop_map(|(p, re, im, shrink)| {
        // Scale the coherence inside the disc |ρ01|² ≤ ρ00 ρ11.
        let r = (p * (1.0 - p)).sqrt() * shrink;
        let c = Complex64::new(re, im);
        let c = if c.norm() > 0.0 { c / c.norm() * r } else { c };
        QubitState::from_population(p, c).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conjugate_symmetric(p in any_params(), t in 0.0f64..40.0) {
        let d = lorentzian_density(p);
        let a = fourier_amplitude(&d, t, &cfg()).unwrap();
        let b = fourier_amplitude(&d, -t, &cfg()).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-10);
    }

    #[test]
    fn contractive(p in any_params(), t in 0.0f64..60.0) {
        let a = fourier_amplitude(&lorentzian_density(p), t, &cfg()).unwrap();
        prop_assert!(a.norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn half_lines_add_up(p in any_params(), t in 0.0f64..60.0) {
        let d = lorentzian_density(p);
        let sum = halfline_transform(&d, Side::Negative, t, &cfg()).unwrap()
            + halfline_transform(&d, Side::Positive, t, &cfg()).unwrap();
        prop_assert!((sum - p.exponential_amplitude(t)).norm() <= 2.0 * cfg().abs_tol);
    }

    #[test]
    fn energy_rescaling(p in any_params(), k in 0.2f64..5.0, t in 0.0f64..10.0) {
        // p(E/k)/k has amplitude a(kt).
        let q = DephasingParams::new(k * p.gamma(), k * p.omega0()).unwrap();
        let lhs = fourier_amplitude(&lorentzian_density(q), t, &cfg()).unwrap();
        let rhs = fourier_amplitude(&lorentzian_density(p), k * t, &cfg()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 2e-9);
    }

    #[test]
    fn phase_invariance(
        p in any_params(),
        rho in any_state(),
        (a, b, c) in (-5.0f64..5.0, -3.0f64..3.0, -1.0f64..1.0),
        t in 0.0f64..20.0,
    ) {
        let plain = PocketModel::new(p);
        let spec = InitialStateSpec::with_phase(lorentzian_density(p), move |e: f64| a * (b * e).sin() + c * e * e);
        let twisted = PocketModel::with_environment(p, spec, &cfg()).unwrap();
        prop_assert_eq!(
            reduced_state(&plain, &rho, t, &cfg()).unwrap(),
            reduced_state(&twisted, &rho, t, &cfg()).unwrap()
        );
    }

    #[test]
    fn reduced_states_are_states(p in any_params(), rho in any_state(), t in 0.0f64..30.0) {
        let s = reduced_state(&PocketModel::new(p), &rho, t, &cfg()).unwrap();
        prop_assert!(s.check().is_ok());
        prop_assert!((s.trace() - 1.0).abs() <= 1e-12);
        prop_assert!(s.purity() <= rho.purity() + 1e-12);
    }

    #[test]
    fn semigroup_law(
        gamma in 0.0f64..4.0,
        omega0 in -3.0f64..3.0,
        matched in any::<bool>(),
        rho in any_state(),
        t in 0.0f64..10.0,
        s in 0.0f64..10.0,
    ) {
        let conv = if matched { Convention::Matched } else { Convention::Literal };
        let g = generator_from_rates(gamma, omega0, conv).unwrap();
        let lhs = propagate(&g, &rho, t + s).unwrap();
        let mid = propagate(&g, &rho, s).unwrap();
        prop_assert!(mid.check().is_ok());
        let rhs = propagate(&g, &mid, t).unwrap();
        prop_assert!(lhs.trace_distance(&rhs) <= 1e-12);
    }

    #[test]
    fn induced_map_round_trip(scale in 0.1f64..5.0, rate in 0.2f64..2.0, x in -20.0f64..20.0) {
        let v = PotentialFn::new("scaled exp", move |x: f64| scale * (rate * x).exp())
            .with_derivative(move |x: f64| scale * rate * (rate * x).exp());
        let p = induced_map(v).unwrap();
        prop_assert_eq!(p.w(-x), -p.w(x));
        let back = p.w_inverse(p.w(x)).unwrap();
        prop_assert!((back - x).abs() <= 1e-9);
    }

    #[test]
    fn pw_grows_with_horizon(gamma in 0.1f64..2.0, t0 in 0.5f64..50.0, factor in 1.0f64..10.0) {
        let a = ClosedForm(move |t: f64| Complex64::new((-gamma * t.abs() / 2.0).exp(), 0.0));
        let lo = paley_wiener_integral(&a, t0, &cfg()).unwrap();
        let hi = paley_wiener_integral(&a, t0 * factor, &cfg()).unwrap();
        prop_assert!(hi >= lo - 1e-12);
    }
}
