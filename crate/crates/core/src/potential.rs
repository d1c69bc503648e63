// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! Generalized pocket models `H = |0⟩⟨0| ⊗ V(q) + |1⟩⟨1| ⊗ V(-q)` for a
//! non-negative, non-decreasing potential `V`.
//!
//! The coherence factor becomes `f(t) = ⟨φ| e^{-itW(q)} φ⟩` with the odd,
//! strictly increasing `W(x) = V(x) - V(-x)`. Choosing
//! `|φ(x)|² = W'(x) p_C(W(x))` (the pullback of the Cauchy–Lorentz density
//! through `W`) makes `u = W(x)` Lorentzian-distributed, so `f` is again
//! `e^{-γ|t|/2 - iω₀t}`.
//!
//! The opposite transport, `|φ(x)|² = p_C(W⁻¹(x)) / W'(W⁻¹(x))`, is also
//! available as [`StateConstruction::Pushforward`]. It makes `W⁻¹(q)`
//! Lorentzian instead, and its `f` is not exponential unless `W` is the
//! identity.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscint::{ComplexTimeSeries, PhaseMap, QuadratureConfig, SeriesMeta, Transform};
use crate::pocket::{grid_expectation, PositionGrid, TrialState};
use crate::spectral::{
    self, DephasingParams, InitialStateSpec, SpectralDensity, Support, TailDecay,
};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Monotonicity and positivity are spot-checked on this many points of
/// `[-CHECK_HALF_WIDTH, CHECK_HALF_WIDTH]`.
pub const CHECK_POINTS: usize = 1001;
pub const CHECK_HALF_WIDTH: f64 = 30.0;

/// Bracket doublings allowed while inverting `W`.
pub const MAX_DOUBLINGS: usize = 200;

/// Bisection stops once the bracket is this narrow.
pub const INVERSE_TOL: f64 = 1e-12;

/// Normalization tolerance for constructed states.
pub const STATE_NORM_TOL: f64 = 1e-8;

/// Inverse brackets prepared at construction: `W⁻¹(±10^j)`.
const BRACKET_DECADES: i32 = 6;

/// A potential `V` with optional analytic derivative.
#[derive(Clone)]
pub struct PotentialFn {
    label: String,
    value: RealFn,
    derivative: Option<RealFn>,
}

impl fmt::Debug for PotentialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialFn")
            .field("label", &self.label)
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

impl PotentialFn {
    pub fn new<F>(label: impl Into<String>, value: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        PotentialFn {
            label: label.into(),
            value: Arc::new(value),
            derivative: None,
        }
    }

    pub fn with_derivative<F>(mut self, derivative: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    /// Drop the analytic derivative, forcing finite differences.
    pub fn without_derivative(mut self) -> Self {
        self.derivative = None;
        self
    }

    /// `V(x) = max(x, 0)`, with `V'(0) = 1/2`.
    pub fn ramp() -> Self {
        PotentialFn::new("ramp", |x: f64| x.max(0.0)).with_derivative(|x: f64| {
            if x > 0.0 {
                1.0
            } else if x < 0.0 {
                0.0
            } else {
                0.5
            }
        })
    }

    /// `V(x) = eˣ`.
    pub fn exponential() -> Self {
        PotentialFn::new("exp", f64::exp).with_derivative(f64::exp)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// A validated potential with its induced map `W` and inverse.
#[derive(Clone, Debug)]
pub struct MonotonePotential {
    v: PotentialFn,
    /// `(W(x), x)` sorted by `W`.
    brackets: Vec<(f64, f64)>,
}

/// Validate `v` and prepare the inverse of `W(x) = V(x) - V(-x)`.
pub fn induced_map(v: PotentialFn) -> Result<MonotonePotential> {
    let n = CHECK_POINTS - 1;
    let xs: Vec<f64> = (0..=n)
        .map(|i| -CHECK_HALF_WIDTH + 2.0 * CHECK_HALF_WIDTH * i as f64 / n as f64)
        .collect();
    let vs: Vec<f64> = xs.iter().map(|&x| (v.value)(x)).collect();
    for (&x, &value) in xs.iter().zip(&vs) {
        if value.is_nan() {
            return Err(Error::InvalidArgument(format!("V({x}) is NaN")));
        }
        if value < 0.0 {
            return Err(Error::NegativePotential { x, value });
        }
    }
    for i in 0..n {
        let (x0, x1, v0, v1) = (xs[i], xs[i + 1], vs[i], vs[i + 1]);
        // Non-decreasing everywhere, strictly increasing on (0, ∞).
        if v1 < v0 || (x0 >= 0.0 && v1 <= v0) {
            return Err(Error::NonMonotone { x0, v0, x1, v1 });
        }
    }

    let mut p = MonotonePotential {
        v,
        brackets: Vec::new(),
    };
    let mut brackets = vec![(0.0, p.solve(0.0, -1.0, 1.0)?)];
    for j in 0..=BRACKET_DECADES {
        for y in [10f64.powi(j), -(10f64.powi(j))] {
            brackets.push((y, p.solve(y, -1.0, 1.0)?));
        }
    }
    brackets.sort_by(|a, b| a.0.total_cmp(&b.0));
    p.brackets = brackets;
    Ok(p)
}

impl MonotonePotential {
    pub fn label(&self) -> &str {
        &self.v.label
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.v.derivative.is_some()
    }

    pub fn v(&self, x: f64) -> f64 {
        (self.v.value)(x)
    }

    /// `V'(x)`, analytic when supplied, otherwise a five-point central
    /// difference with step `1e-3 max(1, |x|)`.
    pub fn v_prime(&self, x: f64) -> f64 {
        match &self.v.derivative {
            Some(d) => d(x),
            None => five_point(|s| self.v(s), x),
        }
    }

    pub fn w(&self, x: f64) -> f64 {
        self.v(x) - self.v(-x)
    }

    pub fn w_prime(&self, x: f64) -> f64 {
        match &self.v.derivative {
            Some(d) => d(x) + d(-x),
            None => five_point(|s| self.w(s), x),
        }
    }

    /// `x` with `W(x) = y`.
    pub fn w_inverse(&self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::InvalidArgument(format!("cannot invert W at {y}")));
        }
        let k = self.brackets.partition_point(|&(target, _)| target <= y);
        if k > 0 && self.brackets[k - 1].0 == y {
            return Ok(self.brackets[k - 1].1);
        }
        if k == 0 || k == self.brackets.len() {
            let (_, edge) = if k == 0 {
                self.brackets[0]
            } else {
                self.brackets[k - 1]
            };
            let (lo, hi) = if k == 0 {
                (edge - 1.0, edge)
            } else {
                (edge, edge + 1.0)
            };
            return self.solve(y, lo, hi);
        }
        Ok(self.bisect(y, self.brackets[k - 1].1, self.brackets[k].1))
    }

    /// Expand `[lo, hi]` by doubling its distance from the other end until
    /// it brackets `y`, then bisect.
    fn solve(&self, y: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
        let mut doublings = 0;
        while self.w(hi) < y {
            if doublings == MAX_DOUBLINGS {
                return Err(Error::RangeFailure {
                    target: y,
                    doublings,
                });
            }
            let width = (hi - lo).max(1.0);
            lo = hi;
            hi += 2.0 * width;
            doublings += 1;
        }
        while self.w(lo) > y {
            if doublings == MAX_DOUBLINGS {
                return Err(Error::RangeFailure {
                    target: y,
                    doublings,
                });
            }
            let width = (hi - lo).max(1.0);
            hi = lo;
            lo -= 2.0 * width;
            doublings += 1;
        }
        Ok(self.bisect(y, lo, hi))
    }

    fn bisect(&self, y: f64, mut lo: f64, mut hi: f64) -> f64 {
        while hi - lo > INVERSE_TOL {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.w(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mid = lo + 0.5 * (hi - lo);
        if self.has_analytic_derivative() {
            let slope = self.w_prime(mid);
            if slope > 0.0 {
                let polished = mid - (self.w(mid) - y) / slope;
                if polished >= lo && polished <= hi {
                    return polished;
                }
            }
        }
        mid
    }
}

fn five_point<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = 1e-3 * x.abs().max(1.0);
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

impl PhaseMap for MonotonePotential {
    fn forward(&self, x: f64) -> f64 {
        self.w(x)
    }

    fn inverse(&self, u: f64) -> Result<f64> {
        self.w_inverse(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StateConstruction {
    /// `|φ(x)|² = W'(x) p_C(W(x))`.
    #[default]
    Pullback,
    /// `|φ(x)|² = p_C(W⁻¹(x)) / W'(W⁻¹(x))`.
    Pushforward,
}

impl StateConstruction {
    pub fn name(self) -> &'static str {
        match self {
            StateConstruction::Pullback => "pullback",
            StateConstruction::Pushforward => "pushforward",
        }
    }
}

impl std::str::FromStr for StateConstruction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pullback" => Ok(StateConstruction::Pullback),
            "pushforward" => Ok(StateConstruction::Pushforward),
            other => Err(Error::InvalidArgument(format!(
                "unknown state construction {other:?} (expected pullback or pushforward)"
            ))),
        }
    }
}

/// `W'(x) p_C(W(x))`, zero where `W` overflows.
fn pullback_density(p: &MonotonePotential, params: DephasingParams, x: f64) -> f64 {
    let w = p.w(x);
    if !w.is_finite() {
        return 0.0;
    }
    let v = p.w_prime(x) * params.lorentzian(w);
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Environment state transported from the Cauchy–Lorentz state of
/// `params` through `W`.
///
/// The pullback density is checked to have unit mass within `1e-8`. The
/// pushforward density is not: its tails extend beyond the floating-point
/// range for fast-growing `W` (for `V = eˣ`, a mass of order `γ/(2π·700)`
/// lies beyond `x = 10³⁰⁸`), and its mass is 1 only through the change of
/// variables. It is instead required that `W'` does not vanish on the
/// check grid.
pub fn build_initial_state(
    p: &MonotonePotential,
    params: DephasingParams,
    construction: StateConstruction,
) -> Result<InitialStateSpec> {
    let (w0, h) = (params.omega0(), params.half_width());
    match construction {
        StateConstruction::Pullback => {
            let center = p.w_inverse(w0)?;
            let scale = p.w_inverse(w0 + h)? - center;
            let q = p.clone();
            let density = SpectralDensity::custom(
                format!(
                    "pullback[{}](gamma={}, omega0={})",
                    p.label(),
                    params.gamma(),
                    w0
                ),
                move |x| pullback_density(&q, params, x),
                Support::REAL_LINE,
                TailDecay::Heavy,
                center,
                scale,
            )?;
            let mass = spectral::normalize_check(&density, &QuadratureConfig::default())?;
            if (mass - 1.0).abs() > STATE_NORM_TOL {
                return Err(Error::InvalidDensity(format!(
                    "transported density has mass {mass}"
                )));
            }
            let q = p.clone();
            Ok(InitialStateSpec::with_phase(density, move |x| {
                h.atan2(q.w(x) - w0)
            }))
        }
        StateConstruction::Pushforward => {
            let n = CHECK_POINTS - 1;
            for i in 0..=n {
                let y = -CHECK_HALF_WIDTH + 2.0 * CHECK_HALF_WIDTH * i as f64 / n as f64;
                if !(p.w_prime(y) > 0.0) {
                    return Err(Error::SingularJacobian { x: y });
                }
            }
            let center = p.w(w0);
            let scale = p.w(w0 + h) - center;
            let q = p.clone();
            let density = SpectralDensity::custom(
                format!(
                    "pushforward[{}](gamma={}, omega0={})",
                    p.label(),
                    params.gamma(),
                    w0
                ),
                move |x| match q.w_inverse(x) {
                    Ok(y) => params.lorentzian(y) / q.w_prime(y),
                    Err(_) => f64::NAN,
                },
                Support::REAL_LINE,
                TailDecay::Heavy,
                center,
                scale,
            )?;
            let q = p.clone();
            Ok(InitialStateSpec::with_phase(density, move |x| {
                q.w_inverse(x).map(|y| h.atan2(y - w0)).unwrap_or(0.0)
            }))
        }
    }
}

/// `∫ e^{-itW(x)} |φ(x)|² dx` for the pullback state of `params`.
pub fn generalized_dephasing_factor(
    p: &MonotonePotential,
    params: DephasingParams,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let density = |x: f64| pullback_density(p, params, x);
    // In u = W(x) the pullback state is the Cauchy–Lorentz density itself.
    Transform {
        density: &density,
        phase: p,
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        center: params.omega0(),
        scale: params.half_width(),
        tail: TailDecay::Heavy,
        kinks: Vec::new(),
    }
    .evaluate(t, cfg)
    .map(|e| e.value)
}

/// [`generalized_dephasing_factor`] on a time grid.
pub fn generalized_factor_series(
    p: &MonotonePotential,
    params: DephasingParams,
    times: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ComplexTimeSeries> {
    let meta = SeriesMeta {
        source: format!(
            "pullback[{}](gamma={}, omega0={})",
            p.label(),
            params.gamma(),
            params.omega0()
        ),
        operation: "generalized_dephasing_factor".into(),
        config: *cfg,
    };
    ComplexTimeSeries::tabulate(times, meta, |t| {
        generalized_dephasing_factor(p, params, t, cfg)
    })
}

/// `⟨ψ| (|0⟩⟨0| ⊗ V(q) + |1⟩⟨1| ⊗ V(-q)) ψ⟩` for each trial state.
pub fn generalized_positivity_check(
    p: &MonotonePotential,
    grid: &PositionGrid,
    trial_states: &[TrialState],
) -> Result<Vec<f64>> {
    trial_states
        .iter()
        .map(|s| grid_expectation(grid, s, |x| p.v(x)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{self, Tolerance};
    use approx::assert_abs_diff_eq;

    fn params(gamma: f64, omega0: f64) -> DephasingParams {
        DephasingParams::new(gamma, omega0).unwrap()
    }

    #[test]
    fn ramp_gives_identity_map() {
        let p = induced_map(PotentialFn::ramp()).unwrap();
        for x in [-7.5, -1.0, 0.0, 0.3, 12.0] {
            assert_eq!(p.w(x), x);
            assert_abs_diff_eq!(p.w_inverse(x).unwrap(), x, epsilon = 1e-12);
        }
        assert_eq!(p.w_prime(0.0), 1.0);
    }

    #[test]
    fn exponential_gives_twice_sinh() {
        let p = induced_map(PotentialFn::exponential()).unwrap();
        for x in [-3.0, -0.5, 0.0, 1.0, 4.0] {
            assert_abs_diff_eq!(p.w(x), 2.0 * f64::sinh(x), epsilon = 1e-12 * x.cosh());
            assert_eq!(p.w(-x), -p.w(x));
        }
        assert_eq!(p.w_inverse(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            p.w_inverse(2.0 * 3f64.sinh()).unwrap(),
            3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            p.w_inverse(1e300).unwrap(),
            (0.5e300f64).asinh(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn finite_difference_derivative() {
        let p = induced_map(PotentialFn::exponential().without_derivative()).unwrap();
        assert!(!p.has_analytic_derivative());
        for x in [-2.0, 0.0, 1.5] {
            assert_abs_diff_eq!(p.w_prime(x), 2.0 * f64::cosh(x), epsilon = 1e-8 * x.cosh());
        }
        let r = induced_map(PotentialFn::ramp().without_derivative()).unwrap();
        assert_abs_diff_eq!(r.w_prime(0.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_invalid_potentials() {
        let wiggle = PotentialFn::new("wiggle", |x: f64| 2.0 + (x).sin());
        assert!(matches!(
            induced_map(wiggle),
            Err(Error::NonMonotone { .. })
        ));
        let negative = PotentialFn::new("shifted", |x: f64| x.max(0.0) - 1.0);
        assert!(matches!(
            induced_map(negative),
            Err(Error::NegativePotential { .. })
        ));
        let flat = PotentialFn::new("flat", |x: f64| (x - 1.0).max(0.0));
        assert!(matches!(induced_map(flat), Err(Error::NonMonotone { .. })));
        let bounded = PotentialFn::new("bounded", |x: f64| 1.0 + x / (1.0 + x.abs()));
        assert!(matches!(
            induced_map(bounded),
            Err(Error::RangeFailure { .. })
        ));
    }

    #[test]
    fn pushforward_density_at_origin() {
        let p = induced_map(PotentialFn::exponential()).unwrap();
        let s = build_initial_state(&p, params(1.0, 0.0), StateConstruction::Pushforward).unwrap();
        assert_abs_diff_eq!(
            s.density.evaluate(0.0),
            std::f64::consts::FRAC_1_PI,
            epsilon = 1e-15
        );
    }

    #[test]
    fn pullback_density_values() {
        let p = induced_map(PotentialFn::exponential()).unwrap();
        let s = build_initial_state(&p, params(1.0, 0.0), StateConstruction::Pullback).unwrap();
        assert_abs_diff_eq!(
            s.density.evaluate(0.0),
            4.0 / std::f64::consts::PI,
            epsilon = 1e-15
        );
        let r = induced_map(PotentialFn::ramp()).unwrap();
        let s = build_initial_state(&r, params(1.0, 0.5), StateConstruction::Pullback).unwrap();
        for x in [-3.0, 0.0, 0.5, 2.0] {
            assert_eq!(s.density.evaluate(x), params(1.0, 0.5).lorentzian(x));
        }
    }

    #[test]
    fn singular_jacobian_is_reported() {
        let cubic = PotentialFn::new("cubic", |x: f64| x.max(0.0).powi(3))
            .with_derivative(|x: f64| 3.0 * x.max(0.0).powi(2));
        let p = induced_map(cubic).unwrap();
        assert!(matches!(
            build_initial_state(&p, params(1.0, 0.0), StateConstruction::Pushforward),
            Err(Error::SingularJacobian { .. })
        ));
        assert!(build_initial_state(&p, params(1.0, 0.0), StateConstruction::Pullback).is_ok());
    }

    #[test]
    fn generalized_factor_is_exponential() {
        let p = induced_map(PotentialFn::exponential()).unwrap();
        let cfg = QuadratureConfig::default();
        let f = generalized_dephasing_factor(&p, params(1.0, 0.0), 2.0, &cfg).unwrap();
        assert_abs_diff_eq!(f.re, (-1.0f64).exp(), epsilon = 1e-9);
        assert_abs_diff_eq!(f.im, 0.0, epsilon = 1e-9);
        let f = generalized_dephasing_factor(&p, params(0.7, 1.0), 0.0, &cfg).unwrap();
        assert_abs_diff_eq!(f.re, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn pushforward_factor_is_not_exponential() {
        // In y = W⁻¹(x) the pushforward state is Lorentzian, so
        // f(t) = ∫ e^{-itW(W(y))} p_C(y) dy. Integrate |y| ≤ 1.5 and bound the
        // rest by its mass.
        let p = induced_map(PotentialFn::exponential()).unwrap();
        let pc = params(1.0, 0.0);
        let g = |y: f64| Complex64::from_polar(pc.lorentzian(y), -2.0 * p.w(p.w(y)));
        let bp: Vec<f64> = (0..=400).map(|k| -1.5 + 3.0 * k as f64 / 400.0).collect();
        let part = quad::integrate(&g, &bp, Tolerance::new(1e-12, 1e-12), 10_000).unwrap();
        let rest = 1.0 - (pc.lorentzian_cdf(1.5) - pc.lorentzian_cdf(-1.5));
        assert_abs_diff_eq!(part.value.norm(), 0.034_486_999_624_324_29, epsilon = 1e-9);
        assert!(part.value.norm() + rest < (-1.0f64).exp() - 0.1);
    }
}
