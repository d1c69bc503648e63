// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! Oscillatory integrals `∫ e^{-iEt} p(E) dE` over full-line, half-line
//! and compact supports.
//!
//! The engine works in a *phase coordinate* `u = g(x)`, where the integrand
//! is `p(x) e^{-i t g(x)}` and `g` is strictly increasing (the identity for
//! ordinary Fourier transforms, `W` for generalized potentials). The domain
//! is split into
//!
//! * a core `[c - K s, c + K s]` around the bulk of the mass, cut into
//!   half-period cells of width `π/t` and integrated with globally adaptive
//!   Gauss–Kronrod quadrature;
//! * tails on infinite sides. Heavy tails are summed cell by cell: cells of
//!   width `(2m+1)π/t` make consecutive contributions alternate, and Wynn's
//!   epsilon algorithm extrapolates the partial sums. At `t = 0` the cells
//!   grow geometrically instead. Exponential tails are cut at the point
//!   where the tail mass bound falls below `abs_tol/10`; the bound is added
//!   to the error, not to the value.
//!
//! Negative times are evaluated as the conjugate of `|t|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::{self, Estimate, FailureReason, QuadFailure, Tolerance};
use crate::spectral::{self, Side, SpectralDensity, TailDecay};

/// Tail handling parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Half width of the directly integrated core, in units of the density
    /// scale.
    pub core_half_width: f64,
    /// Maximum number of tail cells summed before giving up.
    pub max_tail_cells: usize,
    /// Number of tail cells summed before extrapolation is trusted.
    pub min_tail_cells: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            core_half_width: 16.0,
            max_tail_cells: 400,
            min_tail_cells: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Bisection budget of each adaptive integration.
    pub max_subdivisions: usize,
    pub truncation: TruncationPolicy,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
            truncation: TruncationPolicy::default(),
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureConfig {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(what.to_string()));
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return bad("abs_tol must be > 0");
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return bad("rel_tol must be > 0");
        }
        if self.max_subdivisions < 1 {
            return bad("max_subdivisions must be >= 1");
        }
        let t = &self.truncation;
        if !(t.core_half_width > 0.0 && t.core_half_width.is_finite()) {
            return bad("core_half_width must be > 0");
        }
        if t.max_tail_cells < 1 || t.min_tail_cells < 3 || t.min_tail_cells > t.max_tail_cells {
            return bad("need 3 <= min_tail_cells <= max_tail_cells");
        }
        Ok(())
    }
}

/// Strictly increasing map from the integration variable to the phase
/// coordinate.
pub trait PhaseMap: Sync {
    fn forward(&self, x: f64) -> f64;
    fn inverse(&self, u: f64) -> Result<f64>;
}

/// `g(x) = x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPhase;

impl PhaseMap for IdentityPhase {
    fn forward(&self, x: f64) -> f64 {
        x
    }

    fn inverse(&self, u: f64) -> Result<f64> {
        Ok(u)
    }
}

/// A transform problem `∫_{g⁻¹(lo)}^{g⁻¹(hi)} p(x) e^{-i t g(x)} dx`.
///
/// `center`, `scale`, `tail` and `kinks` describe the pushforward of `p`
/// to the phase coordinate.
pub struct Transform<'a> {
    pub density: &'a (dyn Fn(f64) -> f64 + Sync),
    pub phase: &'a dyn PhaseMap,
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    pub scale: f64,
    pub tail: TailDecay,
    pub kinks: Vec<f64>,
}

/// Phase times below this (relative to the density scale) are treated as
/// non-oscillatory when laying out tail cells.
const STATIC_PHASE: f64 = 1e-14;
const MIN_CORE_CELLS: usize = 8;
const MAX_CORE_CELLS: usize = 1_000_000;

fn conj_error(e: Error) -> Error {
    match e {
        Error::Quadrature(mut f) => {
            f.estimate = f.estimate.conj();
            Error::Quadrature(f)
        }
        other => other,
    }
}

impl Transform<'_> {
    fn integrand(&self, t: f64) -> impl Fn(f64) -> Complex64 + '_ {
        move |x: f64| {
            let w = (self.density)(x);
            if w == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                let phase = -t * self.phase.forward(x);
                Complex64::new(w * phase.cos(), w * phase.sin())
            }
        }
    }

    /// Evaluate the transform at time `t` with error control.
    pub fn evaluate(&self, t: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
        cfg.validate()?;
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "time must be finite (got {t})"
            )));
        }
        if t < 0.0 {
            return self
                .evaluate(-t, cfg)
                .map(Estimate::conj)
                .map_err(conj_error);
        }
        if !(self.lo < self.hi) {
            return Ok(Estimate::ZERO);
        }

        let oscillating = t * self.scale > STATIC_PHASE;
        let half = cfg.truncation.core_half_width * self.scale;
        let mut core_lo = (self.center - half).clamp(self.lo, self.hi);
        let mut core_hi = (self.center + half).clamp(self.lo, self.hi);
        let mut bound = 0.0;
        let mut heavy_left = false;
        let mut heavy_right = false;

        match self.tail {
            TailDecay::Compact => {
                if !(self.lo.is_finite() && self.hi.is_finite()) {
                    return Err(Error::InvalidDensity(
                        "compact tail on an unbounded domain".into(),
                    ));
                }
                core_lo = self.lo;
                core_hi = self.hi;
            }
            TailDecay::Exponential { rate } => {
                let cut = 0.1 * cfg.abs_tol;
                if self.hi.is_infinite() {
                    core_hi = self.walk_out(core_hi, 1.0, rate, cut)?;
                    bound += self.mass_bound(core_hi, rate)?;
                }
                if self.lo.is_infinite() {
                    core_lo = self.walk_out(core_lo, -1.0, rate, cut)?;
                    bound += self.mass_bound(core_lo, rate)?;
                }
            }
            TailDecay::Heavy => {
                heavy_right = self.hi.is_infinite();
                heavy_left = self.lo.is_infinite();
            }
        }
        // A finite endpoint that is close to the core is absorbed into it.
        if self.hi.is_finite() && !matches!(self.tail, TailDecay::Compact) {
            core_hi = self.hi.max(core_lo);
        }
        if self.lo.is_finite() && !matches!(self.tail, TailDecay::Compact) {
            core_lo = self.lo.min(core_hi);
        }

        let f = self.integrand(t);
        let mut total = Estimate::ZERO;

        if core_hi > core_lo {
            let width = core_hi - core_lo;
            let n_osc = if oscillating {
                (width * t / PI).ceil()
            } else {
                0.0
            };
            let n = (n_osc.min(MAX_CORE_CELLS as f64) as usize).max(MIN_CORE_CELLS);
            let mut us: Vec<f64> = (0..=n)
                .map(|k| core_lo + width * k as f64 / n as f64)
                .collect();
            us[n] = core_hi;
            us.extend(
                self.kinks
                    .iter()
                    .copied()
                    .filter(|k| *k > core_lo && *k < core_hi),
            );
            us.sort_by(f64::total_cmp);
            us.dedup();
            let xs = us
                .iter()
                .map(|&u| self.phase.inverse(u))
                .collect::<Result<Vec<f64>>>()?;
            let tol = Tolerance::new(0.25 * cfg.abs_tol, 0.25 * cfg.rel_tol);
            let core = quad::integrate(&f, &xs, tol, cfg.max_subdivisions)?;
            total = total.add(core);
        }

        if heavy_right {
            total = total.add(self.tail_sum(&f, t, core_hi, 1.0, oscillating, cfg)?);
        }
        if heavy_left {
            total = total.add(self.tail_sum(&f, t, core_lo, -1.0, oscillating, cfg)?);
        }
        total.error += bound;

        let target = cfg.abs_tol.max(cfg.rel_tol * total.value.norm());
        if total.error > target {
            return Err(Error::Quadrature(QuadFailure {
                estimate: total.value,
                error: total.error,
                reason: FailureReason::SubdivisionLimit,
            }));
        }
        Ok(total)
    }

    fn walk_out(&self, start: f64, dir: f64, rate: f64, cut: f64) -> Result<f64> {
        const MAX_STEPS: usize = 100_000;
        let mut u = start;
        for _ in 0..MAX_STEPS {
            if self.mass_bound(u, rate)? < cut {
                return Ok(u);
            }
            u += dir * self.scale;
        }
        Err(Error::InvalidDensity(format!(
            "density declared exponential-tailed but not negligible at u = {u}"
        )))
    }

    fn mass_bound(&self, u: f64, rate: f64) -> Result<f64> {
        Ok((self.density)(self.phase.inverse(u)?) / rate)
    }

    fn tail_sum<F>(
        &self,
        f: &F,
        t: f64,
        start: f64,
        dir: f64,
        oscillating: bool,
        cfg: &QuadratureConfig,
    ) -> Result<Estimate>
    where
        F: Fn(f64) -> Complex64,
    {
        let policy = cfg.truncation;
        let tail_tol = 0.25 * cfg.abs_tol;
        let cell_tol = Tolerance::new(tail_tol / (2.0 * policy.max_tail_cells as f64), 1e-13);

        let boundary = |k: usize| -> f64 {
            if oscillating {
                let m = (t * self.scale / (2.0 * PI)).floor();
                let width = (2.0 * m + 1.0) * PI / t;
                start + dir * width * k as f64
            } else {
                let d = (start - self.center).abs().max(self.scale);
                start + dir * d * ((2f64).powi(k as i32) - 1.0)
            }
        };

        let mut x_prev = self.phase.inverse(start)?;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut cell_err = 0.0;
        let mut sums_re = Vec::with_capacity(policy.max_tail_cells);
        let mut sums_im = Vec::with_capacity(policy.max_tail_cells);
        let mut settled = 0;
        let mut best = (sum, f64::INFINITY);

        for k in 1..=policy.max_tail_cells {
            let u_next = boundary(k);
            if !u_next.is_finite() {
                break;
            }
            let x_next = self.phase.inverse(u_next)?;
            let (a, b) = if dir > 0.0 {
                (x_prev, x_next)
            } else {
                (x_next, x_prev)
            };
            let cell = match quad::integrate(f, &[a, b], cell_tol, cfg.max_subdivisions) {
                Ok(c) => c,
                Err(mut failure) => {
                    failure.estimate += sum;
                    failure.error += cell_err;
                    return Err(Error::Quadrature(failure));
                }
            };
            sum += cell.value;
            cell_err += cell.error;
            sums_re.push(sum.re);
            sums_im.push(sum.im);
            x_prev = x_next;

            if k >= policy.min_tail_cells {
                let (re, err_re) = quad::wynn_epsilon(&sums_re);
                let (im, err_im) = quad::wynn_epsilon(&sums_im);
                let err = err_re.hypot(err_im) + cell_err;
                if err < best.1 {
                    best = (Complex64::new(re, im), err);
                }
                if err <= tail_tol {
                    settled += 1;
                    if settled >= 2 {
                        return Ok(Estimate {
                            value: Complex64::new(re, im),
                            error: err,
                        });
                    }
                } else {
                    settled = 0;
                }
            }
        }
        Err(Error::Quadrature(QuadFailure {
            estimate: best.0,
            error: best.1,
            reason: FailureReason::SeriesDivergence,
        }))
    }
}

fn density_transform(
    d: &SpectralDensity,
    lo: f64,
    hi: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let s = d.support();
    let density = |e: f64| d.evaluate(e);
    let tail = match d.tail() {
        // A half-line restriction of a compact density stays compact.
        TailDecay::Compact => TailDecay::Compact,
        other => other,
    };
    Transform {
        density: &density,
        phase: &IdentityPhase,
        lo: lo.max(s.lo),
        hi: hi.min(s.hi),
        center: d.center(),
        scale: d.scale(),
        tail,
        kinks: d.kinks(),
    }
    .evaluate(t, cfg)
}

/// `∫ e^{-iEt} p(E) dE` over the whole support.
pub fn fourier_amplitude(d: &SpectralDensity, t: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    fourier_estimate(d, t, cfg).map(|e| e.value)
}

/// [`fourier_amplitude`] together with its error estimate.
pub fn fourier_estimate(d: &SpectralDensity, t: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    density_transform(d, f64::NEG_INFINITY, f64::INFINITY, t, cfg)
}

/// `∫_{side} e^{-iEt} p(E) dE`, the transform restricted to a half-line.
pub fn halfline_transform(
    d: &SpectralDensity,
    side: Side,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let (lo, hi) = match side {
        Side::Negative => (f64::NEG_INFINITY, 0.0),
        Side::Positive => (0.0, f64::INFINITY),
    };
    density_transform(d, lo, hi, t, cfg).map(|e| e.value)
}

/// `⟨φ| e^{-i t q_±} φ⟩` for `|φ|² = p`.
///
/// `q₊` multiplies by `max(x, 0)`: the negative half-line keeps phase 1 and
/// the positive half-line rotates as `e^{-ixt}`. `q₋` multiplies by
/// `max(-x, 0)`: the positive half-line is frozen and the negative one
/// rotates as `e^{+ixt}`.
pub fn halfline_amplitude(
    d: &SpectralDensity,
    ramp_side: Side,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let frozen = spectral::half_line_mass(d, ramp_side.opposite(), cfg)?;
    let active = match ramp_side {
        Side::Positive => halfline_transform(d, Side::Positive, t, cfg)?,
        Side::Negative => halfline_transform(d, Side::Negative, -t, cfg)?,
    };
    Ok(Complex64::new(frozen, 0.0) + active)
}

/// Survival amplitude `⟨χ⊗φ| U(t) χ⊗φ⟩` with spin populations
/// `(w0, w1) = (|⟨0|χ⟩|², |⟨1|χ⟩|²)`.
pub fn global_survival(
    weights: (f64, f64),
    d: &SpectralDensity,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let (w0, w1) = weights;
    if !(w0 >= 0.0 && w1 >= 0.0) || (w0 + w1 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "spin weights must be non-negative and sum to 1 (got {w0}, {w1})"
        )));
    }
    let mut a = Complex64::new(0.0, 0.0);
    if w0 > 0.0 {
        a += halfline_amplitude(d, Side::Positive, t, cfg)? * w0;
    }
    if w1 > 0.0 {
        a += halfline_amplitude(d, Side::Negative, t, cfg)? * w1;
    }
    Ok(a)
}

/// Where a time series came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub source: String,
    pub operation: String,
    pub config: QuadratureConfig,
}

/// Complex samples on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTimeSeries {
    times: Vec<f64>,
    values: Vec<Complex64>,
    pub meta: SeriesMeta,
}

pub(crate) fn check_increasing(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite time {t}")));
    }
    if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(format!(
            "times must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

impl ComplexTimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>, meta: SeriesMeta) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        check_increasing(&times)?;
        Ok(ComplexTimeSeries {
            times,
            values,
            meta,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// Evaluate `f` at every time, in parallel. The first failing time (in
    /// grid order) is reported.
    pub fn tabulate<F>(times: &[f64], meta: SeriesMeta, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64> + Sync,
    {
        match Self::tabulate_prefix(times, meta, f)? {
            (series, None) => Ok(series),
            (_, Some(e)) => Err(e),
        }
    }

    /// Like [`tabulate`](Self::tabulate), but keeps the values computed
    /// before the first failing time alongside the failure.
    pub fn tabulate_prefix<F>(
        times: &[f64],
        meta: SeriesMeta,
        f: F,
    ) -> Result<(Self, Option<Error>)>
    where
        F: Fn(f64) -> Result<Complex64> + Sync,
    {
        check_increasing(times)?;
        let results: Vec<Result<Complex64>> = times
            .par_iter()
            .map(|&t| f(t).map_err(|e| e.at_time(t)))
            .collect();
        let mut values = Vec::with_capacity(times.len());
        let mut failure = None;
        for r in results {
            match r {
                Ok(v) => values.push(v),
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        let done = values.len();
        Ok((Self::new(times[..done].to_vec(), values, meta)?, failure))
    }
}

/// [`fourier_amplitude`] at each of `times`.
pub fn amplitude_series(
    d: &SpectralDensity,
    times: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ComplexTimeSeries> {
    let meta = SeriesMeta {
        source: d.label().to_string(),
        operation: "fourier_amplitude".into(),
        config: *cfg,
    };
    ComplexTimeSeries::tabulate(times, meta, |t| fourier_amplitude(d, t, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{lorentzian_density, DephasingParams, Support};
    use approx::assert_abs_diff_eq;

    fn lor(gamma: f64, omega0: f64) -> SpectralDensity {
        lorentzian_density(DephasingParams::new(gamma, omega0).unwrap())
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn lorentzian_transform_is_exponential() {
        let a = fourier_amplitude(&lor(1.0, 0.0), 2.0, &cfg()).unwrap();
        assert!(close(a, Complex64::new((-1.0f64).exp(), 0.0), 1e-9), "{a}");
        assert_abs_diff_eq!(a.re, 0.367_879_4, epsilon = 1e-7);
    }

    #[test]
    fn transform_at_zero_is_mass() {
        for d in [
            lor(1.0, 0.0),
            lor(0.3, -2.0),
            SpectralDensity::exponential(2.0, 1.0).unwrap(),
        ] {
            let a = fourier_amplitude(&d, 0.0, &cfg()).unwrap();
            assert!(close(a, Complex64::new(1.0, 0.0), 1e-9), "{d:?}: {a}");
        }
    }

    #[test]
    fn exponential_density_transform() {
        // ∫₀^∞ e^{-iEt} e^{-E} dE = 1/(1+it).
        let d = SpectralDensity::exponential(1.0, 0.0).unwrap();
        let a = fourier_amplitude(&d, 1.0, &cfg()).unwrap();
        assert!(close(a, Complex64::new(0.5, -0.5), 1e-9), "{a}");
    }

    #[test]
    fn series_matches_pointwise() {
        let d = lor(1.0, 0.0);
        let s = amplitude_series(&d, &[0.0, 1.0, 2.0], &cfg()).unwrap();
        let expected = [1.0, (-0.5f64).exp(), (-1.0f64).exp()];
        for ((_, v), e) in s.iter().zip(expected) {
            assert!(close(v, Complex64::new(e, 0.0), 1e-9));
        }
        let d = lor(1.0, 3.0);
        let s = amplitude_series(&d, &[1.0], &cfg()).unwrap();
        let e = Complex64::new(-0.5, -3.0).exp();
        assert!(close(s.values()[0], e, 1e-9));
    }

    #[test]
    fn empty_series() {
        let s = amplitude_series(&lor(1.0, 0.0), &[], &cfg()).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn series_rejects_unsorted_times() {
        assert!(amplitude_series(&lor(1.0, 0.0), &[1.0, 1.0], &cfg()).is_err());
        assert!(amplitude_series(&lor(1.0, 0.0), &[2.0, 1.0], &cfg()).is_err());
    }

    #[test]
    fn halfline_amplitude_limits() {
        let d = lor(1.0, 0.0);
        let a0 = halfline_amplitude(&d, Side::Positive, 0.0, &cfg()).unwrap();
        assert!(close(a0, Complex64::new(1.0, 0.0), 1e-9));
        let a = halfline_amplitude(&d, Side::Positive, 200.0, &cfg()).unwrap();
        assert!((a.norm() - 0.5).abs() < 0.01);
    }

    #[test]
    fn halfline_transform_matches_high_precision_values() {
        // Frozen from 30-digit oscillatory quadrature.
        let d = lor(1.0, 0.0);
        let cases = [
            (
                1.0,
                Complex64::new(0.303_265_329_856_316_71, -0.190_732_705_219_694_66),
            ),
            (
                5.0,
                Complex64::new(0.041_042_499_311_949_398, -0.140_720_965_080_869_48),
            ),
            (200.0, Complex64::new(0.0, -0.003_183_736_247_858_783_6)),
        ];
        for (t, expected) in cases {
            let v = halfline_transform(&d, Side::Positive, t, &cfg()).unwrap();
            assert!(close(v, expected, 2e-9), "t={t}: {v} vs {expected}");
        }
        let d = lor(1.0, 1.0);
        let pos = halfline_transform(&d, Side::Positive, 3.0, &cfg()).unwrap();
        let neg = halfline_transform(&d, Side::Negative, 3.0, &cfg()).unwrap();
        assert!(close(
            pos,
            Complex64::new(-0.235_894_383_293_272_48, -0.064_339_992_595_595_344),
            2e-9
        ));
        assert!(close(
            neg,
            Complex64::new(0.014_997_198_981_071_207, 0.032_851_862_597_049_463),
            2e-9
        ));
    }

    #[test]
    fn global_survival_weights() {
        let d = lor(1.0, 0.0);
        let a = global_survival((1.0, 0.0), &d, 0.0, &cfg()).unwrap();
        assert!(close(a, Complex64::new(1.0, 0.0), 1e-9));
        let a = global_survival((0.5, 0.5), &d, 200.0, &cfg()).unwrap();
        assert!((a.norm() - 0.5).abs() < 0.01);
        assert!(global_survival((0.7, 0.7), &d, 1.0, &cfg()).is_err());
        assert!(global_survival((-0.5, 1.5), &d, 1.0, &cfg()).is_err());
    }

    #[test]
    fn compact_density_transform() {
        // Uniform on [-1, 1]: sin(t)/t.
        let d = SpectralDensity::table(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        for t in [0.0, 0.5, 3.0, 40.0] {
            let a = fourier_amplitude(&d, t, &cfg()).unwrap();
            let expected = if t == 0.0 { 1.0 } else { t.sin() / t };
            assert!(close(a, Complex64::new(expected, 0.0), 1e-9), "t={t}: {a}");
        }
    }

    #[test]
    fn custom_heavy_density_uses_tail_cells() {
        // Lorentzian supplied as an opaque closure.
        let p = DephasingParams::new(0.8, 0.25).unwrap();
        let d = SpectralDensity::custom(
            "opaque",
            move |e| p.lorentzian(e),
            Support::REAL_LINE,
            TailDecay::Heavy,
            0.0,
            1.0,
        )
        .unwrap();
        for t in [0.0, 0.01, 0.7, 13.0] {
            let a = fourier_amplitude(&d, t, &cfg()).unwrap();
            assert!(close(a, p.exponential_amplitude(t), 1e-9), "t={t}: {a}");
        }
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut c = cfg();
        c.abs_tol = 0.0;
        assert!(matches!(
            fourier_amplitude(&lor(1.0, 0.0), 1.0, &c),
            Err(Error::InvalidConfig(_))
        ));
        let mut c = cfg();
        c.max_subdivisions = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn tiny_budget_reports_failure_with_estimate() {
        let mut c = cfg();
        c.abs_tol = 1e-15;
        c.rel_tol = 1e-15;
        c.max_subdivisions = 1;
        c.truncation.max_tail_cells = 6;
        let err = fourier_amplitude(&lor(1.0, 0.0), 3.0, &c).unwrap_err();
        let est = err
            .best_estimate()
            .expect("quadrature failure carries an estimate");
        assert!((est.re - (-1.5f64).exp()).abs() < 1e-2, "{est}");
    }

    #[test]
    fn negative_times_are_conjugates() {
        let d = lor(1.0, 0.7);
        let a = fourier_amplitude(&d, 1.3, &cfg()).unwrap();
        let b = fourier_amplitude(&d, -1.3, &cfg()).unwrap();
        assert_eq!(a, b.conj());
    }

    #[test]
    fn prefix_keeps_leading_values() {
        let meta = SeriesMeta {
            source: "test".into(),
            operation: "prefix".into(),
            config: cfg(),
        };
        let (s, err) = ComplexTimeSeries::tabulate_prefix(&[0.0, 1.0, 2.0, 3.0], meta, |t| {
            if t < 1.5 {
                Ok(Complex64::new(t, 0.0))
            } else {
                Err(Error::InvalidArgument("late".into()))
            }
        })
        .unwrap();
        assert_eq!(s.times(), &[0.0, 1.0]);
        assert!(matches!(err, Some(Error::InvalidArgument(_))));
    }
}
