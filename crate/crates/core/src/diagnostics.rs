// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! Decay-law diagnostics: truncated Paley–Wiener integrals
//! `∫_{-T}^{T} -ln|a(t)| / (1+t²) dt`, their growth with `T`, and
//! exponential fits of `|a(t)|`.
//!
//! Integrals are evaluated in `θ = atan t`, where the weight `dt/(1+t²)`
//! becomes `dθ` and `T = ∞` maps to the finite endpoint `π/2`. Only
//! `[0, T]` is integrated; conjugate symmetry gives `|a(-t)| = |a(t)|`.

use std::cell::RefCell;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::oscint::{self, ComplexTimeSeries, QuadratureConfig, SeriesMeta};
use crate::quad::{self, Tolerance};
use crate::spectral::{self, Side, SpectralDensity};

/// Something with a modulus `|a(t)|` for `t ≥ 0`.
pub trait Amplitude: Sync {
    fn modulus(&self, t: f64) -> Result<f64>;

    /// Times where `|a|` is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Amplitude given by a formula.
pub struct ClosedForm<F>(pub F);

impl<F> Amplitude for ClosedForm<F>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    fn modulus(&self, t: f64) -> Result<f64> {
        Ok((self.0)(t).norm())
    }
}

type Tail = Box<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Amplitude known on a sample grid starting at `t = 0`, with `|a|`
/// interpolated linearly between samples and an optional model beyond the
/// last one.
pub struct Sampled {
    times: Vec<f64>,
    moduli: Vec<f64>,
    tail: Option<Tail>,
}

impl Sampled {
    pub fn new(series: &ComplexTimeSeries) -> Result<Self> {
        let (times, moduli): (Vec<f64>, Vec<f64>) = series
            .iter()
            .filter(|(t, _)| *t >= 0.0)
            .map(|(t, v)| (t, v.norm()))
            .unzip();
        if times.len() < 2 || times[0] != 0.0 {
            return Err(Error::InsufficientData(
                "sampled amplitude needs at least two samples starting at t = 0".into(),
            ));
        }
        Ok(Sampled {
            times,
            moduli,
            tail: None,
        })
    }

    /// Use `tail` for `t` beyond the last sample.
    pub fn with_tail<F>(mut self, tail: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        self.tail = Some(Box::new(tail));
        self
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn has_tail(&self) -> bool {
        self.tail.is_some()
    }
}

impl Amplitude for Sampled {
    fn modulus(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        if t > self.last_time() {
            return match &self.tail {
                Some(f) => Ok(f(t).norm()),
                None => Err(Error::InsufficientData(format!(
                    "amplitude sampled up to t = {} but needed at t = {t}",
                    self.last_time()
                ))),
            };
        }
        let k = self.times.partition_point(|&s| s <= t);
        if k == self.times.len() {
            return Ok(self.moduli[k - 1]);
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (m0, m1) = (self.moduli[k - 1], self.moduli[k]);
        Ok(m0 + (m1 - m0) * (t - t0) / (t1 - t0))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.times.clone()
    }
}

/// `∫_{-T}^{T} -ln|a(t)| / (1+t²) dt`; `T` may be `+∞`.
pub fn paley_wiener_integral(a: &dyn Amplitude, t_max: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if !(t_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "T must be > 0 (got {t_max})"
        )));
    }
    let theta_max = if t_max.is_infinite() {
        FRAC_PI_2
    } else {
        t_max.atan()
    };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |theta: f64| -> f64 {
        let t = theta.tan();
        match a.modulus(t) {
            Ok(m) if m > 0.0 => -m.ln(),
            Ok(_) => {
                failure.borrow_mut().get_or_insert(Error::LogSingularity(t));
                0.0
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let mut points = vec![0.0];
    points.extend(
        a.breakpoints()
            .into_iter()
            .map(f64::atan)
            .filter(|&th| th > 0.0 && th < theta_max),
    );
    points.push(theta_max);
    let result = quad::integrate_real(
        &integrand,
        &points,
        Tolerance::new(0.5 * cfg.abs_tol, cfg.rel_tol),
        cfg.max_subdivisions,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let (value, _) = result?;
    Ok(2.0 * value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrowthClass {
    Bounded,
    LogarithmicDivergent,
    Undetermined,
}

impl GrowthClass {
    pub fn name(self) -> &'static str {
        match self {
            GrowthClass::Bounded => "bounded",
            GrowthClass::LogarithmicDivergent => "logarithmic-divergent",
            GrowthClass::Undetermined => "undetermined",
        }
    }
}

/// Threshold on the relative log-fit residual and on the relative increase
/// of `pw` over the last decade.
pub const GROWTH_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthAnalysis {
    pub class: GrowthClass,
    /// `(T, pw(T))` for the requested `T`s.
    pub pw_values: Vec<(f64, f64)>,
    /// Fit `pw(T) ≈ c0 + c1 ln(1+T²)`.
    pub c0: f64,
    pub c1: f64,
    /// RMS fit residual divided by `max |pw|`.
    pub relative_residual: f64,
    /// `pw(T_max) - pw(T_max/10)`.
    pub last_decade_increment: f64,
}

/// Classify the growth of `pw(T)`.
///
/// `pw` is *bounded* when it grows by at most `10⁻³ pw(T_max)` between
/// `T_max/10` and `T_max`, and *logarithmic-divergent* when it follows
/// `c0 + c1 ln(1+T²)` with `c1 > 0` to a relative residual below `10⁻³`.
/// Needs at least three `T`s spanning two decades.
pub fn classify_growth(
    a: &dyn Amplitude,
    ts: &[f64],
    cfg: &QuadratureConfig,
) -> Result<GrowthAnalysis> {
    if ts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 values of T (got {})",
            ts.len()
        )));
    }
    oscint::check_increasing(ts)?;
    if !(ts[0] > 0.0) || ts[ts.len() - 1] / ts[0] < 100.0 {
        return Err(Error::InsufficientData(
            "values of T must be positive and span at least two decades".into(),
        ));
    }
    let t_max = ts[ts.len() - 1];
    let mut probe: Vec<f64> = ts.to_vec();
    probe.push(t_max / 10.0);
    let pw: Vec<f64> = probe
        .par_iter()
        .map(|&t| paley_wiener_integral(a, t, cfg))
        .collect::<Result<Vec<f64>>>()?;
    let pw_values: Vec<(f64, f64)> = ts.iter().copied().zip(pw.iter().copied()).collect();
    let pw_max = pw[ts.len() - 1];
    let last_decade_increment = pw_max - pw[ts.len()];

    let xs: Vec<f64> = ts.iter().map(|t| t.mul_add(*t, 1.0).ln()).collect();
    let ys = &pw[..ts.len()];
    let (c1, c0) = least_squares(&xs, ys);
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - c0 - c1 * x).powi(2))
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();
    let scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let relative_residual = if scale > 0.0 { rms / scale } else { 0.0 };

    let class = if last_decade_increment <= GROWTH_THRESHOLD * pw_max.abs() {
        GrowthClass::Bounded
    } else if c1 > 0.0 && relative_residual < GROWTH_THRESHOLD {
        GrowthClass::LogarithmicDivergent
    } else {
        GrowthClass::Undetermined
    };
    Ok(GrowthAnalysis {
        class,
        pw_values,
        c0,
        c1,
        relative_residual,
        last_decade_increment,
    })
}

/// Slope and intercept of the least-squares line through `(x, y)`.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFit {
    pub rate: f64,
    pub amplitude: f64,
    /// RMS of `ln|a| - ln(amplitude) + rate·t` over the window.
    pub residual: f64,
    pub samples: usize,
}

/// Moduli at or below this are left out of the fit.
pub const FIT_FLOOR: f64 = 1e-14;

/// Least-squares fit of `ln|a(t)|` against `ln(amplitude) - rate·t` on the
/// samples with `t_min ≤ t ≤ t_max`.
pub fn exponential_fit(series: &ComplexTimeSeries, window: (f64, f64)) -> Result<ExpFit> {
    let (t_min, t_max) = window;
    if !(t_min < t_max) {
        return Err(Error::InvalidArgument(format!(
            "empty fit window ({t_min}, {t_max})"
        )));
    }
    let times = series.times();
    match (times.first(), times.last()) {
        (Some(&first), Some(&last)) if first <= t_min && t_max <= last => {}
        _ => {
            return Err(Error::InvalidArgument(format!(
                "fit window ({t_min}, {t_max}) is not inside the sampled range"
            )))
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = series
        .iter()
        .filter(|(t, v)| *t >= t_min && *t <= t_max && v.norm() > FIT_FLOOR)
        .map(|(t, v)| (t, v.norm().ln()))
        .unzip();
    if xs.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "{} usable samples in the fit window; need 8 with |a| > {FIT_FLOOR:e}",
            xs.len()
        )));
    }
    let (slope, intercept) = least_squares(&xs, &ys);
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();
    Ok(ExpFit {
        rate: 0.0 - slope,
        amplitude: intercept.exp(),
        residual,
        samples: xs.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub growth: GrowthAnalysis,
    pub fit: Option<ExpFit>,
    /// `|a|` at the last sample.
    pub longtime_value: f64,
}

/// Growth classification of `amplitude` plus an exponential fit of
/// `series` over `window` (omitted when the window has too few usable
/// samples).
pub fn decay_report(
    amplitude: &dyn Amplitude,
    ts: &[f64],
    series: &ComplexTimeSeries,
    window: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<DecayReport> {
    let growth = classify_growth(amplitude, ts, cfg)?;
    let fit = match exponential_fit(series, window) {
        Ok(f) => Some(f),
        Err(Error::InsufficientData(_)) => None,
        Err(e) => return Err(e),
    };
    let longtime_value = series
        .values()
        .last()
        .map(|v| v.norm())
        .ok_or_else(|| Error::InsufficientData("empty series".into()))?;
    Ok(DecayReport {
        growth,
        fit,
        longtime_value,
    })
}

/// Large-`t` form of the global survival amplitude, from the first two
/// terms of `∫₀^∞ e^{-iEt} p(E) dE ~ Σ p⁽ⁿ⁾(0)/(it)ⁿ⁺¹`.
///
/// Used beyond the range of quadrature data; it is an asymptotic model,
/// not a verified value.
pub fn survival_asymptote(
    weights: (f64, f64),
    d: &SpectralDensity,
    cfg: &QuadratureConfig,
) -> Result<impl Fn(f64) -> Complex64 + Send + Sync> {
    let (w0, w1) = weights;
    let m_neg = spectral::half_line_mass(d, Side::Negative, cfg)?;
    let m_pos = spectral::half_line_mass(d, Side::Positive, cfg)?;
    let h = 1e-5 * d.scale();
    let p0 = d.evaluate(0.0);
    let p1 = (d.evaluate(h) - d.evaluate(-h)) / (2.0 * h);
    Ok(move |t: f64| {
        let it = Complex64::new(0.0, t);
        let series = p0 / it + p1 / (it * it);
        // q₊ rotates the positive half-line with e^{-iEt}; q₋ rotates the
        // negative one with e^{+iEt}.
        let plus = m_neg + series;
        let minus = m_pos - (p0 / it.conj() + p1 / (it.conj() * it.conj()));
        plus * w0 + minus * w1
    })
}

/// Global survival amplitude sampled on `n` equispaced points of
/// `[0, t_end]`, continued by [`survival_asymptote`].
pub fn global_survival_amplitude(
    weights: (f64, f64),
    d: &SpectralDensity,
    t_end: f64,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<(ComplexTimeSeries, Sampled)> {
    if n < 2 || !(t_end > 0.0) {
        return Err(Error::InvalidArgument(
            "need n >= 2 samples on [0, t_end] with t_end > 0".into(),
        ));
    }
    let times: Vec<f64> = (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect();
    let meta = SeriesMeta {
        source: d.label().to_string(),
        operation: "global_survival".into(),
        config: *cfg,
    };
    let series = ComplexTimeSeries::tabulate(&times, meta, |t| {
        oscint::global_survival(weights, d, t, cfg)
    })?;
    let tail = survival_asymptote(weights, d, cfg)?;
    let sampled = Sampled::new(&series)?.with_tail(tail);
    Ok((series, sampled))
}
