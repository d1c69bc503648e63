// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! Energy spectral densities.
//!
//! A [`SpectralDensity`] is an absolutely continuous probability density
//! over energy together with its support, a tail classification that
//! selects the quadrature strategy, and a (centre, scale) pair describing
//! where its mass lives.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscint::QuadratureConfig;
use crate::quad::{self, Tolerance};

/// Decay rate and centre frequency of a Cauchy–Lorentz law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingParams {
    gamma: f64,
    omega0: f64,
}

impl DephasingParams {
    pub fn new(gamma: f64, omega0: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidRate(gamma));
        }
        if !omega0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "omega0 must be finite (got {omega0})"
            )));
        }
        Ok(DephasingParams { gamma, omega0 })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Half width at half maximum, `γ/2`.
    pub fn half_width(&self) -> f64 {
        0.5 * self.gamma
    }

    /// Closed-form `exp(-γ|t|/2 - iω₀t)`.
    pub fn exponential_amplitude(&self, t: f64) -> Complex64 {
        Complex64::new(-0.5 * self.gamma * t.abs(), -self.omega0 * t).exp()
    }

    /// `(γ/2π) / ((E-ω₀)² + γ²/4)`.
    pub fn lorentzian(&self, energy: f64) -> f64 {
        let d = energy - self.omega0;
        let h = self.half_width();
        (self.gamma / (2.0 * PI)) / (d * d + h * h)
    }

    /// Cauchy–Lorentz mass of `(-∞, energy]`.
    pub fn lorentzian_cdf(&self, energy: f64) -> f64 {
        0.5 + ((energy - self.omega0) / self.half_width()).atan() / PI
    }
}

/// Interval on the extended real line; endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub const REAL_LINE: Support = Support {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidDensity(format!(
                "empty or invalid support [{lo}, {hi}]"
            )));
        }
        Ok(Support { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn is_compact(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Intersection with a half-line.
    pub fn restrict(&self, side: Side) -> Option<Support> {
        let (lo, hi) = match side {
            Side::Negative => (self.lo, self.hi.min(0.0)),
            Side::Positive => (self.lo.max(0.0), self.hi),
        };
        (lo < hi).then_some(Support { lo, hi })
    }
}

/// Half of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Negative,
    Positive,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Negative => Side::Positive,
            Side::Positive => Side::Negative,
        }
    }
}

/// How fast the density falls off towards infinite support endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailDecay {
    /// Algebraic decay, integrable but slow (Cauchy–Lorentz-like).
    Heavy,
    /// Bounded by `C e^{-rate |E|}`; `p(E)/rate` bounds the tail mass.
    Exponential { rate: f64 },
    /// Support is a bounded interval.
    Compact,
}

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Profile {
    Lorentzian(DephasingParams),
    Exponential { rate: f64, onset: f64 },
    Table { knots: Vec<(f64, f64)> },
    Custom(DensityFn),
}

/// Probability density over energy with declared support and tail class.
#[derive(Clone)]
pub struct SpectralDensity {
    profile: Profile,
    support: Support,
    tail: TailDecay,
    center: f64,
    scale: f64,
    factor: f64,
    label: String,
}

impl fmt::Debug for SpectralDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralDensity")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("tail", &self.tail)
            .field("center", &self.center)
            .field("scale", &self.scale)
            .finish()
    }
}

/// The Cauchy–Lorentz density centred on `ω₀` with full width `γ`.
pub fn lorentzian_density(params: DephasingParams) -> SpectralDensity {
    SpectralDensity {
        profile: Profile::Lorentzian(params),
        support: Support::REAL_LINE,
        tail: TailDecay::Heavy,
        center: params.omega0(),
        scale: params.half_width(),
        factor: 1.0,
        label: format!(
            "lorentzian(gamma={}, omega0={})",
            params.gamma(),
            params.omega0()
        ),
    }
}

impl SpectralDensity {
    /// `rate · exp(-rate (E - onset))` on `[onset, ∞)`.
    pub fn exponential(rate: f64, onset: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidDensity(format!(
                "exponential rate must be > 0 (got {rate})"
            )));
        }
        if !onset.is_finite() {
            return Err(Error::InvalidDensity(
                "exponential onset must be finite".into(),
            ));
        }
        Ok(SpectralDensity {
            profile: Profile::Exponential { rate, onset },
            support: Support::new(onset, f64::INFINITY)?,
            tail: TailDecay::Exponential { rate },
            center: onset + 1.0 / rate,
            scale: 1.0 / rate,
            factor: 1.0,
            label: format!("exponential(rate={rate}, onset={onset})"),
        })
    }

    /// Piecewise-linear density through `(E, p)` knots, supported on the
    /// knot range. The table is rescaled to unit mass (the trapezoid sum
    /// is the exact integral of the interpolant).
    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidDensity(
                "a table needs at least two knots".into(),
            ));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidDensity(format!(
                    "knot energies must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(e, p)) = knots
            .iter()
            .find(|(e, p)| !e.is_finite() || !p.is_finite() || *p < 0.0)
        {
            return Err(Error::InvalidDensity(format!("invalid knot ({e}, {p})")));
        }
        let mass: f64 = knots
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
            .sum();
        if !(mass > 0.0) {
            return Err(Error::InvalidDensity("table has zero mass".into()));
        }
        let knots: Vec<(f64, f64)> = knots.into_iter().map(|(e, p)| (e, p / mass)).collect();
        let lo = knots[0].0;
        let hi = knots[knots.len() - 1].0;
        let mean = knots
            .windows(2)
            .map(|w| {
                let (e0, p0) = w[0];
                let (e1, p1) = w[1];
                (e1 - e0) * (p0 * (2.0 * e0 + e1) + p1 * (e0 + 2.0 * e1)) / 6.0
            })
            .sum::<f64>();
        Ok(SpectralDensity {
            profile: Profile::Table { knots },
            support: Support::new(lo, hi)?,
            tail: TailDecay::Compact,
            center: mean,
            scale: 0.5 * (hi - lo),
            factor: 1.0,
            label: format!("table(support=[{lo}, {hi}])"),
        })
    }

    /// Arbitrary density given by a closure. `center`/`scale` locate the
    /// bulk of the mass and guide the quadrature partition.
    pub fn custom<F>(
        label: impl Into<String>,
        density: F,
        support: Support,
        tail: TailDecay,
        center: f64,
        scale: f64,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(scale.is_finite() && scale > 0.0) || !center.is_finite() {
            return Err(Error::InvalidDensity(format!(
                "invalid centre/scale ({center}, {scale})"
            )));
        }
        match tail {
            TailDecay::Compact if !support.is_compact() => {
                return Err(Error::InvalidDensity(
                    "compact tail declared on an unbounded support".into(),
                ))
            }
            TailDecay::Exponential { rate } if !(rate > 0.0 && rate.is_finite()) => {
                return Err(Error::InvalidDensity(format!(
                    "exponential tail rate must be > 0 (got {rate})"
                )))
            }
            _ => {}
        }
        Ok(SpectralDensity {
            profile: Profile::Custom(Arc::new(density)),
            support,
            tail,
            center,
            scale,
            factor: 1.0,
            label: label.into(),
        })
    }

    /// The same density multiplied by `factor` (no longer normalized unless
    /// `factor == 1`).
    pub fn scaled(&self, factor: f64) -> Self {
        let mut d = self.clone();
        d.factor *= factor;
        d.label = format!("{factor}*{}", self.label);
        d
    }

    pub fn evaluate(&self, energy: f64) -> f64 {
        if !self.support.contains(energy) {
            return 0.0;
        }
        let v = match &self.profile {
            Profile::Lorentzian(p) => p.lorentzian(energy),
            Profile::Exponential { rate, onset } => rate * (-rate * (energy - onset)).exp(),
            Profile::Table { knots } => interpolate(knots, energy),
            Profile::Custom(f) => f(energy),
        };
        self.factor * v
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn tail(&self) -> TailDecay {
        self.tail
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Interior points where the density is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.profile {
            Profile::Table { knots } => knots.iter().map(|k| k.0).collect(),
            _ => Vec::new(),
        }
    }

    /// Lorentzian parameters when this is an (unscaled) Cauchy–Lorentz law.
    pub fn lorentzian_params(&self) -> Option<DephasingParams> {
        match self.profile {
            Profile::Lorentzian(p) if self.factor == 1.0 => Some(p),
            _ => None,
        }
    }
}

fn interpolate(knots: &[(f64, f64)], x: f64) -> f64 {
    let idx = knots.partition_point(|k| k.0 <= x);
    if idx == 0 {
        return knots[0].1;
    }
    if idx >= knots.len() {
        return knots[knots.len() - 1].1;
    }
    let (e0, p0) = knots[idx - 1];
    let (e1, p1) = knots[idx];
    p0 + (p1 - p0) * (x - e0) / (e1 - e0)
}

/// Environment wave function `√p(E) e^{iα(E)}`. The phase is carried for
/// completeness; every reduced quantity depends on the density alone.
#[derive(Clone)]
pub struct InitialStateSpec {
    pub density: SpectralDensity,
    phase: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for InitialStateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialStateSpec")
            .field("density", &self.density)
            .finish_non_exhaustive()
    }
}

impl InitialStateSpec {
    /// Real, non-negative wave function (`α ≡ 0`).
    pub fn real(density: SpectralDensity) -> Self {
        InitialStateSpec {
            density,
            phase: Arc::new(|_| 0.0),
        }
    }

    pub fn with_phase<F>(density: SpectralDensity, phase: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        InitialStateSpec {
            density,
            phase: Arc::new(phase),
        }
    }

    /// `φ_C(E) = √(γ/2π) / (E - ω₀ - iγ/2)`.
    pub fn cauchy_lorentz(params: DephasingParams) -> Self {
        let (w0, h) = (params.omega0(), params.half_width());
        Self::with_phase(lorentzian_density(params), move |e| h.atan2(e - w0))
    }

    pub fn phase(&self, x: f64) -> f64 {
        (self.phase)(x)
    }

    pub fn wave_function(&self, x: f64) -> Complex64 {
        Complex64::from_polar(self.density.evaluate(x).sqrt(), self.phase(x))
    }
}

/// Mass of `d` on `[lo, hi] ∩ support`.
pub(crate) fn mass_between(
    d: &SpectralDensity,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let s = d.support();
    let (lo, hi) = (lo.max(s.lo), hi.min(s.hi));
    if !(lo < hi) {
        return Ok(0.0);
    }
    let tol = Tolerance::new(cfg.abs_tol * 0.5, cfg.rel_tol * 0.5);
    let kinks: Vec<f64> = d
        .kinks()
        .into_iter()
        .filter(|k| *k > lo && *k < hi)
        .collect();

    match d.tail() {
        TailDecay::Compact => {
            let mut bp = vec![lo];
            bp.extend(kinks);
            bp.push(hi);
            let (v, _) = quad::integrate_real(&|e| d.evaluate(e), &bp, tol, cfg.max_subdivisions)?;
            Ok(v)
        }
        TailDecay::Exponential { rate } => {
            // Cut the infinite ends where p/rate < abs_tol/10.
            let bound = 0.1 * cfg.abs_tol;
            let mut a = lo;
            let mut b = hi;
            if b.is_infinite() {
                b = exponential_cutoff(d, lo.max(d.center()), 1.0, rate, bound)?;
            }
            if a.is_infinite() {
                a = exponential_cutoff(d, hi.min(d.center()), -1.0, rate, bound)?;
            }
            let mut bp = vec![a];
            if d.center() > a && d.center() < b {
                bp.push(d.center());
            }
            bp.extend(kinks);
            bp.push(b);
            bp.sort_by(f64::total_cmp);
            let (v, _) = quad::integrate_real(&|e| d.evaluate(e), &bp, tol, cfg.max_subdivisions)?;
            Ok(v)
        }
        TailDecay::Heavy => {
            // E = c + s·tan θ maps ℝ onto (-π/2, π/2); a Lorentzian with the
            // same centre and scale becomes the constant 1/π.
            let (c, sc) = (d.center(), d.scale());
            let to_theta = |e: f64| {
                if e == f64::INFINITY {
                    FRAC_PI_2
                } else if e == f64::NEG_INFINITY {
                    -FRAC_PI_2
                } else {
                    ((e - c) / sc).atan()
                }
            };
            let integrand = |theta: f64| {
                let ct = theta.cos();
                let e = c + sc * theta.tan();
                let v = d.evaluate(e) * sc / (ct * ct);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            };
            let mut bp = vec![to_theta(lo)];
            bp.extend(kinks.iter().map(|&k| to_theta(k)));
            bp.push(to_theta(hi));
            let (v, _) = quad::integrate_real(&integrand, &bp, tol, cfg.max_subdivisions)?;
            Ok(v)
        }
    }
}

/// Walk from `start` in direction `dir` (±1) in steps of the density scale
/// until `p(E)/rate` drops below `bound`.
pub(crate) fn exponential_cutoff(
    d: &SpectralDensity,
    start: f64,
    dir: f64,
    rate: f64,
    bound: f64,
) -> Result<f64> {
    const MAX_STEPS: usize = 100_000;
    let step = dir * d.scale();
    let mut e = start;
    for _ in 0..MAX_STEPS {
        if d.evaluate(e) / rate < bound {
            return Ok(e);
        }
        e += step;
    }
    Err(Error::InvalidDensity(format!(
        "density declared exponential-tailed but still {:.3e} at E = {e}",
        d.evaluate(e)
    )))
}

/// `∫ d` over its support. A valid density returns `1 ± 1e-10`.
pub fn normalize_check(d: &SpectralDensity, cfg: &QuadratureConfig) -> Result<f64> {
    let s = d.support();
    mass_between(d, s.lo, s.hi, cfg)
}

/// `∫ d` over the requested half-line.
pub fn half_line_mass(d: &SpectralDensity, side: Side, cfg: &QuadratureConfig) -> Result<f64> {
    match side {
        Side::Negative => mass_between(d, f64::NEG_INFINITY, 0.0, cfg),
        Side::Positive => mass_between(d, 0.0, f64::INFINITY, cfg),
    }
}
