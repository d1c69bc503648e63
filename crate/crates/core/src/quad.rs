// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature for complex-valued
//! integrands, plus Wynn's epsilon algorithm for extrapolating sequences of
//! partial sums.
//!
//! The error heuristics follow QUADPACK: the raw Kronrod–Gauss difference is
//! rescaled by `(200 err / resasc)^1.5` and floored at the roundoff level
//! `50 ε resabs`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use num_complex::Complex64;

/// Kronrod abscissae on [0, 1], outermost first; the last entry is the centre.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod abscissae (XGK[1], XGK[3], ...).
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Requested accuracy: the estimate is accepted once
/// `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    pub fn target(&self, value: Complex64) -> f64 {
        self.abs.max(self.rel * value.norm())
    }
}

/// A converged integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate {
        value: Complex64::new(0.0, 0.0),
        error: 0.0,
    };

    pub fn add(self, other: Estimate) -> Estimate {
        Estimate {
            value: self.value + other.value,
            error: self.error + other.error,
        }
    }

    pub fn conj(self) -> Estimate {
        Estimate {
            value: self.value.conj(),
            error: self.error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    /// The subdivision budget was exhausted.
    SubdivisionLimit,
    /// Intervals shrank to the floating-point resolution.
    Roundoff,
    /// A series extrapolation did not settle within the cell budget.
    SeriesDivergence,
    /// The integrand produced a non-finite value.
    NonFinite,
}

/// Non-convergence report. Carries the best available estimate and its
/// error bound so that callers can keep partial results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadFailure {
    pub estimate: Complex64,
    pub error: f64,
    pub reason: FailureReason,
}

impl fmt::Display for QuadFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} (best estimate {:.17e}{:+.17e}i, error bound {:.3e})",
            self.reason, self.estimate.re, self.estimate.im, self.error
        )
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// Single 21-point Kronrod rule on [a, b]. Returns (value, error).
pub fn gk21<F>(f: &F, a: f64, b: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];

    let f_center = f(center);
    let mut res_gauss = Complex64::new(0.0, 0.0);
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = WGK[10] * f_center.norm();

    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let v1 = f(center - dx);
        let v2 = f(center + dx);
        fv1[jtw] = v1;
        fv2[jtw] = v2;
        res_gauss += (v1 + v2) * WG[j];
        res_kronrod += (v1 + v2) * WGK[jtw];
        res_abs += WGK[jtw] * (v1.norm() + v2.norm());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let v1 = f(center - dx);
        let v2 = f(center + dx);
        fv1[jtwm1] = v1;
        fv2[jtwm1] = v2;
        res_kronrod += (v1 + v2) * WGK[jtwm1];
        res_abs += WGK[jtwm1] * (v1.norm() + v2.norm());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).norm();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let err = (res_kronrod - res_gauss).norm() * abs_half;
    let value = res_kronrod * half;
    let error = rescale_error(err, res_abs * abs_half, res_asc * abs_half);
    (value, error)
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // Ties broken by position so the refinement order is reproducible.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn too_small(a: f64, b: f64) -> bool {
    let mid = 0.5 * (a + b);
    mid <= a || mid >= b || (b - a) <= 4.0 * f64::EPSILON * a.abs().max(b.abs())
}

/// Integrate `f` over the union of the consecutive intervals defined by
/// `breakpoints` (at least two, non-decreasing, all finite).
///
/// Every initial interval is evaluated once; afterwards the interval with
/// the largest error is bisected until the summed error meets `tol` or
/// `max_subdivisions` bisections have been spent.
pub fn integrate<F>(
    f: &F,
    breakpoints: &[f64],
    tol: Tolerance,
    max_subdivisions: usize,
) -> Result<Estimate, QuadFailure>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let mut heap = BinaryHeap::with_capacity(breakpoints.len() + max_subdivisions + 1);
    let mut finished: Vec<Segment> = Vec::new();

    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (value, error) = gk21(f, a, b);
        heap.push(Segment { a, b, value, error });
    }

    let totals = |heap: &BinaryHeap<Segment>, finished: &[Segment]| {
        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        for s in heap.iter().chain(finished.iter()) {
            value += s.value;
            error += s.error;
        }
        (value, error)
    };

    let (mut value, mut error) = totals(&heap, &finished);
    let mut roundoff = false;
    let mut splits = 0usize;

    loop {
        if !value.re.is_finite() || !value.im.is_finite() || !error.is_finite() {
            return Err(QuadFailure {
                estimate: value,
                error,
                reason: FailureReason::NonFinite,
            });
        }
        if error <= tol.target(value) {
            break;
        }
        let Some(worst) = heap.pop() else {
            roundoff = true;
            break;
        };
        if splits >= max_subdivisions {
            heap.push(worst);
            let (value, error) = totals(&heap, &finished);
            return Err(QuadFailure {
                estimate: value,
                error,
                reason: FailureReason::SubdivisionLimit,
            });
        }
        if too_small(worst.a, worst.b) {
            finished.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk21(f, worst.a, mid);
        let (v2, e2) = gk21(f, mid, worst.b);
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        splits += 1;
        // Running sums drift; refresh them periodically.
        if splits % 64 == 0 {
            (value, error) = totals(&heap, &finished);
        }
    }

    let (value, error) = totals(&heap, &finished);
    if roundoff && error > tol.target(value) {
        return Err(QuadFailure {
            estimate: value,
            error,
            reason: FailureReason::Roundoff,
        });
    }
    Ok(Estimate { value, error })
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(
    f: &F,
    breakpoints: &[f64],
    tol: Tolerance,
    max_subdivisions: usize,
) -> Result<(f64, f64), QuadFailure>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let g = |x: f64| Complex64::new(f(x), 0.0);
    integrate(&g, breakpoints, tol, max_subdivisions).map(|e| (e.value.re, e.error))
}

/// Wynn's epsilon algorithm applied to the partial sums `sums`.
///
/// Returns the extrapolated limit and an error estimate built from the
/// spread of the last three even-column diagonal entries. At most the
/// trailing 50 sums are used.
pub fn wynn_epsilon(sums: &[f64]) -> (f64, f64) {
    const LIMIT: usize = 50;
    let sums = &sums[sums.len().saturating_sub(LIMIT)..];
    let n = sums.len();
    match n {
        0 => return (0.0, f64::INFINITY),
        1 => return (sums[0], f64::INFINITY),
        2 => return (sums[1], (sums[1] - sums[0]).abs()),
        _ => {}
    }

    let last = sums[n - 1];
    let mut estimates = vec![last];
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let scale = sums
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);

    for k in 1..n {
        let len = n - k;
        let mut next = Vec::with_capacity(len);
        let mut breakdown = false;
        for j in 0..len {
            let diff = cur[j + 1] - cur[j];
            if diff.abs() <= 1e-3 * f64::EPSILON * scale.max(cur[j].abs()) || !diff.is_finite() {
                breakdown = true;
                break;
            }
            next.push(prev[j + 1] + 1.0 / diff);
        }
        if breakdown {
            break;
        }
        if k % 2 == 0 {
            let e = next[len - 1];
            if !e.is_finite() {
                break;
            }
            estimates.push(e);
        }
        prev = cur;
        cur = next;
    }

    // Choose the estimate whose neighbours agree best.
    let m = estimates.len();
    if m == 1 {
        return (last, (sums[n - 1] - sums[n - 2]).abs());
    }
    let mut best = (estimates[m - 1], f64::INFINITY);
    for i in 1..m {
        let mut err = (estimates[i] - estimates[i - 1]).abs();
        if i >= 2 {
            err += (estimates[i - 1] - estimates[i - 2]).abs();
        } else {
            err += (sums[n - 1] - sums[n - 2]).abs();
        }
        err = err.max(5.0 * f64::EPSILON * estimates[i].abs());
        if err < best.1 {
            best = (estimates[i], err);
        }
    }
    best
}
