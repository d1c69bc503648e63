// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! Two-level dephasing semigroups
//! `𝓛ρ = -i c_H [σz, ρ] - c_D [σz, [σz, ρ]]`.
//!
//! Since `[σz, ρ]₀₁ = 2ρ₀₁` and `[σz, [σz, ρ]]₀₁ = 4ρ₀₁`, the semigroup fixes
//! the populations and multiplies the coherence by
//! `exp(-(4 c_D + 2i c_H) t)`.
//!
//! Two coefficient conventions are provided for a dephasing pair `(γ, ω₀)`:
//!
//! * [`Convention::Matched`]: `(c_H, c_D) = (ω₀/2, γ/8)`, the unique choice
//!   reproducing `f(t) = e^{-γt/2 - iω₀t}`;
//! * [`Convention::Literal`]: `(c_H, c_D) = (ω₀, γ/2)`, the rates used
//!   directly as coefficients. This decays four times faster and rotates
//!   twice as fast as `f`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscint::{self, ComplexTimeSeries, QuadratureConfig};
use crate::pocket::{self, PocketModel};
use crate::qubit::QubitState;
use crate::spectral::DephasingParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Convention {
    /// `(ω₀, γ/2)`.
    Literal,
    /// `(ω₀/2, γ/8)`.
    #[default]
    Matched,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Literal => "literal",
            Convention::Matched => "matched",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Convention::Literal),
            "matched" => Ok(Convention::Matched),
            other => Err(Error::InvalidArgument(format!(
                "unknown generator convention {other:?} (expected literal or matched)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GklsGenerator {
    hamiltonian_coeff: f64,
    dissipator_coeff: f64,
    convention: Convention,
}

impl GklsGenerator {
    /// `c_D ≥ 0` is required for complete positivity.
    pub fn new(
        hamiltonian_coeff: f64,
        dissipator_coeff: f64,
        convention: Convention,
    ) -> Result<Self> {
        if !hamiltonian_coeff.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "c_H must be finite (got {hamiltonian_coeff})"
            )));
        }
        if !(dissipator_coeff >= 0.0 && dissipator_coeff.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "c_D must be finite and >= 0 (got {dissipator_coeff})"
            )));
        }
        Ok(GklsGenerator {
            hamiltonian_coeff,
            dissipator_coeff,
            convention,
        })
    }

    pub fn hamiltonian_coeff(&self) -> f64 {
        self.hamiltonian_coeff
    }

    pub fn dissipator_coeff(&self) -> f64 {
        self.dissipator_coeff
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// `λ` in `ρ₀₁(t) = e^{-λt} ρ₀₁(0)`.
    pub fn coherence_rate(&self) -> Complex64 {
        Complex64::new(4.0 * self.dissipator_coeff, 2.0 * self.hamiltonian_coeff)
    }

    /// `𝓛ρ` as a 2×2 matrix.
    pub fn apply(&self, rho: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
        let z = Complex64::new(0.0, 0.0);
        let off = |v: Complex64| {
            -(Complex64::new(0.0, 2.0 * self.hamiltonian_coeff) + 4.0 * self.dissipator_coeff) * v
        };
        // σz commutes with diagonal matrices; [σz, ρ]₁₀ = -2ρ₁₀.
        let off10 = -(Complex64::new(0.0, -2.0 * self.hamiltonian_coeff)
            + 4.0 * self.dissipator_coeff)
            * rho[1][0];
        [[z, off(rho[0][1])], [off10, z]]
    }
}

/// Generator for rates `γ ≥ 0` (`γ = 0` gives pure rotation).
pub fn generator_from_rates(
    gamma: f64,
    omega0: f64,
    convention: Convention,
) -> Result<GklsGenerator> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidRate(gamma));
    }
    match convention {
        Convention::Literal => GklsGenerator::new(omega0, gamma / 2.0, convention),
        Convention::Matched => GklsGenerator::new(omega0 / 2.0, gamma / 8.0, convention),
    }
}

pub fn generator_from_params(params: DephasingParams, convention: Convention) -> GklsGenerator {
    generator_from_rates(params.gamma(), params.omega0(), convention).expect("validated parameters")
}

/// `e^{t𝓛} ρ₀` for `t ≥ 0`.
pub fn propagate(g: &GklsGenerator, rho0: &QubitState, t: f64) -> Result<QubitState> {
    rho0.check()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(*rho0);
    }
    rho0.dephased((-g.coherence_rate() * t).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub time: f64,
    pub exact: QubitState,
    pub semigroup: QubitState,
    /// `½‖ρ_exact - ρ_semigroup‖₁`.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub convention: Convention,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn max_distance(&self) -> f64 {
        self.rows.iter().map(|r| r.distance).fold(0.0, f64::max)
    }
}

/// Exact reduced dynamics of `m` against the semigroup of `g`, at each of
/// `times` (non-negative, strictly increasing).
pub fn compare_exact_vs_semigroup(
    m: &PocketModel,
    g: &GklsGenerator,
    rho0: &QubitState,
    times: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ComparisonReport> {
    rho0.check()?;
    if let Some(&t) = times.iter().find(|t| **t < 0.0) {
        return Err(Error::NegativeTime(t));
    }
    oscint::check_increasing(times)?;
    let factors = pocket::dephasing_series(m, times, cfg)?;
    compare_with_factors(g, rho0, &factors)
}

/// [`compare_exact_vs_semigroup`] from a precomputed dephasing series.
pub fn compare_with_factors(
    g: &GklsGenerator,
    rho0: &QubitState,
    factors: &ComplexTimeSeries,
) -> Result<ComparisonReport> {
    rho0.check()?;
    if let Some(&t) = factors.times().iter().find(|t| **t < 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let rows = factors
        .iter()
        .map(|(t, f)| {
            let exact = pocket::reduced_from_factor(rho0, t, f)?;
            let semigroup = propagate(g, rho0, t)?;
            Ok(ComparisonRow {
                time: t,
                exact,
                semigroup,
                distance: exact.trace_distance(&semigroup),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport {
        convention: g.convention(),
        rows,
    })
}
