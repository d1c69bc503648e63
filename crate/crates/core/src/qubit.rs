// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! Two-level density matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on unit trace and on the positivity bound `|ρ01|² ≤ ρ00 ρ11`.
pub const STATE_TOL: f64 = 1e-12;

/// A qubit density matrix in the `{|0⟩, |1⟩}` basis. `ρ10` is the
/// conjugate of `ρ01`, so hermiticity holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    rho00: f64,
    rho11: f64,
    rho01: Complex64,
}

impl QubitState {
    pub fn new(rho00: f64, rho11: f64, rho01: Complex64) -> Result<Self> {
        let s = QubitState {
            rho00,
            rho11,
            rho01,
        };
        s.check()?;
        Ok(s)
    }

    /// State with populations `(p, 1 - p)`.
    pub fn from_population(rho00: f64, rho01: Complex64) -> Result<Self> {
        Self::new(rho00, 1.0 - rho00, rho01)
    }

    /// `|+⟩⟨+|`, `|+⟩ = (|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        QubitState {
            rho00: 0.5,
            rho11: 0.5,
            rho01: Complex64::new(0.5, 0.0),
        }
    }

    /// `|0⟩⟨0|`.
    pub fn zero() -> Self {
        QubitState {
            rho00: 1.0,
            rho11: 0.0,
            rho01: Complex64::new(0.0, 0.0),
        }
    }

    /// `|1⟩⟨1|`.
    pub fn one() -> Self {
        QubitState {
            rho00: 0.0,
            rho11: 1.0,
            rho01: Complex64::new(0.0, 0.0),
        }
    }

    /// Pure state `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn pure(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        QubitState {
            rho00: c * c,
            rho11: s * s,
            rho01: Complex64::from_polar(c * s, -phi),
        }
    }

    pub fn check(&self) -> Result<()> {
        let QubitState {
            rho00,
            rho11,
            rho01,
        } = *self;
        if !(rho00.is_finite() && rho11.is_finite() && rho01.re.is_finite() && rho01.im.is_finite())
        {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        if rho00 < 0.0 || rho11 < 0.0 {
            return Err(Error::InvalidState(format!(
                "negative population ({rho00}, {rho11})"
            )));
        }
        if (rho00 + rho11 - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {} != 1", rho00 + rho11)));
        }
        if rho01.norm_sqr() > rho00 * rho11 + STATE_TOL {
            return Err(Error::InvalidState(format!(
                "|rho01|^2 = {} exceeds rho00*rho11 = {}",
                rho01.norm_sqr(),
                rho00 * rho11
            )));
        }
        Ok(())
    }

    pub fn rho00(&self) -> f64 {
        self.rho00
    }

    pub fn rho11(&self) -> f64 {
        self.rho11
    }

    pub fn rho01(&self) -> Complex64 {
        self.rho01
    }

    pub fn rho10(&self) -> Complex64 {
        self.rho01.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho00 + self.rho11
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.rho00 * self.rho00 + self.rho11 * self.rho11 + 2.0 * self.rho01.norm_sqr()
    }

    /// `⟨σx⟩ = 2 Re ρ01`.
    pub fn sigma_x(&self) -> f64 {
        2.0 * self.rho01.re
    }

    /// `⟨σy⟩ = -2 Im ρ01`.
    pub fn sigma_y(&self) -> f64 {
        -2.0 * self.rho01.im
    }

    /// `⟨σz⟩` with `σz = |0⟩⟨0| - |1⟩⟨1|`.
    pub fn sigma_z(&self) -> f64 {
        self.rho00 - self.rho11
    }

    /// Same populations, coherence multiplied by `factor`. Fails if the
    /// result is not positive semidefinite.
    pub fn dephased(&self, factor: Complex64) -> Result<Self> {
        Self::new(self.rho00, self.rho11, self.rho01 * factor)
    }

    /// `½‖ρ - σ‖₁`.
    pub fn trace_distance(&self, other: &QubitState) -> f64 {
        let a = self.rho00 - other.rho00;
        let d = self.rho11 - other.rho11;
        let b = self.rho01 - other.rho01;
        let mean = 0.5 * (a + d);
        let radius = (0.5 * (a - d)).hypot(b.norm());
        0.5 * ((mean + radius).abs() + (mean - radius).abs())
    }

    /// Entries as a row-major 2×2 matrix.
    pub fn to_matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.rho00, 0.0), self.rho01],
            [self.rho10(), Complex64::new(self.rho11, 0.0)],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_states() {
        assert!(QubitState::from_population(0.7, Complex64::new(0.5, 0.0)).is_err());
        assert!(QubitState::new(0.6, 0.6, Complex64::new(0.0, 0.0)).is_err());
        assert!(QubitState::new(-0.1, 1.1, Complex64::new(0.0, 0.0)).is_err());
        assert!(QubitState::from_population(f64::NAN, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn named_states() {
        assert_eq!(QubitState::plus().sigma_x(), 1.0);
        assert_eq!(QubitState::plus().purity(), 1.0);
        assert_eq!(QubitState::zero().sigma_z(), 1.0);
        assert_eq!(QubitState::one().sigma_z(), -1.0);
        let y = QubitState::pure(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
        assert!((y.sigma_y() - 1.0).abs() < 1e-15);
        y.check().unwrap();
    }

    #[test]
    fn trace_distance_values() {
        assert_eq!(QubitState::zero().trace_distance(&QubitState::one()), 1.0);
        assert!(
            (QubitState::plus().trace_distance(&QubitState::zero()) - 0.5f64.sqrt()).abs() < 1e-15
        );
        let a = QubitState::plus();
        let b = a.dephased(Complex64::new(0.5, 0.0)).unwrap();
        assert!((a.trace_distance(&b) - 0.25).abs() < 1e-15);
        assert_eq!(a.trace_distance(&a), 0.0);
    }

    #[test]
    fn dephasing_keeps_populations() {
        let s = QubitState::pure(1.0, 0.3)
            .dephased(Complex64::from_polar(0.4, 1.0))
            .unwrap();
        assert_eq!(s.rho00(), (0.5f64).cos().powi(2));
        assert!(s.purity() < 1.0);
    }
}
