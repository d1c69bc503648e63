// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! Numerical laboratory for a qubit coupled to a continuum through a
//! positive (bounded-below) Hamiltonian.
//!
//! The Hamiltonian `H = |0⟩⟨0| ⊗ q₊ + |1⟩⟨1| ⊗ q₋` couples each spin level to
//! a ramp-function multiplication operator. With a Cauchy–Lorentz
//! environment state, the reduced spin dynamics is an exact dephasing
//! semigroup: the coherence decays as `exp(-γ|t|/2 - iω₀t)` for all times,
//! while the global survival amplitude does not decay and obeys the
//! Paley–Wiener constraint.
//!
//! Module map:
//!
//! * [`spectral`] : energy densities, Cauchy–Lorentz family, masses.
//! * [`oscint`] : Fourier-type integrals `∫ e^{-iEt} p(E) dE`.
//! * [`pocket`] : the bipartite model, reduced states, positivity.
//! * [`gkls`] : the dephasing semigroup and its comparison with the model.
//! * [`diagnostics`] : Paley–Wiener integrals and decay classification.
//! * [`potential`] : generalized monotone potentials `V(±q)`.

pub mod diagnostics;
pub mod error;
pub mod gkls;
pub mod oscint;
pub mod pocket;
pub mod potential;
pub mod quad;
pub mod qubit;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use oscint::{ComplexTimeSeries, QuadratureConfig};
pub use qubit::QubitState;
pub use spectral::{DephasingParams, InitialStateSpec, SpectralDensity};
