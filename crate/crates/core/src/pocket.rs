// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! The spin ⊗ continuum model `H = |0⟩⟨0| ⊗ q₊ + |1⟩⟨1| ⊗ q₋`.
//!
//! For a product initial state `ρ ⊗ |φ⟩⟨φ|` the partial trace reduces to a
//! single scalar: populations are conserved and the coherence is multiplied
//! by `f(t) = ⟨φ| e^{-itq} φ⟩ = ∫ e^{-ixt} |φ(x)|² dx`. The reduced state is
//! therefore evaluated from `f` alone and only the positivity check works
//! on an explicit discretization of the continuum.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscint::{self, ComplexTimeSeries, QuadratureConfig, SeriesMeta};
use crate::qubit::QubitState;
use crate::spectral::{self, DephasingParams, InitialStateSpec};

/// Normalization tolerance for environment states.
pub const ENVIRONMENT_NORM_TOL: f64 = 1e-8;

/// Normalization tolerance for trial states on the grid.
pub const TRIAL_NORM_TOL: f64 = 1e-9;

/// Symmetric position grid `x_{-j} = -x_j` with trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Default for PositionGrid {
    /// 2001 nodes on `[-50, 50]`.
    fn default() -> Self {
        PositionGrid::graded(2001, 50.0, 4.0).expect("default grid parameters are valid")
    }
}

impl PositionGrid {
    /// `x_j = L sinh(α j/N) / sinh(α)` for `j = -N..=N`: spacing grows
    /// geometrically away from the origin, by a factor of about `cosh α`
    /// between the centre and the ends.
    pub fn graded(n_nodes: usize, half_width: f64, grading: f64) -> Result<Self> {
        if n_nodes < 3 || n_nodes % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid needs an odd node count >= 3 (got {n_nodes})"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) || !(grading > 0.0 && grading.is_finite())
        {
            return Err(Error::InvalidArgument(
                "grid half width and grading must be finite and > 0".into(),
            ));
        }
        let n = (n_nodes / 2) as i64;
        let mut nodes: Vec<f64> = (-n..=n)
            .map(|j| half_width * (grading * j as f64 / n as f64).sinh() / grading.sinh())
            .collect();
        // Exact mirror symmetry.
        let last = nodes.len() - 1;
        nodes[last] = half_width;
        for j in 0..n as usize {
            nodes[j] = -nodes[last - j];
        }
        nodes[n as usize] = 0.0;
        let weights = trapezoid_weights(&nodes);
        Ok(PositionGrid { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of `-x_j`.
    pub fn mirror(&self, j: usize) -> usize {
        self.nodes.len() - 1 - j
    }
}

fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    (0..n)
        .map(|j| {
            let left = if j > 0 { nodes[j] - nodes[j - 1] } else { 0.0 };
            let right = if j + 1 < n {
                nodes[j + 1] - nodes[j]
            } else {
                0.0
            };
            0.5 * (left + right)
        })
        .collect()
}

/// Two-component wave function `(ψ₁, ψ₂)` sampled on grid nodes; `ψ₁`
/// belongs to spin level 0 and `ψ₂` to level 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialState {
    pub upper: Vec<Complex64>,
    pub lower: Vec<Complex64>,
}

impl TrialState {
    pub fn norm(&self, grid: &PositionGrid) -> f64 {
        grid.weights()
            .iter()
            .zip(self.upper.iter().zip(&self.lower))
            .map(|(w, (a, b))| w * (a.norm_sqr() + b.norm_sqr()))
            .sum()
    }

    /// Rescale to unit grid norm.
    pub fn normalized(mut self, grid: &PositionGrid) -> Result<Self> {
        let n = self.norm(grid);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Unnormalized { norm: n });
        }
        let s = 1.0 / n.sqrt();
        self.upper
            .iter_mut()
            .chain(self.lower.iter_mut())
            .for_each(|v| *v *= s);
        Ok(self)
    }
}

/// `Σ_j w_j (V(x_j) |ψ₁(x_j)|² + V(-x_j) |ψ₂(x_j)|²)`, the grid form of
/// `⟨ψ| (|0⟩⟨0| ⊗ V(q) + |1⟩⟨1| ⊗ V(-q)) ψ⟩`.
pub fn grid_expectation<V>(grid: &PositionGrid, trial: &TrialState, v: V) -> Result<f64>
where
    V: Fn(f64) -> f64,
{
    if trial.upper.len() != grid.len() || trial.lower.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "trial state has {}+{} samples for a {}-node grid",
            trial.upper.len(),
            trial.lower.len(),
            grid.len()
        )));
    }
    let norm = trial.norm(grid);
    if (norm - 1.0).abs() > TRIAL_NORM_TOL {
        return Err(Error::Unnormalized { norm });
    }
    Ok(grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(trial.upper.iter().zip(&trial.lower))
        .map(|((&x, &w), (a, b))| w * (v(x) * a.norm_sqr() + v(-x) * b.norm_sqr()))
        .sum())
}

/// Ramp function `x₊ = max(x, 0)`.
pub fn ramp(x: f64) -> f64 {
    x.max(0.0)
}

#[derive(Debug, Clone)]
pub struct PocketModel {
    params: DephasingParams,
    environment: InitialStateSpec,
    grid: PositionGrid,
}

impl PocketModel {
    /// Model with the Cauchy–Lorentz environment state of `params`.
    pub fn new(params: DephasingParams) -> Self {
        PocketModel {
            params,
            environment: InitialStateSpec::cauchy_lorentz(params),
            grid: PositionGrid::default(),
        }
    }

    /// Model with an arbitrary environment state; its density must be
    /// normalized.
    pub fn with_environment(
        params: DephasingParams,
        environment: InitialStateSpec,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        let norm = spectral::normalize_check(&environment.density, cfg)?;
        if (norm - 1.0).abs() > ENVIRONMENT_NORM_TOL {
            return Err(Error::InvalidDensity(format!(
                "environment density has mass {norm}"
            )));
        }
        Ok(PocketModel {
            params,
            environment,
            grid: PositionGrid::default(),
        })
    }

    pub fn with_grid(mut self, grid: PositionGrid) -> Self {
        self.grid = grid;
        self
    }

    pub fn params(&self) -> DephasingParams {
        self.params
    }

    pub fn environment(&self) -> &InitialStateSpec {
        &self.environment
    }

    pub fn grid(&self) -> &PositionGrid {
        &self.grid
    }

    /// Diagonal of the grid Hamiltonian in the basis
    /// `|0⟩⊗|x_0⟩, …, |0⟩⊗|x_n⟩, |1⟩⊗|x_0⟩, …`.
    pub fn hamiltonian_diagonal(&self) -> Vec<f64> {
        let xs = self.grid.nodes();
        xs.iter()
            .map(|&x| ramp(x))
            .chain(xs.iter().map(|&x| ramp(-x)))
            .collect()
    }
}

/// `f(t) = ∫ e^{-ixt} |φ(x)|² dx`.
pub fn dephasing_factor(m: &PocketModel, t: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    oscint::fourier_amplitude(&m.environment.density, t, cfg)
}

/// [`dephasing_factor`] on a time grid.
pub fn dephasing_series(
    m: &PocketModel,
    times: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ComplexTimeSeries> {
    let meta = SeriesMeta {
        source: m.environment.density.label().to_string(),
        operation: "dephasing_factor".into(),
        config: *cfg,
    };
    ComplexTimeSeries::tabulate(times, meta, |t| dephasing_factor(m, t, cfg))
}

/// `|f| ≤ 1` holds exactly; quadrature noise above 1 is removed so the
/// dephased state stays positive.
fn contractive(f: Complex64) -> Complex64 {
    let r = f.norm();
    if r > 1.0 {
        f / r
    } else {
        f
    }
}

/// Reduced spin state `tr₂ U(t)(ρ ⊗ |φ⟩⟨φ|)U(t)†`.
pub fn reduced_state(
    m: &PocketModel,
    rho0: &QubitState,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<QubitState> {
    rho0.check()?;
    if t == 0.0 || rho0.rho01() == Complex64::new(0.0, 0.0) {
        return Ok(*rho0);
    }
    reduced_from_factor(rho0, t, dephasing_factor(m, t, cfg)?)
}

/// Reduced state at `t` given the dephasing factor `f(t)` already computed.
pub fn reduced_from_factor(rho0: &QubitState, t: f64, f: Complex64) -> Result<QubitState> {
    rho0.check()?;
    if t == 0.0 {
        return Ok(*rho0);
    }
    rho0.dephased(contractive(f))
}

/// `⟨σx(t)⟩ = 2 Re(f(t) ρ01(0))`.
pub fn sigma_x_expectation(
    m: &PocketModel,
    rho0: &QubitState,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    Ok(reduced_state(m, rho0, t, cfg)?.sigma_x())
}

/// `⟨ψ|Hψ⟩` for each trial state on the model grid.
pub fn positivity_check(m: &PocketModel, trial_states: &[TrialState]) -> Result<Vec<f64>> {
    trial_states
        .iter()
        .map(|s| grid_expectation(&m.grid, s, ramp))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn model(gamma: f64, omega0: f64) -> PocketModel {
        PocketModel::new(DephasingParams::new(gamma, omega0).unwrap())
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn factor_examples() {
        let f = dephasing_factor(&model(1.0, 0.0), 0.0, &cfg()).unwrap();
        assert_abs_diff_eq!(f.re, 1.0, epsilon = 1e-9);
        let f = dephasing_factor(&model(1.0, 0.0), 2.0, &cfg()).unwrap();
        assert_abs_diff_eq!(f.re, 0.367_879_441_171_442_3, epsilon = 1e-9);
        let f = dephasing_factor(&model(2.0, 1.0), 1.0, &cfg()).unwrap();
        assert_abs_diff_eq!(f.re, 0.198_766_110_346_412_98, epsilon = 1e-9);
        assert_abs_diff_eq!(f.im, -0.309_559_875_653_112_22, epsilon = 1e-9);
    }

    #[test]
    fn reduced_state_examples() {
        let m = model(1.0, 0.0);
        let s = reduced_state(&m, &QubitState::plus(), 2.0, &cfg()).unwrap();
        assert_eq!((s.rho00(), s.rho11()), (0.5, 0.5));
        assert_abs_diff_eq!(s.rho01().re, 0.183_939_720_585_721_16, epsilon = 1e-9);
        let rho = QubitState::pure(0.8, 2.0);
        assert_eq!(reduced_state(&m, &rho, 0.0, &cfg()).unwrap(), rho);
        assert_eq!(
            reduced_state(&m, &QubitState::zero(), 3.0, &cfg()).unwrap(),
            QubitState::zero()
        );
    }

    #[test]
    fn sigma_x_examples() {
        let m = model(1.0, 0.0);
        let sx = sigma_x_expectation(&m, &QubitState::plus(), 2.0, &cfg()).unwrap();
        assert_abs_diff_eq!(sx, (-1.0f64).exp(), epsilon = 1e-9);
        let sx = sigma_x_expectation(&model(0.3, 4.0), &QubitState::plus(), 0.0, &cfg()).unwrap();
        assert_eq!(sx, 1.0);
        assert_eq!(
            sigma_x_expectation(&m, &QubitState::zero(), 5.0, &cfg()).unwrap(),
            0.0
        );
    }

    #[test]
    fn grid_is_symmetric_and_graded() {
        let g = PositionGrid::default();
        assert_eq!(g.len(), 2001);
        assert_eq!(g.nodes()[0], -50.0);
        assert_eq!(g.nodes()[2000], 50.0);
        for j in 0..g.len() {
            assert_eq!(g.nodes()[j], -g.nodes()[g.mirror(j)]);
        }
        let inner = g.nodes()[1001] - g.nodes()[1000];
        let outer = g.nodes()[2000] - g.nodes()[1999];
        assert!(outer > 10.0 * inner);
        assert_abs_diff_eq!(g.weights().iter().sum::<f64>(), 100.0, epsilon = 1e-12);
        assert!(PositionGrid::graded(10, 1.0, 1.0).is_err());
    }

    fn localized(g: &PositionGrid, upper_at: Option<f64>, lower_at: Option<f64>) -> TrialState {
        let bump = |c: Option<f64>| -> Vec<Complex64> {
            g.nodes()
                .iter()
                .map(|&x| match c {
                    Some(c) => Complex64::new((-(x - c).powi(2) / 0.02).exp(), 0.0),
                    None => Complex64::new(0.0, 0.0),
                })
                .collect()
        };
        TrialState {
            upper: bump(upper_at),
            lower: bump(lower_at),
        }
        .normalized(g)
        .unwrap()
    }

    #[test]
    fn positivity_examples() {
        let m = model(1.0, 0.0);
        let g = m.grid().clone();
        // ψ₁ on x < 0 and ψ₂ on x > 0: both ramps vanish.
        let dark = localized(&g, Some(-3.0), Some(3.0));
        assert_abs_diff_eq!(
            positivity_check(&m, &[dark]).unwrap()[0],
            0.0,
            epsilon = 1e-12
        );
        let at3 = localized(&g, Some(3.0), None);
        assert_abs_diff_eq!(
            positivity_check(&m, &[at3]).unwrap()[0],
            3.0,
            epsilon = 1e-3
        );
    }

    #[test]
    fn unnormalized_trial_is_rejected() {
        let m = model(1.0, 0.0);
        let mut s = localized(m.grid(), Some(1.0), None);
        s.upper.iter_mut().for_each(|v| *v *= 2.0);
        assert!(matches!(
            positivity_check(&m, &[s]),
            Err(Error::Unnormalized { .. })
        ));
    }

    #[test]
    fn environment_must_be_normalized() {
        let p = DephasingParams::new(1.0, 0.0).unwrap();
        let doubled = InitialStateSpec::real(spectral::lorentzian_density(p).scaled(2.0));
        assert!(PocketModel::with_environment(p, doubled, &cfg()).is_err());
    }

    #[test]
    fn hamiltonian_diagonal_is_nonnegative() {
        let m = model(1.0, 0.0);
        let d = m.hamiltonian_diagonal();
        assert_eq!(d.len(), 2 * m.grid().len());
        assert!(d.iter().all(|&v| v >= 0.0));
    }
}
