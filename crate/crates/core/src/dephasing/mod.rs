//! Pure dephasing of an N-qubit register by classical Gaussian noise coupled to
//! the z axis, `H(t) = sum_l (omega0 + lambda_l B_l(t)) I_z^(l)`.
//!
//! Two bath topologies are supported. With a common bath every qubit sees the
//! same field and the order-`m` sector is multiplied by
//! `e^{-i m omega0 t} e^{-m^2 lambda^2 beta(t)}`. With independent baths each
//! matrix element `|r><c|` decays with `exp(-sum_l lambda_l^2 beta_l(t))`, the
//! sum running over the qubits where `r` and `c` differ.
//!
//! The analytic channels are exact. [`monte_carlo_dephase`] samples noise
//! trajectories instead and serves as an independent check.

mod kernel;
mod monte_carlo;

pub use kernel::Kernel;
pub use monte_carlo::{monte_carlo_dephase, ou_integrals, MonteCarloConfig};

use num_complex::Complex64;

use crate::coherence::c_l1_all;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::operator_basis::{element_order, qubit_count};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Common,
    Independent,
}

/// Noise acting on the register.
///
/// `kernels` holds one entry for a common bath and one per qubit for
/// independent baths.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    /// Qubit splitting (rad/s).
    pub omega0: f64,
    /// Per-qubit coupling strengths `lambda_l`.
    pub couplings: Vec<f64>,
    pub topology: Topology,
    kernels: Vec<Kernel>,
}

impl NoiseModel {
    /// All qubits coupled to one field.
    pub fn common(omega0: f64, kernel: Kernel, couplings: Vec<f64>) -> Result<Self> {
        let model = Self {
            omega0,
            couplings,
            topology: Topology::Common,
            kernels: vec![kernel],
        };
        model.validate()?;
        Ok(model)
    }

    /// One independent field per qubit, each with its own kernel.
    pub fn independent(omega0: f64, kernels: Vec<Kernel>, couplings: Vec<f64>) -> Result<Self> {
        let model = Self {
            omega0,
            couplings,
            topology: Topology::Independent,
            kernels,
        };
        model.validate()?;
        Ok(model)
    }

    /// Independent fields sharing the same statistics.
    pub fn independent_uniform(omega0: f64, kernel: Kernel, couplings: Vec<f64>) -> Result<Self> {
        let kernels = vec![kernel; couplings.len()];
        Self::independent(omega0, kernels, couplings)
    }

    /// Common Ornstein-Uhlenbeck bath with every coupling equal to `lambda`.
    pub fn common_ou(n_qubits: usize, omega0: f64, gamma: f64, damping: f64, lambda: f64) -> Result<Self> {
        Self::common(omega0, Kernel::ornstein_uhlenbeck(gamma, damping)?, vec![lambda; n_qubits])
    }

    /// Independent, identically distributed Ornstein-Uhlenbeck baths.
    pub fn independent_ou(omega0: f64, gamma: f64, damping: f64, couplings: Vec<f64>) -> Result<Self> {
        Self::independent_uniform(omega0, Kernel::ornstein_uhlenbeck(gamma, damping)?, couplings)
    }

    pub fn n_qubits(&self) -> usize {
        self.couplings.len()
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    /// Kernel seen by qubit `l` (0-based).
    pub fn kernel_for(&self, l: usize) -> &Kernel {
        match self.topology {
            Topology::Common => &self.kernels[0],
            Topology::Independent => &self.kernels[l],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.couplings.is_empty() {
            return Err(Error::InvalidModel("no couplings given".into()));
        }
        if let Some(bad) = self.couplings.iter().find(|l| !l.is_finite()) {
            return Err(Error::InvalidModel(format!("coupling {bad} is not finite")));
        }
        if !self.omega0.is_finite() {
            return Err(Error::InvalidModel(format!("omega0 {} is not finite", self.omega0)));
        }
        let expected = match self.topology {
            Topology::Common => 1,
            Topology::Independent => self.couplings.len(),
        };
        if self.kernels.len() != expected {
            return Err(Error::InvalidModel(format!(
                "expected {expected} kernel(s), got {}",
                self.kernels.len()
            )));
        }
        self.kernels.iter().try_for_each(Kernel::validate)
    }

    fn check_register(&self, rho: &ComplexMatrix) -> Result<usize> {
        let n = qubit_count(rho)?;
        if n != self.n_qubits() {
            return Err(Error::InvalidModel(format!(
                "model has {} coupling(s) but the state has {n} qubit(s)",
                self.n_qubits()
            )));
        }
        Ok(n)
    }
}

/// `beta(t)` of the model's first bath (the only one for a common bath).
pub fn beta(t: f64, model: &NoiseModel) -> Result<f64> {
    model.kernels[0].beta(t)
}

/// Common-bath channel at time `t`.
pub fn apply_common(rho: &ComplexMatrix, t: f64, model: &NoiseModel) -> Result<ComplexMatrix> {
    if model.topology != Topology::Common {
        return Err(Error::TopologyMismatch("common-bath channel needs a common-bath model"));
    }
    let n = model.check_register(rho)?;
    let lambda = model.couplings[0];
    if model.couplings.iter().any(|&l| l != lambda) {
        return Err(Error::InvalidModel(
            "common-bath channel needs equal couplings on every qubit".into(),
        ));
    }
    let b = beta(t, model)?;
    let factors: Vec<Complex64> = (-(n as i32)..=n as i32)
        .map(|m| {
            let m = m as f64;
            Complex64::from_polar((-m * m * lambda * lambda * b).exp(), -m * model.omega0 * t)
        })
        .collect();
    Ok(rho.map_indexed(|r, c, v| v * factors[(element_order(r, c, n) + n as i32) as usize]))
}

/// Independent-bath channel at time `t`.
pub fn apply_independent(rho: &ComplexMatrix, t: f64, model: &NoiseModel) -> Result<ComplexMatrix> {
    if model.topology != Topology::Independent {
        return Err(Error::TopologyMismatch("independent-bath channel needs an independent-bath model"));
    }
    let n = model.check_register(rho)?;
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    // rate[l] for qubit l; bit (n - 1 - l) of a basis index belongs to qubit l
    let rates: Vec<f64> = (0..n)
        .map(|l| Ok(model.couplings[l].powi(2) * model.kernel_for(l).beta(t)?))
        .collect::<Result<_>>()?;
    Ok(rho.map_indexed(|r, c, v| {
        let diff = r ^ c;
        let decay: f64 = (0..n)
            .filter(|l| diff >> (n - 1 - l) & 1 == 1)
            .map(|l| rates[l])
            .sum();
        let m = element_order(r, c, n) as f64;
        v * Complex64::from_polar((-decay).exp(), -m * model.omega0 * t)
    }))
}

/// Channel matching the model's topology.
pub fn apply(rho: &ComplexMatrix, t: f64, model: &NoiseModel) -> Result<ComplexMatrix> {
    match model.topology {
        Topology::Common => apply_common(rho, t, model),
        Topology::Independent => apply_independent(rho, t, model),
    }
}

/// States and per-order l1 coherences along a time grid.
#[derive(Debug, Clone)]
pub struct DephasingResult {
    pub times: Vec<f64>,
    pub states: Vec<ComplexMatrix>,
    /// `per_order_l1[k][m]` is `C^{l1}_m` at `times[k]`.
    pub per_order_l1: Vec<Vec<f64>>,
    /// `per_order_l1` divided by the value at `t = 0`; NaN for orders that start empty.
    pub normalized: Vec<Vec<f64>>,
    /// Standard errors of `normalized`, present for Monte Carlo runs.
    pub std_err: Option<Vec<Vec<f64>>>,
}

impl DephasingResult {
    pub(crate) fn from_states(
        times: Vec<f64>,
        states: Vec<ComplexMatrix>,
        initial_l1: &[f64],
        std_err: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let per_order_l1: Vec<Vec<f64>> = states.iter().map(c_l1_all).collect::<Result<_>>()?;
        let normalized = per_order_l1
            .iter()
            .map(|row| normalize(row, initial_l1))
            .collect();
        Ok(Self {
            times,
            states,
            per_order_l1,
            normalized,
            std_err,
        })
    }

    /// Normalized curve of order `m` across the grid.
    pub fn normalized_order(&self, m: usize) -> Vec<f64> {
        self.normalized.iter().map(|row| row[m]).collect()
    }
}

pub(crate) fn normalize(row: &[f64], initial: &[f64]) -> Vec<f64> {
    row.iter()
        .zip(initial)
        .map(|(&v, &v0)| if v0 > 0.0 { v / v0 } else { f64::NAN })
        .collect()
}

pub(crate) fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(&t) = times.iter().find(|t| t.is_nan() || **t < 0.0) {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// Evolves `rho` with the exact channel over `times`.
pub fn dephase(rho: &ComplexMatrix, times: &[f64], model: &NoiseModel) -> Result<DephasingResult> {
    check_grid(times)?;
    let initial = c_l1_all(rho)?;
    let states = times
        .iter()
        .map(|&t| apply(rho, t, model))
        .collect::<Result<Vec<_>>>()?;
    DephasingResult::from_states(times.to_vec(), states, &initial, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus_state(n: usize) -> ComplexMatrix {
        let dim = 1 << n;
        ComplexMatrix::from_vec(dim, dim, vec![Complex64::new(1.0 / dim as f64, 0.0); dim * dim])
    }

    fn fig3a() -> NoiseModel {
        NoiseModel::common_ou(3, 0.0, 10.0, 100.0, 1.0).unwrap()
    }

    fn fig3b() -> NoiseModel {
        NoiseModel::independent_ou(0.0, 10.0, 100.0, vec![1.0, 0.8, 0.2]).unwrap()
    }

    #[test]
    fn diagonal_states_are_fixed_points() {
        let rho = ComplexMatrix::from_real_diag(&[0.1, 0.2, 0.3, 0.4]);
        let common = NoiseModel::common_ou(2, 3.0, 10.0, 100.0, 1.0).unwrap();
        let indep = NoiseModel::independent_ou(3.0, 10.0, 100.0, vec![1.0, 0.5]).unwrap();
        assert_eq!(apply_common(&rho, 0.7, &common).unwrap(), rho);
        assert_eq!(apply_independent(&rho, 0.7, &indep).unwrap(), rho);
    }

    #[test]
    fn common_bath_single_order_decay() {
        let res = dephase(&plus_state(3), &[0.05], &fig3a()).unwrap();
        let x: f64 = 0.05;
        let c1 = (-0.5 * (10.0 * x - 1.0 + (-10.0 * x).exp())).exp();
        assert!((res.normalized[0][1] - c1).abs() < 1e-12);
        assert!((res.normalized[0][1] - 0.948).abs() < 1e-3);
        assert!((res.normalized[0][3] - c1.powi(9)).abs() < 1e-12);
        assert!((res.normalized[0][2] - c1.powi(4)).abs() < 1e-12);
        assert!((res.normalized[0][0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn independent_bath_fig3b_point() {
        let res = dephase(&plus_state(3), &[0.1], &fig3b()).unwrap();
        let c3 = res.normalized[0][3];
        assert!((c3 - (-1.68 * 0.5 * (-1.0f64).exp()).exp()).abs() < 1e-12);
        assert!((c3 - 0.7342).abs() < 1e-4);
        assert!((res.normalized[0][0] - res.normalized[0][2]).abs() < 1e-12);
    }

    #[test]
    fn bell_double_quantum_rate() {
        let mut phi = ComplexMatrix::zeros(4, 4);
        for &(r, c) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            phi[(r, c)] = Complex64::new(0.5, 0.0);
        }
        let model = NoiseModel::independent_ou(0.0, 10.0, 100.0, vec![0.7, 1.3]).unwrap();
        let t = 0.2;
        let out = apply_independent(&phi, t, &model).unwrap();
        let b = beta(t, &model).unwrap();
        let expected = 0.5 * (-(0.49 + 1.69) * b).exp();
        assert!((out[(0, 3)].re - expected).abs() < 1e-15);
        assert_eq!(out[(0, 0)], phi[(0, 0)]);
    }

    #[test]
    fn larmor_phase_only_with_zero_damping() {
        let model = NoiseModel::common_ou(1, 2.0, 10.0, 0.0, 1.0).unwrap();
        let out = apply_common(&plus_state(1), 0.25, &model).unwrap();
        // order +1 element |0><1| picks up e^{-i omega0 t}
        let expected = Complex64::from_polar(0.5, -0.5);
        assert!((out[(0, 1)] - expected).norm() < 1e-15);
        assert!((out[(1, 0)] - expected.conj()).norm() < 1e-15);
    }

    #[test]
    fn topology_and_coupling_errors() {
        let rho = plus_state(3);
        assert!(matches!(apply_common(&rho, 0.1, &fig3b()), Err(Error::TopologyMismatch(_))));
        assert!(matches!(apply_independent(&rho, 0.1, &fig3a()), Err(Error::TopologyMismatch(_))));
        let uneven = NoiseModel::common(0.0, Kernel::ornstein_uhlenbeck(1.0, 1.0).unwrap(), vec![1.0, 0.5, 1.0]).unwrap();
        assert!(matches!(apply_common(&rho, 0.1, &uneven), Err(Error::InvalidModel(_))));
        assert!(matches!(apply_common(&rho, -0.1, &fig3a()), Err(Error::NegativeTime(_))));
        assert!(matches!(dephase(&rho, &[], &fig3a()), Err(Error::EmptyGrid)));
        assert!(NoiseModel::common_ou(2, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(NoiseModel::common_ou(2, 0.0, 1.0, 1.0, f64::NAN).is_err());
        assert!(matches!(apply_common(&plus_state(2), 0.1, &fig3a()), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn custom_kernel_matches_ou_channel() {
        let (gamma, damping) = (10.0, 100.0);
        let custom = Kernel::custom(move |u| 0.5 * damping * (-gamma * u).exp());
        let a = NoiseModel::common(0.0, custom, vec![1.0; 2]).unwrap();
        let b = NoiseModel::common_ou(2, 0.0, gamma, damping, 1.0).unwrap();
        let rho = plus_state(2);
        let diff = apply_common(&rho, 0.3, &a).unwrap().max_abs_diff(&apply_common(&rho, 0.3, &b).unwrap());
        assert!(diff < 1e-8);
    }
}
