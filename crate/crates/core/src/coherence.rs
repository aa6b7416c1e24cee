//! Coherence-order decomposition `rho = sum_m rho_m` and the per-order
//! quantifiers (l1 half-sum, trace norm, multiple-quantum intensity).
//!
//! The canonical index is the element order of [`element_order`]: the entry
//! `|0><1|` of a single qubit belongs to `m = +1`. The mode projector
//! [`project_mode`] follows the asymmetry convention and returns `rho_{-m}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{trace_norm, trace_of_product, ComplexMatrix};
use crate::operator_basis::{build_operator, element_order, expand, qubit_count, ProductOperatorExpansion};

/// The `2N + 1` order sectors of a matrix.
#[derive(Debug, Clone)]
pub struct OrderDecomposition {
    pub n_qubits: usize,
    components: Vec<ComplexMatrix>,
}

impl OrderDecomposition {
    /// `rho_m`, for `-N <= m <= N`.
    pub fn get(&self, m: i64) -> Result<&ComplexMatrix> {
        let idx = self.offset(m)?;
        Ok(&self.components[idx])
    }

    /// Sectors in order `m = -N, ..., N`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &ComplexMatrix)> {
        let n = self.n_qubits as i64;
        self.components.iter().enumerate().map(move |(k, c)| (k as i64 - n, c))
    }

    /// `sum_m rho_m`.
    pub fn sum(&self) -> ComplexMatrix {
        let dim = 1usize << self.n_qubits;
        self.components
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, c| &acc + c)
    }

    fn offset(&self, m: i64) -> Result<usize> {
        let n = self.n_qubits as i64;
        if m.abs() > n {
            return Err(Error::OrderOutOfRange {
                m,
                n_qubits: self.n_qubits,
            });
        }
        Ok((m + n) as usize)
    }
}

fn check_order(m: i64, n_qubits: usize) -> Result<()> {
    if m.unsigned_abs() as usize > n_qubits {
        Err(Error::OrderOutOfRange { m, n_qubits })
    } else {
        Ok(())
    }
}

fn check_quantifier_order(m: usize, n_qubits: usize) -> Result<()> {
    check_order(m as i64, n_qubits)
}

/// Splits `rho` by masking: entry `(r, c)` goes to sector `popcount(c) - popcount(r)`.
pub fn decompose(rho: &ComplexMatrix) -> Result<OrderDecomposition> {
    let n = qubit_count(rho)?;
    let dim = 1usize << n;
    let mut components = vec![ComplexMatrix::zeros(dim, dim); 2 * n + 1];
    for r in 0..dim {
        for c in 0..dim {
            let m = element_order(r, c, n);
            components[(m + n as i32) as usize][(r, c)] = rho[(r, c)];
        }
    }
    Ok(OrderDecomposition {
        n_qubits: n,
        components,
    })
}

/// Splits `rho` by grouping product-operator terms with equal `n_+ - n_-`.
pub fn decompose_via_expansion(rho: &ComplexMatrix) -> Result<OrderDecomposition> {
    let exp = expand(rho)?;
    Ok(group_expansion(&exp))
}

/// Groups an existing expansion into order sectors.
pub fn group_expansion(exp: &ProductOperatorExpansion) -> OrderDecomposition {
    let n = exp.n_qubits;
    let dim = 1usize << n;
    let mut components = vec![ComplexMatrix::zeros(dim, dim); 2 * n + 1];
    for (label, &a) in exp.iter() {
        let slot = (label.order() + n as i32) as usize;
        let term = build_operator(label).scale(a);
        components[slot] = &components[slot] + &term;
    }
    OrderDecomposition {
        n_qubits: n,
        components,
    }
}

/// Mode-of-asymmetry projector of the collective z generator,
/// `(1/K) sum_k e^{-i m x_k} U_{x_k} rho U_{x_k}^dagger` with `x_k = 2 pi k / K`
/// and `K = 2N + 1`.
///
/// The spectral gaps `g` of `Z` are integers in `[-N, N]`, so `|g + m| <= 2N < K`
/// and the discrete average of `e^{-i (g + m) x_k}` is exactly `delta_{g, -m}`:
/// the result is `rho_{-m}`.
pub fn project_mode(rho: &ComplexMatrix, m: i64) -> Result<ComplexMatrix> {
    let n = qubit_count(rho)?;
    check_order(m, n)?;
    let dim = 1usize << n;
    let k_points = 2 * n + 1;
    // z eigenvalue of basis state |k>: (N - 2 popcount(k)) / 2
    let z: Vec<f64> = (0..dim)
        .map(|k| (n as f64 - 2.0 * k.count_ones() as f64) / 2.0)
        .collect();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for k in 0..k_points {
        let x = 2.0 * PI * k as f64 / k_points as f64;
        let weight = Complex64::from_polar(1.0, -(m as f64) * x);
        let rotated = rho.map_indexed(|r, c, v| v * Complex64::from_polar(1.0, -x * (z[r] - z[c])));
        acc = &acc + &rotated.scale(weight);
    }
    Ok(acc.scale(Complex64::new(1.0 / k_points as f64, 0.0)))
}

/// Half the l1 norm of the product-operator coefficients with `|n_+ - n_-| = m`.
///
/// Only terms containing at least one ladder factor contribute, so at `m = 0`
/// the populations (`{0, z}` words) are excluded and the quantity measures
/// zero-quantum coherence only.
pub fn c_l1(rho: &ComplexMatrix, m: usize) -> Result<f64> {
    let exp = expand(rho)?;
    check_quantifier_order(m, exp.n_qubits)?;
    Ok(c_l1_from_expansion(&exp)[m])
}

/// `C^{l1}_{|m|}` for `m = 0..=N` from an expansion.
pub fn c_l1_from_expansion(exp: &ProductOperatorExpansion) -> Vec<f64> {
    let mut out = vec![0.0; exp.n_qubits + 1];
    for (label, a) in exp.iter() {
        if label.has_ladder() {
            out[label.order().unsigned_abs() as usize] += 0.5 * a.norm();
        }
    }
    out
}

/// `C^{l1}_{|m|}` for `m = 0..=N`.
pub fn c_l1_all(rho: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(c_l1_from_expansion(&expand(rho)?))
}

/// Trace norm of the order-`m` sector, `m >= 1`.
pub fn c_trace(rho: &ComplexMatrix, m: usize) -> Result<f64> {
    let n = qubit_count(rho)?;
    if m == 0 {
        return Err(Error::OrderOutOfRange { m: 0, n_qubits: n });
    }
    check_quantifier_order(m, n)?;
    let dec = decompose(rho)?;
    trace_norm(dec.get(m as i64)?)
}

/// Multiple-quantum intensity `I_m = Tr(rho_{-m} rho_m)`.
pub fn mqi(rho: &ComplexMatrix, m: usize) -> Result<f64> {
    let dec = decompose(rho)?;
    check_quantifier_order(m, dec.n_qubits)?;
    mqi_from_decomposition(&dec, m)
}

pub fn mqi_from_decomposition(dec: &OrderDecomposition, m: usize) -> Result<f64> {
    let m = m as i64;
    Ok(trace_of_product(dec.get(-m)?, dec.get(m)?)?.re)
}

/// `I_m` for `m = 0..=N`.
pub fn mqi_all(rho: &ComplexMatrix) -> Result<Vec<f64>> {
    let dec = decompose(rho)?;
    (0..=dec.n_qubits)
        .map(|m| mqi_from_decomposition(&dec, m))
        .collect()
}

/// One row of a per-order report.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSummary {
    pub m: usize,
    /// Matrix positions of order `+m` (for `m = 0`, including the diagonal).
    pub positions: u64,
    pub c_l1: f64,
    /// Trace norm of `rho_m`; zero for `m = 0`, which is not a coherence order.
    pub c_trace: f64,
    pub mqi: f64,
}

/// Tabulates every quantifier for `m = 0..=N`.
pub fn summarize(rho: &ComplexMatrix) -> Result<Vec<OrderSummary>> {
    let n = qubit_count(rho)?;
    let dec = decompose(rho)?;
    let l1 = c_l1_all(rho)?;
    (0..=n)
        .map(|m| {
            let c_trace = if m == 0 {
                0.0
            } else {
                trace_norm(dec.get(m as i64)?)?
            };
            Ok(OrderSummary {
                m,
                positions: crate::operator_basis::binomial(2 * n as u64, (n + m) as u64),
                c_l1: l1[m],
                c_trace,
                mqi: mqi_from_decomposition(&dec, m)?,
            })
        })
        .collect()
}
