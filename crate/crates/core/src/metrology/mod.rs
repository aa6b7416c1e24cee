//! Phase estimation with the collective generator `Z = sum_l I_z^(l)`.
//!
//! The QFI is normalized so that a pure state gives `Var(H)`; multiply by
//! [`GHR_QFI_FACTOR`](crate::tolerances::GHR_QFI_FACTOR) for the `4 Var(H)`
//! convention. The entanglement threshold in that normalization is `N / 4`.

mod closed_form;
mod states;

pub use closed_form::{closed_form, example3_printed_qfi, ClosedForm, ExampleParams};
pub use states::{example_state, make_state, BellState, StateFamily};

use num_complex::Complex64;

use crate::coherence::{decompose, mqi_from_decomposition};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::operator_basis::qubit_count;
use crate::tolerances::{HERMITICITY_TOL, MQI_EPS, QFI_CUTOFF, STATE_TOL};

/// A diagonal generator `H` together with the encoded phase `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseEncoding {
    pub generator: ComplexMatrix,
    /// Encoded phase (rad).
    pub phase_tau: f64,
}

impl PhaseEncoding {
    /// `H = sum_l I_z^(l)` on `n` qubits.
    pub fn collective_z(n_qubits: usize, phase_tau: f64) -> Self {
        let diag: Vec<f64> = (0..1usize << n_qubits)
            .map(|k| 0.5 * (n_qubits as f64 - 2.0 * k.count_ones() as f64))
            .collect();
        Self {
            generator: ComplexMatrix::from_real_diag(&diag),
            phase_tau,
        }
    }

    /// Any generator diagonal in the computational basis with half-integer entries.
    pub fn new(generator: ComplexMatrix, phase_tau: f64) -> Result<Self> {
        qubit_count(&generator)?;
        let dim = generator.rows();
        for r in 0..dim {
            for c in 0..dim {
                let v = generator[(r, c)];
                let ok = if r == c {
                    v.im == 0.0 && (2.0 * v.re).fract() == 0.0
                } else {
                    v == Complex64::new(0.0, 0.0)
                };
                if !ok {
                    return Err(Error::ParamOutOfRange(
                        "generator must be diagonal with half-integer entries".into(),
                    ));
                }
            }
        }
        Ok(Self { generator, phase_tau })
    }

    pub fn n_qubits(&self) -> usize {
        self.generator.rows().trailing_zeros() as usize
    }

    fn spectrum(&self) -> Vec<f64> {
        self.generator.diagonal().iter().map(|z| z.re).collect()
    }

    fn is_collective_z(&self) -> bool {
        *self == Self::collective_z(self.n_qubits(), self.phase_tau)
    }

    /// `U rho U^dagger` with `U = exp(-i theta H)`.
    pub fn rotate(&self, rho: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix> {
        if rho.shape() != self.generator.shape() {
            return Err(Error::ShapeMismatch {
                left: rho.shape(),
                right: self.generator.shape(),
            });
        }
        let h = self.spectrum();
        Ok(rho.map_indexed(|r, c, v| v * Complex64::from_polar(1.0, -theta * (h[r] - h[c]))))
    }

    fn check_tau(&self) -> Result<()> {
        if self.phase_tau == 0.0 {
            Err(Error::ZeroTau)
        } else if !self.phase_tau.is_finite() {
            Err(Error::ParamOutOfRange(format!("tau = {}", self.phase_tau)))
        } else {
            Ok(())
        }
    }

    fn require_collective(&self) -> Result<()> {
        if self.is_collective_z() {
            Ok(())
        } else {
            Err(Error::ParamOutOfRange(
                "coherence-order bounds need the collective z generator".into(),
            ))
        }
    }
}

/// Checks Hermiticity, unit trace and positivity.
pub fn validate_state(rho: &ComplexMatrix) -> Result<()> {
    qubit_count(rho)?;
    if !rho.is_hermitian(HERMITICITY_TOL.max(STATE_TOL)) {
        return Err(Error::InvalidState(format!(
            "not Hermitian (defect {:.3e})",
            rho.hermitian_defect()
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}")));
    }
    let eig = hermitian_eig(&rho.hermitian_part())?;
    let min = eig.eigenvalues[0];
    if min < -STATE_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// Quantum Fisher information of `rho_tau = U rho0 U^dagger`,
/// `1/2 sum_{q_n + q_m > cutoff} (q_n - q_m)^2 |H_nm|^2 / (q_n + q_m)`.
pub fn qfi(rho0: &ComplexMatrix, enc: &PhaseEncoding) -> Result<f64> {
    validate_state(rho0)?;
    let rho_t = enc.rotate(rho0, enc.phase_tau)?.hermitian_part();
    let eig = hermitian_eig(&rho_t)?;
    let q = &eig.eigenvalues;
    let v = &eig.eigenvectors;
    let h = enc.spectrum();
    let dim = q.len();
    let mut total = 0.0;
    for a in 0..dim {
        for b in (a + 1)..dim {
            let s = q[a] + q[b];
            if s <= QFI_CUTOFF {
                continue;
            }
            let h_ab: Complex64 = (0..dim).map(|k| v[(k, a)].conj() * h[k] * v[(k, b)]).sum();
            // the (a, b) and (b, a) terms are equal
            total += (q[a] - q[b]).powi(2) * h_ab.norm_sqr() / s;
        }
    }
    Ok(total)
}

/// Squared speed `(Tr rho0^2 - Tr(rho_tau rho0)) / tau^2`, clamped at zero.
///
/// The difference is summed entrywise as `|rho_rc|^2 2 sin^2(tau (h_r - h_c) / 2)`
/// so that small `tau` does not cancel the two traces against each other.
pub fn squared_speed(rho0: &ComplexMatrix, enc: &PhaseEncoding) -> Result<f64> {
    enc.check_tau()?;
    if rho0.shape() != enc.generator.shape() {
        return Err(Error::ShapeMismatch {
            left: rho0.shape(),
            right: enc.generator.shape(),
        });
    }
    let h = enc.spectrum();
    let tau = enc.phase_tau;
    let mut total = 0.0;
    for r in 0..rho0.rows() {
        for (c, v) in rho0.row(r).iter().enumerate() {
            total += v.norm_sqr() * 2.0 * (0.5 * tau * (h[r] - h[c])).sin().powi(2);
        }
    }
    Ok((total / (tau * tau)).max(0.0))
}

fn b_from_mqi(i_m: f64, m: usize, tau: f64) -> f64 {
    // 2 (1 - cos m tau) written without cancellation
    4.0 * (0.5 * m as f64 * tau).sin().powi(2) * i_m / (tau * tau)
}

/// `B_{tau,m} = 2 (1 - cos(m tau)) I_m / tau^2`.
pub fn b_term(rho0: &ComplexMatrix, enc: &PhaseEncoding, m: usize) -> Result<f64> {
    enc.check_tau()?;
    enc.require_collective()?;
    let dec = decompose(rho0)?;
    if m > dec.n_qubits {
        return Err(Error::OrderOutOfRange {
            m: m as i64,
            n_qubits: dec.n_qubits,
        });
    }
    Ok(b_from_mqi(mqi_from_decomposition(&dec, m)?, m, enc.phase_tau))
}

/// `F_I = sum_m m^2 I_m`.
pub fn f_i(rho0: &ComplexMatrix) -> Result<f64> {
    let dec = decompose(rho0)?;
    (0..=dec.n_qubits).try_fold(0.0, |acc, m| Ok(acc + (m * m) as f64 * mqi_from_decomposition(&dec, m)?))
}

/// `F_I^m = m^2 I_m`.
pub fn f_i_m(rho0: &ComplexMatrix, m: usize) -> Result<f64> {
    let dec = decompose(rho0)?;
    if m > dec.n_qubits {
        return Err(Error::OrderOutOfRange {
            m: m as i64,
            n_qubits: dec.n_qubits,
        });
    }
    Ok((m * m) as f64 * mqi_from_decomposition(&dec, m)?)
}

/// Everything the witness criterion needs, for one state and phase.
#[derive(Debug, Clone, PartialEq)]
pub struct MetrologyReport {
    pub n_qubits: usize,
    pub tau: f64,
    pub f_q: f64,
    pub s_tau: f64,
    /// `I_m` for `m = 0..=N`.
    pub i_m: Vec<f64>,
    /// `B_{tau,m}` for `m = 0..=N`.
    pub b_tau_m: Vec<f64>,
    pub f_i: f64,
    pub f_i_mmax: f64,
    /// Largest `m` with `I_m > MQI_EPS`.
    pub m_max: usize,
    /// `B_{tau,m_max} > N / 4`.
    pub witness_b: bool,
    /// `F_I^{m_max} > N / 4`.
    pub witness_fi: bool,
    pub threshold: f64,
}

impl MetrologyReport {
    pub fn b_mmax(&self) -> f64 {
        self.b_tau_m[self.m_max]
    }

    /// Either inequality holds. A false value certifies nothing.
    pub fn certified(&self) -> bool {
        self.witness_b || self.witness_fi
    }
}

/// Full report for `rho0` under `enc`.
pub fn witness(rho0: &ComplexMatrix, enc: &PhaseEncoding) -> Result<MetrologyReport> {
    enc.check_tau()?;
    enc.require_collective()?;
    let f_q = qfi(rho0, enc)?;
    let s_tau = squared_speed(rho0, enc)?;
    let dec = decompose(rho0)?;
    let n = dec.n_qubits;
    let i_m: Vec<f64> = (0..=n).map(|m| mqi_from_decomposition(&dec, m)).collect::<Result<_>>()?;
    let b_tau_m: Vec<f64> = i_m
        .iter()
        .enumerate()
        .map(|(m, &i)| b_from_mqi(i, m, enc.phase_tau))
        .collect();
    let f_i = i_m.iter().enumerate().map(|(m, &i)| (m * m) as f64 * i).sum();
    let m_max = (0..=n).rev().find(|&m| i_m[m] > MQI_EPS).unwrap_or(0);
    let f_i_mmax = (m_max * m_max) as f64 * i_m[m_max];
    let threshold = n as f64 / 4.0;
    Ok(MetrologyReport {
        n_qubits: n,
        tau: enc.phase_tau,
        f_q,
        s_tau,
        witness_b: m_max > 0 && b_tau_m[m_max] > threshold,
        witness_fi: m_max > 0 && f_i_mmax > threshold,
        i_m,
        b_tau_m,
        f_i,
        f_i_mmax,
        m_max,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ghz(n: usize) -> ComplexMatrix {
        make_state(&StateFamily::Ghz { n }).unwrap()
    }

    #[test]
    fn ghz3_anchors() {
        let enc = PhaseEncoding::collective_z(3, PI / 6.0);
        let rho = ghz(3);
        assert!((qfi(&rho, &enc).unwrap() - 2.25).abs() < 1e-12);
        let b3 = b_term(&rho, &enc, 3).unwrap();
        assert!((b3 - 18.0 / (PI * PI)).abs() < 1e-12);
        assert!((f_i_m(&rho, 3).unwrap() - 2.25).abs() < 1e-12);
        let report = witness(&rho, &enc).unwrap();
        assert_eq!(report.m_max, 3);
        assert!(report.witness_b && report.witness_fi);
        assert!((report.threshold - 0.75).abs() < 1e-15);
    }

    #[test]
    fn plus_state_is_not_certified_by_top_order() {
        let enc = PhaseEncoding::collective_z(3, PI / 6.0);
        let rho = make_state(&StateFamily::Plus { n: 3 }).unwrap();
        assert!((qfi(&rho, &enc).unwrap() - 0.75).abs() < 1e-12);
        let report = witness(&rho, &enc).unwrap();
        assert!((report.i_m[3] - 1.0 / 64.0).abs() < 1e-15);
        assert!((report.f_i_mmax - 9.0 / 64.0).abs() < 1e-15);
        assert!(!report.witness_fi);
    }

    #[test]
    fn w_state_is_blind_to_the_phase() {
        let rho = make_state(&StateFamily::Dicke { n: 3, k: 1 }).unwrap();
        let enc = PhaseEncoding::collective_z(3, 0.5);
        assert_eq!(squared_speed(&rho, &enc).unwrap(), 0.0);
        assert!(qfi(&rho, &enc).unwrap().abs() < 1e-12);
        assert_eq!(witness(&rho, &enc).unwrap().m_max, 0);
    }

    #[test]
    fn maximally_mixed_and_diagonal() {
        let enc = PhaseEncoding::collective_z(2, 0.3);
        let mixed = make_state(&StateFamily::MaximallyMixed { n: 2 }).unwrap();
        assert!(qfi(&mixed, &enc).unwrap().abs() < 1e-15);
        let diag = ComplexMatrix::from_real_diag(&[0.1, 0.2, 0.3, 0.4]);
        let r = witness(&diag, &enc).unwrap();
        assert_eq!(r.m_max, 0);
        assert!(!r.witness_b && !r.witness_fi);
        assert_eq!(r.f_i, 0.0);
    }

    #[test]
    fn speed_is_sum_of_b_terms() {
        let enc = PhaseEncoding::collective_z(3, 0.7);
        let rho = example_state(4, &ExampleParams { p: 0.35, ..Default::default() }).unwrap();
        let r = witness(&rho, &enc).unwrap();
        let sum: f64 = r.b_tau_m.iter().sum();
        assert!((r.s_tau - sum).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let rho = ghz(3);
        let zero = PhaseEncoding::collective_z(3, 0.0);
        assert!(matches!(squared_speed(&rho, &zero), Err(Error::ZeroTau)));
        assert!(matches!(b_term(&rho, &zero, 3), Err(Error::ZeroTau)));
        let enc = PhaseEncoding::collective_z(3, 0.1);
        assert!(matches!(b_term(&rho, &enc, 4), Err(Error::OrderOutOfRange { .. })));
        assert!(matches!(f_i_m(&rho, 5), Err(Error::OrderOutOfRange { .. })));
        let bad = rho.scale(Complex64::new(2.0, 0.0));
        assert!(matches!(qfi(&bad, &enc), Err(Error::InvalidState(_))));
        let neg = ComplexMatrix::from_real_diag(&[1.5, -0.5]);
        assert!(matches!(qfi(&neg, &PhaseEncoding::collective_z(1, 0.1)), Err(Error::InvalidState(_))));
        let off = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(PhaseEncoding::new(off, 0.1).is_err());
        let third = ComplexMatrix::from_real_diag(&[1.0 / 3.0, 0.0]);
        assert!(PhaseEncoding::new(third, 0.1).is_err());
    }

    #[test]
    fn squared_speed_survives_tiny_tau() {
        // S_tau tends to Var(H) for pure states
        let enc = PhaseEncoding::collective_z(3, 1e-7);
        let s = squared_speed(&ghz(3), &enc).unwrap();
        assert!((s - 2.25).abs() < 1e-9, "{s}");
        let sum: f64 = witness(&ghz(3), &enc).unwrap().b_tau_m.iter().sum();
        assert!((s - sum).abs() < 1e-12);
    }

    #[test]
    fn plus_plus_and_phi_give_the_same_precision() {
        let enc = PhaseEncoding::collective_z(2, 0.4);
        let pp = make_state(&StateFamily::Plus { n: 2 }).unwrap();
        let phi = make_state(&StateFamily::Phi).unwrap();
        assert!((qfi(&pp, &enc).unwrap() - qfi(&phi, &enc).unwrap()).abs() < 1e-12);
    }
}
