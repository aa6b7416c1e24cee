//! Named probe states.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;

use super::closed_form::ExampleParams;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::tolerances::MAX_QUBITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateFamily {
    /// `(|0...0> + |1...1>) / sqrt 2`.
    Ghz { n: usize },
    /// `|+>^N`.
    Plus { n: usize },
    /// Uniform superposition of the basis states with `k` ones; `k = 1` is the W state.
    Dicke { n: usize, k: usize },
    Bell(BellState),
    /// `(|00> + |01> + |10> - |11>) / 2`, maximally entangled with the populations of `|++>`.
    Phi,
    MaximallyMixed { n: usize },
    /// Computational basis state `|index>`, qubit 1 most significant.
    Basis { n: usize, index: usize },
    /// `cos(phi) |001> + sin(phi) |GHZ_3>`, `0 <= phi <= pi`.
    Example1 { phi: f64 },
    /// `cos(phi) |000> + sin(phi) (|011> + |101> + |110>) / sqrt 3`, `0 <= phi <= pi`.
    Example2 { phi: f64 },
    /// `MixedGhz` with `N = 3`.
    Example3 { p: f64, phi: f64 },
    /// `(1 - p) |+00><+00| + p |GHZ_3><GHZ_3|`.
    Example4 { p: f64 },
    /// `(1 - p) |+++><+++| + p |GHZ_3><GHZ_3|`.
    Example5 { p: f64 },
    /// `(1 - p) I / 2^N + p |Psi><Psi|` with
    /// `|Psi> = cos(phi) |GHZ_N> + sin(phi) |0...01>`, `0 <= phi <= pi/2`.
    MixedGhz { n: usize, p: f64, phi: f64 },
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::ParamOutOfRange(format!("n = {n} must be in 1..={MAX_QUBITS}")));
    }
    Ok(())
}

fn check_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if !(v >= lo && v <= hi) {
        return Err(Error::ParamOutOfRange(format!("{name} = {v} outside [{lo}, {hi}]")));
    }
    Ok(())
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn ket(dim: usize, amps: &[(usize, f64)]) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    for &(i, a) in amps {
        psi[i] += real(a);
    }
    psi
}

fn ghz_ket(n: usize) -> Vec<Complex64> {
    ket(1 << n, &[(0, FRAC_1_SQRT_2), ((1 << n) - 1, FRAC_1_SQRT_2)])
}

fn plus_ket(n: usize) -> Vec<Complex64> {
    let dim = 1usize << n;
    vec![real(1.0 / (dim as f64).sqrt()); dim]
}

fn mix(a: &ComplexMatrix, b: &ComplexMatrix, p: f64) -> ComplexMatrix {
    &a.scale(real(1.0 - p)) + &b.scale(real(p))
}

fn add_kets(a: &[Complex64], ca: f64, b: &[Complex64], cb: f64) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x * ca + y * cb).collect()
}

/// Density matrix of a named family.
pub fn make_state(family: &StateFamily) -> Result<ComplexMatrix> {
    Ok(match *family {
        StateFamily::Ghz { n } => {
            check_n(n)?;
            ComplexMatrix::outer(&ghz_ket(n))
        }
        StateFamily::Plus { n } => {
            check_n(n)?;
            ComplexMatrix::outer(&plus_ket(n))
        }
        StateFamily::Dicke { n, k } => {
            check_n(n)?;
            if k > n {
                return Err(Error::ParamOutOfRange(format!("k = {k} exceeds n = {n}")));
            }
            ComplexMatrix::outer(&make_dicke_ket(n, k))
        }
        StateFamily::Bell(kind) => {
            let s = FRAC_1_SQRT_2;
            let amps = match kind {
                BellState::PhiPlus => [(0, s), (3, s)],
                BellState::PhiMinus => [(0, s), (3, -s)],
                BellState::PsiPlus => [(1, s), (2, s)],
                BellState::PsiMinus => [(1, s), (2, -s)],
            };
            ComplexMatrix::outer(&ket(4, &amps))
        }
        StateFamily::Phi => ComplexMatrix::outer(&ket(4, &[(0, 0.5), (1, 0.5), (2, 0.5), (3, -0.5)])),
        StateFamily::MaximallyMixed { n } => {
            check_n(n)?;
            let dim = 1usize << n;
            ComplexMatrix::identity(dim).scale(real(1.0 / dim as f64))
        }
        StateFamily::Basis { n, index } => {
            check_n(n)?;
            if index >= 1 << n {
                return Err(Error::ParamOutOfRange(format!("basis index {index} out of range")));
            }
            ComplexMatrix::outer(&ket(1 << n, &[(index, 1.0)]))
        }
        StateFamily::Example1 { phi } => {
            check_range("phi", phi, 0.0, PI)?;
            let psi = add_kets(&ket(8, &[(0b001, 1.0)]), phi.cos(), &ghz_ket(3), phi.sin());
            ComplexMatrix::outer(&psi)
        }
        StateFamily::Example2 { phi } => {
            check_range("phi", phi, 0.0, PI)?;
            let w2 = make_dicke_ket(3, 2);
            let psi = add_kets(&ket(8, &[(0, 1.0)]), phi.cos(), &w2, phi.sin());
            ComplexMatrix::outer(&psi)
        }
        StateFamily::Example3 { p, phi } => make_state(&StateFamily::MixedGhz { n: 3, p, phi })?,
        StateFamily::Example4 { p } => {
            check_range("p", p, 0.0, 1.0)?;
            // |+00> = (|000> + |100>) / sqrt 2
            let plus00 = ket(8, &[(0b000, FRAC_1_SQRT_2), (0b100, FRAC_1_SQRT_2)]);
            mix(&ComplexMatrix::outer(&plus00), &ComplexMatrix::outer(&ghz_ket(3)), p)
        }
        StateFamily::Example5 { p } => {
            check_range("p", p, 0.0, 1.0)?;
            mix(&ComplexMatrix::outer(&plus_ket(3)), &ComplexMatrix::outer(&ghz_ket(3)), p)
        }
        StateFamily::MixedGhz { n, p, phi } => {
            check_n(n)?;
            check_range("p", p, 0.0, 1.0)?;
            check_range("phi", phi, 0.0, FRAC_PI_2)?;
            let dim = 1usize << n;
            let psi = add_kets(&ghz_ket(n), phi.cos(), &ket(dim, &[(1, 1.0)]), phi.sin());
            let mixed = ComplexMatrix::identity(dim).scale(real(1.0 / dim as f64));
            mix(&mixed, &ComplexMatrix::outer(&psi), p)
        }
    })
}

fn make_dicke_ket(n: usize, k: usize) -> Vec<Complex64> {
    let members: Vec<usize> = (0..1usize << n).filter(|i| i.count_ones() as usize == k).collect();
    let a = 1.0 / (members.len() as f64).sqrt();
    ket(1 << n, &members.iter().map(|&i| (i, a)).collect::<Vec<_>>())
}

/// State of example family `id` (1 to 5) at the given parameters.
pub fn example_state(id: u8, params: &ExampleParams) -> Result<ComplexMatrix> {
    let family = match id {
        1 => StateFamily::Example1 { phi: params.phi },
        2 => StateFamily::Example2 { phi: params.phi },
        3 => StateFamily::Example3 {
            p: params.p,
            phi: params.phi,
        },
        4 => StateFamily::Example4 { p: params.p },
        5 => StateFamily::Example5 { p: params.p },
        other => return Err(Error::UnknownExample(other)),
    };
    make_state(&family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_valid(rho: &ComplexMatrix) {
        crate::metrology::validate_state(rho).unwrap();
    }

    #[test]
    fn ghz3_corners() {
        let g = make_state(&StateFamily::Ghz { n: 3 }).unwrap();
        let nonzero: Vec<_> = (0..8)
            .flat_map(|r| (0..8).map(move |c| (r, c)))
            .filter(|&(r, c)| g[(r, c)].norm() > 0.0)
            .collect();
        assert_eq!(nonzero, vec![(0, 0), (0, 7), (7, 0), (7, 7)]);
        for (r, c) in nonzero {
            assert!((g[(r, c)].re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn example4_at_zero_is_plus00() {
        let rho = make_state(&StateFamily::Example4 { p: 0.0 }).unwrap();
        for &(r, c) in &[(0, 0), (0, 4), (4, 0), (4, 4)] {
            assert!((rho[(r, c)].re - 0.5).abs() < 1e-15);
        }
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn example3_at_zero_is_maximally_mixed() {
        let rho = make_state(&StateFamily::Example3 { p: 0.0, phi: 0.4 }).unwrap();
        let mm = make_state(&StateFamily::MaximallyMixed { n: 3 }).unwrap();
        assert!(rho.max_abs_diff(&mm) < 1e-15);
    }

    #[test]
    fn all_families_are_states() {
        let families = [
            StateFamily::Ghz { n: 4 },
            StateFamily::Plus { n: 2 },
            StateFamily::Dicke { n: 3, k: 1 },
            StateFamily::Dicke { n: 4, k: 2 },
            StateFamily::Bell(BellState::PsiMinus),
            StateFamily::Phi,
            StateFamily::Basis { n: 3, index: 5 },
            StateFamily::Example1 { phi: 2.0 },
            StateFamily::Example2 { phi: 0.3 },
            StateFamily::Example3 { p: 0.6, phi: 1.0 },
            StateFamily::Example4 { p: 0.2 },
            StateFamily::Example5 { p: 0.9 },
            StateFamily::MixedGhz { n: 4, p: 0.5, phi: 0.2 },
        ];
        for s in &families {
            assert_valid(&make_state(s).unwrap());
        }
    }

    #[test]
    fn range_errors() {
        assert!(matches!(make_state(&StateFamily::Example4 { p: 1.5 }), Err(Error::ParamOutOfRange(_))));
        assert!(make_state(&StateFamily::Example3 { p: 0.5, phi: 2.0 }).is_err());
        assert!(make_state(&StateFamily::Example1 { phi: -0.1 }).is_err());
        assert!(make_state(&StateFamily::Ghz { n: 0 }).is_err());
        assert!(make_state(&StateFamily::Dicke { n: 2, k: 3 }).is_err());
        assert!(matches!(example_state(6, &ExampleParams::default()), Err(Error::UnknownExample(6))));
    }
}
