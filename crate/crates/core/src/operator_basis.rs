//! The NMR product-operator basis `{I_0, I_+, I_-, I_z}^{(x)N}`.
//!
//! Qubit 1 is the leftmost tensor factor and the most significant bit of a
//! computational-basis index. With `I_0 = 1/2`, `I_+ = |0><1|`, `I_- = |1><0|`
//! and `I_z = diag(1/2, -1/2)`, every basis operator is real, has exactly one
//! non-zero entry per row, and the coherence order `n_+ - n_-` of a label is
//! the phase winding of its entries under a collective z rotation.
//!
//! Coefficients are taken against the dual basis,
//! `a_label = Tr(B_label^dagger rho) / nu(label)` with `nu = prod_l nu_l`,
//! `nu_l = 1/2` for `0`/`z` and `1` for `+`/`-`, which makes
//! [`reconstruct`] an exact inverse of [`expand`].
//!
//! | N  | labels (4^N) | coefficient memory |
//! |----|--------------|--------------------|
//! | 4  | 256          | 4 KiB              |
//! | 6  | 4096         | 64 KiB             |
//! | 8  | 65536        | 1 MiB              |
//! | 10 | 1048576      | 16 MiB             |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix};
use crate::tolerances::MAX_QUBITS;

/// One tensor factor of a product operator. Declaration order is the
/// lexicographic order used for label iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Identity,
    Raise,
    Lower,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::Identity, Letter::Raise, Letter::Lower, Letter::Z];

    /// Contribution to the coherence order.
    pub fn order(self) -> i32 {
        match self {
            Letter::Raise => 1,
            Letter::Lower => -1,
            _ => 0,
        }
    }

    pub fn is_ladder(self) -> bool {
        matches!(self, Letter::Raise | Letter::Lower)
    }

    /// Exchanges `+` and `-`.
    pub fn swapped(self) -> Letter {
        match self {
            Letter::Raise => Letter::Lower,
            Letter::Lower => Letter::Raise,
            other => other,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Letter::Identity => '0',
            Letter::Raise => '+',
            Letter::Lower => '-',
            Letter::Z => 'z',
        }
    }

    pub fn from_symbol(ch: char) -> Option<Letter> {
        match ch {
            '0' => Some(Letter::Identity),
            '+' => Some(Letter::Raise),
            '-' | '\u{2212}' => Some(Letter::Lower),
            'z' | 'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    /// The 2x2 single-qubit operator.
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Letter::Identity => ComplexMatrix::from_real_diag(&[0.5, 0.5]),
            Letter::Raise => ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
            Letter::Lower => ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]),
            Letter::Z => ComplexMatrix::from_real_diag(&[0.5, -0.5]),
        }
    }

    /// Dual-basis normalization `Tr(I^dagger I)`.
    pub fn norm(self) -> f64 {
        if self.is_ladder() {
            1.0
        } else {
            0.5
        }
    }
}

/// A word over `{0, +, -, z}`, one letter per qubit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OperatorLabel(Vec<Letter>);

impl OperatorLabel {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    /// Number of occurrences of `letter`.
    pub fn count(&self, letter: Letter) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    /// Coherence order `n_+ - n_-`.
    pub fn order(&self) -> i32 {
        self.0.iter().map(|l| l.order()).sum()
    }

    /// True if at least one factor is `I_+` or `I_-`.
    pub fn has_ladder(&self) -> bool {
        self.0.iter().any(|l| l.is_ladder())
    }

    /// Label with every `+` and `-` exchanged (the adjoint operator).
    pub fn swapped(&self) -> Self {
        Self(self.0.iter().map(|l| l.swapped()).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|l| l.norm()).product()
    }

    /// Base-4 rank in lexicographic order (qubit 1 most significant).
    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &l| acc * 4 + l as usize)
    }

    pub fn from_index(index: usize, n_qubits: usize) -> Self {
        let letters = (0..n_qubits)
            .map(|l| Letter::ALL[(index >> (2 * (n_qubits - 1 - l))) & 3])
            .collect();
        Self(letters)
    }

    /// All `4^N` labels in lexicographic order.
    pub fn all(n_qubits: usize) -> impl Iterator<Item = OperatorLabel> {
        (0..1usize << (2 * n_qubits)).map(move |k| Self::from_index(k, n_qubits))
    }
}

impl fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for OperatorLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|ch| {
                Letter::from_symbol(ch)
                    .ok_or_else(|| Error::ParamOutOfRange(format!("invalid operator letter {ch:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::ParamOutOfRange("empty operator label".into()));
        }
        Ok(Self(letters))
    }
}

/// Coefficients `a_label` of a matrix in the product-operator basis.
///
/// Only labels with a coefficient that is not exactly zero are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductOperatorExpansion {
    pub n_qubits: usize,
    pub coefficients: BTreeMap<OperatorLabel, Complex64>,
}

impl ProductOperatorExpansion {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            coefficients: BTreeMap::new(),
        }
    }

    /// Coefficient of `label`, zero when absent.
    pub fn get(&self, label: &OperatorLabel) -> Complex64 {
        self.coefficients.get(label).copied().unwrap_or_default()
    }

    pub fn insert(&mut self, label: OperatorLabel, value: Complex64) {
        assert_eq!(label.n_qubits(), self.n_qubits, "label length mismatch");
        if value != Complex64::new(0.0, 0.0) {
            self.coefficients.insert(label, value);
        } else {
            self.coefficients.remove(&label);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OperatorLabel, &Complex64)> {
        self.coefficients.iter()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Number of qubits for a `2^N x 2^N` matrix.
pub fn qubit_count(m: &ComplexMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let dim = m.rows();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::DimensionNotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    Ok(n)
}

/// Kronecker product of the per-site generators, qubit 1 leftmost.
pub fn build_operator(label: &OperatorLabel) -> ComplexMatrix {
    label
        .letters()
        .iter()
        .fold(ComplexMatrix::identity(1), |acc, l| kron(&acc, &l.matrix()))
}

/// Visits the non-zero entries `(row, col, value)` of a basis operator.
fn for_each_entry(label: &OperatorLabel, mut visit: impl FnMut(usize, usize, f64)) {
    let n = label.n_qubits();
    let mut base_row = 0usize;
    let mut base_col = 0usize;
    let mut free = Vec::new();
    for (l, &letter) in label.letters().iter().enumerate() {
        let bit = 1usize << (n - 1 - l);
        match letter {
            Letter::Raise => base_col |= bit,
            Letter::Lower => base_row |= bit,
            Letter::Identity | Letter::Z => free.push((bit, letter == Letter::Z)),
        }
    }
    let scale = 0.5f64.powi(free.len() as i32);
    for assignment in 0..1usize << free.len() {
        let mut row = base_row;
        let mut col = base_col;
        let mut sign = 1.0;
        for (k, &(bit, is_z)) in free.iter().enumerate() {
            if assignment >> k & 1 == 1 {
                row |= bit;
                col |= bit;
                if is_z {
                    sign = -sign;
                }
            }
        }
        visit(row, col, sign * scale);
    }
}

/// Dual-basis coefficient of a single label.
pub fn coefficient(rho: &ComplexMatrix, label: &OperatorLabel) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for_each_entry(label, |r, c, v| acc += rho[(r, c)] * v);
    acc / label.norm()
}

/// Expands `rho` in the product-operator basis.
pub fn expand(rho: &ComplexMatrix) -> Result<ProductOperatorExpansion> {
    let n = qubit_count(rho)?;
    let coefficients: Vec<(usize, Complex64)> = (0..1usize << (2 * n))
        .into_par_iter()
        .map(|k| (k, coefficient(rho, &OperatorLabel::from_index(k, n))))
        .collect();
    let mut out = ProductOperatorExpansion::new(n);
    for (k, a) in coefficients {
        out.insert(OperatorLabel::from_index(k, n), a);
    }
    Ok(out)
}

/// `sum_label a_label * build_operator(label)`.
pub fn reconstruct(exp: &ProductOperatorExpansion) -> ComplexMatrix {
    let dim = 1usize << exp.n_qubits;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (label, &a) in exp.iter() {
        for_each_entry(label, |r, c, v| out[(r, c)] += a * v);
    }
    out
}

/// Coherence order of the matrix element `|row><col|`: `popcount(col) - popcount(row)`.
pub fn element_order(row: usize, col: usize, n_qubits: usize) -> i32 {
    debug_assert!(row < 1 << n_qubits && col < 1 << n_qubits);
    col.count_ones() as i32 - row.count_ones() as i32
}

/// Closed-form number of matrix positions carrying order `m != 0`,
/// `(2N)! / ((N - m)! (N + m)!)`.
pub fn count_order_elements(n_qubits: usize, m: i64) -> Result<u64> {
    if m == 0 || m.unsigned_abs() as usize > n_qubits {
        return Err(Error::OrderOutOfRange { m, n_qubits });
    }
    Ok(binomial(2 * n_qubits as u64, n_qubits as u64 + m.unsigned_abs()))
}

/// `C(n, k)` evaluated with exact intermediate divisions.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn label(s: &str) -> OperatorLabel {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_generators() {
        let ip = Letter::Raise.matrix();
        let im = Letter::Lower.matrix();
        assert_eq!(ip.dagger(), im);
        assert_eq!(Letter::Z.matrix().trace(), c(0.0, 0.0));
        let prod = &ip * &im;
        assert_eq!(prod, ComplexMatrix::from_real_diag(&[1.0, 0.0]));
    }

    #[test]
    fn label_bookkeeping() {
        let l = label("+-z0+");
        assert_eq!(l.n_qubits(), 5);
        assert_eq!(l.order(), 1);
        assert_eq!(
            l.count(Letter::Identity) + l.count(Letter::Raise) + l.count(Letter::Lower) + l.count(Letter::Z),
            5
        );
        assert_eq!(l.swapped().to_string(), "-+z0-");
        assert_eq!(OperatorLabel::from_index(l.index(), 5), l);
        assert!("+x".parse::<OperatorLabel>().is_err());
        assert!("".parse::<OperatorLabel>().is_err());
    }

    #[test]
    fn labels_iterate_lexicographically() {
        let all: Vec<String> = OperatorLabel::all(2).map(|l| l.to_string()).collect();
        assert_eq!(all.len(), 16);
        assert_eq!(&all[..5], &["00", "0+", "0-", "0z", "+0"]);
        assert_eq!(all[15], "zz");
        let mut sorted = all.clone();
        sorted.sort_by_key(|s| s.parse::<OperatorLabel>().unwrap());
        assert_eq!(sorted, all);
    }

    #[test]
    fn build_operator_examples() {
        assert_eq!(build_operator(&label("z")), ComplexMatrix::from_real_diag(&[0.5, -0.5]));
        let pp = build_operator(&label("++"));
        assert_eq!(pp[(0, 3)], c(1.0, 0.0));
        assert_eq!(pp.as_slice().iter().filter(|z| z.norm() > 0.0).count(), 1);
        let mid = build_operator(&label("0z0"));
        let diag: Vec<f64> = mid.diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![0.125, 0.125, -0.125, -0.125, 0.125, 0.125, -0.125, -0.125]);
        assert_eq!(mid.max_abs_diff(&ComplexMatrix::from_real_diag(&diag)), 0.0);
    }

    #[test]
    fn sparse_entries_match_kronecker() {
        for l in OperatorLabel::all(3) {
            let dense = build_operator(&l);
            let mut sparse = ComplexMatrix::zeros(8, 8);
            for_each_entry(&l, |r, col, v| sparse[(r, col)] += c(v, 0.0));
            assert_eq!(dense, sparse, "label {l}");
        }
    }

    #[test]
    fn expand_examples() {
        let mixed = ComplexMatrix::from_real_diag(&[0.5, 0.5]);
        let e = expand(&mixed).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.get(&label("0")), c(1.0, 0.0));

        let plus = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let e = expand(&plus).unwrap();
        assert_eq!(e.get(&label("0")), c(1.0, 0.0));
        assert_eq!(e.get(&label("+")), c(0.5, 0.0));
        assert_eq!(e.get(&label("-")), c(0.5, 0.0));
        assert_eq!(e.get(&label("z")), c(0.0, 0.0));
    }

    #[test]
    fn ghz_expansion() {
        let mut ghz = ComplexMatrix::zeros(8, 8);
        for &(r, col) in &[(0, 0), (0, 7), (7, 0), (7, 7)] {
            ghz[(r, col)] = c(0.5, 0.0);
        }
        let e = expand(&ghz).unwrap();
        // identity coefficient carries the unit trace: Tr(rho) = a_000 * Tr(1/8 * 1)
        assert_eq!(e.get(&label("000")), c(1.0, 0.0));
        assert_eq!(e.get(&label("+++")), c(0.5, 0.0));
        assert_eq!(e.get(&label("---")), c(0.5, 0.0));
        let high: Vec<_> = e.iter().filter(|(l, _)| l.order().abs() == 3).collect();
        assert_eq!(high.len(), 2);
        // everything else lives in the populations sector {0, z}^3
        assert!(e
            .iter()
            .filter(|(l, _)| l.order().abs() != 3)
            .all(|(l, _)| !l.has_ladder()));
        assert!(reconstruct(&e).max_abs_diff(&ghz) < 1e-15);
    }

    #[test]
    fn reconstruct_examples() {
        let mut e = ProductOperatorExpansion::new(1);
        e.insert(label("0"), c(1.0, 0.0));
        assert_eq!(reconstruct(&e), ComplexMatrix::from_real_diag(&[0.5, 0.5]));
        let mut e = ProductOperatorExpansion::new(1);
        e.insert(label("+"), c(1.0, 0.0));
        assert_eq!(reconstruct(&e), ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]));
    }

    #[test]
    fn expand_rejects_bad_dimensions() {
        assert!(matches!(
            expand(&ComplexMatrix::identity(3)),
            Err(Error::DimensionNotPowerOfTwo(3))
        ));
        assert!(matches!(expand(&ComplexMatrix::zeros(2, 4)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn element_order_examples() {
        assert_eq!(element_order(0, 1, 1), 1);
        assert_eq!(element_order(1, 0, 1), -1);
        assert_eq!(element_order(0, 7, 3), 3);
        for k in 0..8 {
            assert_eq!(element_order(k, k, 3), 0);
        }
    }

    #[test]
    fn order_grid_matches_printed_three_qubit_pattern() {
        // row 0 and last row of the N = 3 grid
        let first: Vec<i32> = (0..8).map(|col| element_order(0, col, 3)).collect();
        assert_eq!(first, vec![0, 1, 1, 2, 1, 2, 2, 3]);
        let last: Vec<i32> = (0..8).map(|col| element_order(7, col, 3)).collect();
        assert_eq!(last, vec![-3, -2, -2, -1, -2, -1, -1, 0]);
    }

    #[test]
    fn count_order_elements_examples() {
        assert_eq!(count_order_elements(1, 1).unwrap(), 1);
        assert_eq!(count_order_elements(3, 2).unwrap(), 6);
        assert_eq!(count_order_elements(2, 1).unwrap(), 4);
        assert_eq!(count_order_elements(2, -1).unwrap(), 4);
        assert!(matches!(
            count_order_elements(3, 0),
            Err(Error::OrderOutOfRange { .. })
        ));
        assert!(matches!(
            count_order_elements(3, 4),
            Err(Error::OrderOutOfRange { .. })
        ));
    }
}
