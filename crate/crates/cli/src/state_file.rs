//! Plain-text density matrices: one row per line, entries such as `0.5`,
//! `0.25-0.1j` or `1e-3j`, separated by whitespace or commas. Lines starting
//! with `#` are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use coherence_orders::metrology::validate_state;
use coherence_orders::ComplexMatrix;
use num_complex::Complex64;

use crate::output::format_float;
use crate::{CliError, Result};

/// Parses one entry. Returns a message on failure.
pub fn parse_entry(tok: &str) -> std::result::Result<Complex64, String> {
    let bad = || format!("cannot parse `{tok}` as a complex number");
    let Some(body) = tok.strip_suffix(['j', 'i', 'J', 'I']) else {
        return tok.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split before the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (body[..i].parse::<f64>().map_err(|_| bad())?, &body[i..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// Parses matrix text without checking that it is a state.
pub fn parse_matrix(path: &Path, text: &str) -> Result<ComplexMatrix> {
    let err = |line: usize, col: usize, msg: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        col,
        msg,
    };
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        let mut start = None;
        for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
            let sep = ch.is_whitespace() || ch == ',';
            match (sep, start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    row.push(parse_entry(&line[s..i]).map_err(|m| err(ln + 1, s + 1, m))?);
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(err(
                    ln + 1,
                    1,
                    format!("row has {} entries, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(err(1, 1, "no matrix rows".into()));
    }
    if rows.len() != rows[0].len() {
        return Err(err(1, 1, format!("matrix is {}x{}, expected square", rows.len(), rows[0].len())));
    }
    Ok(ComplexMatrix::from_rows(&rows))
}

/// Parses and validates a density matrix.
pub fn parse_state(path: &Path, text: &str) -> Result<ComplexMatrix> {
    let rho = parse_matrix(path, text)?;
    validate_state(&rho).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    Ok(rho)
}

pub fn read_state(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_state(path, &text)
}

/// Inverse of [`parse_matrix`], exact to the last bit.
pub fn format_matrix(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let cells: Vec<String> = m
            .row(r)
            .iter()
            .map(|z| {
                let im = format_float(z.im);
                let sign = if im.starts_with('-') { "" } else { "+" };
                format!("{}{sign}{im}j", format_float(z.re))
            })
            .collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use coherence_orders::metrology::{make_state, StateFamily};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn entries() {
        assert_eq!(parse_entry("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_entry("0.5+0.25j").unwrap(), c(0.5, 0.25));
        assert_eq!(parse_entry("-1e-3-2E+1j").unwrap(), c(-1e-3, -20.0));
        assert_eq!(parse_entry("-0.5j").unwrap(), c(0.0, -0.5));
        assert_eq!(parse_entry("j").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_entry("1-j").unwrap(), c(1.0, -1.0));
        assert!(parse_entry("1+2").is_err());
        assert!(parse_entry("abc").is_err());
    }

    #[test]
    fn reports_line_and_column() {
        let err = parse_matrix(Path::new("r.txt"), "# rho\n0.5 0\n0, 0.5x\n").unwrap_err();
        match err {
            CliError::Parse { line, col, .. } => assert_eq!((line, col), (3, 4)),
            other => panic!("{other:?}"),
        }
        assert!(parse_matrix(Path::new("r.txt"), "1 0\n0\n").is_err());
        assert!(parse_matrix(Path::new("r.txt"), "1 0\n").is_err());
    }

    #[test]
    fn rejects_non_states() {
        let err = parse_state(Path::new("r.txt"), "1 0\n0 1\n").unwrap_err();
        assert!(matches!(err, CliError::Input { .. }));
        assert!(parse_state(Path::new("r.txt"), "0.5 0.5j\n0.5j 0.5\n").is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let rho = make_state(&StateFamily::Example3 { p: 0.3, phi: 0.7 }).unwrap();
        let back = parse_state(Path::new("r.txt"), &format_matrix(&rho)).unwrap();
        assert_eq!(back, rho);
    }
}
