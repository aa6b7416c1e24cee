//! Cell-wise comparison of regenerated CSV tables against stored goldens.

use std::fs;
use std::path::Path;

use crate::output::parse_csv;
use crate::{CliError, Result};

/// Numeric cells may drift by this much relative to `max(1, |golden|)`.
pub const GOLDEN_TOL: f64 = 1e-9;

fn cells_match(golden: &str, fresh: &str) -> bool {
    if golden == fresh {
        return true;
    }
    match (golden.parse::<f64>(), fresh.parse::<f64>()) {
        (Ok(a), Ok(b)) if a.is_nan() && b.is_nan() => true,
        (Ok(a), Ok(b)) => (a - b).abs() <= GOLDEN_TOL * a.abs().max(1.0),
        _ => false,
    }
}

/// Differences between two CSV texts, one message per offending cell or line.
pub fn compare(name: &str, golden: &str, fresh: &str) -> Vec<String> {
    let g = parse_csv(golden);
    let f = parse_csv(fresh);
    let mut out = Vec::new();
    if g.header != f.header {
        let at = g.header.iter().zip(&f.header).position(|(a, b)| a != b).unwrap_or(g.header.len().min(f.header.len()));
        out.push(format!(
            "{name}: header line {} differs: golden `{}`, got `{}`",
            at + 1,
            g.header.get(at).map_or("", String::as_str),
            f.header.get(at).map_or("", String::as_str)
        ));
    }
    if g.columns != f.columns {
        out.push(format!("{name}: columns differ: golden {:?}, got {:?}", g.columns, f.columns));
        return out;
    }
    if g.rows.len() != f.rows.len() {
        out.push(format!("{name}: golden has {} rows, got {}", g.rows.len(), f.rows.len()));
    }
    for (r, (gr, fr)) in g.rows.iter().zip(&f.rows).enumerate() {
        for (c, col) in g.columns.iter().enumerate() {
            let (a, b) = (gr.get(c).map_or("", String::as_str), fr.get(c).map_or("", String::as_str));
            if !cells_match(a, b) {
                out.push(format!("{name}: row {} column {col}: golden {a}, got {b}", r + 1));
            }
        }
    }
    out
}

/// Compares `fresh` with `<dir>/<name>.csv`.
pub fn check(dir: &Path, name: &str, fresh: &str) -> Result<Vec<String>> {
    let path = dir.join(format!("{name}.csv"));
    match fs::read_to_string(&path) {
        Ok(golden) => Ok(compare(name, &golden, fresh)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(vec![format!("{name}: no golden at {}", path.display())]),
        Err(e) => Err(CliError::io(&path, e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "# v\nx,y\n1.0,2.0\n3.0,NaN\n";

    #[test]
    fn identical_and_tiny_drift_pass() {
        assert!(compare("t", BASE, BASE).is_empty());
        assert!(compare("t", BASE, "# v\nx,y\n1.0000000000001,2.0\n3.0,NaN\n").is_empty());
    }

    #[test]
    fn drift_names_the_cell() {
        let d = compare("t", BASE, "# v\nx,y\n1.0,2.1\n3.0,NaN\n");
        assert_eq!(d, vec!["t: row 1 column y: golden 2.0, got 2.1"]);
        let d = compare("t", BASE, "# w\nx,y\n1.0,2.0\n3.0,0.0\n");
        assert_eq!(d.len(), 2);
        assert!(d[0].contains("header line 1"));
    }

    #[test]
    fn shape_changes_are_reported() {
        assert_eq!(compare("t", BASE, "# v\nx,z\n1,2\n").len(), 1);
        assert!(compare("t", BASE, "# v\nx,y\n1.0,2.0\n")[0].contains("rows"));
    }
}
