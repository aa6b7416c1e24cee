//! Figure parameter sets and the tables behind them.

use std::f64::consts::PI;

use coherence_orders::dephasing::{dephase, monte_carlo_dephase, MonteCarloConfig, NoiseModel};
use coherence_orders::metrology::{
    closed_form, example_state, make_state, qfi, witness, ExampleParams, PhaseEncoding, StateFamily,
};
use coherence_orders::ComplexMatrix;
use rayon::prelude::*;

use crate::args::{DephaseArgs, DephaseFigure, MetrologyFigure, StateArgs, TopologyArg};
use crate::output::{Cell, Table};
use crate::Result;

/// Flags implied by `--figure 3a|3b`.
pub fn dephase_preset(fig: DephaseFigure) -> DephaseArgs {
    let (topology, couplings, t_max) = match fig {
        DephaseFigure::Fig3a => (TopologyArg::Common, vec![1.0; 3], 0.5),
        DephaseFigure::Fig3b => (TopologyArg::Independent, vec![1.0, 0.8, 0.2], 1.0),
    };
    DephaseArgs {
        state: StateArgs {
            state: Some("plus".into()),
            n: Some(3),
            ..Default::default()
        },
        figure: Some(fig),
        topology: Some(topology),
        gamma: Some(10.0),
        damping: Some(100.0),
        omega0: Some(0.0),
        couplings: Some(couplings),
        t_max: Some(t_max),
        points: Some(100),
        ..Default::default()
    }
}

/// `points` evenly spaced values from `lo` to `hi`, both endpoints exact.
pub fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|k| {
                let s = k as f64 / (points - 1) as f64;
                lo * (1.0 - s) + hi * s
            })
            .collect(),
    }
}

/// `t`, the normalized order coherences `c0..cN` and, with Monte Carlo,
/// `c{m}_mc` and `c{m}_se` per order.
pub fn dephase_table(
    name: &str,
    rho: &ComplexMatrix,
    model: &NoiseModel,
    times: &[f64],
    mc: Option<&MonteCarloConfig>,
) -> Result<Table> {
    let n = model.n_qubits();
    let exact = dephase(rho, times, model)?;
    let sampled = mc.map(|cfg| monte_carlo_dephase(rho, times, model, cfg)).transpose()?;

    let mut columns = vec!["t".to_string()];
    columns.extend((0..=n).map(|m| format!("c{m}")));
    if sampled.is_some() {
        columns.extend((0..=n).map(|m| format!("c{m}_mc")));
        columns.extend((0..=n).map(|m| format!("c{m}_se")));
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(name, &cols);
    for (k, &t) in times.iter().enumerate() {
        let mut row = vec![Cell::Float(t)];
        row.extend(exact.normalized[k].iter().map(|&v| Cell::Float(v)));
        if let Some(s) = &sampled {
            row.extend(s.normalized[k].iter().map(|&v| Cell::Float(v)));
            let se = s.std_err.as_ref().expect("monte carlo reports errors");
            row.extend(se[k].iter().map(|&v| Cell::Float(v)));
        }
        table.push(row);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    P,
    Phi,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::P => "p",
            Axis::Phi => "phi",
        }
    }
}

/// A one-parameter sweep of an example family.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub name: String,
    pub example: u8,
    pub axis: Axis,
    /// Value of the parameter that is held fixed (`phi` for example 3).
    pub fixed: f64,
    pub points: usize,
    pub tau: f64,
}

impl Sweep {
    pub fn for_figure(fig: MetrologyFigure, phi: f64, points: usize, tau: f64) -> Self {
        let (name, example, axis) = match fig {
            MetrologyFigure::Fig4 => ("fig4", 3, Axis::P),
            MetrologyFigure::A1 => ("figA1", 1, Axis::Phi),
            MetrologyFigure::A2 => ("figA2", 2, Axis::Phi),
            MetrologyFigure::A4 => ("figA4", 4, Axis::P),
            MetrologyFigure::A5 => ("figA5", 5, Axis::P),
        };
        Self {
            name: name.into(),
            example,
            axis,
            fixed: phi,
            points,
            tau,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.axis {
            Axis::P => grid(0.0, 1.0, self.points),
            Axis::Phi => grid(0.0, PI, self.points),
        }
    }

    fn params(&self, x: f64) -> ExampleParams {
        let (p, phi) = match self.axis {
            Axis::P => (x, self.fixed),
            Axis::Phi => (1.0, x),
        };
        ExampleParams { p, phi, tau: self.tau }
    }
}

pub const SWEEP_COLUMNS: [&str; 8] = ["x", "f_q", "s_tau", "b_mmax", "f_i", "f_i_mmax", "f_q_class", "m_max"];

/// Evaluates the sweep in parallel; rows stay in grid order.
///
/// `b_mmax` and `f_i_mmax` use the family's top order even where that order
/// happens to vanish, so each column is one smooth curve. `m_max` is the
/// largest populated order at that point.
pub fn sweep_table(sweep: &Sweep) -> Result<Table> {
    let enc = PhaseEncoding::collective_z(3, sweep.tau);
    let f_q_class = qfi(&make_state(&StateFamily::Plus { n: 3 })?, &enc)?;
    let rows: Vec<Vec<Cell>> = sweep
        .values()
        .par_iter()
        .map(|&x| -> Result<Vec<Cell>> {
            let params = sweep.params(x);
            let rho = example_state(sweep.example, &params)?;
            let report = witness(&rho, &enc)?;
            let top = closed_form(sweep.example, &params)?.m_max;
            Ok(vec![
                Cell::Float(x),
                Cell::Float(report.f_q),
                Cell::Float(report.s_tau),
                Cell::Float(report.b_tau_m[top]),
                Cell::Float(report.f_i),
                Cell::Float((top * top) as f64 * report.i_m[top]),
                Cell::Float(f_q_class),
                Cell::Int(report.m_max as i64),
            ])
        })
        .collect::<Result<_>>()?;
    let mut columns = SWEEP_COLUMNS;
    columns[0] = sweep.axis.name();
    let mut table = Table::new(&sweep.name, &columns);
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// Panels regenerated by `reproduce-all`, in output order.
pub fn reproduction_sweeps() -> Vec<Sweep> {
    let tau = PI / 6.0;
    let mut out: Vec<Sweep> = [("fig4a", 0.0), ("fig4b", PI / 6.0), ("fig4c", PI / 4.0), ("fig4d", PI / 3.0)]
        .into_iter()
        .map(|(name, phi)| Sweep {
            name: name.into(),
            ..Sweep::for_figure(MetrologyFigure::Fig4, phi, 101, tau)
        })
        .collect();
    for fig in [MetrologyFigure::A1, MetrologyFigure::A2, MetrologyFigure::A4, MetrologyFigure::A5] {
        out.push(Sweep::for_figure(fig, 0.0, 101, tau));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = grid(0.0, 0.5, 100);
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[99], 0.5);
        assert_eq!(grid(0.0, 0.2, 4)[3], 0.2);
        assert_eq!(grid(0.0, PI, 7)[6], PI);
        assert_eq!(grid(2.0, 3.0, 1), vec![2.0]);
    }

    #[test]
    fn fig4a_matches_curve() {
        let sweep = Sweep::for_figure(MetrologyFigure::Fig4, 0.0, 21, PI / 6.0);
        let t = sweep_table(&sweep).unwrap();
        let p = t.column("p").unwrap();
        let fq = t.column("f_q").unwrap();
        for (p, f) in p.iter().zip(&fq) {
            let curve = 9.0 * p * p / (1.0 + 3.0 * p);
            assert!((f - curve).abs() <= 1e-9 * curve.max(1e-3), "p {p}: {f} vs {curve}");
        }
        assert!(t.column("f_q_class").unwrap().iter().all(|&v| (v - 0.75).abs() < 1e-12));
    }

    #[test]
    fn example_two_uses_order_two() {
        let sweep = Sweep::for_figure(MetrologyFigure::A2, 0.0, 5, PI / 6.0);
        let t = sweep_table(&sweep).unwrap();
        assert_eq!(t.columns[0], "phi");
        let m = t.column("m_max").unwrap();
        assert_eq!(m[0], 0.0);
        assert_eq!(m[1], 2.0);
    }

    #[test]
    fn panel_names_are_unique() {
        let names: Vec<String> = reproduction_sweeps().into_iter().map(|s| s.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        assert_eq!(names.len(), 8);
    }
}
