//! Analytic values for the five three-qubit example families.
//!
//! Two expressions differ from their commonly quoted forms and are given here
//! in the form that agrees with direct numerical evaluation:
//! the QFI of example 3 is `p^2 (9 + sin^2 phi) cos^2 phi / (1 + 3p)`
//! (see [`example3_printed_qfi`] for the other form), and its `B_{tau,3}`
//! carries a factor `p^2`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleParams {
    /// Mixing weight, examples 3 to 5.
    pub p: f64,
    /// Superposition angle, examples 1 to 3.
    pub phi: f64,
    /// Encoded phase.
    pub tau: f64,
}

impl Default for ExampleParams {
    fn default() -> Self {
        Self {
            p: 0.0,
            phi: 0.0,
            tau: PI / 6.0,
        }
    }
}

/// Analytic metrology values of one example at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub f_q: f64,
    pub s_tau: f64,
    /// `B_{tau,m}` at the family's top order `m_max`.
    pub b: f64,
    pub f_i: f64,
    /// `F_I^{m_max}`.
    pub f_i_mmax: f64,
    /// Top order of the family for generic parameters (3, or 2 for example 2).
    pub m_max: usize,
}

fn in_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if v >= lo && v <= hi {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange(format!("{name} = {v} outside [{lo}, {hi}]")))
    }
}

/// Evaluates the analytic expressions of example `id`.
pub fn closed_form(id: u8, params: &ExampleParams) -> Result<ClosedForm> {
    let ExampleParams { p, phi, tau } = *params;
    if !(1..=5).contains(&id) {
        return Err(Error::UnknownExample(id));
    }
    if tau == 0.0 {
        return Err(Error::ZeroTau);
    }
    let t2 = tau * tau;
    let half = (tau / 2.0).sin().powi(2);
    let three_half = (1.5 * tau).sin().powi(2);
    Ok(match id {
        1 => {
            in_range("phi", phi, 0.0, PI)?;
            let s2 = phi.sin().powi(2);
            let fq = (19.0 + (2.0 * phi).cos()) * s2 / 8.0;
            ClosedForm {
                f_q: fq,
                s_tau: (9.0 + 3.0 * (2.0 * phi).cos() + 8.0 * tau.cos() + 4.0 * s2 * (2.0 * tau).cos()) * s2 * half
                    / (2.0 * t2),
                b: s2 * s2 * three_half / t2,
                f_i: fq,
                f_i_mmax: 2.25 * s2 * s2,
                m_max: 3,
            }
        }
        2 => {
            in_range("phi", phi, 0.0, PI)?;
            let s = (2.0 * phi).sin().powi(2);
            let speed = s * tau.sin().powi(2) / t2;
            ClosedForm {
                f_q: s,
                s_tau: speed,
                b: speed,
                f_i: s,
                f_i_mmax: s,
                m_max: 2,
            }
        }
        3 => {
            in_range("p", p, 0.0, 1.0)?;
            in_range("phi", phi, 0.0, FRAC_PI_2)?;
            let c2 = phi.cos().powi(2);
            let p2 = p * p;
            ClosedForm {
                f_q: p2 * (9.0 + phi.sin().powi(2)) * c2 / (1.0 + 3.0 * p),
                s_tau: p2 * (9.0 - 3.0 * (2.0 * phi).cos() + 8.0 * tau.cos() + 4.0 * c2 * (2.0 * tau).cos()) * c2 * half
                    / (2.0 * t2),
                b: p2 * c2 * c2 * three_half / t2,
                f_i: (19.0 - (2.0 * phi).cos()) * p2 * c2 / 8.0,
                f_i_mmax: 2.25 * p2 * c2 * c2,
                m_max: 3,
            }
        }
        4 => {
            in_range("p", p, 0.0, 1.0)?;
            let p2 = p * p;
            ClosedForm {
                f_q: (3.0 + 8.0 * p * (1.0 + 2.0 * p)) / 12.0,
                s_tau: (1.0 - 2.0 * p + 4.0 * p2 + 2.0 * p2 * ((2.0 * tau).cos() + 2.0 * tau.cos())) * half / t2,
                b: p2 * three_half / t2,
                f_i: (1.0 + 2.0 * p * (5.0 * p - 1.0)) / 4.0,
                f_i_mmax: 2.25 * p2,
                m_max: 3,
            }
        }
        5 => {
            in_range("p", p, 0.0, 1.0)?;
            let p2 = p * p;
            let g = (1.0 + 3.0 * p).powi(2);
            ClosedForm {
                f_q: 0.75 * (1.0 + 2.0 * p),
                s_tau: (3.0 * (5.0 - 6.0 * p + 9.0 * p2) + 8.0 * (1.0 + 3.0 * p2) * tau.cos() + g * (2.0 * tau).cos())
                    * half
                    / (8.0 * t2),
                b: g * three_half / (16.0 * t2),
                f_i: 3.0 * (2.0 + p * (5.0 * p - 1.0)) / 8.0,
                f_i_mmax: 9.0 * g / 64.0,
                m_max: 3,
            }
        }
        _ => unreachable!(),
    })
}

/// The commonly quoted example 3 QFI, `p^2 (9 + cos^2 phi) cos^2 phi / (2 (1 + 3p))`.
///
/// Kept for comparison only: it disagrees with the numerically evaluated QFI
/// (at `phi = 0`, `p = 1` it gives 1.25 instead of 2.25).
pub fn example3_printed_qfi(p: f64, phi: f64) -> f64 {
    let c2 = phi.cos().powi(2);
    p * p * (9.0 + c2) * c2 / (2.0 * (1.0 + 3.0 * p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(p: f64, phi: f64) -> ExampleParams {
        ExampleParams {
            p,
            phi,
            ..Default::default()
        }
    }

    #[test]
    fn anchors() {
        assert!((closed_form(1, &at(0.0, FRAC_PI_2)).unwrap().f_q - 2.25).abs() < 1e-15);
        assert!((closed_form(5, &at(1.0, 0.0)).unwrap().f_q - 2.25).abs() < 1e-15);
        let ex2 = closed_form(2, &at(0.0, 0.0)).unwrap();
        for v in [ex2.f_q, ex2.s_tau, ex2.b, ex2.f_i, ex2.f_i_mmax] {
            assert_eq!(v, 0.0);
        }
        let ex3 = closed_form(3, &at(1.0, 0.0)).unwrap();
        assert!((ex3.f_q - 2.25).abs() < 1e-15);
        assert!((example3_printed_qfi(1.0, 0.0) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn example5_top_order_bound() {
        let cf = closed_form(5, &at(1.0, 0.0)).unwrap();
        let tau = PI / 6.0;
        assert!((cf.b - 16.0 * (1.5 * tau).sin().powi(2) / (16.0 * tau * tau)).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(closed_form(0, &at(0.0, 0.0)), Err(Error::UnknownExample(0))));
        assert!(matches!(closed_form(6, &at(0.0, 0.0)), Err(Error::UnknownExample(6))));
        assert!(matches!(
            closed_form(4, &ExampleParams { tau: 0.0, ..Default::default() }),
            Err(Error::ZeroTau)
        ));
        assert!(closed_form(3, &at(2.0, 0.0)).is_err());
        assert!(closed_form(3, &at(0.5, 2.0)).is_err());
    }
}
