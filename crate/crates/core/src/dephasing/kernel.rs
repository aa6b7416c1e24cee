use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Stationary autocorrelation `K(s - s')` of a zero-mean Gaussian field.
#[derive(Clone)]
pub enum Kernel {
    /// `K(u) = (damping / 2) exp(-gamma |u|)`; `gamma` is the inverse
    /// correlation time (1/s), `damping` the rate Gamma ((rad/s)^2).
    ///
    /// This normalization gives `beta(t) = Gamma (gamma t + e^{-gamma t} - 1) / (2 gamma^2)`.
    OrnsteinUhlenbeck { gamma: f64, damping: f64 },
    /// Any even kernel, evaluated for `u >= 0`.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Kernel {
    pub fn ornstein_uhlenbeck(gamma: f64, damping: f64) -> Result<Self> {
        let k = Kernel::OrnsteinUhlenbeck { gamma, damping };
        k.validate()?;
        Ok(k)
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Kernel::Custom(Arc::new(f))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::OrnsteinUhlenbeck { gamma, damping } => {
                if !(gamma.is_finite() && gamma > 0.0) {
                    return Err(Error::InvalidModel(format!("gamma must be > 0, got {gamma}")));
                }
                if !(damping.is_finite() && damping >= 0.0) {
                    return Err(Error::InvalidModel(format!("Gamma must be >= 0, got {damping}")));
                }
                Ok(())
            }
            Kernel::Custom(_) => Ok(()),
        }
    }

    /// `K(u)`.
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Kernel::OrnsteinUhlenbeck { gamma, damping } => 0.5 * damping * (-gamma * u.abs()).exp(),
            Kernel::Custom(f) => f(u.abs()),
        }
    }

    /// `beta(t) = 1/2 int_0^t int_0^t K(s - s') ds ds'`.
    ///
    /// Closed form for the Ornstein-Uhlenbeck kernel. Other kernels use the
    /// exact reduction of the square integral to `int_0^t (t - u) K(u) du`
    /// (valid for even kernels), integrated by adaptive Simpson quadrature to
    /// a relative tolerance of 1e-8.
    pub fn beta(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        Ok(match *self {
            Kernel::OrnsteinUhlenbeck { gamma, damping } => {
                let x = gamma * t;
                // gamma t + e^{-gamma t} - 1, with a series near zero to avoid cancellation
                let bracket = if x < 1e-3 {
                    x * x / 2.0 - x * x * x / 6.0 + x.powi(4) / 24.0 - x.powi(5) / 120.0
                } else {
                    x + (-x).exp_m1()
                };
                damping / (2.0 * gamma * gamma) * bracket
            }
            Kernel::Custom(_) => {
                let f = |u: f64| (t - u) * self.eval(u);
                adaptive_simpson(&f, 0.0, t, 1e-8)
            }
        })
    }
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::OrnsteinUhlenbeck { gamma, damping } => f
                .debug_struct("OrnsteinUhlenbeck")
                .field("gamma", gamma)
                .field("damping", damping)
                .finish(),
            Kernel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    const PANELS: usize = 64;
    let h = (b - a) / PANELS as f64;
    let panels: Vec<(f64, f64, f64, f64, f64, f64)> = (0..PANELS)
        .map(|k| {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == PANELS { b } else { lo + h };
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            (lo, hi, fa, fm, fb, (hi - lo) / 6.0 * (fa + 4.0 * fm + fb))
        })
        .collect();
    let scale: f64 = panels.iter().map(|p| p.5.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let tol = 0.1 * rel_tol * scale / PANELS as f64;
    panels
        .iter()
        .map(|&(lo, hi, fa, fm, fb, whole)| simpson_step(f, lo, hi, fa, fm, fb, whole, tol, 40))
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_at_zero() {
        let k = Kernel::ornstein_uhlenbeck(10.0, 100.0).unwrap();
        assert_eq!(k.beta(0.0).unwrap(), 0.0);
    }

    #[test]
    fn beta_fig3_parameters() {
        let k = Kernel::ornstein_uhlenbeck(10.0, 100.0).unwrap();
        let expected = 0.5 * (1.0 + (-1.0f64).exp() - 1.0);
        assert!((k.beta(0.1).unwrap() - expected).abs() < 1e-15);
        assert!((k.beta(0.1).unwrap() - 0.1839397).abs() < 1e-7);
    }

    #[test]
    fn beta_long_time_asymptote() {
        let (gamma, damping) = (10.0, 100.0);
        let k = Kernel::ornstein_uhlenbeck(gamma, damping).unwrap();
        let t = 10.0 / gamma;
        let asymptote = damping * t / (2.0 * gamma);
        assert!((k.beta(t).unwrap() - asymptote).abs() / asymptote < 0.1);
        let t = 1000.0 / gamma;
        let asymptote = damping * t / (2.0 * gamma);
        assert!((k.beta(t).unwrap() - asymptote).abs() / asymptote < 0.01);
    }

    #[test]
    fn beta_small_time_series_is_continuous() {
        let k = Kernel::ornstein_uhlenbeck(1.0, 2.0).unwrap();
        let below = k.beta(0.999e-3).unwrap();
        let above = k.beta(1.001e-3).unwrap();
        let exact = |x: f64| x + (-x).exp() - 1.0;
        assert!((below - exact(0.999e-3)).abs() / below < 1e-9);
        assert!(above > below);
        // short-time limit: beta ~ K(0) t^2 / 2
        let t: f64 = 1e-6;
        assert!((k.beta(t).unwrap() - 1.0 * t * t / 2.0).abs() / (t * t) < 1e-5);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let (gamma, damping) = (10.0, 100.0);
        let custom = Kernel::custom(move |u| 0.5 * damping * (-gamma * u).exp());
        let ou = Kernel::ornstein_uhlenbeck(gamma, damping).unwrap();
        for &t in &[0.01, 0.1, 0.37, 1.0, 3.0] {
            let a = custom.beta(t).unwrap();
            let b = ou.beta(t).unwrap();
            assert!((a - b).abs() <= 1e-8 * b, "t = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn white_noise_like_constant_kernel() {
        // K = c constant: beta = c t^2 / 2
        let k = Kernel::custom(|_| 3.0);
        assert!((k.beta(2.0).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let k = Kernel::ornstein_uhlenbeck(10.0, 100.0).unwrap();
        assert!(matches!(k.beta(-1.0), Err(Error::NegativeTime(_))));
        assert!(Kernel::ornstein_uhlenbeck(0.0, 1.0).is_err());
        assert!(Kernel::ornstein_uhlenbeck(1.0, -1.0).is_err());
        assert!(Kernel::ornstein_uhlenbeck(1.0, 0.0).is_ok());
    }
}
