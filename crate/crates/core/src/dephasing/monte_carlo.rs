//! Trajectory sampling of the dephasing channel.
//!
//! Each trajectory draws stationary Ornstein-Uhlenbeck fields with the exact
//! AR(1) update and integrates them with the trapezoid rule. A trajectory
//! multiplies the element `|r><c|` by `exp(-i sum_l s_l phi_l(t))` with
//! `s_l = b_l(c) - b_l(r)`, so it is enough to track the `3^N` sign patterns
//! `s` instead of full matrices.
//!
//! Trajectory `j` uses ChaCha stream `j` of the given seed and trajectories
//! are summed in fixed blocks combined by a pairwise tree, so output is
//! bit-identical for any thread count.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{check_grid, normalize, DephasingResult, Kernel, NoiseModel, Topology};
use crate::coherence::c_l1_from_expansion;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::operator_basis::{expand, Letter};

const BLOCK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloConfig {
    pub n_traj: usize,
    pub seed: u64,
    /// Largest integration step (s); report intervals are split evenly below it.
    pub max_step: f64,
}

impl MonteCarloConfig {
    pub fn new(n_traj: usize, seed: u64) -> Self {
        Self {
            n_traj,
            seed,
            max_step: 1e-3,
        }
    }
}

/// Integration schedule: substep count and size for each report interval.
struct Schedule {
    intervals: Vec<(usize, f64)>,
}

impl Schedule {
    fn new(times: &[f64], max_step: f64) -> Result<Self> {
        if !(max_step.is_finite() && max_step > 0.0) {
            return Err(Error::ParamOutOfRange(format!("max_step must be > 0, got {max_step}")));
        }
        let mut prev = 0.0;
        let mut intervals = Vec::with_capacity(times.len());
        for &t in times {
            if t < prev {
                return Err(Error::ParamOutOfRange("time grid must be non-decreasing".into()));
            }
            let span = t - prev;
            let steps = (span / max_step).ceil() as usize;
            let dt = if steps == 0 { 0.0 } else { span / steps as f64 };
            intervals.push((steps, dt));
            prev = t;
        }
        Ok(Self { intervals })
    }
}

#[derive(Clone, Copy)]
struct OuParams {
    gamma: f64,
    sigma: f64,
}

fn ou_params(kernel: &Kernel) -> Result<OuParams> {
    match *kernel {
        Kernel::OrnsteinUhlenbeck { gamma, damping } => Ok(OuParams {
            gamma,
            sigma: (0.5 * damping).sqrt(),
        }),
        Kernel::Custom(_) => Err(Error::InvalidModel(
            "trajectory sampling supports Ornstein-Uhlenbeck kernels only".into(),
        )),
    }
}

/// Fills `out[k * baths.len() + b]` with `int_0^{t_k} B_b(s) ds`.
fn sample_integrals<R: Rng>(baths: &[OuParams], schedule: &Schedule, rng: &mut R, out: &mut [f64]) {
    let nb = baths.len();
    let mut field: Vec<f64> = baths
        .iter()
        .map(|p| p.sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut integral = vec![0.0; nb];
    let mut cached_dt = f64::NAN;
    let mut decay = vec![0.0; nb];
    let mut kick = vec![0.0; nb];
    for (k, &(steps, dt)) in schedule.intervals.iter().enumerate() {
        if dt != cached_dt {
            for (b, p) in baths.iter().enumerate() {
                decay[b] = (-p.gamma * dt).exp();
                kick[b] = p.sigma * (-(-2.0 * p.gamma * dt).exp_m1()).sqrt();
            }
            cached_dt = dt;
        }
        for _ in 0..steps {
            for b in 0..nb {
                let xi: f64 = rng.sample(StandardNormal);
                let next = field[b] * decay[b] + kick[b] * xi;
                integral[b] += 0.5 * dt * (field[b] + next);
                field[b] = next;
            }
        }
        out[k * nb..(k + 1) * nb].copy_from_slice(&integral);
    }
}

/// Integrated stationary Ornstein-Uhlenbeck path `int_0^t B(s) ds` at each of
/// `times`, sampled with the same discretization as [`monte_carlo_dephase`].
pub fn ou_integrals<R: Rng>(gamma: f64, damping: f64, times: &[f64], max_step: f64, rng: &mut R) -> Result<Vec<f64>> {
    let params = ou_params(&Kernel::ornstein_uhlenbeck(gamma, damping)?)?;
    check_grid(times)?;
    let schedule = Schedule::new(times, max_step)?;
    let mut out = vec![0.0; times.len()];
    sample_integrals(&[params], &schedule, rng, &mut out);
    Ok(out)
}

fn trajectory_rng(seed: u64, j: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(j as u64);
    rng
}

/// Shared per-run data.
struct Setup {
    n: usize,
    n_patterns: usize,
    baths: Vec<OuParams>,
    bath_of: Vec<usize>,
    couplings: Vec<f64>,
    omega0: f64,
    times: Vec<f64>,
    schedule: Schedule,
}

impl Setup {
    /// `xi[k * P + pattern]` for one trajectory.
    fn trajectory(&self, seed: u64, j: usize, integrals: &mut [f64], xi: &mut Vec<Complex64>) {
        let mut rng = trajectory_rng(seed, j);
        sample_integrals(&self.baths, &self.schedule, &mut rng, integrals);
        let nb = self.baths.len();
        xi.clear();
        let mut layer = Vec::with_capacity(self.n_patterns);
        let mut next = Vec::with_capacity(self.n_patterns);
        for (k, &t) in self.times.iter().enumerate() {
            layer.clear();
            layer.push(Complex64::new(1.0, 0.0));
            for l in 0..self.n {
                let phi = self.omega0 * t + self.couplings[l] * integrals[k * nb + self.bath_of[l]];
                let e = Complex64::from_polar(1.0, -phi);
                let factors = [e.conj(), Complex64::new(1.0, 0.0), e];
                next.clear();
                for v in &layer {
                    for f in &factors {
                        next.push(v * f);
                    }
                }
                std::mem::swap(&mut layer, &mut next);
            }
            xi.extend_from_slice(&layer);
        }
    }
}

fn tree_reduce<T: Send>(mut items: Vec<T>, combine: impl Fn(T, T) -> T + Sync) -> Option<T> {
    while items.len() > 1 {
        let mut merged = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => merged.push(combine(a, b)),
                None => merged.push(a),
            }
        }
        items = merged;
    }
    items.pop()
}

fn blocks(n_traj: usize) -> Vec<std::ops::Range<usize>> {
    (0..n_traj.div_ceil(BLOCK))
        .map(|b| b * BLOCK..((b + 1) * BLOCK).min(n_traj))
        .collect()
}

/// Pattern index of the sign vector `s_l = b_l(c) - b_l(r)`, qubit 1 most significant.
fn element_pattern(r: usize, c: usize, n: usize) -> usize {
    (0..n).fold(0, |acc, l| {
        let bit = n - 1 - l;
        let s = (c >> bit & 1) as isize - (r >> bit & 1) as isize;
        acc * 3 + (s + 1) as usize
    })
}

fn label_pattern(letters: &[Letter]) -> usize {
    letters.iter().fold(0, |acc, &letter| {
        let s = match letter {
            Letter::Raise => 1,
            Letter::Lower => -1,
            Letter::Identity | Letter::Z => 0,
        };
        acc * 3 + (s + 1) as usize
    })
}

/// Running `(count, mean, M2)` per cell, merged with the parallel variance update.
struct Moments {
    count: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn merge(a: Moments, b: Moments) -> Moments {
        let count = a.count + b.count;
        let mut mean = a.mean;
        let mut m2 = a.m2;
        for i in 0..mean.len() {
            let delta = b.mean[i] - mean[i];
            mean[i] += delta * b.count / count;
            m2[i] += b.m2[i] + delta * delta * a.count * b.count / count;
        }
        Moments { count, mean, m2 }
    }
}

/// Trajectory average of the dephasing channel over `t_grid`.
///
/// `std_err` holds the standard error of each normalized order, estimated by
/// linearizing `C_m` around the trajectory mean. With a single trajectory it
/// is NaN.
pub fn monte_carlo_dephase(
    rho: &ComplexMatrix,
    t_grid: &[f64],
    model: &NoiseModel,
    config: &MonteCarloConfig,
) -> Result<DephasingResult> {
    check_grid(t_grid)?;
    if config.n_traj == 0 {
        return Err(Error::ParamOutOfRange("n_traj must be >= 1".into()));
    }
    let n = model.check_register(rho)?;
    let baths: Vec<OuParams> = model.kernels().iter().map(ou_params).collect::<Result<_>>()?;
    let bath_of: Vec<usize> = match model.topology {
        Topology::Common => vec![0; n],
        Topology::Independent => (0..n).collect(),
    };
    let setup = Setup {
        n,
        n_patterns: 3usize.pow(n as u32),
        baths,
        bath_of,
        couplings: model.couplings.clone(),
        omega0: model.omega0,
        times: t_grid.to_vec(),
        schedule: Schedule::new(t_grid, config.max_step)?,
    };
    let n_times = t_grid.len();
    let np = setup.n_patterns;
    let cells = n_times * np;
    let nb = setup.baths.len();
    let ranges = blocks(config.n_traj);

    let partial: Vec<Vec<Complex64>> = ranges
        .par_iter()
        .map(|range| {
            let mut integrals = vec![0.0; n_times * nb];
            let mut xi = Vec::with_capacity(cells);
            let mut acc = vec![Complex64::new(0.0, 0.0); cells];
            for j in range.clone() {
                setup.trajectory(config.seed, j, &mut integrals, &mut xi);
                acc.iter_mut().zip(&xi).for_each(|(a, x)| *a += x);
            }
            acc
        })
        .collect();
    let total = tree_reduce(partial, |mut a, b| {
        a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
        a
    })
    .expect("at least one block");
    let inv_n = 1.0 / config.n_traj as f64;
    let mean_xi: Vec<Complex64> = total.iter().map(|z| z * inv_n).collect();

    let dim = 1usize << n;
    let patterns: Vec<usize> = (0..dim * dim).map(|i| element_pattern(i / dim, i % dim, n)).collect();
    let states: Vec<ComplexMatrix> = (0..n_times)
        .map(|k| rho.map_indexed(|r, c, v| v * mean_xi[k * np + patterns[r * dim + c]]))
        .collect();

    let expansion = expand(rho)?;
    let initial_l1 = c_l1_from_expansion(&expansion);
    // weights[m][pattern]: summed |a| / 2 of the labels of order |m| sharing the pattern
    let mut weights = vec![vec![0.0; np]; n + 1];
    for (label, a) in expansion.iter() {
        if label.has_ladder() {
            weights[label.order().unsigned_abs() as usize][label_pattern(label.letters())] += 0.5 * a.norm();
        }
    }
    let direction: Vec<Complex64> = mean_xi
        .iter()
        .map(|z| {
            let r = z.norm();
            if r > 0.0 {
                z.conj() / r
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();

    let orders = n + 1;
    let moments: Vec<Moments> = ranges
        .par_iter()
        .map(|range| {
            let mut integrals = vec![0.0; n_times * nb];
            let mut xi = Vec::with_capacity(cells);
            let mut ys = Vec::with_capacity(range.len() * n_times * orders);
            for j in range.clone() {
                setup.trajectory(config.seed, j, &mut integrals, &mut xi);
                for k in 0..n_times {
                    for w in &weights {
                        let y: f64 = (0..np)
                            .filter(|&p| w[p] != 0.0)
                            .map(|p| w[p] * (direction[k * np + p] * xi[k * np + p]).re)
                            .sum();
                        ys.push(y);
                    }
                }
            }
            let width = n_times * orders;
            let count = range.len() as f64;
            let mut mean = vec![0.0; width];
            for row in ys.chunks(width) {
                mean.iter_mut().zip(row).for_each(|(m, y)| *m += y);
            }
            mean.iter_mut().for_each(|m| *m /= count);
            let mut m2 = vec![0.0; width];
            for row in ys.chunks(width) {
                for i in 0..width {
                    m2[i] += (row[i] - mean[i]).powi(2);
                }
            }
            Moments { count, mean, m2 }
        })
        .collect();
    let moments = tree_reduce(moments, Moments::merge).expect("at least one block");

    let std_err: Vec<Vec<f64>> = (0..n_times)
        .map(|k| {
            let se: Vec<f64> = (0..orders)
                .map(|m| {
                    if config.n_traj < 2 {
                        return f64::NAN;
                    }
                    let var = moments.m2[k * orders + m] / (moments.count - 1.0);
                    (var.max(0.0) / moments.count).sqrt()
                })
                .collect();
            normalize(&se, &initial_l1)
        })
        .collect();

    DephasingResult::from_states(t_grid.to_vec(), states, &initial_l1, Some(std_err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dephasing::dephase;

    fn plus_state(n: usize) -> ComplexMatrix {
        let dim = 1 << n;
        ComplexMatrix::from_vec(dim, dim, vec![Complex64::new(1.0 / dim as f64, 0.0); dim * dim])
    }

    #[test]
    fn patterns_agree_between_labels_and_elements() {
        // "+-" sits at |01><10|
        let n = 2;
        assert_eq!(element_pattern(0b01, 0b10, n), label_pattern(&[Letter::Raise, Letter::Lower]));
        assert_eq!(element_pattern(0b00, 0b00, n), 4);
    }

    #[test]
    fn tree_reduce_is_order_preserving() {
        let out = tree_reduce((0..7).map(|i| vec![i]).collect(), |mut a, b| {
            a.extend(b);
            a
        });
        assert_eq!(out.unwrap(), (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn zero_damping_is_exact_larmor_rotation() {
        let model = NoiseModel::common_ou(2, 3.0, 10.0, 0.0, 1.0).unwrap();
        let rho = plus_state(2);
        let times = [0.0, 0.1, 0.25];
        let mc = monte_carlo_dephase(&rho, &times, &model, &MonteCarloConfig::new(3, 1)).unwrap();
        let exact = dephase(&rho, &times, &model).unwrap();
        for (a, b) in mc.states.iter().zip(&exact.states) {
            assert!(a.max_abs_diff(b) < 1e-14);
        }
        for row in mc.std_err.as_ref().unwrap() {
            assert!(row.iter().all(|&s| s.is_nan() || s < 1e-12));
        }
    }

    #[test]
    fn schedule_splits_intervals() {
        let s = Schedule::new(&[0.0, 0.0105, 0.02], 1e-3).unwrap();
        assert_eq!(s.intervals[0].0, 0);
        assert_eq!(s.intervals[1].0, 11);
        assert_eq!(s.intervals[2].0, 10);
        assert!(Schedule::new(&[0.2, 0.1], 1e-3).is_err());
    }

    #[test]
    fn custom_kernel_rejected() {
        let model = NoiseModel::common(0.0, Kernel::custom(|_| 1.0), vec![1.0]).unwrap();
        let r = monte_carlo_dephase(&plus_state(1), &[0.1], &model, &MonteCarloConfig::new(4, 0));
        assert!(matches!(r, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn empty_grid_and_zero_trajectories() {
        let model = NoiseModel::common_ou(1, 0.0, 10.0, 100.0, 1.0).unwrap();
        let rho = plus_state(1);
        assert!(matches!(
            monte_carlo_dephase(&rho, &[], &model, &MonteCarloConfig::new(4, 0)),
            Err(Error::EmptyGrid)
        ));
        assert!(monte_carlo_dephase(&rho, &[0.1], &model, &MonteCarloConfig::new(0, 0)).is_err());
    }

    #[test]
    fn same_seed_same_bits() {
        let model = NoiseModel::independent_ou(0.0, 10.0, 100.0, vec![1.0, 0.8, 0.2]).unwrap();
        let cfg = MonteCarloConfig::new(200, 42);
        let a = monte_carlo_dephase(&plus_state(3), &[0.05, 0.1], &model, &cfg).unwrap();
        let b = monte_carlo_dephase(&plus_state(3), &[0.05, 0.1], &model, &cfg).unwrap();
        assert_eq!(a.states, b.states);
        assert_eq!(
            format!("{:?}", a.std_err),
            format!("{:?}", b.std_err)
        );
    }
}
