//! Real-space observables assembled from mode trajectories: one-body
//! correlation field, connected `zz` correlations, local magnetization,
//! and the closed-form traveling-envelope guess field.
//!
//! All momentum sums are direct trigonometric sums in fixed grid order;
//! grids are desk-scale and determinism across worker counts matters more
//! than shaving the transforms. The `zz` kernel is factorized into two
//! `O(N_s)` sums per `(R, t)` instead of the naive double sum.

use crate::error::Error;
use crate::lattice::{bosonic_coeffs, Flavor, KGrid, ModelParams};
use crate::quench::Trajectory;
use crate::spectra::dispersion;
use crate::{Result, C64};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    OneBody,
    Zz,
    Guess,
}

/// Complex observable on a `(distance, time)` grid with parameter
/// provenance; the input shape for all light-cone analysis.
#[derive(Debug, Clone)]
pub struct CorrelationField {
    pub kind: FieldKind,
    pub flavor: Flavor,
    /// Site offsets, one inner vector per distance (length = lattice dimension).
    pub distances: Vec<Vec<i64>>,
    pub times: Vec<f64>,
    /// Distance-major `values[d * times.len() + t]`.
    pub values: Vec<C64>,
    pub provenance: Option<ModelParams>,
    /// Envelope width, present on guess fields.
    pub sigma: Option<f64>,
}

impl CorrelationField {
    pub fn value(&self, distance_idx: usize, time_idx: usize) -> C64 {
        self.values[distance_idx * self.times.len() + time_idx]
    }

    pub fn dimension(&self) -> usize {
        self.distances.first().map(|d| d.len()).unwrap_or(0)
    }

    /// The distance axis as scalars; `None` unless the field is 1D.
    pub fn scalar_distances(&self) -> Option<Vec<i64>> {
        if self.dimension() == 1 {
            Some(self.distances.iter().map(|d| d[0]).collect())
        } else {
            None
        }
    }
}

fn check_distance(grid: &KGrid, r: &[i64]) -> Result<()> {
    let half = (grid.n_sites() / 2) as i64;
    if r.len() != grid.dimension() {
        return Err(Error::DimensionMismatch { expected: grid.dimension(), got: r.len() });
    }
    if r.iter().any(|c| c.abs() > half) {
        return Err(Error::OffLattice(r.to_vec()));
    }
    Ok(())
}

fn norm_factor(grid: &KGrid) -> f64 {
    (grid.n_sites() as f64).powi(grid.dimension() as i32)
}

/// One-body density matrix `G_R(t) = N_s^-D sum_k cos(k.R) G_k(t)`.
pub fn one_body_correlation(traj: &Trajectory, distances: &[Vec<i64>]) -> Result<CorrelationField> {
    let grid = &traj.grid;
    for r in distances {
        check_distance(grid, r)?;
    }
    let nt = traj.times.len();
    let inv = 1.0 / norm_factor(grid);
    let values: Vec<C64> = distances
        .par_iter()
        .flat_map_iter(|r| {
            let kernel: Vec<f64> = grid
                .iter_points()
                .map(|k| k.iter().zip(r).map(|(kj, rj)| kj * *rj as f64).sum::<f64>().cos())
                .collect();
            (0..nt).map(move |t| {
                let mut acc = C64::new(0.0, 0.0);
                for (w, s) in kernel.iter().zip(&traj.states[t]) {
                    acc += *w * s.g;
                }
                inv * acc
            })
        })
        .collect();
    Ok(CorrelationField {
        kind: FieldKind::OneBody,
        flavor: traj.flavor,
        distances: distances.to_vec(),
        times: traj.times.clone(),
        values,
        provenance: None,
        sigma: None,
    })
}

/// Connected `zz` correlations, 1D only.
///
/// `C^zz_R(t) = N_s^-2 sum_{k,k'} e^{i(k-k')R} (F_k* F_k' + G_k (1 +/- G_k'))`
/// with `+` for bosons and `-` for fermions, evaluated through the
/// factorized sums `S_F = sum_k e^{-ikR} F_k` and `S_G = sum_k e^{+-ikR} G_k`.
pub fn zz_correlation(traj: &Trajectory, distances: &[i64]) -> Result<CorrelationField> {
    let grid = &traj.grid;
    if grid.dimension() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: grid.dimension() });
    }
    for &r in distances {
        check_distance(grid, &[r])?;
    }
    let n = grid.n_sites() as f64;
    let nt = traj.times.len();
    let sign = match traj.flavor {
        Flavor::Bosonic => 1.0,
        Flavor::Fermionic => -1.0,
    };
    let values: Vec<C64> = distances
        .par_iter()
        .flat_map_iter(|&r| {
            let phase: Vec<C64> = grid
                .iter_points()
                .map(|k| C64::from_polar(1.0, -k[0] * r as f64))
                .collect();
            let delta = if r == 0 { n } else { 0.0 };
            (0..nt).map(move |t| {
                let mut sf = C64::new(0.0, 0.0);
                let mut sg_minus = C64::new(0.0, 0.0);
                let mut sg_plus = C64::new(0.0, 0.0);
                for (p, s) in phase.iter().zip(&traj.states[t]) {
                    sf += p * s.f;
                    sg_minus += p * s.g;
                    sg_plus += p.conj() * s.g;
                }
                (sf.conj() * sf + sg_plus * (delta + sign * sg_minus)) / (n * n)
            })
        })
        .collect();
    Ok(CorrelationField {
        kind: FieldKind::Zz,
        flavor: traj.flavor,
        distances: distances.iter().map(|&r| vec![r]).collect(),
        times: traj.times.clone(),
        values,
        provenance: None,
        sigma: None,
    })
}

/// Local magnetization `<S^z>(t) = 1/2 - N_s^-D sum_k G_k(t)`; independent
/// of the site by translational invariance. Summation matches
/// [`one_body_correlation`] at `R = 0` bitwise.
pub fn magnetization(traj: &Trajectory) -> Vec<f64> {
    let inv = 1.0 / norm_factor(&traj.grid);
    traj.states
        .iter()
        .map(|snap| {
            let mut acc = C64::new(0.0, 0.0);
            for s in snap {
                acc += 1.0 * s.g;
            }
            0.5 - (inv * acc).re
        })
        .collect()
}

/// Three-Gaussian momentum envelope of the guess field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuessEnvelope {
    pub sigma: f64,
}

impl Default for GuessEnvelope {
    fn default() -> Self {
        GuessEnvelope { sigma: 1.0 }
    }
}

impl GuessEnvelope {
    pub fn weight(&self, k: f64) -> f64 {
        use std::f64::consts::PI;
        let s2 = 2.0 * self.sigma * self.sigma;
        (-(k - PI) * (k - PI) / s2).exp() + (-(k + PI) * (k + PI) / s2).exp() + (-k * k / s2).exp()
    }
}

/// Closed-form guess for the one-body field:
/// `G_R(t) = N_s^-1 sum_k W_k cos(kR) cos(2 Re X_k t) exp(2 Im X_k t)` with
/// `X_k = A_k` by default or the exact dispersion `E_k` when
/// `use_exact_dispersion` is set.
pub fn guess_correlation(
    params: &ModelParams,
    envelope: &GuessEnvelope,
    distances: &[i64],
    times: &[f64],
    use_exact_dispersion: bool,
) -> Result<CorrelationField> {
    if params.dimension != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: params.dimension });
    }
    if !(envelope.sigma > 0.0) {
        return Err(Error::Config(format!("guess envelope sigma must be > 0, got {}", envelope.sigma)));
    }
    let grid = KGrid::new(params)?;
    for &r in distances {
        check_distance(&grid, &[r])?;
    }
    let mode_data: Vec<(f64, f64, C64)> = grid
        .iter_points()
        .map(|k| {
            let c = bosonic_coeffs(params, k);
            let x = if use_exact_dispersion { dispersion(&c).0 } else { c.a };
            (k[0], envelope.weight(k[0]), x)
        })
        .collect();
    let n = grid.n_sites() as f64;
    let nt = times.len();
    let values: Vec<C64> = distances
        .par_iter()
        .flat_map_iter(|&r| {
            let mode_data = &mode_data;
            (0..nt).map(move |t_idx| {
                let t = times[t_idx];
                let mut acc = 0.0;
                for &(k, w, x) in mode_data {
                    acc += w * (k * r as f64).cos() * (2.0 * x.re * t).cos() * (2.0 * x.im * t).exp();
                }
                C64::new(acc / n, 0.0)
            })
        })
        .collect();
    Ok(CorrelationField {
        kind: FieldKind::Guess,
        flavor: Flavor::Bosonic,
        distances: distances.iter().map(|&r| vec![r]).collect(),
        times: times.to_vec(),
        values,
        provenance: Some(*params),
        sigma: Some(envelope.sigma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quench::{initial_conditions, integrate, QuenchSpec};

    fn params(j: f64, h: f64, gamma: f64, dimension: usize, n_sites: usize) -> ModelParams {
        ModelParams { j, h, gamma, gamma_prime: 0.0, dimension, n_sites }
    }

    fn short_run(flavor: Flavor, p: ModelParams, t_end: f64, steps: usize) -> Trajectory {
        let grid = KGrid::new(&p).unwrap();
        let init = initial_conditions(flavor, &p.hermitian(), &grid).unwrap();
        let spec = QuenchSpec::quench_to(p, t_end, steps, 1e-3);
        integrate(flavor, &spec, &grid, &init).unwrap()
    }

    #[test]
    fn one_body_initial_value_band() {
        // G_0(0) = mean_k sinh^2(alpha_k); small and positive
        let traj = short_run(Flavor::Bosonic, params(1.0, 5.0, 0.2, 1, 200), 0.5, 2);
        let field = one_body_correlation(&traj, &[vec![0]]).unwrap();
        let g0 = field.value(0, 0);
        assert!(g0.re > 0.5e-3 && g0.re < 1.5e-3, "{g0}");
        assert!(g0.im.abs() < 1e-15);
    }

    #[test]
    fn one_body_even_in_distance() {
        let traj = short_run(Flavor::Bosonic, params(1.0, 5.0, 0.2, 1, 32), 1.0, 10);
        let pos = one_body_correlation(&traj, &[vec![3]]).unwrap();
        let neg = one_body_correlation(&traj, &[vec![-3]]).unwrap();
        assert_eq!(pos.values, neg.values);
    }

    #[test]
    fn one_body_2d_quadrant_symmetry() {
        let traj = short_run(Flavor::Bosonic, params(1.0, 5.0, 0.2, 2, 8), 1.0, 5);
        let ds: Vec<Vec<i64>> = vec![vec![2, 1], vec![-2, -1], vec![2, -1], vec![-2, 1]];
        let f = one_body_correlation(&traj, &ds).unwrap();
        for t in 0..f.times.len() {
            let v = f.value(0, t);
            for d in 1..4 {
                assert!((f.value(d, t) - v).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn one_body_constant_without_quench() {
        let traj = short_run(Flavor::Bosonic, params(1.0, 5.0, 0.0, 1, 16), 5.0, 20);
        let f = one_body_correlation(&traj, &[vec![0], vec![2], vec![5]]).unwrap();
        for d in 0..3 {
            let v0 = f.value(d, 0);
            for t in 0..f.times.len() {
                assert!((f.value(d, t) - v0).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn off_lattice_distance_rejected() {
        let traj = short_run(Flavor::Bosonic, params(1.0, 5.0, 0.2, 1, 16), 0.5, 2);
        assert!(matches!(
            one_body_correlation(&traj, &[vec![9]]),
            Err(Error::OffLattice(_))
        ));
    }

    #[test]
    fn magnetization_matches_one_body_bitwise() {
        let traj = short_run(Flavor::Bosonic, params(1.0, 5.0, 0.2, 1, 64), 2.0, 20);
        let m = magnetization(&traj);
        let f = one_body_correlation(&traj, &[vec![0]]).unwrap();
        for (t, mt) in m.iter().enumerate() {
            assert_eq!(*mt, 0.5 - f.value(0, t).re);
        }
    }

    #[test]
    fn magnetization_initial_value() {
        let traj = short_run(Flavor::Bosonic, params(1.0, 5.0, 0.2, 1, 200), 0.5, 2);
        let m = magnetization(&traj);
        assert!((m[0] - 0.499).abs() < 1e-3, "{}", m[0]);
    }

    #[test]
    fn zz_diagonal_part_is_real() {
        for flavor in [Flavor::Bosonic, Flavor::Fermionic] {
            let traj = short_run(flavor, params(1.0, 5.0, 0.2, 1, 16), 1.0, 10);
            // R = 0: every phase is 1, the k = k' diagonal dominates reality
            let f = zz_correlation(&traj, &[0]).unwrap();
            for t in 0..f.times.len() {
                let v = f.value(0, t);
                assert!(v.im.abs() <= 1e-12 * (1.0 + v.re.abs()));
            }
        }
    }

    #[test]
    fn zz_matches_naive_double_sum() {
        for flavor in [Flavor::Bosonic, Flavor::Fermionic] {
            let traj = short_run(flavor, params(1.0, 5.0, 0.2, 1, 16), 1.0, 8);
            let rs: Vec<i64> = (0..8).collect();
            let f = zz_correlation(&traj, &rs).unwrap();
            let sign = match flavor {
                Flavor::Bosonic => 1.0,
                Flavor::Fermionic => -1.0,
            };
            let n = 16.0;
            let mut worst: f64 = 0.0;
            for (d, &r) in rs.iter().enumerate() {
                for (t, _) in traj.times.iter().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for (i, ki) in traj.grid.iter_points().enumerate() {
                        for (j, kj) in traj.grid.iter_points().enumerate() {
                            let si = traj.states[t][i];
                            let sj = traj.states[t][j];
                            let phase = C64::from_polar(1.0, (ki[0] - kj[0]) * r as f64);
                            acc += phase * (si.f.conj() * sj.f + si.g * (1.0 + sign * sj.g));
                        }
                    }
                    worst = worst.max((acc / (n * n) - f.value(d, t)).norm());
                }
            }
            assert!(worst <= 1e-12, "{flavor:?}: {worst}");
        }
    }

    #[test]
    fn zz_constant_without_quench() {
        let traj = short_run(Flavor::Fermionic, params(1.0, 5.0, 0.0, 1, 16), 3.0, 10);
        let f = zz_correlation(&traj, &[0, 1, 4]).unwrap();
        for d in 0..3 {
            let v0 = f.value(d, 0);
            for t in 0..f.times.len() {
                assert!((f.value(d, t) - v0).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn guess_field_basics() {
        let p = params(1.0, 5.0, 0.2, 1, 200);
        let env = GuessEnvelope::default();
        let times = [0.0, 1.0];
        let f = guess_correlation(&p, &env, &[0], &times, false).unwrap();
        // t = 0, R = 0: mean of the envelope, inside (0, 3)
        let v = f.value(0, 0).re;
        assert!(v > 0.0 && v < 3.0);
        // gamma = 0: no growth factor, |field| bounded by the t = 0, R = 0 value
        let p0 = params(1.0, 5.0, 0.0, 1, 200);
        let times: Vec<f64> = (0..40).map(|i| 0.25 * i as f64).collect();
        let f0 = guess_correlation(&p0, &env, &[0, 3, 7], &times, false).unwrap();
        let bound = guess_correlation(&p0, &env, &[0], &[0.0], false).unwrap().value(0, 0).re;
        for v in &f0.values {
            assert!(v.re.abs() <= bound + 1e-12);
        }
    }

    #[test]
    fn guess_rejects_bad_sigma() {
        let p = params(1.0, 5.0, 0.2, 1, 16);
        let env = GuessEnvelope { sigma: 0.0 };
        assert!(guess_correlation(&p, &env, &[0], &[0.0], false).is_err());
    }
}
