//! Pre-quench initial conditions, fixed-step RK4 integration of the mode
//! equations of motion, and finite-time divergence detection.
//!
//! Each momentum mode carries the pair correlator `f = <a_k a_-k>` and the
//! occupation `g = <a+_k a_k>` (fermionic analogs likewise). Modes do not
//! couple, so the integrator advances them independently; the quench only
//! switches `gamma` on at `t = 0`.

use crate::error::Error;
use crate::lattice::{bosonic_coeffs, coeffs, CoeffPair, Flavor, KGrid, ModelParams};
use crate::{Result, C64};
use rayon::prelude::*;

/// Per-momentum state: anomalous correlator and occupation.
///
/// `g` is physically real; it is stored complex so the imaginary drift is
/// available as a free integration-error diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub f: C64,
    pub g: C64,
}

impl ModeState {
    fn axpy(self, h: f64, d: ModeState) -> ModeState {
        ModeState { f: self.f + h * d.f, g: self.g + h * d.g }
    }

    fn is_finite(self) -> bool {
        self.f.re.is_finite() && self.f.im.is_finite() && self.g.re.is_finite() && self.g.im.is_finite()
    }
}

/// Sudden-quench protocol: Hermitian pre-quench parameters, non-Hermitian
/// post-quench parameters, output sampling, and the integrator step.
#[derive(Debug, Clone)]
pub struct QuenchSpec {
    pub pre: ModelParams,
    pub post: ModelParams,
    pub t_start: f64,
    pub t_end: f64,
    /// Number of output intervals; the trajectory carries `steps + 1` samples.
    pub steps: usize,
    pub dt: f64,
    /// Occupation magnitude at which a mode is declared divergent.
    pub cap: f64,
    /// Integrate one representative per `{k, -k}` pair and mirror the partner.
    pub mirror_symmetry: bool,
}

impl QuenchSpec {
    /// Quench from the Hermitian ground state of `post` with `gamma = 0`.
    pub fn quench_to(post: ModelParams, t_end: f64, steps: usize, dt: f64) -> QuenchSpec {
        QuenchSpec {
            pre: post.hermitian(),
            post,
            t_start: 0.0,
            t_end,
            steps,
            dt,
            cap: 1e6,
            mirror_symmetry: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pre.validate()?;
        self.post.validate()?;
        let shared = self.pre.j == self.post.j
            && self.pre.h == self.post.h
            && self.pre.dimension == self.post.dimension
            && self.pre.n_sites == self.post.n_sites;
        if !shared {
            return Err(Error::QuenchSpec("pre and post must share J, h, dimension, n_sites".into()));
        }
        if self.pre.gamma != 0.0 {
            return Err(Error::QuenchSpec(format!(
                "the protocol quenches gamma only; pre.gamma must be 0, got {}",
                self.pre.gamma
            )));
        }
        if self.post.gamma_prime != 0.0 {
            return Err(Error::QuenchSpec(
                "gamma_prime is only consumed by the single-mode module".into(),
            ));
        }
        if !(self.t_end > self.t_start) {
            return Err(Error::QuenchSpec(format!("need t_end > t_start, got [{}, {}]", self.t_start, self.t_end)));
        }
        if self.steps == 0 {
            return Err(Error::QuenchSpec("steps must be >= 1".into()));
        }
        if !(self.dt > 0.0) {
            return Err(Error::QuenchSpec(format!("dt must be > 0, got {}", self.dt)));
        }
        let spacing = (self.t_end - self.t_start) / self.steps as f64;
        if self.dt > spacing * (1.0 + 1e-12) {
            return Err(Error::QuenchSpec(format!(
                "dt = {} exceeds the output spacing {spacing}",
                self.dt
            )));
        }
        Ok(())
    }

    /// `steps + 1` evenly spaced sample times, both endpoints included.
    pub fn sample_times(&self) -> Vec<f64> {
        let span = self.t_end - self.t_start;
        (0..=self.steps).map(|i| self.t_start + span * i as f64 / self.steps as f64).collect()
    }
}

/// Where and when a mode hit the occupation cap. The blow-up time is
/// bracketed within one internal step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceReport {
    pub mode_index: usize,
    pub t_lower: f64,
    pub t_upper: f64,
    pub cap: f64,
}

impl DivergenceReport {
    pub fn estimate(&self) -> f64 {
        0.5 * (self.t_lower + self.t_upper)
    }
}

/// Time grid plus per-sample mode states. If `divergence` is present the
/// samples stop at the last time every mode was still finite.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub flavor: Flavor,
    pub grid: KGrid,
    pub times: Vec<f64>,
    /// `states[t][mode]`, mode order matching the grid.
    pub states: Vec<Vec<ModeState>>,
    pub divergence: Option<DivergenceReport>,
}

impl Trajectory {
    pub fn n_modes(&self) -> usize {
        self.grid.len()
    }
}

/// Bogolyubov ground-state correlators of the Hermitian pre-quench theory.
///
/// Bosonic: `alpha_k = atanh(-B_k/A_k)/2`, `f = sinh cosh`, `g = sinh^2`;
/// rejected when `|B_k/A_k| >= 1` (gapless/unstable vacuum). Fermionic:
/// `theta_k = atan(i B_k / A_k)`, `f = -i sin(theta/2) cos(theta/2)`,
/// `g = sin^2(theta/2)`.
pub fn initial_conditions(flavor: Flavor, pre: &ModelParams, grid: &KGrid) -> Result<Vec<ModeState>> {
    if pre.gamma != 0.0 {
        return Err(Error::QuenchSpec(format!(
            "initial conditions are defined for the Hermitian theory; got gamma = {}",
            pre.gamma
        )));
    }
    (0..grid.len())
        .map(|i| {
            let k = grid.point(i);
            match flavor {
                Flavor::Bosonic => {
                    let c = bosonic_coeffs(pre, k);
                    let (a, b) = (c.a.re, c.b.re);
                    let ratio = b / a;
                    if !(ratio.abs() < 1.0) {
                        return Err(Error::UnstableVacuum { mode_index: i, ratio: ratio.abs() });
                    }
                    let alpha = 0.5 * (-ratio).atanh();
                    Ok(ModeState {
                        f: C64::new(alpha.sinh() * alpha.cosh(), 0.0),
                        g: C64::new(alpha.sinh() * alpha.sinh(), 0.0),
                    })
                }
                Flavor::Fermionic => {
                    let c = crate::lattice::fermionic_coeffs(pre, k[0])?;
                    // i*B_k/A_k is real for gamma = 0
                    let theta = ((C64::i() * c.b).re / c.a.re).atan();
                    if !theta.is_finite() {
                        return Err(Error::UnstableVacuum { mode_index: i, ratio: f64::INFINITY });
                    }
                    let half = 0.5 * theta;
                    Ok(ModeState {
                        f: C64::new(0.0, -half.sin() * half.cos()),
                        g: C64::new(half.sin() * half.sin(), 0.0),
                    })
                }
            }
        })
        .collect()
}

/// Right-hand side of the mode equations of motion.
///
/// Bosonic: `df = 4 Im(a) f g - 2i a f - i b (1 + 2g)`,
/// `dg = -2 b Im(f) + 2 Im(a) (|f|^2 + g + g^2)`.
/// Fermionic: `df = -8 Im(a) f g - 4i a f + 2i b (1 - 2g)`,
/// `dg = 4 Im(a) (|f|^2 + g - g^2) + 4i b Re(f)` (real since `b` is pure
/// imaginary).
pub fn eom_rhs(c: &CoeffPair, s: ModeState) -> ModeState {
    let ai = c.a.im;
    let f2 = C64::new(s.f.norm_sqr(), 0.0);
    match c.flavor {
        Flavor::Bosonic => ModeState {
            f: 4.0 * ai * s.f * s.g - C64::i() * (2.0 * c.a * s.f + c.b * (1.0 + 2.0 * s.g)),
            g: -2.0 * s.f.im * c.b + 2.0 * ai * (f2 + s.g + s.g * s.g),
        },
        Flavor::Fermionic => ModeState {
            f: -8.0 * ai * s.f * s.g + C64::i() * (2.0 * c.b * (1.0 - 2.0 * s.g) - 4.0 * c.a * s.f),
            g: 4.0 * ai * (f2 + s.g - s.g * s.g) + C64::i() * (4.0 * s.f.re) * c.b,
        },
    }
}

fn rk4_step(c: &CoeffPair, s: ModeState, h: f64) -> ModeState {
    let k1 = eom_rhs(c, s);
    let k2 = eom_rhs(c, s.axpy(0.5 * h, k1));
    let k3 = eom_rhs(c, s.axpy(0.5 * h, k2));
    let k4 = eom_rhs(c, s.axpy(h, k3));
    let sixth = h / 6.0;
    ModeState {
        f: s.f + sixth * (k1.f + 2.0 * (k2.f + k3.f) + k4.f),
        g: s.g + sixth * (k1.g + 2.0 * (k2.g + k3.g) + k4.g),
    }
}

/// Result of integrating a single mode over a sample grid.
#[derive(Debug, Clone)]
pub struct ModeRun {
    /// One state per sample time, truncated at divergence.
    pub samples: Vec<ModeState>,
    /// `(t_lower, t_upper)` bracket of the blow-up, one internal step wide.
    pub divergence: Option<(f64, f64)>,
}

/// Advance one mode through `times` with fixed-step RK4; each interval is
/// split into `ceil(interval/dt)` equal substeps so samples land exactly on
/// the requested times. A step that pushes `|g|` past `cap` is rejected and
/// the run reports the bracket instead.
pub fn integrate_mode(
    c: &CoeffPair,
    s0: ModeState,
    times: &[f64],
    dt: f64,
    cap: f64,
) -> Result<ModeRun> {
    let mut samples = Vec::with_capacity(times.len());
    samples.push(s0);
    let mut s = s0;
    for w in times.windows(2) {
        let span = w[1] - w[0];
        let n_sub = (span / dt).ceil().max(1.0) as usize;
        let h = span / n_sub as f64;
        for sub in 0..n_sub {
            let t = w[0] + h * sub as f64;
            let next = rk4_step(c, s, h);
            if !next.is_finite() {
                return Err(Error::NonFinite { mode_index: 0, t: t + h });
            }
            if next.g.norm() > cap {
                return Ok(ModeRun { samples, divergence: Some((t, t + h)) });
            }
            s = next;
        }
        samples.push(s);
    }
    Ok(ModeRun { samples, divergence: None })
}

fn mirror_state(flavor: Flavor, s: ModeState) -> ModeState {
    match flavor {
        // f(-k) = f(k) for bosons (even b), f(-k) = -f(k) for fermions (odd b)
        Flavor::Bosonic => s,
        Flavor::Fermionic => ModeState { f: -s.f, g: s.g },
    }
}

/// Integrate every mode of the grid and gather the trajectory in grid order.
///
/// With `mirror_symmetry` one representative per `{k, -k}` pair is
/// integrated and the partner mirrored; reductions stay in fixed grid order
/// so the output is independent of the worker count.
pub fn integrate(
    flavor: Flavor,
    spec: &QuenchSpec,
    grid: &KGrid,
    init: &[ModeState],
) -> Result<Trajectory> {
    spec.validate()?;
    if init.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: init.len() });
    }
    let times = spec.sample_times();
    let reps: Vec<usize> = (0..grid.len())
        .filter(|&i| !spec.mirror_symmetry || i <= grid.neg_index(i))
        .collect();
    let runs: Vec<Result<ModeRun>> = reps
        .par_iter()
        .map(|&i| {
            let c = coeffs(flavor, &spec.post, grid.point(i))?;
            integrate_mode(&c, init[i], &times, spec.dt, spec.cap).map_err(|e| match e {
                Error::NonFinite { t, .. } => Error::NonFinite { mode_index: i, t },
                other => other,
            })
        })
        .collect();
    let mut mode_runs = Vec::with_capacity(reps.len());
    for run in runs {
        mode_runs.push(run?);
    }

    let n_samples = mode_runs.iter().map(|r| r.samples.len()).min().unwrap_or(0);
    let divergence = reps
        .iter()
        .zip(&mode_runs)
        .filter_map(|(&i, r)| r.divergence.map(|(lo, hi)| (lo, hi, i)))
        .min_by(|a, b| (a.0, a.2).partial_cmp(&(b.0, b.2)).expect("finite brackets"))
        .map(|(lo, hi, i)| DivergenceReport { mode_index: i, t_lower: lo, t_upper: hi, cap: spec.cap });

    let mut states = vec![vec![ModeState { f: C64::new(0.0, 0.0), g: C64::new(0.0, 0.0) }; grid.len()]; n_samples];
    for (&i, run) in reps.iter().zip(&mode_runs) {
        let m = grid.neg_index(i);
        for (t_idx, s) in run.samples.iter().take(n_samples).enumerate() {
            states[t_idx][i] = *s;
            if m != i {
                states[t_idx][m] = mirror_state(flavor, *s);
            }
        }
    }
    Ok(Trajectory { flavor, grid: grid.clone(), times: times[..n_samples].to_vec(), states, divergence })
}

/// Exact single-site occupation of the down state under the `J = 0`
/// non-Hermitian evolution: `|beta|^2 / (|beta|^2 + |alpha|^2 e^(-2 gamma t))`.
pub fn single_site_exact(gamma: f64, alpha: C64, beta: C64, t: f64) -> Result<f64> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(norm));
    }
    let b2 = beta.norm_sqr();
    Ok(b2 / (b2 + alpha.norm_sqr() * (-2.0 * gamma * t).exp()))
}
