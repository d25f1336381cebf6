//! Truncated-Fock exact diagonalization of the `k = 0` mode, squeezed-vacuum
//! analytics, the divergence-time predictor, and the nonlinearity-onset
//! estimator.
//!
//! The single-mode Hamiltonian is `(A/2)(a+ a + a a+) + (B/2)(a+ a+ + a a)`
//! with `A = h + J/2 + i*gamma`, `B = J/2`, optionally extended by the
//! quartic non-Hermitian term `-(i*gamma'/2) (a+ a)^2`. Number terms sit on
//! the diagonal, pair terms two off the diagonal, so evolution from an even
//! state stays in the even sector.

use crate::error::Error;
use crate::lattice::ModelParams;
use crate::{Result, C64};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::SQRT_2;

/// Complex amplitudes over the number states `|0>..|N_max>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub amplitudes: Vec<C64>,
}

impl FockVector {
    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> FockVector {
        let n = self.norm();
        FockVector { amplitudes: self.amplitudes.iter().map(|a| a / n).collect() }
    }

    /// Overlap `<self|other|`, conjugating `self`.
    pub fn overlap(&self, other: &FockVector) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Squeezing magnitude and phase of a single-mode squeezed vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    pub r: f64,
    pub phi: f64,
}

/// Dense single-mode Hamiltonian on the truncated Fock basis.
pub fn single_mode_hamiltonian(params: &ModelParams, n_max: usize) -> Result<DMatrix<C64>> {
    if n_max < 4 {
        return Err(Error::TruncationTooSmall(n_max));
    }
    let a = C64::new(params.h + 0.5 * params.j, params.gamma);
    let b = 0.5 * params.j;
    let dim = n_max + 1;
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for n in 0..dim {
        let nf = n as f64;
        m[(n, n)] = 0.5 * a * (2.0 * nf + 1.0) - C64::i() * 0.5 * params.gamma_prime * nf * nf;
        if n + 2 < dim {
            let pair = 0.5 * b * ((nf + 1.0) * (nf + 2.0)).sqrt();
            m[(n + 2, n)] = C64::new(pair, 0.0);
            m[(n, n + 2)] = C64::new(pair, 0.0);
        }
    }
    Ok(m)
}

/// Closed-form squeezed-vacuum expansion on the truncated basis (not
/// normalized to account for truncation; normalize before comparing).
pub fn smsv_amplitudes(squeeze: &SqueezeParams, n_max: usize) -> FockVector {
    let mut amplitudes = vec![C64::new(0.0, 0.0); n_max + 1];
    let prefactor = 1.0 / squeeze.r.cosh().sqrt();
    let base = -C64::from_polar(squeeze.r.tanh(), squeeze.phi);
    let mut coeff = C64::new(prefactor, 0.0);
    amplitudes[0] = coeff;
    let mut n = 1usize;
    while 2 * n <= n_max {
        // sqrt((2n)!)/(2^n n!) obeys c_n = c_{n-1} * sqrt((2n-1) 2n) / (2n)
        let nf = n as f64;
        coeff *= base * ((2.0 * nf - 1.0) * 2.0 * nf).sqrt() / (2.0 * nf);
        amplitudes[2 * n] = coeff;
        n += 1;
    }
    FockVector { amplitudes }
}

/// Ground state of the Hermitian (`gamma = gamma' = 0`) single-mode
/// Hamiltonian, phase-fixed so the vacuum amplitude is real positive, plus
/// the squeezing parameters read off the `|2>/|0>` amplitude ratio
/// (`ratio = -e^{i phi} tanh(r) / sqrt(2)`).
pub fn ground_state_hermitian(params: &ModelParams, n_max: usize) -> Result<(FockVector, SqueezeParams)> {
    if params.gamma != 0.0 || params.gamma_prime != 0.0 {
        return Err(Error::QuenchSpec(format!(
            "ground state is defined for the Hermitian Hamiltonian; got gamma = {}, gamma_prime = {}",
            params.gamma, params.gamma_prime
        )));
    }
    let a = params.h + 0.5 * params.j;
    let b = 0.5 * params.j;
    if !(b.abs() / a.abs() < 1.0) {
        return Err(Error::UnstableVacuum { mode_index: 0, ratio: (b / a).abs() });
    }
    let hc = single_mode_hamiltonian(params, n_max)?;
    let hr = DMatrix::from_fn(n_max + 1, n_max + 1, |i, j| hc[(i, j)].re);
    let decomposition = hr.try_symmetric_eigen(1e-13, 10_000).ok_or(Error::EigensolveFailed)?;
    let lowest = decomposition
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.partial_cmp(y.1).expect("finite eigenvalues"))
        .ok_or(Error::EigensolveFailed)?
        .0;
    let col = decomposition.eigenvectors.column(lowest);
    let sign = if col[0] < 0.0 { -1.0 } else { 1.0 };
    let amplitudes: Vec<C64> = col.iter().map(|v| C64::new(sign * v, 0.0)).collect();
    if amplitudes[0].re <= 0.0 {
        return Err(Error::EigensolveFailed);
    }
    let ratio = amplitudes[2].re / amplitudes[0].re;
    let scaled = -SQRT_2 * ratio;
    let (r, phi) = if scaled >= 0.0 { (scaled.atanh(), 0.0) } else { ((-scaled).atanh(), std::f64::consts::PI) };
    Ok((FockVector { amplitudes }, SqueezeParams { r, phi }))
}


/// Correlator series from exact-diagonalization evolution: state advanced by
/// dense matrix exponentials per sample interval and renormalized at every
/// sample.
#[derive(Debug, Clone)]
pub struct EdSeries {
    pub times: Vec<f64>,
    /// `<n>` per sample.
    pub occupation: Vec<f64>,
    /// `<a a>` per sample.
    pub pair: Vec<C64>,
    /// `<n^2>` per sample.
    pub occupation_sq: Vec<f64>,
    /// Cumulative `ln ||psi~||` of the unnormalized evolution.
    pub log_norm: Vec<f64>,
}

fn measure(psi: &DVector<C64>) -> (f64, C64, f64) {
    let mut occ = 0.0;
    let mut occ2 = 0.0;
    let mut pair = C64::new(0.0, 0.0);
    for (n, amp) in psi.iter().enumerate() {
        let p = amp.norm_sqr();
        occ += n as f64 * p;
        occ2 += (n * n) as f64 * p;
        if n + 2 < psi.len() {
            pair += amp.conj() * (((n + 1) * (n + 2)) as f64).sqrt() * psi[n + 2];
        }
    }
    (occ, pair, occ2)
}

pub fn evolve_ed(h: &DMatrix<C64>, psi0: &FockVector, times: &[f64]) -> Result<EdSeries> {
    if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::QuenchSpec("ED times must be ascending from 0".into()));
    }
    let mut psi = DVector::from_vec(psi0.amplitudes.clone());
    let mut log_norm_acc = 0.0;
    let mut out = EdSeries {
        times: times.to_vec(),
        occupation: Vec::with_capacity(times.len()),
        pair: Vec::with_capacity(times.len()),
        occupation_sq: Vec::with_capacity(times.len()),
        log_norm: Vec::with_capacity(times.len()),
    };
    let mut prev = 0.0;
    for &t in times {
        let span = t - prev;
        if span > 0.0 {
            let propagator = (h * (-C64::i() * span)).exp();
            psi = &propagator * psi;
            let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-300 {
                return Err(Error::NormUnderflow(norm));
            }
            psi /= C64::new(norm, 0.0);
            log_norm_acc += norm.ln();
        }
        prev = t;
        let (occ, pair, occ2) = measure(&psi);
        out.occupation.push(occ);
        out.pair.push(pair);
        out.occupation_sq.push(occ2);
        out.log_norm.push(log_norm_acc);
    }
    Ok(out)
}

/// Divergence time of the squeezed-vacuum norm series,
/// `t_f = ln(1/tanh r)/gamma`; infinite when `r = 0`.
pub fn divergence_time(squeeze: &SqueezeParams, gamma: f64) -> Result<f64> {
    if gamma <= 0.0 {
        return Err(Error::NonPositiveGamma(gamma));
    }
    if squeeze.r == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((1.0 / squeeze.r.tanh()).ln() / gamma)
}

/// Outcome of the nonlinearity-onset search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Onset {
    At(f64),
    NotReached,
}

/// First time along the linear (`gamma' = 0`) ED trajectory at which
/// `gamma <n> <= gamma' <n^2>`, located by bisection between samples.
pub fn nonlinearity_onset(
    h_linear: &DMatrix<C64>,
    psi0: &FockVector,
    gamma: f64,
    gamma_prime: f64,
    t_max: f64,
    samples: usize,
) -> Result<Onset> {
    if gamma_prime <= 0.0 {
        return Err(Error::NonPositiveGammaPrime(gamma_prime));
    }
    let psi0_vec = DVector::from_vec(psi0.amplitudes.clone());
    // the normalized state at time t does not depend on intermediate
    // renormalizations, so each probe can propagate from t = 0 directly
    let margin = |t: f64| -> Result<f64> {
        let psi = if t > 0.0 { (h_linear * (-C64::i() * t)).exp() * &psi0_vec } else { psi0_vec.clone() };
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::NormUnderflow(norm));
        }
        let psi = psi / C64::new(norm, 0.0);
        let (occ, _, occ2) = measure(&psi);
        Ok(gamma * occ - gamma_prime * occ2)
    };
    let mut prev_t = 0.0;
    let mut prev_margin = margin(0.0)?;
    if prev_margin <= 0.0 {
        return Ok(Onset::At(0.0));
    }
    let mut bracket = None;
    for i in 1..=samples {
        let t = t_max * i as f64 / samples as f64;
        let m = margin(t)?;
        if m <= 0.0 {
            bracket = Some((prev_t, t));
            break;
        }
        prev_t = t;
        prev_margin = m;
    }
    let _ = prev_margin;
    let Some((mut lo, mut hi)) = bracket else {
        return Ok(Onset::NotReached);
    };
    for _ in 0..60 {
        if hi - lo < 1e-9 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if margin(mid)? <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Onset::At(0.5 * (lo + hi)))
}
