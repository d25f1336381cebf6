//! Stationary solutions of the mode equations at negative dissipation:
//! the occupations solve a real quartic per momentum, obtained by setting
//! both mode derivatives to zero and eliminating the pair correlator.
//!
//! Quartics are solved through companion-matrix eigenvalues with one
//! Newton polish on the selected root. `b^2` below always means the
//! complex square, which is real for both flavors (negative for the
//! pure-imaginary fermionic `b`).

use crate::error::Error;
use crate::lattice::{coeffs, CoeffPair, Flavor, KGrid, ModelParams};
use crate::quench::{eom_rhs, ModeState};
use crate::{Result, C64};
use nalgebra::Matrix4;
use rayon::prelude::*;

/// Roots and the selected stationary occupation at one momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryRoot {
    pub k: Vec<f64>,
    /// All four quartic roots, sorted by real part then imaginary part.
    pub roots: [C64; 4],
    pub selected: f64,
    /// `|p(selected)|` of the unnormalized quartic.
    pub residual: f64,
}

/// Stationary roots in grid order plus the assembled magnetization.
#[derive(Debug, Clone)]
pub struct StationarySolution {
    pub roots: Vec<StationaryRoot>,
    pub magnetization: f64,
}

/// Real quartic coefficients in ascending degree, `p(G) = sum c_i G^i`.
///
/// Bosonic: `-2 B^2 Im(A) + 8 Im(A)(|A|^2 - B^2) G
/// + 8 Im(A)(|A|^2 - B^2 + 4 Im(A)^2) G^2 + 64 Im(A)^3 G^3 + 32 Im(A)^3 G^4`.
/// Fermionic: `16 B^2 Im(A) + 64 Im(A)(|A|^2 - B^2) G
/// + (64 Im(A)(B^2 - |A|^2) - 256 Im(A)^3) G^2 + 512 Im(A)^3 G^3
/// - 256 Im(A)^3 G^4`.
pub fn stationary_polynomial(c: &CoeffPair) -> Result<[f64; 5]> {
    let ai = c.a.im;
    if ai == 0.0 {
        return Err(Error::HermitianStationarity);
    }
    let a2 = c.a.norm_sqr();
    let b2 = (c.b * c.b).re;
    Ok(match c.flavor {
        Flavor::Bosonic => [
            -2.0 * b2 * ai,
            8.0 * ai * (a2 - b2),
            8.0 * ai * (a2 - b2 + 4.0 * ai * ai),
            64.0 * ai.powi(3),
            32.0 * ai.powi(3),
        ],
        Flavor::Fermionic => [
            16.0 * b2 * ai,
            64.0 * ai * (a2 - b2),
            64.0 * ai * (b2 - a2) - 256.0 * ai.powi(3),
            512.0 * ai.powi(3),
            -256.0 * ai.powi(3),
        ],
    })
}

/// Quartic roots via the companion matrix of the monic polynomial.
pub fn quartic_roots(c: &[f64; 5]) -> [C64; 4] {
    let lead = c[4];
    let companion = Matrix4::new(
        0.0, 0.0, 0.0, -c[0] / lead,
        1.0, 0.0, 0.0, -c[1] / lead,
        0.0, 1.0, 0.0, -c[2] / lead,
        0.0, 0.0, 1.0, -c[3] / lead,
    );
    let eig = companion.complex_eigenvalues();
    let mut roots = [eig[0], eig[1], eig[2], eig[3]];
    roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite roots"));
    roots
}

fn eval_poly(c: &[f64; 5], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, ci| acc * x + ci)
}

fn eval_dpoly(c: &[f64; 5], x: f64) -> f64 {
    (1..5).rev().fold(0.0, |acc, i| acc * x + i as f64 * c[i])
}

/// The paired stationary pair correlator, from the F-equation (linear in F
/// once G is fixed). The paper leaves this implicit; it closes the
/// fixed-point residual check.
pub fn stationary_pair_f(c: &CoeffPair, g: f64) -> C64 {
    let ai = c.a.im;
    match c.flavor {
        Flavor::Bosonic => C64::i() * c.b * (1.0 + 2.0 * g) / (4.0 * ai * g - 2.0 * C64::i() * c.a),
        Flavor::Fermionic => {
            2.0 * C64::i() * c.b * (1.0 - 2.0 * g) / (8.0 * ai * g + 4.0 * C64::i() * c.a)
        }
    }
}

const REAL_ROOT_TOL: f64 = 1e-9;

/// Solve the stationary quartic at every grid momentum and assemble the
/// stationary magnetization `1/2 - N_s^-D sum_k G_k`. Restricted to
/// `gamma < 0`, the regime where the dynamics actually settles; for
/// `gamma > 0` no stationary branch is selected by the dynamics.
///
/// Selection rule: lowest real root, restricted to non-negative roots for
/// the bosonic flavor. A momentum with no admissible real root is an error
/// carrying the full root set.
pub fn solve_stationary(flavor: Flavor, params: &ModelParams, grid: &KGrid) -> Result<StationarySolution> {
    if params.gamma >= 0.0 {
        return Err(Error::PositiveGammaSteadyState(params.gamma));
    }
    let results: Vec<Result<StationaryRoot>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let k = grid.point(i);
            let c = coeffs(flavor, params, k)?;
            let poly = stationary_polynomial(&c)?;
            let roots = quartic_roots(&poly);
            let admissible = |r: &C64| {
                let real = r.im.abs() <= REAL_ROOT_TOL * (1.0 + r.norm());
                let in_domain = match flavor {
                    Flavor::Bosonic => r.re >= -1e-12,
                    Flavor::Fermionic => true,
                };
                real && in_domain
            };
            let selected = roots
                .iter()
                .filter(|r| admissible(r))
                .map(|r| r.re)
                .fold(f64::INFINITY, f64::min);
            if !selected.is_finite() {
                return Err(Error::NoAdmissibleRoot { mode_index: i, roots });
            }
            let mut g = selected;
            let dp = eval_dpoly(&poly, g);
            if dp != 0.0 {
                g -= eval_poly(&poly, g) / dp;
            }
            Ok(StationaryRoot { k: k.to_vec(), roots, selected: g, residual: eval_poly(&poly, g).abs() })
        })
        .collect();
    let mut roots = Vec::with_capacity(grid.len());
    for r in results {
        roots.push(r?);
    }
    let inv = 1.0 / (grid.n_sites() as f64).powi(grid.dimension() as i32);
    let sum: f64 = roots.iter().map(|r| r.selected).sum();
    Ok(StationarySolution { magnetization: 0.5 - inv * sum, roots })
}

/// Fixed-point residual `|dF/dt| + |dG/dt|` of a selected root with its
/// paired F; the direct check that a quartic root is an EoM fixed point.
pub fn fixed_point_residual(c: &CoeffPair, g: f64) -> f64 {
    let s = ModeState { f: stationary_pair_f(c, g), g: C64::new(g, 0.0) };
    let d = eom_rhs(c, s);
    d.f.norm() + d.g.norm()
}
