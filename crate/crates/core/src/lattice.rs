//! Model parameters, hypercubic momentum grids, and the coefficient
//! functions of the two quadratic theories.
//!
//! Both theories are driven by a pair of momentum-dependent coefficients:
//! bosonic `A_k = h + i*gamma + (J/2) sum_j cos(k_j)` with real
//! `B_k = (J/2) sum_j cos(k_j)`, and fermionic
//! `A_k = (J/4) cos(k) + (h + i*gamma)/2` with pure-imaginary
//! `B_k = -i (J/4) sin(k)` (1D only).

use crate::error::Error;
use crate::{Result, C64};
use std::f64::consts::PI;

/// Which quadratic theory a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Bosonic,
    Fermionic,
}

impl Flavor {
    pub fn label(self) -> &'static str {
        match self {
            Flavor::Bosonic => "boson",
            Flavor::Fermionic => "fermion",
        }
    }
}

impl std::str::FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boson" | "bosonic" => Ok(Flavor::Bosonic),
            "fermion" | "fermionic" => Ok(Flavor::Fermionic),
            other => Err(Error::Config(format!("unknown flavor {other:?}"))),
        }
    }
}

/// Couplings and lattice geometry; one record drives every module.
///
/// The lattice spacing is fixed to 1. `gamma_prime` is the quartic
/// non-Hermitian strength consumed only by the single-mode module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub j: f64,
    pub h: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub dimension: usize,
    pub n_sites: usize,
}

impl Default for ModelParams {
    /// The paper-style workhorse set: J=1, h=5, gamma=0.2 on a 200-site chain.
    fn default() -> Self {
        ModelParams { j: 1.0, h: 5.0, gamma: 0.2, gamma_prime: 0.0, dimension: 1, n_sites: 200 }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 || self.n_sites % 2 != 0 {
            return Err(Error::OddSites(self.n_sites));
        }
        if self.dimension == 0 {
            return Err(Error::ZeroDimension(self.dimension));
        }
        if self.gamma_prime < 0.0 {
            return Err(Error::NegativeGammaPrime(self.gamma_prime));
        }
        Ok(())
    }

    /// D > 3 is permitted by the hypercubic formulas but untested territory.
    pub fn is_untested_dimension(&self) -> bool {
        self.dimension > 3
    }

    /// The Hermitian (pre-quench) copy: same couplings with every
    /// non-Hermitian strength zeroed.
    pub fn hermitian(&self) -> ModelParams {
        ModelParams { gamma: 0.0, gamma_prime: 0.0, ..*self }
    }

    /// Parse a plain-text `key = value` configuration on top of the defaults.
    /// Keys: J, h, gamma, gamma_prime, dimension, n_sites. `#` starts a comment.
    pub fn from_config_str(text: &str) -> Result<ModelParams> {
        let mut p = ModelParams::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| Error::Config(format!("line {}: bad {what} value {value:?}", lineno + 1));
            match key {
                "J" => p.j = value.parse().map_err(|_| bad("J"))?,
                "h" => p.h = value.parse().map_err(|_| bad("h"))?,
                "gamma" => p.gamma = value.parse().map_err(|_| bad("gamma"))?,
                "gamma_prime" => p.gamma_prime = value.parse().map_err(|_| bad("gamma_prime"))?,
                "dimension" => p.dimension = value.parse().map_err(|_| bad("dimension"))?,
                "n_sites" => p.n_sites = value.parse().map_err(|_| bad("n_sites"))?,
                other => return Err(Error::Config(format!("line {}: unknown key {other:?}", lineno + 1))),
            }
        }
        p.validate()?;
        Ok(p)
    }
}

/// Momentum grid of a hypercubic lattice: `N_s^D` points with components
/// `k_j = 2*pi*n_j/N_s`, `n_j` in `[-N_s/2, N_s/2)`, ordered lexicographically
/// in `n`. Includes `-pi`, excludes `+pi`, so `k -> -k` is closed on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KGrid {
    dimension: usize,
    n_sites: usize,
    points: Vec<f64>,
    neg: Vec<u32>,
}

impl KGrid {
    pub fn new(params: &ModelParams) -> Result<KGrid> {
        params.validate()?;
        let d = params.dimension;
        let n = params.n_sites;
        let len = n.pow(d as u32);
        let mut points = Vec::with_capacity(len * d);
        let mut neg = Vec::with_capacity(len);
        let half = (n / 2) as f64;
        for i in 0..len {
            // lexicographic in n: the first component is the slowest axis
            let mut rev = 0usize;
            let mut stride = 1usize;
            let mut rem = i;
            let base = points.len();
            points.resize(base + d, 0.0);
            for j in (0..d).rev() {
                let digit = rem % n;
                rem /= n;
                points[base + j] = 2.0 * PI * (digit as f64 - half) / n as f64;
                // n_j -> -n_j with -N/2 wrapping onto itself
                rev += ((n - digit) % n) * stride;
                stride *= n;
            }
            neg.push(rev as u32);
        }
        Ok(KGrid { dimension: d, n_sites: n, points, neg })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn len(&self) -> usize {
        self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neg.is_empty()
    }

    /// Momentum vector of flat index `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dimension..(i + 1) * self.dimension]
    }

    /// Flat index of `-k` for flat index `i` (`-pi` is identified with `pi`).
    pub fn neg_index(&self, i: usize) -> usize {
        self.neg[i] as usize
    }

    /// Flat index from integer steps `n_j` in `[-N_s/2, N_s/2)`.
    pub fn index_of(&self, steps: &[i64]) -> Option<usize> {
        if steps.len() != self.dimension {
            return None;
        }
        let half = (self.n_sites / 2) as i64;
        let mut idx = 0usize;
        for &s in steps {
            if s < -half || s >= half {
                return None;
            }
            idx = idx * self.n_sites + (s + half) as usize;
        }
        Some(idx)
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dimension)
    }
}

/// The coefficient pair of one quadratic theory at one momentum.
///
/// Bosonic: `b` is real and `Im(a) = gamma` exactly. Fermionic: `b` is pure
/// imaginary and `Im(a) = gamma/2` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffPair {
    pub a: C64,
    pub b: C64,
    pub flavor: Flavor,
}

/// `A_k = h + i*gamma + (J/2) sum_j cos(k_j)`, `B_k = (J/2) sum_j cos(k_j)`.
pub fn bosonic_coeffs(params: &ModelParams, k: &[f64]) -> CoeffPair {
    let csum: f64 = k.iter().map(|kj| kj.cos()).sum();
    let b = 0.5 * params.j * csum;
    CoeffPair {
        a: C64::new(params.h + b, params.gamma),
        b: C64::new(b, 0.0),
        flavor: Flavor::Bosonic,
    }
}

/// `A_k = (J/4) cos(k) + (h + i*gamma)/2`, `B_k = -i (J/4) sin(k)`; 1D only.
pub fn fermionic_coeffs(params: &ModelParams, k: f64) -> Result<CoeffPair> {
    if params.dimension != 1 {
        return Err(Error::FermionicDimension(params.dimension));
    }
    Ok(CoeffPair {
        a: C64::new(0.25 * params.j * k.cos() + 0.5 * params.h, 0.5 * params.gamma),
        b: C64::new(0.0, -0.25 * params.j * k.sin()),
        flavor: Flavor::Fermionic,
    })
}

/// Flavor-dispatching convenience for grid loops.
pub fn coeffs(flavor: Flavor, params: &ModelParams, k: &[f64]) -> Result<CoeffPair> {
    match flavor {
        Flavor::Bosonic => Ok(bosonic_coeffs(params, k)),
        Flavor::Fermionic => fermionic_coeffs(params, k[0]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(j: f64, h: f64, gamma: f64, dimension: usize, n_sites: usize) -> ModelParams {
        ModelParams { j, h, gamma, gamma_prime: 0.0, dimension, n_sites }
    }

    #[test]
    fn kgrid_1d_four_sites() {
        let g = KGrid::new(&params(1.0, 5.0, 0.2, 1, 4)).unwrap();
        let ks: Vec<f64> = g.iter_points().map(|k| k[0]).collect();
        assert_eq!(ks, vec![-PI, -PI / 2.0, 0.0, PI / 2.0]);
    }

    #[test]
    fn kgrid_2d_two_sites() {
        let g = KGrid::new(&params(1.0, 5.0, 0.2, 2, 2)).unwrap();
        assert_eq!(g.len(), 4);
        let pts: Vec<Vec<f64>> = g.iter_points().map(|k| k.to_vec()).collect();
        assert_eq!(pts, vec![vec![-PI, -PI], vec![-PI, 0.0], vec![0.0, -PI], vec![0.0, 0.0]]);
    }

    #[test]
    fn kgrid_negation_is_involution() {
        let g = KGrid::new(&params(1.0, 5.0, 0.2, 1, 200)).unwrap();
        for i in 0..g.len() {
            let m = g.neg_index(i);
            assert_eq!(g.neg_index(m), i);
            for (kj, mj) in g.point(i).iter().zip(g.point(m)) {
                // -pi mirrors onto itself
                if (*kj + PI).abs() < 1e-15 {
                    assert_eq!(*mj, *kj);
                } else {
                    assert_eq!(*mj, -*kj);
                }
            }
        }
    }

    #[test]
    fn kgrid_components_in_range() {
        let g = KGrid::new(&params(1.0, 1.0, 1.0, 2, 6)).unwrap();
        assert_eq!(g.len(), 36);
        for k in g.iter_points() {
            for kj in k {
                assert!((-PI..PI).contains(kj));
            }
        }
    }

    #[test]
    fn odd_sites_rejected() {
        let err = KGrid::new(&params(1.0, 5.0, 0.2, 1, 5)).unwrap_err();
        assert!(err.to_string().contains("even"));
    }

    #[test]
    fn index_of_roundtrips() {
        let g = KGrid::new(&params(1.0, 5.0, 0.2, 2, 4)).unwrap();
        for i in 0..g.len() {
            let k = g.point(i);
            let steps: Vec<i64> =
                k.iter().map(|kj| (kj * 4.0 / (2.0 * PI)).round() as i64).collect();
            assert_eq!(g.index_of(&steps), Some(i));
        }
        assert_eq!(g.index_of(&[2, 0]), None);
    }

    #[test]
    fn bosonic_coeff_values() {
        let p = params(1.0, 5.0, 0.2, 1, 4);
        let c = bosonic_coeffs(&p, &[0.0]);
        assert_eq!(c.a, C64::new(5.5, 0.2));
        assert_eq!(c.b, C64::new(0.5, 0.0));
        let c = bosonic_coeffs(&p, &[PI / 2.0]);
        assert!((c.a - C64::new(5.0, 0.2)).norm() < 1e-15);
        assert!(c.b.norm() < 1e-15);
        let p2 = params(1.0, 20.0, 10.0, 2, 2);
        let c = bosonic_coeffs(&p2, &[0.0, 0.0]);
        assert_eq!(c.a, C64::new(21.0, 10.0));
        assert_eq!(c.b, C64::new(1.0, 0.0));
    }

    #[test]
    fn fermionic_coeff_values() {
        let p = params(1.0, 20.0, 10.0, 1, 4);
        let c = fermionic_coeffs(&p, 0.0).unwrap();
        assert_eq!(c.a, C64::new(10.25, 5.0));
        assert_eq!(c.b, C64::new(0.0, 0.0));
        let p = params(1.0, 5.0, 0.2, 1, 4);
        let c = fermionic_coeffs(&p, PI / 2.0).unwrap();
        assert!((c.a - C64::new(2.5, 0.1)).norm() < 1e-15);
        assert!((c.b - C64::new(0.0, -0.25)).norm() < 1e-15);
        // b is odd in k
        let cm = fermionic_coeffs(&p, -PI / 2.0).unwrap();
        assert!((cm.b - C64::new(0.0, 0.25)).norm() < 1e-15);
    }

    #[test]
    fn fermionic_rejects_higher_dimensions() {
        let p = params(1.0, 5.0, 0.2, 2, 4);
        assert!(matches!(fermionic_coeffs(&p, 0.0), Err(Error::FermionicDimension(2))));
    }

    #[test]
    fn coefficient_parities_and_identity() {
        let p = params(1.3, 2.0, 0.7, 1, 64);
        let g = KGrid::new(&p).unwrap();
        for i in 0..g.len() {
            let k = g.point(i);
            let km = g.point(g.neg_index(i));
            let cb = bosonic_coeffs(&p, k);
            let cbm = bosonic_coeffs(&p, km);
            assert_eq!(cb.a, cbm.a);
            assert_eq!(cb.b, cbm.b);
            // a - b = h + i*gamma (exact algebra; floats to a couple of ulps)
            assert!((cb.a - cb.b - C64::new(p.h, p.gamma)).norm() <= 1e-15 * (p.h + p.j));
            let cf = fermionic_coeffs(&p, k[0]).unwrap();
            let cfm = fermionic_coeffs(&p, km[0]).unwrap();
            assert_eq!(cf.a, cfm.a);
            assert!((cf.b + cfm.b).norm() < 1e-15);
        }
    }

    #[test]
    fn hermitian_coefficients_are_real() {
        let p = params(1.0, 5.0, 0.0, 1, 8);
        for k in KGrid::new(&p).unwrap().iter_points() {
            assert_eq!(bosonic_coeffs(&p, k).a.im, 0.0);
            assert_eq!(fermionic_coeffs(&p, k[0]).unwrap().a.im, 0.0);
        }
    }

    #[test]
    fn config_parsing() {
        let p = ModelParams::from_config_str("J = 2.0\nh = 7 # field\n\ngamma = -0.5\nn_sites = 64\n").unwrap();
        assert_eq!(p.j, 2.0);
        assert_eq!(p.h, 7.0);
        assert_eq!(p.gamma, -0.5);
        assert_eq!(p.n_sites, 64);
        assert_eq!(p.dimension, 1);
        assert!(ModelParams::from_config_str("bogus = 1").is_err());
        assert!(ModelParams::from_config_str("n_sites = 7").is_err());
    }
}
