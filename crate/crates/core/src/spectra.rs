//! Complex Bogolyubov angles and quasiparticle dispersions for both
//! flavors, plus the small-`J` Taylor approximants used as analytic
//! oracles in tests.
//!
//! Everything uses principal branches: `sqrt` with the cut on the
//! negative real axis, principal `atanh`/`atan`. Where `Re(a) = 0`
//! exactly the sign convention of the dispersion is undefined and the
//! point carries `defined = false` instead of a guessed sign.

use crate::error::Error;
use crate::lattice::{coeffs, CoeffPair, Flavor, KGrid, ModelParams};
use crate::{Result, C64};
use rayon::prelude::*;

/// Complex Bogolyubov angle: `atanh(-b/a)` for bosons, `atan(i*b/a)` for
/// fermions. Errors when `a = 0`.
pub fn bogolyubov_angle(c: &CoeffPair) -> Result<C64> {
    if c.a == C64::new(0.0, 0.0) {
        return Err(Error::UndefinedAngle);
    }
    Ok(match c.flavor {
        Flavor::Bosonic => (-c.b / c.a).atanh(),
        Flavor::Fermionic => (C64::i() * c.b / c.a).atan(),
    })
}

/// True when the angle argument lands on the principal branch cut of the
/// inverse function (real with modulus >= 1), which can happen at small
/// `h`, `gamma`. Callers should surface a warning rather than trust a
/// guessed continuation there.
pub fn angle_on_branch_cut(c: &CoeffPair) -> bool {
    if c.a == C64::new(0.0, 0.0) {
        return false;
    }
    let z = match c.flavor {
        Flavor::Bosonic => -c.b / c.a,
        // atan is singular on the imaginary axis at |Im| >= 1
        Flavor::Fermionic => C64::i() * (C64::i() * c.b / c.a),
    };
    z.im == 0.0 && z.re.abs() >= 1.0
}

/// Principal-branch dispersion: `sgn(Re a) * sqrt(a^2 - b^2)`, doubled for
/// the fermionic flavor. The flag is `false` where `Re(a) = 0` exactly (the
/// spectrum is not defined there); the returned energy is then the unsigned
/// principal root.
pub fn dispersion(c: &CoeffPair) -> (C64, bool) {
    let root = (c.a * c.a - c.b * c.b).sqrt();
    let scale = match c.flavor {
        Flavor::Bosonic => 1.0,
        Flavor::Fermionic => 2.0,
    };
    if c.a.re == 0.0 {
        (scale * root, false)
    } else {
        (scale * c.a.re.signum() * root, true)
    }
}

/// Truncated small-`J` expansion of the dispersion at `order` 1 or 2, 1D
/// only. Order 1: `(h + i*gamma) + (J/2) cos k`; order 2 adds
/// `-J^2 cos^2(k) / (8(h + i*gamma))` (bosonic) or
/// `+J^2 sin^2(k) / (8(h + i*gamma))` (fermionic). Test oracle only;
/// production paths always use [`dispersion`].
pub fn dispersion_expansion(flavor: Flavor, params: &ModelParams, k: f64, order: u32) -> Result<C64> {
    if params.dimension != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: params.dimension });
    }
    if flavor == Flavor::Fermionic && params.dimension != 1 {
        return Err(Error::FermionicDimension(params.dimension));
    }
    let hg = C64::new(params.h, params.gamma);
    let first = hg + 0.5 * params.j * k.cos();
    match order {
        1 => Ok(first),
        2 => {
            let j2 = params.j * params.j / (8.0 * hg);
            Ok(match flavor {
                Flavor::Bosonic => first - j2 * k.cos() * k.cos(),
                Flavor::Fermionic => first + j2 * k.sin() * k.sin(),
            })
        }
        other => Err(Error::ExpansionOrder(other)),
    }
}

/// One grid momentum of a [`Spectrum`].
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionPoint {
    pub k: Vec<f64>,
    pub energy: C64,
    pub angle: C64,
    pub defined: bool,
}

/// Dispersion and angle over a full momentum grid, in grid order.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub flavor: Flavor,
    pub grid: KGrid,
    pub points: Vec<DispersionPoint>,
    /// Grid indices whose angle argument sits on a branch cut.
    pub branch_flagged: Vec<usize>,
}

pub fn spectrum_over_grid(flavor: Flavor, params: &ModelParams) -> Result<Spectrum> {
    let grid = KGrid::new(params)?;
    let points: Vec<DispersionPoint> = (0..grid.len())
        .into_par_iter()
        .map(|i| -> Result<DispersionPoint> {
            let k = grid.point(i);
            let c = coeffs(flavor, params, k)?;
            let (energy, defined) = dispersion(&c);
            let angle = bogolyubov_angle(&c)?;
            Ok(DispersionPoint { k: k.to_vec(), energy, angle, defined })
        })
        .collect::<Result<_>>()?;
    let branch_flagged = (0..grid.len())
        .filter(|&i| {
            coeffs(flavor, params, grid.point(i)).map(|c| angle_on_branch_cut(&c)).unwrap_or(false)
        })
        .collect();
    Ok(Spectrum { flavor, grid, points, branch_flagged })
}
