//! Spectra, quench dynamics, and steady states of the non-Hermitian
//! transverse-field Ising model in the linear spin-wave (bosonic) and
//! free-fermion descriptions.
//!
//! The crate is organized around one parameter record ([`ModelParams`])
//! that drives every stage of the pipeline:
//!
//! * [`lattice`] — momentum grids and the quadratic-theory coefficients
//!   `A_k`/`B_k` (bosonic) and their fermionic counterparts,
//! * [`spectra`] — complex Bogolyubov angles and dispersions,
//! * [`quench`] — equations of motion for the pair correlator `F_k` and
//!   occupation `G_k` after a sudden quench of the dissipation,
//! * [`observables`] — real-space correlation fields, `zz` correlations,
//!   and the local magnetization,
//! * [`single_mode`] — truncated-Fock exact diagonalization of the `k = 0`
//!   mode and the finite-time-divergence analysis,
//! * [`steady_state`] — stationary occupations for negative dissipation,
//! * [`lightcone`] — correlation-edge and ridge velocity extraction,
//! * [`io`] — deterministic CSV emission, config parsing, run manifests.

pub mod error;
pub mod io;
pub mod lattice;
pub mod lightcone;
pub mod observables;
pub mod quench;
pub mod single_mode;
pub mod spectra;
pub mod steady_state;

pub use error::Error;
pub use lattice::{bosonic_coeffs, coeffs, fermionic_coeffs, CoeffPair, Flavor, KGrid, ModelParams};
pub use observables::{CorrelationField, FieldKind, GuessEnvelope};
pub use quench::{DivergenceReport, ModeState, QuenchSpec, Trajectory};
pub use single_mode::{FockVector, SqueezeParams};
pub use spectra::{DispersionPoint, Spectrum};
pub use steady_state::StationaryRoot;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex double, the scalar type of every correlator in the crate.
pub type C64 = num_complex::Complex64;
