//! Error type shared across the crate.

use crate::C64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("n_sites must be even and >= 2 (k = pi must sit on the grid), got {0}")]
    OddSites(usize),

    #[error("dimension must be >= 1, got {0}")]
    ZeroDimension(usize),

    #[error("gamma_prime must be >= 0 and is only consumed by the single-mode module, got {0}")]
    NegativeGammaPrime(f64),

    #[error("the fermionic theory is 1D-only, got dimension {0}")]
    FermionicDimension(usize),

    #[error("expansion order must be 1 or 2, got {0}")]
    ExpansionOrder(u32),

    #[error("Bogolyubov angle undefined: coefficient a = 0")]
    UndefinedAngle,

    #[error("pre-quench vacuum is gapless or unstable: |B/A| = {ratio} >= 1 at k index {mode_index}")]
    UnstableVacuum { mode_index: usize, ratio: f64 },

    #[error("quench spec invalid: {0}")]
    QuenchSpec(String),

    #[error("non-finite value in mode {mode_index} at t = {t}")]
    NonFinite { mode_index: usize, t: f64 },

    #[error("amplitudes not normalized: |alpha|^2 + |beta|^2 = {0}")]
    NotNormalized(f64),

    #[error("distance {0:?} is off-lattice (|component| must be <= n_sites/2)")]
    OffLattice(Vec<i64>),

    #[error("field/trajectory dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Fock truncation too small: n_max must be >= 4, got {0}")]
    TruncationTooSmall(usize),

    #[error("eigensolve did not converge")]
    EigensolveFailed,

    #[error("state norm underflow during evolution (norm {0:e})")]
    NormUnderflow(f64),

    #[error("divergence-time formula needs gamma > 0, got {0}")]
    NonPositiveGamma(f64),

    #[error("nonlinearity onset needs gamma_prime > 0, got {0}")]
    NonPositiveGammaPrime(f64),

    #[error("stationarity is degenerate at Im(a) = 0 (Hermitian coefficients)")]
    HermitianStationarity,

    #[error("steady-state solver is restricted to gamma < 0, got {0}")]
    PositiveGammaSteadyState(f64),

    #[error("no admissible real root at k index {mode_index}; roots: {roots:?}")]
    NoAdmissibleRoot { mode_index: usize, roots: [C64; 4] },

    #[error("no field entry crosses the activation threshold {threshold}")]
    EmptyActivation { threshold: f64 },

    #[error("velocity fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("velocity fit degenerate: all activation times equal")]
    DegenerateAbscissa,

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("config parse error: {0}")]
    Config(String),

    #[error("csv parse error: {0}")]
    Csv(String),
}

impl Error {
    /// Process exit code buckets used by the CLI: 1 for domain errors,
    /// 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFinite { .. }
            | Error::EigensolveFailed
            | Error::NormUnderflow(_)
            | Error::NoAdmissibleRoot { .. } => 2,
            _ => 1,
        }
    }
}

pub(crate) fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> Error {
    let context = context.into();
    move |source| Error::Io { context, source }
}
