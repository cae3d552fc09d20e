use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by state validation, measurement construction, the
/// optimizer, Monte Carlo estimation, and the CLI front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (largest deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("density matrix must have unit trace (got {0})")]
    NotUnitTrace(f64),

    #[error("density matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),

    #[error("measurement strength theta must lie in [0, pi/4], got {0}")]
    ThetaOutOfRange(f64),

    #[error("precision factor G must lie in [0, 1], got {0}")]
    PrecisionOutOfRange(f64),

    #[error("{name} must lie in [{min}, {max}], got {value}")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("measurement branch has zero probability; post-measurement state is undefined")]
    ZeroProbabilityBranch,

    #[error("input state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("post-selection on the central mode has zero probability")]
    ZeroPostSelection,

    #[error(
        "equalization gap does not change sign on [{lo}, {hi}] (f(lo) = {f_lo:.3e}, f(hi) = {f_hi:.3e})"
    )]
    NonBracketing {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error(
        "no trials recorded for setting combination (alice={alice}, bob1={bob1}, bob2={bob2})"
    )]
    InsufficientData { alice: u8, bob1: u8, bob2: u8 },

    #[error("invalid sweep range: need 0 <= g_min < g_max <= 1 and steps >= 2 (got g_min={g_min}, g_max={g_max}, steps={steps})")]
    InvalidSweepRange {
        g_min: f64,
        g_max: f64,
        steps: usize,
    },

    #[error("unknown scheme '{0}' (expected 'original' or 'optimal')")]
    UnknownScheme(String),

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
