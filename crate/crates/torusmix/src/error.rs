use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 2 or 3, got {0}")]
    Dimension(u8),

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u8, right: u8 },

    #[error("field is not Hermitian-symmetric: coefficient at k = {k:?} violates conj symmetry by {deviation:.3e}")]
    NonHermitian { k: [i32; 3], deviation: f64 },

    #[error("field has nonzero mean: |f_0| = {0:.3e}")]
    NonzeroMean(f64),

    #[error("grid size {m} incompatible with cutoff {n} (need m >= 2n+1)")]
    GridCutoff { m: usize, n: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    EigenNoConvergence { iterations: usize, residual: f64 },

    #[error("solver blow-up at t = {t:.6}: max |coefficient| = {max_coeff:.3e}")]
    Blowup { t: f64, max_coeff: f64 },

    #[error("time step {dt:.3e} violates the stability rule (max allowed {dt_max:.3e}): {detail}")]
    Stability { dt: f64, dt_max: f64, detail: String },

    #[error("interval [{start:.4}, {end:.4}] outside the path horizon [0, {horizon:.4}]")]
    OutsideHorizon { start: f64, end: f64, horizon: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("toml error: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
