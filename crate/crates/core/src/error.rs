use thiserror::Error;

/// Errors shared across the engine modules.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("not in subalgebra: {0}")]
    NotInSubalgebra(String),
    #[error("degree bound too small: {0}")]
    DegreeBoundTooSmall(String),
    #[error("pairing table not calibrated")]
    Uncalibrated,
    #[error("calibration infeasible: {0}")]
    CalibrationInfeasible(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("valid window exhausted: {0}")]
    WindowExhausted(String),
    #[error("divergent region: Re z = {re_z} is at or below the abscissa {abscissa}")]
    DivergentRegion { re_z: f64, abscissa: f64 },
    #[error("pole proximity at z0 = {location_re}+{location_im}i (order {order})")]
    PoleProximity {
        location_re: f64,
        location_im: f64,
        order: u8,
        /// Laurent (z - z0)^{-1} coefficient at the nearby pole.
        residue_re: f64,
        residue_im: f64,
    },
    #[error("fit failed: {0}")]
    FitFailed(String),
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
