use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the model types and solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// A constructor or operation received a value that violates an invariant.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Floating-point range exceeded (e.g. `exp` overflow in the Zener-Hollomon parameter).
    #[error("numeric overflow: {0}")]
    Overflow(String),

    /// The tool footprint does not fit in the computational grid.
    #[error("tool footprint at x={x:.6} m, y={y:.6} m lies outside the grid")]
    FootprintOutsideGrid { x: f64, y: f64 },

    /// The requested step exceeds the explicit stability limit.
    #[error("time step {dt:.6e} s exceeds the stability limit {limit:.6e} s")]
    TimestepTooLarge { dt: f64, limit: f64 },

    /// A flow-field query fell inside the solid probe.
    #[error("point at radius {radius:.6e} m lies inside the probe (radius {probe_radius:.6e} m)")]
    InsideProbe { radius: f64, probe_radius: f64 },

    /// A weld simulation step failed; carries the phase and time where it happened.
    #[error("phase {phase} ({kind}) at t={time:.6} s: {source}")]
    Simulation {
        phase: usize,
        kind: &'static str,
        time: f64,
        source: Box<Error>,
    },

    /// Objective evaluation failed during calibration.
    #[error("objective evaluation failed at parameters {params}: {source}")]
    Objective { params: String, source: Box<Error> },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Rejects non-finite and non-positive values.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(
            name,
            alloc::format!("must be > 0, got {value}"),
        ))
    }
}

pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(
            name,
            alloc::format!("must be >= 0, got {value}"),
        ))
    }
}

pub(crate) fn require_unit_interval(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::invalid(
            name,
            alloc::format!("must lie in [0, 1], got {value}"),
        ))
    }
}
