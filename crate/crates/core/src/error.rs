use thiserror::Error;

/// A constructor or precondition rejected a value. `field` names the offender.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid `{field}`: {reason}")]
pub struct ValidationError {
    pub field: &'static str,
    pub reason: String,
}

impl ValidationError {
    pub fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self {
            field,
            reason: reason.into(),
        }
    }
}

/// Checks `cond` and otherwise produces a [`ValidationError`] for `field`.
pub(crate) fn ensure(cond: bool, field: &'static str, reason: impl FnOnce() -> String) -> Result<(), ValidationError> {
    if cond {
        Ok(())
    } else {
        Err(ValidationError::new(field, reason()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),

    /// Fluidization removes all of the bed's normal strength under this tail.
    #[error("substrate yields under oscillation at area {area} m^2: k_idle = {stiffness_idle} N/m, reduction = {reduction} N/m")]
    SubstrateYield {
        area: f64,
        stiffness_idle: f64,
        reduction: f64,
    },

    #[error("load {load} N is never reached inside the depth bracket (force at {upper} m is {max_force} N)")]
    NoIntersection { load: f64, max_force: f64, upper: f64 },

    #[error("force curve is not monotone near depth {depth} m")]
    NonMonotone { depth: f64 },

    #[error("depth {depth} m exceeds the body profile (max depth {max_depth} m)")]
    DepthOutOfProfile { depth: f64, max_depth: f64 },

    #[error("idle drag is zero, the drag ratio is undefined")]
    DegenerateDrag,

    #[error("bracket does not straddle R = 1 (R(low) = {low_ratio}, R(high) = {high_ratio})")]
    NoCrossover { low_ratio: f64, high_ratio: f64 },

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("window [{low}, {high}] lies outside the trace range [{min}, {max}]")]
    WindowOutOfRange { low: f64, high: f64, min: f64, max: f64 },

    #[error("baseline {value} must be positive")]
    DegenerateBaseline { value: f64 },

    #[error("inconsistent calibration: {0}")]
    InconsistentCalibration(String),

    #[error("expected a {expected} trace")]
    WrongTraceKind { expected: &'static str },

    #[error("trace position is not monotone nondecreasing at sample {index}")]
    NonMonotoneTrace { index: usize },
}

impl ModelError {
    /// Short machine-readable tag, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            ModelError::Invalid(_) => "validation",
            ModelError::SubstrateYield { .. } => "substrate_yield",
            ModelError::NoIntersection { .. } => "no_intersection",
            ModelError::NonMonotone { .. } => "non_monotone",
            ModelError::DepthOutOfProfile { .. } => "depth_out_of_profile",
            ModelError::DegenerateDrag => "degenerate_drag",
            ModelError::NoCrossover { .. } => "no_crossover",
            ModelError::InsufficientData { .. } => "insufficient_data",
            ModelError::WindowOutOfRange { .. } => "window_out_of_range",
            ModelError::DegenerateBaseline { .. } => "degenerate_baseline",
            ModelError::InconsistentCalibration(_) => "inconsistent_calibration",
            ModelError::WrongTraceKind { .. } => "wrong_trace_kind",
            ModelError::NonMonotoneTrace { .. } => "non_monotone_trace",
        }
    }
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
