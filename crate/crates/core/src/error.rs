use alloc::string::String;
use core::fmt;

/// A model invariant that failed validation.
#[derive(Debug, Clone, PartialEq)]
pub enum Invariant {
    /// Table or list has the wrong shape.
    Dimensions(String),
    /// A value that must be finite is NaN or infinite.
    NonFinite(String),
    /// A probability vector is negative somewhere or does not sum to one.
    Normalization(String),
    /// The transfer on the drop-out action is not exactly zero.
    ModulationFeasibility,
    /// The transfer scaling factor is negative.
    NegativeGamma,
    /// Anything else, described in words.
    Other(String),
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invariant::Dimensions(what) => write!(f, "dimension mismatch: {what}"),
            Invariant::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Invariant::Normalization(what) => {
                write!(f, "normalization: {what} must be nonnegative and sum to 1")
            }
            Invariant::ModulationFeasibility => {
                write!(f, "modulation feasibility (MF): c(a_DO) must be exactly 0")
            }
            Invariant::NegativeGamma => write!(f, "scaling factor gamma must be >= 0"),
            Invariant::Other(what) => f.write_str(what),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    Invalid(Invariant),
    /// Posterior requested for a signal the prior gives probability zero.
    ZeroProbabilitySignal { signal: usize },
    /// A signal the defender can send is impossible in the user's eyes.
    InconsistentSupport { signal: usize, user_type: usize },
    /// The policy space K^M exceeds the enumeration cap.
    SpaceTooLarge { types: usize, actions: usize },
    /// The simplex could not restore primal feasibility to tolerance.
    NumericalFailure { residual: f64 },
    PreconditionViolated(&'static str),
    /// Exact geometry is only implemented for two or three states.
    UnsupportedDimension { states: usize },
    /// The generator violates incentive compatibility.
    NotCredible { violations: usize },
    EmptyGrid,
    InvalidParams(&'static str),
    DegenerateDenominator,
    UnknownFigure(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Invalid(inv) => write!(f, "invalid model: {inv}"),
            Error::ZeroProbabilitySignal { signal } => {
                write!(f, "signal {signal} has zero probability under the prior")
            }
            Error::InconsistentSupport { signal, user_type } => write!(
                f,
                "signal {signal} is possible but has zero probability for user type {user_type}"
            ),
            Error::SpaceTooLarge { types, actions } => write!(
                f,
                "policy space {actions}^{types} exceeds the enumeration cap of {}",
                crate::policies::MAX_POLICIES
            ),
            Error::NumericalFailure { residual } => {
                write!(f, "LP feasibility residual {residual:e} after restoration")
            }
            Error::PreconditionViolated(what) => write!(f, "precondition violated: {what}"),
            Error::UnsupportedDimension { states } => {
                write!(f, "exact geometry needs 2 or 3 states, got {states}")
            }
            Error::NotCredible { violations } => {
                write!(f, "generator is not credible ({violations} IC violations)")
            }
            Error::EmptyGrid => f.write_str("modulator grid is empty"),
            Error::InvalidParams(what) => write!(f, "invalid insider parameters: {what}"),
            Error::DegenerateDenominator => f.write_str("threshold denominator is zero"),
            Error::UnknownFigure(id) => write!(f, "unknown figure id {id:?}"),
        }
    }
}

impl core::error::Error for Error {}

impl From<Invariant> for Error {
    fn from(inv: Invariant) -> Self {
        Error::Invalid(inv)
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
