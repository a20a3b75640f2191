//! Exact arithmetic kernel: rationals, class vectors, polyhedral cones and
//! the two solvers every higher-level computation reduces to.

pub mod class;
pub mod cone;
pub mod rational;
pub mod search;

pub use class::ClassVector;
pub use cone::{cone_member, ratio_infimum, EffConeSpec};
pub use rational::{ExtRat, ExtValue, ParseRatError, Rat};
pub use search::{int_feasible_min, Effectivity, DEFAULT_HARD_CAP};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected rank {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("infeasible for all s: polarization vanishes on facet {facet} where the divisor is positive")]
    InfeasibleForAllS { facet: usize },
    #[error("unbounded below: polarization vanishes on every facet")]
    UnboundedBelow,
    #[error("polarization lies outside the cone (facet {facet} is negative on it)")]
    PolarizationOutsideCone { facet: usize },
    #[error("no integrally effective multiple found within {hard_cap} steps above k = {start}")]
    SearchExhausted { start: i64, hard_cap: u64 },
    #[error("declared gap bound {gap_bound} exceeded: Q-effective from k = {first_q_effective} but no integral section within the gap")]
    GapBoundExceeded { first_q_effective: i64, gap_bound: u64 },
    #[error("class {0} is not integral")]
    NonIntegral(String),
    #[error("multiple m must be positive")]
    NonPositiveMultiple,
    #[error("integer overflow in search bounds")]
    Overflow,
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("cone is not salient: both {ray} and {opposite} are in the cone")]
    NonSalient { ray: String, opposite: String },
}

impl LatticeError {
    /// Stable machine-readable kind.
    pub fn kind(&self) -> &'static str {
        match self {
            LatticeError::DimensionMismatch { .. } => "dimension-mismatch",
            LatticeError::InfeasibleForAllS { .. } => "infeasible-for-all-s",
            LatticeError::UnboundedBelow => "unbounded-below",
            LatticeError::PolarizationOutsideCone { .. } => "polarization-outside-cone",
            LatticeError::SearchExhausted { .. } => "search-exhausted",
            LatticeError::GapBoundExceeded { .. } => "gap-bound-exceeded",
            LatticeError::NonIntegral(_) => "non-integral",
            LatticeError::NonPositiveMultiple => "non-positive-multiple",
            LatticeError::Overflow => "overflow",
            LatticeError::InvalidCone(_) => "invalid-cone",
            LatticeError::NonSalient { .. } => "non-salient",
        }
    }

    /// Whether the error is a caller mistake rather than a mathematical
    /// failure of the solver.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            LatticeError::DimensionMismatch { .. }
                | LatticeError::NonIntegral(_)
                | LatticeError::NonPositiveMultiple
        )
    }
}
