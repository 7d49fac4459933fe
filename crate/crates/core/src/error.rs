use core::fmt;

use crate::metric::PointId;

/// Errors reported by the clustering core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A point id outside `0..n` was used.
    InvalidPointId(PointId),
    /// A center set was empty where at least one center is required.
    EmptyCenterSet,
    /// The outlier budget is at least the total multiplicity mass.
    OutlierBudgetExhausted { z: u64, mass: u64 },
    /// A numeric or structural parameter was out of its admissible range.
    InvalidParameter(&'static str),
    /// Coordinate vectors disagree on their dimension.
    DimensionMismatch {
        expected: usize,
        found: usize,
        id: PointId,
    },
    /// A distance matrix violates a metric axiom.
    NotAMetric(&'static str),
    /// A point weight lies outside `[0, 1]` or is missing.
    InvalidWeight(PointId),
    /// A point is a loop of the matroid (`{j}` is dependent).
    MatroidLoop(PointId),
    /// An exhaustive oracle would exceed its enumeration budget.
    OracleBudgetExceeded { needed: u128, budget: u128 },
    /// An exact solver would exceed its enumeration budget.
    SolverBudgetExceeded { budget: u128 },
    /// Preconditions of the extended augmentation property do not hold.
    LemmaPreconditions(&'static str),
    /// No feasible center set exists.
    Infeasible(&'static str),
    /// A coreset lacks the per-point audit data needed for certification.
    MissingAudit,
    /// The stream produced no points.
    EmptyStream,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidPointId(id) => write!(f, "invalid point id {}", id.0),
            Error::EmptyCenterSet => f.write_str("empty center set"),
            Error::OutlierBudgetExhausted { z, mass } => {
                write!(f, "z exhausts all mass (z = {z}, total mass = {mass})")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::DimensionMismatch {
                expected,
                found,
                id,
            } => write!(
                f,
                "point {} has dimension {found}, expected {expected}",
                id.0
            ),
            Error::NotAMetric(what) => write!(f, "distance matrix is not a metric: {what}"),
            Error::InvalidWeight(id) => {
                write!(f, "weight of point {} is missing or outside [0,1]", id.0)
            }
            Error::MatroidLoop(id) => {
                write!(f, "point {} is a loop: singleton is not independent", id.0)
            }
            Error::OracleBudgetExceeded { needed, budget } => write!(
                f,
                "oracle budget exceeded: {needed} candidate sets, budget {budget}"
            ),
            Error::SolverBudgetExceeded { budget } => write!(
                f,
                "exact solver budget of {budget} candidate sets exceeded; use the heuristic solver"
            ),
            Error::LemmaPreconditions(what) => write!(f, "lemma preconditions unmet: {what}"),
            Error::Infeasible(what) => write!(f, "infeasible instance: {what}"),
            Error::MissingAudit => f.write_str("coreset carries no per-point proxy audit"),
            Error::EmptyStream => f.write_str("empty stream"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

impl core::error::Error for Error {}
