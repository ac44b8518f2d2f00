use thiserror::Error;

use crate::grid::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate box {index}: interval on axis {axis} is empty")]
    DegenerateBox { index: usize, axis: usize },

    #[error("box {index} leaves the unit cube on axis {axis}")]
    BoxOutOfAmbient { index: usize, axis: usize },

    #[error("box {index} has {found} intervals, scene dimension is {dim}")]
    DimensionMismatch { index: usize, found: usize, dim: usize },

    #[error("marked point `{name}` is not in the allowed region")]
    MarkedPointForbidden { name: String },

    #[error("marked point `{name}` is outside the unit cube")]
    MarkedPointOutOfAmbient { name: String },

    #[error("identification conflict on axis {axis}: {reason}")]
    IdentificationConflict { axis: usize, reason: String },

    #[error("invalid coordinate `{text}`: {reason}")]
    BadCoordinate { text: String, reason: String },

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("vertex {0:?} is not a vertex of the grid")]
    NotAVertex(VertexId),

    #[error("path budget exceeded: more than {max_paths} paths")]
    BudgetExceeded { max_paths: usize },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("signature oracle needs a 2-dimensional scene without identifications")]
    NotTwoDimensional,

    #[error("hom-set {from:?} -> {to:?} is truncated; refusing to verify")]
    InexactHomSet { from: VertexId, to: VertexId },

    #[error("retract data does not match the table: {0}")]
    MalformedRetract(String),

    #[error("subset enumeration over {size} optional objects exceeds the guard of {limit}")]
    SubsetBudgetExceeded { size: usize, limit: usize },

    #[error("grid has a directed cycle, so its order is not antisymmetric")]
    NotAPospace,

    #[error("cover is invalid: {0}")]
    CoverInvalid(String),

    #[error("inclusion of the overlap is not functorial: {0}")]
    InclusionNotFunctorial(String),

    #[error("retracts disagree on the overlap: {0}")]
    IncompatibleRetracts(String),

    #[error("{0} processes exceed the dimension guard of {1}")]
    TooManyProcesses(usize, usize),

    #[error("deadlock analysis needs a scene without identifications")]
    GluedScene,

    #[error(transparent)]
    Pv(#[from] crate::pv::PvError),

    /// `line` and `column` are 0 when the problem has no position.
    #[error("scene file {line}:{column}: {message}")]
    SceneFile { message: String, line: usize, column: usize },
}
