use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// One violated invariant of a candidate space description.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Violation {
    ShapeMismatch { expected: usize, found: usize },
    NonFinite { row: usize, col: usize },
    NegativeEntry { row: usize, col: usize },
    NonZeroDiagonal { index: usize },
    AsymmetricMatrix { x: usize, y: usize },
    /// `dist[x][z] > dist[x][y] + dist[y][z]` beyond tolerance.
    TriangleViolation { x: usize, y: usize, z: usize },
    NegativeWeight { index: usize },
    WeightsNotProbability { sum: f64 },
    Empty,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ShapeMismatch { expected, found } => {
                write!(f, "shape mismatch: expected {expected}, found {found}")
            }
            Violation::NonFinite { row, col } => write!(f, "non-finite distance at ({row},{col})"),
            Violation::NegativeEntry { row, col } => write!(f, "negative distance at ({row},{col})"),
            Violation::NonZeroDiagonal { index } => write!(f, "nonzero diagonal at {index}"),
            Violation::AsymmetricMatrix { x, y } => write!(f, "asymmetric matrix at ({x},{y})"),
            Violation::TriangleViolation { x, y, z } => {
                write!(f, "triangle inequality violated: d({x},{z}) > d({x},{y}) + d({y},{z})")
            }
            Violation::NegativeWeight { index } => write!(f, "negative weight at {index}"),
            Violation::WeightsNotProbability { sum } => write!(f, "weights sum to {sum}, not 1"),
            Violation::Empty => write!(f, "space has no points"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid space: {} violation(s), first: {}", .0.len(), .0[0])]
    InvalidSpace(Vec<Violation>),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("alpha {0} out of range")]
    AlphaOutOfRange(f64),
    #[error("alpha vector must be nonempty with positive entries")]
    InvalidAlphaVector,
    #[error("alpha vector has total mass {0} > 1")]
    MassExceedsOne(f64),
    #[error("{what}: size {size} exceeds exact cap {cap}")]
    SizeLimitExceeded { what: &'static str, size: usize, cap: usize },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program objective is unbounded")]
    UnboundedObjective,
    #[error("field is not {bound}-Lipschitz at ({x},{y})")]
    NotLipschitz { x: usize, y: usize, bound: f64 },
    #[error("direction has l1 norm {0} > 1")]
    NotUnitL1(f64),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("map is not defined on support point {0}")]
    NotDefinedOnSupport(usize),
    #[error("assignment exceeds the mass of point {point}")]
    CapacityViolated { point: usize },
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("perturbation {delta} is not below the minimum positive weight {min_weight}")]
    DeltaTooLarge { delta: f64, min_weight: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
