//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Error`]; the variant
//! names follow the domain vocabulary (kinematic reachability, geometric
//! intersection, energy-budget safety) so that callers and the CLI can name
//! the violated condition precisely.

use thiserror::Error;

/// Unified error enumeration for all library operations.
#[derive(Debug, Error)]
pub enum Error {
    // ---- kinematics -----------------------------------------------------
    /// Inverse kinematics target lies outside the reachable annulus of the
    /// arm: an arccos argument left `[-1, 1]` by more than the clamping
    /// tolerance.
    #[error("inverse kinematics target unreachable (arccos argument {arg} outside [-1, 1])")]
    Unreachable { arg: f64 },
    /// The wrist center sits on the base rotation axis with no shoulder
    /// offset, so the base angle is indeterminate.
    #[error("singular wrist axis: wrist center on the base axis, q1 indeterminate")]
    SingularWristAxis,

    // ---- workspace ------------------------------------------------------
    /// An end-effector extension exceeds the arm reach, producing a
    /// non-positive dexterous radius.
    #[error("non-positive workspace radius: extension {extension} m exceeds arm reach {reach} m")]
    NonPositiveRadius { extension: f64, reach: f64 },
    /// An input left the mathematical domain of a geometric formula.
    #[error("domain error in {op}: {detail}")]
    DomainError { op: &'static str, detail: String },
    /// A geometric interval came out empty.
    #[error("empty interval in {op}: {detail}")]
    EmptyInterval { op: &'static str, detail: String },
    /// The detectability cone and the reach sphere do not overlap
    /// (negative discriminant of the height quadratic).
    #[error("no intersection: cone and sphere cross-section do not overlap (discriminant {disc})")]
    NoIntersection { disc: f64 },
    /// Meshing or joint-limit reduction produced no nodes.
    #[error("empty operational space: {0}")]
    EmptySpace(&'static str),

    // ---- actuation ------------------------------------------------------
    /// The controller and delay time constants nearly coincide; the partial
    /// fraction coefficients of the delayed response blow up.
    #[error(
        "near-degenerate time constants: |tau_in - tau_delay| < 1e-6 * tau_in \
         (tau_in {tau_in} s, tau_delay {tau_delay} s); perturb tau_delay"
    )]
    NearDegenerateTimeConstants { tau_in: f64, tau_delay: f64 },
    /// An integration grid does not resolve the electrical time constant.
    #[error("integration step too coarse: step {step} s exceeds limit {limit} s (= L/(10 R))")]
    StepTooCoarse { step: f64, limit: f64 },

    // ---- imaging --------------------------------------------------------
    /// A frame is smaller than the 3x3 estimator kernel.
    #[error("frame too small for noise estimation: {width}x{height}, need at least 3x3")]
    FrameTooSmall { width: usize, height: usize },
    /// Frames of different dimensions were combined.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// An operation over a list of frames received none.
    #[error("empty frame list")]
    EmptyList,
    /// A smoothing kernel request was invalid.
    #[error("bad kernel: {0}")]
    BadKernel(String),

    // ---- search ---------------------------------------------------------
    /// Fewer nodes than the initialization procedure requires.
    #[error("space too small: {0}")]
    SpaceTooSmall(&'static str),
    /// Count estimation was asked to interpolate from an empty explored map.
    #[error("empty explored set: estimation requires at least one explored node")]
    EmptyExploredSet,
    /// A trace contains no newly-explored iteration.
    #[error("no new nodes: the trace has no newly-explored iteration")]
    NoNewNodes,
    /// The return-energy safety invariant broke. Unreachable by
    /// construction; asserted on every iteration.
    #[error(
        "safety violation: return cost to the best explored node {cost} ws exceeds \
         remaining budget {remaining} ws (must be unreachable; asserted)"
    )]
    SafetyViolation { cost: f64, remaining: f64 },
    /// The four-node initialization tour costs more than the initial budget.
    #[error("insufficient initial energy: initialization tour costs {cost} ws, budget {budget} ws")]
    InsufficientInitialEnergy { cost: f64, budget: f64 },

    // ---- scenario / CLI -------------------------------------------------
    /// The scenario file failed to parse (position-annotated by the format
    /// parser).
    #[error("parse error: {0}")]
    ParseError(String),
    /// A scenario value violates a type invariant; names the invariant.
    #[error("validation error: {0}")]
    ValidationError(String),
    /// Filesystem failure while reading or writing artifacts.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 1 for parse/validation failures,
    /// 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ParseError(_) | Error::ValidationError(_) => 1,
            _ => 2,
        }
    }
}
