//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors reported by the geometric predicates, algorithms and generators.
///
/// Every fallible operation in the crate returns this type; algorithms never
/// silently answer `false` when a precondition or an internal validation
/// fails.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    /// The two shapes belong to kinds for which no intersection predicate is
    /// defined (for example a unit disk against a segment).
    #[error("unsupported pair: {0} vs {1}")]
    UnsupportedPair(&'static str, &'static str),

    /// Two unit circles with coincident centers were asked for their
    /// intersection points.
    #[error("degenerate circles: coincident centers")]
    DegenerateCircles,

    /// A shape violates its type invariants.
    #[error("invalid shape #{index}: {reason}")]
    InvalidShape {
        /// Position of the offending shape in its input sequence.
        index: usize,
        /// Human readable description of the violated invariant.
        reason: String,
    },

    /// A parameter is outside its documented domain.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A disk relevant to a cell pair does not contain the pair's origin.
    #[error("stabbing violated: disk {disk} does not contain the origin")]
    StabbingViolated {
        /// Index of the disk in the family's disk list.
        disk: usize,
    },

    /// Ray shooting was requested on a flower with no disks.
    #[error("empty flower")]
    EmptyFlower,

    /// A runtime validator detected that a structural assumption of the
    /// algorithm does not hold for this input.
    #[error("validation failed: {0}")]
    Validation(String),

    /// Degenerate input rejected by a structure that assumes general position.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A memoized table required by a recurrence was not available.
    #[error("dependency error: {0}")]
    Dependency(String),

    /// A size limit of an enumeration routine was exceeded.
    #[error("size error: {0}")]
    Size(String),

    /// A generated construction failed its brute-force validation.
    #[error("construction invalid: {0}")]
    ConstructionInvalid(String),

    /// The requested construction is not generated by this toolkit.
    #[error("unsupported construction: {0}")]
    UnsupportedConstruction(String),

    /// An instance file could not be parsed.
    #[error("parse error at line {line}, field `{field}`: {message}")]
    Parse {
        /// 1-based line number.
        line: usize,
        /// Name of the offending field.
        field: String,
        /// Description of the problem.
        message: String,
    },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, GeoError>;
