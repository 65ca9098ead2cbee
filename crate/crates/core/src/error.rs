//! Crate-wide error type.
//!
//! Every fallible operation in this crate reports through [`Error`]; the
//! variants are grouped roughly by pipeline stage (parsing, matrix
//! construction, solving, realization). Variants carry enough context to
//! produce an actionable message without holding references into caller data.

use std::fmt;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by system parsing, Macaulay construction, root solving,
/// and realization extraction.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input text violated the system grammar.
    Parse {
        /// 1-based line of the offending token.
        line: usize,
        /// 1-based column of the offending token.
        col: usize,
        /// What went wrong.
        msg: String,
    },
    /// A polynomial simplified to zero, which carries no constraint.
    ZeroPolynomial { line: usize },
    /// The system contained no equations.
    EmptySystem,
    /// Two objects that must share a variable count did not.
    DimensionMismatch { expected: usize, got: usize },
    /// A requested degree was below the minimum the operation supports.
    DegreeTooLow { min: usize, got: usize },
    /// The heuristic solve degree is only defined for square systems.
    NonSquareSystem { equations: usize, variables: usize },
    /// A shift selection had an empty domain, so no shift-invariance
    /// relation can be formed from it.
    EmptyShiftDomain { shift: String },
    /// The shifted basis pencil was too ill-conditioned to solve.
    DegenerateShift { shift: String, detail: String },
    /// The null space (or a derived basis) had unusable structure.
    DegenerateBasis(String),
    /// Degree escalation hit its cap without the rank pattern stabilizing.
    NoStabilization { max_degree: usize },
    /// The monomial basis could not be put in the requested echelon form.
    PivotFailure { detail: String },
    /// A realization was requested for a system whose roots at infinity
    /// make the plain (non-descriptor) form inconsistent.
    SingularSystem { regular: usize, singular: usize },
    /// A trajectory grid was too small for the requested operation.
    GridTooSmall { needed: usize, got: usize },
    /// An underlying dense linear-algebra routine failed to converge.
    Numerical(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, col, msg } => {
                write!(f, "parse error at {line}:{col}: {msg}")
            }
            Error::ZeroPolynomial { line } => {
                write!(f, "polynomial on line {line} simplifies to zero")
            }
            Error::EmptySystem => write!(f, "system contains no equations"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::DegreeTooLow { min, got } => {
                write!(f, "degree {got} is below the minimum {min}")
            }
            Error::NonSquareSystem {
                equations,
                variables,
            } => write!(
                f,
                "system is not square ({equations} equations in {variables} variables); \
                 pass an explicit degree"
            ),
            Error::EmptyShiftDomain { shift } => {
                write!(f, "shift {shift} has an empty domain at this degree")
            }
            Error::DegenerateShift { shift, detail } => {
                write!(f, "shift {shift} produced a degenerate pencil: {detail}")
            }
            Error::DegenerateBasis(msg) => write!(f, "degenerate basis: {msg}"),
            Error::NoStabilization { max_degree } => write!(
                f,
                "rank pattern did not stabilize up to degree {max_degree}; \
                 the system may not be zero-dimensional"
            ),
            Error::PivotFailure { detail } => {
                write!(f, "echelon pivot search failed: {detail}")
            }
            Error::SingularSystem { regular, singular } => write!(
                f,
                "system has {singular} roots at infinity alongside {regular} affine roots; \
                 a descriptor realization is required"
            ),
            Error::GridTooSmall { needed, got } => {
                write!(f, "grid extent {got} is too small (need at least {needed})")
            }
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn messages_mention_key_context() {
        let e = Error::Parse {
            line: 3,
            col: 7,
            msg: "unexpected '^'".into(),
        };
        assert!(e.to_string().contains("3:7"));

        let e = Error::NonSquareSystem {
            equations: 2,
            variables: 3,
        };
        assert!(e.to_string().contains("2 equations"));

        let e = Error::NoStabilization { max_degree: 9 };
        assert!(e.to_string().contains('9'));
    }
}
