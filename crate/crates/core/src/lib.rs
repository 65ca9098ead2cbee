//! Solve zero-dimensional multivariate polynomial systems and extract
//! multidimensional state-space realizations from them.
//!
//! The pipeline: build a Macaulay matrix from the system, compute its null
//! space, read the number of affine roots and roots at infinity off the
//! null space's degree-block rank pattern, then recover the roots as
//! eigenvalues of shift operators acting on the null-space basis. The same
//! basis, put in column echelon form, doubles as an observability matrix,
//! which yields an `n`-dimensional autonomous state-space model (a
//! descriptor model when there are roots at infinity) whose outputs
//! reproduce the system's behavior on a multidimensional grid.
//!
//! Modules follow the pipeline order:
//!
//! - [`monomial`], [`polynomial`], [`system`], [`point`], [`vander`]:
//!   polynomial values, the monomial order, parsing, evaluation.
//! - [`linalg`]: dense complex kernels (rank, null space, echelon form,
//!   pseudo-inverse solves, eigenvalues) with an explicit tolerance policy.
//! - [`macaulay`]: the quasi-Toeplitz coefficient matrix of all shifted
//!   equations up to a degree.
//! - [`solver`]: rank-pattern analysis, shift operators, root extraction,
//!   and clustering.
//! - [`realization`]: canonical realizations, descriptor splits for roots
//!   at infinity, grid simulation, and trajectory verification.

pub mod error;
pub mod linalg;
pub mod macaulay;
pub mod monomial;
pub mod point;
pub mod polynomial;
pub mod realization;
pub mod shifts;
pub mod solver;
pub mod system;
pub mod vander;

pub use error::{Error, Result};
pub use linalg::{EchelonBasis, NullspaceBasis};
pub use macaulay::{
    build_macaulay, build_macaulay_sequential, default_degree, extend_macaulay, MacaulayMatrix,
};
pub use monomial::{count_monomials, degree_block_offsets, enumerate_monomials, Monomial};
pub use point::Point;
pub use polynomial::Polynomial;
pub use realization::{
    canonical_realization, cayley_hamilton_residual, commutation_residual, descriptor_split,
    observability_matrix, realization_from_basis, simulate, simulate_sequential,
    verify_observability_annihilation, verify_trajectory, DescriptorRealization, Realization,
    TrajectoryGrid,
};
pub use shifts::{make_affine_selection, make_homogeneous_selection, ShiftKind, ShiftSelection};
pub use solver::{
    analyze, cluster_roots, find_gap, solve, solve_affine, verify_dual_basis, Analysis,
    Diagnostics, GapReport, Root, RootSet, SolveConfig,
};
pub use system::PolySystem;
pub use vander::{dual_vector, homogeneous_dual_vector, vandermonde_vector};
