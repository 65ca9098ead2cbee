//! Dense complex linear-algebra kernels with an explicit tolerance policy.
//!
//! Everything downstream of the Macaulay matrix — rank decisions, null-space
//! bases, echelon forms, column compressions, pseudo-inverse solves, and
//! eigendecompositions — funnels through this module. The factorizations
//! themselves are delegated to LAPACK (via `ndarray-linalg`); what this
//! module owns is the rank threshold convention, the pivot-search logic, and
//! deterministic ordering of results.
//!
//! The single tolerance rule: a singular value counts as nonzero when it
//! exceeds `eps * max(rows, cols) * sigma_max`, unless the caller supplies
//! an explicit threshold.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use ndarray_linalg::{Eig, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default rank threshold for a matrix with the given shape and largest
/// singular value.
pub fn default_rank_tol(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    f64::EPSILON * rows.max(cols) as f64 * sigma_max
}

/// Promote a real matrix to complex entries.
pub fn to_complex(a: ArrayView2<'_, f64>) -> Array2<Complex64> {
    a.map(|&x| Complex64::new(x, 0.0))
}

fn lapack_err(op: &str, e: impl std::fmt::Display) -> Error {
    Error::Numerical(format!("{op}: {e}"))
}

fn require_nonempty(a: &ArrayView2<'_, Complex64>, op: &str) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::Numerical(format!("{op}: empty matrix")));
    }
    Ok(())
}

/// Owned copy in standard (row-major) layout: slices and transposes can
/// carry strides the LAPACK bindings reject (length-1 axes normalize to
/// stride 0, which even `as_standard_layout` preserves).
fn standard_copy(a: &ArrayView2<'_, Complex64>) -> Array2<Complex64> {
    Array2::from_shape_vec(a.raw_dim(), a.iter().cloned().collect())
        .expect("shape matches element count")
}

/// Singular values of `a`, descending.
pub fn singular_values(a: ArrayView2<'_, Complex64>) -> Result<Vec<f64>> {
    require_nonempty(&a, "singular_values")?;
    let (_, s, _) = standard_copy(&a)
        .svd(false, false)
        .map_err(|e| lapack_err("svd", e))?;
    Ok(s.to_vec())
}

/// Largest singular value (spectral norm); 0 for an empty matrix.
pub fn spectral_norm(a: ArrayView2<'_, Complex64>) -> Result<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0.0);
    }
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Count of singular values above the threshold (default policy if `None`).
pub fn numerical_rank(a: ArrayView2<'_, Complex64>, tol: Option<f64>) -> Result<usize> {
    require_nonempty(&a, "numerical_rank")?;
    let sv = singular_values(a)?;
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let tol = tol.unwrap_or_else(|| default_rank_tol(a.nrows(), a.ncols(), sigma_max));
    Ok(sv.iter().filter(|&&s| s > tol).count())
}

/// An orthonormal basis of a right null space, with the diagnostics that
/// produced it.
#[derive(Debug, Clone)]
pub struct NullspaceBasis {
    /// Columns are the basis vectors; row count matches the source matrix's
    /// column count.
    pub basis: Array2<Complex64>,
    /// The rank threshold actually applied.
    pub tol_used: f64,
    /// Full singular spectrum of the source matrix, descending.
    pub singular_values: Vec<f64>,
}

impl NullspaceBasis {
    /// Dimension of the ambient space (rows of the basis).
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Number of basis vectors.
    pub fn nullity(&self) -> usize {
        self.basis.ncols()
    }
}

/// Orthonormal basis of the right null space of `a` from its SVD: the right
/// singular vectors whose singular values fall at or below the threshold.
pub fn nullspace(a: ArrayView2<'_, Complex64>, tol: Option<f64>) -> Result<NullspaceBasis> {
    require_nonempty(&a, "nullspace")?;
    let (_, sv, vt) = standard_copy(&a)
        .svd(false, true)
        .map_err(|e| lapack_err("svd", e))?;
    let vt = vt.expect("svd requested vt");
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let tol_used = tol.unwrap_or_else(|| default_rank_tol(a.nrows(), a.ncols(), sigma_max));
    let rank = sv.iter().filter(|&&s| s > tol_used).count();
    // Rows rank.. of Vt span the null space; conjugate-transpose them into
    // columns. Vt is full (cols x cols), so singular values beyond
    // min(rows, cols) are implicit zeros and their vectors are included.
    let tail = vt.slice(s![rank.., ..]).map(|z| z.conj());
    let basis = standard_copy(&tail.view().reversed_axes());
    Ok(NullspaceBasis {
        basis,
        tol_used,
        singular_values: sv.to_vec(),
    })
}

/// A null-space basis transformed so each column's first nonzero entry is a
/// 1 in a fresh pivot row.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    /// Same column span as the source basis.
    pub h: Array2<Complex64>,
    /// Strictly increasing; entry `j` is the row carrying column `j`'s
    /// leading 1. These are the lowest independent rows top-down.
    pub pivot_rows: Vec<usize>,
}

/// Column echelon form of a basis: scan rows top-down, collect the first
/// `ncols` rows that increase the rank of the accumulated stack, and map
/// the basis through the pseudo-inverse of that pivot stack.
pub fn column_echelon(z: ArrayView2<'_, Complex64>, pivot_tol: Option<f64>) -> Result<EchelonBasis> {
    require_nonempty(&z, "column_echelon")?;
    let k = z.ncols();
    let mut pivot_rows = Vec::with_capacity(k);
    let mut stack = Array2::<Complex64>::zeros((0, k));
    let mut rank = 0usize;
    for r in 0..z.nrows() {
        if pivot_rows.len() == k {
            break;
        }
        let mut candidate = Array2::<Complex64>::zeros((stack.nrows() + 1, k));
        candidate.slice_mut(s![..stack.nrows(), ..]).assign(&stack);
        candidate.row_mut(stack.nrows()).assign(&z.row(r));
        let new_rank = numerical_rank(candidate.view(), pivot_tol)?;
        if new_rank > rank {
            rank = new_rank;
            pivot_rows.push(r);
            stack = candidate;
        }
    }
    if pivot_rows.len() < k {
        return Err(Error::PivotFailure {
            detail: format!(
                "found {} independent rows for {} columns",
                pivot_rows.len(),
                k
            ),
        });
    }
    let h = pinv_solve_transposed(stack.view(), z)?;
    Ok(EchelonBasis { h, pivot_rows })
}

/// Solve `X · S = Z` for `X` (i.e. `X = Z · S^+`), used to normalize a basis
/// against its pivot-row stack.
fn pinv_solve_transposed(
    s_mat: ArrayView2<'_, Complex64>,
    z: ArrayView2<'_, Complex64>,
) -> Result<Array2<Complex64>> {
    // X = Z S^+  <=>  X^H = (S^+)^H Z^H = (S^H)^+ Z^H.
    let sh = standard_copy(&s_mat.map(|v| v.conj()).view().reversed_axes());
    let zh = standard_copy(&z.map(|v| v.conj()).view().reversed_axes());
    let xh = pinv_solve(sh.view(), zh.view(), None)?;
    Ok(standard_copy(&xh.map(|v| v.conj()).view().reversed_axes()))
}

/// Right-multiply `w` by an orthogonal matrix so its top `k` rows are
/// supported on the leading columns only; returns the rotated matrix and
/// the rank of the top block.
pub fn column_compress(
    w: ArrayView2<'_, Complex64>,
    k: usize,
    tol: Option<f64>,
) -> Result<(Array2<Complex64>, usize)> {
    require_nonempty(&w, "column_compress")?;
    if k == 0 || k > w.nrows() {
        return Err(Error::DimensionMismatch {
            expected: w.nrows(),
            got: k,
        });
    }
    let top = standard_copy(&w.slice(s![..k, ..]));
    let (_, sv, vt) = top.svd(false, true).map_err(|e| lapack_err("svd", e))?;
    let vt = vt.expect("svd requested vt");
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let tol_used = tol.unwrap_or_else(|| default_rank_tol(k, w.ncols(), sigma_max));
    let rank = sv.iter().filter(|&&s| s > tol_used).count();
    // Q = V; the top block becomes U * Sigma, supported on the first
    // `rank` columns.
    let q = standard_copy(&vt.map(|z| z.conj()).view().reversed_axes());
    Ok((w.dot(&q), rank))
}

/// Minimum-norm least-squares solve `X = A^+ B` through the SVD, zeroing
/// singular directions at or below the threshold.
pub fn pinv_solve(
    a: ArrayView2<'_, Complex64>,
    b: ArrayView2<'_, Complex64>,
    tol: Option<f64>,
) -> Result<Array2<Complex64>> {
    require_nonempty(&a, "pinv_solve")?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.nrows(),
        });
    }
    let (u, sv, vt) = standard_copy(&a)
        .svd(true, true)
        .map_err(|e| lapack_err("svd", e))?;
    let u = u.expect("svd requested u");
    let vt = vt.expect("svd requested vt");
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let tol_used = tol.unwrap_or_else(|| default_rank_tol(a.nrows(), a.ncols(), sigma_max));

    // X = V diag(1/sigma) U^H B over the retained directions.
    let ub = u.map(|z| z.conj()).reversed_axes().dot(&b);
    let kept = sv.len();
    let mut scaled = Array2::<Complex64>::zeros((a.ncols(), b.ncols()));
    for i in 0..kept {
        if sv[i] > tol_used {
            let inv = Complex64::new(1.0 / sv[i], 0.0);
            let row = ub.row(i).mapv(|z| z * inv);
            scaled.row_mut(i).assign(&row);
        }
    }
    Ok(vt.map(|z| z.conj()).reversed_axes().dot(&scaled))
}

/// Dense eigendecomposition with a deterministic eigenvalue order (sorted
/// by real part, then imaginary part); eigenvector columns follow.
pub fn eig(a: ArrayView2<'_, Complex64>) -> Result<(Vec<Complex64>, Array2<Complex64>)> {
    require_nonempty(&a, "eig")?;
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let (vals, vecs) = standard_copy(&a).eig().map_err(|e| lapack_err("eig", e))?;
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| {
        vals[i]
            .re
            .total_cmp(&vals[j].re)
            .then(vals[i].im.total_cmp(&vals[j].im))
    });
    let sorted_vals: Vec<Complex64> = order.iter().map(|&i| vals[i]).collect();
    let mut sorted_vecs = Array2::<Complex64>::zeros(vecs.raw_dim());
    for (out_col, &in_col) in order.iter().enumerate() {
        sorted_vecs
            .column_mut(out_col)
            .assign(&vecs.index_axis(Axis(1), in_col));
    }
    Ok((sorted_vals, sorted_vecs))
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &Array1<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
