//! Row-selection maps that realize "multiply by a variable" on a monomial
//! basis.
//!
//! On the monomials of degree at most `d`, multiplying by an affine
//! variable maps each degree-`<= d-1` monomial to another monomial in the
//! basis; pairing source and target row indices turns that action into a
//! pair of selection matrices. The same idea on the exact-degree-`d`
//! homogeneous grid (which the affine basis represents one-to-one) trades
//! one variable's exponent for another's, covering the homogenization
//! variable as index 0. These index maps are what turn a null-space basis
//! into eigenvalue problems.

use crate::error::{Error, Result};
use crate::monomial::{count_monomials, enumerate_monomials};

use ndarray::Array2;
use num_complex::Complex64;

/// What a selection pair encodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShiftKind {
    /// Multiply by affine variable `i` (0-based): degree-`<= d-1` rows map
    /// to their products.
    AffineUp(usize),
    /// On the exact-degree-`d` homogeneous grid: raise variable `up` and
    /// lower variable `down` (both in `0..=n`, index 0 being the
    /// homogenization variable).
    Homogeneous { up: usize, down: usize },
}

/// Paired source/target row indices into the degree-`<= d` monomial basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSelection {
    pub rows_from: Vec<usize>,
    pub rows_to: Vec<usize>,
    pub kind: ShiftKind,
}

impl ShiftSelection {
    /// Number of mapped pairs.
    pub fn len(&self) -> usize {
        self.rows_from.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows_from.is_empty()
    }

    /// Gather the source rows of `m`.
    pub fn take_from(&self, m: &Array2<Complex64>) -> Array2<Complex64> {
        gather_rows(m, &self.rows_from)
    }

    /// Gather the target rows of `m`.
    pub fn take_to(&self, m: &Array2<Complex64>) -> Array2<Complex64> {
        gather_rows(m, &self.rows_to)
    }
}

fn gather_rows(m: &Array2<Complex64>, rows: &[usize]) -> Array2<Complex64> {
    let mut out = Array2::zeros((rows.len(), m.ncols()));
    for (r, &src) in rows.iter().enumerate() {
        out.row_mut(r).assign(&m.row(src));
    }
    out
}

/// Selection for multiplying by affine variable `var` (0-based) on the
/// degree-`<= d` basis: sources are all monomials of degree `<= d-1`.
pub fn make_affine_selection(n: usize, d: u32, var: usize) -> Result<ShiftSelection> {
    if var >= n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: var + 1,
        });
    }
    if d == 0 {
        return Err(Error::DegreeTooLow { min: 1, got: 0 });
    }
    let monos = enumerate_monomials(n, d - 1);
    let rows_from: Vec<usize> = (0..monos.len()).collect();
    let rows_to: Vec<usize> = monos.iter().map(|m| m.shift_up(var).position()).collect();
    Ok(ShiftSelection {
        rows_from,
        rows_to,
        kind: ShiftKind::AffineUp(var),
    })
}

/// Selection for the homogeneous up-in-`zi`/down-in-`zj` trade on the
/// exact-degree-`d` grid, indexed through the affine degree-`<= d` basis
/// (affine monomial `b` stands for `z0^(d-|b|) * z^b`).
///
/// `i` and `j` are homogeneous variable indices in `0..=n`, `i != j`;
/// index 0 is the homogenization variable. Sources are the monomials whose
/// `zj` exponent is at least 1.
pub fn make_homogeneous_selection(n: usize, d: u32, i: usize, j: usize) -> Result<ShiftSelection> {
    if i > n || j > n {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            got: i.max(j) + 1,
        });
    }
    if i == j {
        return Err(Error::DegenerateShift {
            shift: format!("{i}/{j}"),
            detail: "up and down variable coincide".into(),
        });
    }
    let monos = enumerate_monomials(n, d);
    let mut rows_from = Vec::new();
    let mut rows_to = Vec::new();
    for (idx, m) in monos.iter().enumerate() {
        let deg = m.total_degree();
        // Homogeneous exponent of the down variable.
        let available = if j == 0 { d - deg } else { m.exponent(j - 1) };
        if available == 0 {
            continue;
        }
        let image = match (i, j) {
            (0, j) => m.shift_down(j - 1).expect("exponent checked"),
            (i, 0) => m.shift_up(i - 1),
            (i, j) => m
                .shift_down(j - 1)
                .expect("exponent checked")
                .shift_up(i - 1),
        };
        rows_from.push(idx);
        rows_to.push(image.position());
    }
    Ok(ShiftSelection {
        rows_from,
        rows_to,
        kind: ShiftKind::Homogeneous { up: i, down: j },
    })
}

/// Row count of the affine source block (monomials of degree `<= d-1`).
pub fn affine_source_count(n: usize, d: u32) -> usize {
    count_monomials(n, d - 1) as usize
}
