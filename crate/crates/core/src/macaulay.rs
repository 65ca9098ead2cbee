//! The Macaulay matrix: coefficient rows of all shifted equations up to a
//! total degree.
//!
//! Row `(i, a)` holds the coefficients of `z^a * f_i`, placed at the columns
//! of the product monomials; columns run over every monomial of degree at
//! most `d` in the crate's monomial order. For any true root `x`, the
//! matrix annihilates the Vandermonde vector of `x` by construction, which
//! is what makes its null space the carrier of all root information.
//!
//! Construction is embarrassingly parallel over rows; with the `parallel`
//! feature the row fill fans out over a thread pool and assembles in index
//! order, so the result is identical to the sequential build.

use std::collections::HashMap;

use ndarray::{s, Array2};
use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::to_complex;
use crate::monomial::{count_monomials, degree_block_offsets, enumerate_monomials, Monomial};
use crate::system::PolySystem;

/// Dense Macaulay matrix of a system at one degree, with its labels.
#[derive(Debug, Clone)]
pub struct MacaulayMatrix {
    data: Array2<f64>,
    degree: u32,
    row_labels: Vec<(usize, Monomial)>,
    col_monomials: Vec<Monomial>,
    block_offsets: Vec<usize>,
}

impl MacaulayMatrix {
    /// The coefficient matrix (rows = shifted equations, columns =
    /// monomials of degree `<= degree`).
    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    /// The matrix promoted to complex entries.
    pub fn complex_data(&self) -> Array2<Complex64> {
        to_complex(self.data.view())
    }

    /// The construction degree `d`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `(equation index, shift monomial)` per row, in row order.
    pub fn row_labels(&self) -> &[(usize, Monomial)] {
        &self.row_labels
    }

    /// Column monomials in order.
    pub fn col_monomials(&self) -> &[Monomial] {
        &self.col_monomials
    }

    /// Column ranges of the degree blocks: block `delta` spans
    /// `offsets[delta]..offsets[delta + 1]`.
    pub fn block_offsets(&self) -> &[usize] {
        &self.block_offsets
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    /// Render as CSV: a header of column monomials, then one labeled row
    /// per shifted equation (`f2` for the unshifted second equation,
    /// `z1^2*f2` for its shift by `z1^2`).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for m in &self.col_monomials {
            out.push(',');
            out.push_str(&m.to_string());
        }
        out.push('\n');
        for (r, (eq, shift)) in self.row_labels.iter().enumerate() {
            if shift.total_degree() == 0 {
                out.push_str(&format!("f{}", eq + 1));
            } else {
                out.push_str(&format!("{}*f{}", shift, eq + 1));
            }
            for c in 0..self.ncols() {
                out.push(',');
                out.push_str(&format!("{}", self.data[[r, c]]));
            }
            out.push('\n');
        }
        out
    }
}

/// The standard construction degree for a square system: the sum of the
/// equation degrees minus the variable count plus one (clamped below by the
/// largest equation degree so the build precondition always holds).
pub fn default_degree(sys: &PolySystem) -> Result<u32> {
    if !sys.is_square() {
        return Err(Error::NonSquareSystem {
            equations: sys.num_equations(),
            variables: sys.num_vars(),
        });
    }
    let degrees = sys.degrees();
    let sum: u32 = degrees.iter().sum();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let n = sys.num_vars() as u32;
    Ok((sum + 1).saturating_sub(n).max(max).max(1))
}

/// Row descriptors for a build: each is `(equation index, shift monomial)`,
/// equation-major with shifts ascending.
fn row_plan(sys: &PolySystem, d: u32) -> Vec<(usize, Monomial)> {
    let n = sys.num_vars();
    let mut plan = Vec::new();
    for (i, p) in sys.polys().iter().enumerate() {
        let budget = d - p.total_degree();
        for shift in enumerate_monomials(n, budget) {
            plan.push((i, shift));
        }
    }
    plan
}

/// Fill one row: coefficients of `z^shift * f_eq` at their product columns.
fn fill_row(
    sys: &PolySystem,
    col_index: &HashMap<Monomial, usize>,
    eq: usize,
    shift: &Monomial,
    ncols: usize,
) -> Vec<f64> {
    let mut row = vec![0.0; ncols];
    for (mono, coeff) in sys.polys()[eq].terms() {
        let target = shift.mul(mono).expect("consistent variable counts");
        let col = *col_index.get(&target).expect("product stays within degree");
        debug_assert_eq!(row[col], 0.0);
        row[col] = coeff;
    }
    row
}

fn assemble(
    sys: &PolySystem,
    d: u32,
    plan: Vec<(usize, Monomial)>,
    rows: Vec<Vec<f64>>,
    col_monomials: Vec<Monomial>,
) -> MacaulayMatrix {
    let ncols = col_monomials.len();
    let nrows = rows.len();
    let mut flat = Vec::with_capacity(nrows * ncols);
    for row in rows {
        flat.extend_from_slice(&row);
    }
    let data = Array2::from_shape_vec((nrows, ncols), flat).expect("row lengths are uniform");
    MacaulayMatrix {
        data,
        degree: d,
        row_labels: plan,
        col_monomials,
        block_offsets: degree_block_offsets(sys.num_vars(), d),
    }
}

fn check_degree(sys: &PolySystem, d: u32) -> Result<()> {
    let max = sys.degrees().into_iter().max().unwrap_or(0);
    if d < max {
        return Err(Error::DegreeTooLow {
            min: max as usize,
            got: d as usize,
        });
    }
    Ok(())
}

/// Build the Macaulay matrix of `sys` at degree `d` (requires `d` at least
/// the largest equation degree). Uses the parallel row fill when the
/// `parallel` feature is enabled; the result is identical either way.
pub fn build_macaulay(sys: &PolySystem, d: u32) -> Result<MacaulayMatrix> {
    check_degree(sys, d)?;
    let col_monomials = enumerate_monomials(sys.num_vars(), d);
    let col_index: HashMap<Monomial, usize> = col_monomials
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let ncols = col_monomials.len();
    let plan = row_plan(sys, d);

    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = plan
        .par_iter()
        .map(|(eq, shift)| fill_row(sys, &col_index, *eq, shift, ncols))
        .collect();

    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = plan
        .iter()
        .map(|(eq, shift)| fill_row(sys, &col_index, *eq, shift, ncols))
        .collect();

    Ok(assemble(sys, d, plan, rows, col_monomials))
}

/// Sequential build, kept callable regardless of features so the parallel
/// path has an in-tree baseline to compare against.
pub fn build_macaulay_sequential(sys: &PolySystem, d: u32) -> Result<MacaulayMatrix> {
    check_degree(sys, d)?;
    let col_monomials = enumerate_monomials(sys.num_vars(), d);
    let col_index: HashMap<Monomial, usize> = col_monomials
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let ncols = col_monomials.len();
    let plan = row_plan(sys, d);
    let rows: Vec<Vec<f64>> = plan
        .iter()
        .map(|(eq, shift)| fill_row(sys, &col_index, *eq, shift, ncols))
        .collect();
    Ok(assemble(sys, d, plan, rows, col_monomials))
}

/// Enlarge a Macaulay matrix to a strictly higher degree, copying every row
/// that already exists (old rows are prefixes of their new versions because
/// the column order is graded) and filling only the new shifts.
pub fn extend_macaulay(m: &MacaulayMatrix, sys: &PolySystem, d_new: u32) -> Result<MacaulayMatrix> {
    if d_new <= m.degree {
        return Err(Error::DegreeTooLow {
            min: m.degree as usize + 1,
            got: d_new as usize,
        });
    }
    check_degree(sys, d_new)?;
    let n = sys.num_vars();
    let col_monomials = enumerate_monomials(n, d_new);
    let col_index: HashMap<Monomial, usize> = col_monomials
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let ncols = col_monomials.len();
    let old_ncols = m.ncols();
    let plan = row_plan(sys, d_new);

    // Row start of each equation's block in the old matrix.
    let degrees = sys.degrees();
    let mut old_block_start = Vec::with_capacity(degrees.len());
    let mut acc = 0usize;
    for &di in &degrees {
        old_block_start.push(acc);
        acc += count_monomials(n, m.degree - di) as usize;
    }

    let old_budget: Vec<u32> = degrees.iter().map(|&di| m.degree - di).collect();
    let fill = |(eq, shift): &(usize, Monomial)| -> Vec<f64> {
        if shift.total_degree() <= old_budget[*eq] {
            let old_row = old_block_start[*eq] + shift.position();
            let mut row = vec![0.0; ncols];
            row[..old_ncols]
                .copy_from_slice(m.data.slice(s![old_row, ..]).as_slice().expect("row-major"));
            row
        } else {
            fill_row(sys, &col_index, *eq, shift, ncols)
        }
    };

    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = plan.par_iter().map(fill).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = plan.iter().map(fill).collect();

    Ok(assemble(sys, d_new, plan, rows, col_monomials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{numerical_rank, nullspace};
    use crate::vander::vandermonde_vector;
    use ndarray::array;

    fn two_parabola() -> PolySystem {
        PolySystem::parse("vars: z1 z2\n4*z1^2 - 16*z1 + z2^2 - 2*z2 + 13\n2*z1 + z2 - 7\n")
            .unwrap()
    }

    #[test]
    fn default_degree_formula() {
        assert_eq!(default_degree(&two_parabola()).unwrap(), 2);
        let lin = PolySystem::parse("vars: x y\nx - 1\ny - 2\n").unwrap();
        assert_eq!(default_degree(&lin).unwrap(), 1);
        let quad = PolySystem::parse("vars: x y\nx^2 + y^2 - 1\nx^2 - y\n").unwrap();
        assert_eq!(default_degree(&quad).unwrap(), 3);
        let tall = PolySystem::parse("vars: x\nx - 1\nx^2 - 1\n").unwrap();
        assert!(matches!(
            default_degree(&tall),
            Err(Error::NonSquareSystem { equations: 2, variables: 1 })
        ));
    }

    #[test]
    fn two_parabola_matrix_matches_hand_construction() {
        let m = build_macaulay(&two_parabola(), 2).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (4, 6));
        let want = array![
            [13.0, -16.0, -2.0, 4.0, 0.0, 1.0],
            [-7.0, 2.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, -7.0, 0.0, 2.0, 1.0, 0.0],
            [0.0, 0.0, -7.0, 0.0, 2.0, 1.0],
        ];
        assert_eq!(m.data(), &want);
        assert_eq!(numerical_rank(m.complex_data().view(), None).unwrap(), 4);
        assert_eq!(nullspace(m.complex_data().view(), None).unwrap().nullity(), 2);
        // Row labels: f1 unshifted; f2 shifted by 1, z1, z2.
        assert_eq!(m.row_labels()[0], (0, Monomial::one(2)));
        assert_eq!(m.row_labels()[2], (1, Monomial::var(2, 0)));
    }

    #[test]
    fn single_univariate_row() {
        let sys = PolySystem::parse("vars: z\nz^2 - 3*z + 2\n").unwrap();
        let m = build_macaulay(&sys, 2).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (1, 3));
        assert_eq!(m.data(), &array![[2.0, -3.0, 1.0]]);
    }

    #[test]
    fn sylvester_of_two_univariate_polynomials() {
        let sys = PolySystem::parse("vars: z\nz^3 + 2*z^2 - 5*z - 6\nz^2 - z - 2\n").unwrap();
        let m = build_macaulay(&sys, 4).unwrap();
        let want = array![
            [-6.0, -5.0, 2.0, 1.0, 0.0],
            [0.0, -6.0, -5.0, 2.0, 1.0],
            [-2.0, -1.0, 1.0, 0.0, 0.0],
            [0.0, -2.0, -1.0, 1.0, 0.0],
            [0.0, 0.0, -2.0, -1.0, 1.0],
        ];
        assert_eq!(m.data(), &want);
    }

    #[test]
    fn degree_below_max_is_rejected() {
        assert!(matches!(
            build_macaulay(&two_parabola(), 1),
            Err(Error::DegreeTooLow { min: 2, got: 1 })
        ));
    }

    #[test]
    fn row_count_matches_shift_enumeration() {
        for text in [
            "vars: x y\nx^2 + y^2 - 4\nx*y - 1\n",
            "vars: x y z\nx^2 - y\ny^2 - z\nz - 3\n",
            "vars: x\nx^3 - x\nx^2 - 1\n",
        ] {
            let sys = PolySystem::parse(text).unwrap();
            let dmax = sys.degrees().into_iter().max().unwrap();
            for d in dmax..=dmax + 2 {
                let m = build_macaulay(&sys, d).unwrap();
                let want: u64 = sys
                    .degrees()
                    .iter()
                    .map(|&di| count_monomials(sys.num_vars(), d - di))
                    .sum();
                assert_eq!(m.nrows() as u64, want);
                assert_eq!(m.ncols() as u64, count_monomials(sys.num_vars(), d));
            }
        }
    }

    #[test]
    fn roots_annihilate_the_matrix() {
        let m = build_macaulay(&two_parabola(), 3).unwrap();
        for root in [[2.0, 3.0], [3.0, 1.0]] {
            let coords: Vec<Complex64> =
                root.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let v = vandermonde_vector(&coords, 3);
            let mv = m.complex_data().dot(&v);
            let max = mv.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(max <= 1e-12, "residual {max} at root {root:?}");
        }
    }

    #[test]
    fn extend_equals_fresh_build_bitwise() {
        let sys = two_parabola();
        let m2 = build_macaulay(&sys, 2).unwrap();
        let m3 = extend_macaulay(&m2, &sys, 3).unwrap();
        let fresh = build_macaulay(&sys, 3).unwrap();
        assert_eq!((m3.nrows(), m3.ncols()), (9, 10));
        assert_eq!(m3.data(), fresh.data());
        assert_eq!(m3.row_labels(), fresh.row_labels());
        assert_eq!(m3.col_monomials(), fresh.col_monomials());

        // A second hop, and a multivariate quadratic pair.
        let m5 = extend_macaulay(&m3, &sys, 5).unwrap();
        assert_eq!(m5.data(), build_macaulay(&sys, 5).unwrap().data());

        let quad = PolySystem::parse("vars: x y\nx^2 + x*y - 10\ny^2 + x*y - 15\n").unwrap();
        let a = build_macaulay(&quad, 2).unwrap();
        let b = extend_macaulay(&a, &quad, 3).unwrap();
        assert_eq!(b.data(), build_macaulay(&quad, 3).unwrap().data());
    }

    #[test]
    fn extend_requires_strictly_larger_degree() {
        let sys = two_parabola();
        let m = build_macaulay(&sys, 2).unwrap();
        assert!(matches!(
            extend_macaulay(&m, &sys, 2),
            Err(Error::DegreeTooLow { .. })
        ));
    }

    #[test]
    fn sequential_and_default_builds_agree() {
        let sys = two_parabola();
        let a = build_macaulay(&sys, 4).unwrap();
        let b = build_macaulay_sequential(&sys, 4).unwrap();
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn homogenized_top_blocks_reproduce_the_affine_matrix() {
        // The degree-d rows/columns of the homogenized system's matrix are
        // the affine matrix in disguise: shift a -> its lift, column b ->
        // its lift, entry by entry.
        let sys = two_parabola();
        let d = 3u32;
        let m = build_macaulay(&sys, d).unwrap();
        let h = sys.homogenize();
        let mh = build_macaulay(&h, d).unwrap();

        let hcols: HashMap<Monomial, usize> = mh
            .col_monomials()
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, mono)| (mono, i))
            .collect();
        let hrows: HashMap<(usize, Monomial), usize> = mh
            .row_labels()
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, lab)| (lab, i))
            .collect();

        let degrees = sys.degrees();
        for (r, (eq, shift)) in m.row_labels().iter().enumerate() {
            let lifted_shift = shift.homogenize(d - degrees[*eq]).unwrap();
            let hr = hrows[&(*eq, lifted_shift)];
            for (c, mono) in m.col_monomials().iter().enumerate() {
                let hc = hcols[&mono.homogenize(d).unwrap()];
                assert_eq!(m.data()[[r, c]], mh.data()[[hr, hc]]);
            }
        }
    }

    #[test]
    fn csv_dump_labels_rows_and_columns() {
        let m = build_macaulay(&two_parabola(), 2).unwrap();
        let csv = m.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "row,1,z1,z2,z1^2,z1*z2,z2^2");
        assert_eq!(lines.next().unwrap(), "f1,13,-16,-2,4,0,1");
        assert_eq!(lines.next().unwrap(), "f2,-7,2,1,0,0,0");
        assert_eq!(lines.next().unwrap(), "z1*f2,0,-7,0,2,1,0");
        assert_eq!(lines.next().unwrap(), "z2*f2,0,0,-7,0,2,1");
    }
}
