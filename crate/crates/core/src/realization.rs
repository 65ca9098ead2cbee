//! State-space realizations read off the null-space basis.
//!
//! A column-echelon null-space basis doubles as an observability matrix:
//! its pivot rows name the state monomials, and shifting a state monomial
//! up by one variable lands on another basis row, which defines one state
//! transition matrix per variable. The result is an autonomous
//! multidimensional model w(k) = c x(k), x(k + e_i) = A_i x(k) whose
//! outputs are sums of the root exponentials, so the original equations
//! annihilate every trajectory. Roots at infinity split off into a
//! nilpotent descriptor part.

use crate::error::{Error, Result};
use crate::linalg::{eig, pinv_solve, singular_values, spectral_norm, EchelonBasis};
use crate::macaulay::MacaulayMatrix;
use crate::monomial::{degree_block_offsets, enumerate_monomials, Monomial};
use crate::shifts::{make_affine_selection, make_homogeneous_selection};
use crate::solver::{random_combination, Analysis};
use crate::system::PolySystem;

use ndarray::{s, Array1, Array2, ArrayD, ArrayView2, IxDyn};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Seed for the fixed eigenvector mixing used by the initial-state
/// convention; independent of the solver's configurable seed so a
/// realization is reproducible on its own.
const X0_SEED: u64 = 42;

/// An autonomous multidimensional state-space model.
#[derive(Debug, Clone)]
pub struct Realization {
    /// One state transition matrix per variable, all commuting.
    pub a: Vec<Array2<Complex64>>,
    /// Output row: w(k) = c x(k).
    pub c: Array1<Complex64>,
    /// Initial state; the convention makes the output the plain sum of the
    /// root exponentials.
    pub x0: Array1<Complex64>,
    /// Monomials naming the states (empty for coefficient-space states).
    pub state_monomials: Vec<Monomial>,
    /// Degree of the basis the realization was read from.
    pub degree: u32,
    /// Number of variables.
    pub num_vars: usize,
}

impl Realization {
    /// State dimension.
    pub fn state_dim(&self) -> usize {
        self.c.len()
    }
}

/// Descriptor split: a block-diagonal model whose regular block carries the
/// affine roots and whose singular block is nilpotent in the degree
/// direction, carrying the roots at infinity.
#[derive(Debug, Clone)]
pub struct DescriptorRealization {
    /// Degree-direction operator: identity on the regular block, nilpotent
    /// on the singular block.
    pub a0: Array2<Complex64>,
    /// Per-variable operators, block diagonal.
    pub a: Vec<Array2<Complex64>>,
    /// Affine state dimension.
    pub regular_dim: usize,
    /// Infinity state dimension.
    pub singular_dim: usize,
    /// Norm of the singular block of `a0` raised to its dimension; near
    /// zero when the split is sound.
    pub e0_nilpotency_residual: f64,
    /// Down-shift variable used on the singular block, when one exists.
    pub down_variable: Option<usize>,
}

impl DescriptorRealization {
    /// The regular block of the operator for variable `i` (0-based).
    pub fn regular_block(&self, i: usize) -> ArrayView2<'_, Complex64> {
        self.a[i].slice(s![..self.regular_dim, ..self.regular_dim])
    }

    /// The singular block of the operator for variable `i` (0-based).
    pub fn singular_block(&self, i: usize) -> ArrayView2<'_, Complex64> {
        self.a[i].slice(s![self.regular_dim.., self.regular_dim..])
    }
}

/// A sampled output grid with one axis per variable.
#[derive(Debug, Clone)]
pub struct TrajectoryGrid {
    /// w(k) over all grid cells, axis order matching the variables.
    pub values: ArrayD<Complex64>,
    /// Samples along each axis.
    pub extents: Vec<usize>,
}

/// Per-variable shift operators on a degree-limited basis: low-degree rows
/// mapped to their shifted images.
fn affine_shift_ops(
    z: &Array2<Complex64>,
    num_vars: usize,
    degree: u32,
    tol: Option<f64>,
) -> Result<Vec<Array2<Complex64>>> {
    if degree == 0 {
        return Err(Error::DegreeTooLow { min: 1, got: 0 });
    }
    let offsets = degree_block_offsets(num_vars, degree);
    if z.nrows() != offsets[degree as usize + 1] {
        return Err(Error::DimensionMismatch {
            expected: offsets[degree as usize + 1],
            got: z.nrows(),
        });
    }
    let s0 = z.slice(s![..offsets[degree as usize], ..]);
    let mut ops = Vec::with_capacity(num_vars);
    for i in 0..num_vars {
        let sel = make_affine_selection(num_vars, degree, i)?;
        let to = sel.take_to(z);
        ops.push(pinv_solve(s0, to.view(), tol)?);
    }
    Ok(ops)
}

/// Initial state from the fixed convention: eigendecompose a random
/// combination of the transition matrices, scale each eigencolumn so the
/// full basis vector it reconstructs has a unit degree-0 entry, and sum.
/// `full` maps state coefficients to the complete degree-limited vector;
/// `state_rows` picks the state entries out of that vector (`None` keeps
/// the coefficients themselves as states).
fn initial_state(
    a: &[Array2<Complex64>],
    full: &Array2<Complex64>,
    state_rows: Option<&[usize]>,
) -> Result<Array1<Complex64>> {
    let m = match a.first() {
        Some(first) => first.nrows(),
        None => return Err(Error::DegenerateBasis("no transition matrices".into())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(X0_SEED);
    let gamma = random_combination(&mut rng, a.len());
    let mut a_gamma = Array2::<Complex64>::zeros((m, m));
    for (op, &g) in a.iter().zip(&gamma) {
        a_gamma.scaled_add(Complex64::new(g, 0.0), op);
    }
    let (_, t) = eig(a_gamma.view())?;
    let recon = full.dot(&t);
    let mut x0 = Array1::<Complex64>::zeros(m);
    for k in 0..m {
        let head = recon[[0, k]];
        let col_max = recon.column(k).iter().map(|z| z.norm()).fold(0.0, f64::max);
        // An eigencolumn with no degree-0 content cannot be normalized to
        // a unit constant; it contributes unscaled.
        let scale = if head.norm() <= f64::EPSILON * col_max {
            Complex64::new(1.0, 0.0)
        } else {
            head
        };
        match state_rows {
            Some(rows) => {
                for (si, &r) in rows.iter().enumerate() {
                    x0[si] += recon[[r, k]] / scale;
                }
            }
            None => {
                for si in 0..m {
                    x0[si] += t[[si, k]] / scale;
                }
            }
        }
    }
    Ok(x0)
}

/// Realization in the pivot-monomial state basis of a column-echelon
/// null-space basis of degree `degree` in `num_vars` variables.
///
/// Each pivot monomial must keep total degree below `degree` so its
/// up-shifts stay inside the basis.
pub fn canonical_realization(
    h: &EchelonBasis,
    num_vars: usize,
    degree: u32,
) -> Result<Realization> {
    let m = h.h.ncols();
    if m == 0 {
        return Err(Error::DegenerateBasis("empty echelon basis".into()));
    }
    if h.pivot_rows.len() < m {
        return Err(Error::PivotFailure {
            detail: format!(
                "{} pivots for {} columns",
                h.pivot_rows.len(),
                m
            ),
        });
    }
    let monos = enumerate_monomials(num_vars, degree);
    if h.h.nrows() != monos.len() {
        return Err(Error::DimensionMismatch {
            expected: monos.len(),
            got: h.h.nrows(),
        });
    }
    let state_monomials: Vec<Monomial> = h.pivot_rows[..m]
        .iter()
        .map(|&r| monos[r].clone())
        .collect();
    for sm in &state_monomials {
        if sm.total_degree() >= degree {
            return Err(Error::PivotFailure {
                detail: format!(
                    "pivot monomial of degree {} has no room to shift within \
                     degree {}",
                    sm.total_degree(),
                    degree
                ),
            });
        }
    }
    let gather = |rows: &[usize]| -> Array2<Complex64> {
        let mut out = Array2::zeros((rows.len(), m));
        for (k, &r) in rows.iter().enumerate() {
            out.row_mut(k).assign(&h.h.row(r));
        }
        out
    };
    let s0 = gather(&h.pivot_rows[..m]);
    let mut a = Vec::with_capacity(num_vars);
    for i in 0..num_vars {
        let shifted: Vec<usize> = state_monomials
            .iter()
            .map(|sm| sm.shift_up(i).position())
            .collect();
        let si = gather(&shifted);
        a.push(pinv_solve(s0.view(), si.view(), None)?);
    }
    let c = h.h.row(0).to_owned();
    let x0 = initial_state(&a, &h.h, Some(&h.pivot_rows[..m]))?;
    Ok(Realization {
        a,
        c,
        x0,
        state_monomials,
        degree,
        num_vars,
    })
}

/// Realization with coefficient-space states, valid for any (not
/// necessarily echelon) basis of the degree-`degree` null space.
pub fn realization_from_basis(
    z: &Array2<Complex64>,
    num_vars: usize,
    degree: u32,
) -> Result<Realization> {
    if z.ncols() == 0 {
        return Err(Error::DegenerateBasis("empty basis".into()));
    }
    let a = affine_shift_ops(z, num_vars, degree, None)?;
    let c = z.row(0).to_owned();
    let x0 = initial_state(&a, z, None)?;
    Ok(Realization {
        a,
        c,
        x0,
        state_monomials: Vec::new(),
        degree,
        num_vars,
    })
}

/// Rows c A^alpha for all monomials alpha of total degree at most `d`, in
/// the monomial order.
pub fn observability_matrix(r: &Realization, d: u32) -> Result<Array2<Complex64>> {
    let m = r.state_dim();
    let monos = enumerate_monomials(r.num_vars, d);
    let mut rows = Array2::<Complex64>::zeros((monos.len(), m));
    rows.row_mut(0).assign(&r.c);
    for (pos, mono) in monos.iter().enumerate().skip(1) {
        let axis = (0..r.num_vars)
            .find(|&i| mono.exponent(i) > 0)
            .expect("non-constant monomial");
        let pred = mono
            .shift_down(axis)
            .expect("positive exponent")
            .position();
        let prev = rows.row(pred).to_owned();
        rows.row_mut(pos).assign(&prev.dot(&r.a[axis]));
    }
    Ok(rows)
}

/// Induced infinity norm: largest absolute row sum.
fn inf_norm(a: ArrayView2<'_, Complex64>) -> f64 {
    (0..a.nrows())
        .map(|i| a.row(i).iter().map(|z| z.norm()).sum())
        .fold(0.0, f64::max)
}

/// Worst relative commutator norm over all pairs of transition matrices;
/// near zero exactly when the family acts like coordinates of common
/// eigenstructure. Zero for fewer than two matrices.
pub fn commutation_residual(a: &[Array2<Complex64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let ab = a[i].dot(&a[j]);
            let ba = a[j].dot(&a[i]);
            let scale = inf_norm(ab.view()).max(inf_norm(ba.view())).max(1.0);
            worst = worst.max(inf_norm((&ab - &ba).view()) / scale);
        }
    }
    worst
}

/// Largest induced-infinity-norm of f_i(A_1, ..., A_n) over the system's
/// equations: the matrix counterpart of the roots satisfying the system.
pub fn cayley_hamilton_residual(r: &Realization, sys: &PolySystem) -> Result<f64> {
    if sys.num_vars() != r.num_vars {
        return Err(Error::DimensionMismatch {
            expected: r.num_vars,
            got: sys.num_vars(),
        });
    }
    let m = r.state_dim();
    let top = sys.degrees().into_iter().max().unwrap_or(0);
    let monos = enumerate_monomials(r.num_vars, top);
    // Matrix powers A^alpha by extending along the smallest axis.
    let mut powers: Vec<Array2<Complex64>> = Vec::with_capacity(monos.len());
    powers.push(Array2::eye(m));
    for mono in monos.iter().skip(1) {
        let axis = (0..r.num_vars)
            .find(|&i| mono.exponent(i) > 0)
            .expect("non-constant monomial");
        let pred = mono
            .shift_down(axis)
            .expect("positive exponent")
            .position();
        powers.push(powers[pred].dot(&r.a[axis]));
    }
    let mut worst = 0.0f64;
    for poly in sys.polys() {
        let mut acc = Array2::<Complex64>::zeros((m, m));
        for (mono, coeff) in poly.terms() {
            acc.scaled_add(Complex64::new(coeff, 0.0), &powers[mono.position()]);
        }
        worst = worst.max(inf_norm(acc.view()));
    }
    Ok(worst)
}

/// Normalized annihilation residual |M O| / (|M| |O|) in induced infinity
/// norms: the Macaulay rows kill the observability columns when the
/// realization reproduces the system's behavior.
pub fn verify_observability_annihilation(
    m: &MacaulayMatrix,
    o: &Array2<Complex64>,
) -> Result<f64> {
    let mc = m.complex_data();
    if mc.ncols() != o.nrows() {
        return Err(Error::DimensionMismatch {
            expected: mc.ncols(),
            got: o.nrows(),
        });
    }
    let prod = mc.dot(o);
    let denom = inf_norm(mc.view()) * inf_norm(o.view());
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(inf_norm(prod.view()) / denom)
}

/// Block-diagonal descriptor model from a solved analysis: the regular
/// block carries the affine shift operators, the singular block the
/// up/down exponent trades of the roots at infinity, with the degree
/// direction nilpotent there.
pub fn descriptor_split(
    analysis: &Analysis,
    sys: &PolySystem,
    tol: Option<f64>,
) -> Result<DescriptorRealization> {
    let n = sys.num_vars();
    let m_r = analysis.gap.regular_count;
    let m_s = analysis.gap.singular_count;
    let d_star = analysis.gap.d_star.ok_or(Error::SingularSystem {
        regular: m_r,
        singular: m_s,
    })?;
    let dim = m_r + m_s;
    let regular_ops = if m_r > 0 {
        affine_shift_ops(&analysis.z_regular, n, d_star, tol)?
    } else {
        vec![Array2::zeros((0, 0)); n]
    };

    let mut e0 = Array2::<Complex64>::zeros((m_s, m_s));
    let mut singular_ops: Vec<Array2<Complex64>> = vec![Array2::zeros((0, 0)); n];
    let mut down_variable = None;
    if m_s > 0 {
        let degree = analysis.gap.degree;
        // Prefer the down variable whose domain rows retain the singular
        // columns best, exactly as in root extraction.
        let mut candidates: Vec<(usize, f64)> = Vec::with_capacity(n);
        for j in 1..=n {
            let sel = make_homogeneous_selection(n, degree, 0, j)?;
            let dom = sel.take_from(&analysis.z_singular);
            let smin = if dom.nrows() < m_s {
                0.0
            } else {
                singular_values(dom.view())?.last().copied().unwrap_or(0.0)
            };
            candidates.push((j, smin));
        }
        candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let (j, smin) = candidates[0];
        if smin <= f64::EPSILON * (analysis.z_singular.nrows() as f64) {
            return Err(Error::SingularSystem {
                regular: m_r,
                singular: m_s,
            });
        }
        down_variable = Some(j);
        for i in (0..=n).filter(|&i| i != j) {
            let sel = make_homogeneous_selection(n, degree, i, j)?;
            let from = sel.take_from(&analysis.z_singular);
            let to = sel.take_to(&analysis.z_singular);
            let b = pinv_solve(from.view(), to.view(), tol)?;
            if i == 0 {
                e0 = b;
            } else {
                singular_ops[i - 1] = b;
            }
        }
        // The down direction itself acts as the identity on its block.
        singular_ops[j - 1] = Array2::eye(m_s);
    }

    let embed = |reg: &Array2<Complex64>, sing: &Array2<Complex64>| {
        let mut out = Array2::<Complex64>::zeros((dim, dim));
        if m_r > 0 {
            out.slice_mut(s![..m_r, ..m_r]).assign(reg);
        }
        if m_s > 0 {
            out.slice_mut(s![m_r.., m_r..]).assign(sing);
        }
        out
    };
    let identity_r = Array2::<Complex64>::eye(m_r);
    let a0 = embed(&identity_r, &e0);
    let a: Vec<Array2<Complex64>> = (0..n)
        .map(|i| {
            let reg = if m_r > 0 {
                regular_ops[i].clone()
            } else {
                Array2::zeros((0, 0))
            };
            embed(&reg, &singular_ops[i])
        })
        .collect();
    let e0_nilpotency_residual = if m_s > 0 {
        let mut power = Array2::<Complex64>::eye(m_s);
        for _ in 0..m_s {
            power = power.dot(&e0);
        }
        spectral_norm(power.view())?
    } else {
        0.0
    };
    Ok(DescriptorRealization {
        a0,
        a,
        regular_dim: m_r,
        singular_dim: m_s,
        e0_nilpotency_residual,
        down_variable,
    })
}

fn flat_strides(extents: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; extents.len()];
    for i in (0..extents.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * extents[i + 1];
    }
    strides
}

fn simulate_states(
    r: &Realization,
    extents: &[usize],
    parallel: bool,
) -> Result<Vec<Array1<Complex64>>> {
    if extents.len() != r.num_vars {
        return Err(Error::DimensionMismatch {
            expected: r.num_vars,
            got: extents.len(),
        });
    }
    if extents.iter().any(|&e| e == 0) {
        return Err(Error::GridTooSmall { needed: 1, got: 0 });
    }
    let strides = flat_strides(extents);
    let total: usize = extents.iter().product();
    let slice_len = total / extents[0];
    let mut states: Vec<Array1<Complex64>> = Vec::with_capacity(total);

    // The first slice along axis 1 advances along the remaining axes,
    // each cell one step after an already-filled neighbor.
    for flat in 0..slice_len {
        if flat == 0 {
            states.push(r.x0.clone());
            continue;
        }
        let mut rem = flat;
        let mut axis = 0;
        let mut pred = 0;
        for i in 1..extents.len() {
            let k = rem / strides[i];
            rem %= strides[i];
            if k > 0 && axis == 0 {
                axis = i;
                pred = flat - strides[i];
            }
        }
        states.push(r.a[axis].dot(&states[pred]));
    }

    // Every later slice depends only on the previous one, cell by cell.
    for _slice in 1..extents[0] {
        let base = states.len() - slice_len;
        let prev = &states[base..];
        #[cfg(feature = "parallel")]
        let next: Vec<Array1<Complex64>> = if parallel {
            prev.par_iter().map(|x| r.a[0].dot(x)).collect()
        } else {
            prev.iter().map(|x| r.a[0].dot(x)).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let next: Vec<Array1<Complex64>> = {
            let _ = parallel;
            prev.iter().map(|x| r.a[0].dot(x)).collect()
        };
        states.extend(next);
    }
    Ok(states)
}

fn grid_from_states(
    r: &Realization,
    extents: &[usize],
    states: Vec<Array1<Complex64>>,
) -> TrajectoryGrid {
    let values: Vec<Complex64> = states
        .iter()
        .map(|x| r.c.iter().zip(x.iter()).map(|(a, b)| a * b).sum())
        .collect();
    let values = ArrayD::from_shape_vec(IxDyn(extents), values)
        .expect("state count matches the grid");
    TrajectoryGrid {
        values,
        extents: extents.to_vec(),
    }
}

/// Sample the model output on a grid with the given per-axis extents.
pub fn simulate(r: &Realization, extents: &[usize]) -> Result<TrajectoryGrid> {
    let states = simulate_states(r, extents, true)?;
    Ok(grid_from_states(r, extents, states))
}

/// [`simulate`] with the slice-parallel path disabled, for comparison.
pub fn simulate_sequential(r: &Realization, extents: &[usize]) -> Result<TrajectoryGrid> {
    let states = simulate_states(r, extents, false)?;
    Ok(grid_from_states(r, extents, states))
}

/// Largest modulus over all equations and all grid placements of the
/// equation applied as a shift template to the trajectory; near zero when
/// the grid is a behavior of the system.
pub fn verify_trajectory(sys: &PolySystem, grid: &TrajectoryGrid) -> Result<f64> {
    let n = sys.num_vars();
    if grid.extents.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: grid.extents.len(),
        });
    }
    let mut worst = 0.0f64;
    for poly in sys.polys() {
        let mut window = vec![0u32; n];
        for (mono, _) in poly.terms() {
            for i in 0..n {
                window[i] = window[i].max(mono.exponent(i));
            }
        }
        for i in 0..n {
            if (window[i] as usize) >= grid.extents[i] {
                return Err(Error::GridTooSmall {
                    needed: window[i] as usize + 1,
                    got: grid.extents[i],
                });
            }
        }
        let counts: Vec<usize> = (0..n)
            .map(|i| grid.extents[i] - window[i] as usize)
            .collect();
        let mut offset = vec![0usize; n];
        'grid: loop {
            let mut acc = Complex64::new(0.0, 0.0);
            for (mono, coeff) in poly.terms() {
                let idx: Vec<usize> = (0..n)
                    .map(|i| offset[i] + mono.exponent(i) as usize)
                    .collect();
                acc += Complex64::new(coeff, 0.0) * grid.values[IxDyn(&idx)];
            }
            worst = worst.max(acc.norm());
            let mut axis = n;
            while axis > 0 {
                axis -= 1;
                offset[axis] += 1;
                if offset[axis] < counts[axis] {
                    continue 'grid;
                }
                offset[axis] = 0;
            }
            break;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::column_echelon;
    use crate::solver::{analyze, SolveConfig};

    fn parabola_line() -> PolySystem {
        PolySystem::parse("vars: z1 z2\n13 - 16*z1 - 2*z2 + 4*z1^2 + z2^2\n-7 + 2*z1 + z2\n")
            .unwrap()
    }

    fn univariate_quadratic() -> PolySystem {
        PolySystem::parse("vars: z\n2 - 3*z + z^2\n").unwrap()
    }

    fn gcd_pair() -> PolySystem {
        PolySystem::parse("vars: z\n2 - z - 2z^2 + z^3\n-2 - z + z^2\n").unwrap()
    }

    fn fourfold() -> PolySystem {
        PolySystem::parse(
            "vars: z1 z2\n4 - 4*z2 + z2^2\n1 + 2*z1 - 2*z2 + z1^2 - 2*z1*z2 + z2^2\n",
        )
        .unwrap()
    }

    fn two_conics() -> PolySystem {
        PolySystem::parse("vars: z1 z2\nz1^2 + z1*z2 - 10\nz2^2 + z1*z2 - 15\n").unwrap()
    }

    fn canonical_for(sys: &PolySystem) -> (Realization, Analysis) {
        let a = analyze(sys, &SolveConfig::default()).unwrap();
        let d_star = a.gap.d_star.unwrap();
        let h = column_echelon(a.z_regular.view(), None).unwrap();
        let r = canonical_realization(&h, sys.num_vars(), d_star).unwrap();
        (r, a)
    }

    fn approx(a: Complex64, b: f64, tol: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() < tol
    }

    fn assert_matrix(actual: &Array2<Complex64>, want: &[&[f64]], tol: f64) {
        assert_eq!(actual.nrows(), want.len(), "row count");
        for (i, row) in want.iter().enumerate() {
            assert_eq!(actual.ncols(), row.len(), "col count");
            for (j, &w) in row.iter().enumerate() {
                assert!(
                    approx(actual[[i, j]], w, tol),
                    "entry ({i},{j}) = {} want {w}",
                    actual[[i, j]]
                );
            }
        }
    }

    #[test]
    fn univariate_realization_is_the_companion_matrix() {
        let sys = univariate_quadratic();
        let (r, _) = canonical_for(&sys);
        assert_matrix(&r.a[0], &[&[0.0, 1.0], &[-2.0, 3.0]], 1e-10);
        assert!(approx(r.c[0], 1.0, 1e-10) && approx(r.c[1], 0.0, 1e-10));
        let names: Vec<String> = r.state_monomials.iter().map(|m| format!("{m}")).collect();
        assert_eq!(names, vec!["1", "z1"]);
    }

    #[test]
    fn gcd_pair_realization_is_the_gcd_companion() {
        let sys = gcd_pair();
        let (r, _) = canonical_for(&sys);
        assert_matrix(&r.a[0], &[&[0.0, 1.0], &[2.0, 1.0]], 1e-10);
    }

    #[test]
    fn bivariate_realization_matches_the_echelon_rows() {
        let sys = parabola_line();
        let (r, _) = canonical_for(&sys);
        assert_matrix(&r.a[0], &[&[0.0, 1.0], &[-6.0, 5.0]], 1e-8);
        assert_matrix(&r.a[1], &[&[7.0, -2.0], &[12.0, -3.0]], 1e-8);
        assert!(approx(r.c[0], 1.0, 1e-10) && approx(r.c[1], 0.0, 1e-10));
        let names: Vec<String> = r.state_monomials.iter().map(|m| format!("{m}")).collect();
        assert_eq!(names, vec!["1", "z1"]);
    }

    #[test]
    fn transition_matrices_commute() {
        for sys in [parabola_line(), fourfold()] {
            let (r, _) = canonical_for(&sys);
            let res = commutation_residual(&r.a);
            assert!(res < 1e-8, "commutator {res:.3e}");
        }
        assert_eq!(commutation_residual(&[Array2::eye(2)]), 0.0);
    }

    #[test]
    fn initial_state_sums_the_pivot_vandermondes() {
        // Roots 1 and 2 with pivots {1, z}: x0 = (1,1) + (1,2) = (2,3).
        let sys = univariate_quadratic();
        let (r, _) = canonical_for(&sys);
        assert!(approx(r.x0[0], 2.0, 1e-8), "x0 = {:?}", r.x0);
        assert!(approx(r.x0[1], 3.0, 1e-8), "x0 = {:?}", r.x0);
        // Roots (3,1) and (2,3) with pivots {1, z1}: x0 = (2, 5).
        let sys = parabola_line();
        let (r, _) = canonical_for(&sys);
        assert!(approx(r.x0[0], 2.0, 1e-8), "x0 = {:?}", r.x0);
        assert!(approx(r.x0[1], 5.0, 1e-8), "x0 = {:?}", r.x0);
    }

    #[test]
    fn basis_realization_is_similar_to_the_canonical_one() {
        let sys = parabola_line();
        let a = analyze(&sys, &SolveConfig::default()).unwrap();
        let r = realization_from_basis(&a.z_regular, 2, a.gap.d_star.unwrap()).unwrap();
        assert!(r.state_monomials.is_empty());
        for (i, want) in [[2.0f64, 3.0], [1.0, 3.0]].iter().enumerate() {
            let (vals, _) = eig(r.a[i].view()).unwrap();
            let mut got: Vec<f64> = vals.iter().map(|v| v.re).collect();
            got.sort_by(f64::total_cmp);
            let mut expect = want.to_vec();
            expect.sort_by(f64::total_cmp);
            for (g, e) in got.iter().zip(&expect) {
                assert!((g - e).abs() < 1e-8, "eig {g} want {e}");
            }
        }
    }

    #[test]
    fn observability_equals_the_echelon_basis_for_simple_roots() {
        let sys = parabola_line();
        let a = analyze(&sys, &SolveConfig::default()).unwrap();
        let d_star = a.gap.d_star.unwrap();
        let h = column_echelon(a.z_regular.view(), None).unwrap();
        let r = canonical_realization(&h, 2, d_star).unwrap();
        let o = observability_matrix(&r, d_star).unwrap();
        let diff = inf_norm((&o - &h.h).view());
        assert!(diff < 1e-8, "observability drift {diff:.3e}");
    }

    #[test]
    fn cayley_hamilton_holds_and_detects_perturbation() {
        let sys = parabola_line();
        let (mut r, _) = canonical_for(&sys);
        let res = cayley_hamilton_residual(&r, &sys).unwrap();
        assert!(res < 1e-10, "residual {res:.3e}");
        r.a[0][[1, 1]] += Complex64::new(0.1, 0.0);
        let res = cayley_hamilton_residual(&r, &sys).unwrap();
        assert!(res > 0.05, "perturbed residual {res:.3e}");
    }

    #[test]
    fn macaulay_annihilates_the_observability_matrix() {
        for sys in [parabola_line(), fourfold()] {
            let a = analyze(&sys, &SolveConfig::default()).unwrap();
            let d_star = a.gap.d_star.unwrap();
            let h = column_echelon(a.z_regular.view(), None).unwrap();
            let r = canonical_realization(&h, sys.num_vars(), d_star).unwrap();
            let o = observability_matrix(&r, a.gap.degree).unwrap();
            let res = verify_observability_annihilation(&a.macaulay, &o).unwrap();
            assert!(res < 1e-8, "annihilation residual {res:.3e}");
        }
    }

    #[test]
    fn descriptor_split_of_the_two_conic_system() {
        let sys = two_conics();
        let a = analyze(&sys, &SolveConfig::default()).unwrap();
        let d = descriptor_split(&a, &sys, None).unwrap();
        assert_eq!(d.regular_dim, 2);
        assert_eq!(d.singular_dim, 2);
        assert!(d.e0_nilpotency_residual < 1e-8, "E0 residual {:.3e}", d.e0_nilpotency_residual);
        // Regular blocks carry the affine roots' coordinates.
        for (i, want) in [[2.0f64, -2.0], [3.0, -3.0]].iter().enumerate() {
            let (vals, _) = eig(d.regular_block(i)).unwrap();
            let mut got: Vec<f64> = vals.iter().map(|v| v.re).collect();
            got.sort_by(f64::total_cmp);
            let mut expect = want.to_vec();
            expect.sort_by(f64::total_cmp);
            for (g, e) in got.iter().zip(&expect) {
                assert!((g - e).abs() < 1e-6, "block {i} eig {g} want {e}");
            }
        }
        // The down variable's singular block is the identity.
        let j = d.down_variable.unwrap();
        let eye2 = Array2::<Complex64>::eye(2);
        let sing = d.singular_block(j - 1);
        let diff = inf_norm((&sing.to_owned() - &eye2).view());
        assert!(diff < 1e-12);
        // a0 is the identity on the regular block.
        let reg0 = d.a0.slice(s![..2, ..2]).to_owned();
        assert!(inf_norm((&reg0 - &eye2).view()) < 1e-12);
    }

    #[test]
    fn descriptor_split_without_infinity_roots_is_regular_only() {
        let sys = parabola_line();
        let a = analyze(&sys, &SolveConfig::default()).unwrap();
        let d = descriptor_split(&a, &sys, None).unwrap();
        assert_eq!(d.regular_dim, 2);
        assert_eq!(d.singular_dim, 0);
        assert_eq!(d.e0_nilpotency_residual, 0.0);
        assert!(d.down_variable.is_none());
    }

    #[test]
    fn simulated_univariate_grid_is_the_sum_of_exponentials() {
        let sys = univariate_quadratic();
        let (r, _) = canonical_for(&sys);
        let grid = simulate(&r, &[6]).unwrap();
        for k in 0..6 {
            let want = 1.0 + (2.0f64).powi(k as i32);
            assert!(
                approx(grid.values[IxDyn(&[k])], want, 1e-8),
                "w[{k}] = {} want {want}",
                grid.values[IxDyn(&[k])]
            );
        }
    }

    #[test]
    fn simulated_bivariate_grid_is_the_sum_of_exponentials() {
        let sys = parabola_line();
        let (r, _) = canonical_for(&sys);
        let grid = simulate(&r, &[4, 4]).unwrap();
        for k1 in 0..4 {
            for k2 in 0..4 {
                let want = (3.0f64).powi(k1) * (1.0f64).powi(k2)
                    + (2.0f64).powi(k1) * (3.0f64).powi(k2);
                let got = grid.values[IxDyn(&[k1 as usize, k2 as usize])];
                assert!(approx(got, want, 1e-8), "w[{k1},{k2}] = {got} want {want}");
            }
        }
    }

    #[test]
    fn parallel_and_sequential_simulation_agree() {
        let sys = parabola_line();
        let (r, _) = canonical_for(&sys);
        let a = simulate(&r, &[5, 3]).unwrap();
        let b = simulate_sequential(&r, &[5, 3]).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn identity_transitions_give_a_constant_grid() {
        let one = Complex64::new(1.0, 0.0);
        let r = Realization {
            a: vec![Array2::eye(2), Array2::eye(2)],
            c: Array1::from_vec(vec![one, one]),
            x0: Array1::from_vec(vec![one, Complex64::new(2.0, 0.0)]),
            state_monomials: Vec::new(),
            degree: 1,
            num_vars: 2,
        };
        let grid = simulate(&r, &[3, 3]).unwrap();
        for v in grid.values.iter() {
            assert!(approx(*v, 3.0, 1e-12));
        }
    }

    #[test]
    fn trajectory_verification_accepts_the_simulated_grid() {
        let sys = parabola_line();
        let (r, _) = canonical_for(&sys);
        let grid = simulate(&r, &[6, 6]).unwrap();
        let max_w = grid.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let res = verify_trajectory(&sys, &grid).unwrap();
        assert!(res / max_w < 1e-8, "relative residual {:.3e}", res / max_w);
    }

    #[test]
    fn trajectory_verification_rejects_noise_and_accepts_zero() {
        let sys = univariate_quadratic();
        let zero = TrajectoryGrid {
            values: ArrayD::zeros(IxDyn(&[5])),
            extents: vec![5],
        };
        assert_eq!(verify_trajectory(&sys, &zero).unwrap(), 0.0);
        let mut noisy = zero.clone();
        for (i, v) in noisy.values.iter_mut().enumerate() {
            *v = Complex64::new((i * i + 1) as f64, 0.0);
        }
        assert!(verify_trajectory(&sys, &noisy).unwrap() > 1.0);
    }

    #[test]
    fn undersized_grid_is_rejected() {
        let sys = parabola_line();
        let (r, _) = canonical_for(&sys);
        let grid = simulate(&r, &[2, 1]).unwrap();
        let err = verify_trajectory(&sys, &grid).unwrap_err();
        assert!(matches!(err, Error::GridTooSmall { .. }), "{err}");
    }

    #[test]
    fn simulate_checks_the_grid_shape() {
        let sys = univariate_quadratic();
        let (r, _) = canonical_for(&sys);
        assert!(simulate(&r, &[3, 3]).is_err());
        assert!(simulate(&r, &[0]).is_err());
    }

    #[test]
    fn pivot_at_full_degree_is_rejected() {
        // A pivot monomial at the top degree has no room to shift, so the
        // construction must refuse rather than index out of range.
        let h = EchelonBasis {
            h: Array2::<Complex64>::eye(2),
            pivot_rows: vec![0, 1],
        };
        match canonical_realization(&h, 1, 1) {
            Err(Error::PivotFailure { .. }) => {}
            other => panic!("expected a pivot failure, got {other:?}"),
        }
    }
}
