//! Root extraction from the Macaulay null space.
//!
//! The null space of a degree-`d` Macaulay matrix is spanned, generically,
//! by Vandermonde-structured vectors of the system's projective roots.
//! Watching the numerical rank of the basis's top rows degree block by
//! degree block reveals a split: the affine roots fill up the low degrees
//! and stop contributing at some degree (the gap), while roots at infinity
//! live in the top degree blocks. After rotating the basis so the two parts
//! separate ([`crate::linalg::column_compress`]), multiplication by a
//! variable becomes a row-selection pair on each part, and the roots drop
//! out of small eigenvalue problems: affine coordinates from the up-shift
//! operators on the regular part, infinity points from up/down exponent
//! trades on the singular part.

use crate::error::{Error, Result};
use crate::linalg::{
    default_rank_tol, eig, nullspace, numerical_rank, pinv_solve, singular_values,
    column_compress, NullspaceBasis,
};
use crate::macaulay::{build_macaulay, default_degree, extend_macaulay, MacaulayMatrix};
use crate::monomial::{degree_block_offsets, enumerate_monomials};
use crate::point::Point;
use crate::shifts::{make_affine_selection, make_homogeneous_selection};
use crate::system::PolySystem;
use crate::vander::dual_vector;

use ndarray::{s, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Modulus threshold (after canonicalization) below which the z0 coordinate
/// counts as zero, i.e. the root lies at infinity.
pub const INFINITY_TOL: f64 = 1e-8;

/// Relative z0 level below which a point read from the singular block snaps
/// to an exact root at infinity. Reads there carry square-root-of-epsilon
/// noise in z0, so this sits well above it.
const SINGULAR_Z0_SNAP: f64 = 1e-6;

/// Anything this many times worse than its eigenvalue cluster's best read
/// is treated as a meaningless eigenvector of a defective block.
const READ_REJECT_RATIO: f64 = 1e3;

/// Knobs for [`solve`]; `Default` gives the documented behavior.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Macaulay degree to start from; defaults to the square-system default
    /// degree (largest equation degree for non-square systems).
    pub degree: Option<u32>,
    /// Escalation cap; defaults to the start degree plus `n + 2`.
    pub max_degree: Option<u32>,
    /// Rank tolerance for null space and gap decisions; `None` applies the
    /// per-matrix policy.
    pub rank_tol: Option<f64>,
    /// Roots whose system residual exceeds this are flagged in warnings.
    pub residual_tol: f64,
    /// Clustering radius; `None` uses 1e-4 * (1 + largest coordinate).
    pub cluster_tol: Option<f64>,
    /// Seed for the random eigenvalue combination. Root values do not
    /// depend on it; only the internal mixing does.
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            degree: None,
            max_degree: None,
            rank_tol: None,
            residual_tol: 1e-6,
            cluster_tol: None,
            seed: 42,
        }
    }
}

/// Degree-block rank pattern of a null-space basis.
#[derive(Debug, Clone)]
pub struct GapReport {
    /// Macaulay degree the basis came from.
    pub degree: u32,
    /// Rank increment contributed by each degree block, indices 0..=degree.
    pub block_increments: Vec<usize>,
    /// First degree whose block contributes nothing, when one exists.
    pub d_star: Option<u32>,
    /// Affine root count with multiplicity (cumulative rank at the gap).
    pub regular_count: usize,
    /// Root-at-infinity count with multiplicity (nullity minus regular).
    pub singular_count: usize,
    /// Whether the pattern certifies a regular/singular split at this
    /// degree: some block contributes nothing while the constant monomial
    /// is still independent.
    pub stabilized: bool,
}

/// One recovered root.
#[derive(Debug, Clone)]
pub struct Root {
    /// Canonical homogeneous representative (z0 first, z0 = 1 for affine
    /// roots).
    pub point: Point,
    /// Cluster size that produced this root.
    pub multiplicity: usize,
    /// Max equation modulus at the root: the original system for affine
    /// roots, the homogenized system for roots at infinity.
    pub residual: f64,
    /// True when the z0 coordinate vanishes.
    pub at_infinity: bool,
}

impl Root {
    /// Affine coordinates (z0 divided out); `None` at infinity.
    pub fn affine_coords(&self) -> Option<Vec<Complex64>> {
        if self.at_infinity {
            return None;
        }
        self.point
            .dehomogenized(INFINITY_TOL)
            .map(|p| p.coords().to_vec())
    }
}

/// Everything the solve decided along the way.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    /// Rank pattern at the degree that stabilized.
    pub gap: GapReport,
    /// Macaulay degree actually used.
    pub degree_used: u32,
    /// Nullity of the Macaulay matrix at that degree.
    pub nullity: usize,
    /// Product of equation degrees for square systems.
    pub bezout: Option<u64>,
    /// Rank threshold applied to the null-space computation.
    pub rank_tol: f64,
    /// Clustering radius actually applied.
    pub cluster_tol: f64,
    /// Residual threshold for flagging roots.
    pub residual_tol: f64,
    /// Seed used for the eigenvalue combinations.
    pub seed: u64,
    /// True when infinity-root coordinates could not be extracted; the
    /// singular count still stands.
    pub singular_extraction_failed: bool,
    /// Human-readable notes: flagged residuals, count mismatches.
    pub warnings: Vec<String>,
}

/// Roots plus diagnostics; the outcome of [`solve`].
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub diagnostics: Diagnostics,
}

impl RootSet {
    /// Total multiplicity across all roots.
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// The affine roots only.
    pub fn affine_roots(&self) -> impl Iterator<Item = &Root> {
        self.roots.iter().filter(|r| !r.at_infinity)
    }

    /// The roots at infinity only.
    pub fn infinity_roots(&self) -> impl Iterator<Item = &Root> {
        self.roots.iter().filter(|r| r.at_infinity)
    }
}

/// Full pipeline state for consumers that need more than the roots
/// (realizations, descriptor splits).
#[derive(Debug, Clone)]
pub struct Analysis {
    /// The Macaulay matrix at the degree that stabilized.
    pub macaulay: MacaulayMatrix,
    /// Orthonormal null-space basis of that matrix.
    pub nullspace: NullspaceBasis,
    /// Its rank pattern.
    pub gap: GapReport,
    /// Regular (affine) part: compressed basis columns truncated to rows of
    /// degree <= d_star. Empty when there are no affine roots.
    pub z_regular: Array2<Complex64>,
    /// Singular part: trailing compressed columns at full height. Empty
    /// when there are no roots at infinity.
    pub z_singular: Array2<Complex64>,
    /// The roots.
    pub root_set: RootSet,
}

/// Rank pattern of the top degree blocks of a null-space basis from a
/// degree-`degree` Macaulay matrix in `num_vars` variables.
///
/// The cumulative rank over all rows always equals the nullity (the basis
/// has orthonormal columns), so a first zero increment at degree `d*`
/// splits the nullity into a regular part (rank accumulated through `d*`)
/// and a singular part (the rest, necessarily re-emerging above `d*`).
/// A zero increment already at degree 0 means the constant monomial is
/// dependent — no affine structure exists, and the report says not
/// stabilized.
pub fn find_gap(
    z: &NullspaceBasis,
    num_vars: usize,
    degree: u32,
    tol: Option<f64>,
) -> Result<GapReport> {
    let blocks = degree as usize + 1;
    let nullity = z.nullity();
    if nullity == 0 {
        return Ok(GapReport {
            degree,
            block_increments: vec![0; blocks],
            d_star: Some(0),
            regular_count: 0,
            singular_count: 0,
            stabilized: false,
        });
    }
    let offsets = degree_block_offsets(num_vars, degree);
    if z.ambient_dim() != offsets[blocks] {
        return Err(Error::DimensionMismatch {
            expected: offsets[blocks],
            got: z.ambient_dim(),
        });
    }
    // One threshold for every prefix keeps the increments consistent; the
    // basis is orthonormal, so sigma_max = 1.
    let tol_used = tol.unwrap_or_else(|| default_rank_tol(z.ambient_dim(), nullity, 1.0));
    let mut block_increments = Vec::with_capacity(blocks);
    let mut cumulative = 0usize;
    let mut d_star = None;
    let mut regular_count = nullity;
    for delta in 0..blocks {
        let prefix = z.basis.slice(s![..offsets[delta + 1], ..]);
        let rank = numerical_rank(prefix, Some(tol_used))?;
        let increment = rank - cumulative;
        block_increments.push(increment);
        if increment == 0 && d_star.is_none() {
            d_star = Some(delta as u32);
            regular_count = rank;
        }
        cumulative = rank;
    }
    let singular_count = nullity - regular_count;
    let stabilized = d_star.is_some() && regular_count >= 1;
    Ok(GapReport {
        degree,
        block_increments,
        d_star,
        regular_count,
        singular_count,
        stabilized,
    })
}

fn uf_find(parent: &mut Vec<usize>, i: usize) -> usize {
    if parent[i] != i {
        let root = uf_find(parent, parent[i]);
        parent[i] = root;
    }
    parent[i]
}

/// Single-linkage clusters of complex values at the given radius, each
/// cluster listing its member indices, ordered by smallest member.
fn cluster_indices(vals: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let k = vals.len();
    let mut parent: Vec<usize> = (0..k).collect();
    for i in 0..k {
        for j in i + 1..k {
            if (vals[i] - vals[j]).norm() <= tol {
                let (a, b) = (uf_find(&mut parent, i), uf_find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; k];
    for i in 0..k {
        let rep = uf_find(&mut parent, i);
        if slot[rep] == usize::MAX {
            slot[rep] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot[rep]].push(i);
    }
    clusters
}

/// Standard normal draws scaled to unit 1-norm: a generic real combination.
pub(crate) fn random_combination(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..count)
        .map(|_| {
            let u: f64 = 1.0 - rng.gen::<f64>();
            let v: f64 = rng.gen();
            (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
        })
        .collect();
    let norm: f64 = g.iter().map(|x| x.abs()).sum();
    if norm > 0.0 {
        for x in &mut g {
            *x /= norm;
        }
    } else {
        g = vec![1.0 / count as f64; count];
    }
    g
}

/// Affine roots from the regular basis: eigenvalues of a random
/// combination of the up-shift operators, coordinates read off the
/// reconstructed Vandermonde columns. Roots come back raw (multiplicity 1
/// each, unclustered).
///
/// `z_r` must hold the regular columns truncated to rows of degree <=
/// `degree`; `degree >= 1`.
pub fn solve_affine(
    z_r: &Array2<Complex64>,
    sys: &PolySystem,
    degree: u32,
    tol: Option<f64>,
    seed: u64,
) -> Result<Vec<Root>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut warnings = Vec::new();
    solve_affine_inner(z_r, sys, degree, tol, None, &mut rng, &mut warnings)
}

fn solve_affine_inner(
    z_r: &Array2<Complex64>,
    sys: &PolySystem,
    degree: u32,
    tol: Option<f64>,
    eig_cluster_tol: Option<f64>,
    rng: &mut ChaCha8Rng,
    warnings: &mut Vec<String>,
) -> Result<Vec<Root>> {
    let n = sys.num_vars();
    let m_r = z_r.ncols();
    if m_r == 0 {
        return Ok(Vec::new());
    }
    if degree == 0 {
        return Err(Error::DegreeTooLow { min: 1, got: 0 });
    }
    let offsets = degree_block_offsets(n, degree);
    if z_r.nrows() != offsets[degree as usize + 1] {
        return Err(Error::DimensionMismatch {
            expected: offsets[degree as usize + 1],
            got: z_r.nrows(),
        });
    }
    let s0 = z_r.slice(s![..offsets[degree as usize], ..]);
    if numerical_rank(s0, tol)? < m_r {
        return Err(Error::DegenerateShift {
            shift: "degree-0".into(),
            detail: format!(
                "low-degree rows of the regular basis have rank below {m_r}; \
                 undetected roots at infinity or a wrong regular count"
            ),
        });
    }
    let gamma = random_combination(rng, n);
    let mut combined = Array2::<Complex64>::zeros((s0.nrows(), m_r));
    for (i, &g) in gamma.iter().enumerate() {
        let sel = make_affine_selection(n, degree, i)?;
        let shifted = sel.take_to(z_r);
        combined.scaled_add(Complex64::new(g, 0.0), &shifted);
    }
    let a_gamma = pinv_solve(s0, combined.view(), tol)?;
    let (vals, t) = eig(a_gamma.view())?;
    let v = z_r.dot(&t);
    let mut reads: Vec<Option<(Vec<Complex64>, f64)>> = Vec::with_capacity(m_r);
    for k in 0..m_r {
        let col = v.column(k);
        let col_max = col.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let v0 = col[0];
        if v0.norm() <= f64::EPSILON * col_max {
            reads.push(None);
            continue;
        }
        let coords: Vec<Complex64> = (0..n).map(|i| col[1 + i] / v0).collect();
        let residual = sys.max_residual(&coords)?;
        reads.push(Some((coords, residual)));
    }
    // A multiple root makes the combination matrix defective: its
    // eigenvalues agree but most returned eigenvectors are meaningless.
    // Within each eigenvalue cluster, the best-reading column speaks for
    // every member.
    let lambda_scale = vals.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let eig_tol = eig_cluster_tol
        .unwrap_or(0.0)
        .max(1e-3 * (1.0 + lambda_scale));
    let mut roots = Vec::with_capacity(m_r);
    for cluster in cluster_indices(&vals, eig_tol) {
        let best = cluster
            .iter()
            .filter_map(|&k| reads[k].clone())
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let (best_coords, best_residual) = match best {
            Some(b) => b,
            None => {
                warnings.push(format!(
                    "an eigenvalue cluster of {} columns had no readable \
                     eigenvector; its roots are lost",
                    cluster.len()
                ));
                continue;
            }
        };
        for &k in &cluster {
            let (coords, residual) = match reads[k].as_ref() {
                Some(r) if r.1 <= READ_REJECT_RATIO * best_residual.max(1e-14) => r.clone(),
                _ => (best_coords.clone(), best_residual),
            };
            let mut homog = Vec::with_capacity(n + 1);
            homog.push(Complex64::new(1.0, 0.0));
            homog.extend_from_slice(&coords);
            roots.push(Root {
                point: Point::homogeneous(homog),
                multiplicity: 1,
                residual,
                at_infinity: false,
            });
        }
    }
    Ok(roots)
}

/// Single-linkage clustering of raw roots at radius `cluster_tol`: each
/// cluster becomes one root at the centroid with multiplicity equal to the
/// cluster size and the residual recomputed there. Affine roots and roots
/// at infinity never merge.
pub fn cluster_roots(raw: &[Root], cluster_tol: f64, sys: &PolySystem) -> Result<Vec<Root>> {
    let k = raw.len();
    let mut cluster = (0..k).collect::<Vec<usize>>();
    for i in 0..k {
        for j in i + 1..k {
            if raw[i].at_infinity != raw[j].at_infinity {
                continue;
            }
            // Merge on distance <= tol: the boundary case joins.
            if raw[i].point.distance(&raw[j].point) <= cluster_tol {
                let (a, b) = (uf_find(&mut cluster, i), uf_find(&mut cluster, j));
                if a != b {
                    cluster[b] = a;
                }
            }
        }
    }
    let mut sys_h: Option<PolySystem> = None;
    let mut out = Vec::new();
    let mut seen = vec![false; k];
    for i in 0..k {
        if seen[uf_find(&mut cluster, i)] {
            continue;
        }
        let rep = uf_find(&mut cluster, i);
        seen[rep] = true;
        let members: Vec<&Root> = (0..k)
            .filter(|&j| uf_find(&mut cluster, j) == rep)
            .map(|j| &raw[j])
            .collect();
        let dim = members[0].point.coords().len();
        let mut centroid = vec![Complex64::new(0.0, 0.0); dim];
        for m in &members {
            for (c, &x) in centroid.iter_mut().zip(m.point.coords()) {
                *c += x;
            }
        }
        let scale = Complex64::new(members.len() as f64, 0.0);
        for c in &mut centroid {
            *c /= scale;
        }
        let at_infinity = members[0].at_infinity;
        let point = Point::homogeneous(centroid).canonicalized(INFINITY_TOL);
        let residual = if at_infinity {
            let h = sys_h.get_or_insert_with(|| sys.homogenize());
            h.max_residual(point.coords())?
        } else {
            let affine: Vec<Complex64> = point.coords()[1..]
                .iter()
                .map(|&c| c / point.coords()[0])
                .collect();
            sys.max_residual(&affine)?
        };
        out.push(Root {
            point,
            multiplicity: members.iter().map(|m| m.multiplicity).sum(),
            residual,
            at_infinity,
        });
    }
    Ok(out)
}

/// Try to pull coordinates of the roots at infinity out of the singular
/// columns. Returns `None` when every down-shift variable fails, in which
/// case only the singular count is trustworthy.
fn extract_singular(
    z_s: &Array2<Complex64>,
    sys: &PolySystem,
    degree: u32,
    tol: Option<f64>,
    eig_cluster_tol: Option<f64>,
    rng: &mut ChaCha8Rng,
    warnings: &mut Vec<String>,
) -> Result<Option<Vec<Root>>> {
    let n = sys.num_vars();
    let m_s = z_s.ncols();
    if m_s == 0 {
        return Ok(Some(Vec::new()));
    }
    let monos = enumerate_monomials(n, degree);
    let offsets = degree_block_offsets(n, degree);
    let top_start = offsets[degree as usize];
    let sys_h = sys.homogenize();

    // Rank each candidate down variable by how well its domain rows retain
    // the singular columns: sigma_min of the selected block. Shifting down
    // a variable that is zero at a root loses the root entirely.
    let mut candidates: Vec<(usize, f64)> = Vec::with_capacity(n);
    for j in 1..=n {
        let sel = make_homogeneous_selection(n, degree, 0, j)?;
        let dom = sel.take_from(z_s);
        let smin = if dom.nrows() < m_s {
            0.0
        } else {
            singular_values(dom.view())?.last().copied().unwrap_or(0.0)
        };
        candidates.push((j, smin));
    }
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    'next_j: for &(j, smin) in &candidates {
        if smin <= f64::EPSILON * (z_s.nrows() as f64) {
            warnings.push(format!(
                "down shift in variable {j} is singular on the infinity block; skipped"
            ));
            continue;
        }
        let gamma = random_combination(rng, n);
        let mut b_gamma = Array2::<Complex64>::zeros((m_s, m_s));
        for (g, i) in gamma.iter().zip((0..=n).filter(|&i| i != j)) {
            let sel = make_homogeneous_selection(n, degree, i, j)?;
            let from = sel.take_from(z_s);
            let to = sel.take_to(z_s);
            let b = pinv_solve(from.view(), to.view(), tol)?;
            b_gamma.scaled_add(Complex64::new(*g, 0.0), &b);
        }
        let (vals, t) = eig(b_gamma.view())?;
        let w = z_s.dot(&t);
        let mut reads: Vec<Option<Root>> = Vec::with_capacity(m_s);
        for k in 0..m_s {
            let col = w.column(k);
            let col_max = col.iter().map(|c| c.norm()).fold(0.0, f64::max);
            // Anchor on the largest top-degree entry whose monomial still
            // carries the down variable.
            let mut best: Option<(usize, f64)> = None;
            for (idx, mono) in monos.iter().enumerate().skip(top_start) {
                if mono.exponent(j - 1) == 0 {
                    continue;
                }
                let mag = col[idx].norm();
                if best.map_or(true, |(_, m)| mag > m) {
                    best = Some((idx, mag));
                }
            }
            let (anchor, mag) = best.expect("top block contains the down variable");
            if mag <= 1e-8 * col_max {
                reads.push(None);
                continue;
            }
            let beta = &monos[anchor];
            let lowered = beta.shift_down(j - 1).expect("exponent checked");
            let base = col[anchor];
            let mut homog = vec![Complex64::new(0.0, 0.0); n + 1];
            homog[j] = Complex64::new(1.0, 0.0);
            for i in 1..=n {
                if i == j {
                    continue;
                }
                let moved = lowered.shift_up(i - 1);
                homog[i] = col[moved.position()] / base;
            }
            // The z0 component of a singular-block point is zero by
            // construction (the 0-up shift is nilpotent there); the read
            // only decides whether the direction escaped to affine range.
            let z0 = col[lowered.position()] / base;
            let scale = homog[1..]
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max)
                .max(1.0);
            if z0.norm() > SINGULAR_Z0_SNAP * scale {
                homog[0] = z0;
            }
            let point = Point::homogeneous(homog).canonicalized(INFINITY_TOL);
            let at_infinity = point.coords()[0].norm() <= INFINITY_TOL * point.max_coord();
            let residual = if at_infinity {
                sys_h.max_residual(point.coords())?
            } else {
                let affine: Vec<Complex64> = point.coords()[1..]
                    .iter()
                    .map(|&c| c / point.coords()[0])
                    .collect();
                sys.max_residual(&affine)?
            };
            reads.push(Some(Root {
                point,
                multiplicity: 1,
                residual,
                at_infinity,
            }));
        }
        // Defective blocks (multiple roots at infinity) again leave most
        // eigenvector columns unreliable; repair within eigenvalue
        // clusters, and fall back to the next down variable when a whole
        // cluster is unreadable.
        let lambda_scale = vals.iter().map(|l| l.norm()).fold(0.0, f64::max);
        let eig_tol = eig_cluster_tol
            .unwrap_or(0.0)
            .max(1e-3 * (1.0 + lambda_scale));
        let mut found = Vec::with_capacity(m_s);
        for cluster in cluster_indices(&vals, eig_tol) {
            let best = cluster
                .iter()
                .filter_map(|&k| reads[k].clone())
                .min_by(|a, b| a.residual.total_cmp(&b.residual));
            let best = match best {
                Some(b) => b,
                None => {
                    warnings.push(format!(
                        "down variable {j}: an infinity eigenvalue cluster of {} \
                         columns had no readable eigenvector",
                        cluster.len()
                    ));
                    continue 'next_j;
                }
            };
            for &k in &cluster {
                let root = match reads[k].as_ref() {
                    Some(r)
                        if r.residual
                            <= READ_REJECT_RATIO * best.residual.max(1e-14) =>
                    {
                        r.clone()
                    }
                    _ => best.clone(),
                };
                found.push(root);
            }
        }
        return Ok(Some(found));
    }
    Ok(None)
}

/// Solve the system: walk the degree schedule until the rank pattern
/// stabilizes, split the null space, extract affine roots and roots at
/// infinity, cluster, and report.
pub fn solve(sys: &PolySystem, config: &SolveConfig) -> Result<RootSet> {
    analyze(sys, config).map(|a| a.root_set)
}

/// Like [`solve`], but hands back the intermediate objects (Macaulay
/// matrix, null space, split bases) for realization building.
pub fn analyze(sys: &PolySystem, config: &SolveConfig) -> Result<Analysis> {
    let n = sys.num_vars();
    let start = match config.degree {
        Some(d) => d,
        None => {
            if sys.is_square() {
                default_degree(sys)?
            } else {
                sys.degrees().into_iter().max().unwrap_or(1).max(1)
            }
        }
    };
    let cap = config.max_degree.unwrap_or(start + n as u32 + 2).max(start);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut warnings: Vec<String> = Vec::new();

    let mut degree = start;
    let mut macaulay = build_macaulay(sys, degree)?;
    let (z, gap, gap_tol) = loop {
        let z = nullspace(macaulay.complex_data().view(), config.rank_tol)?;
        let gap_tol = config
            .rank_tol
            .unwrap_or_else(|| default_rank_tol(z.ambient_dim(), z.nullity(), 1.0));
        let gap = find_gap(&z, n, degree, Some(gap_tol))?;
        if gap.stabilized {
            break (z, gap, gap_tol);
        }
        if degree == cap {
            return Err(Error::NoStabilization {
                max_degree: cap as usize,
            });
        }
        degree += 1;
        macaulay = extend_macaulay(&macaulay, sys, degree)?;
    };

    let d_star = gap.d_star.expect("stabilized implies a gap degree");
    let offsets = degree_block_offsets(n, degree);
    let top = offsets[d_star as usize + 1];
    let (compressed, compress_rank) = column_compress(z.basis.view(), top, Some(gap_tol))?;
    if compress_rank != gap.regular_count {
        warnings.push(format!(
            "compression rank {compress_rank} disagrees with the gap's regular \
             count {}; using the gap",
            gap.regular_count
        ));
    }
    let m_r = gap.regular_count;
    let z_regular = compressed.slice(s![..top, ..m_r]).to_owned();
    let z_singular = compressed.slice(s![.., m_r..]).to_owned();

    let mut raw_affine = solve_affine_inner(
        &z_regular,
        sys,
        d_star,
        config.rank_tol,
        config.cluster_tol,
        &mut rng,
        &mut warnings,
    )?;

    let mut singular_extraction_failed = false;
    let mut raw_infinity: Vec<Root> = Vec::new();
    if gap.singular_count > 0 {
        match extract_singular(
            &z_singular,
            sys,
            degree,
            config.rank_tol,
            config.cluster_tol,
            &mut rng,
            &mut warnings,
        )? {
            Some(roots) => {
                // A singular eigenvector can still resolve to an affine
                // point; keep it with its kind.
                for r in roots {
                    if r.at_infinity {
                        raw_infinity.push(r);
                    } else {
                        warnings.push(
                            "singular block produced an affine point; merged".into(),
                        );
                        raw_affine.push(r);
                    }
                }
            }
            None => {
                singular_extraction_failed = true;
                warnings.push(format!(
                    "coordinates of the {} roots at infinity could not be \
                     extracted; count reported without points",
                    gap.singular_count
                ));
            }
        }
    }

    let max_coord = raw_affine
        .iter()
        .chain(&raw_infinity)
        .map(|r| r.point.max_coord())
        .fold(0.0, f64::max);
    let cluster_tol = config
        .cluster_tol
        .unwrap_or_else(|| 1e-4 * (1.0 + max_coord));

    let mut roots = cluster_roots(&raw_affine, cluster_tol, sys)?;
    roots.extend(cluster_roots(&raw_infinity, cluster_tol, sys)?);
    roots.sort_by(|a, b| {
        a.at_infinity.cmp(&b.at_infinity).then_with(|| {
            for (x, y) in a.point.coords().iter().zip(b.point.coords()) {
                let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
                if ord != std::cmp::Ordering::Equal {
                    return ord;
                }
            }
            std::cmp::Ordering::Equal
        })
    });

    for r in &roots {
        if !r.at_infinity && r.residual > config.residual_tol {
            warnings.push(format!(
                "affine root residual {:.3e} exceeds the tolerance {:.1e}",
                r.residual, config.residual_tol
            ));
        }
    }
    let total: usize = roots.iter().map(|r| r.multiplicity).sum();
    if let Some(bezout) = sys.bezout_number() {
        if !singular_extraction_failed && total as u64 != bezout {
            warnings.push(format!(
                "total multiplicity {total} differs from the Bezout number {bezout}"
            ));
        }
    }

    let diagnostics = Diagnostics {
        gap: gap.clone(),
        degree_used: degree,
        nullity: z.nullity(),
        bezout: sys.bezout_number(),
        rank_tol: z.tol_used,
        cluster_tol,
        residual_tol: config.residual_tol,
        seed: config.seed,
        singular_extraction_failed,
        warnings,
    };
    Ok(Analysis {
        macaulay,
        nullspace: z,
        gap,
        z_regular,
        z_singular,
        root_set: RootSet { roots, diagnostics },
    })
}

/// Residual of claimed dual vectors at an affine root: builds each weighted
/// combination of derivative functionals and returns the largest modulus of
/// its image under the Macaulay matrix at degree `d`.
pub fn verify_dual_basis(
    sys: &PolySystem,
    root: &Point,
    duals: &[Vec<(Vec<u32>, f64)>],
    d: u32,
) -> Result<f64> {
    let coords: Vec<Complex64> = if root.is_homogeneous() {
        match root.dehomogenized(INFINITY_TOL) {
            Some(p) => p.coords().to_vec(),
            None => {
                return Err(Error::Numerical(
                    "dual verification needs an affine root".into(),
                ))
            }
        }
    } else {
        root.coords().to_vec()
    };
    let m = build_macaulay(sys, d)?;
    let mc = m.complex_data();
    let mut worst = 0.0f64;
    for combo in duals {
        let mut w = ndarray::Array1::<Complex64>::zeros(m.ncols());
        for (alpha, weight) in combo {
            let dv = dual_vector(&coords, alpha, d)?;
            w.scaled_add(Complex64::new(*weight, 0.0), &dv);
        }
        let image = mc.dot(&w);
        let r = image.iter().map(|c| c.norm()).fold(0.0, f64::max);
        worst = worst.max(r);
    }
    Ok(worst)
}
