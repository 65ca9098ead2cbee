//! Vandermonde monomial vectors and their derivative (dual) companions.
//!
//! The Vandermonde vector of a point stacks every monomial of degree at most
//! `d` evaluated there, in the crate's monomial order. Multiple roots are
//! captured not by one such vector but by differential functionals: the dual
//! vector for a multi-index `a` applies `(1/a!) * d^|a|/dz^a` to each
//! monomial before evaluating. These vectors are what the null space of a
//! Macaulay matrix is made of, so they double as test oracles throughout the
//! crate.

use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::monomial::{binomial, enumerate_monomials};

/// Evaluate every monomial of degree `<= d` at the point.
pub fn vandermonde_vector(coords: &[Complex64], d: u32) -> Array1<Complex64> {
    let n = coords.len();
    let monos = enumerate_monomials(n, d);
    Array1::from_iter(monos.iter().map(|m| eval_monomial(m.exponents(), coords)))
}

/// Evaluate `(1/alpha!) * d^|alpha| (z^beta) / dz^alpha` at the point, for
/// every `beta` of degree `<= d`.
///
/// The scaled derivative of one monomial is `prod_i C(beta_i, alpha_i)`
/// times `z^(beta - alpha)`, and vanishes wherever some `alpha_i > beta_i`;
/// `alpha = 0` reproduces [`vandermonde_vector`].
pub fn dual_vector(coords: &[Complex64], alpha: &[u32], d: u32) -> Result<Array1<Complex64>> {
    if alpha.len() != coords.len() {
        return Err(Error::DimensionMismatch {
            expected: coords.len(),
            got: alpha.len(),
        });
    }
    let monos = enumerate_monomials(coords.len(), d);
    Ok(Array1::from_iter(
        monos.iter().map(|m| dual_entry(m.exponents(), alpha, coords)),
    ))
}

/// Homogeneous counterpart of [`dual_vector`]: the basis runs over all
/// monomials of total degree exactly `d` in `n + 1` variables (index 0 is
/// the homogenization variable), ordered compatibly with the affine basis.
///
/// `coords` and `alpha` have length `n + 1`.
pub fn homogeneous_dual_vector(
    coords: &[Complex64],
    alpha: &[u32],
    d: u32,
) -> Result<Array1<Complex64>> {
    if alpha.len() != coords.len() {
        return Err(Error::DimensionMismatch {
            expected: coords.len(),
            got: alpha.len(),
        });
    }
    if coords.is_empty() {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    let n = coords.len() - 1;
    let affine = enumerate_monomials(n, d);
    let entries = affine.iter().map(|m| {
        let lifted = m.homogenize(d).expect("degree bound respected");
        dual_entry(lifted.exponents(), alpha, coords)
    });
    Ok(Array1::from_iter(entries))
}

fn eval_monomial(exponents: &[u32], coords: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (&e, &x) in exponents.iter().zip(coords) {
        if e > 0 {
            acc *= x.powu(e);
        }
    }
    acc
}

fn dual_entry(beta: &[u32], alpha: &[u32], coords: &[Complex64]) -> Complex64 {
    let mut scale = 1.0f64;
    for (&b, &a) in beta.iter().zip(alpha) {
        if a > b {
            return Complex64::new(0.0, 0.0);
        }
        scale *= binomial(b as u64, a as u64) as f64;
    }
    let mut acc = Complex64::new(scale, 0.0);
    for ((&b, &a), &x) in beta.iter().zip(alpha).zip(coords) {
        let e = b - a;
        if e > 0 {
            acc *= x.powu(e);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_vec_eq(got: &Array1<Complex64>, want: &[f64]) {
        assert_eq!(got.len(), want.len());
        for (g, &w) in got.iter().zip(want) {
            assert!((g - c(w)).norm() < 1e-12, "got {g}, want {w}");
        }
    }

    #[test]
    fn vandermonde_at_two_three() {
        let v = vandermonde_vector(&[c(2.0), c(3.0)], 2);
        assert_vec_eq(&v, &[1.0, 2.0, 3.0, 4.0, 6.0, 9.0]);
    }

    #[test]
    fn vandermonde_at_three_one() {
        let v = vandermonde_vector(&[c(3.0), c(1.0)], 2);
        assert_vec_eq(&v, &[1.0, 3.0, 1.0, 9.0, 3.0, 1.0]);
    }

    #[test]
    fn vandermonde_at_origin_is_a_unit_vector() {
        let v = vandermonde_vector(&[c(0.0), c(0.0), c(0.0)], 3);
        assert_eq!(v[0], c(1.0));
        assert!(v.iter().skip(1).all(|x| x.norm() == 0.0));
    }

    #[test]
    fn dual_with_zero_multi_index_is_vandermonde() {
        let x = [c(1.0), c(2.0)];
        let v = vandermonde_vector(&x, 3);
        let d0 = dual_vector(&x, &[0, 0], 3).unwrap();
        assert_eq!(v, d0);
    }

    #[test]
    fn first_derivative_column_at_one_two() {
        let d10 = dual_vector(&[c(1.0), c(2.0)], &[1, 0], 3).unwrap();
        assert_vec_eq(&d10, &[0.0, 1.0, 0.0, 2.0, 2.0, 0.0, 3.0, 4.0, 4.0, 0.0]);
    }

    #[test]
    fn order_too_high_gives_zero_vector() {
        let v = dual_vector(&[c(1.0), c(2.0)], &[4, 0], 3).unwrap();
        assert!(v.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn finite_difference_matches_first_dual() {
        let x = [c(0.7), c(-1.3)];
        let h = 1e-6;
        let xh = [c(0.7 + h), c(-1.3)];
        let v = vandermonde_vector(&x, 3);
        let vh = vandermonde_vector(&xh, 3);
        let d10 = dual_vector(&x, &[1, 0], 3).unwrap();
        for i in 0..v.len() {
            let fd = (vh[i] - v[i]) / c(h);
            let err = (fd - d10[i]).norm();
            assert!(err < 1e-4 * (1.0 + d10[i].norm()), "entry {i}: {err}");
        }
    }

    #[test]
    fn homogeneous_dual_reduces_to_affine_at_unit_z0() {
        // With z0 = 1 and alpha touching only affine variables, the
        // homogeneous dual over degree-3 forms equals the affine dual of
        // degree <= 3 entry by entry.
        let x = [c(1.0), c(1.0), c(2.0)];
        let hd = homogeneous_dual_vector(&x, &[0, 1, 0], 3).unwrap();
        let ad = dual_vector(&[c(1.0), c(2.0)], &[1, 0], 3).unwrap();
        // Not identical in general (z0 powers differentiate too), but with
        // alpha_0 = 0 each entry picks up only a z0^k = 1 factor.
        assert_eq!(hd, ad);
    }

    #[test]
    fn mismatched_alpha_length_is_an_error() {
        assert!(dual_vector(&[c(1.0)], &[0, 0], 2).is_err());
    }
}
