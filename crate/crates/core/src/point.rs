//! Points in complex affine or projective space.
//!
//! Affine points carry `n` coordinates. Homogeneous points carry `n + 1`
//! (coordinate 0 is the homogenization variable) and stand for a scaling
//! class; the canonical representative scales the first numerically nonzero
//! coordinate to exactly 1.

use num_complex::Complex64;

/// A point with complex coordinates, affine or homogeneous.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<Complex64>,
    homogeneous: bool,
}

impl Point {
    /// An affine point from its coordinates.
    pub fn affine(coords: Vec<Complex64>) -> Self {
        Point {
            coords,
            homogeneous: false,
        }
    }

    /// An affine point with real coordinates.
    pub fn affine_real(coords: &[f64]) -> Self {
        Point::affine(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// A homogeneous point; `coords[0]` is the homogenization coordinate.
    pub fn homogeneous(coords: Vec<Complex64>) -> Self {
        Point {
            coords,
            homogeneous: true,
        }
    }

    /// The raw coordinates.
    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// Whether this is a homogeneous (projective) point.
    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    /// Number of affine variables this point describes.
    pub fn num_vars(&self) -> usize {
        if self.homogeneous {
            self.coords.len() - 1
        } else {
            self.coords.len()
        }
    }

    /// Scale a homogeneous point so its first coordinate of magnitude above
    /// `rel_tol * max|coord|` becomes exactly 1. Affine points are returned
    /// unchanged; so is the zero vector (which represents no point).
    pub fn canonicalized(&self, rel_tol: f64) -> Point {
        if !self.homogeneous {
            return self.clone();
        }
        let max = self.coords.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return self.clone();
        }
        let pivot = self
            .coords
            .iter()
            .find(|c| c.norm() > rel_tol * max)
            .copied()
            .unwrap_or_else(|| {
                // Everything is comparably tiny; fall back to the largest.
                *self
                    .coords
                    .iter()
                    .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                    .unwrap()
            });
        let coords = self.coords.iter().map(|c| c / pivot).collect();
        Point {
            coords,
            homogeneous: true,
        }
    }

    /// For a homogeneous point with nonzero first coordinate, the affine
    /// point it represents; `None` at infinity (first coordinate below
    /// `rel_tol` times the largest magnitude) or for affine inputs.
    pub fn dehomogenized(&self, rel_tol: f64) -> Option<Point> {
        if !self.homogeneous {
            return None;
        }
        let max = self.coords.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let z0 = self.coords[0];
        if max == 0.0 || z0.norm() <= rel_tol * max {
            return None;
        }
        Some(Point::affine(
            self.coords[1..].iter().map(|c| c / z0).collect(),
        ))
    }

    /// Euclidean distance between coordinate vectors of equal length.
    pub fn distance(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.coords.len(), other.coords.len());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest coordinate magnitude.
    pub fn max_coord(&self) -> f64 {
        self.coords.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn canonical_representative_leads_with_one() {
        let p = Point::homogeneous(vec![c(2.0, 0.0), c(4.0, 0.0), c(-6.0, 0.0)]);
        let q = p.canonicalized(1e-8);
        assert_eq!(q.coords()[0], c(1.0, 0.0));
        assert_eq!(q.coords()[1], c(2.0, 0.0));
        assert_eq!(q.coords()[2], c(-3.0, 0.0));
    }

    #[test]
    fn canonicalize_skips_numerically_zero_leading_coord() {
        let p = Point::homogeneous(vec![c(1e-14, 0.0), c(0.0, 2.0), c(4.0, 0.0)]);
        let q = p.canonicalized(1e-8);
        assert!((q.coords()[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn dehomogenize_detects_infinity() {
        let inf = Point::homogeneous(vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(inf.dehomogenized(1e-8).is_none());
        let fin = Point::homogeneous(vec![c(2.0, 0.0), c(4.0, 0.0), c(6.0, 0.0)]);
        let aff = fin.dehomogenized(1e-8).unwrap();
        assert_eq!(aff.coords(), &[c(2.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn distance_is_euclidean() {
        let a = Point::affine_real(&[0.0, 0.0]);
        let b = Point::affine_real(&[3.0, 4.0]);
        assert!((a.distance(&b) - 5.0).abs() < 1e-15);
    }
}
