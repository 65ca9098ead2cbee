//! Polynomials with real coefficients over a fixed variable count.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], so iteration is always
//! in the crate's monomial order and there is exactly one slot per monomial.
//! Coefficients are real on input; evaluation is complex because roots
//! generally are.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::monomial::Monomial;

/// A multivariate polynomial with real coefficients.
///
/// Invariants: no stored coefficient is zero, every key has `num_vars`
/// exponents, and the total degree is derived from the terms on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    /// The zero polynomial in `n` variables (no terms).
    pub fn zero(n: usize) -> Self {
        Polynomial {
            num_vars: n,
            terms: BTreeMap::new(),
        }
    }

    /// Build from `(monomial, coefficient)` pairs, merging duplicates and
    /// dropping terms that cancel to zero.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, f64)>,
    {
        let mut p = Polynomial::zero(n);
        for (mono, coeff) in terms {
            p.add_term(mono, coeff)?;
        }
        Ok(p)
    }

    /// Add `coeff * mono`, merging with an existing term and removing the
    /// slot if the sum cancels.
    pub fn add_term(&mut self, mono: Monomial, coeff: f64) -> Result<()> {
        if mono.num_vars() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: mono.num_vars(),
            });
        }
        debug_assert!(coeff.is_finite());
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(slot) => {
                if coeff != 0.0 {
                    slot.insert(coeff);
                }
            }
            Entry::Occupied(mut slot) => {
                let sum = *slot.get() + coeff;
                if sum == 0.0 {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    /// Variable count of the ambient ring.
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// True if there are no terms.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree over all terms; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Number of stored terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `mono`, zero if absent.
    pub fn coefficient(&self, mono: &Monomial) -> f64 {
        self.terms.get(mono).copied().unwrap_or(0.0)
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    /// Evaluate at a complex point (`0^0 = 1`).
    pub fn evaluate(&self, coords: &[Complex64]) -> Result<Complex64> {
        if coords.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: coords.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (mono, coeff) in self.terms() {
            let mut term = Complex64::new(coeff, 0.0);
            for (i, &e) in mono.exponents().iter().enumerate() {
                if e > 0 {
                    term *= coords[i].powu(e);
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Evaluate at a real point.
    pub fn evaluate_real(&self, coords: &[f64]) -> Result<Complex64> {
        let c: Vec<Complex64> = coords.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.evaluate(&c)
    }

    /// Lift to `n + 1` variables so every term has total degree equal to
    /// this polynomial's total degree; the new variable sits at index 0.
    pub fn homogenize(&self) -> Polynomial {
        let d = self.total_degree();
        let terms = self
            .terms()
            .map(|(m, c)| {
                let lifted = m.homogenize(d).expect("term degree exceeds total degree");
                (lifted, c)
            })
            .collect::<Vec<_>>();
        Polynomial::from_terms(self.num_vars + 1, terms).expect("homogenized terms are consistent")
    }

    /// Substitute 1 for the variable at index 0 and drop it.
    pub fn dehomogenize(&self) -> Polynomial {
        let terms = self
            .terms()
            .map(|(m, c)| (m.dehomogenize(), c))
            .collect::<Vec<_>>();
        Polynomial::from_terms(self.num_vars - 1, terms).expect("dehomogenized terms are consistent")
    }
}

impl fmt::Display for Polynomial {
    /// Terms in ascending monomial order; unit coefficients are elided on
    /// nonconstant monomials. The output re-parses to the same term map.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (mono, coeff)) in self.terms().enumerate() {
            let mag = coeff.abs();
            if i == 0 {
                if coeff < 0.0 {
                    write!(f, "-")?;
                }
            } else if coeff < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let constant = mono.total_degree() == 0;
            if constant {
                write!(f, "{mag}")?;
            } else if mag == 1.0 {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}
