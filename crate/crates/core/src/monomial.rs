//! Monomials over a fixed variable set, ordered by total degree first and
//! descending lexicographic exponents within a degree.
//!
//! The ordering is the backbone of the whole crate: Macaulay matrix columns,
//! null-space rows, and state-vector entries are all indexed by position in
//! this order, so it is implemented once here (as [`Ord`] on [`Monomial`])
//! and everything else defers to it.
//!
//! For `n = 2` the order starts
//!
//! ```text
//! 1 < z1 < z2 < z1^2 < z1*z2 < z2^2 < z1^3 < z1^2*z2 < ...
//! ```
//!
//! i.e. lower total degree always comes first, and within a degree block the
//! monomial whose exponent vector is larger at the first differing position
//! comes first.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A power product of the variables `z1..zn`, stored as its exponent vector.
///
/// The total degree is always recomputed from the exponents, never cached,
/// so the two can not drift apart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exponents: Vec<u32>,
}

impl Monomial {
    /// Monomial with the given exponent vector.
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial { exponents }
    }

    /// The constant monomial `1` in `n` variables.
    pub fn one(n: usize) -> Self {
        Monomial {
            exponents: vec![0; n],
        }
    }

    /// The single variable `z(i+1)` in `n` variables (`i` is 0-based).
    pub fn var(n: usize, i: usize) -> Self {
        let mut exponents = vec![0; n];
        exponents[i] = 1;
        Monomial { exponents }
    }

    /// Number of variables of the ambient ring.
    pub fn num_vars(&self) -> usize {
        self.exponents.len()
    }

    /// Sum of all exponents.
    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Exponent of variable `i` (0-based).
    pub fn exponent(&self, i: usize) -> u32 {
        self.exponents[i]
    }

    /// The underlying exponent vector.
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Product of two monomials over the same variables.
    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        if self.num_vars() != other.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars(),
                got: other.num_vars(),
            });
        }
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Monomial { exponents })
    }

    /// Multiply by the single variable `i`.
    pub fn shift_up(&self, i: usize) -> Monomial {
        let mut exponents = self.exponents.clone();
        exponents[i] += 1;
        Monomial { exponents }
    }

    /// Divide by the single variable `i`, or `None` if `i` does not divide.
    pub fn shift_down(&self, i: usize) -> Option<Monomial> {
        if self.exponents[i] == 0 {
            return None;
        }
        let mut exponents = self.exponents.clone();
        exponents[i] -= 1;
        Some(Monomial { exponents })
    }

    /// Compare under the crate's monomial order, checking that both sides
    /// live in the same variable count first.
    pub fn try_compare(&self, other: &Monomial) -> Result<Ordering> {
        if self.num_vars() != other.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars(),
                got: other.num_vars(),
            });
        }
        Ok(self.cmp(other))
    }

    /// View this degree-`<= d` monomial in one more variable: the new first
    /// variable absorbs the slack so the result has total degree exactly `d`.
    pub fn homogenize(&self, d: u32) -> Result<Monomial> {
        let deg = self.total_degree();
        if deg > d {
            return Err(Error::DegreeTooLow {
                min: deg as usize,
                got: d as usize,
            });
        }
        let mut exponents = Vec::with_capacity(self.num_vars() + 1);
        exponents.push(d - deg);
        exponents.extend_from_slice(&self.exponents);
        Ok(Monomial { exponents })
    }

    /// Drop the homogenizing first variable.
    pub fn dehomogenize(&self) -> Monomial {
        Monomial {
            exponents: self.exponents[1..].to_vec(),
        }
    }

    /// Position of this monomial in [`enumerate_monomials`] of its ambient
    /// variable count (any degree bound that includes it).
    pub fn position(&self) -> usize {
        let n = self.num_vars();
        let deg = self.total_degree();
        let before_block = count_monomials(n, deg.saturating_sub(1)) as usize;
        let before_block = if deg == 0 { 0 } else { before_block };
        before_block + rank_within_degree(&self.exponents, deg)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.num_vars(), other.num_vars());
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Same degree: the side with the larger exponent at the first
        // differing position comes first.
        for (a, b) in self.exponents.iter().zip(&other.exponents) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.total_degree() == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "z{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Binomial coefficient, panicking on overflow (degrees and variable counts
/// in this crate stay far below that).
pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflow")
}

/// Number of monomials in `n` variables of total degree at most `d`.
pub fn count_monomials(n: usize, d: u32) -> u64 {
    binomial(n as u64 + d as u64, n as u64)
}

/// Number of monomials in `n` variables of total degree exactly `d`.
pub fn count_monomials_of_degree(n: usize, d: u32) -> u64 {
    if n == 0 {
        return if d == 0 { 1 } else { 0 };
    }
    binomial(n as u64 + d as u64 - 1, n as u64 - 1)
}

/// Start offsets of each degree block among monomials of degree `<= d`:
/// entry `delta` is the index of the first degree-`delta` monomial, and the
/// final entry is the total count, so block `delta` spans
/// `offsets[delta]..offsets[delta + 1]`.
pub fn degree_block_offsets(n: usize, d: u32) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(d as usize + 2);
    offsets.push(0usize);
    let mut total = 0usize;
    for delta in 0..=d {
        total += count_monomials_of_degree(n, delta) as usize;
        offsets.push(total);
    }
    offsets
}

/// All monomials in `n` variables of total degree at most `d`, in the
/// crate's monomial order.
pub fn enumerate_monomials(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(count_monomials(n, d) as usize);
    let mut scratch = vec![0u32; n];
    for delta in 0..=d {
        emit_degree_block(&mut out, &mut scratch, 0, delta);
    }
    out
}

/// Append all exponent vectors of the given total degree, filling positions
/// `from..` of `scratch`, in descending lexicographic order.
fn emit_degree_block(out: &mut Vec<Monomial>, scratch: &mut [u32], from: usize, degree: u32) {
    if from == scratch.len() {
        if degree == 0 {
            out.push(Monomial::new(scratch.to_vec()));
        }
        return;
    }
    if from == scratch.len() - 1 {
        scratch[from] = degree;
        out.push(Monomial::new(scratch.to_vec()));
        scratch[from] = 0;
        return;
    }
    for e in (0..=degree).rev() {
        scratch[from] = e;
        emit_degree_block(out, scratch, from + 1, degree - e);
        scratch[from] = 0;
    }
}

/// 0-based rank of `exponents` among same-degree monomials in descending
/// lexicographic order.
fn rank_within_degree(exponents: &[u32], degree: u32) -> usize {
    if exponents.len() <= 1 {
        return 0;
    }
    let head = exponents[0];
    let rest_vars = exponents.len() - 1;
    let mut rank = 0u64;
    // Monomials with a strictly larger first exponent all come earlier.
    for e in (head + 1)..=degree {
        rank += count_monomials_of_degree(rest_vars, degree - e);
    }
    rank as usize + rank_within_degree(&exponents[1..], degree - head)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn degree_dominates_order() {
        assert!(m(&[0, 0]) < m(&[1, 0]));
        assert!(m(&[0, 1]) < m(&[2, 0]));
        assert!(m(&[1, 1]) < m(&[3, 0]));
    }

    #[test]
    fn within_degree_first_larger_exponent_wins() {
        // z1 < z2 and z1^2 < z1*z2 < z2^2.
        assert!(m(&[1, 0]) < m(&[0, 1]));
        assert!(m(&[2, 0]) < m(&[1, 1]));
        assert!(m(&[1, 1]) < m(&[0, 2]));
        // Three variables: z1*z3 < z2^2.
        assert!(m(&[1, 0, 1]) < m(&[0, 2, 0]));
    }

    #[test]
    fn mismatched_variable_counts_are_an_error() {
        let a = m(&[1, 0]);
        let b = m(&[1, 0, 0]);
        assert!(matches!(
            a.try_compare(&b),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn enumeration_order_two_vars_degree_two() {
        let got = enumerate_monomials(2, 2);
        let want = [
            m(&[0, 0]),
            m(&[1, 0]),
            m(&[0, 1]),
            m(&[2, 0]),
            m(&[1, 1]),
            m(&[0, 2]),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn enumeration_order_two_vars_degree_three_tail() {
        let got = enumerate_monomials(2, 3);
        assert_eq!(got.len(), 10);
        let tail: Vec<_> = got[6..].to_vec();
        let want = [m(&[3, 0]), m(&[2, 1]), m(&[1, 2]), m(&[0, 3])];
        assert_eq!(tail, want);
    }

    #[test]
    fn enumeration_counts_match_binomials() {
        for n in 1..=4usize {
            for d in 0..=5u32 {
                let list = enumerate_monomials(n, d);
                assert_eq!(list.len() as u64, count_monomials(n, d));
                // Sorted and duplicate-free under the monomial order.
                for w in list.windows(2) {
                    assert!(w[0] < w[1]);
                }
            }
        }
    }

    #[test]
    fn degree_blocks_partition_the_enumeration() {
        let n = 3;
        let d = 4;
        let list = enumerate_monomials(n, d);
        let offsets = degree_block_offsets(n, d);
        assert_eq!(*offsets.last().unwrap(), list.len());
        for delta in 0..=d {
            let block = &list[offsets[delta as usize]..offsets[delta as usize + 1]];
            assert!(!block.is_empty());
            assert!(block.iter().all(|m| m.total_degree() == delta));
        }
    }

    #[test]
    fn position_agrees_with_enumeration() {
        for n in 1..=4usize {
            let list = enumerate_monomials(n, 5);
            for (i, mono) in list.iter().enumerate() {
                assert_eq!(mono.position(), i, "monomial {mono}");
            }
        }
    }

    #[test]
    fn homogenize_round_trip() {
        let a = m(&[1, 2]);
        let h = a.homogenize(5).unwrap();
        assert_eq!(h.exponents(), &[2, 1, 2]);
        assert_eq!(h.total_degree(), 5);
        assert_eq!(h.dehomogenize(), a);
        assert!(a.homogenize(2).is_err());
    }

    #[test]
    fn shifts_move_one_exponent() {
        let a = m(&[1, 0]);
        assert_eq!(a.shift_up(1), m(&[1, 1]));
        assert_eq!(a.shift_down(0), Some(m(&[0, 0])));
        assert_eq!(a.shift_down(1), None);
    }

    #[test]
    fn display_forms() {
        assert_eq!(m(&[0, 0]).to_string(), "1");
        assert_eq!(m(&[1, 0]).to_string(), "z1");
        assert_eq!(m(&[2, 1]).to_string(), "z1^2*z2");
        assert_eq!(m(&[0, 3]).to_string(), "z2^3");
    }
}
