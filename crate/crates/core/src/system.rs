//! Polynomial systems: construction, the text format, homogenization, and
//! degree bookkeeping.
//!
//! The text format is line oriented:
//!
//! ```text
//! # comments run to end of line
//! vars: z1 z2
//! 4*z1^2 - 16*z1 + z2^2 - 2*z2 + 13
//! 2*z1 + z2 - 7
//! ```
//!
//! The header fixes the variable order; each following nonblank line is one
//! polynomial. Coefficients may be unsigned integers, decimals (`2.5`), or
//! fractions (`3/2`); `*` between a coefficient and a variable is optional,
//! as is a sign on the first term. Printing a system produces text in the
//! same format that parses back to the identical term maps.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::polynomial::Polynomial;

/// A finite system of nonzero polynomials sharing one variable set.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySystem {
    polys: Vec<Polynomial>,
    variable_names: Vec<String>,
}

impl PolySystem {
    /// Build a system, validating the shared-arity and nonzero invariants.
    pub fn new(polys: Vec<Polynomial>, variable_names: Vec<String>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::EmptySystem);
        }
        let n = variable_names.len();
        for (i, p) in polys.iter().enumerate() {
            if p.num_vars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.num_vars(),
                });
            }
            if p.is_zero() {
                return Err(Error::ZeroPolynomial { line: i + 1 });
            }
        }
        Ok(PolySystem {
            polys,
            variable_names,
        })
    }

    /// Parse the text format described in the module docs.
    pub fn parse(text: &str) -> Result<Self> {
        parse::system(text)
    }

    /// Number of variables.
    pub fn num_vars(&self) -> usize {
        self.variable_names.len()
    }

    /// Number of equations.
    pub fn num_equations(&self) -> usize {
        self.polys.len()
    }

    /// The equations in input order.
    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// Variable names in ambient order.
    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    /// Total degree of each equation.
    pub fn degrees(&self) -> Vec<u32> {
        self.polys.iter().map(Polynomial::total_degree).collect()
    }

    /// True when there are as many equations as variables.
    pub fn is_square(&self) -> bool {
        self.num_equations() == self.num_vars()
    }

    /// Product of the equation degrees — the generic root count (with
    /// multiplicity, including roots at infinity) for square systems.
    pub fn bezout_number(&self) -> Option<u64> {
        if !self.is_square() {
            return None;
        }
        let mut acc: u64 = 1;
        for d in self.degrees() {
            acc = acc.checked_mul(d as u64)?;
        }
        Some(acc)
    }

    /// Evaluate every equation at a complex point.
    pub fn evaluate_all(&self, coords: &[Complex64]) -> Result<Vec<Complex64>> {
        self.polys.iter().map(|p| p.evaluate(coords)).collect()
    }

    /// Largest equation residual magnitude at a complex point.
    pub fn max_residual(&self, coords: &[Complex64]) -> Result<f64> {
        Ok(self
            .evaluate_all(coords)?
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max))
    }

    /// Lift every equation so its terms share that equation's total degree.
    ///
    /// The homogenization variable becomes index 0 with a fresh name (`z0`,
    /// or `z0_`, `z0__`, ... if taken).
    pub fn homogenize(&self) -> PolySystem {
        let mut z0 = String::from("z0");
        while self.variable_names.iter().any(|v| *v == z0) {
            z0.push('_');
        }
        let mut names = Vec::with_capacity(self.num_vars() + 1);
        names.push(z0);
        names.extend(self.variable_names.iter().cloned());
        PolySystem {
            polys: self.polys.iter().map(Polynomial::homogenize).collect(),
            variable_names: names,
        }
    }

    /// Substitute 1 for the variable at index 0 and drop it.
    pub fn dehomogenize(&self) -> Result<PolySystem> {
        let polys: Vec<Polynomial> = self.polys.iter().map(Polynomial::dehomogenize).collect();
        PolySystem::new(polys, self.variable_names[1..].to_vec())
    }
}

impl fmt::Display for PolySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vars:")?;
        for name in &self.variable_names {
            write!(f, " {name}")?;
        }
        for p in &self.polys {
            write!(f, "\n{p}")?;
        }
        Ok(())
    }
}

mod parse {
    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Ident(String),
        Number(f64),
        Plus,
        Minus,
        Star,
    }

    struct Lexer<'a> {
        chars: std::iter::Peekable<std::str::CharIndices<'a>>,
        line: usize,
    }

    impl<'a> Lexer<'a> {
        fn err(&self, col: usize, msg: impl Into<String>) -> Error {
            Error::Parse {
                line: self.line,
                col,
                msg: msg.into(),
            }
        }

        /// Lex one line into `(token, column)` pairs.
        fn tokens(&mut self) -> Result<Vec<(Tok, usize)>> {
            let mut out = Vec::new();
            while let Some(&(pos, ch)) = self.chars.peek() {
                let col = pos + 1;
                match ch {
                    ' ' | '\t' | '\r' => {
                        self.chars.next();
                    }
                    '+' => {
                        self.chars.next();
                        out.push((Tok::Plus, col));
                    }
                    '-' => {
                        self.chars.next();
                        out.push((Tok::Minus, col));
                    }
                    '*' => {
                        self.chars.next();
                        out.push((Tok::Star, col));
                    }
                    '0'..='9' => out.push((self.number(col)?, col)),
                    c if c.is_ascii_alphabetic() || c == '_' => {
                        let mut name = String::new();
                        while let Some(&(_, c)) = self.chars.peek() {
                            if c.is_ascii_alphanumeric() || c == '_' {
                                name.push(c);
                                self.chars.next();
                            } else {
                                break;
                            }
                        }
                        // A caret binds to the preceding identifier, so fold
                        // "name^k" into a single token here.
                        if let Some(&(_, '^')) = self.chars.peek() {
                            self.chars.next();
                            let epos = self
                                .chars
                                .peek()
                                .map(|&(p, _)| p)
                                .ok_or_else(|| self.err(col, "expected exponent after '^'"))?;
                            let exp = self.uint(epos + 1)?;
                            out.push((Tok::Ident(format!("{name}^{exp}")), col));
                        } else {
                            out.push((Tok::Ident(name), col));
                        }
                    }
                    '^' => return Err(self.err(col, "'^' must follow a variable")),
                    other => return Err(self.err(col, format!("unexpected character '{other}'"))),
                }
            }
            Ok(out)
        }

        fn uint(&mut self, col: usize) -> Result<u32> {
            let mut digits = String::new();
            while let Some(&(_, c)) = self.chars.peek() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    self.chars.next();
                } else {
                    break;
                }
            }
            if digits.is_empty() {
                return Err(self.err(col, "expected an unsigned integer"));
            }
            digits
                .parse()
                .map_err(|_| self.err(col, format!("integer '{digits}' out of range")))
        }

        fn number(&mut self, col: usize) -> Result<Tok> {
            let mut text = String::new();
            while let Some(&(_, c)) = self.chars.peek() {
                if c.is_ascii_digit() {
                    text.push(c);
                    self.chars.next();
                } else {
                    break;
                }
            }
            match self.chars.peek() {
                Some(&(_, '.')) => {
                    text.push('.');
                    self.chars.next();
                    let before = text.len();
                    while let Some(&(_, c)) = self.chars.peek() {
                        if c.is_ascii_digit() {
                            text.push(c);
                            self.chars.next();
                        } else {
                            break;
                        }
                    }
                    if text.len() == before {
                        return Err(self.err(col, "expected digits after '.'"));
                    }
                    let value: f64 = text
                        .parse()
                        .map_err(|_| self.err(col, format!("bad decimal '{text}'")))?;
                    Ok(Tok::Number(value))
                }
                Some(&(_, '/')) => {
                    self.chars.next();
                    let numer: f64 = text
                        .parse()
                        .map_err(|_| self.err(col, format!("bad integer '{text}'")))?;
                    let dpos = match self.chars.peek() {
                        Some(&(p, _)) => p,
                        None => return Err(self.err(col, "expected denominator after '/'")),
                    };
                    let denom = self.uint(dpos + 1)? as f64;
                    if denom == 0.0 {
                        return Err(self.err(col, "zero denominator"));
                    }
                    Ok(Tok::Number(numer / denom))
                }
                _ => {
                    let value: f64 = text
                        .parse()
                        .map_err(|_| self.err(col, format!("bad integer '{text}'")))?;
                    Ok(Tok::Number(value))
                }
            }
        }
    }

    fn lex_line(line: &str, line_no: usize) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer {
            chars: line.char_indices().peekable(),
            line: line_no,
        };
        lx.tokens()
    }

    /// Parse one polynomial line against the declared variables.
    fn poly_line(line: &str, line_no: usize, vars: &[String]) -> Result<Polynomial> {
        let toks = lex_line(line, line_no)?;
        let n = vars.len();
        let mut p = Polynomial::zero(n);
        let mut i = 0usize;
        let perr = |col: usize, msg: &str| Error::Parse {
            line: line_no,
            col,
            msg: msg.into(),
        };

        let mut first = true;
        while i < toks.len() {
            // Sign: required between terms, optional before the first.
            let mut sign = 1.0;
            match &toks[i] {
                (Tok::Plus, _) => i += 1,
                (Tok::Minus, _) => {
                    sign = -1.0;
                    i += 1;
                }
                (_, col) if !first => {
                    return Err(perr(*col, "expected '+' or '-' between terms"));
                }
                _ => {}
            }
            first = false;

            // Optional coefficient.
            let mut coeff = 1.0;
            let mut saw_any = false;
            if let Some((Tok::Number(v), _)) = toks.get(i) {
                coeff = *v;
                saw_any = true;
                i += 1;
                if let Some((Tok::Star, star_col)) = toks.get(i) {
                    match toks.get(i + 1) {
                        Some((Tok::Ident(_), _)) => i += 1,
                        _ => return Err(perr(*star_col, "expected a variable after '*'")),
                    }
                }
            }

            // Factors: identifiers with optional '^uint' (folded by the
            // lexer into "name^k"), separated by optional '*'.
            let mut exponents = vec![0u32; n];
            loop {
                match toks.get(i) {
                    Some((Tok::Ident(text), col)) => {
                        let (name, exp) = match text.split_once('^') {
                            Some((name, e)) => {
                                let exp: u32 = e.parse().map_err(|_| {
                                    perr(*col, &format!("bad exponent in '{text}'"))
                                })?;
                                (name, exp)
                            }
                            None => (text.as_str(), 1),
                        };
                        let idx = vars.iter().position(|v| v == name).ok_or_else(|| {
                            perr(*col, &format!("unknown variable '{name}'"))
                        })?;
                        exponents[idx] += exp;
                        saw_any = true;
                        i += 1;
                        if let Some((Tok::Star, _)) = toks.get(i) {
                            i += 1;
                            // After '*', a factor must follow.
                            match toks.get(i) {
                                Some((Tok::Ident(_), _)) => {}
                                Some((_, col)) => {
                                    return Err(perr(*col, "expected a variable after '*'"))
                                }
                                None => {
                                    return Err(perr(line.len() + 1, "expected a variable after '*'"))
                                }
                            }
                        }
                    }
                    Some((Tok::Number(_), col)) => {
                        return Err(perr(*col, "coefficient must come first in a term"));
                    }
                    _ => break,
                }
            }

            if !saw_any {
                let col = toks.get(i).map(|(_, c)| *c).unwrap_or(line.len() + 1);
                return Err(perr(col, "expected a term"));
            }
            p.add_term(Monomial::new(exponents), sign * coeff)?;
        }

        if first {
            return Err(perr(1, "empty polynomial"));
        }
        if p.is_zero() {
            return Err(Error::ZeroPolynomial { line: line_no });
        }
        Ok(p)
    }

    pub(super) fn system(text: &str) -> Result<PolySystem> {
        let mut vars: Option<Vec<String>> = None;
        let mut polys = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            if line.trim().is_empty() {
                continue;
            }
            match &vars {
                None => {
                    let trimmed = line.trim_start();
                    let col = line.len() - trimmed.len() + 1;
                    let Some(rest) = trimmed.strip_prefix("vars:") else {
                        return Err(Error::Parse {
                            line: line_no,
                            col,
                            msg: "expected a 'vars:' header first".into(),
                        });
                    };
                    let names: Vec<String> = rest.split_whitespace().map(String::from).collect();
                    if names.is_empty() {
                        return Err(Error::Parse {
                            line: line_no,
                            col,
                            msg: "'vars:' header declares no variables".into(),
                        });
                    }
                    for (i, name) in names.iter().enumerate() {
                        let ok = name
                            .chars()
                            .next()
                            .map(|c| c.is_ascii_alphabetic() || c == '_')
                            .unwrap_or(false)
                            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                        if !ok {
                            return Err(Error::Parse {
                                line: line_no,
                                col,
                                msg: format!("bad variable name '{name}'"),
                            });
                        }
                        if names[..i].contains(name) {
                            return Err(Error::Parse {
                                line: line_no,
                                col,
                                msg: format!("duplicate variable '{name}'"),
                            });
                        }
                    }
                    vars = Some(names);
                }
                Some(names) => {
                    polys.push(poly_line(line, line_no, names)?);
                }
            }
        }

        let Some(names) = vars else {
            return Err(Error::EmptySystem);
        };
        PolySystem::new(polys, names)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_two_parabola_system() {
        let sys = PolySystem::parse(
            "vars: z1 z2\n4*z1^2 - 16*z1 + z2^2 - 2*z2 + 13\n2*z1 + z2 - 7\n",
        )
        .unwrap();
        assert_eq!(sys.num_vars(), 2);
        assert_eq!(sys.num_equations(), 2);
        assert_eq!(sys.degrees(), vec![2, 1]);
        assert_eq!(sys.bezout_number(), Some(2));
        let r = sys
            .max_residual(&[Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)])
            .unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn merges_duplicate_terms() {
        let sys = PolySystem::parse("vars: z1 z2\nz1*z2 + z1*z2\n").unwrap();
        let p = &sys.polys()[0];
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.coefficient(&Monomial::new(vec![1, 1])), 2.0);
    }

    #[test]
    fn accepts_fractions_decimals_and_implicit_star() {
        let sys = PolySystem::parse("vars: x\n3/2x^2 + 0.5*x - 2\n").unwrap();
        let p = &sys.polys()[0];
        assert_eq!(p.coefficient(&Monomial::new(vec![2])), 1.5);
        assert_eq!(p.coefficient(&Monomial::new(vec![1])), 0.5);
        assert_eq!(p.coefficient(&Monomial::new(vec![0])), -2.0);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let sys = PolySystem::parse("# heading\n\nvars: x # trailing\n\nx - 1 # root at 1\n").unwrap();
        assert_eq!(sys.num_equations(), 1);
    }

    #[test]
    fn rejects_unknown_variable_with_position() {
        let err = PolySystem::parse("vars: z1\nz1 + y\n").unwrap_err();
        match err {
            Error::Parse { line, msg, .. } => {
                assert_eq!(line, 2);
                assert!(msg.contains("unknown variable 'y'"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_zero_polynomial_and_empty_system() {
        assert!(matches!(
            PolySystem::parse("vars: x\nx - x\n"),
            Err(Error::ZeroPolynomial { line: 2 })
        ));
        assert!(matches!(PolySystem::parse("vars: x\n"), Err(Error::EmptySystem)));
        assert!(matches!(PolySystem::parse(""), Err(Error::EmptySystem)));
    }

    #[test]
    fn homogenize_matches_hand_lift_and_round_trips() {
        let sys = PolySystem::parse("vars: z1 z2\nz2 - z1^2\nz1 - 3\n").unwrap();
        let h = sys.homogenize();
        assert_eq!(h.num_vars(), 3);
        assert_eq!(h.variable_names()[0], "z0");
        // z2 - z1^2 lifts to z0*z2 - z1^2; z1 - 3 lifts to z1 - 3*z0.
        let p0 = &h.polys()[0];
        assert_eq!(p0.coefficient(&Monomial::new(vec![1, 0, 1])), 1.0);
        assert_eq!(p0.coefficient(&Monomial::new(vec![0, 2, 0])), -1.0);
        let p1 = &h.polys()[1];
        assert_eq!(p1.coefficient(&Monomial::new(vec![0, 1, 0])), 1.0);
        assert_eq!(p1.coefficient(&Monomial::new(vec![1, 0, 0])), -3.0);
        assert_eq!(h.dehomogenize().unwrap(), sys);
    }

    #[test]
    fn display_round_trips() {
        let text = "vars: z1 z2\n4*z1^2 - 16*z1 + z2^2 - 2*z2 + 13\n2*z1 + z2 - 7\n";
        let sys = PolySystem::parse(text).unwrap();
        let printed = sys.to_string();
        let again = PolySystem::parse(&printed).unwrap();
        assert_eq!(sys, again);
    }

    #[test]
    fn leading_sign_is_accepted() {
        let sys = PolySystem::parse("vars: x\n-x + 2\n").unwrap();
        assert_eq!(sys.polys()[0].coefficient(&Monomial::new(vec![1])), -1.0);
    }
}
