//! Truncated multivariate power series over an exact coefficient ring.
//!
//! A series lives in a fixed shape `(nvars, bound)`: formal variables
//! `s1, ..., s{nvars}` and retention of every term of total degree at
//! most `bound`. Terms beyond the bound are dropped everywhere, so all
//! operations are exact "mod degree bound + 1". Storage is sparse with
//! canonical zero-removal, which makes structural equality semantic
//! equality of the retained jets.
//!
//! Binary operations require both operands to share a shape and panic
//! otherwise (shape agreement is a construction-time concern, not a
//! runtime one); partial operations — unit inversion, composition,
//! compositional inversion, parsing — report domain failures as
//! [`SeriesError`] values.
//!
//! One precision caveat is part of the contract: `partial_derivative`
//! keeps the recorded bound even though the term of top degree `bound`
//! would need degree `bound + 1` of the source to be known. Callers
//! comparing derivative outputs of genuinely truncated data must
//! compare through degree `bound - 1` (see [`MultiSeries::truncated`]);
//! for inputs that are exact polynomials within the bound no precision
//! is lost.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::rational::Rational;
use crate::ring::Ring;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("variable index {var} out of range for {nvars} variables")]
    VarOutOfRange { var: usize, nvars: usize },
    #[error("constant term is not a unit")]
    NonUnitConstantTerm,
    #[error("constant term must be zero")]
    ConstantTermNonzero,
    #[error("operation requires a univariate series, got {nvars} variables")]
    NotUnivariate { nvars: usize },
    #[error("linear coefficient is not a unit")]
    LinearTermNotUnit,
    #[error("series involves variables other than s{}", var + 1)]
    MixedVariables { var: usize },
    #[error("cannot parse series: {0}")]
    Parse(String),
}

/// Sparse truncated power series in `nvars` variables, exact modulo
/// total degree `bound + 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiSeries<R: Ring> {
    nvars: usize,
    bound: u32,
    terms: BTreeMap<Vec<u32>, R>,
}

fn degree(key: &[u32]) -> u32 {
    key.iter().sum()
}

impl<R: Ring> MultiSeries<R> {
    pub fn zero(nvars: usize, bound: u32) -> Self {
        MultiSeries {
            nvars,
            bound,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, bound: u32, c: R) -> Self {
        let mut s = MultiSeries::zero(nvars, bound);
        s.add_term(vec![0; nvars], c);
        s
    }

    pub fn one(nvars: usize, bound: u32) -> Self {
        MultiSeries::constant(nvars, bound, R::one())
    }

    /// The variable `s{index+1}`. A bound of zero truncates the
    /// variable itself away, leaving the zero series.
    pub fn var(nvars: usize, bound: u32, index: usize) -> Result<Self, SeriesError> {
        if index >= nvars {
            return Err(SeriesError::VarOutOfRange { var: index, nvars });
        }
        let mut key = vec![0; nvars];
        key[index] = 1;
        let mut s = MultiSeries::zero(nvars, bound);
        s.add_term(key, R::one());
        Ok(s)
    }

    /// A single term. Exponents beyond the degree bound are truncated
    /// away (the result is then zero).
    pub fn monomial(nvars: usize, bound: u32, exps: &[u32], coeff: R) -> Result<Self, SeriesError> {
        if exps.len() != nvars {
            return Err(SeriesError::VarOutOfRange {
                var: exps.len(),
                nvars,
            });
        }
        let mut s = MultiSeries::zero(nvars, bound);
        s.add_term(exps.to_vec(), coeff);
        Ok(s)
    }

    /// Univariate series from a dense coefficient list `c0, c1, ...`
    /// (constant term first). Coefficients past the bound are dropped.
    pub fn from_univariate_coeffs(bound: u32, coeffs: &[R]) -> Self {
        let mut s = MultiSeries::zero(1, bound);
        for (k, c) in coeffs.iter().enumerate() {
            s.add_term(vec![k as u32], c.clone());
        }
        s
    }

    fn add_term(&mut self, key: Vec<u32>, coeff: R) {
        debug_assert_eq!(key.len(), self.nvars);
        if coeff.is_zero() || degree(&key) > self.bound {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get().add(&coeff);
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &R)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> R {
        assert_eq!(exps.len(), self.nvars, "exponent arity mismatch");
        self.terms.get(exps).cloned().unwrap_or_else(R::zero)
    }

    pub fn constant_term(&self) -> R {
        self.coeff(&vec![0; self.nvars])
    }

    /// Coefficient of `s1^k` in a univariate series.
    pub fn coeff_univar(&self, k: u32) -> R {
        assert_eq!(self.nvars, 1, "coeff_univar on a multivariate series");
        self.coeff(&[k])
    }

    /// Smallest total degree with a nonzero term.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|k| degree(k)).min()
    }

    fn assert_same_shape(&self, rhs: &Self) {
        assert_eq!(
            (self.nvars, self.bound),
            (rhs.nvars, rhs.bound),
            "series shape mismatch: ({}, {}) vs ({}, {})",
            self.nvars,
            self.bound,
            rhs.nvars,
            rhs.bound
        );
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.assert_same_shape(rhs);
        let mut out = self.clone();
        for (key, coeff) in &rhs.terms {
            out.add_term(key.clone(), coeff.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        MultiSeries {
            nvars: self.nvars,
            bound: self.bound,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, factor: &R) -> Self {
        let mut out = MultiSeries::zero(self.nvars, self.bound);
        for (key, coeff) in &self.terms {
            out.add_term(key.clone(), coeff.mul(factor));
        }
        out
    }

    pub fn scale_q(&self, factor: &Rational) -> Self {
        self.scale(&R::from_rational(factor))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.assert_same_shape(rhs);
        let mut out = MultiSeries::zero(self.nvars, self.bound);
        for (ka, ca) in &self.terms {
            let da = degree(ka);
            for (kb, cb) in &rhs.terms {
                if da + degree(kb) > self.bound {
                    continue;
                }
                let key: Vec<u32> = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                out.add_term(key, ca.mul(cb));
            }
        }
        out
    }

    /// Drop every term of total degree above `new_bound` and record the
    /// tighter bound. Raising the bound is not possible (that would
    /// claim precision the data does not have), so the recorded bound
    /// is the minimum of the two.
    pub fn truncated(&self, new_bound: u32) -> Self {
        let bound = self.bound.min(new_bound);
        MultiSeries {
            nvars: self.nvars,
            bound,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| degree(k) <= bound)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, point: &[R]) -> R {
        assert_eq!(point.len(), self.nvars, "evaluation point arity mismatch");
        let mut acc = R::zero();
        for (key, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (i, &exp) in key.iter().enumerate() {
                for _ in 0..exp {
                    term = term.mul(&point[i]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    pub fn partial_derivative(&self, var: usize) -> Result<Self, SeriesError> {
        if var >= self.nvars {
            return Err(SeriesError::VarOutOfRange {
                var,
                nvars: self.nvars,
            });
        }
        let mut out = MultiSeries::zero(self.nvars, self.bound);
        for (key, coeff) in &self.terms {
            if key[var] == 0 {
                continue;
            }
            let mut new_key = key.clone();
            new_key[var] -= 1;
            out.add_term(new_key, coeff.mul(&R::from_int(key[var] as i64)));
        }
        Ok(out)
    }

    /// Multiplicative inverse of a series whose constant term is a unit.
    pub fn unit_inverse(&self) -> Result<Self, SeriesError> {
        let c = self.constant_term();
        let c_inv = c.invert().ok_or(SeriesError::NonUnitConstantTerm)?;
        // self = c * (1 - u) with ord(u) >= 1, so 1/self = (1/c) * sum u^m.
        let normalized = self.scale(&c_inv);
        let one = MultiSeries::one(self.nvars, self.bound);
        let u = one.sub(&normalized);
        let mut acc = one.clone();
        let mut power = one;
        for _ in 1..=self.bound {
            power = power.mul(&u);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc.scale(&c_inv))
    }

    /// Substitute `inner` (constant term zero) into a univariate outer
    /// series: `(outer o inner)(s) = outer(inner(s))`, in the shape of
    /// `inner`.
    pub fn compose_univariate(&self, inner: &Self) -> Result<Self, SeriesError> {
        if self.nvars != 1 {
            return Err(SeriesError::NotUnivariate { nvars: self.nvars });
        }
        if !inner.constant_term().is_zero() {
            return Err(SeriesError::ConstantTermNonzero);
        }
        let kmax = self.bound.min(inner.bound);
        let mut acc = MultiSeries::constant(inner.nvars, inner.bound, self.coeff(&[kmax]));
        for k in (0..kmax).rev() {
            acc = acc.mul(inner);
            acc = acc.add(&MultiSeries::constant(
                inner.nvars,
                inner.bound,
                self.coeff(&[k]),
            ));
        }
        Ok(acc)
    }

    /// Compositional inverse of a univariate series with zero constant
    /// term and unit linear coefficient: the unique `g` with
    /// `g(f(s)) = f(g(s)) = s` modulo the bound.
    ///
    /// Computed by increasing induction on the order: with the linear
    /// coefficient normalized to one, the degree-`k` coefficient `b_k`
    /// is fixed by requiring `sum_i b_i f(x)^i = x` modulo `x^{k+1}`.
    pub fn compositional_inverse(&self) -> Result<Self, SeriesError> {
        if self.nvars != 1 {
            return Err(SeriesError::NotUnivariate { nvars: self.nvars });
        }
        if !self.constant_term().is_zero() {
            return Err(SeriesError::ConstantTermNonzero);
        }
        let a1 = self.coeff(&[1]);
        let a1_inv = a1.invert().ok_or(SeriesError::LinearTermNotUnit)?;

        // phi := f / a1 has linear coefficient one.
        let phi = self.scale(&a1_inv);
        let mut inverse_coeffs: Vec<R> = vec![R::zero(), R::one()];
        let mut powers: Vec<MultiSeries<R>> = vec![phi.clone()]; // powers[i] = phi^{i+1}
        for k in 2..=self.bound {
            powers.push(powers.last().unwrap().mul(&phi));
            let mut residue = R::zero();
            for (i, b) in inverse_coeffs.iter().enumerate().skip(1) {
                residue = residue.add(&b.mul(&powers[i - 1].coeff(&[k])));
            }
            inverse_coeffs.push(residue.neg());
        }

        // Undo the normalization: f(x) = a1 * phi(x), so
        // f^{<-1>}(y) = phi^{<-1>}(y / a1).
        let mut out = MultiSeries::zero(1, self.bound);
        let mut scale = R::one();
        for (k, b) in inverse_coeffs.into_iter().enumerate() {
            out.add_term(vec![k as u32], b.mul(&scale));
            scale = scale.mul(&a1_inv);
        }
        Ok(out)
    }

    /// Re-home the series into a larger variable set: old variable `i`
    /// becomes variable `positions[i]` of an `nvars`-variable series.
    pub fn embed_into(&self, nvars: usize, positions: &[usize]) -> Result<Self, SeriesError> {
        assert_eq!(positions.len(), self.nvars, "one position per variable");
        for &p in positions {
            if p >= nvars {
                return Err(SeriesError::VarOutOfRange { var: p, nvars });
            }
        }
        let mut out = MultiSeries::zero(nvars, self.bound);
        for (key, coeff) in &self.terms {
            let mut new_key = vec![0; nvars];
            for (i, &exp) in key.iter().enumerate() {
                new_key[positions[i]] += exp;
            }
            out.add_term(new_key, coeff.clone());
        }
        Ok(out)
    }

    /// Collapse a series supported on the single variable `var` to a
    /// univariate series in that variable.
    pub fn restrict_to_var(&self, var: usize) -> Result<Self, SeriesError> {
        if var >= self.nvars {
            return Err(SeriesError::VarOutOfRange {
                var,
                nvars: self.nvars,
            });
        }
        let mut out = MultiSeries::zero(1, self.bound);
        for (key, coeff) in &self.terms {
            if key
                .iter()
                .enumerate()
                .any(|(i, &exp)| i != var && exp > 0)
            {
                return Err(SeriesError::MixedVariables { var });
            }
            out.add_term(vec![key[var]], coeff.clone());
        }
        Ok(out)
    }
}

impl MultiSeries<Rational> {
    /// Parse the canonical text form: terms `c`, `c * s1^2 * s2`, or a
    /// bare monomial `s1^2`, joined by `+`. Rationals are `p` or `p/q`.
    /// Terms beyond the degree bound are truncated away.
    pub fn parse(text: &str, nvars: usize, bound: u32) -> Result<Self, SeriesError> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(SeriesError::Parse("empty series literal".to_owned()));
        }
        let mut out = MultiSeries::zero(nvars, bound);
        for raw_term in trimmed.split('+') {
            let term = raw_term.trim();
            if term.is_empty() {
                return Err(SeriesError::Parse("empty term between '+'".to_owned()));
            }
            let mut coeff = Rational::one();
            let mut key = vec![0u32; nvars];
            for (i, raw_factor) in term.split('*').enumerate() {
                let factor = raw_factor.trim();
                if factor.is_empty() {
                    return Err(SeriesError::Parse(format!("empty factor in {term:?}")));
                }
                if let Some(rest) = factor.strip_prefix('s') {
                    let (var_text, exp_text) = match rest.split_once('^') {
                        Some((v, e)) => (v, Some(e)),
                        None => (rest, None),
                    };
                    let var: usize = var_text.parse().map_err(|_| {
                        SeriesError::Parse(format!("bad variable {factor:?}"))
                    })?;
                    if var == 0 || var > nvars {
                        return Err(SeriesError::Parse(format!(
                            "variable s{var} out of range 1..={nvars}"
                        )));
                    }
                    let exp: u32 = match exp_text {
                        Some(e) => e.parse().map_err(|_| {
                            SeriesError::Parse(format!("bad exponent in {factor:?}"))
                        })?,
                        None => 1,
                    };
                    key[var - 1] += exp;
                } else if i == 0 {
                    coeff = factor
                        .parse()
                        .map_err(|_| SeriesError::Parse(format!("bad coefficient {factor:?}")))?;
                } else {
                    return Err(SeriesError::Parse(format!(
                        "coefficient {factor:?} must come first in {term:?}"
                    )));
                }
            }
            out.add_term(key, coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for MultiSeries<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut pieces = Vec::with_capacity(self.terms.len());
        for (key, coeff) in &self.terms {
            let mut piece = coeff.to_string();
            for (i, &exp) in key.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                piece.push_str(&format!(" * s{}", i + 1));
                if exp > 1 {
                    piece.push_str(&format!("^{exp}"));
                }
            }
            pieces.push(piece);
        }
        write!(f, "{}", pieces.join(" + "))
    }
}

impl fmt::Display for MultiSeries<crate::poly::Poly> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut pieces = Vec::with_capacity(self.terms.len());
        for (key, coeff) in &self.terms {
            let mut piece = format!("({coeff})");
            for (i, &exp) in key.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                piece.push_str(&format!(" * s{}", i + 1));
                if exp > 1 {
                    piece.push_str(&format!("^{exp}"));
                }
            }
            pieces.push(piece);
        }
        write!(f, "{}", pieces.join(" + "))
    }
}

impl<R: Ring> fmt::Debug for MultiSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiSeries(nvars={}, bound={}, [", self.nvars, self.bound)?;
        for (i, (key, coeff)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{key:?}: {coeff}")?;
        }
        write!(f, "])")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn s(nvars: usize, bound: u32, index: usize) -> MultiSeries<Rational> {
        MultiSeries::var(nvars, bound, index).unwrap()
    }

    #[test]
    fn additive_inverse_and_canonical_zero() {
        let s1 = s(2, 4, 0);
        assert!(s1.add(&s1.neg()).is_zero());
        assert_eq!(s1.add(&s1.neg()), MultiSeries::zero(2, 4));
    }

    #[test]
    fn multiplication_truncates_at_total_degree() {
        let one = MultiSeries::one(1, 5);
        let s1 = s(1, 5, 0);
        // (1 + s1)(1 - s1) = 1 - s1^2
        let left = one.add(&s1);
        let right = one.sub(&s1);
        let mut expected = MultiSeries::one(1, 5);
        expected = expected.sub(&s1.mul(&s1));
        assert_eq!(left.mul(&right), expected);

        // (s1 + s2)^2 at bound 2 keeps all three degree-2 terms.
        let sum = s(2, 2, 0).add(&s(2, 2, 1));
        let square = sum.mul(&sum);
        let expected = MultiSeries::monomial(2, 2, &[2, 0], q(1, 1))
            .unwrap()
            .add(&MultiSeries::monomial(2, 2, &[1, 1], q(2, 1)).unwrap())
            .add(&MultiSeries::monomial(2, 2, &[0, 2], q(1, 1)).unwrap());
        assert_eq!(square, expected);

        // At bound 1 the same square truncates to zero.
        let sum = s(2, 1, 0).add(&s(2, 1, 1));
        assert!(sum.mul(&sum).is_zero());
    }

    #[test]
    fn unit_inverse_is_a_two_sided_inverse() {
        let one = MultiSeries::one(2, 6);
        assert_eq!(one.unit_inverse().unwrap(), one);

        let f = one.add(&s(2, 6, 0)).add(&s(2, 6, 1).scale(&q(3, 2)));
        let inv = f.unit_inverse().unwrap();
        assert_eq!(f.mul(&inv), one);
        assert_eq!(inv.mul(&f), one);

        // Alternating series for 1/(1 + s1).
        let g = MultiSeries::one(1, 3).add(&s(1, 3, 0));
        let g_inv = g.unit_inverse().unwrap();
        let expected = MultiSeries::from_univariate_coeffs(
            3,
            &[q(1, 1), q(-1, 1), q(1, 1), q(-1, 1)],
        );
        assert_eq!(g_inv, expected);

        assert_eq!(
            s(1, 3, 0).unit_inverse(),
            Err(SeriesError::NonUnitConstantTerm)
        );
    }

    #[test]
    fn partial_derivative_examples() {
        let s1 = s(2, 4, 0);
        let s1_sq = s1.mul(&s1);
        assert_eq!(
            s1_sq.partial_derivative(0).unwrap(),
            s1.scale(&q(2, 1))
        );
        assert!(s1_sq.partial_derivative(1).unwrap().is_zero());

        // d/ds1 (s1^3 + s1*s2) = 3*s1^2 + s2
        let f = MultiSeries::monomial(2, 4, &[3, 0], q(1, 1))
            .unwrap()
            .add(&MultiSeries::monomial(2, 4, &[1, 1], q(1, 1)).unwrap());
        let expected = MultiSeries::monomial(2, 4, &[2, 0], q(3, 1))
            .unwrap()
            .add(&s(2, 4, 1));
        assert_eq!(f.partial_derivative(0).unwrap(), expected);

        assert_eq!(
            f.partial_derivative(5),
            Err(SeriesError::VarOutOfRange { var: 5, nvars: 2 })
        );
    }

    #[test]
    fn composition_examples() {
        // y^2 composed with s1 + s1^2 = s1^2 + 2 s1^3 + s1^4.
        let outer = MultiSeries::from_univariate_coeffs(4, &[q(0, 1), q(0, 1), q(1, 1)]);
        let inner = s(1, 4, 0).add(&MultiSeries::monomial(1, 4, &[2], q(1, 1)).unwrap());
        let expected = MultiSeries::from_univariate_coeffs(
            4,
            &[q(0, 1), q(0, 1), q(1, 1), q(2, 1), q(1, 1)],
        );
        assert_eq!(outer.compose_univariate(&inner).unwrap(), expected);

        // Identity outer reproduces the inner series, multivariate too.
        let identity = s(1, 3, 0);
        let inner = s(2, 3, 0).add(&s(2, 3, 1).mul(&s(2, 3, 1)));
        assert_eq!(identity.compose_univariate(&inner).unwrap(), inner);

        let with_constant = MultiSeries::one(2, 3);
        assert_eq!(
            identity.compose_univariate(&with_constant),
            Err(SeriesError::ConstantTermNonzero)
        );
    }

    #[test]
    fn compositional_inverse_known_series() {
        // f = s + s^2: inverse is s - s^2 + 2 s^3 - 5 s^4 mod s^5.
        let f = MultiSeries::from_univariate_coeffs(4, &[q(0, 1), q(1, 1), q(1, 1)]);
        let inv = f.compositional_inverse().unwrap();
        let expected = MultiSeries::from_univariate_coeffs(
            4,
            &[q(0, 1), q(1, 1), q(-1, 1), q(2, 1), q(-5, 1)],
        );
        assert_eq!(inv, expected);

        // f = s + s^3: inverse is s - s^3 + 3 s^5 mod s^6.
        let f = MultiSeries::from_univariate_coeffs(
            5,
            &[q(0, 1), q(1, 1), q(0, 1), q(1, 1)],
        );
        let inv = f.compositional_inverse().unwrap();
        let expected = MultiSeries::from_univariate_coeffs(
            5,
            &[q(0, 1), q(1, 1), q(0, 1), q(-1, 1), q(0, 1), q(3, 1)],
        );
        assert_eq!(inv, expected);

        // Identity is its own inverse; round trips hold either way.
        let id = s(1, 6, 0);
        assert_eq!(id.compositional_inverse().unwrap(), id);
        let f = MultiSeries::from_univariate_coeffs(
            6,
            &[q(0, 1), q(2, 1), q(-1, 3), q(0, 1), q(7, 2)],
        );
        let g = f.compositional_inverse().unwrap();
        assert_eq!(g.compose_univariate(&f).unwrap(), id);
        assert_eq!(f.compose_univariate(&g).unwrap(), id);

        assert_eq!(
            MultiSeries::from_univariate_coeffs(4, &[q(0, 1), q(0, 1), q(1, 1)])
                .compositional_inverse(),
            Err(SeriesError::LinearTermNotUnit)
        );
    }

    #[test]
    fn eval_embed_restrict() {
        // f = 1/2 + s1^2 * s2 at (2, 3) evaluates to 1/2 + 12 = 25/2.
        let f = MultiSeries::constant(2, 4, q(1, 2))
            .add(&MultiSeries::monomial(2, 4, &[2, 1], q(1, 1)).unwrap());
        assert_eq!(f.eval(&[q(2, 1), q(3, 1)]), q(25, 2));

        let h = MultiSeries::from_univariate_coeffs(4, &[q(0, 1), q(0, 1), q(1, 1)]);
        let embedded = h.embed_into(3, &[0]).unwrap();
        assert_eq!(
            embedded,
            MultiSeries::monomial(3, 4, &[2, 0, 0], q(1, 1)).unwrap()
        );
        assert_eq!(embedded.restrict_to_var(0).unwrap(), h);
        assert_eq!(
            embedded.restrict_to_var(1),
            Err(SeriesError::MixedVariables { var: 1 })
        );
    }

    #[test]
    fn display_and_parse_round_trip() {
        let f = MultiSeries::constant(2, 5, q(-1, 2))
            .add(&MultiSeries::monomial(2, 5, &[2, 1], q(3, 4)).unwrap())
            .add(&s(2, 5, 1));
        let text = f.to_string();
        assert_eq!(text, "-1/2 + 1 * s2 + 3/4 * s1^2 * s2");
        assert_eq!(MultiSeries::parse(&text, 2, 5).unwrap(), f);

        assert_eq!(MultiSeries::parse("0", 2, 5).unwrap(), MultiSeries::zero(2, 5));
        // Bare monomials and ^1 exponents are accepted.
        assert_eq!(
            MultiSeries::parse("s1^1 * s2", 2, 5).unwrap(),
            MultiSeries::monomial(2, 5, &[1, 1], q(1, 1)).unwrap()
        );
        assert!(MultiSeries::<Rational>::parse("s3", 2, 5).is_err());
        assert!(MultiSeries::<Rational>::parse("", 2, 5).is_err());
        assert!(MultiSeries::<Rational>::parse("1 +", 2, 5).is_err());
    }

    #[test]
    fn truncated_lowers_bound_and_drops_terms() {
        let f = MultiSeries::from_univariate_coeffs(
            5,
            &[q(1, 1), q(1, 1), q(1, 1), q(1, 1), q(1, 1), q(1, 1)],
        );
        let t = f.truncated(2);
        assert_eq!(t.bound(), 2);
        assert_eq!(
            t,
            MultiSeries::from_univariate_coeffs(2, &[q(1, 1), q(1, 1), q(1, 1)])
        );
        // Raising the bound is capped at the existing one.
        assert_eq!(t.truncated(9).bound(), 2);
    }
}
