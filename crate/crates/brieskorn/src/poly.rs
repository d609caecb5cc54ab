//! Sparse multivariate polynomials over the rationals.
//!
//! These serve as the symbolic coefficient ring for orbit computations:
//! series whose coefficients are polynomials in named indeterminates.
//! Exponent keys are stored with trailing zeros trimmed, so a `Poly`
//! does not carry a variable count of its own — the zero polynomial and
//! constants are the same object in every ambient ring, which is what
//! lets `Poly` satisfy the context-free [`Ring`] contract. Display
//! names are supplied externally (see [`Poly::display_with`]); the
//! plain `Display` impl falls back to `x0, x1, ...`.

use std::collections::BTreeMap;
use std::fmt;

use crate::rational::Rational;
use crate::ring::Ring;

/// A polynomial with rational coefficients in finitely many variables
/// `x0, x1, ...`. Invariants: no stored zero coefficients, and no
/// exponent key ends in zero (so keys are canonical and structural
/// equality is semantic equality).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Vec<u32>, Rational>,
}

fn canonical_key(mut key: Vec<u32>) -> Vec<u32> {
    while key.last() == Some(&0) {
        key.pop();
    }
    key
}

fn add_keys(a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0));
    }
    out
}

impl Poly {
    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly { terms }
    }

    /// The variable `x{index}`.
    pub fn var(index: usize) -> Self {
        let mut key = vec![0; index + 1];
        key[index] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(key, Rational::one());
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, Rational)>>(iter: I) -> Self {
        let mut out = Poly::default();
        for (key, coeff) in iter {
            out.add_term(canonical_key(key), coeff);
        }
        out
    }

    fn add_term(&mut self, key: Vec<u32>, coeff: Rational) {
        if coeff.is_zero() {
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

    /// Number of variables actually touched (one past the largest index).
    pub fn nvars(&self) -> usize {
        self.terms.keys().map(|k| k.len()).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.iter().sum()).max()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.is_empty())
    }

    pub fn constant_part(&self) -> Rational {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, key: &[u32]) -> Rational {
        let key = canonical_key(key.to_vec());
        self.terms.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    /// Partial derivative with respect to `x{var}`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Poly::default();
        for (key, coeff) in &self.terms {
            let exp = key.get(var).copied().unwrap_or(0);
            if exp == 0 {
                continue;
            }
            let mut new_key = key.clone();
            new_key[var] = exp - 1;
            let scaled = coeff.mul(&Rational::from_int(exp as i64));
            out.add_term(canonical_key(new_key), scaled);
        }
        out
    }

    /// Evaluate at a rational point. The point must supply a value for
    /// every variable the polynomial touches.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert!(
            point.len() >= self.nvars(),
            "evaluation point has {} coordinates, polynomial uses {}",
            point.len(),
            self.nvars()
        );
        let mut acc = Rational::zero();
        for (key, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (i, &exp) in key.iter().enumerate() {
                if exp > 0 {
                    term = term.mul(&point[i].pow(exp));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Render with the given variable names (lexicographic monomial
    /// order, the same order the term map iterates in).
    pub fn display_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_owned();
        }
        let mut pieces = Vec::with_capacity(self.terms.len());
        for (key, coeff) in &self.terms {
            let mut piece = coeff.to_string();
            for (i, &exp) in key.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                let name = names
                    .get(i)
                    .copied()
                    .unwrap_or_else(|| panic!("no display name for variable {i}"));
                piece.push('*');
                piece.push_str(name);
                if exp > 1 {
                    piece.push('^');
                    piece.push_str(&exp.to_string());
                }
            }
            pieces.push(piece);
        }
        pieces.join(" + ")
    }
}

impl Ring for Poly {
    fn zero() -> Self {
        Poly::default()
    }

    fn one() -> Self {
        Poly::constant(Rational::one())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (key, coeff) in &rhs.terms {
            out.add_term(key.clone(), coeff.clone());
        }
        out
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn neg(&self) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        let mut out = Poly::default();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.add_term(add_keys(ka, kb), ca.mul(cb));
            }
        }
        out
    }

    /// Units of a polynomial ring over a field are the nonzero
    /// constants.
    fn invert(&self) -> Option<Self> {
        if self.is_constant() {
            self.constant_part().invert().map(Poly::constant)
        } else {
            None
        }
    }

    fn from_rational(q: &Rational) -> Self {
        Poly::constant(q.clone())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nvars = self.nvars();
        let names: Vec<String> = (0..nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write!(f, "{}", self.display_with(&refs))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
