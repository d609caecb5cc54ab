//! Weight-graded differential model with exact precision tracking.
//!
//! The ambient module is free over truncated series on a basis
//! `e0, ..., e{rank-1}`, extended by formal symbols `D^-w` (the w-th
//! inverse of the derivation along the internal parameter, called the
//! weight). An element is a finite sum `sum_w D^-w * (series vector)`,
//! stored per weight. The model keeps weights only up to a cap, and
//! every element carries `valid_through`: the largest weight whose
//! component is still trustworthy after the operations that produced
//! it. Reading past that mark is an error, never a silent zero.
//!
//! The action of the internal parameter t interacts with a fixed
//! nilpotent matrix n on the basis:
//!
//! ```text
//! t * D^-w v = D^-(w+1) ((w + 1) v + n v)
//! ```
//!
//! so t raises the weight, the inverse derivation `D^-1` shifts the
//! weight up by one, and the derivation `D` shifts it down (defined
//! only when the weight-zero component vanishes). Derivations in the
//! deformation variables act coefficientwise. The exponential twists
//! `exp(s_i D^-(i-1) n^i)` are finite sums because n is nilpotent.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::matrix::RatMat;
use crate::rational::Rational;
use crate::ring::Ring;
use crate::series::MultiSeries;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GMError {
    #[error("weight {requested} is beyond the trusted range (valid through {valid})")]
    PrecisionExceeded { requested: u32, valid: u32 },
    #[error("weight {weight} is beyond the model cap {cap}")]
    WeightBeyondCap { weight: u32, cap: u32 },
    #[error("derivation is undefined: nonzero weight-zero component")]
    UnliftableDerivative,
    #[error("matrix size {got} does not match basis count {expected}")]
    MatrixSizeMismatch { got: usize, expected: usize },
    #[error("structure matrix is not nilpotent")]
    NotNilpotent,
}

/// The static dimensions of a model: basis size, deformation
/// variables, series degree bound, and weight cap.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Shape {
    pub rank: usize,
    pub nvars: usize,
    pub degree_bound: u32,
    pub weight_cap: u32,
}

/// A vector of series coordinates over the basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HVector<R: Ring> {
    entries: Vec<MultiSeries<R>>,
}

impl<R: Ring> HVector<R> {
    pub fn zero(shape: Shape) -> Self {
        HVector {
            entries: vec![MultiSeries::zero(shape.nvars, shape.degree_bound); shape.rank],
        }
    }

    pub fn from_entries(entries: Vec<MultiSeries<R>>) -> Self {
        assert!(!entries.is_empty(), "empty coordinate vector");
        HVector { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, i: usize) -> &MultiSeries<R> {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[MultiSeries<R>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.entries.len(), rhs.entries.len());
        HVector {
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        HVector {
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn scale_series(&self, f: &MultiSeries<R>) -> Self {
        HVector {
            entries: self.entries.iter().map(|e| e.mul(f)).collect(),
        }
    }

    pub fn scale_q(&self, q: &Rational) -> Self {
        HVector {
            entries: self.entries.iter().map(|e| e.scale_q(q)).collect(),
        }
    }

    /// Matrix action on coordinates: `(m v)_i = sum_j m[(i, j)] v_j`.
    pub fn apply(&self, m: &RatMat) -> Self {
        assert_eq!(m.ncols(), self.entries.len(), "matrix arity mismatch");
        let entries = (0..m.nrows())
            .map(|i| {
                let mut acc: Option<MultiSeries<R>> = None;
                for (j, e) in self.entries.iter().enumerate() {
                    let coeff = &m[(i, j)];
                    if coeff.is_zero() {
                        continue;
                    }
                    let term = e.scale_q(coeff);
                    acc = Some(match acc {
                        None => term,
                        Some(a) => a.add(&term),
                    });
                }
                acc.unwrap_or_else(|| {
                    MultiSeries::zero(self.entries[0].nvars(), self.entries[0].bound())
                })
            })
            .collect();
        HVector { entries }
    }
}

/// An element of the model: weight components plus the precision mark.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GMElement<R: Ring> {
    shape: Shape,
    valid_through: u32,
    components: BTreeMap<u32, HVector<R>>,
}

impl<R: Ring> GMElement<R> {
    fn new(shape: Shape, valid_through: u32) -> Self {
        GMElement {
            shape,
            valid_through: valid_through.min(shape.weight_cap),
            components: BTreeMap::new(),
        }
    }

    fn insert(&mut self, weight: u32, vector: HVector<R>) {
        debug_assert!(weight <= self.valid_through);
        if !vector.is_zero() {
            self.components.insert(weight, vector);
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn valid_through(&self) -> u32 {
        self.valid_through
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn weights(&self) -> impl Iterator<Item = u32> + '_ {
        self.components.keys().copied()
    }

    pub fn max_weight(&self) -> Option<u32> {
        self.components.keys().next_back().copied()
    }

    /// The coordinate vector at a weight, provided the weight is still
    /// inside the trusted range.
    pub fn component(&self, weight: u32) -> Result<HVector<R>, GMError> {
        if weight > self.valid_through {
            return Err(GMError::PrecisionExceeded {
                requested: weight,
                valid: self.valid_through,
            });
        }
        Ok(self
            .components
            .get(&weight)
            .cloned()
            .unwrap_or_else(|| HVector::zero(self.shape)))
    }

    /// Flatten the components of weights `0..=max_weight` into one list
    /// of coordinate series, weight-major.
    pub fn coordinates_through(&self, max_weight: u32) -> Result<Vec<MultiSeries<R>>, GMError> {
        let mut out = Vec::with_capacity((max_weight as usize + 1) * self.shape.rank);
        for w in 0..=max_weight {
            let vector = self.component(w)?;
            out.extend(vector.entries.iter().cloned());
        }
        Ok(out)
    }

    /// Whether two elements agree on every weight up to `through`.
    pub fn agrees_with(&self, other: &Self, through: u32) -> Result<bool, GMError> {
        assert_eq!(self.shape, other.shape, "model shape mismatch");
        Ok(self.coordinates_through(through)? == other.coordinates_through(through)?)
    }

    fn assert_same_shape(&self, rhs: &Self) {
        assert_eq!(self.shape, rhs.shape, "model shape mismatch");
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.assert_same_shape(rhs);
        let valid = self.valid_through.min(rhs.valid_through);
        let mut out = GMElement::new(self.shape, valid);
        for w in 0..=valid {
            let mut vector = match self.components.get(&w) {
                Some(v) => v.clone(),
                None => HVector::zero(self.shape),
            };
            if let Some(v) = rhs.components.get(&w) {
                vector = vector.add(v);
            }
            out.insert(w, vector);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        GMElement {
            shape: self.shape,
            valid_through: self.valid_through,
            components: self
                .components
                .iter()
                .map(|(&w, v)| (w, v.neg()))
                .collect(),
        }
    }

    pub fn scale_q(&self, q: &Rational) -> Self {
        let mut out = GMElement::new(self.shape, self.valid_through);
        for (&w, v) in &self.components {
            out.insert(w, v.scale_q(q));
        }
        out
    }

    /// Multiply every coordinate by a series in the deformation
    /// variables.
    pub fn mul_series(&self, f: &MultiSeries<R>) -> Self {
        assert_eq!(
            (f.nvars(), f.bound()),
            (self.shape.nvars, self.shape.degree_bound),
            "series shape mismatch"
        );
        let mut out = GMElement::new(self.shape, self.valid_through);
        for (&w, v) in &self.components {
            out.insert(w, v.scale_series(f));
        }
        out
    }

    /// Apply a basis matrix to every weight component.
    pub fn apply_matrix(&self, m: &RatMat) -> Self {
        let mut out = GMElement::new(self.shape, self.valid_through);
        for (&w, v) in &self.components {
            out.insert(w, v.apply(m));
        }
        out
    }

    /// Shift every weight up by `delta` (the action of `D^-delta`).
    /// Components pushed past the cap are dropped; the precision mark
    /// moves up accordingly, capped.
    pub fn shift_weight(&self, delta: u32) -> Self {
        let cap = self.shape.weight_cap;
        let valid = (self.valid_through.saturating_add(delta)).min(cap);
        let mut out = GMElement::new(self.shape, valid);
        for (&w, v) in &self.components {
            let new_w = w + delta;
            if new_w <= cap {
                out.insert(new_w, v.clone());
            }
        }
        out
    }

    /// Lower the precision mark and discard components beyond it.
    pub fn restrict_valid(&self, valid: u32) -> Self {
        let valid = valid.min(self.valid_through);
        GMElement {
            shape: self.shape,
            valid_through: valid,
            components: self
                .components
                .iter()
                .filter(|(&w, _)| w <= valid)
                .map(|(&w, v)| (w, v.clone()))
                .collect(),
        }
    }

    /// Truncate every coordinate series to a lower degree bound. The
    /// weight precision mark is unchanged; use this to honor the
    /// degree contract of variable derivations when the inputs were
    /// genuinely truncated.
    pub fn truncate_degree(&self, new_bound: u32) -> Self {
        let bound = self.shape.degree_bound.min(new_bound);
        let shape = Shape {
            degree_bound: bound,
            ..self.shape
        };
        let mut out = GMElement::new(shape, self.valid_through);
        for (&w, v) in &self.components {
            out.insert(
                w,
                HVector::from_entries(v.entries.iter().map(|e| e.truncated(bound)).collect()),
            );
        }
        out
    }
}

impl<R: Ring> fmt::Display for GMElement<R>
where
    MultiSeries<R>: fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, v) in &self.components {
            if !first {
                writeln!(f)?;
            }
            first = false;
            let entries: Vec<String> = v.entries.iter().map(|e| e.to_string()).collect();
            write!(f, "D^-{w}: [{}]", entries.join(", "))?;
        }
        Ok(())
    }
}

/// The fixed model: shape plus the nilpotent structure matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GMSystem {
    shape: Shape,
    nilpotent: RatMat,
}

impl GMSystem {
    pub fn new(shape: Shape, nilpotent: RatMat) -> Result<Self, GMError> {
        if nilpotent.nrows() != shape.rank || nilpotent.ncols() != shape.rank {
            return Err(GMError::MatrixSizeMismatch {
                got: nilpotent.nrows(),
                expected: shape.rank,
            });
        }
        if !nilpotent.pow(shape.rank as u32).is_zero() {
            return Err(GMError::NotNilpotent);
        }
        Ok(GMSystem { shape, nilpotent })
    }

    /// Model with the zero structure matrix.
    pub fn with_zero_structure(shape: Shape) -> Self {
        GMSystem {
            nilpotent: RatMat::zeros(shape.rank, shape.rank),
            shape,
        }
    }

    /// Model whose structure matrix is the basis shift `e_j -> e_{j+1}`.
    pub fn with_shift_structure(shape: Shape) -> Self {
        GMSystem {
            nilpotent: RatMat::shift(shape.rank),
            shape,
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn nilpotent(&self) -> &RatMat {
        &self.nilpotent
    }

    pub fn zero_element<R: Ring>(&self) -> GMElement<R> {
        GMElement::new(self.shape, self.shape.weight_cap)
    }

    /// Basis element `e_i` at weight zero. Exact, so trusted through
    /// the cap.
    pub fn basis<R: Ring>(&self, i: usize) -> GMElement<R> {
        assert!(i < self.shape.rank, "basis index out of range");
        let mut entries =
            vec![MultiSeries::zero(self.shape.nvars, self.shape.degree_bound); self.shape.rank];
        entries[i] = MultiSeries::one(self.shape.nvars, self.shape.degree_bound);
        let mut out = GMElement::new(self.shape, self.shape.weight_cap);
        out.insert(0, HVector::from_entries(entries));
        out
    }

    /// Assemble an element from explicit weight components, trusted
    /// through the cap.
    pub fn element_from_components<R: Ring>(
        &self,
        parts: &[(u32, HVector<R>)],
    ) -> Result<GMElement<R>, GMError> {
        let mut out = GMElement::new(self.shape, self.shape.weight_cap);
        for (w, v) in parts {
            if *w > self.shape.weight_cap {
                return Err(GMError::WeightBeyondCap {
                    weight: *w,
                    cap: self.shape.weight_cap,
                });
            }
            assert_eq!(v.len(), self.shape.rank, "component arity mismatch");
            let merged = match out.components.get(w) {
                Some(existing) => existing.add(v),
                None => v.clone(),
            };
            out.components.remove(w);
            out.insert(*w, merged);
        }
        Ok(out)
    }

    /// Multiplication by the internal parameter:
    /// `t * D^-w v = D^-(w+1) ((w + 1) v + n v)`.
    pub fn t_action<R: Ring>(&self, elem: &GMElement<R>) -> GMElement<R> {
        assert_eq!(elem.shape, self.shape, "element from a different model");
        let cap = self.shape.weight_cap;
        let valid = (elem.valid_through.saturating_add(1)).min(cap);
        let mut out = GMElement::new(self.shape, valid);
        for (&w, v) in &elem.components {
            if w + 1 > cap {
                continue;
            }
            let scaled = v.scale_q(&Rational::from_int(w as i64 + 1));
            out.insert(w + 1, scaled.add(&v.apply(&self.nilpotent)));
        }
        out
    }

    /// The inverse derivation `D^-1`: weight shift by one.
    pub fn inv_derivation<R: Ring>(&self, elem: &GMElement<R>) -> GMElement<R> {
        assert_eq!(elem.shape, self.shape, "element from a different model");
        elem.shift_weight(1)
    }

    /// The derivation `D`: weight shift down by one. Defined only when
    /// the weight-zero component vanishes.
    pub fn derivation<R: Ring>(&self, elem: &GMElement<R>) -> Result<GMElement<R>, GMError> {
        assert_eq!(elem.shape, self.shape, "element from a different model");
        if !elem.component(0)?.is_zero() {
            return Err(GMError::UnliftableDerivative);
        }
        let valid = elem.valid_through.saturating_sub(1);
        let mut out = GMElement::new(self.shape, valid);
        for (&w, v) in &elem.components {
            if w >= 1 && w - 1 <= valid {
                out.insert(w - 1, v.clone());
            }
        }
        Ok(out)
    }

    /// Derivation along deformation variable `var`, coefficientwise.
    pub fn var_derivation<R: Ring>(&self, elem: &GMElement<R>, var: usize) -> GMElement<R> {
        assert_eq!(elem.shape, self.shape, "element from a different model");
        assert!(var < self.shape.nvars, "variable index out of range");
        let mut out = GMElement::new(self.shape, elem.valid_through);
        for (&w, v) in &elem.components {
            let entries = v
                .entries
                .iter()
                .map(|e| e.partial_derivative(var).expect("var checked in range"))
                .collect();
            out.insert(w, HVector::from_entries(entries));
        }
        out
    }

    /// The product of the exponential twists
    /// `exp(s_i D^-(i-1) n^i)` for `i = 1, ..., nvars`, applied to an
    /// element. Each factor is a finite sum because the structure
    /// matrix is nilpotent.
    pub fn nilpotent_twist<R: Ring>(&self, elem: &GMElement<R>) -> GMElement<R> {
        let mut current = elem.clone();
        for i in 1..=self.shape.nvars {
            current = self.twist_factor(i, &current);
        }
        current
    }

    fn twist_factor<R: Ring>(&self, i: usize, elem: &GMElement<R>) -> GMElement<R> {
        let n_pow = self.nilpotent.pow(i as u32);
        if n_pow.is_zero() {
            return elem.clone();
        }
        let s_i = MultiSeries::<R>::var(self.shape.nvars, self.shape.degree_bound, i - 1)
            .expect("variable in range");
        let mut acc = elem.clone();
        let mut term = elem.clone();
        let mut k: i64 = 1;
        loop {
            term = term
                .apply_matrix(&n_pow)
                .shift_weight(i as u32 - 1)
                .mul_series(&s_i)
                .scale_q(&Rational::new(1, k));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
            k += 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn shape() -> Shape {
        Shape {
            rank: 3,
            nvars: 2,
            degree_bound: 4,
            weight_cap: 6,
        }
    }

    #[test]
    fn t_action_mixes_weight_scaling_and_structure() {
        let system = GMSystem::with_shift_structure(shape());
        let e0 = system.basis::<Rational>(0);
        // t * e0 = D^-1 (e0 + e1).
        let te0 = system.t_action(&e0);
        let expected = system
            .element_from_components(&[(
                1,
                HVector::from_entries(vec![
                    MultiSeries::one(2, 4),
                    MultiSeries::one(2, 4),
                    MultiSeries::zero(2, 4),
                ]),
            )])
            .unwrap();
        assert!(te0.agrees_with(&expected, 6).unwrap());

        // [t, D^-1] x = D^-2 x, tested on e1.
        let x = system.basis::<Rational>(1);
        let lhs = system
            .t_action(&system.inv_derivation(&x))
            .sub(&system.inv_derivation(&system.t_action(&x)));
        let rhs = x.shift_weight(2);
        assert!(lhs.agrees_with(&rhs, 6).unwrap());
    }

    #[test]
    fn derivation_inverts_the_weight_shift() {
        let system = GMSystem::with_zero_structure(shape());
        let e2 = system.basis::<Rational>(2);
        let shifted = system.inv_derivation(&e2);
        let back = system.derivation(&shifted).unwrap();
        assert!(back.agrees_with(&e2, 5).unwrap());

        assert_eq!(
            system.derivation(&e2).unwrap_err(),
            GMError::UnliftableDerivative
        );
    }

    #[test]
    fn precision_marks_move_with_the_operators() {
        let system = GMSystem::with_zero_structure(shape());
        let e0 = system.basis::<Rational>(0);
        assert_eq!(e0.valid_through(), 6);

        // Push to the cap: validity saturates at the cap.
        let mut elem = e0.clone();
        for _ in 0..7 {
            elem = system.inv_derivation(&elem);
        }
        assert_eq!(elem.valid_through(), 6);
        assert!(elem.is_zero(), "weight 7 was dropped at the cap");

        // One shift below the cap keeps the component.
        let mut elem = e0.clone();
        for _ in 0..6 {
            elem = system.inv_derivation(&elem);
        }
        assert!(!elem.is_zero());

        // Applying the derivation after saturating costs one weight of
        // trust, and reading past the mark errors.
        let dropped = system.derivation(&elem).unwrap();
        assert_eq!(dropped.valid_through(), 5);
        assert_eq!(
            dropped.component(6).unwrap_err(),
            GMError::PrecisionExceeded {
                requested: 6,
                valid: 5
            }
        );
    }

    #[test]
    fn variable_derivation_acts_on_coefficients() {
        let system = GMSystem::with_zero_structure(shape());
        let s1_sq = MultiSeries::monomial(2, 4, &[2, 0], q(1)).unwrap();
        let elem = system.basis::<Rational>(1).mul_series(&s1_sq);
        let derived = system.var_derivation(&elem, 0);
        let expected = system
            .basis::<Rational>(1)
            .mul_series(&MultiSeries::monomial(2, 4, &[1, 0], q(2)).unwrap());
        assert_eq!(derived, expected);
    }

    #[test]
    fn nilpotent_twist_expands_the_exponential() {
        let system = GMSystem::with_shift_structure(shape());
        let e0 = system.basis::<Rational>(0);
        let twisted = system.nilpotent_twist(&e0);

        // exp(s1 n) e0 = e0 + s1 e1 + s1^2/2 e2, then
        // exp(s2 D^-1 n^2) adds s2 D^-1 e2.
        let s1 = MultiSeries::<Rational>::var(2, 4, 0).unwrap();
        let s2 = MultiSeries::<Rational>::var(2, 4, 1).unwrap();
        let expected = system
            .element_from_components(&[
                (
                    0,
                    HVector::from_entries(vec![
                        MultiSeries::one(2, 4),
                        s1.clone(),
                        s1.mul(&s1).scale_q(&Rational::new(1, 2)),
                    ]),
                ),
                (
                    1,
                    HVector::from_entries(vec![
                        MultiSeries::zero(2, 4),
                        MultiSeries::zero(2, 4),
                        s2,
                    ]),
                ),
            ])
            .unwrap();
        assert!(twisted.agrees_with(&expected, 6).unwrap());

        // The zero structure matrix twists trivially.
        let flat = GMSystem::with_zero_structure(shape());
        let e1 = flat.basis::<Rational>(1);
        assert_eq!(flat.nilpotent_twist(&e1), e1);
    }

    #[test]
    fn construction_checks_the_structure_matrix() {
        let bad = RatMat::identity(3);
        assert_eq!(
            GMSystem::new(shape(), bad).unwrap_err(),
            GMError::NotNilpotent
        );
        let wrong_size = RatMat::zeros(2, 2);
        assert!(matches!(
            GMSystem::new(shape(), wrong_size).unwrap_err(),
            GMError::MatrixSizeMismatch { .. }
        ));
    }
}
