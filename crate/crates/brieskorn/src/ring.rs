//! Coefficient-ring contract shared by rational and polynomial scalars.

use std::fmt::{Debug, Display};

use crate::rational::Rational;

/// Exact commutative ring used as the coefficient domain of truncated
/// power series.
///
/// Implementations must be canonical: equal elements compare equal
/// structurally, `is_zero` agrees with equality against `zero()`, and
/// all operations are total apart from `invert`, which reports
/// non-units as `None`. Every implementor is a Q-algebra via
/// `from_rational`; this is what lets series code divide by factorials
/// and integer weights without caring which ring it runs over.
pub trait Ring: Clone + Eq + Debug + Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Multiplicative inverse when `self` is a unit, `None` otherwise.
    fn invert(&self) -> Option<Self>;
    /// Embedding of the rationals.
    fn from_rational(q: &Rational) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_int(n))
    }
}
