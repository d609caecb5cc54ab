//! The three-parameter group acting on deformation functions.
//!
//! Only three entries of a frame reach the classifying series of the
//! bottom canonical solution: `alpha`, `beta`, `gamma`. They act on
//! the deformation function itself. With `u = 1/(1 + alpha s + beta
//! h)` the action substitutes the compositional inverse of `g_1 = u
//! (s + gamma h)` into `g_tilde = u h`; composing two frames composes
//! the parameters like unit lower-triangular matrices. [`act_on_h`]
//! evaluates the action directly from those closed forms,
//! [`act_via_canonical`] re-derives it through the full solver, and
//! the orbit functions follow the induced motion of truncated
//! coefficient vectors, numerically and symbolically.

use thiserror::Error;

use crate::canonical::{canonical_element, extract_invariants, CanonicalError};
use crate::lattice::{Lattice, LatticeError};
use crate::matrix::RatMat;
use crate::opposite::Frame;
use crate::poly::Poly;
use crate::rational::Rational;
use crate::ring::Ring;
use crate::series::{MultiSeries, SeriesError};
use crate::solve::PivotScan;

#[derive(Debug, Error)]
pub enum GammaError {
    #[error("deformation function must be univariate, got {0} variables")]
    NotUnivariate(usize),
    #[error("deformation function must vanish to second order")]
    OrderTooLow,
    #[error("series bound {have} cannot resolve coefficients through degree {need}")]
    InsufficientBound { have: u32, need: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Canonical(#[from] CanonicalError),
}

/// A group element. The entries may come from any coefficient ring,
/// so the same code runs numerically and symbolically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaParams<R: Ring> {
    pub alpha: R,
    pub beta: R,
    pub gamma: R,
}

impl<R: Ring> GammaParams<R> {
    pub fn new(alpha: R, beta: R, gamma: R) -> Self {
        GammaParams { alpha, beta, gamma }
    }

    pub fn identity() -> Self {
        GammaParams::new(R::zero(), R::zero(), R::zero())
    }

    pub fn is_identity(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero() && self.gamma.is_zero()
    }

    /// Group law: `self` first, `then` second. Matches the product of
    /// the associated matrices in that order.
    pub fn compose(&self, then: &Self) -> Self {
        GammaParams {
            alpha: self.alpha.add(&then.alpha),
            beta: self
                .beta
                .add(&then.beta)
                .add(&self.gamma.mul(&then.alpha)),
            gamma: self.gamma.add(&then.gamma),
        }
    }

    pub fn inverse(&self) -> Self {
        GammaParams {
            alpha: self.alpha.neg(),
            beta: self.gamma.mul(&self.alpha).sub(&self.beta),
            gamma: self.gamma.neg(),
        }
    }
}

impl GammaParams<Rational> {
    /// The unit lower-triangular matrix whose multiplication realizes
    /// [`GammaParams::compose`].
    pub fn to_matrix(&self) -> RatMat {
        let mut m = RatMat::identity(3);
        m[(1, 0)] = self.alpha.clone();
        m[(2, 0)] = self.beta.clone();
        m[(2, 1)] = self.gamma.clone();
        m
    }

    /// The three acting entries of a frame.
    pub fn from_frame(frame: &Frame) -> Self {
        GammaParams::new(frame.alpha(), frame.beta(), frame.gamma())
    }
}

fn check_h<R: Ring>(h: &MultiSeries<R>) -> Result<(), GammaError> {
    if h.nvars() != 1 {
        return Err(GammaError::NotUnivariate(h.nvars()));
    }
    if let Some(ord) = h.order() {
        if ord < 2 {
            return Err(GammaError::OrderTooLow);
        }
    }
    Ok(())
}

/// The action on a deformation function, from the closed forms: `h`
/// maps to `(u h)` composed with the compositional inverse of
/// `u (s + gamma h)`, where `u = 1/(1 + alpha s + beta h)`.
pub fn act_on_h<R: Ring>(
    params: &GammaParams<R>,
    h: &MultiSeries<R>,
) -> Result<MultiSeries<R>, GammaError> {
    check_h(h)?;
    let bound = h.bound();
    let s = MultiSeries::var(1, bound, 0)?;
    let one = MultiSeries::one(1, bound);
    let u = one
        .add(&s.scale(&params.alpha))
        .add(&h.scale(&params.beta))
        .unit_inverse()?;
    let g1 = s.add(&h.scale(&params.gamma)).mul(&u);
    let g_tilde = h.mul(&u);
    Ok(g_tilde.compose_univariate(&g1.compositional_inverse()?)?)
}

/// Re-derive the action through the solver: build the single-function
/// family on `h`, solve for the bottom canonical element relative to
/// the frame, extract the classifying series, and compose them. Must
/// agree with [`act_on_h`] for the frame's three entries.
pub fn act_via_canonical(
    h: &MultiSeries<Rational>,
    frame: &Frame,
    r: usize,
    weight_cap: u32,
) -> Result<MultiSeries<Rational>, GammaError> {
    let lattice = Lattice::special_deformation(r, h.bound(), weight_cap, h)?;
    let solution = canonical_element(
        &lattice,
        frame,
        &frame.tilde_vector(0),
        0,
        lattice.default_bound(),
        PivotScan::Forward,
    )?;
    let inv = extract_invariants(&lattice, frame, &solution)?;
    let g1 = inv.g[0].restrict_to_var(0)?;
    let g_tilde = inv.g_tilde.restrict_to_var(0)?;
    Ok(g_tilde.compose_univariate(&g1.compositional_inverse()?)?)
}

/// Display names for the symbolic orbit ring: the three parameters,
/// then the generic coefficients `c2 .. ck`.
pub fn orbit_variable_names(k: usize) -> Vec<String> {
    let mut names = vec!["alpha".to_owned(), "beta".to_owned(), "gamma".to_owned()];
    for i in 2..=k {
        names.push(format!("c{i}"));
    }
    names
}

/// Coefficients `2 .. k` of the action on the generic function
/// `c_2 s^2 + ... + c_k s^k`, as polynomials in the variables named by
/// [`orbit_variable_names`]. Coefficient `i` only involves the
/// parameters and `c_2 .. c_i`, so the truncation window is honest.
pub fn symbolic_orbit(k: usize) -> Result<Vec<Poly>, GammaError> {
    assert!(k >= 2, "generic function starts at degree 2");
    let bound = k as u32;
    let mut coeffs = vec![Poly::zero(), Poly::zero()];
    for i in 2..=k {
        coeffs.push(Poly::var(3 + (i - 2)));
    }
    let h = MultiSeries::from_univariate_coeffs(bound, &coeffs);
    let params = GammaParams::new(Poly::var(0), Poly::var(1), Poly::var(2));
    let acted = act_on_h(&params, &h)?;
    Ok((2..=k).map(|i| acted.coeff(&[i as u32])).collect())
}

/// A point of the truncated orbit space: the coefficients
/// `c_2 .. c_{k+1}` of a function class taken modulo degree `k + 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPoint {
    pub coeffs: Vec<Rational>,
}

impl OrbitPoint {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Read off the orbit coordinates `c_2 .. c_{k+1}` of a function. The
/// series bound must cover degree `k + 1`.
pub fn project_orbit(h: &MultiSeries<Rational>, k: usize) -> Result<OrbitPoint, GammaError> {
    check_h(h)?;
    let need = (k + 1) as u32;
    if h.bound() < need {
        return Err(GammaError::InsufficientBound {
            have: h.bound(),
            need,
        });
    }
    Ok(OrbitPoint {
        coeffs: (2..=(k + 1) as u32).map(|i| h.coeff_univar(i)).collect(),
    })
}

/// Push an orbit point through the action: lift to the truncated
/// function, act, project back. The action respects the truncation,
/// so the result does not depend on the lift.
pub fn act_on_orbit(
    params: &GammaParams<Rational>,
    point: &OrbitPoint,
) -> Result<OrbitPoint, GammaError> {
    let k = point.coeffs.len();
    assert!(k >= 1, "empty orbit point");
    let bound = (k + 1) as u32;
    let mut coeffs = vec![Rational::zero(); 2];
    coeffs.extend(point.coeffs.iter().cloned());
    let h = MultiSeries::from_univariate_coeffs(bound, &coeffs);
    let acted = act_on_h(params, &h)?;
    project_orbit(&acted, k)
}

/// Derivatives of the acted coefficients in the three parameter
/// directions at the identity, evaluated at the coefficients of `h`:
/// one row per requested degree, columns for `alpha`, `beta`, `gamma`.
pub fn orbit_jacobian(h: &MultiSeries<Rational>, levels: &[usize]) -> Result<RatMat, GammaError> {
    check_h(h)?;
    assert!(!levels.is_empty(), "no degrees requested");
    assert!(levels.iter().all(|&l| l >= 2), "degrees start at 2");
    let k = *levels.iter().max().unwrap();
    if (h.bound() as usize) < k {
        return Err(GammaError::InsufficientBound {
            have: h.bound(),
            need: k as u32,
        });
    }
    let orbit = symbolic_orbit(k)?;
    let mut point = vec![Rational::zero(); 3];
    for i in 2..=k {
        point.push(h.coeff_univar(i as u32));
    }
    let mut m = RatMat::zeros(levels.len(), 3);
    for (row, &level) in levels.iter().enumerate() {
        let p = &orbit[level - 2];
        for col in 0..3 {
            m[(row, col)] = p.derivative(col).eval(&point);
        }
    }
    Ok(m)
}
