//! Frames for opposite filtrations.
//!
//! A [`Frame`] is a unit lower-triangular change of basis `e_i = sum_j
//! A[i][j] etilde_j`. The flag spanned by the tail segments of the
//! `etilde_j` descends through the weight grading: at weight `w`, level
//! `p` is spanned by the `etilde_j` with `j >= p + w`. A frame is
//! opposite to a filtration flag when every level pairs with the
//! complementary tail to give the full space; [`is_opposite`] certifies
//! this by rank over the rationals at the parameter origin, and
//! [`split`] decomposes a coordinate vector into its filtration part
//! and tail part with exact series coefficients.

use thiserror::Error;

use crate::gmsystem::HVector;
use crate::matrix::RatMat;
use crate::rational::Rational;
use crate::ring::Ring;
use crate::series::MultiSeries;
use crate::solve::{solve_series_system, PivotScan, SolveError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OppositeError {
    #[error("frame matrix must be square and unit lower-triangular")]
    NotUnitLowerTriangular,
    #[error("filtration and tail do not span the full space at level {level}")]
    NotOpposite { level: usize },
    #[error("split bases are degenerate or do not span the target")]
    DegenerateSplit,
}

/// Unit lower-triangular frame together with its cached inverse and
/// transpose.
#[derive(Clone, Debug)]
pub struct Frame {
    matrix: RatMat,
    inverse: RatMat,
    transpose: RatMat,
}

impl Frame {
    pub fn from_matrix(matrix: RatMat) -> Result<Frame, OppositeError> {
        if !matrix.is_unit_lower_triangular() {
            return Err(OppositeError::NotUnitLowerTriangular);
        }
        let inverse = matrix
            .inverse()
            .expect("unit triangular matrices are invertible");
        let transpose = matrix.transpose();
        Ok(Frame {
            matrix,
            inverse,
            transpose,
        })
    }

    pub fn identity(rank: usize) -> Frame {
        Frame::from_matrix(RatMat::identity(rank)).expect("identity is unit lower-triangular")
    }

    /// Frame whose only off-diagonal entries are the three that touch
    /// the first three basis vectors.
    pub fn from_params(
        rank: usize,
        alpha: &Rational,
        beta: &Rational,
        gamma: &Rational,
    ) -> Result<Frame, OppositeError> {
        assert!(rank >= 3, "parameter frame needs rank at least 3");
        let mut m = RatMat::identity(rank);
        m[(1, 0)] = alpha.clone();
        m[(2, 0)] = beta.clone();
        m[(2, 1)] = gamma.clone();
        Frame::from_matrix(m)
    }

    pub fn rank(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &RatMat {
        &self.matrix
    }

    pub fn inverse(&self) -> &RatMat {
        &self.inverse
    }

    pub fn alpha(&self) -> Rational {
        self.matrix[(1, 0)].clone()
    }

    pub fn beta(&self) -> Rational {
        self.matrix[(2, 0)].clone()
    }

    pub fn gamma(&self) -> Rational {
        self.matrix[(2, 1)].clone()
    }

    /// Coordinates of `etilde_j` in the working basis.
    pub fn tilde_vector(&self, j: usize) -> Vec<Rational> {
        self.inverse.row(j).to_vec()
    }

    /// Rewrite a coordinate vector in the frame basis.
    pub fn to_tilde_coords<R: Ring>(&self, v: &HVector<R>) -> HVector<R> {
        v.apply(&self.transpose)
    }

    /// Rewrite a constant coordinate vector in the frame basis.
    pub fn to_tilde_point(&self, v: &[Rational]) -> Vec<Rational> {
        self.transpose.mul_vec(v)
    }

    /// Basis of level `p` of the tail flag at weight `w`: the
    /// `etilde_j` with `j >= p + w`, as working-basis vectors.
    pub fn u_subspace(&self, weight: u32, level: i64) -> Vec<Vec<Rational>> {
        let rank = self.rank() as i64;
        let start = (level + weight as i64).max(0);
        if start >= rank {
            return Vec::new();
        }
        (start as usize..rank as usize)
            .map(|j| self.tilde_vector(j))
            .collect()
    }
}

/// Certify that the filtration flag and the frame's tail flag are
/// complementary at every level: the concatenation of the level-`p`
/// flag vectors with the `etilde_j`, `j > p`, must have full rank.
pub fn is_opposite(frame: &Frame, flag: &[Vec<Vec<Rational>>]) -> Result<(), OppositeError> {
    let rank = frame.rank();
    assert_eq!(flag.len(), rank, "flag must carry one level per degree");
    for (p, level_vectors) in flag.iter().enumerate() {
        let mut rows: Vec<Vec<Rational>> = level_vectors.clone();
        for j in (p + 1)..rank {
            rows.push(frame.tilde_vector(j));
        }
        if rows.len() != rank || RatMat::from_rows(rows).rank() != rank {
            return Err(OppositeError::NotOpposite { level: p });
        }
    }
    Ok(())
}

/// Exact decomposition of a vector into a filtration part and a tail
/// part.
#[derive(Debug)]
pub struct Split<R: Ring> {
    /// Combination of the `f_basis` vectors.
    pub f_part: HVector<R>,
    /// Combination of the `u_basis` vectors.
    pub u_part: HVector<R>,
    /// Series coefficient of each `f_basis` vector.
    pub f_coeffs: Vec<MultiSeries<R>>,
    /// Series coefficient of each `u_basis` vector.
    pub u_coeffs: Vec<MultiSeries<R>>,
}

/// Write `x = f + u` with `f` in the series span of `f_basis` and `u`
/// in the series span of the constant vectors `u_basis`. The
/// decomposition exists and is unique exactly when the bases are
/// complementary; any shortfall surfaces as [`OppositeError`].
pub fn split<R: Ring>(
    x: &HVector<R>,
    f_basis: &[HVector<R>],
    u_basis: &[Vec<Rational>],
    scan: PivotScan,
) -> Result<Split<R>, OppositeError> {
    assert!(!x.is_empty(), "empty coordinate vector");
    let nvars = x.entry(0).nvars();
    let bound = x.entry(0).bound();
    let dim = x.len();

    let mut columns: Vec<Vec<MultiSeries<R>>> = Vec::new();
    for f in f_basis {
        assert_eq!(f.len(), dim, "filtration vector arity mismatch");
        columns.push(f.entries().to_vec());
    }
    for u in u_basis {
        assert_eq!(u.len(), dim, "tail vector arity mismatch");
        columns.push(
            u.iter()
                .map(|c| MultiSeries::constant(nvars, bound, R::from_rational(c)))
                .collect(),
        );
    }
    if columns.is_empty() {
        return Err(OppositeError::DegenerateSplit);
    }
    let outcome = solve_series_system(&columns, x.entries(), scan).map_err(|e| match e {
        SolveError::DependentColumns | SolveError::NonInvertiblePivot => {
            OppositeError::DegenerateSplit
        }
    })?;
    if !outcome.residual.iter().all(|c| c.is_zero()) {
        return Err(OppositeError::DegenerateSplit);
    }

    let (f_coeffs, u_coeffs) = outcome.solution.split_at(f_basis.len());
    let mut f_part = HVector::from_entries(vec![MultiSeries::zero(nvars, bound); dim]);
    for (coeff, basis) in f_coeffs.iter().zip(f_basis) {
        f_part = f_part.add(&basis.scale_series(coeff));
    }
    let mut u_part = HVector::from_entries(vec![MultiSeries::zero(nvars, bound); dim]);
    for (coeff, basis) in u_coeffs.iter().zip(u_basis) {
        let constant = HVector::from_entries(
            basis
                .iter()
                .map(|c| MultiSeries::constant(nvars, bound, R::from_rational(c)))
                .collect(),
        );
        u_part = u_part.add(&constant.scale_series(coeff));
    }
    Ok(Split {
        f_part,
        u_part,
        f_coeffs: f_coeffs.to_vec(),
        u_coeffs: u_coeffs.to_vec(),
    })
}
