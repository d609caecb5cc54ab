//! Linear solving over truncated series.
//!
//! Systems `sum_j columns[j] * x_j = target` are solved for series
//! unknowns `x_j` by degree induction: the constant parts of the
//! columns fix a square invertible pivot submatrix, and each total
//! degree of the answer is then determined monomial by monomial from
//! the part of the residual that the lower degrees left behind. When
//! the target is not in the span, the loop still consumes everything
//! the pivots can reach and reports the leftover residual; membership
//! is exactly "residual is zero".
//!
//! The pivot rows are found by scanning rows in a caller-chosen order.
//! When the columns are independent the solution is unique, so any two
//! scan orders must agree — callers exercise that as a consistency
//! check.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ring::Ring;
use crate::series::MultiSeries;

#[derive(Debug, Error, PartialEq, Eq)]
pub(crate) enum SolveError {
    #[error("column constant terms admit no invertible pivot set")]
    DependentColumns,
    #[error("pivot entry is not invertible in the coefficient ring")]
    NonInvertiblePivot,
}

/// Row-scan order used when electing pivot rows. Independent columns
/// admit exactly one solution, so any two orders must agree; exposing
/// the choice lets callers verify that uniqueness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotScan {
    Forward,
    Reverse,
}

#[derive(Debug)]
pub(crate) struct SolveOutcome<R: Ring> {
    /// One coefficient series per column.
    pub solution: Vec<MultiSeries<R>>,
    /// `target - sum_j columns[j] * solution[j]`; zero exactly when the
    /// target lies in the span of the columns.
    pub residual: Vec<MultiSeries<R>>,
}

/// Invert a square matrix over the coefficient ring by elimination,
/// searching each column for an invertible pivot.
fn invert_square<R: Ring>(a: &[Vec<R>]) -> Result<Vec<Vec<R>>, SolveError> {
    let n = a.len();
    let mut work: Vec<Vec<R>> = a.to_vec();
    let mut inv: Vec<Vec<R>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { R::one() } else { R::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&row| work[row][col].invert().is_some())
            .ok_or(SolveError::NonInvertiblePivot)?;
        work.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let scale = work[col][col].invert().expect("pivot chosen invertible");
        for j in 0..n {
            work[col][j] = work[col][j].mul(&scale);
            inv[col][j] = inv[col][j].mul(&scale);
        }
        for row in 0..n {
            if row == col || work[row][col].is_zero() {
                continue;
            }
            let factor = work[row][col].clone();
            for j in 0..n {
                work[row][j] = work[row][j].sub(&factor.mul(&work[col][j]));
                inv[row][j] = inv[row][j].sub(&factor.mul(&inv[col][j]));
            }
        }
    }
    Ok(inv)
}

/// Pick one pivot row per column from the constant-term matrix,
/// scanning candidate rows in the requested order.
fn choose_pivots<R: Ring>(
    constants: &[Vec<R>],
    ncols: usize,
    scan: PivotScan,
) -> Result<Vec<usize>, SolveError> {
    let nrows = constants.len();
    let row_order: Vec<usize> = match scan {
        PivotScan::Forward => (0..nrows).collect(),
        PivotScan::Reverse => (0..nrows).rev().collect(),
    };
    let mut work: Vec<Vec<R>> = constants.to_vec();
    let mut used = vec![false; nrows];
    let mut pivots = Vec::with_capacity(ncols);
    for col in 0..ncols {
        let pivot_row = row_order
            .iter()
            .copied()
            .find(|&row| !used[row] && work[row][col].invert().is_some())
            .ok_or(SolveError::DependentColumns)?;
        used[pivot_row] = true;
        pivots.push(pivot_row);
        let scale = work[pivot_row][col].invert().expect("pivot chosen invertible");
        for j in 0..ncols {
            work[pivot_row][j] = work[pivot_row][j].mul(&scale);
        }
        for row in 0..nrows {
            if row == pivot_row || work[row][col].is_zero() {
                continue;
            }
            let factor = work[row][col].clone();
            for j in 0..ncols {
                work[row][j] = work[row][j].sub(&factor.mul(&work[pivot_row][j]));
            }
        }
    }
    Ok(pivots)
}

/// Solve `sum_j columns[j] * x_j = target` for series coefficients,
/// as far as the pivot rows determine them, and report the residual.
pub(crate) fn solve_series_system<R: Ring>(
    columns: &[Vec<MultiSeries<R>>],
    target: &[MultiSeries<R>],
    scan: PivotScan,
) -> Result<SolveOutcome<R>, SolveError> {
    let ncols = columns.len();
    assert!(ncols > 0, "need at least one column");
    let nrows = target.len();
    assert!(
        columns.iter().all(|c| c.len() == nrows),
        "column length must match target length"
    );
    let nvars = target[0].nvars();
    let bound = target[0].bound();

    let constants: Vec<Vec<R>> = (0..nrows)
        .map(|i| (0..ncols).map(|j| columns[j][i].constant_term()).collect())
        .collect();
    let pivots = choose_pivots(&constants, ncols, scan)?;
    let pivot_matrix: Vec<Vec<R>> = pivots
        .iter()
        .map(|&row| constants[row].clone())
        .collect();
    let pivot_inverse = invert_square(&pivot_matrix)?;

    let mut solution = vec![MultiSeries::zero(nvars, bound); ncols];
    let mut residual: Vec<MultiSeries<R>> = target.to_vec();
    for deg in 0..=bound {
        let mut keys: BTreeSet<Vec<u32>> = BTreeSet::new();
        for &row in &pivots {
            for (key, _) in residual[row].terms() {
                if key.iter().sum::<u32>() == deg {
                    keys.insert(key.clone());
                }
            }
        }
        for key in keys {
            let rhs: Vec<R> = pivots
                .iter()
                .map(|&row| residual[row].coeff(&key))
                .collect();
            for (j, inv_row) in pivot_inverse.iter().enumerate() {
                let mut coeff = R::zero();
                for (entry, value) in inv_row.iter().zip(&rhs) {
                    coeff = coeff.add(&entry.mul(value));
                }
                if coeff.is_zero() {
                    continue;
                }
                let mono = MultiSeries::monomial(nvars, bound, &key, coeff)
                    .expect("key arity matches shape");
                solution[j] = solution[j].add(&mono);
                for (row, res) in residual.iter_mut().enumerate() {
                    *res = res.sub(&columns[j][row].mul(&mono));
                }
            }
        }
    }
    Ok(SolveOutcome { solution, residual })
}
