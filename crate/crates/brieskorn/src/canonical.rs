//! Canonical module elements relative to an opposite frame.
//!
//! Fix a lattice with generators `v_0 .. v_r` and a frame whose tail
//! flag is opposite to the lead filtration. For a constant target
//! vector sitting in tail level `l`, there is exactly one member of
//! the module whose weight-`l` component is the target plus a vector
//! one level deeper in the tail, whose components below `l` vanish,
//! and whose component at every higher weight `b` lies in the tail
//! level `1 + b`. [`canonical_element`] computes that member by a
//! weight-by-weight correction sweep, [`verify_residual`] re-checks
//! the defining property from scratch, and [`canonical_generators`]
//! solves for every frame vector at once. The bottom-weight solution
//! carries the classifying coordinate series of the family, pulled
//! out by [`extract_invariants`].

use std::collections::BTreeMap;

use thiserror::Error;

use crate::gmsystem::{GMElement, GMError, HVector, Shape};
use crate::lattice::{Lattice, LatticeError, MembershipWitness};
use crate::matrix::RatMat;
use crate::opposite::{split, Frame, OppositeError};
use crate::rational::Rational;
use crate::ring::Ring;
use crate::series::MultiSeries;
use crate::solve::PivotScan;

#[derive(Debug, Error)]
pub enum CanonicalError {
    #[error("target vector has frame coordinates below level {level}")]
    TargetOutsideLevel { level: u32 },
    #[error("lead filtration and tail flag fail to split the residual at weight {weight}")]
    NotComplementary { weight: u32 },
    #[error("solution is corrected through weight {have} but extraction needs {need}")]
    InsufficientDepth { have: u32, need: u32 },
    #[error("extraction expects the bottom-level canonical solution")]
    WrongSolution,
    #[error(transparent)]
    Model(#[from] GMError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Opposite(#[from] OppositeError),
}

/// A solved canonical element together with the data of its
/// construction: the combination of generators that realizes it and
/// the tail vector left at each corrected weight.
#[derive(Clone, Debug)]
pub struct CanonicalSolution {
    element: GMElement<Rational>,
    witness: MembershipWitness,
    u_terms: BTreeMap<u32, HVector<Rational>>,
    target: Vec<Rational>,
    level: u32,
    through: u32,
}

impl CanonicalSolution {
    pub fn element(&self) -> &GMElement<Rational> {
        &self.element
    }

    pub fn witness(&self) -> &MembershipWitness {
        &self.witness
    }

    /// Tail part of the residual at one weight, if nonzero.
    pub fn u_term(&self, weight: u32) -> Option<&HVector<Rational>> {
        self.u_terms.get(&weight)
    }

    pub fn u_terms(&self) -> &BTreeMap<u32, HVector<Rational>> {
        &self.u_terms
    }

    pub fn target(&self) -> &[Rational] {
        &self.target
    }

    /// Tail level of the target, which is also the lead weight of the
    /// solution.
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Last weight the sweep corrected; the element is trusted exactly
    /// that far.
    pub fn through(&self) -> u32 {
        self.through
    }
}

fn constant_vector(shape: Shape, values: &[Rational]) -> HVector<Rational> {
    HVector::from_entries(
        values
            .iter()
            .map(|c| MultiSeries::constant(shape.nvars, shape.degree_bound, c.clone()))
            .collect(),
    )
}

/// Solve for the canonical member with lead `target` at weight
/// `level`, correcting every weight up to `bound`.
///
/// The sweep keeps one running element: at each weight the deviation
/// from the target splits into a part spanned by the lead filtration
/// and a part in tail level one; the filtration part is subtracted
/// again as an honest combination of shifted generators, so only the
/// tail part survives. Both pivot scan orders must give the same
/// answer because the decomposition at each weight is unique.
pub fn canonical_element(
    lattice: &Lattice,
    frame: &Frame,
    target: &[Rational],
    level: u32,
    bound: u32,
    scan: PivotScan,
) -> Result<CanonicalSolution, CanonicalError> {
    let shape = lattice.shape();
    assert_eq!(frame.rank(), shape.rank, "frame rank mismatch");
    assert_eq!(target.len(), shape.rank, "target arity mismatch");

    let tilde_target = frame.to_tilde_point(target);
    let below = (level as usize).min(shape.rank);
    if tilde_target[..below].iter().any(|c| !c.is_zero()) {
        return Err(CanonicalError::TargetOutsideLevel { level });
    }

    let through = bound.max(level);
    let target_vector = constant_vector(shape, target);
    let mut element = lattice.system().zero_element::<Rational>();
    let mut witness = MembershipWitness::empty(shape.rank, shape.nvars, shape.degree_bound);
    let mut u_terms = BTreeMap::new();

    for beta in level..=through {
        let mut rho = element.component(beta)?;
        if beta == level {
            rho = rho.sub(&target_vector);
        }
        if rho.is_zero() {
            continue;
        }
        let indices: Vec<usize> = (0..=lattice.top_index())
            .filter(|&j| lattice.lead_weight(j) <= beta)
            .collect();
        let f_basis: Vec<HVector<Rational>> =
            indices.iter().map(|&j| lattice.lead(j).clone()).collect();
        let u_basis = frame.u_subspace(beta, 1);
        let parts = split(&rho, &f_basis, &u_basis, scan)
            .map_err(|_| CanonicalError::NotComplementary { weight: beta })?;
        for (&j, coeff) in indices.iter().zip(&parts.f_coeffs) {
            if coeff.is_zero() {
                continue;
            }
            let shift = beta - lattice.lead_weight(j);
            let correction = lattice.generator(j).shift_weight(shift).mul_series(coeff);
            element = element.sub(&correction);
            witness.accumulate(j, shift as usize, &coeff.neg());
        }
        if !parts.u_part.is_zero() {
            u_terms.insert(beta, parts.u_part);
        }
    }

    Ok(CanonicalSolution {
        element: element.restrict_valid(through),
        witness,
        u_terms,
        target: target.to_vec(),
        level,
        through,
    })
}

/// Re-check the defining property of a solution from scratch: nothing
/// below the level, the deviation from the target in tail level
/// `1 + b` at every weight `b`, and a witness that expands back to
/// the element.
pub fn verify_residual(
    lattice: &Lattice,
    frame: &Frame,
    solution: &CanonicalSolution,
) -> Result<bool, CanonicalError> {
    let shape = lattice.shape();
    let target_vector = constant_vector(shape, &solution.target);
    for beta in 0..solution.level {
        if !solution.element.component(beta)?.is_zero() {
            return Ok(false);
        }
    }
    for beta in solution.level..=solution.through {
        let mut rho = solution.element.component(beta)?;
        if beta == solution.level {
            rho = rho.sub(&target_vector);
        }
        let tilde = frame.to_tilde_coords(&rho);
        let cutoff = (beta as usize + 1).min(shape.rank);
        if (0..cutoff).any(|m| !tilde.entry(m).is_zero()) {
            return Ok(false);
        }
    }
    let expanded = solution.witness.expand(lattice);
    Ok(expanded.agrees_with(&solution.element, solution.through)?)
}

/// Canonical solutions for all frame vectors: solution `j` targets
/// `etilde_j` at level `j`.
pub fn canonical_generators(
    lattice: &Lattice,
    frame: &Frame,
    bound: u32,
    scan: PivotScan,
) -> Result<Vec<CanonicalSolution>, CanonicalError> {
    (0..lattice.shape().rank)
        .map(|j| {
            canonical_element(
                lattice,
                frame,
                &frame.tilde_vector(j),
                j as u32,
                bound,
                scan,
            )
        })
        .collect()
}

/// Confirm the canonical solutions generate the same module as the
/// original generators: wrap them as a lattice of their own and reduce
/// every original generator against it.
pub fn generation_check(
    lattice: &Lattice,
    solutions: &[CanonicalSolution],
    bound: u32,
) -> Result<bool, CanonicalError> {
    let elements: Vec<GMElement<Rational>> =
        solutions.iter().map(|s| s.element.clone()).collect();
    let derived = Lattice::from_generators(lattice.system().clone(), elements)?;
    for generator in lattice.generators() {
        if !derived.reduce(generator, bound)?.is_member() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Classifying coordinate series of the bottom-level solution:
/// `g[j - 1]` is the `etilde_j` coordinate of the weight `j - 1`
/// component and `g_tilde` is the `etilde_2` coordinate of the bottom
/// component.
#[derive(Clone, Debug)]
pub struct Invariants {
    pub g: Vec<MultiSeries<Rational>>,
    pub g_tilde: MultiSeries<Rational>,
}

impl Invariants {
    /// First-order coefficient matrix: row `j`, column `k` holds the
    /// `s_{k+1}` coefficient of `g[j]`.
    pub fn jacobian(&self) -> RatMat {
        let n = self.g.len();
        let mut m = RatMat::zeros(n, n);
        for (j, series) in self.g.iter().enumerate() {
            assert_eq!(series.nvars(), n, "series arity mismatch");
            for k in 0..n {
                let mut key = vec![0u32; n];
                key[k] = 1;
                m[(j, k)] = series.coeff(&key);
            }
        }
        m
    }
}

/// Pull the classifying series out of the bottom-level canonical
/// solution of a rank `r + 1` lattice. Requires the solution to be
/// corrected through weight `r - 1` at least.
pub fn extract_invariants(
    lattice: &Lattice,
    frame: &Frame,
    solution: &CanonicalSolution,
) -> Result<Invariants, CanonicalError> {
    let r = lattice.top_index();
    if solution.level != 0 || solution.target != frame.tilde_vector(0) {
        return Err(CanonicalError::WrongSolution);
    }
    let need = r as u32 - 1;
    if solution.through < need {
        return Err(CanonicalError::InsufficientDepth {
            have: solution.through,
            need,
        });
    }
    let mut g = Vec::with_capacity(r);
    for j in 1..=r {
        let component = solution.element.component(j as u32 - 1)?;
        g.push(frame.to_tilde_coords(&component).entry(j).clone());
    }
    let bottom = frame.to_tilde_coords(&solution.element.component(0)?);
    let g_tilde = bottom.entry(2).clone();
    Ok(Invariants { g, g_tilde })
}

/// Support and sample images of the bottom-level solution for the
/// identity frame.
#[derive(Clone, Debug)]
pub struct PeriodSupport {
    /// `(weight, basis index)` pairs where the solution is nonzero.
    pub support: Vec<(u32, usize)>,
    /// Whether the support stays inside the span of `(1, 0)` and
    /// `(k, j)` for `1 <= j <= r`, `1 <= k <= j`. Reported, not
    /// assumed: the deformed solution generally leaves it.
    pub contained_in_reference_span: bool,
    /// Coordinates of the solution at each sample point, flattened
    /// weight-major.
    pub images: Vec<Vec<Rational>>,
    pub images_pairwise_distinct: bool,
}

/// Solve for the bottom-level canonical element in the identity frame
/// and evaluate it at the given parameter samples.
pub fn period_support(
    lattice: &Lattice,
    samples: &[Vec<Rational>],
    scan: PivotScan,
) -> Result<PeriodSupport, CanonicalError> {
    let shape = lattice.shape();
    let frame = Frame::identity(shape.rank);
    let mut target = vec![Rational::zero(); shape.rank];
    target[0] = Rational::one();
    let solution = canonical_element(
        lattice,
        &frame,
        &target,
        0,
        lattice.default_bound(),
        scan,
    )?;
    let r = lattice.top_index();

    let mut support = Vec::new();
    for w in 0..=solution.through {
        let component = solution.element.component(w)?;
        for (i, entry) in component.entries().iter().enumerate() {
            if !entry.is_zero() {
                support.push((w, i));
            }
        }
    }
    let contained = support.iter().all(|&(k, j)| {
        (k == 1 && j == 0) || (1 <= j && j <= r && 1 <= k && k as usize <= j)
    });

    let coords = solution.element.coordinates_through(solution.through)?;
    let images: Vec<Vec<Rational>> = samples
        .iter()
        .map(|point| {
            assert_eq!(point.len(), shape.nvars, "sample arity mismatch");
            coords.iter().map(|c| c.eval(point)).collect()
        })
        .collect();
    let mut distinct = true;
    for a in 0..images.len() {
        for b in (a + 1)..images.len() {
            if images[a] == images[b] {
                distinct = false;
            }
        }
    }

    Ok(PeriodSupport {
        support,
        contained_in_reference_span: contained,
        images,
        images_pairwise_distinct: distinct,
    })
}
