//! Deformation families of free submodules in the weight-graded model.
//!
//! A [`Lattice`] is a rank-many list of generators `v_0 .. v_r` inside a
//! [`GMSystem`], each leading at weight `j` with leads that are linearly
//! independent at the origin of the parameter space. Three concrete
//! families are provided, together with an exact membership test
//! ([`Lattice::reduce`]) over the ring of truncated series in the
//! deformation parameters adjoined the weight-shift symbol `D^-1`, and a
//! closure audit ([`Lattice::stability_checks`]) that verifies both the
//! family's closed-form operator identities and generic membership of
//! `t`, `D^-1`, and mixed-derivation images.
//!
//! Weights in the model are non-negative, so a membership query never
//! has to reject negative-weight components; elements simply cannot
//! carry them.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::gmsystem::{GMElement, GMError, GMSystem, HVector, Shape};
use crate::rational::Rational;
use crate::ring::Ring;
use crate::series::{MultiSeries, SeriesError};
use crate::solve::{solve_series_system, PivotScan};

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("rank parameter must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("weight cap {cap} is too small for rank parameter {r}; need at least {min}")]
    WeightCapTooSmall { cap: u32, r: usize, min: u32 },
    #[error("deformation function must be univariate and vanish to second order")]
    BadDeformationFunction,
    #[error("deformation data carries degree precision {have}, need {need}")]
    InsufficientPrecision { have: u32, need: u32 },
    #[error("coefficient function for index {index} must have order exactly {index}")]
    WrongOrder { index: usize },
    #[error("expected {expected} coefficient functions, got {got}")]
    WrongCoefficientCount { expected: usize, got: usize },
    #[error("generator {generator} leads at weight {got}, expected {expected}")]
    LeadWeightMismatch {
        generator: usize,
        got: u32,
        expected: u32,
    },
    #[error("generator leads are linearly dependent at the origin")]
    DegenerateLeads,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Model(#[from] GMError),
}

/// Which construction produced a lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// Single deformation function `h(s_1)`, zero structure matrix.
    Special,
    /// Shift structure matrix, generators obtained by the exponential
    /// twist of the shifted basis.
    Nilpotent,
    /// Coefficient functions `h_2 .. h_r`, generators are iterated
    /// `D^-1 d/ds_1` images of a single element.
    Relative,
    /// The split module spanned by `D^-j e_j` with no parameter mixing.
    Undeformed,
    /// Caller-supplied generators with no closed-form identities.
    Custom,
}

#[derive(Clone, Debug)]
enum FamilyData {
    Special { h: MultiSeries<Rational> },
    Nilpotent,
    Relative,
    Undeformed,
    Custom,
}

/// Expression of a member as `sum_j lambda_j(D^-1, s) v_j`, stored as
/// one coefficient series per generator and shift power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipWitness {
    nvars: usize,
    bound: u32,
    shifts: Vec<Vec<MultiSeries<Rational>>>,
}

impl MembershipWitness {
    pub(crate) fn empty(ngens: usize, nvars: usize, bound: u32) -> Self {
        MembershipWitness {
            nvars,
            bound,
            shifts: vec![Vec::new(); ngens],
        }
    }

    pub(crate) fn accumulate(&mut self, generator: usize, shift: usize, series: &MultiSeries<Rational>) {
        let slot = &mut self.shifts[generator];
        while slot.len() <= shift {
            slot.push(MultiSeries::zero(self.nvars, self.bound));
        }
        slot[shift] = slot[shift].add(series);
    }

    /// Coefficient of `D^-shift v_generator`; zero when absent.
    pub fn coefficient(&self, generator: usize, shift: usize) -> MultiSeries<Rational> {
        self.shifts
            .get(generator)
            .and_then(|slot| slot.get(shift))
            .cloned()
            .unwrap_or_else(|| MultiSeries::zero(self.nvars, self.bound))
    }

    /// Pairs `(generator, shift)` carrying a nonzero coefficient.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (j, slot) in self.shifts.iter().enumerate() {
            for (m, series) in slot.iter().enumerate() {
                if !series.is_zero() {
                    out.push((j, m));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.support().is_empty()
    }

    /// Re-expand the witness against the lattice's generators.
    pub fn expand(&self, lattice: &Lattice) -> GMElement<Rational> {
        let mut acc = lattice.system().zero_element();
        for (j, slot) in self.shifts.iter().enumerate() {
            for (m, series) in slot.iter().enumerate() {
                if series.is_zero() {
                    continue;
                }
                let shifted = lattice.generator(j).shift_weight(m as u32);
                acc = acc.add(&shifted.mul_series(series));
            }
        }
        acc
    }
}

impl fmt::Display for MembershipWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (j, slot) in self.shifts.iter().enumerate() {
            let parts: Vec<String> = slot
                .iter()
                .enumerate()
                .filter(|(_, series)| !series.is_zero())
                .map(|(m, series)| {
                    if m == 0 {
                        format!("({series})")
                    } else {
                        format!("({series}) D^-{m}")
                    }
                })
                .collect();
            if parts.is_empty() {
                continue;
            }
            if wrote {
                writeln!(f)?;
            }
            write!(f, "v{}: {}", j, parts.join(" + "))?;
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Result of a membership query.
#[derive(Debug)]
pub enum ReduceOutcome {
    Member(MembershipWitness),
    NotMember { residual: GMElement<Rational> },
}

impl ReduceOutcome {
    pub fn is_member(&self) -> bool {
        matches!(self, ReduceOutcome::Member(_))
    }

    pub fn witness(&self) -> Option<&MembershipWitness> {
        match self {
            ReduceOutcome::Member(w) => Some(w),
            ReduceOutcome::NotMember { .. } => None,
        }
    }

    pub fn residual(&self) -> Option<&GMElement<Rational>> {
        match self {
            ReduceOutcome::Member(_) => None,
            ReduceOutcome::NotMember { residual } => Some(residual),
        }
    }
}

/// One verified identity or membership fact, with the discrepancy kept
/// around when the check fails.
#[derive(Debug)]
pub struct IdentityCheck {
    pub label: String,
    pub passed: bool,
    pub residual: Option<GMElement<Rational>>,
}

pub struct Lattice {
    system: GMSystem,
    generators: Vec<GMElement<Rational>>,
    leads: Vec<HVector<Rational>>,
    lead_weights: Vec<u32>,
    family: FamilyData,
}

impl Lattice {
    /// Family with one deformation function: the zeroth generator is
    /// `e_0 + sum_j s_j D^-(j-1) e_j + h(s_1) e_2` and the others are its
    /// `D^-1 d/ds_j` images.
    pub fn special_deformation(
        r: usize,
        degree_bound: u32,
        weight_cap: u32,
        h: &MultiSeries<Rational>,
    ) -> Result<Lattice, LatticeError> {
        let shape = family_shape(r, degree_bound, weight_cap)?;
        let h = prepared_univariate(h, degree_bound)?;
        if !h.constant_term().is_zero() || !h.coeff_univar(1).is_zero() {
            return Err(LatticeError::BadDeformationFunction);
        }
        let system = GMSystem::with_zero_structure(shape);
        let mut v0 = system.basis::<Rational>(0);
        for j in 1..=r {
            let sj = MultiSeries::var(r, degree_bound, j - 1)?;
            let term = system
                .basis::<Rational>(j)
                .shift_weight(j as u32 - 1)
                .mul_series(&sj);
            v0 = v0.add(&term);
        }
        let h_emb = h.embed_into(r, &[0])?;
        v0 = v0.add(&system.basis::<Rational>(2).mul_series(&h_emb));

        let mut generators = vec![v0];
        for j in 1..=r {
            let image = system.inv_derivation(&system.var_derivation(&generators[0], j - 1));
            generators.push(image);
        }
        Lattice::finish(system, generators, FamilyData::Special { h })
    }

    /// Family over the shift structure matrix: generator `j` is the
    /// exponential twist of `D^-j e_j`.
    pub fn nilpotent_family(
        r: usize,
        degree_bound: u32,
        weight_cap: u32,
    ) -> Result<Lattice, LatticeError> {
        let shape = family_shape(r, degree_bound, weight_cap)?;
        let system = GMSystem::with_shift_structure(shape);
        let generators: Vec<GMElement<Rational>> = (0..=r)
            .map(|j| system.nilpotent_twist(&system.basis::<Rational>(j).shift_weight(j as u32)))
            .collect();
        Lattice::finish(system, generators, FamilyData::Nilpotent)
    }

    /// Family with coefficient functions `h_i(s_1)` of exact order `i`
    /// for `i = 2 .. r`. The zeroth generator couples every parameter
    /// monomial `s^nu` (in `s_2 .. s_r`) to the derivative
    /// `h_i^(||nu||)` at weight `||nu|| - |nu|`, and generator `j` is
    /// the `j`-fold `D^-1 d/ds_1` image of it.
    pub fn relative_family(
        r: usize,
        degree_bound: u32,
        weight_cap: u32,
        h_list: &[MultiSeries<Rational>],
    ) -> Result<Lattice, LatticeError> {
        let shape = family_shape(r, degree_bound, weight_cap)?;
        if h_list.len() != r - 1 {
            return Err(LatticeError::WrongCoefficientCount {
                expected: r - 1,
                got: h_list.len(),
            });
        }
        let mut prepared = Vec::with_capacity(h_list.len());
        for (offset, h) in h_list.iter().enumerate() {
            let index = offset + 2;
            let h = prepared_univariate(h, degree_bound)?;
            if h.order() != Some(index as u32) {
                return Err(LatticeError::WrongOrder { index });
            }
            prepared.push(h);
        }

        // All derivatives of each coefficient function, reused across
        // the monomial enumeration below.
        let mut derivative_table: Vec<Vec<MultiSeries<Rational>>> = Vec::new();
        for h in &prepared {
            let mut row = vec![h.clone()];
            for m in 1..=degree_bound as usize {
                let next = row[m - 1].partial_derivative(0)?;
                row.push(next);
            }
            derivative_table.push(row);
        }

        let system = GMSystem::with_zero_structure(shape);
        let mut parts: BTreeMap<u32, Vec<MultiSeries<Rational>>> = BTreeMap::new();
        let zero_row = || vec![MultiSeries::<Rational>::zero(r, degree_bound); r + 1];
        {
            let row = parts.entry(0).or_insert_with(zero_row);
            row[0] = row[0].add(&MultiSeries::one(r, degree_bound));
            row[1] = row[1].add(&MultiSeries::var(r, degree_bound, 0)?);
            for (offset, h) in prepared.iter().enumerate() {
                let i = offset + 2;
                row[i] = row[i].add(&h.embed_into(r, &[0])?);
            }
        }
        for nu in weighted_monomials(r - 1, degree_bound) {
            let weighted: u32 = nu
                .iter()
                .enumerate()
                .map(|(slot, &count)| (slot as u32 + 2) * count)
                .sum();
            let size: u32 = nu.iter().sum();
            let weight = weighted - size;
            if weight > weight_cap || weighted > degree_bound {
                continue;
            }
            let mut key = vec![0u32; r];
            for (slot, &count) in nu.iter().enumerate() {
                key[slot + 1] = count;
            }
            let mut factorial = Rational::one();
            for &count in &nu {
                for k in 1..=count as i64 {
                    factorial = factorial.mul(&Rational::from_int(k));
                }
            }
            let mono = MultiSeries::monomial(
                r,
                degree_bound,
                &key,
                factorial.recip().expect("factorial is nonzero"),
            )?;
            if mono.is_zero() {
                continue;
            }
            let row = parts.entry(weight).or_insert_with(zero_row);
            for (offset, table) in derivative_table.iter().enumerate() {
                let i = offset + 2;
                let deriv = &table[weighted as usize];
                if deriv.is_zero() {
                    continue;
                }
                let coeff = deriv.embed_into(r, &[0])?.mul(&mono);
                row[i] = row[i].add(&coeff);
            }
        }
        let assembled: Vec<(u32, HVector<Rational>)> = parts
            .into_iter()
            .map(|(w, entries)| (w, HVector::from_entries(entries)))
            .collect();
        let v0 = system.element_from_components(&assembled)?;

        let mut generators = vec![v0];
        for j in 1..=r {
            let image = system.inv_derivation(&system.var_derivation(&generators[j - 1], 0));
            generators.push(image);
        }
        Lattice::finish(system, generators, FamilyData::Relative)
    }

    /// Wrap explicit generators as a lattice, subject to the same lead
    /// validation as the built-in families. Useful for re-testing
    /// membership against a derived generating set.
    pub fn from_generators(
        system: GMSystem,
        generators: Vec<GMElement<Rational>>,
    ) -> Result<Lattice, LatticeError> {
        Lattice::finish(system, generators, FamilyData::Custom)
    }

    /// Parameter-free split module spanned by `D^-j e_j`.
    pub fn undeformed(
        r: usize,
        degree_bound: u32,
        weight_cap: u32,
    ) -> Result<Lattice, LatticeError> {
        let shape = family_shape(r, degree_bound, weight_cap)?;
        let system = GMSystem::with_zero_structure(shape);
        let generators: Vec<GMElement<Rational>> = (0..=r)
            .map(|j| system.basis::<Rational>(j).shift_weight(j as u32))
            .collect();
        Lattice::finish(system, generators, FamilyData::Undeformed)
    }

    fn finish(
        system: GMSystem,
        generators: Vec<GMElement<Rational>>,
        family: FamilyData,
    ) -> Result<Lattice, LatticeError> {
        let rank = system.shape().rank;
        let mut leads = Vec::with_capacity(rank);
        let mut lead_weights = Vec::with_capacity(rank);
        for (j, gen) in generators.iter().enumerate() {
            let lead_weight = gen
                .weights()
                .next()
                .ok_or(LatticeError::DegenerateLeads)?;
            if lead_weight != j as u32 {
                return Err(LatticeError::LeadWeightMismatch {
                    generator: j,
                    got: lead_weight,
                    expected: j as u32,
                });
            }
            leads.push(gen.component(lead_weight)?);
            lead_weights.push(lead_weight);
        }
        let origin = crate::matrix::RatMat::from_rows(
            (0..rank)
                .map(|i| {
                    (0..rank)
                        .map(|j| leads[j].entry(i).constant_term())
                        .collect()
                })
                .collect(),
        );
        if origin.inverse().is_none() {
            return Err(LatticeError::DegenerateLeads);
        }
        Ok(Lattice {
            system,
            generators,
            leads,
            lead_weights,
            family,
        })
    }

    pub fn system(&self) -> &GMSystem {
        &self.system
    }

    pub fn shape(&self) -> Shape {
        self.system.shape()
    }

    pub fn family(&self) -> FamilyKind {
        match self.family {
            FamilyData::Special { .. } => FamilyKind::Special,
            FamilyData::Nilpotent => FamilyKind::Nilpotent,
            FamilyData::Relative => FamilyKind::Relative,
            FamilyData::Undeformed => FamilyKind::Undeformed,
            FamilyData::Custom => FamilyKind::Custom,
        }
    }

    /// Index of the last generator (the rank parameter `r`).
    pub fn top_index(&self) -> usize {
        self.generators.len() - 1
    }

    pub fn generators(&self) -> &[GMElement<Rational>] {
        &self.generators
    }

    pub fn generator(&self, j: usize) -> &GMElement<Rational> {
        &self.generators[j]
    }

    pub fn lead(&self, j: usize) -> &HVector<Rational> {
        &self.leads[j]
    }

    pub fn lead_weight(&self, j: usize) -> u32 {
        self.lead_weights[j]
    }

    /// Comparison bound that keeps every operator application inside
    /// the stored weight range.
    pub fn default_bound(&self) -> u32 {
        let shape = self.system.shape();
        shape.weight_cap.saturating_sub(shape.rank as u32)
    }

    /// Leading vectors of the generators whose lead weight is at most
    /// `w`; their span over the series ring is the image of the module
    /// in the weight-`w` graded piece.
    pub fn hodge_filtration(&self, w: u32) -> Vec<HVector<Rational>> {
        self.generators
            .iter()
            .enumerate()
            .filter(|(j, _)| self.lead_weights[*j] <= w)
            .map(|(j, _)| self.leads[j].clone())
            .collect()
    }

    /// Constant terms of the filtration leads, one list per level
    /// `p = 0 .. r`. Level `p` spans the origin fiber of the degree-`p`
    /// filtration step.
    pub fn hodge_flag_at_origin(&self) -> Vec<Vec<Vec<Rational>>> {
        let rank = self.system.shape().rank;
        (0..rank as u32)
            .map(|p| {
                self.generators
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| self.lead_weights[*j] <= p)
                    .map(|(j, _)| {
                        self.leads[j]
                            .entries()
                            .iter()
                            .map(|e| e.constant_term())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Decide membership of `x` in the module generated by the `v_j`
    /// over series in the parameters and `D^-1`, comparing all weight
    /// components through `bound`.
    pub fn reduce(
        &self,
        x: &GMElement<Rational>,
        bound: u32,
    ) -> Result<ReduceOutcome, LatticeError> {
        self.reduce_with_scan(x, bound, PivotScan::Forward)
    }

    /// Same as [`Lattice::reduce`] with an explicit pivot scan order;
    /// both orders must produce identical witnesses because the shifted
    /// generators are linearly independent.
    pub fn reduce_with_scan(
        &self,
        x: &GMElement<Rational>,
        bound: u32,
        scan: PivotScan,
    ) -> Result<ReduceOutcome, LatticeError> {
        let shape = self.system.shape();
        assert_eq!(x.shape(), shape, "element from a different model");
        let target = x.coordinates_through(bound)?;
        let mut columns = Vec::new();
        let mut placement = Vec::new();
        for (j, gen) in self.generators.iter().enumerate() {
            let lead = self.lead_weights[j];
            if lead > bound {
                continue;
            }
            for m in 0..=(bound - lead) {
                let shifted = gen.shift_weight(m);
                columns.push(shifted.coordinates_through(bound)?);
                placement.push((j, m as usize));
            }
        }
        if columns.is_empty() {
            return Ok(if target.iter().all(|c| c.is_zero()) {
                ReduceOutcome::Member(MembershipWitness::empty(
                    self.generators.len(),
                    shape.nvars,
                    shape.degree_bound,
                ))
            } else {
                ReduceOutcome::NotMember {
                    residual: self.unflatten(&target, bound)?,
                }
            });
        }
        let outcome = solve_series_system(&columns, &target, scan)
            .map_err(|_| LatticeError::DegenerateLeads)?;
        if outcome.residual.iter().all(|c| c.is_zero()) {
            let mut witness = MembershipWitness::empty(
                self.generators.len(),
                shape.nvars,
                shape.degree_bound,
            );
            for ((j, m), series) in placement.iter().zip(&outcome.solution) {
                if !series.is_zero() {
                    witness.accumulate(*j, *m, series);
                }
            }
            Ok(ReduceOutcome::Member(witness))
        } else {
            Ok(ReduceOutcome::NotMember {
                residual: self.unflatten(&outcome.residual, bound)?,
            })
        }
    }

    fn unflatten(
        &self,
        coords: &[MultiSeries<Rational>],
        bound: u32,
    ) -> Result<GMElement<Rational>, LatticeError> {
        let rank = self.system.shape().rank;
        let mut parts = Vec::new();
        for w in 0..=bound {
            let entries = coords[(w as usize) * rank..(w as usize + 1) * rank].to_vec();
            parts.push((w, HVector::from_entries(entries)));
        }
        Ok(self.system.element_from_components(&parts)?.restrict_valid(bound))
    }

    /// Verify the family's closed-form operator identities and the
    /// membership of every `t`, `D^-1`, and `D^-1 d/ds_i` image of a
    /// generator, through weight `bound` for membership queries.
    pub fn stability_checks(&self, bound: u32) -> Result<Vec<IdentityCheck>, LatticeError> {
        let r = self.top_index();
        let shape = self.system.shape();
        let mut checks = Vec::new();

        match &self.family {
            FamilyData::Special { h } => {
                let h2 = h.partial_derivative(0)?.partial_derivative(0)?;
                let h2_emb = h2.embed_into(shape.nvars, &[0])?;
                let mut rhs = self.system.inv_derivation(&self.generators[0]);
                for j in 2..=r {
                    let sj = MultiSeries::var(shape.nvars, shape.degree_bound, j - 1)?
                        .scale_q(&Rational::from_int(j as i64 - 1));
                    rhs = rhs.add(&self.generators[j].mul_series(&sj));
                }
                checks.push(equality_check(
                    "t v0 = D^-1 v0 + sum_j (j-1) s_j vj".into(),
                    &self.system.t_action(&self.generators[0]),
                    &rhs,
                ));
                for j in 1..=r {
                    checks.push(equality_check(
                        format!("t v{j} = {} D^-1 v{j}", j + 1),
                        &self.system.t_action(&self.generators[j]),
                        &self
                            .system
                            .inv_derivation(&self.generators[j])
                            .scale_q(&Rational::from_int(j as i64 + 1)),
                    ));
                }
                for i in 1..=r {
                    checks.push(equality_check(
                        format!("D^-1 d/ds{i} v0 = v{i}"),
                        &self
                            .system
                            .inv_derivation(&self.system.var_derivation(&self.generators[0], i - 1)),
                        &self.generators[i],
                    ));
                }
                for i in 1..=r {
                    for j in 1..=r {
                        let image = self
                            .system
                            .inv_derivation(&self.system.var_derivation(&self.generators[j], i - 1));
                        let expected = if i == 1 && j == 1 {
                            self.generators[2].mul_series(&h2_emb)
                        } else {
                            self.system.zero_element()
                        };
                        let label = if i == 1 && j == 1 {
                            "D^-1 d/ds1 v1 = h'' v2".to_string()
                        } else {
                            format!("D^-1 d/ds{i} v{j} = 0")
                        };
                        checks.push(equality_check(label, &image, &expected));
                    }
                }
            }
            FamilyData::Nilpotent => {
                let n = self.system.nilpotent().clone();
                for j in 1..=r {
                    checks.push(equality_check(
                        format!("D^-1 d/ds{j} v0 = v{j}"),
                        &self
                            .system
                            .inv_derivation(&self.system.var_derivation(&self.generators[0], j - 1)),
                        &self.generators[j],
                    ));
                    checks.push(equality_check(
                        format!("D^-{j} N^{j} v0 = v{j}"),
                        &self.generators[0]
                            .apply_matrix(&n.pow(j as u32))
                            .shift_weight(j as u32),
                        &self.generators[j],
                    ));
                }
                for i in 1..=r {
                    for j in 1..=r {
                        let image = self
                            .system
                            .inv_derivation(&self.system.var_derivation(&self.generators[j], i - 1));
                        let (label, expected) = if i + j <= r {
                            (
                                format!("D^-1 d/ds{i} v{j} = v{}", i + j),
                                self.generators[i + j].clone(),
                            )
                        } else {
                            (
                                format!("D^-1 d/ds{i} v{j} = 0"),
                                self.system.zero_element(),
                            )
                        };
                        checks.push(equality_check(label, &image, &expected));
                    }
                }
                for j in 0..=r {
                    let mut rhs = self
                        .system
                        .inv_derivation(&self.generators[j])
                        .scale_q(&Rational::from_int(j as i64 + 1));
                    if j + 1 <= r {
                        rhs = rhs.add(&self.generators[j + 1]);
                    }
                    for i in 2..=(r.saturating_sub(j)) {
                        let si = MultiSeries::var(shape.nvars, shape.degree_bound, i - 1)?
                            .scale_q(&Rational::from_int(i as i64 - 1));
                        rhs = rhs.add(&self.generators[i + j].mul_series(&si));
                    }
                    checks.push(equality_check(
                        format!("t v{j} = ({}) D^-1 v{j} + v{} + sum_i (i-1) s_i v(i+{j})", j + 1, j + 1),
                        &self.system.t_action(&self.generators[j]),
                        &rhs,
                    ));
                }
            }
            FamilyData::Relative => {
                for j in 2..=r {
                    checks.push(equality_check(
                        format!("D^-1 d/ds{j} v0 = D^-{j} (d/ds1)^{j} v0"),
                        &self
                            .system
                            .inv_derivation(&self.system.var_derivation(&self.generators[0], j - 1)),
                        &self.generators[j],
                    ));
                }
                let mut rhs = self.system.zero_element();
                for j in 2..=r {
                    let sj = MultiSeries::var(shape.nvars, shape.degree_bound, j - 1)?
                        .scale_q(&Rational::from_int(j as i64 - 1));
                    let image = self
                        .system
                        .inv_derivation(&self.system.var_derivation(&self.generators[0], j - 1));
                    rhs = rhs.add(&image.mul_series(&sj));
                }
                checks.push(equality_check(
                    "(t - D^-1) v0 = sum_j (j-1) s_j D^-1 d/ds_j v0".into(),
                    &self
                        .system
                        .t_action(&self.generators[0])
                        .sub(&self.system.inv_derivation(&self.generators[0])),
                    &rhs,
                ));
                for i in 1..=r {
                    for j in 0..=r {
                        if i + j > r {
                            continue;
                        }
                        checks.push(equality_check(
                            format!("D^-1 d/ds{i} v{j} = v{}", i + j),
                            &self
                                .system
                                .inv_derivation(&self.system.var_derivation(&self.generators[j], i - 1)),
                            &self.generators[i + j],
                        ));
                    }
                }
            }
            FamilyData::Undeformed => {
                for j in 0..=r {
                    checks.push(equality_check(
                        format!("t v{j} = {} D^-1 v{j}", j + 1),
                        &self.system.t_action(&self.generators[j]),
                        &self
                            .system
                            .inv_derivation(&self.generators[j])
                            .scale_q(&Rational::from_int(j as i64 + 1)),
                    ));
                    for i in 1..=shape.nvars {
                        checks.push(equality_check(
                            format!("d/ds{i} v{j} = 0"),
                            &self.system.var_derivation(&self.generators[j], i - 1),
                            &self.system.zero_element(),
                        ));
                    }
                }
            }
            FamilyData::Custom => {}
        }

        for j in 0..=r {
            checks.push(self.membership_check(
                format!("membership: t v{j}"),
                &self.system.t_action(&self.generators[j]),
                bound,
            )?);
            checks.push(self.membership_check(
                format!("membership: D^-1 v{j}"),
                &self.system.inv_derivation(&self.generators[j]),
                bound,
            )?);
            for i in 1..=shape.nvars {
                let image = self
                    .system
                    .inv_derivation(&self.system.var_derivation(&self.generators[j], i - 1));
                checks.push(self.membership_check(
                    format!("membership: D^-1 d/ds{i} v{j}"),
                    &image,
                    bound,
                )?);
            }
        }
        Ok(checks)
    }

    fn membership_check(
        &self,
        label: String,
        x: &GMElement<Rational>,
        bound: u32,
    ) -> Result<IdentityCheck, LatticeError> {
        match self.reduce(x, bound)? {
            ReduceOutcome::Member(witness) => {
                let sound = witness.expand(self).agrees_with(x, bound)?;
                Ok(IdentityCheck {
                    label,
                    passed: sound,
                    residual: None,
                })
            }
            ReduceOutcome::NotMember { residual } => Ok(IdentityCheck {
                label,
                passed: false,
                residual: Some(residual),
            }),
        }
    }
}

fn family_shape(r: usize, degree_bound: u32, weight_cap: u32) -> Result<Shape, LatticeError> {
    if r < 2 {
        return Err(LatticeError::RankTooSmall(r));
    }
    let min_cap = r as u32 + 2;
    if weight_cap < min_cap {
        return Err(LatticeError::WeightCapTooSmall {
            cap: weight_cap,
            r,
            min: min_cap,
        });
    }
    Ok(Shape {
        rank: r + 1,
        nvars: r,
        degree_bound,
        weight_cap,
    })
}

fn prepared_univariate(
    h: &MultiSeries<Rational>,
    degree_bound: u32,
) -> Result<MultiSeries<Rational>, LatticeError> {
    if h.nvars() != 1 {
        return Err(LatticeError::BadDeformationFunction);
    }
    if h.bound() < degree_bound {
        return Err(LatticeError::InsufficientPrecision {
            have: h.bound(),
            need: degree_bound,
        });
    }
    Ok(h.truncated(degree_bound))
}

fn equality_check(
    label: String,
    lhs: &GMElement<Rational>,
    rhs: &GMElement<Rational>,
) -> IdentityCheck {
    let diff = lhs.sub(rhs);
    if diff.is_zero() {
        IdentityCheck {
            label,
            passed: true,
            residual: None,
        }
    } else {
        IdentityCheck {
            label,
            passed: false,
            residual: Some(diff),
        }
    }
}

/// All exponent vectors `nu` of the given length with weighted degree
/// `sum_j (j + 2) nu_j` at most `limit`, excluding the zero vector.
fn weighted_monomials(len: usize, limit: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; len];
    fill_monomials(0, limit, &mut current, &mut out);
    out
}

fn fill_monomials(slot: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if slot == current.len() {
        if current.iter().any(|&c| c > 0) {
            out.push(current.clone());
        }
        return;
    }
    let step = slot as u32 + 2;
    let max_count = remaining / step;
    for count in 0..=max_count {
        current[slot] = count;
        fill_monomials(slot + 1, remaining - count * step, current, out);
    }
    current[slot] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn special(r: usize, n: u32, k: u32, h_text: &str) -> Lattice {
        let h = MultiSeries::parse(h_text, 1, n).unwrap();
        Lattice::special_deformation(r, n, k, &h).unwrap()
    }

    #[test]
    fn special_generators_match_the_displayed_forms() {
        let lat = special(2, 4, 5, "1 * s1^2");
        let v0 = lat.generator(0);
        let w0 = v0.component(0).unwrap();
        assert_eq!(w0.entry(0), &MultiSeries::one(2, 4));
        assert_eq!(w0.entry(1), &MultiSeries::var(2, 4, 0).unwrap());
        assert_eq!(
            w0.entry(2),
            &MultiSeries::parse("1 * s1^2", 2, 4).unwrap()
        );
        let w1 = v0.component(1).unwrap();
        assert!(w1.entry(0).is_zero());
        assert!(w1.entry(1).is_zero());
        assert_eq!(w1.entry(2), &MultiSeries::var(2, 4, 1).unwrap());
        assert!(v0.component(2).unwrap().is_zero());

        let v1 = lat.generator(1);
        assert!(v1.component(0).unwrap().is_zero());
        let v1w1 = v1.component(1).unwrap();
        assert!(v1w1.entry(0).is_zero());
        assert_eq!(v1w1.entry(1), &MultiSeries::one(2, 4));
        assert_eq!(
            v1w1.entry(2),
            &MultiSeries::parse("2 * s1", 2, 4).unwrap()
        );

        let v2 = lat.generator(2);
        assert_eq!(lat.lead_weight(2), 2);
        let v2w2 = v2.component(2).unwrap();
        assert_eq!(v2w2.entry(2), &MultiSeries::one(2, 4));
        assert!(v2w2.entry(0).is_zero() && v2w2.entry(1).is_zero());
    }

    #[test]
    fn t_image_of_v1_reduces_with_a_pure_shift_witness() {
        let lat = special(2, 4, 6, "1 * s1^2");
        let x = lat.system().t_action(lat.generator(1));
        let outcome = lat.reduce(&x, lat.default_bound()).unwrap();
        let witness = outcome.witness().expect("t v1 is a member");
        assert_eq!(
            witness.coefficient(1, 1),
            MultiSeries::constant(2, 4, q(2))
        );
        assert_eq!(witness.support(), vec![(1, 1)]);
        assert!(witness
            .expand(&lat)
            .agrees_with(&x, lat.default_bound())
            .unwrap());
    }

    #[test]
    fn second_shift_of_e0_is_a_member_but_bare_e1_is_not() {
        let lat = special(2, 4, 6, "1 * s1^2");
        let e0_shifted = lat.system().basis::<Rational>(0).shift_weight(2);
        let outcome = lat.reduce(&e0_shifted, lat.default_bound()).unwrap();
        assert!(outcome.is_member());

        let e1 = lat.system().basis::<Rational>(1);
        let outcome = lat.reduce(&e1, lat.default_bound()).unwrap();
        let residual = outcome.residual().expect("bare e1 is not a member");
        let w0 = residual.component(0).unwrap();
        assert!(w0.entry(0).is_zero());
        assert_eq!(w0.entry(1), &MultiSeries::one(2, 4));
    }

    #[test]
    fn special_family_stability_audit_passes() {
        let lat = special(3, 5, 6, "1 * s1^2 + 1 * s1^3");
        let checks = lat.stability_checks(lat.default_bound()).unwrap();
        for check in &checks {
            assert!(check.passed, "failed: {}", check.label);
        }
    }

    #[test]
    fn nilpotent_family_matches_twist_expansion_and_passes_audit() {
        let lat = Lattice::nilpotent_family(2, 4, 6).unwrap();
        let v1 = lat.generator(1);
        let w1 = v1.component(1).unwrap();
        assert!(w1.entry(0).is_zero());
        assert_eq!(w1.entry(1), &MultiSeries::one(2, 4));
        assert_eq!(w1.entry(2), &MultiSeries::var(2, 4, 0).unwrap());

        let checks = lat.stability_checks(lat.default_bound()).unwrap();
        for check in &checks {
            assert!(check.passed, "failed: {}", check.label);
        }
    }

    #[test]
    fn relative_family_origin_values_detect_pure_monomial_coefficients() {
        let h2 = MultiSeries::parse("1 * s1^2", 1, 6).unwrap();
        let h3 = MultiSeries::parse("1 * s1^3", 1, 6).unwrap();
        let lat = Lattice::relative_family(3, 6, 6, &[h2.clone(), h3]).unwrap();
        // Pure monomials: generator j at the parameter origin is
        // j! a_j D^-j e_j.
        for j in 2..=3usize {
            let origin = lat
                .generator(j)
                .component(j as u32)
                .unwrap()
                .entries()
                .iter()
                .map(|e| e.constant_term())
                .collect::<Vec<_>>();
            let mut expected = vec![q(0); 4];
            let factorial: i64 = (1..=j as i64).product();
            expected[j] = q(factorial);
            assert_eq!(origin, expected);
        }

        // A cross term in h3 shows up in the origin value of v3.
        let h3_mixed = MultiSeries::parse("1 * s1^3 + 1 * s1^4", 1, 6).unwrap();
        let lat = Lattice::relative_family(3, 6, 6, &[h2, h3_mixed]).unwrap();
        let origin = lat
            .generator(3)
            .component(3)
            .unwrap()
            .entries()
            .iter()
            .map(|e| e.constant_term())
            .collect::<Vec<_>>();
        assert_eq!(origin, vec![q(0), q(0), q(0), q(6)]);
        // ... and a cubic term in h2 breaks the pure form at v3.
        let h2_mixed = MultiSeries::parse("1 * s1^2 + 1 * s1^3", 1, 6).unwrap();
        let h3 = MultiSeries::parse("1 * s1^3", 1, 6).unwrap();
        let lat = Lattice::relative_family(3, 6, 6, &[h2_mixed, h3]).unwrap();
        let origin = lat
            .generator(3)
            .component(3)
            .unwrap()
            .entries()
            .iter()
            .map(|e| e.constant_term())
            .collect::<Vec<_>>();
        assert_eq!(origin, vec![q(0), q(0), q(6), q(6)]);
    }

    #[test]
    fn relative_family_stability_audit_passes() {
        let h2 = MultiSeries::parse("1 * s1^2 + 2 * s1^3", 1, 6).unwrap();
        let h3 = MultiSeries::parse("1/2 * s1^3", 1, 6).unwrap();
        let lat = Lattice::relative_family(3, 6, 6, &[h2, h3]).unwrap();
        let checks = lat.stability_checks(lat.default_bound()).unwrap();
        for check in &checks {
            assert!(check.passed, "failed: {}", check.label);
        }
    }

    #[test]
    fn undeformed_reduction_splits_along_basis_vectors() {
        let lat = Lattice::undeformed(3, 4, 6).unwrap();
        let sys = lat.system();
        // x = D^-1 e1 + 3 D^-3 e2 = v1 + 3 D^-1 v2
        let x = sys
            .basis::<Rational>(1)
            .shift_weight(1)
            .add(&sys.basis::<Rational>(2).shift_weight(3).scale_q(&q(3)));
        let outcome = lat.reduce(&x, 3).unwrap();
        let witness = outcome.witness().expect("member");
        assert_eq!(witness.support(), vec![(1, 0), (2, 1)]);
        assert_eq!(witness.coefficient(1, 0), MultiSeries::one(3, 4));
        assert_eq!(witness.coefficient(2, 1), MultiSeries::constant(3, 4, q(3)));
    }

    #[test]
    fn constructors_reject_bad_input() {
        let linear = MultiSeries::parse("1 * s1", 1, 4).unwrap();
        assert!(matches!(
            Lattice::special_deformation(2, 4, 6, &linear),
            Err(LatticeError::BadDeformationFunction)
        ));
        let h = MultiSeries::parse("1 * s1^2", 1, 4).unwrap();
        assert!(matches!(
            Lattice::special_deformation(1, 4, 6, &h),
            Err(LatticeError::RankTooSmall(1))
        ));
        assert!(matches!(
            Lattice::special_deformation(2, 4, 3, &h),
            Err(LatticeError::WeightCapTooSmall { .. })
        ));
        let wrong_order = MultiSeries::parse("1 * s1^3", 1, 4).unwrap();
        let ok = MultiSeries::parse("1 * s1^3", 1, 4).unwrap();
        assert!(matches!(
            Lattice::relative_family(3, 4, 6, &[wrong_order, ok]),
            Err(LatticeError::WrongOrder { index: 2 })
        ));
    }

    #[test]
    fn reduce_demands_enough_weight_precision() {
        let lat = special(2, 4, 6, "1 * s1^2");
        let shallow = lat.generator(0).restrict_valid(1);
        assert!(matches!(
            lat.reduce(&shallow, 3),
            Err(LatticeError::Model(GMError::PrecisionExceeded { .. }))
        ));
    }

    #[test]
    fn hodge_filtration_grows_with_the_weight() {
        let lat = special(2, 4, 6, "1 * s1^2");
        assert_eq!(lat.hodge_filtration(0).len(), 1);
        assert_eq!(lat.hodge_filtration(1).len(), 2);
        assert_eq!(lat.hodge_filtration(2).len(), 3);
        assert_eq!(lat.hodge_filtration(5).len(), 3);
        let flag = lat.hodge_flag_at_origin();
        assert_eq!(flag[0], vec![vec![q(1), q(0), q(0)]]);
        assert_eq!(flag[1][1], vec![q(0), q(1), q(0)]);
    }
}
