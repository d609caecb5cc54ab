//! Cross-module checks at desk scale: family stability, membership
//! reduction, opposite-frame geometry, the model operator algebra, and
//! agreement between the solver pipeline and the closed-form function
//! action.

use brieskorn::canonical::{canonical_generators, generation_check, verify_residual};
use brieskorn::gamma::{act_on_h, act_on_orbit, act_via_canonical, project_orbit, GammaParams};
use brieskorn::gmsystem::{GMElement, GMSystem, HVector, Shape};
use brieskorn::lattice::{Lattice, ReduceOutcome};
use brieskorn::matrix::RatMat;
use brieskorn::opposite::{is_opposite, Frame, OppositeError};
use brieskorn::series::MultiSeries;
use brieskorn::{PivotScan, Rational, Ring};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

fn qr(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Univariate function with integer coefficients in [-5, 5], vanishing
/// to order two, quadratic coefficient forced nonzero.
fn random_h(rng: &mut ChaCha8Rng, bound: u32) -> MultiSeries<Rational> {
    let mut coeffs = vec![Rational::zero(); bound as usize + 1];
    for c in coeffs.iter_mut().skip(2) {
        *c = q(rng.gen_range(-5..=5));
    }
    if coeffs[2].is_zero() {
        coeffs[2] = q(1);
    }
    MultiSeries::from_univariate_coeffs(bound, &coeffs)
}

fn random_rat(rng: &mut ChaCha8Rng) -> Rational {
    qr(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

/// Element with dense random polynomial entries at every weight up to
/// `top`, for exercising the operator algebra.
fn random_element(rng: &mut ChaCha8Rng, system: &GMSystem, top: u32) -> GMElement<Rational> {
    let shape = system.shape();
    let parts: Vec<(u32, HVector<Rational>)> = (0..=top)
        .map(|w| {
            let entries = (0..shape.rank)
                .map(|_| {
                    let mut s = MultiSeries::constant(shape.nvars, shape.degree_bound, random_rat(rng));
                    for v in 0..shape.nvars {
                        let var = MultiSeries::var(shape.nvars, shape.degree_bound, v).unwrap();
                        s = s.add(&var.scale(&random_rat(rng)));
                    }
                    s
                })
                .collect();
            (w, HVector::from_entries(entries))
        })
        .collect();
    system.element_from_components(&parts).unwrap()
}

#[test]
fn every_builtin_family_passes_its_stability_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    for _ in 0..3 {
        let h = random_h(&mut rng, 6);
        let lat = Lattice::special_deformation(3, 6, 7, &h).unwrap();
        for check in lat.stability_checks(lat.default_bound()).unwrap() {
            assert!(check.passed, "special family failed: {}", check.label);
        }
    }

    for r in 2..=4 {
        let lat = Lattice::nilpotent_family(r, 5, 2 * r as u32).unwrap();
        for check in lat.stability_checks(lat.default_bound()).unwrap() {
            assert!(check.passed, "nilpotent family r={r} failed: {}", check.label);
        }
    }

    let h2 = MultiSeries::from_univariate_coeffs(6, &[q(0), q(0), q(2), q(-1), q(3)]);
    let h3 = MultiSeries::from_univariate_coeffs(6, &[q(0), q(0), q(0), q(1), q(4), q(-2)]);
    let lat = Lattice::relative_family(3, 6, 7, &[h2, h3]).unwrap();
    for check in lat.stability_checks(lat.default_bound()).unwrap() {
        assert!(check.passed, "relative family failed: {}", check.label);
    }

    let lat = Lattice::undeformed(3, 5, 5).unwrap();
    for check in lat.stability_checks(lat.default_bound()).unwrap() {
        assert!(check.passed, "undeformed module failed: {}", check.label);
    }
}

#[test]
fn membership_witnesses_expand_back_to_their_element() {
    let h = MultiSeries::from_univariate_coeffs(6, &[q(0), q(0), q(1), q(-2)]);
    let lat = Lattice::special_deformation(3, 6, 9, &h).unwrap();
    let bound = lat.default_bound();
    let s1 = MultiSeries::var(3, 6, 0).unwrap();

    let x = lat
        .generator(0)
        .scale_q(&q(3))
        .add(&lat.generator(1).shift_weight(1).scale_q(&qr(-1, 2)))
        .add(&lat.generator(2).mul_series(&s1))
        .add(&lat.generator(3).shift_weight(2).scale_q(&q(5)));

    match lat.reduce(&x, bound).unwrap() {
        ReduceOutcome::Member(witness) => {
            let support = witness.support();
            assert!(support.contains(&(0, 0)));
            assert!(support.contains(&(1, 1)));
            assert!(support.contains(&(3, 2)));
            assert_eq!(witness.coefficient(0, 0), MultiSeries::constant(3, 6, q(3)));
            assert_eq!(witness.coefficient(2, 0), s1);
            assert!(witness.expand(&lat).agrees_with(&x, bound).unwrap());
        }
        ReduceOutcome::NotMember { .. } => panic!("combination of generators must reduce"),
    }
}

#[test]
fn foreign_vectors_are_rejected_with_a_residual() {
    let h = MultiSeries::from_univariate_coeffs(6, &[q(0), q(0), q(1)]);
    let lat = Lattice::special_deformation(3, 6, 7, &h).unwrap();
    let bound = lat.default_bound();

    // A bare weight-zero basis vector other than the coupled one: no
    // series combination of the generators produces it.
    let x = lat.system().basis::<Rational>(1);
    match lat.reduce(&x, bound).unwrap() {
        ReduceOutcome::Member(_) => panic!("stray basis vector must not reduce"),
        ReduceOutcome::NotMember { residual } => {
            assert!(!residual.is_zero());
            assert!(!residual.component(0).unwrap().entry(1).is_zero());
        }
    }
}

#[test]
fn solver_output_is_independent_of_pivot_order() {
    let lat = Lattice::nilpotent_family(3, 5, 8).unwrap();
    let frame = Frame::from_params(4, &qr(1, 2), &q(-1), &q(2)).unwrap();
    let bound = lat.default_bound();

    let forward = canonical_generators(&lat, &frame, bound, PivotScan::Forward).unwrap();
    let reverse = canonical_generators(&lat, &frame, bound, PivotScan::Reverse).unwrap();
    assert_eq!(forward.len(), reverse.len());
    for (a, b) in forward.iter().zip(&reverse) {
        assert_eq!(a.element(), b.element());
        assert_eq!(a.witness(), b.witness());
        assert_eq!(a.u_terms(), b.u_terms());
        assert!(verify_residual(&lat, &frame, a).unwrap());
    }
}

#[test]
fn canonical_solutions_regenerate_every_family() {
    let h2 = MultiSeries::from_univariate_coeffs(5, &[q(0), q(0), q(1), q(2)]);
    let h3 = MultiSeries::from_univariate_coeffs(5, &[q(0), q(0), q(0), q(-1), q(1)]);
    let families = vec![
        Lattice::nilpotent_family(3, 5, 8).unwrap(),
        Lattice::relative_family(3, 5, 7, &[h2, h3]).unwrap(),
        Lattice::undeformed(3, 5, 6).unwrap(),
    ];
    let frame = Frame::from_params(4, &q(1), &qr(1, 3), &q(-2)).unwrap();

    for lat in &families {
        let bound = lat.default_bound();
        let solutions = canonical_generators(lat, &frame, bound, PivotScan::Forward).unwrap();
        for sol in &solutions {
            assert!(verify_residual(lat, &frame, sol).unwrap());
        }
        assert!(generation_check(lat, &solutions, bound).unwrap());
    }
}

#[test]
fn origin_flag_is_opposite_to_admissible_frames() {
    let h = MultiSeries::from_univariate_coeffs(6, &[q(0), q(0), q(3), q(1)]);
    let lat = Lattice::special_deformation(3, 6, 7, &h).unwrap();
    let flag = lat.hodge_flag_at_origin();

    assert!(is_opposite(&Frame::identity(4), &flag).is_ok());
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..3 {
        let frame = Frame::from_params(
            4,
            &random_rat(&mut rng),
            &random_rat(&mut rng),
            &random_rat(&mut rng),
        )
        .unwrap();
        assert!(is_opposite(&frame, &flag).is_ok());
    }

    // Collapsing one flag level breaks complementarity exactly there.
    let mut broken = flag.clone();
    broken[1][1] = broken[1][0].clone();
    assert_eq!(
        is_opposite(&Frame::identity(4), &broken),
        Err(OppositeError::NotOpposite { level: 1 })
    );
}

#[test]
fn model_operator_commutators_hold() {
    let shape = Shape {
        rank: 4,
        nvars: 2,
        degree_bound: 4,
        weight_cap: 9,
    };
    let systems = [
        GMSystem::with_zero_structure(shape),
        GMSystem::with_shift_structure(shape),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(37);

    for system in &systems {
        let x = random_element(&mut rng, system, 3);

        // [t, D^-j] = j D^-(j+1), checked through the weights both
        // sides still cover.
        for j in 1..=3u32 {
            let lhs = system
                .t_action(&x.shift_weight(j))
                .sub(&system.t_action(&x).shift_weight(j));
            let rhs = x.shift_weight(j + 1).scale_q(&q(j as i64));
            let through = lhs.valid_through().min(rhs.valid_through());
            assert!(lhs.agrees_with(&rhs, through).unwrap());
        }

        // D is a left inverse of D^-1.
        let back = system.derivation(&system.inv_derivation(&x)).unwrap();
        assert!(back.agrees_with(&x, back.valid_through()).unwrap());

        // Parameter derivatives commute with t and with D^-1.
        for var in 0..shape.nvars {
            let a = system.var_derivation(&system.t_action(&x), var);
            let b = system.t_action(&system.var_derivation(&x, var));
            assert!(a.agrees_with(&b, a.valid_through().min(b.valid_through())).unwrap());

            let c = system.var_derivation(&system.inv_derivation(&x), var);
            let d = system.inv_derivation(&system.var_derivation(&x, var));
            assert!(c.agrees_with(&d, c.valid_through().min(d.valid_through())).unwrap());
        }

        // [D, t] = 1 on elements with no weight-zero part.
        let y = x.shift_weight(1);
        let lhs = system
            .derivation(&system.t_action(&y))
            .unwrap()
            .sub(&system.t_action(&system.derivation(&y).unwrap()));
        let through = lhs.valid_through().min(y.valid_through());
        assert!(lhs.agrees_with(&y, through).unwrap());
    }
}

#[test]
fn weight_contraction_annihilates_pure_components() {
    let shape = Shape {
        rank: 4,
        nvars: 2,
        degree_bound: 3,
        weight_cap: 8,
    };
    let system = GMSystem::with_shift_structure(shape);
    let mut rng = ChaCha8Rng::seed_from_u64(41);

    for w in 1..=3u32 {
        let pure = random_element(&mut rng, &system, 0).shift_weight(w);
        let mut cur = pure;
        for _ in 0..shape.rank {
            // (D t - (w + 1)) preserves the weight and applies the
            // structure matrix, so rank-many passes reach zero.
            cur = system
                .derivation(&system.t_action(&cur))
                .unwrap()
                .sub(&cur.scale_q(&q(w as i64 + 1)));
        }
        assert!(cur.is_zero());
    }
}

#[test]
fn twist_factors_differentiate_to_their_generators() {
    let shape = Shape {
        rank: 4,
        nvars: 3,
        degree_bound: 4,
        weight_cap: 9,
    };
    let system = GMSystem::with_shift_structure(shape);
    let n = RatMat::shift(shape.rank);

    for j in 0..shape.rank {
        let x = system.basis::<Rational>(j).shift_weight(j as u32);
        let twisted = system.nilpotent_twist(&x);
        for i in 1..=shape.nvars {
            // The factors commute, so d/ds_i of the twist is the
            // twist followed by D^-(i-1) n^i.
            let lhs = system.var_derivation(&twisted, i - 1);
            let rhs = twisted
                .apply_matrix(&n.pow(i as u32))
                .shift_weight(i as u32 - 1);
            let through = lhs.valid_through().min(rhs.valid_through());
            assert!(lhs.agrees_with(&rhs, through).unwrap());
        }
    }
}

#[test]
fn orbit_projection_commutes_with_the_group_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for _ in 0..10 {
        let h = random_h(&mut rng, 8);
        let params = GammaParams::new(
            random_rat(&mut rng),
            random_rat(&mut rng),
            random_rat(&mut rng),
        );
        let acted = act_on_h(&params, &h).unwrap();
        let via_function = project_orbit(&acted, 5).unwrap();
        let via_orbit = act_on_orbit(&params, &project_orbit(&h, 5).unwrap()).unwrap();
        assert_eq!(via_function, via_orbit);
    }
}

#[test]
fn pipeline_and_closed_form_actions_agree_on_random_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for _ in 0..3 {
        let h = random_h(&mut rng, 6);
        let frame = Frame::from_params(
            4,
            &random_rat(&mut rng),
            &random_rat(&mut rng),
            &random_rat(&mut rng),
        )
        .unwrap();
        let via_solver = act_via_canonical(&h, &frame, 3, 8).unwrap();
        let via_formula = act_on_h(&GammaParams::from_frame(&frame), &h).unwrap();
        assert_eq!(via_solver, via_formula);
    }
}
