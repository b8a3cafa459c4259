//! Acceptance suite: one test per acceptance criterion, exact arithmetic
//! throughout. Each test is the single pass/fail line for its criterion.

use std::str::FromStr;

use ahs_core::families::{
    constant_curvature_triple, meusers_predictions, meusers_spencer_dim, meusers_triple,
    random_invertible, random_triple, MeusersParams,
};
use ahs_core::filtration::{
    direct_equations_hold, gl_ambient, joint_stabilizer_filtration, q_congruent_mod,
    stabilizer_filtration,
};
use ahs_core::kstructures::{model_su, verify_su_structure, KAlgebra};
use ahs_core::skew::{assemble_g, jacobiator, triple_from_lie_pair, SkewElement};
use ahs_core::spencer::{
    b_squared_holds, build_comodule, spencer_cohomology, verify_contact, verify_contact_defn,
};
use ahs_core::tensor::star_action;
use ahs_core::{Matrix, Rat, Subspace, Tensor, Triple};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn meusers_fixture(m: usize) -> Triple {
    let (t, _) = meusers_triple(&MeusersParams::generic(m).unwrap()).unwrap();
    t
}

/// All member fixtures: the tridiagonal family for m = 5..8 and constant
/// curvature for n = 2..4.
fn member_fixtures() -> Vec<(String, Triple)> {
    let mut out = Vec::new();
    for m in 5..=8usize {
        out.push((format!("meusers_m{m}"), meusers_fixture(m)));
    }
    for n in 2..=4usize {
        out.push((
            format!("constant_curvature_n{n}"),
            constant_curvature_triple(n, &Rat::from_int(1)).unwrap(),
        ));
    }
    out
}

/// Perturb one curvature entry (and its antisymmetric partner) of a triple.
fn perturb_curvature(t: &Triple) -> Triple {
    let mut r = t.curvature().clone();
    let mut v01 = r.value_slice(&[0, 1]).to_vec();
    let mut v10 = r.value_slice(&[1, 0]).to_vec();
    v01[0] += &Rat::from_int(1);
    v10[0] -= &Rat::from_int(1);
    r.set_value(&[0, 1], &v01);
    r.set_value(&[1, 0], &v10);
    Triple::new(t.connection().clone(), r, t.torsion().clone()).unwrap()
}

fn so_ambient(n: usize) -> Subspace {
    KAlgebra::so(&Matrix::identity(n)).unwrap().subspace
}

#[test]
fn criterion_01_tridiagonal_filtration_closed_form() {
    for m in 5..=8usize {
        let started = std::time::Instant::now();
        let params = MeusersParams::generic(m).unwrap();
        let t = meusers_fixture(m);
        let pred = meusers_predictions(&params).unwrap();
        let filt = stabilizer_filtration(&t, &so_ambient(m));
        assert_eq!(filt.singer, (m as i64) - 4, "m = {m}");
        assert_eq!(filt.steps, pred.steps, "m = {m}");
        assert!(
            started.elapsed().as_secs() < 5,
            "m = {m} exceeded 5 s: {:?}",
            started.elapsed()
        );
    }
}

#[test]
fn criterion_02_tridiagonal_spencer_dimensions() {
    for m in 5..=8usize {
        let started = std::time::Instant::now();
        let t = meusers_fixture(m);
        let filt = stabilizer_filtration(&t, &so_ambient(m));
        let com = build_comodule(&t, &filt).unwrap();
        let table = spencer_cohomology(&com, 3);
        for r in 1..=m - 4 {
            assert_eq!(table.dim(r, 1), 1, "m = {m}, r = {r}");
            for k in 1..=3 {
                assert_eq!(
                    table.dim(r, k),
                    meusers_spencer_dim(m, k),
                    "m = {m}, r = {r}, k = {k}"
                );
            }
        }
        if m == 8 {
            assert!(
                started.elapsed().as_secs() < 10,
                "m = 8 exceeded 10 s: {:?}",
                started.elapsed()
            );
        }
    }
}

#[test]
fn criterion_03_ricci_closed_form_and_genericity() {
    let params = MeusersParams::new(
        5,
        ["1", "0", "1", "1", "1"]
            .iter()
            .map(|s| Rat::from_str(s).unwrap())
            .collect(),
    )
    .unwrap();
    let (t, _) = meusers_triple(&params).unwrap();
    let ric = t.ricci();
    assert_eq!(ric, meusers_predictions(&params).unwrap().ricci);
    // frozen entrywise value: (−tr F₊²) ⊕ −([F₊,F₋] + tr(F₊) F₊); the
    // nonzero 2×2 block has eigenvalues −½ ± ½√5, the rest are −1 and 0
    let expected = Matrix::from_rows(
        [
            ["-1", "0", "0", "0", "0"],
            ["0", "-1", "1", "0", "0"],
            ["0", "1", "0", "0", "0"],
            ["0", "0", "0", "0", "0"],
            ["0", "0", "0", "0", "0"],
        ]
        .iter()
        .map(|row| row.iter().map(|s| Rat::from_str(s).unwrap()).collect())
        .collect(),
    );
    assert_eq!(ric, expected);
    assert_eq!(ric.distinct_eigenvalue_count().unwrap(), 4);
}

#[test]
fn criterion_04_membership_fixtures_perturbations_and_direct_equations() {
    for (name, t) in member_fixtures() {
        let n = t.dim();
        let ambient = gl_ambient(n);
        let rep = ahs_core::filtration::membership(&t, &ambient);
        assert!(rep.verdict, "{name} must be a member");
        // bounded level: past the stationary index the direct equations
        // are consequences of the earlier ones
        let r_max = rep.filtration.steps.len() + 1;
        assert_eq!(
            q_congruent_mod(&t, rep.filtration.h_infinity()),
            direct_equations_hold(&t, r_max),
            "{name}"
        );

        let bad = perturb_curvature(&t);
        let bad_rep = ahs_core::filtration::membership(&bad, &ambient);
        assert!(!bad_rep.verdict, "perturbed {name} must not be a member");
        let bad_r_max = bad_rep.filtration.steps.len() + 1;
        assert_eq!(
            q_congruent_mod(&bad, bad_rep.filtration.h_infinity()),
            direct_equations_hold(&bad, bad_r_max),
            "perturbed {name}"
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    for n in 2..=3usize {
        let ambient = gl_ambient(n);
        for _ in 0..50 {
            let t = random_triple(n, &mut rng);
            let filt = stabilizer_filtration(&t, &ambient);
            assert_eq!(
                q_congruent_mod(&t, filt.h_infinity()),
                direct_equations_hold(&t, n * n),
                "random n = {n}"
            );
        }
    }
}

#[test]
fn criterion_05_recursive_equals_joint_filtration() {
    let check = |t: &Triple, ambient: &Subspace, label: &str| {
        let rec = stabilizer_filtration(t, ambient);
        let joint = joint_stabilizer_filtration(t, ambient, rec.steps.len() + 1);
        assert_eq!(rec.steps, joint.steps, "{label}");
        assert_eq!(rec.singer, joint.singer, "{label}");
    };
    for m in 5..=8usize {
        check(&meusers_fixture(m), &so_ambient(m), &format!("meusers m={m}"));
    }
    for n in 2..=4usize {
        let t = constant_curvature_triple(n, &Rat::from_int(1)).unwrap();
        check(&t, &gl_ambient(n), &format!("constant curvature n={n}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    for n in 2..=3usize {
        for i in 0..50 {
            let t = random_triple(n, &mut rng);
            check(&t, &gl_ambient(n), &format!("random n={n} #{i}"));
        }
    }
}

fn rand_vec(n: usize, rng: &mut impl Rng) -> Vec<Rat> {
    (0..n).map(|_| Rat::from_int(rng.gen_range(-2..=2))).collect()
}

fn rand_endo(n: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(n, n, |_, _| Rat::from_int(rng.gen_range(-2..=2)))
}

fn contract2(t: &Tensor, u: &[Rat], v: &[Rat]) -> Vec<Rat> {
    let size = t.value_slice(&[0, 0]).len();
    let mut out = vec![Rat::zero(); size];
    for (a, ua) in u.iter().enumerate() {
        for (b, vb) in v.iter().enumerate() {
            let c = ua * vb;
            for (o, e) in out.iter_mut().zip(t.value_slice(&[a, b])) {
                *o += &c * e;
            }
        }
    }
    out
}

fn contract3(t: &Tensor, x: &[Rat], y: &[Rat], z: &[Rat]) -> Vec<Rat> {
    let size = t.value_slice(&[0, 0, 0]).len();
    let mut out = vec![Rat::zero(); size];
    for (a, xa) in x.iter().enumerate() {
        for (b, yb) in y.iter().enumerate() {
            for (c, zc) in z.iter().enumerate() {
                let w = &(xa * yb) * zc;
                for (o, e) in out.iter_mut().zip(t.value_slice(&[a, b, c])) {
                    *o += &w * e;
                }
            }
        }
    }
    out
}

#[test]
fn criterion_06_jacobiator_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(601);
    let mut count = 0usize;
    while count < 100 {
        for n in 2..=4usize {
            let t = random_triple(n, &mut rng);
            let xe = rand_endo(n, &mut rng);
            let (x, y, z) = (
                rand_vec(n, &mut rng),
                rand_vec(n, &mut rng),
                rand_vec(n, &mut rng),
            );

            // first displayed form: Jac(𝔛⊕0, 0⊕y, 0⊕z) = (𝔛★R)_{y,z} ⊕ (𝔛★T)(y,z)
            let a = SkewElement::new(xe.clone(), vec![Rat::zero(); n]);
            let b = SkewElement::new(Matrix::zeros(n, n), y.clone());
            let c = SkewElement::new(Matrix::zeros(n, n), z.clone());
            let jac = jacobiator(&t, &a, &b, &c);
            let sr = star_action(&xe, t.curvature());
            let st = star_action(&xe, t.torsion());
            assert_eq!(jac.endo.flatten(), contract2(&sr, &y, &z), "endo form, n = {n}");
            assert_eq!(jac.vec, contract2(&st, &y, &z), "vector form, n = {n}");

            // second displayed form: Jac(0⊕x, 0⊕y, 0⊕z) =
            //   (dR)(x,y,z) ⊕ ((dT − R∧id)(x,y,z)) with zero connection
            let ax = SkewElement::new(Matrix::zeros(n, n), x.clone());
            let jac = jacobiator(&t, &ax, &b, &c);
            let flat = Triple::new(
                Tensor::zeros(n, 1, ahs_core::ValueKind::Endo, vec![]),
                t.curvature().clone(),
                t.torsion().clone(),
            )
            .unwrap();
            let dr = flat.twisted_d(t.curvature()).unwrap();
            let dt = flat.twisted_d(t.torsion()).unwrap();
            let rw = t.r_wedge_id();
            assert_eq!(jac.endo.flatten(), contract3(&dr, &x, &y, &z), "dR form, n = {n}");
            let want: Vec<Rat> = contract3(&dt, &x, &y, &z)
                .into_iter()
                .zip(contract3(&rw, &x, &y, &z))
                .map(|(p, q)| &p - &q)
                .collect();
            assert_eq!(jac.vec, want, "dT − R∧id form, n = {n}");
            count += 1;
        }
    }
}

#[test]
fn criterion_07_skew_algebra_assembly_round_trip() {
    for (name, t) in member_fixtures() {
        let filt = stabilizer_filtration(&t, &gl_ambient(t.dim()));
        let pair = assemble_g(filt.h_infinity(), &t).unwrap();
        pair.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        let back = triple_from_lie_pair(&pair).unwrap();
        assert_eq!(back.connection(), t.connection(), "{name}");
        assert_eq!(back.curvature(), t.curvature(), "{name}");
        assert_eq!(back.torsion(), t.torsion(), "{name}");
    }
}

#[test]
fn criterion_08_scaling_cone_invariance() {
    let scales = [Rat::from_int(2), Rat::from_int(3), Rat::frac(1, 2)];
    for (name, t) in member_fixtures() {
        let n = t.dim();
        let ambient = if name.starts_with("meusers") {
            so_ambient(n)
        } else {
            gl_ambient(n)
        };
        let base_rep = ahs_core::filtration::membership(&t, &ambient);
        let base_filt = &base_rep.filtration;
        let base_com = build_comodule(&t, base_filt).unwrap();
        let base_table = spencer_cohomology(&base_com, 3);
        for c in &scales {
            let s = t.rescale(c).unwrap();
            let rep = ahs_core::filtration::membership(&s, &ambient);
            assert_eq!(rep.verdict, base_rep.verdict, "{name}, c = {c}");
            assert_eq!(rep.filtration.steps, base_filt.steps, "{name}, c = {c}");
            assert_eq!(rep.filtration.singer, base_filt.singer, "{name}, c = {c}");
            let com = build_comodule(&s, &rep.filtration).unwrap();
            let table = spencer_cohomology(&com, 3);
            assert_eq!(table.dims, base_table.dims, "{name}, c = {c}");
        }
    }
}

#[test]
fn criterion_09_comodule_soundness() {
    for (name, t) in member_fixtures() {
        let filt = stabilizer_filtration(&t, &gl_ambient(t.dim()));
        // build_comodule verifies commutation of directional derivatives
        let com = build_comodule(&t, &filt).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(b_squared_holds(&com), "{name}: B² ≠ 0");
        let table = spencer_cohomology(&com, 0);
        for r in 1..com.pieces.len() {
            assert_eq!(table.dim(r, 0), 0, "{name}: H^{{{r},0}} ≠ 0");
        }
    }
}

#[test]
fn criterion_10_contact_criterion_equals_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut checked = 0usize;
    while checked < 50 {
        for n in 2..=3usize {
            let t2 = random_triple(n, &mut rng);
            let f = random_invertible(n, &mut rng);
            let d = rng.gen_range(0..=4usize);
            // t1 is the pullback of t2, so the pair is in contact to all
            // orders; every other instance perturbs t2 afterwards
            let t1 = t2.pullback(&f).unwrap();
            let t2 = if checked.is_multiple_of(2) {
                t2
            } else {
                perturb_curvature(&t2)
            };
            let lemma = verify_contact(&t1, &t2, &f, d).unwrap();
            let defn = verify_contact_defn(&t1, &t2, &f, d).unwrap();
            assert_eq!(lemma.holds_at_requested, defn, "n = {n}, d = {d}");
            checked += 1;
        }
    }

    // past the Singer invariant, contact forces contact to all orders
    for m in 5..=6usize {
        let t = meusers_fixture(m);
        let filt = stabilizer_filtration(&t, &gl_ambient(m));
        let id = Matrix::identity(m);
        let d = (filt.singer.max(0) as usize) + 1;
        // identical triples: contact at every order
        let rep = verify_contact(&t, &t, &id, d).unwrap();
        assert!(rep.holds_at_requested && rep.all_orders, "m = {m}");
        // perturbations along each chain step: whenever contact holds past
        // the Singer invariant the report must say all orders
        for step in &filt.steps {
            let Some(row) = step.basis_rows().next() else {
                continue;
            };
            let mut a2 = t.connection().clone();
            let mut val = a2.value_slice(&[0]).to_vec();
            for (o, e) in val.iter_mut().zip(row) {
                *o += e;
            }
            a2.set_value(&[0], &val);
            let t2 =
                Triple::new(a2, t.curvature().clone(), t.torsion().clone()).unwrap();
            let rep = verify_contact(&t, &t2, &id, d).unwrap();
            assert!(!rep.holds_at_requested || rep.all_orders, "m = {m}");
            assert_eq!(
                rep.holds_at_requested,
                verify_contact_defn(&t, &t2, &id, d.min(4)).unwrap() && d <= 4,
                "m = {m}"
            );
        }
    }
}

#[test]
fn criterion_11_su_models() {
    let expected_norms = [Rat::from_int(1), Rat::from_int(2), Rat::from_int(4)];
    for n in 1..=3usize {
        let s = model_su(n);
        let rep = verify_su_structure(&s, n).unwrap();
        assert!(rep.complex_square, "n = {n}: I² ≠ −id");
        assert!(rep.metric_compatible, "n = {n}: g(I·,I·) ≠ g");
        assert!(rep.derivation_eigenvalue, "n = {n}: Der_I²ψ ≠ −n²ψ");
        assert!(rep.norm_ok, "n = {n}: ‖ψ‖² ≠ 2^{{n−1}}");
        assert_eq!(rep.norm, expected_norms[n - 1], "n = {n}");
        assert!(rep.verdict, "n = {n}");
    }
}
