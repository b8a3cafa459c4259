//! Cross-checks of independent code paths against each other and against
//! frozen closed-form values for the tridiagonal family.

use ahs_core::families::{
    constant_curvature_triple, meusers_predictions, meusers_spencer_dim, meusers_triple,
    random_invertible, random_triple, MeusersParams,
};
use ahs_core::filtration::{
    direct_equations_hold, gl_ambient, joint_stabilizer_filtration, membership, q_congruent_mod,
    stabilizer_filtration,
};
use ahs_core::kstructures::KAlgebra;
use ahs_core::skew::{jacobiator, jacobiator_closed_form, SkewElement};
use ahs_core::spencer::{
    b_squared_holds, build_comodule, spencer_cohomology, verify_contact, verify_contact_defn,
};
use ahs_core::{Matrix, Rat};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_skew_element(n: usize, rng: &mut impl Rng) -> SkewElement {
    let endo = Matrix::from_fn(n, n, |_, _| Rat::from_int(rng.gen_range(-2..=2)));
    let vec = (0..n)
        .map(|_| Rat::from_int(rng.gen_range(-2..=2)))
        .collect();
    SkewElement::new(endo, vec)
}

#[test]
fn jacobiator_agrees_with_closed_form_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=4usize {
        for _ in 0..8 {
            let t = random_triple(n, &mut rng);
            let a = random_skew_element(n, &mut rng);
            let b = random_skew_element(n, &mut rng);
            let c = random_skew_element(n, &mut rng);
            let direct = jacobiator(&t, &a, &b, &c);
            let closed = jacobiator_closed_form(&t, &a, &b, &c).unwrap();
            assert_eq!(direct, closed, "n = {n}");
        }
    }
}

#[test]
fn jacobiator_vanishes_on_assembled_subalgebra() {
    // on a member triple, elements of 𝔥_∞ ⊕ 0 together with A_x ⊕ x span a
    // Lie subalgebra, so the Jacobiator vanishes on it
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let t = constant_curvature_triple(3, &Rat::from_int(1)).unwrap();
    let filt = stabilizer_filtration(&t, &gl_ambient(3));
    let h = filt.h_infinity();
    let draw = |rng: &mut ChaCha8Rng| {
        let mut endo = vec![Rat::zero(); 9];
        for row in h.basis_rows() {
            let c = Rat::from_int(rng.gen_range(-2..=2));
            for (o, e) in endo.iter_mut().zip(row) {
                *o += &c * e;
            }
        }
        let mut endo = Matrix::from_flat(3, &endo);
        let mut vec = vec![Rat::zero(); 3];
        for (j, slot) in vec.iter_mut().enumerate() {
            let c = Rat::from_int(rng.gen_range(-2..=2));
            endo = endo + t.a_mat(j).scale(&c);
            *slot += &c;
        }
        SkewElement::new(endo, vec)
    };
    for _ in 0..10 {
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let c = draw(&mut rng);
        assert!(jacobiator(&t, &a, &b, &c).is_zero());
    }
}

#[test]
fn torsion_free_projection_kills_torsion_and_fixes_torsion_free_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..6 {
        let t = random_triple(3, &mut rng);
        let p = t.torsion_free_projection();
        assert!(p.torsion().is_zero());
        // projecting twice is the same as projecting once
        let q = p.torsion_free_projection();
        assert_eq!(p.connection(), q.connection());
        assert_eq!(p.curvature(), q.curvature());
    }
    let (meusers, _) = meusers_triple(&MeusersParams::generic(5).unwrap()).unwrap();
    let fixed = meusers.torsion_free_projection();
    assert_eq!(fixed.connection(), meusers.connection());
    assert_eq!(fixed.curvature(), meusers.curvature());
}

#[test]
fn pullback_preserves_filtration_shape_and_membership_verdict() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for n in 2..=3usize {
        for _ in 0..4 {
            let t = random_triple(n, &mut rng);
            let f = random_invertible(n, &mut rng);
            let pulled = t.pullback(&f).unwrap();
            let ambient = gl_ambient(n);
            let ft = stabilizer_filtration(&t, &ambient);
            let fp = stabilizer_filtration(&pulled, &ambient);
            assert_eq!(ft.dims(), fp.dims());
            assert_eq!(ft.singer, fp.singer);
            assert_eq!(
                membership(&t, &ambient).verdict,
                membership(&pulled, &ambient).verdict
            );
        }
    }
}

#[test]
fn rescaling_preserves_filtration_and_membership() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let scales = [Rat::from_int(2), Rat::from_int(3), Rat::frac(1, 2)];
    for n in 2..=3usize {
        for _ in 0..3 {
            let t = random_triple(n, &mut rng);
            let ambient = gl_ambient(n);
            let base = stabilizer_filtration(&t, &ambient);
            let base_member = membership(&t, &ambient).verdict;
            for c in &scales {
                let s = t.rescale(c).unwrap();
                let fs = stabilizer_filtration(&s, &ambient);
                assert_eq!(base.steps, fs.steps);
                assert_eq!(base.singer, fs.singer);
                assert_eq!(base_member, membership(&s, &ambient).verdict);
            }
        }
    }
}

#[test]
fn direct_equations_match_congruence_criterion() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for n in 2..=3usize {
        for _ in 0..6 {
            let t = random_triple(n, &mut rng);
            let rep = membership(&t, &gl_ambient(n));
            let congruence = q_congruent_mod(&t, rep.filtration.h_infinity());
            assert_eq!(congruence, direct_equations_hold(&t, n * n));
        }
    }
}

#[test]
fn recursive_and_joint_filtrations_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let cc = constant_curvature_triple(3, &Rat::frac(1, 2)).unwrap();
    let (meusers, _) = meusers_triple(&MeusersParams::generic(5).unwrap()).unwrap();
    let mut cases = vec![cc, meusers];
    for _ in 0..3 {
        cases.push(random_triple(3, &mut rng));
    }
    for t in &cases {
        let n = t.dim();
        let ambient = gl_ambient(n);
        let rec = stabilizer_filtration(t, &ambient);
        let joint = joint_stabilizer_filtration(t, &ambient, rec.steps.len() + 1);
        assert_eq!(rec.steps, joint.steps);
        assert_eq!(rec.singer, joint.singer);
    }
}

#[test]
fn tridiagonal_family_filtration_matches_predicted_chain() {
    for m in [5usize, 6] {
        let params = MeusersParams::generic(m).unwrap();
        let (t, _) = meusers_triple(&params).unwrap();
        let pred = meusers_predictions(&params).unwrap();
        let so = KAlgebra::so(&Matrix::identity(m)).unwrap();
        let filt = stabilizer_filtration(&t, &so.subspace);
        assert_eq!(filt.singer, pred.singer, "m = {m}");
        assert_eq!(filt.steps.len(), pred.steps.len(), "m = {m}");
        for (r, (got, want)) in filt.steps.iter().zip(&pred.steps).enumerate() {
            assert_eq!(got, want, "m = {m}, step {r}");
        }
    }
}

#[test]
fn tridiagonal_family_ricci_matches_closed_form() {
    for m in [5usize, 6] {
        let params = MeusersParams::generic(m).unwrap();
        let (t, _) = meusers_triple(&params).unwrap();
        let pred = meusers_predictions(&params).unwrap();
        let ric = t.ricci();
        assert_eq!(ric, pred.ricci, "m = {m}");
        assert_eq!(
            ric.distinct_eigenvalue_count().unwrap(),
            pred.ricci_distinct_eigenvalues,
            "m = {m}"
        );
    }
}

#[test]
fn tridiagonal_family_spencer_dimensions() {
    let m = 5usize;
    let params = MeusersParams::generic(m).unwrap();
    let (t, _) = meusers_triple(&params).unwrap();
    let so = KAlgebra::so(&Matrix::identity(m)).unwrap();
    let filt = stabilizer_filtration(&t, &so.subspace);
    let com = build_comodule(&t, &filt).unwrap();
    assert!(b_squared_holds(&com));
    let table = spencer_cohomology(&com, 3);
    for r in 1..=m - 4 {
        for k in 1..=3 {
            assert_eq!(
                table.dim(r, k),
                meusers_spencer_dim(m, k),
                "m = {m}, r = {r}, k = {k}"
            );
        }
    }
}

#[test]
fn contact_criterion_agrees_with_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let base = constant_curvature_triple(3, &Rat::from_int(1)).unwrap();
    let ambient = gl_ambient(3);
    let filt = stabilizer_filtration(&base, &ambient);
    let h0 = filt.h(0).clone();
    for d in 0..=3usize {
        for _ in 0..4 {
            // perturb the connection by a one-form valued in 𝔥_0 or by a
            // generic one-form, and compare the two contact checks
            let in_h0 = rng.gen_bool(0.5);
            let mut a2 = base.connection().clone();
            for a in 0..3 {
                let delta = if in_h0 {
                    let coeffs: Vec<Rat> = (0..h0.dim())
                        .map(|_| Rat::from_int(rng.gen_range(-2..=2)))
                        .collect();
                    let mut v = vec![Rat::zero(); 9];
                    for (c, row) in coeffs.iter().zip(h0.basis_rows()) {
                        for (o, e) in v.iter_mut().zip(row) {
                            *o += c * e;
                        }
                    }
                    v
                } else {
                    (0..9).map(|_| Rat::from_int(rng.gen_range(-1..=1))).collect()
                };
                let mut val = a2.value_slice(&[a]).to_vec();
                for (o, e) in val.iter_mut().zip(&delta) {
                    *o += e;
                }
                a2.set_value(&[a], &val);
            }
            let t2 = ahs_core::Triple::new(a2, base.curvature().clone(), base.torsion().clone())
                .unwrap();
            let f = Matrix::identity(3);
            let lemma = verify_contact(&base, &t2, &f, d).unwrap();
            let defn = verify_contact_defn(&base, &t2, &f, d).unwrap();
            assert_eq!(lemma.holds_at_requested, defn, "d = {d}");
        }
    }
}

#[test]
fn contact_to_all_orders_for_stable_perturbation() {
    // perturbing the connection by a one-form valued in 𝔥_∞ gives contact
    // to every order; the filtration check reports all_orders
    let t = constant_curvature_triple(3, &Rat::from_int(1)).unwrap();
    let filt = stabilizer_filtration(&t, &gl_ambient(3));
    let h_inf = filt.h_infinity();
    let mut a2 = t.connection().clone();
    let row = h_inf.basis_rows().next().expect("nonzero stable term");
    let mut val = a2.value_slice(&[0]).to_vec();
    for (o, e) in val.iter_mut().zip(row) {
        *o += e;
    }
    a2.set_value(&[0], &val);
    let t2 = ahs_core::Triple::new(a2, t.curvature().clone(), t.torsion().clone()).unwrap();
    let f = Matrix::identity(3);
    let rep = verify_contact(&t, &t2, &f, 10).unwrap();
    assert!(rep.all_orders);
    for d in 0..=3 {
        assert!(verify_contact_defn(&t, &t2, &f, d).unwrap(), "d = {d}");
    }
}
