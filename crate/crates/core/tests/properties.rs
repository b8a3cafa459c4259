//! Property tests for structural invariants: canonical forms, equivariance
//! under pullback, homogeneity under rescaling, and serialization fidelity.

use ahs_core::families::{random_invertible, random_triple};
use ahs_core::io::TripleDoc;
use ahs_core::tensor::pullback_tensor;
use ahs_core::{wedge_to_endo, Matrix, Rat, Subspace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_matrix(n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(n, n, |_, _| {
        Rat::from_int(rand::Rng::gen_range(&mut rng, -3..=3))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rref_is_idempotent(seed in any::<u64>(), n in 2usize..5) {
        let m = small_matrix(n, seed);
        let (r, _) = m.rref();
        let (rr, _) = r.rref();
        prop_assert_eq!(r, rr);
    }

    #[test]
    fn subspace_sum_and_intersection_dimensions(seed in any::<u64>(), n in 2usize..5) {
        let a = Subspace::from_rows(n, small_matrix(n, seed).row_vecs());
        let b = Subspace::from_rows(n, small_matrix(n, seed.wrapping_add(1)).row_vecs());
        let sum = a.sum(&b).unwrap();
        let int = a.intersect(&b).unwrap();
        prop_assert_eq!(sum.dim() + int.dim(), a.dim() + b.dim());
        prop_assert!(int.is_subspace_of(&a) && int.is_subspace_of(&b));
        prop_assert!(a.is_subspace_of(&sum) && b.is_subspace_of(&sum));
    }

    #[test]
    fn wedge_endomorphisms_are_metric_skew(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Rat> = (0..n).map(|_| Rat::from_int(rand::Rng::gen_range(&mut rng, -3..=3))).collect();
        let y: Vec<Rat> = (0..n).map(|_| Rat::from_int(rand::Rng::gen_range(&mut rng, -3..=3))).collect();
        let g = Matrix::identity(n);
        let w = wedge_to_endo(&x, &y, &g).unwrap();
        // g(Wu, v) = −g(u, Wv) for the standard metric means Wᵀ = −W
        prop_assert_eq!(w.transpose(), w.scale(&Rat::from_int(-1)));
        let neg = wedge_to_endo(&y, &x, &g).unwrap();
        prop_assert_eq!(w.scale(&Rat::from_int(-1)), neg);
    }

    #[test]
    fn rescaling_is_quadratic_on_approximate_curvature(seed in any::<u64>(), n in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triple(n, &mut rng);
        let c = Rat::frac(3, 2);
        let s = t.rescale(&c).unwrap();
        let q = t.approximate_curvature();
        let qs = s.approximate_curvature();
        prop_assert_eq!(qs, q.scale(&(&c * &c)));
    }

    #[test]
    fn bianchi_residuals_are_pullback_equivariant(seed in any::<u64>(), n in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triple(n, &mut rng);
        let f = random_invertible(n, &mut rng);
        let f_inv = f.inverse().unwrap();
        let pulled = t.pullback(&f).unwrap();
        let (b1, b2) = t.bianchi_residuals();
        let (p1, p2) = pulled.bianchi_residuals();
        prop_assert_eq!(p1, pullback_tensor(&f, &f_inv, &b1));
        prop_assert_eq!(p2, pullback_tensor(&f, &f_inv, &b2));
    }

    #[test]
    fn covariant_derivatives_keep_declared_antisymmetry(seed in any::<u64>(), n in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triple(n, &mut rng);
        for which in [ahs_core::Component::Curvature, ahs_core::Component::Torsion] {
            let d = t.nabla(which, 2);
            prop_assert!(d.check_alternating().is_ok());
        }
    }

    #[test]
    fn triple_documents_round_trip(seed in any::<u64>(), n in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triple(n, &mut rng);
        let doc = TripleDoc::from_triple(&t);
        let text = serde_json::to_string(&doc).unwrap();
        let back: TripleDoc = serde_json::from_str(&text).unwrap();
        let t2 = back.to_triple().unwrap();
        prop_assert_eq!(t.connection(), t2.connection());
        prop_assert_eq!(t.curvature(), t2.curvature());
        prop_assert_eq!(t.torsion(), t2.torsion());
    }
}
