//! Regenerates the bundled corpus under `fixtures/`: member triples from
//! the tridiagonal family and constant curvature, negative fixtures, and an
//! SU model. Run from the workspace root:
//!
//! ```text
//! cargo run -p ahs-core --example gen_fixtures
//! ```

use ahs_core::families::{constant_curvature_triple, meusers_triple, random_triple, MeusersParams};
use ahs_core::io::{SuDoc, TripleDoc};
use ahs_core::kstructures::model_su;
use ahs_core::{Rat, Triple};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn write(dir: &std::path::Path, name: &str, t: &Triple) {
    let doc = TripleDoc::from_triple(t);
    let text = serde_json::to_string_pretty(&doc).unwrap() + "\n";
    std::fs::write(dir.join(name), text).unwrap();
}

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

fn main() {
    let dir = std::path::Path::new("fixtures");
    std::fs::create_dir_all(dir).unwrap();
    for m in 5..=8usize {
        let (t, _) = meusers_triple(&MeusersParams::generic(m).unwrap()).unwrap();
        write(dir, &format!("meusers_m{m}.json"), &t);
        if m == 5 {
            write(dir, "nonmember_perturbed_m5.json", &perturb_curvature(&t));
        }
    }
    for n in 2..=4usize {
        let t = constant_curvature_triple(n, &Rat::from_int(1)).unwrap();
        write(dir, &format!("constant_curvature_n{n}.json"), &t);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let t = random_triple(3, &mut rng);
    let verdict = ahs_core::filtration::membership(&t, &ahs_core::filtration::gl_ambient(3)).verdict;
    assert!(!verdict, "the seeded random fixture must be a non-member");
    write(dir, "nonmember_random_n3.json", &t);

    let su = SuDoc::from_structure(&model_su(2), 2);
    std::fs::write(
        dir.join("su_model_n2.json"),
        serde_json::to_string_pretty(&su).unwrap() + "\n",
    )
    .unwrap();
    println!("fixtures written to {}", dir.display());
}
