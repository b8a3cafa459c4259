use crate::error::{Error, Result};
use crate::matrix::{wedge_to_endo, Matrix};
use crate::rat::Rat;
use crate::skew::LiePair;
use crate::subspace::Subspace;
use crate::tensor::{Tensor, ValueKind};
use crate::triple::Triple;
use rand::Rng;

/// Parameters of the tridiagonal family on V = Q·𝟙 ⊕ Q^{m−1}: m ≥ 4 and
/// f_1..f_m with f_1 ≠ f_2 and f_3,…,f_m nonzero.
#[derive(Clone, Debug)]
pub struct MeusersParams {
    pub m: usize,
    pub f: Vec<Rat>,
}

impl MeusersParams {
    pub fn new(m: usize, f: Vec<Rat>) -> Result<Self> {
        if m < 4 {
            return Err(Error::BadParams("m must be at least 4".into()));
        }
        if f.len() != m {
            return Err(Error::BadParams(format!(
                "expected {m} parameters, got {}",
                f.len()
            )));
        }
        if f[0] == f[1] {
            return Err(Error::BadParams("f_1 and f_2 must differ".into()));
        }
        if f[2..].iter().any(Rat::is_zero) {
            return Err(Error::BadParams("f_3..f_m must be nonzero".into()));
        }
        Ok(MeusersParams { m, f })
    }

    /// The generic integer choice f = (1, 0, 1, …, 1).
    pub fn generic(m: usize) -> Result<Self> {
        let mut f = vec![Rat::one(); m];
        f[1] = Rat::zero();
        MeusersParams::new(m, f)
    }

    /// The defining tridiagonal operator F on Q^{m−1}: diagonal
    /// (f_1, f_2, …, f_2), subdiagonal +f_3..+f_m, superdiagonal −f_3..−f_m.
    pub fn operator(&self) -> Matrix {
        let n = self.m - 1;
        let mut fm = Matrix::zeros(n, n);
        fm.set(0, 0, self.f[0].clone());
        for k in 1..n {
            fm.set(k, k, self.f[1].clone());
        }
        for k in 0..n - 1 {
            fm.set(k + 1, k, self.f[k + 2].clone());
            fm.set(k, k + 1, -&self.f[k + 2]);
        }
        fm
    }
}

fn basis_vec(n: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); n];
    v[i] = Rat::one();
    v
}

/// Embed a vector of Q^{m−1} into V = Q^m with the distinguished 𝟙 = e_0.
fn embed(m: usize, v: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); m];
    out[1..].clone_from_slice(v);
    out
}

/// Build the family triple and the Lie pair it descends from.
///
/// Writing a vector of V as x ⊕ X with x the 𝟙-component, F_± the
/// symmetric/skew parts of F, and M = F_+² + [F_+, F_-]:
///   A_{x⊕X} = (F_+ X) ∧ 𝟙 + x F_-,
///   R_{x⊕X, y⊕Y} = (F_+X) ∧ (F_+Y) − x (MY) ∧ 𝟙 + y (MX) ∧ 𝟙,   T = 0,
/// with ∧ taken for the standard metric. The Lie algebra behind it is
/// abelian ⊕ Q^{m−1} with [x⊕X, y⊕Y] = 0 ⊕ (xFY − yFX) and trivial
/// isotropy.
pub fn meusers_triple(p: &MeusersParams) -> Result<(Triple, LiePair)> {
    let m = p.m;
    let id = Matrix::identity(m);
    let f = p.operator();
    let half = Rat::frac(1, 2);
    let f_plus = (&f + &f.transpose()).scale(&half);
    let f_minus = (&f - &f.transpose()).scale(&half);
    let big_m = &(&f_plus * &f_plus) + &Matrix::commutator(&f_plus, &f_minus);
    let one_vec = basis_vec(m, 0);

    // connection: A_{e_0} is F_- on the complement, A_{e_k} = (F_+ e_{k-1}) ∧ 𝟙
    let mut a = Tensor::zeros(m, 1, ValueKind::Endo, vec![]);
    let mut f_minus_emb = Matrix::zeros(m, m);
    for i in 0..m - 1 {
        for j in 0..m - 1 {
            f_minus_emb.set(i + 1, j + 1, f_minus.get(i, j).clone());
        }
    }
    a.set_value(&[0], &f_minus_emb.flatten());
    for k in 0..m - 1 {
        let fx = embed(m, &f_plus.column(k));
        let w = wedge_to_endo(&fx, &one_vec, &id)?;
        a.set_value(&[k + 1], &w.flatten());
    }

    // curvature on basis pairs
    let mut r = Tensor::zeros(m, 2, ValueKind::Endo, vec![vec![0, 1]]);
    let comp = |idx: usize| -> (Rat, Vec<Rat>) {
        if idx == 0 {
            (Rat::one(), vec![Rat::zero(); m - 1])
        } else {
            (Rat::zero(), basis_vec(m - 1, idx - 1))
        }
    };
    for ai in 0..m {
        for bi in 0..ai {
            let (x, xv) = comp(ai);
            let (y, yv) = comp(bi);
            let fx = embed(m, &f_plus.mul_vec(&xv));
            let fy = embed(m, &f_plus.mul_vec(&yv));
            let mut w = wedge_to_endo(&fx, &fy, &id)?;
            if !x.is_zero() {
                let my = embed(m, &big_m.mul_vec(&yv));
                w = w - wedge_to_endo(&my, &one_vec, &id)?.scale(&x);
            }
            if !y.is_zero() {
                let mx = embed(m, &big_m.mul_vec(&xv));
                w = w + wedge_to_endo(&mx, &one_vec, &id)?.scale(&y);
            }
            r.set_value(&[ai, bi], &w.flatten());
            r.set_value(&[bi, ai], &(-w).flatten());
        }
    }
    let t = Tensor::zeros(m, 2, ValueKind::Vector, vec![vec![0, 1]]);
    let triple = Triple::new(a, r, t)?;

    // the Lie pair: 𝔤 = V with trivial isotropy, bracket 0 ⊕ (xFY − yFX)
    let mut c = vec![vec![vec![Rat::zero(); m]; m]; m];
    for k in 1..m {
        // [e_0, e_k] = 0 ⊕ F e_{k−1}
        let fe = embed(m, &f.column(k - 1));
        for (j, v) in fe.iter().enumerate() {
            c[0][k][j] = v.clone();
            c[k][0][j] = -v;
        }
    }
    let connection = (0..m)
        .map(|k| {
            let mut v = vec![Rat::zero(); m];
            v[k] = Rat::one();
            triple.a_of(&v)
        })
        .collect();
    let pair = LiePair {
        dim_g: m,
        c,
        h: Subspace::zero(m),
        split: Matrix::identity(m),
        connection,
    };
    Ok((triple, pair))
}

/// Closed-form predictions for the family: stabilizer chain, Singer
/// invariant, positive-degree Spencer dimensions and Ricci spectrum count.
#[derive(Clone, Debug)]
pub struct MeusersPredictions {
    /// 𝔥_r = so{e_{r+4}, …, e_m} for r = 0..=m−4, as explicit subspaces
    pub steps: Vec<Subspace>,
    pub step_dims: Vec<usize>,
    pub singer: i64,
    /// dim H^{r,1} = 1 for r = 1..=m−4
    pub spencer_k1_dims: Vec<usize>,
    /// the Ricci form in closed form
    pub ricci: Matrix,
    pub ricci_distinct_eigenvalues: usize,
}

/// so of the span of the listed standard basis vectors of Q^m (indices are
/// 0-based), inside Q^(m²).
pub fn so_span(m: usize, indices: &[usize]) -> Subspace {
    let id = Matrix::identity(m);
    let mut rows = Vec::new();
    for (pos, &u) in indices.iter().enumerate() {
        for &v in &indices[..pos] {
            rows.push(
                wedge_to_endo(&basis_vec(m, u), &basis_vec(m, v), &id)
                    .expect("standard metric")
                    .flatten(),
            );
        }
    }
    Subspace::from_rows(m * m, rows)
}

pub fn meusers_predictions(p: &MeusersParams) -> Result<MeusersPredictions> {
    let m = p.m;
    let f = p.operator();
    let half = Rat::frac(1, 2);
    let f_plus = (&f + &f.transpose()).scale(&half);
    let f_minus = (&f - &f.transpose()).scale(&half);
    let tr_fp = f_plus.trace();
    let tr_fp2 = (&f_plus * &f_plus).trace();
    // Ric(y ⊕ Y) = −( tr(F_+²) y ⊕ ([F_+,F_-] + tr(F_+) F_+) Y )
    let small = (Matrix::commutator(&f_plus, &f_minus) + f_plus.scale(&tr_fp))
        .scale(&Rat::from_int(-1));
    let mut ricci = Matrix::zeros(m, m);
    ricci.set(0, 0, -tr_fp2);
    for i in 0..m - 1 {
        for j in 0..m - 1 {
            ricci.set(i + 1, j + 1, small.get(i, j).clone());
        }
    }
    let steps: Vec<Subspace> = (0..=m - 4)
        .map(|r| {
            // e_{r+4}..e_m in 1-based labels of V; 𝟙 = e_1, so 0-based
            // indices r+3..m−1
            let idxs: Vec<usize> = (r + 3..m).collect();
            so_span(m, &idxs)
        })
        .collect();
    let step_dims = steps.iter().map(Subspace::dim).collect();
    Ok(MeusersPredictions {
        steps,
        step_dims,
        singer: m as i64 - 4,
        spencer_k1_dims: vec![1; m - 4],
        ricci_distinct_eigenvalues: 4,
        ricci,
    })
}

/// Predicted dim H^{r,k} = C(m−1, k−1) for 1 ≤ r ≤ m−4, k ≥ 1.
pub fn meusers_spencer_dim(m: usize, k: usize) -> usize {
    crate::spencer::binom(m - 1, k - 1)
}

/// Constant-curvature datum: A = 0, T = 0, R_{x,y} = κ (x ∧ y) for the
/// standard metric.
pub fn constant_curvature_triple(n: usize, kappa: &Rat) -> Result<Triple> {
    let id = Matrix::identity(n);
    let mut r = Tensor::zeros(n, 2, ValueKind::Endo, vec![vec![0, 1]]);
    for a in 0..n {
        for b in 0..a {
            let w = wedge_to_endo(&basis_vec(n, a), &basis_vec(n, b), &id)?.scale(kappa);
            r.set_value(&[a, b], &w.flatten());
            r.set_value(&[b, a], &(-w).flatten());
        }
    }
    Triple::new(
        Tensor::zeros(n, 1, ValueKind::Endo, vec![]),
        r,
        Tensor::zeros(n, 2, ValueKind::Vector, vec![vec![0, 1]]),
    )
}

/// Random triple with small integer entries; antisymmetry is enforced by
/// construction, nothing else is. Most samples are not members.
pub fn random_triple(n: usize, rng: &mut impl Rng) -> Triple {
    let mut a = Tensor::zeros(n, 1, ValueKind::Endo, vec![]);
    for ai in 0..n {
        for v in 0..n * n {
            a.set(&[ai], v, Rat::from_int(rng.gen_range(-2..=2i64)));
        }
    }
    let mut r = Tensor::zeros(n, 2, ValueKind::Endo, vec![vec![0, 1]]);
    let mut t = Tensor::zeros(n, 2, ValueKind::Vector, vec![vec![0, 1]]);
    for ai in 0..n {
        for bi in 0..ai {
            for v in 0..n * n {
                let x = Rat::from_int(rng.gen_range(-2..=2i64));
                r.set(&[ai, bi], v, x.clone());
                r.set(&[bi, ai], v, -x);
            }
            for v in 0..n {
                let x = Rat::from_int(rng.gen_range(-2..=2i64));
                t.set(&[ai, bi], v, x.clone());
                t.set(&[bi, ai], v, -x);
            }
        }
    }
    Triple::new(a, r, t).expect("antisymmetric by construction")
}

/// Random invertible matrix with entries in a small box (resamples until
/// invertible; unit determinant is not required).
pub fn random_invertible(n: usize, rng: &mut impl Rng) -> Matrix {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| Rat::from_int(rng.gen_range(-2..=2i64)));
        if m.inverse().is_ok() {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(MeusersParams::generic(4).is_ok());
        assert!(MeusersParams::new(3, vec![Rat::one(); 3]).is_err());
        assert!(MeusersParams::new(4, vec![Rat::one(); 4]).is_err()); // f1 = f2
        let mut f = vec![Rat::one(); 4];
        f[1] = Rat::zero();
        f[3] = Rat::zero();
        assert!(MeusersParams::new(4, f).is_err()); // f4 = 0
    }

    #[test]
    fn operator_shape() {
        let p = MeusersParams::generic(5).unwrap();
        let f = p.operator();
        assert_eq!(f.rows(), 4);
        assert_eq!(*f.get(0, 0), Rat::one());
        assert_eq!(*f.get(1, 1), Rat::zero());
        assert_eq!(*f.get(1, 0), Rat::one());
        assert_eq!(*f.get(0, 1), Rat::from_int(-1));
    }

    #[test]
    fn triple_is_torsion_free_and_consistent_with_its_lie_pair() {
        let p = MeusersParams::generic(5).unwrap();
        let (triple, pair) = meusers_triple(&p).unwrap();
        assert!(triple.torsion().is_zero());
        let reconstructed = crate::skew::triple_from_lie_pair(&pair).unwrap();
        assert_eq!(reconstructed, triple);
    }
}
