use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rat::Rat;
use crate::tensor::{circledast, multi_indices, pullback_tensor, star_action, Tensor, ValueKind};

/// Connection–curvature–torsion triple (A, R, T) on V = Q^n:
///   A : V → End V,   R : Λ²V → End V,   T : Λ²V → V.
/// Index conventions (row-major): A[a][i][j] is component i of A_{e_a}(e_j),
/// R[a][b][i][j] likewise for R_{e_a,e_b}, and T[a][b][i] is component i of
/// T(e_a, e_b).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Triple {
    dim: usize,
    a: Tensor,
    r: Tensor,
    t: Tensor,
}

/// Which covariant-derivative chain to build.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Component {
    Curvature,
    Torsion,
}

impl Triple {
    pub fn new(a: Tensor, r: Tensor, t: Tensor) -> Result<Triple> {
        let dim = a.dim();
        if a.arity() != 1 || a.value_kind() != ValueKind::Endo {
            return Err(Error::DimensionMismatch("connection must be V* ⊗ End V".into()));
        }
        if r.dim() != dim || r.arity() != 2 || r.value_kind() != ValueKind::Endo {
            return Err(Error::DimensionMismatch("curvature must be Λ²V* ⊗ End V".into()));
        }
        if t.dim() != dim || t.arity() != 2 || t.value_kind() != ValueKind::Vector {
            return Err(Error::DimensionMismatch("torsion must be Λ²V* ⊗ V".into()));
        }
        for a_idx in 0..dim {
            for b_idx in 0..=a_idx {
                for v in 0..r.value_size() {
                    if *r.get(&[a_idx, b_idx], v) != -r.get(&[b_idx, a_idx], v) {
                        let (i, j) = (v / dim, v % dim);
                        return Err(Error::NotAntisymmetric {
                            field: "R",
                            indices: vec![a_idx, b_idx, i, j],
                        });
                    }
                }
                for v in 0..t.value_size() {
                    if *t.get(&[a_idx, b_idx], v) != -t.get(&[b_idx, a_idx], v) {
                        return Err(Error::NotAntisymmetric {
                            field: "T",
                            indices: vec![a_idx, b_idx, v],
                        });
                    }
                }
            }
        }
        Ok(Triple { dim, a, r, t })
    }

    /// Build from nested component arrays A[a][i][j], R[a][b][i][j],
    /// T[a][b][i]; validates shapes and antisymmetry.
    pub fn from_components(
        dim: usize,
        a: &[Vec<Vec<Rat>>],
        r: &[Vec<Vec<Vec<Rat>>>],
        t: &[Vec<Vec<Rat>>],
    ) -> Result<Triple> {
        let shape_err = |what: &str| Error::DimensionMismatch(format!("{what} has wrong shape"));
        let mut ta = Tensor::zeros(dim, 1, ValueKind::Endo, vec![]);
        if a.len() != dim {
            return Err(shape_err("A"));
        }
        for (ai, rows) in a.iter().enumerate() {
            if rows.len() != dim || rows.iter().any(|row| row.len() != dim) {
                return Err(shape_err("A"));
            }
            for (i, row) in rows.iter().enumerate() {
                for (j, val) in row.iter().enumerate() {
                    ta.set(&[ai], i * dim + j, val.clone());
                }
            }
        }
        let mut tr = Tensor::zeros(dim, 2, ValueKind::Endo, vec![vec![0, 1]]);
        if r.len() != dim {
            return Err(shape_err("R"));
        }
        for (ai, bs) in r.iter().enumerate() {
            if bs.len() != dim {
                return Err(shape_err("R"));
            }
            for (bi, rows) in bs.iter().enumerate() {
                if rows.len() != dim || rows.iter().any(|row| row.len() != dim) {
                    return Err(shape_err("R"));
                }
                for (i, row) in rows.iter().enumerate() {
                    for (j, val) in row.iter().enumerate() {
                        tr.set(&[ai, bi], i * dim + j, val.clone());
                    }
                }
            }
        }
        let mut tt = Tensor::zeros(dim, 2, ValueKind::Vector, vec![vec![0, 1]]);
        if t.len() != dim {
            return Err(shape_err("T"));
        }
        for (ai, bs) in t.iter().enumerate() {
            if bs.len() != dim {
                return Err(shape_err("T"));
            }
            for (bi, vals) in bs.iter().enumerate() {
                if vals.len() != dim {
                    return Err(shape_err("T"));
                }
                for (i, val) in vals.iter().enumerate() {
                    tt.set(&[ai, bi], i, val.clone());
                }
            }
        }
        Triple::new(ta, tr, tt)
    }

    pub fn zero(dim: usize) -> Triple {
        Triple {
            dim,
            a: Tensor::zeros(dim, 1, ValueKind::Endo, vec![]),
            r: Tensor::zeros(dim, 2, ValueKind::Endo, vec![vec![0, 1]]),
            t: Tensor::zeros(dim, 2, ValueKind::Vector, vec![vec![0, 1]]),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn connection(&self) -> &Tensor {
        &self.a
    }

    pub fn curvature(&self) -> &Tensor {
        &self.r
    }

    pub fn torsion(&self) -> &Tensor {
        &self.t
    }

    /// A_{e_a} as a matrix.
    pub fn a_mat(&self, a: usize) -> Matrix {
        self.a.value_endo(&[a])
    }

    /// A_v for an arbitrary vector v.
    pub fn a_of(&self, v: &[Rat]) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for (c, coeff) in v.iter().enumerate() {
            if !coeff.is_zero() {
                m = m + self.a_mat(c).scale(coeff);
            }
        }
        m
    }

    /// The endomorphism T̂_x : y ↦ T(x, y) for x = e_a.
    pub fn torsion_endo(&self, a: usize) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, |i, j| self.t.get(&[a, j], i).clone())
    }

    /// T(e_a, e_b) as a vector.
    pub fn torsion_vec(&self, a: usize, b: usize) -> Vec<Rat> {
        self.t.value_vector(&[a, b])
    }

    /// r-fold covariant derivative ∇^r of the chosen component, as a tensor
    /// with r extra leading slots: ∇^r S = A ⊛ (A ⊛ … (A ⊛ S)).
    pub fn nabla(&self, which: Component, r: usize) -> Tensor {
        let mut s = match which {
            Component::Curvature => self.r.clone(),
            Component::Torsion => self.t.clone(),
        };
        for _ in 0..r {
            s = circledast(&self.a, &s);
        }
        s
    }

    /// Twisted exterior derivative of a fully alternating tensor ω:
    ///   (d ω)(x_0..x_r) = Σ_μ (−1)^μ (A_{x_μ} ★ ω)(…x̂_μ…)
    ///                   + Σ_{μ<ν} (−1)^{μ+ν−1} ω(T(x_μ,x_ν), x_0,…,x̂_μ,…,x̂_ν,…).
    pub fn twisted_d(&self, omega: &Tensor) -> Result<Tensor> {
        if omega.dim() != self.dim {
            return Err(Error::DimensionMismatch(
                "form dimension does not match the triple".into(),
            ));
        }
        if !omega.is_fully_alternating() {
            return Err(Error::NotAlternating {
                slots: (0..omega.arity()).collect(),
                indices: vec![],
            });
        }
        let n = self.dim;
        let p = omega.arity();
        let vsize = omega.value_size();
        // precompute A_{e_a} ★ ω for each direction
        let starred: Vec<Tensor> = (0..n).map(|a| star_action(&self.a_mat(a), omega)).collect();
        let mut out = Tensor::zeros(n, p + 1, omega.value_kind(), vec![(0..p + 1).collect()]);
        let mut rest = vec![0usize; p];
        for idx in multi_indices(n, p + 1) {
            let mut val = vec![Rat::zero(); vsize];
            for mu in 0..=p {
                for (k, r) in rest.iter_mut().enumerate() {
                    *r = idx[if k < mu { k } else { k + 1 }];
                }
                let term = starred[idx[mu]].value_slice(&rest);
                if mu % 2 == 0 {
                    for (v, t) in val.iter_mut().zip(term) {
                        if !t.is_zero() {
                            *v += t;
                        }
                    }
                } else {
                    for (v, t) in val.iter_mut().zip(term) {
                        if !t.is_zero() {
                            *v -= t;
                        }
                    }
                }
            }
            if p >= 1 {
                let mut inner = vec![0usize; p];
                for mu in 0..p {
                    for nu in (mu + 1)..=p {
                        // sign (−1)^{μ+ν−1}
                        let positive = (mu + nu) % 2 == 1;
                        let mut k = 1;
                        for (pos, &slot) in idx.iter().enumerate() {
                            if pos != mu && pos != nu {
                                inner[k] = slot;
                                k += 1;
                            }
                        }
                        for c in 0..n {
                            let tc = self.t.get(&[idx[mu], idx[nu]], c);
                            if tc.is_zero() {
                                continue;
                            }
                            inner[0] = c;
                            let term = omega.value_slice(&inner);
                            for (v, t) in val.iter_mut().zip(term) {
                                if !t.is_zero() {
                                    if positive {
                                        *v += &(tc * t);
                                    } else {
                                        *v -= &(tc * t);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            out.set_value(&idx, &val);
        }
        Ok(out)
    }

    /// Approximate curvature Q(A,T)_{x,y} = [A_x, A_y] − A_{A_x y − A_y x − T(x,y)}.
    pub fn approximate_curvature(&self) -> Tensor {
        let n = self.dim;
        let mut q = Tensor::zeros(n, 2, ValueKind::Endo, vec![vec![0, 1]]);
        let mats: Vec<Matrix> = (0..n).map(|a| self.a_mat(a)).collect();
        for a in 0..n {
            for b in 0..a {
                let mut arg = mats[a].column(b); // A_{e_a} e_b
                let other = mats[b].column(a);
                for ((x, y), t) in arg
                    .iter_mut()
                    .zip(other)
                    .zip(self.t.value_slice(&[a, b]).iter())
                {
                    *x = &*x - &y - t;
                }
                let m = Matrix::commutator(&mats[a], &mats[b]) - self.a_of(&arg);
                q.set_value(&[a, b], &m.flatten());
                q.set_value(&[b, a], &(-m).flatten());
            }
        }
        q
    }

    /// (R ∧ id)(x,y,z) = R_{x,y} z + R_{y,z} x + R_{z,x} y, a Λ³V*⊗V tensor.
    pub fn r_wedge_id(&self) -> Tensor {
        let n = self.dim;
        let mut out = Tensor::zeros(n, 3, ValueKind::Vector, vec![vec![0, 1, 2]]);
        for idx in multi_indices(n, 3) {
            let (x, y, z) = (idx[0], idx[1], idx[2]);
            let mut val = vec![Rat::zero(); n];
            for (pair, arg) in [((x, y), z), ((y, z), x), ((z, x), y)] {
                let m = self.r.value_slice(&[pair.0, pair.1]);
                for i in 0..n {
                    let e = &m[i * n + arg];
                    if !e.is_zero() {
                        val[i] += e;
                    }
                }
            }
            out.set_value(&idx, &val);
        }
        out
    }

    /// Residuals of the two Bianchi identities:
    ///   first  = d^{(A,T)} T − R ∧ id      (Λ³V* ⊗ V)
    ///   second = d^{(A,T)} R               (Λ³V* ⊗ End V)
    /// Both vanish exactly on curvature–torsion data of an invariant
    /// connection.
    pub fn bianchi_residuals(&self) -> (Tensor, Tensor) {
        let first = self
            .twisted_d(&self.t)
            .expect("torsion is alternating")
            .sub(&self.r_wedge_id());
        let second = self.twisted_d(&self.r).expect("curvature is alternating");
        (first, second)
    }

    /// Ricci form Ric(y, z) = tr(x ↦ R_{x,y} z), returned as the matrix
    /// Ric[i][j] = Ric(e_j, e_i).
    pub fn ricci(&self) -> Matrix {
        let n = self.dim;
        Matrix::from_fn(n, n, |i, j| {
            let mut acc = Rat::zero();
            for a in 0..n {
                let e = self.r.get(&[a, j], a * n + i);
                if !e.is_zero() {
                    acc += e;
                }
            }
            acc
        })
    }

    /// Scaling action c ★ (A, R, T) = (cA, c²R, cT) for nonzero rational c.
    pub fn rescale(&self, c: &Rat) -> Result<Triple> {
        if c.is_zero() {
            return Err(Error::ZeroScale);
        }
        Ok(Triple {
            dim: self.dim,
            a: self.a.scale(c),
            r: self.r.scale(&(c * c)),
            t: self.t.scale(c),
        })
    }

    /// Pullback along an invertible endomorphism F:
    ///   (F*A)_x = F⁻¹ A_{Fx} F, (F*R)_{x,y} = F⁻¹ R_{Fx,Fy} F,
    ///   (F*T)(x,y) = F⁻¹ T(Fx, Fy).
    pub fn pullback(&self, f: &Matrix) -> Result<Triple> {
        let f_inv = f.inverse()?;
        Ok(Triple {
            dim: self.dim,
            a: pullback_tensor(f, &f_inv, &self.a),
            r: pullback_tensor(f, &f_inv, &self.r),
            t: pullback_tensor(f, &f_inv, &self.t),
        })
    }

    /// The torsion-free companion: A' = A − ½T̂, T' = 0, and
    ///   R'_{x,y} = R_{x,y} − ½((A_x ★ T̂)_y − (A_y ★ T̂)_x)
    ///            + ¼([T̂_x, T̂_y] − 2 T̂_{T(x,y)})
    /// where T̂_x = T(x, ·) and (A_x ★ T̂)_y = [A_x, T̂_y] − T̂_{A_x y}.
    pub fn torsion_free_projection(&self) -> Triple {
        let n = self.dim;
        let half = Rat::frac(1, 2);
        let quarter = Rat::frac(1, 4);
        let that: Vec<Matrix> = (0..n).map(|a| self.torsion_endo(a)).collect();
        let mut that_tensor = Tensor::zeros(n, 1, ValueKind::Endo, vec![]);
        for (a, m) in that.iter().enumerate() {
            that_tensor.set_value(&[a], &m.flatten());
        }
        let a_new = self.a.sub(&that_tensor.scale(&half));
        // (A_{e_a} ★ T̂) as a 1-slot endo tensor, for each a
        let starred: Vec<Tensor> = (0..n)
            .map(|a| star_action(&self.a_mat(a), &that_tensor))
            .collect();
        let that_of = |v: &[Rat]| {
            let mut m = Matrix::zeros(n, n);
            for (c, coeff) in v.iter().enumerate() {
                if !coeff.is_zero() {
                    m = m + that[c].scale(coeff);
                }
            }
            m
        };
        let mut r_new = self.r.clone();
        for a in 0..n {
            for b in 0..a {
                let correction = (starred[a].value_endo(&[b]) - starred[b].value_endo(&[a]))
                    .scale(&half);
                let quad = (Matrix::commutator(&that[a], &that[b])
                    - that_of(&self.torsion_vec(a, b)).scale(&Rat::from_int(2)))
                .scale(&quarter);
                let m = self.r.value_endo(&[a, b]) - correction + quad;
                r_new.set_value(&[a, b], &m.flatten());
                r_new.set_value(&[b, a], &(-m).flatten());
            }
        }
        Triple {
            dim: n,
            a: a_new,
            r: r_new,
            t: Tensor::zeros(n, 2, ValueKind::Vector, vec![vec![0, 1]]),
        }
    }
}
