use crate::matrix::Matrix;
use crate::rat::Rat;

/// What a tensor's slots evaluate to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ValueKind {
    Scalar,
    Vector,
    Endo,
}

impl ValueKind {
    pub fn size(self, n: usize) -> usize {
        match self {
            ValueKind::Scalar => 1,
            ValueKind::Vector => n,
            ValueKind::Endo => n * n,
        }
    }
}

/// Dense covariant tensor on Q^n with `arity` slots and scalar-, vector- or
/// endomorphism-values, stored row-major: the flat index of slot tuple
/// (a_1..a_p) and value component v is ((a_1 n + a_2) n + ...) * vsize + v.
/// For endomorphism values the component index is i*n + j, i.e. row i,
/// column j of the value matrix.
///
/// `alt_groups` records which slot groups are declared alternating; the
/// declaration is checked by `check_alternating`, not enforced by storage.
#[derive(Clone, PartialEq, Eq)]
pub struct Tensor {
    dim: usize,
    arity: usize,
    value_kind: ValueKind,
    alt_groups: Vec<Vec<usize>>,
    entries: Vec<Rat>,
}

/// Iterate all multi-indices in {0..n}^p in lexicographic order.
pub fn multi_indices(n: usize, p: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(p as u32);
    (0..total).map(move |mut k| {
        let mut idx = vec![0usize; p];
        for slot in (0..p).rev() {
            idx[slot] = k % n;
            k /= n;
        }
        idx
    })
}

impl Tensor {
    pub fn zeros(dim: usize, arity: usize, value_kind: ValueKind, alt_groups: Vec<Vec<usize>>) -> Self {
        let len = dim.pow(arity as u32) * value_kind.size(dim);
        Tensor {
            dim,
            arity,
            value_kind,
            alt_groups,
            entries: vec![Rat::zero(); len],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn value_kind(&self) -> ValueKind {
        self.value_kind
    }

    pub fn alt_groups(&self) -> &[Vec<usize>] {
        &self.alt_groups
    }

    pub fn value_size(&self) -> usize {
        self.value_kind.size(self.dim)
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    fn slot_offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.arity);
        let mut off = 0;
        for &a in idx {
            debug_assert!(a < self.dim);
            off = off * self.dim + a;
        }
        off * self.value_size()
    }

    pub fn get(&self, idx: &[usize], component: usize) -> &Rat {
        &self.entries[self.slot_offset(idx) + component]
    }

    pub fn set(&mut self, idx: &[usize], component: usize, v: Rat) {
        let off = self.slot_offset(idx);
        self.entries[off + component] = v;
    }

    pub fn value_slice(&self, idx: &[usize]) -> &[Rat] {
        let off = self.slot_offset(idx);
        &self.entries[off..off + self.value_size()]
    }

    pub fn set_value(&mut self, idx: &[usize], value: &[Rat]) {
        let off = self.slot_offset(idx);
        self.entries[off..off + value.len()].clone_from_slice(value);
    }

    pub fn value_endo(&self, idx: &[usize]) -> Matrix {
        assert_eq!(self.value_kind, ValueKind::Endo);
        Matrix::from_flat(self.dim, self.value_slice(idx))
    }

    pub fn value_vector(&self, idx: &[usize]) -> Vec<Rat> {
        assert_eq!(self.value_kind, ValueKind::Vector);
        self.value_slice(idx).to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rat::is_zero)
    }

    pub fn scale(&self, c: &Rat) -> Tensor {
        Tensor {
            entries: self.entries.iter().map(|x| x * c).collect(),
            alt_groups: self.alt_groups.clone(),
            ..*self
        }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Tensor, f: impl Fn(&Rat, &Rat) -> Rat) -> Tensor {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.arity, other.arity);
        assert_eq!(self.value_kind, other.value_kind);
        Tensor {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
            alt_groups: self.alt_groups.clone(),
            ..*self
        }
    }

    /// Check every declared alternating slot group: swapping two slots of a
    /// group negates the value. Returns the first offending
    /// (group, index tuple) if any.
    pub fn check_alternating(&self) -> Result<(), (Vec<usize>, Vec<usize>)> {
        for group in &self.alt_groups {
            for w in group.windows(2) {
                let (s, t) = (w[0], w[1]);
                for idx in multi_indices(self.dim, self.arity) {
                    let mut swapped = idx.clone();
                    swapped.swap(s, t);
                    for v in 0..self.value_size() {
                        if *self.get(&idx, v) != -self.get(&swapped, v) {
                            return Err((group.clone(), idx));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_fully_alternating(&self) -> bool {
        let all: Vec<usize> = (0..self.arity).collect();
        let probe = Tensor {
            alt_groups: vec![all],
            entries: self.entries.clone(),
            ..*self
        };
        probe.check_alternating().is_ok()
    }
}

impl std::fmt::Debug for Tensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Tensor(dim={}, arity={}, {:?}, {} nonzero entries)",
            self.dim,
            self.arity,
            self.value_kind,
            self.entries.iter().filter(|e| !e.is_zero()).count()
        )
    }
}

/// Natural gl(V)-action on tensors:
///   (X ★ t)(y_1..y_p) = X·t(y_1..y_p) − Σ_μ t(y_1,…,X y_μ,…,y_p)
/// where X·w is 0, Xw or [X,w] for scalar, vector or endomorphism values.
pub fn star_action(x: &Matrix, t: &Tensor) -> Tensor {
    let n = t.dim;
    assert_eq!(x.rows(), n);
    assert_eq!(x.cols(), n);
    let vsize = t.value_size();
    let mut out = Tensor::zeros(n, t.arity, t.value_kind, t.alt_groups.clone());
    for idx in multi_indices(n, t.arity) {
        let mut val = vec![Rat::zero(); vsize];
        // value part: X · t(idx)
        match t.value_kind {
            ValueKind::Scalar => {}
            ValueKind::Vector => {
                let w = t.value_slice(&idx);
                for i in 0..n {
                    for j in 0..n {
                        let a = x.get(i, j);
                        if !a.is_zero() && !w[j].is_zero() {
                            val[i] += a * &w[j];
                        }
                    }
                }
            }
            ValueKind::Endo => {
                let w = t.value_slice(&idx);
                // [X, W] = XW − WX, written on flat row-major components
                for i in 0..n {
                    for k in 0..n {
                        let a = x.get(i, k);
                        if !a.is_zero() {
                            for j in 0..n {
                                let b = &w[k * n + j];
                                if !b.is_zero() {
                                    val[i * n + j] += a * b;
                                }
                            }
                        }
                    }
                }
                for k in 0..n {
                    for j in 0..n {
                        let b = x.get(k, j);
                        if !b.is_zero() {
                            for i in 0..n {
                                let a = &w[i * n + k];
                                if !a.is_zero() {
                                    val[i * n + j] -= a * b;
                                }
                            }
                        }
                    }
                }
            }
        }
        // slot part: − Σ_μ t(…, X y_μ, …)
        let mut shifted = idx.clone();
        for mu in 0..t.arity {
            let orig = idx[mu];
            for c in 0..n {
                let f = x.get(c, orig);
                if f.is_zero() {
                    continue;
                }
                shifted[mu] = c;
                let w = t.value_slice(&shifted);
                for (vv, wv) in val.iter_mut().zip(w) {
                    if !wv.is_zero() {
                        *vv -= f * wv;
                    }
                }
            }
            shifted[mu] = orig;
        }
        out.set_value(&idx, &val);
    }
    out
}

/// Pairing of an endomorphism-valued tensor with another tensor:
///   (Q ⊛ s)(x_1..x_d; y_1..y_p) = (Q_{x_1..x_d} ★ s)(y_1..y_p).
/// The first d slots inherit Q's alternating declarations, the rest s's.
pub fn circledast(q: &Tensor, s: &Tensor) -> Tensor {
    assert_eq!(q.value_kind, ValueKind::Endo);
    assert_eq!(q.dim, s.dim);
    let n = q.dim;
    let mut groups = q.alt_groups.clone();
    groups.extend(
        s.alt_groups
            .iter()
            .map(|g| g.iter().map(|slot| slot + q.arity).collect()),
    );
    let mut out = Tensor::zeros(n, q.arity + s.arity, s.value_kind, groups);
    let block = n.pow(s.arity as u32) * s.value_size();
    for (bi, idx) in multi_indices(n, q.arity).enumerate() {
        if q.value_slice(&idx).iter().all(Rat::is_zero) {
            continue;
        }
        let m = q.value_endo(&idx);
        let sub = star_action(&m, s);
        out.entries[bi * block..(bi + 1) * block].clone_from_slice(&sub.entries);
    }
    out
}

/// Pullback along an invertible matrix F:
///   (F* t)(y_1..y_p) = F⁻¹ · t(F y_1, …, F y_p)
/// with the value transported by F⁻¹ (vectors) or F⁻¹ ( ) F (endomorphisms).
pub fn pullback_tensor(f: &Matrix, f_inv: &Matrix, t: &Tensor) -> Tensor {
    let n = t.dim;
    assert_eq!(f.rows(), n);
    let vsize = t.value_size();
    // contract one slot at a time: entries[..a_mu..] <- Σ_c F[c][a_mu] entries[..c..]
    let mut cur = t.entries.clone();
    for mu in 0..t.arity {
        let mut next = vec![Rat::zero(); cur.len()];
        let inner: usize = n.pow((t.arity - 1 - mu) as u32) * vsize;
        let outer: usize = n.pow(mu as u32);
        for o in 0..outer {
            for a in 0..n {
                for c in 0..n {
                    let fca = f.get(c, a);
                    if fca.is_zero() {
                        continue;
                    }
                    let src = (o * n + c) * inner;
                    let dst = (o * n + a) * inner;
                    for k in 0..inner {
                        if !cur[src + k].is_zero() {
                            next[dst + k] += fca * &cur[src + k];
                        }
                    }
                }
            }
        }
        cur = next;
    }
    let mut out = Tensor {
        entries: cur,
        alt_groups: t.alt_groups.clone(),
        ..*t
    };
    match t.value_kind {
        ValueKind::Scalar => {}
        ValueKind::Vector => {
            for idx in multi_indices(n, t.arity) {
                let w = f_inv.mul_vec(out.value_slice(&idx));
                out.set_value(&idx, &w);
            }
        }
        ValueKind::Endo => {
            for idx in multi_indices(n, t.arity) {
                let w = out.value_endo(&idx);
                let w = f_inv * &(&w * f);
                out.set_value(&idx, &w.flatten());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::from_int(x)).collect())
                .collect(),
        )
    }

    /// Scalar 2-form t on Q^2 with t(e0,e1) = 1.
    fn area_form() -> Tensor {
        let mut t = Tensor::zeros(2, 2, ValueKind::Scalar, vec![vec![0, 1]]);
        t.set(&[0, 1], 0, Rat::from_int(1));
        t.set(&[1, 0], 0, Rat::from_int(-1));
        t
    }

    #[test]
    fn star_on_scalar_form_is_minus_divergence() {
        // (X ★ t)(y,z) = −t(Xy,z) − t(y,Xz); for the area form this is
        // −tr(X)·t. Take X = [[2,0],[0,3]], trace 5.
        let x = mat(&[&[2, 0], &[0, 3]]);
        let out = star_action(&x, &area_form());
        assert_eq!(*out.get(&[0, 1], 0), Rat::from_int(-5));
        assert_eq!(*out.get(&[1, 0], 0), Rat::from_int(5));
        assert_eq!(*out.get(&[0, 0], 0), Rat::zero());
    }

    #[test]
    fn star_on_vector_tensor_hand_value() {
        // t: one slot, vector values, t(e_a) = e_a (identity as V*⊗V).
        // (X ★ t)(y) = X t(y) − t(Xy) = Xy − Xy = 0 for every X.
        let n = 3;
        let mut t = Tensor::zeros(n, 1, ValueKind::Vector, vec![]);
        for a in 0..n {
            t.set(&[a], a, Rat::one());
        }
        let x = mat(&[&[1, 2, 0], &[0, 1, 5], &[7, 0, 1]]);
        assert!(star_action(&x, &t).is_zero());
    }

    #[test]
    fn star_on_endo_values_is_commutator_minus_slots() {
        // t: no slots impossible here, so use one slot with t(e_a) = E
        // constant; then (X★t)(e_a) = [X,E] − Σ_c X[c][a] E.
        let n = 2;
        let e = mat(&[&[0, 1], &[0, 0]]);
        let mut t = Tensor::zeros(n, 1, ValueKind::Endo, vec![]);
        for a in 0..n {
            t.set_value(&[a], &e.flatten());
        }
        let x = mat(&[&[1, 0], &[0, -1]]);
        let out = star_action(&x, &t);
        // [X,E] = 2E; X e_0 = e_0 so slot term subtracts E: expect E at slot 0
        let expected0 = e.scale(&Rat::from_int(2)) - e.clone();
        assert_eq!(out.value_endo(&[0]), expected0);
        // X e_1 = −e_1: expect 2E + E = 3E at slot 1
        assert_eq!(out.value_endo(&[1]), e.scale(&Rat::from_int(3)));
    }

    #[test]
    fn star_is_a_lie_algebra_action() {
        // X★(Y★t) − Y★(X★t) = [X,Y]★t on a random-ish tensor
        let n = 2;
        let mut t = Tensor::zeros(n, 2, ValueKind::Vector, vec![]);
        let mut c = 1i64;
        for idx in multi_indices(n, 2) {
            for v in 0..n {
                t.set(&idx, v, Rat::from_int(c % 7 - 3));
                c += 1;
            }
        }
        let x = mat(&[&[1, 2], &[3, 4]]);
        let y = mat(&[&[0, 1], &[-1, 2]]);
        let lhs = star_action(&x, &star_action(&y, &t)).sub(&star_action(&y, &star_action(&x, &t)));
        let rhs = star_action(&Matrix::commutator(&x, &y), &t);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn circledast_blocks_match_star() {
        let n = 2;
        let mut q = Tensor::zeros(n, 1, ValueKind::Endo, vec![]);
        q.set_value(&[0], &mat(&[&[1, 2], &[0, 1]]).flatten());
        q.set_value(&[1], &mat(&[&[0, 0], &[3, 0]]).flatten());
        let s = area_form();
        let out = circledast(&q, &s);
        assert_eq!(out.arity(), 3);
        for a in 0..n {
            let expected = star_action(&q.value_endo(&[a]), &s);
            for idx in multi_indices(n, 2) {
                let full = [&[a][..], &idx[..]].concat();
                assert_eq!(out.get(&full, 0), expected.get(&idx, 0));
            }
        }
        // slot groups: q has none; s's group shifts to slots (1,2)
        assert_eq!(out.alt_groups(), &[vec![1, 2]]);
    }

    #[test]
    fn alternation_check_names_offender() {
        let mut t = Tensor::zeros(2, 2, ValueKind::Scalar, vec![vec![0, 1]]);
        t.set(&[0, 1], 0, Rat::one());
        t.set(&[1, 0], 0, Rat::one()); // should be −1
        let err = t.check_alternating().unwrap_err();
        assert_eq!(err.0, vec![0, 1]);
        assert!(area_form().check_alternating().is_ok());
        assert!(area_form().is_fully_alternating());
    }

    #[test]
    fn pullback_is_functorial() {
        let n = 2;
        let mut t = Tensor::zeros(n, 2, ValueKind::Endo, vec![]);
        let mut c = 1i64;
        for idx in multi_indices(n, 2) {
            for v in 0..n * n {
                t.set(&idx, v, Rat::from_int((c * c) % 11 - 5));
                c += 1;
            }
        }
        let f = mat(&[&[1, 1], &[0, 1]]);
        let g = mat(&[&[2, 0], &[1, 1]]);
        let fi = f.inverse().unwrap();
        let gi = g.inverse().unwrap();
        let fg = &f * &g;
        let fgi = fg.inverse().unwrap();
        // (FG)* t = G*(F* t)
        let lhs = pullback_tensor(&fg, &fgi, &t);
        let rhs = pullback_tensor(&g, &gi, &pullback_tensor(&f, &fi, &t));
        assert_eq!(lhs, rhs);
        // identity pulls back to itself
        let id = Matrix::identity(n);
        assert_eq!(pullback_tensor(&id, &id, &t), t);
    }
}
