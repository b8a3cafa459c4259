use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rat::Rat;
use crate::subspace::Subspace;
use crate::tensor::{star_action, Tensor};
use crate::triple::Triple;

/// Element 𝔛 ⊕ x of End V ⊕ V.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SkewElement {
    pub endo: Matrix,
    pub vec: Vec<Rat>,
}

impl SkewElement {
    pub fn new(endo: Matrix, vec: Vec<Rat>) -> Self {
        assert_eq!(endo.rows(), vec.len());
        SkewElement { endo, vec }
    }

    pub fn zero(n: usize) -> Self {
        SkewElement {
            endo: Matrix::zeros(n, n),
            vec: vec![Rat::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    pub fn is_zero(&self) -> bool {
        self.endo.is_zero() && self.vec.iter().all(Rat::is_zero)
    }

    /// Coordinates in Q^(n²+n): flattened endomorphism then vector part.
    pub fn flatten(&self) -> Vec<Rat> {
        let mut v = self.endo.flatten();
        v.extend_from_slice(&self.vec);
        v
    }

    pub fn from_flat(n: usize, data: &[Rat]) -> Self {
        assert_eq!(data.len(), n * n + n);
        SkewElement {
            endo: Matrix::from_flat(n, &data[..n * n]),
            vec: data[n * n..].to_vec(),
        }
    }

    pub fn sub(&self, other: &SkewElement) -> SkewElement {
        SkewElement {
            endo: &self.endo - &other.endo,
            vec: self
                .vec
                .iter()
                .zip(&other.vec)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Skew-algebra bracket on End V ⊕ V twisted by curvature and torsion:
///   [𝔛 ⊕ x, 𝔜 ⊕ y] = ([𝔛,𝔜] − R_{x,y}) ⊕ (𝔛y − 𝔜x − T(x,y)).
pub fn bracket(t: &Triple, l: &SkewElement, r: &SkewElement) -> SkewElement {
    let n = t.dim();
    let mut curv = Matrix::zeros(n, n);
    for a in 0..n {
        if l.vec[a].is_zero() {
            continue;
        }
        for b in 0..n {
            if r.vec[b].is_zero() {
                continue;
            }
            let coeff = &l.vec[a] * &r.vec[b];
            curv = curv + t.curvature().value_endo(&[a, b]).scale(&coeff);
        }
    }
    let mut tor = vec![Rat::zero(); n];
    for a in 0..n {
        if l.vec[a].is_zero() {
            continue;
        }
        for b in 0..n {
            if r.vec[b].is_zero() {
                continue;
            }
            let coeff = &l.vec[a] * &r.vec[b];
            for (ti, si) in tor.iter_mut().zip(t.torsion().value_slice(&[a, b])) {
                if !si.is_zero() {
                    *ti += &(&coeff * si);
                }
            }
        }
    }
    let endo = Matrix::commutator(&l.endo, &r.endo) - curv;
    let vec: Vec<Rat> = l
        .endo
        .mul_vec(&r.vec)
        .iter()
        .zip(r.endo.mul_vec(&l.vec))
        .zip(tor)
        .map(|((xy, yx), tv)| xy - &yx - tv)
        .collect();
    SkewElement { endo, vec }
}

/// Jacobiator Jac(a,b,c) = [[a,b],c] + [[b,c],a] + [[c,a],b] of the skew
/// bracket; vanishes identically iff the bracket is a Lie bracket.
pub fn jacobiator(t: &Triple, a: &SkewElement, b: &SkewElement, c: &SkewElement) -> SkewElement {
    let mut acc = bracket(t, &bracket(t, a, b), c);
    let second = bracket(t, &bracket(t, b, c), a);
    let third = bracket(t, &bracket(t, c, a), b);
    acc.endo = acc.endo + second.endo + third.endo;
    for (x, (y, z)) in acc.vec.iter_mut().zip(second.vec.iter().zip(&third.vec)) {
        *x += y;
        *x += z;
    }
    acc
}

/// Contract the two slots of a tensor against vectors u, v, returning the
/// flattened value component.
fn contract2(t: &Tensor, u: &[Rat], v: &[Rat]) -> Vec<Rat> {
    let size = t.value_slice(&[0, 0]).len();
    let mut out = vec![Rat::zero(); size];
    for (a, ua) in u.iter().enumerate() {
        if ua.is_zero() {
            continue;
        }
        for (b, vb) in v.iter().enumerate() {
            if vb.is_zero() {
                continue;
            }
            let coeff = ua * vb;
            for (o, e) in out.iter_mut().zip(t.value_slice(&[a, b])) {
                *o += &coeff * e;
            }
        }
    }
    out
}

/// Contract the three slots of a tensor against vectors x, y, z.
fn contract3(t: &Tensor, x: &[Rat], y: &[Rat], z: &[Rat]) -> Vec<Rat> {
    let size = t.value_slice(&[0, 0, 0]).len();
    let mut out = vec![Rat::zero(); size];
    for (a, xa) in x.iter().enumerate() {
        if xa.is_zero() {
            continue;
        }
        for (b, yb) in y.iter().enumerate() {
            if yb.is_zero() {
                continue;
            }
            let xy = xa * yb;
            for (c, zc) in z.iter().enumerate() {
                if zc.is_zero() {
                    continue;
                }
                let coeff = &xy * zc;
                for (o, e) in out.iter_mut().zip(t.value_slice(&[a, b, c])) {
                    *o += &coeff * e;
                }
            }
        }
    }
    out
}

/// The Jacobiator expressed through the star action, the torsion-twisted
/// exterior derivative with zero connection, and R ∧ id — a code path
/// independent of the bracket composition in [`jacobiator`]:
///
/// Jac(𝔛⊕x, 𝔜⊕y, 𝔷⊕z) = J(𝔛; y, z) − J(𝔜; x, z) + J(𝔷; x, y) + J_v(x, y, z)
///
/// where J(𝔛; y, z) = (𝔛★R)_{y,z} ⊕ (𝔛★T)(y,z) and
/// J_v(x, y, z) = (dR)(x,y,z) ⊕ ((dT − R∧id)(x,y,z)), with d taken with
/// zero connection (only the torsion insertions survive).
pub fn jacobiator_closed_form(
    t: &Triple,
    a: &SkewElement,
    b: &SkewElement,
    c: &SkewElement,
) -> crate::error::Result<SkewElement> {
    let n = t.dim();
    let zero_conn = Triple::new(
        Tensor::zeros(n, 1, crate::tensor::ValueKind::Endo, vec![]),
        t.curvature().clone(),
        t.torsion().clone(),
    )?;
    let d0r = zero_conn.twisted_d(t.curvature())?;
    let d0t = zero_conn.twisted_d(t.torsion())?;
    let rw = t.r_wedge_id();

    let mut endo = vec![Rat::zero(); n * n];
    let mut vec_part = vec![Rat::zero(); n];
    let mut add_endo_term = |xe: &Matrix, u: &[Rat], v: &[Rat], sign: i64| {
        if xe.is_zero() {
            return;
        }
        let sr = star_action(xe, t.curvature());
        let st = star_action(xe, t.torsion());
        let s = Rat::from_int(sign);
        for (o, e) in endo.iter_mut().zip(contract2(&sr, u, v)) {
            *o += &s * &e;
        }
        for (o, e) in vec_part.iter_mut().zip(contract2(&st, u, v)) {
            *o += &s * &e;
        }
    };
    add_endo_term(&a.endo, &b.vec, &c.vec, 1);
    add_endo_term(&b.endo, &a.vec, &c.vec, -1);
    add_endo_term(&c.endo, &a.vec, &b.vec, 1);
    for (o, e) in endo.iter_mut().zip(contract3(&d0r, &a.vec, &b.vec, &c.vec)) {
        *o += e;
    }
    let dt = contract3(&d0t, &a.vec, &b.vec, &c.vec);
    let rwv = contract3(&rw, &a.vec, &b.vec, &c.vec);
    for ((o, p), q) in vec_part.iter_mut().zip(dt).zip(rwv) {
        *o += &p - &q;
    }
    Ok(SkewElement {
        endo: Matrix::from_flat(n, &endo),
        vec: vec_part,
    })
}

/// Report on the three linear-algebra conditions under which
/// 𝔥 + span{A_x ⊕ x} is a subalgebra of the skew algebra.
#[derive(Clone, Debug)]
pub struct SubalgebraReport {
    /// 𝔥 annihilates curvature and torsion
    pub stabilizes_r: bool,
    pub stabilizes_t: bool,
    /// 𝔥 ★ A ⊆ V* ⊗ 𝔥, i.e. [X, A_x] − A_{Xx} ∈ 𝔥
    pub preserves_connection: bool,
    /// Q(A,T) ≡ R modulo Λ²V* ⊗ 𝔥
    pub curvature_congruence: bool,
}

impl SubalgebraReport {
    pub fn all(&self) -> bool {
        self.stabilizes_r && self.stabilizes_t && self.preserves_connection && self.curvature_congruence
    }
}

/// Check the subalgebra conditions for a commutator-closed subspace
/// 𝔥 ⊆ End V (coordinates in Q^(n²), row-major).
pub fn verify_subalgebra_conditions(h: &Subspace, t: &Triple) -> Result<SubalgebraReport> {
    let n = t.dim();
    if h.ambient_dim() != n * n {
        return Err(Error::AmbientMismatch {
            left: h.ambient_dim(),
            right: n * n,
        });
    }
    let basis: Vec<Matrix> = h.basis_rows().map(|r| Matrix::from_flat(n, r)).collect();
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate().take(i) {
            if !h.contains(&Matrix::commutator(x, y).flatten()) {
                return Err(Error::NotSubalgebra { i, j });
            }
        }
    }
    let stabilizes_r = basis.iter().all(|x| star_action(x, t.curvature()).is_zero());
    let stabilizes_t = basis.iter().all(|x| star_action(x, t.torsion()).is_zero());
    let preserves_connection = basis.iter().all(|x| {
        star_action(x, t.connection())
            .entries()
            .chunks(n * n)
            .all(|chunk| h.contains(chunk))
    });
    let q = t.approximate_curvature();
    let curvature_congruence = (0..n).all(|a| {
        (0..a).all(|b| {
            let diff = q.value_endo(&[a, b]) - t.curvature().value_endo(&[a, b]);
            h.contains(&diff.flatten())
        })
    });
    Ok(SubalgebraReport {
        stabilizes_r,
        stabilizes_t,
        preserves_connection,
        curvature_congruence,
    })
}

/// Abstract model of a homogeneous structure: a Lie algebra 𝔤 with
/// structure constants c, an isotropy subalgebra 𝔥 ⊆ 𝔤, a splitting that
/// identifies 𝔤/𝔥 with V = Q^n, and an invariant connection map
/// E_a ↦ A_{E_a} ∈ End V given on the basis of 𝔤.
#[derive(Clone, Debug)]
pub struct LiePair {
    pub dim_g: usize,
    /// structure constants: bracket of basis vectors, c[a][b] ∈ Q^dim_g
    pub c: Vec<Vec<Vec<Rat>>>,
    /// isotropy subalgebra as a subspace of Q^dim_g
    pub h: Subspace,
    /// rows: representatives in 𝔤 of the frame e_1..e_n of V ≅ 𝔤/𝔥
    pub split: Matrix,
    /// connection endomorphism attached to each basis vector of 𝔤
    pub connection: Vec<Matrix>,
}

impl LiePair {
    pub fn v_dim(&self) -> usize {
        self.dim_g - self.h.dim()
    }

    pub fn bracket_g(&self, u: &[Rat], v: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim_g];
        for a in 0..self.dim_g {
            if u[a].is_zero() {
                continue;
            }
            for b in 0..self.dim_g {
                if v[b].is_zero() {
                    continue;
                }
                let coeff = &u[a] * &v[b];
                for (o, s) in out.iter_mut().zip(&self.c[a][b]) {
                    if !s.is_zero() {
                        *o += &(&coeff * s);
                    }
                }
            }
        }
        out
    }

    pub fn connection_of(&self, u: &[Rat]) -> Matrix {
        let n = self.v_dim();
        let mut m = Matrix::zeros(n, n);
        for (a, coeff) in u.iter().enumerate() {
            if !coeff.is_zero() {
                m = m + self.connection[a].scale(coeff);
            }
        }
        m
    }

    /// The matrix whose rows are the 𝔥 basis followed by the splitting
    /// representatives; invertibility is the complementarity condition.
    fn frame_matrix(&self) -> Matrix {
        let mut rows = self.h.basis().row_vecs();
        rows.extend(self.split.row_vecs());
        Matrix::from_rows(rows)
    }

    /// Projection 𝔤 → V ≅ 𝔤/𝔥 determined by the splitting.
    pub fn project(&self, u: &[Rat]) -> Result<Vec<Rat>> {
        let frame = self.frame_matrix();
        let coords = frame
            .transpose()
            .solve(u)
            .ok_or(Error::BadSplitting {
                rank: frame.rank(),
                expected: self.dim_g,
            })?;
        Ok(coords[self.h.dim()..].to_vec())
    }

    /// Validate all structural invariants; errors name the violation.
    pub fn validate(&self) -> Result<()> {
        let nn = self.dim_g;
        if self.c.len() != nn
            || self.c.iter().any(|row| row.len() != nn)
            || self
                .c
                .iter()
                .any(|row| row.iter().any(|v| v.len() != nn))
        {
            return Err(Error::DimensionMismatch(
                "structure constants must be dim_g × dim_g × dim_g".into(),
            ));
        }
        let n = self.v_dim();
        if self.split.rows() != n || self.split.cols() != nn {
            return Err(Error::DimensionMismatch(format!(
                "splitting must be {n} rows of length {nn}"
            )));
        }
        if self.connection.len() != nn
            || self
                .connection
                .iter()
                .any(|m| m.rows() != n || m.cols() != n)
        {
            return Err(Error::DimensionMismatch(format!(
                "connection must attach an {n}x{n} endomorphism to each of the {nn} basis vectors"
            )));
        }
        for a in 0..nn {
            for b in 0..=a {
                for k in 0..nn {
                    if self.c[a][b][k] != -&self.c[b][a][k] {
                        return Err(Error::StructureNotAntisymmetric { a, b });
                    }
                }
            }
        }
        let e = |k: usize| {
            let mut v = vec![Rat::zero(); nn];
            v[k] = Rat::one();
            v
        };
        for a in 0..nn {
            for b in 0..nn {
                for cc in 0..nn {
                    let mut jac = self.bracket_g(&self.bracket_g(&e(a), &e(b)), &e(cc));
                    let second = self.bracket_g(&self.bracket_g(&e(b), &e(cc)), &e(a));
                    let third = self.bracket_g(&self.bracket_g(&e(cc), &e(a)), &e(b));
                    for (x, (y, z)) in jac.iter_mut().zip(second.iter().zip(&third)) {
                        *x += y;
                        *x += z;
                    }
                    if jac.iter().any(|x| !x.is_zero()) {
                        return Err(Error::JacobiFailure { a, b, c: cc });
                    }
                }
            }
        }
        let h_rows: Vec<Vec<Rat>> = self.h.basis_rows().map(|r| r.to_vec()).collect();
        for (i, u) in h_rows.iter().enumerate() {
            for (j, v) in h_rows.iter().enumerate().take(i) {
                if !self.h.contains(&self.bracket_g(u, v)) {
                    return Err(Error::SubalgebraNotClosed { i, j });
                }
            }
        }
        let frame = self.frame_matrix();
        if frame.rows() != nn || frame.rank() != nn {
            return Err(Error::BadSplitting {
                rank: frame.rank(),
                expected: nn,
            });
        }
        // isotropy: for H ∈ 𝔥 the connection must be the induced action on
        // 𝔤/𝔥, and it must be equivariant for the 𝔥-action on 𝔤.
        for (index, hrow) in h_rows.iter().enumerate() {
            let iso = self.isotropy_matrix(hrow)?;
            if self.connection_of(hrow) != iso {
                return Err(Error::ConnectionNotIsotropy { index });
            }
        }
        for (h_index, hrow) in h_rows.iter().enumerate() {
            let ah = self.connection_of(hrow);
            for g_index in 0..nn {
                let bracket = self.bracket_g(hrow, &e(g_index));
                let lhs = self.connection_of(&bracket);
                let rhs = Matrix::commutator(&ah, &self.connection[g_index]);
                if lhs != rhs {
                    return Err(Error::ConnectionNotEquivariant { h_index, g_index });
                }
            }
        }
        // faithful isotropy: H ↦ action on 𝔤/𝔥 must be injective on 𝔥
        if !h_rows.is_empty() {
            let mut rows = Vec::new();
            for hrow in &h_rows {
                rows.push(self.isotropy_matrix(hrow)?.flatten());
            }
            if Matrix::from_rows(rows).rank() != h_rows.len() {
                return Err(Error::NonFaithfulIsotropy);
            }
        }
        Ok(())
    }

    /// Matrix of the action of u ∈ 𝔤 on 𝔤/𝔥 ≅ V in the split frame.
    fn isotropy_matrix(&self, u: &[Rat]) -> Result<Matrix> {
        let n = self.v_dim();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let col = self.project(&self.bracket_g(u, self.split.row(j)))?;
            for (i, v) in col.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }
}

/// Curvature–torsion–connection triple of a validated Lie pair:
///   A_{e_i} = A_{s_i},  R(e_i,e_j) = [A_{s_i}, A_{s_j}] − A_{[s_i,s_j]},
///   T(e_i,e_j) = A_{s_i} e_j − A_{s_j} e_i − proj([s_i, s_j]).
pub fn triple_from_lie_pair(p: &LiePair) -> Result<Triple> {
    p.validate()?;
    let n = p.v_dim();
    let a: Vec<Vec<Vec<Rat>>> = (0..n)
        .map(|i| p.connection_of(p.split.row(i)).row_vecs())
        .collect();
    let mut r = vec![vec![vec![vec![Rat::zero(); n]; n]; n]; n];
    let mut t = vec![vec![vec![Rat::zero(); n]; n]; n];
    for i in 0..n {
        let ai = p.connection_of(p.split.row(i));
        for j in 0..n {
            let aj = p.connection_of(p.split.row(j));
            let br = p.bracket_g(p.split.row(i), p.split.row(j));
            let rm = Matrix::commutator(&ai, &aj) - p.connection_of(&br);
            r[i][j] = rm.row_vecs();
            let proj = p.project(&br)?;
            let tv: Vec<Rat> = ai
                .column(j)
                .iter()
                .zip(aj.column(i))
                .zip(proj)
                .map(|((x, y), z)| x - &y - z)
                .collect();
            t[i][j] = tv;
        }
    }
    Triple::from_components(n, &a, &r, &t)
}

/// Assemble the transvection-style Lie pair 𝔤 = 𝔥 + span{A_x ⊕ x} inside
/// the skew algebra of a member triple. Preconditions: both Bianchi
/// residuals vanish and `verify_subalgebra_conditions(h, t)` holds.
pub fn assemble_g(h: &Subspace, t: &Triple) -> Result<LiePair> {
    let n = t.dim();
    let report = verify_subalgebra_conditions(h, t)?;
    if !report.all() {
        return Err(Error::SubalgebraConditions(format!("{report:?}")));
    }
    let (b1, b2) = t.bianchi_residuals();
    if !b1.is_zero() || !b2.is_zero() {
        return Err(Error::Precondition(
            "Bianchi residuals must vanish before assembling".into(),
        ));
    }
    let mut basis: Vec<SkewElement> = h
        .basis_rows()
        .map(|row| SkewElement::new(Matrix::from_flat(n, row), vec![Rat::zero(); n]))
        .collect();
    for i in 0..n {
        let mut e = vec![Rat::zero(); n];
        e[i] = Rat::one();
        basis.push(SkewElement::new(t.a_mat(i), e));
    }
    let nn = basis.len();
    // columns of this matrix are the embedded basis elements
    let embed = Matrix::from_rows(basis.iter().map(SkewElement::flatten).collect()).transpose();
    let mut c = vec![vec![vec![Rat::zero(); nn]; nn]; nn];
    for (a, x) in basis.iter().enumerate() {
        for (b, y) in basis.iter().enumerate().take(a) {
            let br = bracket(t, x, y);
            let coords = embed.solve(&br.flatten()).ok_or(Error::ClosureFailure)?;
            for k in 0..nn {
                c[b][a][k] = -&coords[k];
            }
            c[a][b] = coords;
        }
    }
    let h_dim = h.dim();
    let mut split = Matrix::zeros(n, nn);
    for i in 0..n {
        split.set(i, h_dim + i, Rat::one());
    }
    let abstract_h = Subspace::from_rows(
        nn,
        (0..h_dim)
            .map(|k| {
                let mut v = vec![Rat::zero(); nn];
                v[k] = Rat::one();
                v
            })
            .collect(),
    );
    let connection = basis.iter().map(|el| el.endo.clone()).collect();
    let pair = LiePair {
        dim_g: nn,
        c,
        h: abstract_h,
        split,
        connection,
    };
    pair.validate()?;
    Ok(pair)
}
