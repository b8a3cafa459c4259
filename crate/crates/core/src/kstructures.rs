use crate::error::{Error, Result};
use crate::filtration::{membership, MembershipReport};
use crate::matrix::Matrix;
use crate::rat::Rat;
use crate::subspace::Subspace;
use crate::tensor::{multi_indices, star_action, Tensor, ValueKind};
use crate::triple::Triple;

/// Ambient matrix subalgebra 𝔨 ⊆ gl(V) used to restrict the moduli problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KKind {
    Gl,
    So,
    Custom,
}

#[derive(Clone, Debug)]
pub struct KAlgebra {
    pub kind: KKind,
    pub dim_v: usize,
    pub subspace: Subspace,
    pub metric: Option<Matrix>,
}

impl KAlgebra {
    pub fn gl(n: usize) -> KAlgebra {
        KAlgebra {
            kind: KKind::Gl,
            dim_v: n,
            subspace: Subspace::full(n * n),
            metric: None,
        }
    }

    /// so(g) = { X : g(Xv, w) + g(v, Xw) = 0 }, i.e. XᵀG + GX = 0, for a
    /// symmetric invertible metric G.
    pub fn so(metric: &Matrix) -> Result<KAlgebra> {
        let n = metric.rows();
        if !metric.is_symmetric() {
            let bad = (0..n)
                .flat_map(|i| (0..i).map(move |j| (i, j)))
                .find(|&(i, j)| metric.get(i, j) != metric.get(j, i))
                .unwrap_or((0, 0));
            return Err(Error::MetricNotSymmetric { i: bad.0, j: bad.1 });
        }
        metric.inverse()?;
        // constraint rows indexed by (i,j); unknowns X[k][l]
        let mut m = Matrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    // X[k][i] G[k][j] term
                    let cur = m.get(i * n + j, k * n + i) + metric.get(k, j);
                    m.set(i * n + j, k * n + i, cur);
                    // G[i][k] X[k][j] term
                    let cur = m.get(i * n + j, k * n + j) + metric.get(i, k);
                    m.set(i * n + j, k * n + j, cur);
                }
            }
        }
        Ok(KAlgebra {
            kind: KKind::So,
            dim_v: n,
            subspace: m.kernel(),
            metric: Some(metric.clone()),
        })
    }

    /// Custom commutator-closed subspace of gl(V).
    pub fn custom(n: usize, subspace: Subspace) -> Result<KAlgebra> {
        if subspace.ambient_dim() != n * n {
            return Err(Error::AmbientMismatch {
                left: subspace.ambient_dim(),
                right: n * n,
            });
        }
        let basis: Vec<Matrix> = subspace
            .basis_rows()
            .map(|r| Matrix::from_flat(n, r))
            .collect();
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate().take(i) {
                if !subspace.contains(&Matrix::commutator(x, y).flatten()) {
                    return Err(Error::NotSubalgebra { i, j });
                }
            }
        }
        Ok(KAlgebra {
            kind: KKind::Custom,
            dim_v: n,
            subspace,
            metric: None,
        })
    }
}

/// Membership report for the 𝔨-restricted moduli space: the triple must be
/// 𝔨-valued (connection in V*⊗𝔨, curvature in Λ²V*⊗𝔨) and a member of the
/// moduli space computed inside the ambient 𝔨.
#[derive(Clone, Debug)]
pub struct KMembershipReport {
    pub connection_k_valued: bool,
    pub curvature_k_valued: bool,
    pub inner: MembershipReport,
    pub verdict: bool,
}

pub fn membership_k(t: &Triple, k: &KAlgebra) -> KMembershipReport {
    let n = t.dim();
    let connection_k_valued = (0..n).all(|a| k.subspace.contains(&t.a_mat(a).flatten()));
    let curvature_k_valued = (0..n).all(|a| {
        (0..a).all(|b| k.subspace.contains(&t.curvature().value_endo(&[a, b]).flatten()))
    });
    let inner = membership(t, &k.subspace);
    let verdict = connection_k_valued && curvature_k_valued && inner.verdict;
    KMembershipReport {
        connection_k_valued,
        curvature_k_valued,
        inner,
        verdict,
    }
}

/// Candidate special-unitary structure on V = Q^(2n): a symmetric metric g,
/// an almost-complex operator I, and a scalar n-form ψ (the real part of a
/// complex volume form).
#[derive(Clone, Debug)]
pub struct SuStructure {
    pub metric: Matrix,
    pub complex_op: Matrix,
    pub psi: Tensor,
}

#[derive(Clone, Debug)]
pub struct SuReport {
    /// I² = −id
    pub complex_square: bool,
    /// g(I·, I·) = g
    pub metric_compatible: bool,
    /// ψ is alternating of the right arity
    pub psi_alternating: bool,
    /// Der_I² ψ = −n² ψ
    pub derivation_eigenvalue: bool,
    /// ‖ψ‖² = g⁻¹(ψ, ψ)
    pub norm: Rat,
    /// ‖ψ‖² = 2^{n−1}
    pub norm_ok: bool,
    pub verdict: bool,
}

/// Derivation Der_I ψ (v_1..v_k) = Σ_μ ψ(v_1,…,I v_μ,…,v_k) of a scalar
/// form by an operator; equals −(I ★ ψ).
pub fn derivation(op: &Matrix, psi: &Tensor) -> Tensor {
    assert_eq!(psi.value_kind(), ValueKind::Scalar);
    star_action(op, psi).scale(&Rat::from_int(-1))
}

/// Norm square g⁻¹(ψ, ψ) of a scalar k-form: Σ over increasing tuples I, J
/// of ψ_I ψ_J det(g⁻¹[I, J]).
pub fn form_norm_square(metric: &Matrix, psi: &Tensor) -> Result<Rat> {
    let n = psi.dim();
    let k = psi.arity();
    let ginv = metric.inverse()?;
    let tuples = increasing_tuples(n, k);
    let mut acc = Rat::zero();
    for ti in &tuples {
        let pi = psi.get(ti, 0);
        if pi.is_zero() {
            continue;
        }
        for tj in &tuples {
            let pj = psi.get(tj, 0);
            if pj.is_zero() {
                continue;
            }
            let sub = Matrix::from_fn(k, k, |a, b| ginv.get(ti[a], tj[b]).clone());
            let d = det(&sub);
            if !d.is_zero() {
                acc += &(pi * pj) * &d;
            }
        }
    }
    Ok(acc)
}

fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    multi_indices(n, k)
        .filter(|idx| idx.windows(2).all(|w| w[0] < w[1]))
        .collect()
}

fn det(m: &Matrix) -> Rat {
    let n = m.rows();
    if n == 0 {
        return Rat::one();
    }
    // fraction-free is unnecessary at these sizes; Laplace along column 0
    if n == 1 {
        return m.get(0, 0).clone();
    }
    let mut acc = Rat::zero();
    for i in 0..n {
        let c = m.get(i, 0);
        if c.is_zero() {
            continue;
        }
        let minor = Matrix::from_fn(n - 1, n - 1, |r, s| {
            m.get(if r < i { r } else { r + 1 }, s + 1).clone()
        });
        let term = c * &det(&minor);
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Verify the defining equations of an SU(n)-structure on Q^(2n):
/// I² = −id, g(I·,I·) = g, Der_I²ψ = −n²ψ and ‖ψ‖² = 2^{n−1}.
pub fn verify_su_structure(s: &SuStructure, n_complex: usize) -> Result<SuReport> {
    let dim = 2 * n_complex;
    if s.metric.rows() != dim || s.complex_op.rows() != dim || s.psi.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "SU({n_complex}) structure lives on Q^{dim}"
        )));
    }
    if s.psi.arity() != n_complex || s.psi.value_kind() != ValueKind::Scalar {
        return Err(Error::DimensionMismatch(format!(
            "ψ must be a scalar {n_complex}-form"
        )));
    }
    if !s.metric.is_symmetric() {
        return Err(Error::MetricNotSymmetric { i: 0, j: 0 });
    }
    let complex_square = &s.complex_op * &s.complex_op == -Matrix::identity(dim);
    let metric_compatible =
        &(&s.complex_op.transpose() * &s.metric) * &s.complex_op == s.metric;
    let psi_alternating = s.psi.is_fully_alternating();
    let der2 = derivation(&s.complex_op, &derivation(&s.complex_op, &s.psi));
    let scale = Rat::from_int(-((n_complex * n_complex) as i64));
    let derivation_eigenvalue = der2 == s.psi.scale(&scale);
    let norm = form_norm_square(&s.metric, &s.psi)?;
    let norm_ok = norm == Rat::from_int(2).powi(n_complex as i32 - 1);
    let verdict = complex_square
        && metric_compatible
        && psi_alternating
        && derivation_eigenvalue
        && norm_ok;
    Ok(SuReport {
        complex_square,
        metric_compatible,
        psi_alternating,
        derivation_eigenvalue,
        norm,
        norm_ok,
        verdict,
    })
}

/// The flat model structure on Q^(2n) ≅ C^n: standard metric, I sending
/// e_{2k} ↦ e_{2k+1}, e_{2k+1} ↦ −e_{2k} (0-indexed pairs), and
/// ψ = Re det_C of the complexified arguments.
pub fn model_su(n_complex: usize) -> SuStructure {
    let dim = 2 * n_complex;
    let metric = Matrix::identity(dim);
    let mut complex_op = Matrix::zeros(dim, dim);
    for k in 0..n_complex {
        complex_op.set(2 * k + 1, 2 * k, Rat::one());
        complex_op.set(2 * k, 2 * k + 1, Rat::from_int(-1));
    }
    let mut psi = Tensor::zeros(dim, n_complex, ValueKind::Scalar, vec![(0..n_complex).collect()]);
    for idx in multi_indices(dim, n_complex) {
        // complex matrix whose columns are the complexified basis vectors:
        // e_{2k} ↦ e_k, e_{2k+1} ↦ i e_k
        let mut re = Matrix::zeros(n_complex, n_complex);
        let mut im = Matrix::zeros(n_complex, n_complex);
        for (col, &a) in idx.iter().enumerate() {
            if a % 2 == 0 {
                re.set(a / 2, col, Rat::one());
            } else {
                im.set(a / 2, col, Rat::one());
            }
        }
        let (dre, _dim) = complex_det(&re, &im);
        if !dre.is_zero() {
            psi.set(&idx, 0, dre);
        }
    }
    SuStructure {
        metric,
        complex_op,
        psi,
    }
}

/// Determinant of a complex matrix given as (real, imaginary) parts;
/// returns (Re det, Im det). Laplace expansion along the first column.
fn complex_det(re: &Matrix, im: &Matrix) -> (Rat, Rat) {
    let n = re.rows();
    if n == 0 {
        return (Rat::one(), Rat::zero());
    }
    if n == 1 {
        return (re.get(0, 0).clone(), im.get(0, 0).clone());
    }
    let mut acc_re = Rat::zero();
    let mut acc_im = Rat::zero();
    for i in 0..n {
        let (cr, ci) = (re.get(i, 0), im.get(i, 0));
        if cr.is_zero() && ci.is_zero() {
            continue;
        }
        let minor_re = Matrix::from_fn(n - 1, n - 1, |r, s| {
            re.get(if r < i { r } else { r + 1 }, s + 1).clone()
        });
        let minor_im = Matrix::from_fn(n - 1, n - 1, |r, s| {
            im.get(if r < i { r } else { r + 1 }, s + 1).clone()
        });
        let (mr, mi) = complex_det(&minor_re, &minor_im);
        let term_re = cr * &mr - ci * &mi;
        let term_im = cr * &mi + ci * &mr;
        if i % 2 == 0 {
            acc_re += term_re;
            acc_im += term_im;
        } else {
            acc_re -= term_re;
            acc_im -= term_im;
        }
    }
    (acc_re, acc_im)
}
