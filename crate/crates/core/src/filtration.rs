use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rat::Rat;
use crate::subspace::{RowAccumulator, Subspace};
use crate::tensor::{circledast, star_action, Tensor};
use crate::triple::Triple;

/// Descending chain of stabilizer subalgebras 𝔥_0 ⊇ 𝔥_1 ⊇ … inside an
/// ambient subalgebra of End V, together with the Singer invariant: the
/// smallest s ≥ −1 with 𝔥_s = 𝔥_{s+1} (𝔥_{−1} denotes the ambient).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    pub ambient: Subspace,
    /// 𝔥_0, 𝔥_1, …, 𝔥_s (the first stationary term is the last entry)
    pub steps: Vec<Subspace>,
    pub singer: i64,
    /// false only when a step cap truncated the chain before stationarity
    pub complete: bool,
}

impl Filtration {
    /// 𝔥_r with the stationary convention: r = −1 is the ambient, indices
    /// past the chain return the stable subalgebra 𝔥_∞.
    pub fn h(&self, r: i64) -> &Subspace {
        if r < 0 {
            &self.ambient
        } else {
            let r = (r as usize).min(self.steps.len() - 1);
            &self.steps[r]
        }
    }

    pub fn h_infinity(&self) -> &Subspace {
        self.steps.last().unwrap_or(&self.ambient)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.steps.iter().map(Subspace::dim).collect()
    }
}

/// Stabilizer of a tensor inside an ambient subalgebra of End V:
/// { X ∈ ambient : X ★ t = 0 }.
pub fn stabilizer(t: &Tensor, ambient: &Subspace) -> Subspace {
    let n = t.dim();
    assert_eq!(ambient.ambient_dim(), n * n);
    let basis: Vec<Matrix> = ambient
        .basis_rows()
        .map(|r| Matrix::from_flat(n, r))
        .collect();
    let starred: Vec<Tensor> = basis.iter().map(|x| star_action(x, t)).collect();
    let mut acc = RowAccumulator::new(ambient.dim());
    'entries: for e in 0..t.entries().len() {
        if starred.iter().all(|s| s.entries()[e].is_zero()) {
            continue;
        }
        acc.push(starred.iter().map(|s| s.entries()[e].clone()).collect());
        if acc.is_full_rank() {
            break 'entries;
        }
    }
    combine(ambient, &acc.kernel())
}

/// Next step of the recursive filtration:
/// 𝔥' = { X ∈ 𝔥 : [X, A_x] − A_{Xx} ∈ 𝔥 for all x }.
pub fn derived_subalgebra(h: &Subspace, t: &Triple) -> Subspace {
    let n = t.dim();
    assert_eq!(h.ambient_dim(), n * n);
    if h.dim() == 0 {
        return h.clone();
    }
    let basis: Vec<Matrix> = h.basis_rows().map(|r| Matrix::from_flat(n, r)).collect();
    let mut acc = RowAccumulator::new(h.dim());
    // residual of [X_k, A_{e_a}] − A_{X_k e_a} modulo 𝔥, per basis vector
    let mut residuals: Vec<Vec<Vec<Rat>>> = Vec::with_capacity(n);
    for a in 0..n {
        let a_mat = t.a_mat(a);
        residuals.push(
            basis
                .iter()
                .map(|x| {
                    let w = Matrix::commutator(x, &a_mat) - t.a_of(&x.column(a));
                    h.reduce(&w.flatten())
                })
                .collect(),
        );
    }
    'rows: for a in 0..n {
        for comp in 0..n * n {
            if residuals[a].iter().all(|r| r[comp].is_zero()) {
                continue;
            }
            acc.push(residuals[a].iter().map(|r| r[comp].clone()).collect());
            if acc.is_full_rank() {
                break 'rows;
            }
        }
    }
    combine_within(h, &acc.kernel())
}

/// Recursive stabilizer filtration: 𝔥_0 = stab(R) ∩ stab(T) in the ambient,
/// 𝔥_{r+1} = derived_subalgebra(𝔥_r).
pub fn stabilizer_filtration(t: &Triple, ambient: &Subspace) -> Filtration {
    let h0 = stabilizer(t.curvature(), ambient)
        .intersect(&stabilizer(t.torsion(), ambient))
        .expect("same ambient");
    build_chain(ambient.clone(), h0, usize::MAX, |prev, _| {
        derived_subalgebra(prev, t)
    })
}

/// Joint-stabilizer filtration: 𝔥_r is the common stabilizer of the
/// covariant derivatives ∇^k R and ∇^k T for k ≤ r, computed stepwise as
/// 𝔥_r = 𝔥_{r−1} ∩ stab(∇^r R) ∩ stab(∇^r T). An independent route to the
/// same chain; `r_max` caps the number of derivative levels.
pub fn joint_stabilizer_filtration(t: &Triple, ambient: &Subspace, r_max: usize) -> Filtration {
    let h0 = stabilizer(t.curvature(), ambient)
        .intersect(&stabilizer(t.torsion(), ambient))
        .expect("same ambient");
    let n = t.dim();
    // derivative chains one level behind the current step, so that level-r
    // constraints are expressed through ∇^{r−1} via
    //   (X ★ ∇^r S)(e_a, rest) = (X ★ (A_a ★ S'))(rest) − (A_{Xe_a} ★ S')(rest)
    // which is the definition of ★ unrolled on the leading slot.
    let mut s_r = t.curvature().clone();
    let mut s_t = t.torsion().clone();
    let mut advanced = 0usize;
    build_chain(ambient.clone(), h0, r_max, |prev, r| {
        while advanced < r - 1 {
            s_r = circledast(t.connection(), &s_r);
            s_t = circledast(t.connection(), &s_t);
            advanced += 1;
        }
        let basis: Vec<Matrix> = prev.basis_rows().map(|b| Matrix::from_flat(n, b)).collect();
        let mut acc = RowAccumulator::new(prev.dim());
        'outer: for s_prev in [&s_r, &s_t] {
            for a in 0..n {
                let u_a = star_action(&t.a_mat(a), s_prev);
                let deltas: Vec<Tensor> = basis
                    .iter()
                    .map(|x| {
                        star_action(x, &u_a).sub(&star_action(&t.a_of(&x.column(a)), s_prev))
                    })
                    .collect();
                for e in 0..u_a.entries().len() {
                    if deltas.iter().all(|d| d.entries()[e].is_zero()) {
                        continue;
                    }
                    acc.push(deltas.iter().map(|d| d.entries()[e].clone()).collect());
                    if acc.is_full_rank() {
                        break 'outer;
                    }
                }
            }
        }
        combine_within(prev, &acc.kernel())
    })
}

/// Shared chain driver: steps = [𝔥_0, …] until stationary (or the cap).
/// `next(prev, r)` must return 𝔥_r given 𝔥_{r−1} for r ≥ 1.
fn build_chain(
    ambient: Subspace,
    h0: Subspace,
    r_max: usize,
    mut next: impl FnMut(&Subspace, usize) -> Subspace,
) -> Filtration {
    let mut steps = vec![h0];
    let mut singer;
    let mut complete = true;
    loop {
        let r = steps.len();
        let prev = steps.last().unwrap();
        if prev.dim() == 0 {
            // the chain is descending, so it is already stationary at zero
            singer = (r - 1) as i64;
            break;
        }
        if r > r_max {
            singer = (r - 1) as i64;
            complete = false;
            break;
        }
        let nxt = next(prev, r);
        debug_assert!(nxt.is_subspace_of(prev));
        if &nxt == prev {
            singer = (r - 1) as i64;
            break;
        }
        steps.push(nxt);
    }
    if singer == 0 && steps[0] == ambient {
        singer = -1;
    }
    Filtration {
        ambient,
        steps,
        singer,
        complete,
    }
}

/// Lift coordinate vectors (relative to the basis of `space`) back into the
/// ambient Q^(n²).
fn combine(space: &Subspace, coords: &Subspace) -> Subspace {
    combine_within(space, coords)
}

fn combine_within(space: &Subspace, coords: &Subspace) -> Subspace {
    let rows: Vec<Vec<Rat>> = coords
        .basis_rows()
        .map(|cs| {
            let mut v = vec![Rat::zero(); space.ambient_dim()];
            for (c, row) in cs.iter().zip(space.basis_rows()) {
                if c.is_zero() {
                    continue;
                }
                for (vi, ri) in v.iter_mut().zip(row) {
                    if !ri.is_zero() {
                        *vi += &(c * ri);
                    }
                }
            }
            v
        })
        .collect();
    Subspace::from_rows(space.ambient_dim(), rows)
}

/// Outcome of the membership test for the moduli space of invariant
/// connection–curvature–torsion data inside the chosen ambient algebra.
#[derive(Clone, Debug)]
pub struct MembershipReport {
    /// d^{(A,T)} T = R ∧ id
    pub bianchi_first: bool,
    /// d^{(A,T)} R = 0
    pub bianchi_second: bool,
    /// Q(A,T) ≡ R modulo Λ²V* ⊗ 𝔥_∞
    pub q_congruence: bool,
    pub filtration: Filtration,
    pub verdict: bool,
}

/// Membership test: both Bianchi residuals vanish and the approximate
/// curvature is congruent to R modulo the stable stabilizer subalgebra.
pub fn membership(t: &Triple, ambient: &Subspace) -> MembershipReport {
    let (b1, b2) = t.bianchi_residuals();
    let bianchi_first = b1.is_zero();
    let bianchi_second = b2.is_zero();
    let filtration = stabilizer_filtration(t, ambient);
    let q_congruence = q_congruent_mod(t, filtration.h_infinity());
    let verdict = bianchi_first && bianchi_second && q_congruence;
    MembershipReport {
        bianchi_first,
        bianchi_second,
        q_congruence,
        filtration,
        verdict,
    }
}

/// Q(A,T) ≡ R modulo Λ²V* ⊗ h, checked on basis pairs.
pub fn q_congruent_mod(t: &Triple, h: &Subspace) -> bool {
    let n = t.dim();
    let q = t.approximate_curvature();
    (0..n).all(|a| {
        (0..a).all(|b| {
            let diff = q.value_endo(&[a, b]) - t.curvature().value_endo(&[a, b]);
            h.contains(&diff.flatten())
        })
    })
}

/// One level of the direct equation system.
#[derive(Clone, Debug)]
pub struct DirectResidual {
    pub r: usize,
    /// (Q − R) ⊛ ∇^r T
    pub torsion_residual: Tensor,
    /// (Q − R) ⊛ ∇^r R
    pub curvature_residual: Tensor,
}

/// Materialized residual tensors (Q−R) ⊛ ∇^r T and (Q−R) ⊛ ∇^r R for
/// r = 0..=r_max. Beware: the arity grows with r; use
/// `direct_equations_hold` for large r.
pub fn direct_equations(t: &Triple, r_max: usize) -> Vec<DirectResidual> {
    let q_minus_r = t.approximate_curvature().sub(t.curvature());
    let mut s_t = t.torsion().clone();
    let mut s_r = t.curvature().clone();
    let mut out = Vec::with_capacity(r_max + 1);
    for r in 0..=r_max {
        out.push(DirectResidual {
            r,
            torsion_residual: circledast(&q_minus_r, &s_t),
            curvature_residual: circledast(&q_minus_r, &s_r),
        });
        if r < r_max {
            s_t = circledast(t.connection(), &s_t);
            s_r = circledast(t.connection(), &s_r);
        }
    }
    out
}

/// Whether every direct equation up to level r_max holds, evaluated
/// streaming ((Q−R)_{x,y} ★ ∇^r S per basis pair) with short-circuit on the
/// first nonzero residual.
pub fn direct_equations_hold(t: &Triple, r_max: usize) -> bool {
    let n = t.dim();
    let q_minus_r = t.approximate_curvature().sub(t.curvature());
    let mats: Vec<Matrix> = (0..n)
        .flat_map(|a| (0..a).map(move |b| (a, b)))
        .map(|(a, b)| q_minus_r.value_endo(&[a, b]))
        .filter(|m| !m.is_zero())
        .collect();
    if mats.is_empty() {
        return true;
    }
    let mut s_t = t.torsion().clone();
    let mut s_r = t.curvature().clone();
    for r in 0..=r_max {
        for m in &mats {
            if !star_action(m, &s_t).is_zero() || !star_action(m, &s_r).is_zero() {
                return false;
            }
        }
        if r < r_max {
            s_t = circledast(t.connection(), &s_t);
            s_r = circledast(t.connection(), &s_r);
        }
    }
    true
}

/// Specialised membership families.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variant {
    /// torsion-free data (T = 0)
    TorsionFree,
    /// reductive data (A = 0)
    Reductive,
}

#[derive(Clone, Debug)]
pub struct VariantReport {
    pub checks: Vec<(String, bool)>,
    pub verdict: bool,
}

/// Membership test for the torsion-free (T = 0) and reductive (A = 0)
/// specialisations; errors if the precondition fails. `r_max` bounds the
/// derivative depth of the torsion-free equation family.
pub fn membership_variant(t: &Triple, variant: Variant, r_max: usize) -> Result<VariantReport> {
    let mut checks = Vec::new();
    match variant {
        Variant::TorsionFree => {
            if !t.torsion().is_zero() {
                return Err(Error::Precondition(
                    "torsion-free variant requires T = 0".into(),
                ));
            }
            checks.push(("R ∧ id = 0".to_owned(), t.r_wedge_id().is_zero()));
            checks.push((
                "d^{(A,0)} R = 0".to_owned(),
                t.twisted_d(t.curvature()).expect("alternating").is_zero(),
            ));
            checks.push((
                format!("(Q − R) ⊛ ∇^r R = 0 for r ≤ {r_max}"),
                direct_equations_hold(t, r_max),
            ));
        }
        Variant::Reductive => {
            if !t.connection().is_zero() {
                return Err(Error::Precondition(
                    "reductive variant requires A = 0".into(),
                ));
            }
            let d_t = t.twisted_d(t.torsion()).expect("alternating");
            checks.push((
                "d^{(0,T)} T = R ∧ id".to_owned(),
                d_t.sub(&t.r_wedge_id()).is_zero(),
            ));
            checks.push((
                "d^{(0,T)} R = 0".to_owned(),
                t.twisted_d(t.curvature()).expect("alternating").is_zero(),
            ));
            checks.push((
                "R ⊛ T = 0".to_owned(),
                circledast(t.curvature(), t.torsion()).is_zero(),
            ));
            checks.push((
                "R ⊛ R = 0".to_owned(),
                circledast(t.curvature(), t.curvature()).is_zero(),
            ));
        }
    }
    let verdict = checks.iter().all(|(_, ok)| *ok);
    Ok(VariantReport { checks, verdict })
}

/// The full ambient gl(V) as a subspace of Q^(n²).
pub fn gl_ambient(n: usize) -> Subspace {
    Subspace::full(n * n)
}
