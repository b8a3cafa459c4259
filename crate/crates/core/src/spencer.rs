use crate::error::{Error, Result};
use crate::filtration::{gl_ambient, membership, stabilizer_filtration, Filtration};
use crate::matrix::Matrix;
use crate::rat::Rat;
use crate::subspace::Subspace;
use crate::tensor::pullback_tensor;
use crate::triple::{Component, Triple};
use std::collections::BTreeMap;

/// One graded piece 𝔥^r = 𝔥_{r−1} / 𝔥_r of the stabilizer comodule,
/// stored as the pair of subspaces plus chosen complement representatives.
#[derive(Clone, Debug)]
pub struct Piece {
    pub upper: Subspace,
    pub lower: Subspace,
    /// representatives of a basis of upper/lower
    pub reps: Vec<Vec<Rat>>,
}

impl Piece {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }
}

/// The comodule of graded pieces with its derivative maps
///   (∂/∂x)(𝔛 + 𝔥_r) = [𝔛, A_x] − A_{𝔛x} + 𝔥_{r−1},
/// mapping 𝔥^r → 𝔥^{r−1}. The degree-0 piece is End V / 𝔥_0 regardless of
/// the ambient used to compute the chain. The derivative maps in different
/// directions commute precisely on member triples; construction fails
/// otherwise.
#[derive(Clone, Debug)]
pub struct Comodule {
    pub dim_v: usize,
    pub pieces: Vec<Piece>,
    /// deriv[r][a]: matrix of ∂/∂e_a from piece r to piece r−1
    /// (deriv[0][a] maps into the zero piece and has no rows)
    pub deriv: Vec<Vec<Matrix>>,
}

impl Comodule {
    pub fn piece_dim(&self, r: usize) -> usize {
        self.pieces.get(r).map_or(0, Piece::dim)
    }
}

/// Coordinates of w in upper/lower relative to the piece's representatives.
fn class_coords(piece: &Piece, w: &[Rat]) -> Option<Vec<Rat>> {
    let mut rows = piece.lower.basis().row_vecs();
    rows.extend(piece.reps.iter().cloned());
    if rows.is_empty() {
        return if w.iter().all(Rat::is_zero) {
            Some(Vec::new())
        } else {
            None
        };
    }
    let coords = Matrix::from_rows(rows).transpose().solve(w)?;
    Some(coords[piece.lower.dim()..].to_vec())
}

pub fn build_comodule(t: &Triple, f: &Filtration) -> Result<Comodule> {
    let n = t.dim();
    let gl = gl_ambient(n);
    let mut pieces = Vec::with_capacity(f.steps.len());
    for r in 0..f.steps.len() {
        let upper = if r == 0 { gl.clone() } else { f.steps[r - 1].clone() };
        let lower = f.steps[r].clone();
        let reps = lower.complement_reps_in(&upper);
        pieces.push(Piece { upper, lower, reps });
    }
    let mut deriv: Vec<Vec<Matrix>> = Vec::with_capacity(pieces.len());
    for (r, piece) in pieces.iter().enumerate() {
        let target_dim = if r == 0 { 0 } else { pieces[r - 1].dim() };
        let mut maps = vec![Matrix::zeros(target_dim, piece.dim()); n];
        if r > 0 {
            for (col, rep) in piece.reps.iter().enumerate() {
                let x = Matrix::from_flat(n, rep);
                for (a, map) in maps.iter_mut().enumerate() {
                    let w = Matrix::commutator(&x, &t.a_mat(a)) - t.a_of(&x.column(a));
                    let coords = class_coords(&pieces[r - 1], &w.flatten()).ok_or_else(|| {
                        Error::Precondition(
                            "derivative value escapes the next graded piece".into(),
                        )
                    })?;
                    for (row, v) in coords.into_iter().enumerate() {
                        map.set(row, col, v);
                    }
                }
            }
        }
        deriv.push(maps);
    }
    // commutation of the directional derivatives characterises membership
    for r in 2..pieces.len() {
        for y in 0..n {
            for z in 0..y {
                let lhs = &deriv[r - 1][y] * &deriv[r][z];
                let rhs = &deriv[r - 1][z] * &deriv[r][y];
                if lhs != rhs {
                    return Err(Error::Precondition(format!(
                        "derivative maps in directions {y} and {z} do not commute at degree {r}"
                    )));
                }
            }
        }
    }
    Ok(Comodule {
        dim_v: n,
        pieces,
        deriv,
    })
}

/// All strictly increasing k-tuples from {0..n}, lexicographically ordered.
fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // rightmost position that can still advance
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Matrix of the Spencer coboundary
///   B : Λ^k V* ⊗ 𝔥^r → Λ^{k+1} V* ⊗ 𝔥^{r−1},
///   (Bη)(x_0..x_k) = Σ_μ (−1)^μ (∂/∂x_μ) η(x_0,…,x̂_μ,…,x_k),
/// in the basis of increasing index tuples times piece coordinates.
pub fn spencer_coboundary(c: &Comodule, r: usize, k: usize) -> Matrix {
    let n = c.dim_v;
    let dim_src = c.piece_dim(r);
    let dim_dst = if r == 0 { 0 } else { c.piece_dim(r - 1) };
    let src_tuples = k_subsets(n, k);
    let dst_tuples = k_subsets(n, k + 1);
    let mut out = Matrix::zeros(dst_tuples.len() * dim_dst, src_tuples.len() * dim_src);
    if dim_src == 0 || dim_dst == 0 {
        return out;
    }
    for (u_idx, u) in dst_tuples.iter().enumerate() {
        for (mu, &x) in u.iter().enumerate() {
            let s: Vec<usize> = u
                .iter()
                .enumerate()
                .filter(|&(pos, _)| pos != mu)
                .map(|(_, &v)| v)
                .collect();
            let s_idx = src_tuples.binary_search(&s).expect("subset of a tuple");
            let map = &c.deriv[r][x];
            let negate = mu % 2 == 1;
            for d in 0..dim_dst {
                for cc in 0..dim_src {
                    let v = map.get(d, cc);
                    if v.is_zero() {
                        continue;
                    }
                    let row = u_idx * dim_dst + d;
                    let col = s_idx * dim_src + cc;
                    let cur = out.get(row, col);
                    out.set(row, col, if negate { cur - v } else { cur + v });
                }
            }
        }
    }
    out
}

/// Spencer cohomology dimensions H^{r,k} computed by rank–nullity on the
/// coboundary matrices.
#[derive(Clone, Debug)]
pub struct SpencerTable {
    /// (r, k) → dim H^{r,k}
    pub dims: BTreeMap<(usize, usize), usize>,
}

impl SpencerTable {
    pub fn dim(&self, r: usize, k: usize) -> usize {
        self.dims.get(&(r, k)).copied().unwrap_or(0)
    }
}

pub fn spencer_cohomology(c: &Comodule, k_max: usize) -> SpencerTable {
    let n = c.dim_v;
    let mut dims = BTreeMap::new();
    let mut rank_cache: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let rank_of = |c: &Comodule, r: usize, k: usize, cache: &mut BTreeMap<(usize, usize), usize>| {
        *cache
            .entry((r, k))
            .or_insert_with(|| spencer_coboundary(c, r, k).rank())
    };
    for r in 0..c.pieces.len() {
        for k in 0..=k_max.min(n) {
            let cols = binom(n, k) * c.piece_dim(r);
            let rank_out = rank_of(c, r, k, &mut rank_cache);
            let rank_in = if k == 0 || r + 1 >= c.pieces.len() {
                0
            } else {
                rank_of(c, r + 1, k - 1, &mut rank_cache)
            };
            dims.insert((r, k), cols - rank_out - rank_in);
        }
    }
    SpencerTable { dims }
}

/// B ∘ B = 0 in every bidegree (exactness of consecutive coboundaries).
pub fn b_squared_holds(c: &Comodule) -> bool {
    let n = c.dim_v;
    for r in 2..c.pieces.len() {
        for k in 0..n {
            let inner = spencer_coboundary(c, r, k);
            let outer = spencer_coboundary(c, r - 1, k + 1);
            if !(&outer * &inner).is_zero() {
                return false;
            }
        }
    }
    true
}

pub(crate) fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Dimensions dim H^{r,1} for r = 1..=singer of a member triple: the formal
/// tangent directions of the moduli problem in each positive degree. Errors
/// on non-members.
pub fn formal_tangent_dims(t: &Triple, ambient: &Subspace) -> Result<Vec<usize>> {
    let report = membership(t, ambient);
    if !report.verdict {
        return Err(Error::Precondition(
            "formal tangents are defined for member triples only".into(),
        ));
    }
    let c = build_comodule(t, &report.filtration)?;
    let table = spencer_cohomology(&c, 1);
    Ok((1..c.pieces.len()).map(|r| table.dim(r, 1)).collect())
}

/// Contact comparison of two triples along an invertible map F.
#[derive(Clone, Debug)]
pub struct ContactReport {
    /// F*T̃ = T and F*R̃ = R exactly (contact to order 0)
    pub curvature_torsion_match: bool,
    /// largest finite contact order when not in contact to all orders;
    /// None when even order 0 fails
    pub max_finite_order: Option<usize>,
    pub all_orders: bool,
    pub requested_order: usize,
    pub holds_at_requested: bool,
    pub singer: i64,
}

/// Contact of order d via the filtration criterion: curvature and torsion
/// match on the nose and F*Ã − A takes values in 𝔥_{d−1} of the first
/// triple. Contact beyond the Singer invariant is contact to all orders.
pub fn verify_contact(t1: &Triple, t2: &Triple, f: &Matrix, d: usize) -> Result<ContactReport> {
    if t1.dim() != t2.dim() {
        return Err(Error::DimensionMismatch(
            "contact requires triples on the same space".into(),
        ));
    }
    let n = t1.dim();
    let pulled = t2.pullback(f)?;
    let curvature_torsion_match =
        pulled.curvature() == t1.curvature() && pulled.torsion() == t1.torsion();
    let filtration = stabilizer_filtration(t1, &gl_ambient(n));
    let diffs: Vec<Vec<Rat>> = (0..n)
        .map(|a| (pulled.a_mat(a) - t1.a_mat(a)).flatten())
        .collect();
    let (max_finite_order, all_orders) = if !curvature_torsion_match {
        (None, false)
    } else {
        // depth: number of consecutive chain steps containing all diffs
        let mut depth = 0usize;
        for step in &filtration.steps {
            if diffs.iter().all(|v| step.contains(v)) {
                depth += 1;
            } else {
                break;
            }
        }
        if depth == filtration.steps.len() {
            // values lie in 𝔥_∞: contact to every order
            (None, true)
        } else {
            (Some(depth), false)
        }
    };
    let holds_at_requested = curvature_torsion_match
        && (all_orders || max_finite_order.is_some_and(|m| d <= m));
    Ok(ContactReport {
        curvature_torsion_match,
        max_finite_order,
        all_orders,
        requested_order: d,
        holds_at_requested,
        singer: filtration.singer,
    })
}

/// Contact of order d straight from the definition: the pullbacks of all
/// covariant derivatives ∇^r R̃ and ∇^r T̃ for r ≤ d match those of the
/// first triple.
pub fn verify_contact_defn(t1: &Triple, t2: &Triple, f: &Matrix, d: usize) -> Result<bool> {
    if t1.dim() != t2.dim() {
        return Err(Error::DimensionMismatch(
            "contact requires triples on the same space".into(),
        ));
    }
    let f_inv = f.inverse()?;
    for r in 0..=d {
        let pr = pullback_tensor(f, &f_inv, &t2.nabla(Component::Curvature, r));
        if pr != t1.nabla(Component::Curvature, r) {
            return Ok(false);
        }
        let pt = pullback_tensor(f, &f_inv, &t2.nabla(Component::Torsion, r));
        if pt != t1.nabla(Component::Torsion, r) {
            return Ok(false);
        }
    }
    Ok(true)
}
