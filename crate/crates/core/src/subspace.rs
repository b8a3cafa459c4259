use crate::error::{Error, Result};
use crate::matrix::{rref_in_place, Matrix};
use crate::rat::Rat;

/// Linear subspace of Q^n, stored as a reduced-row-echelon basis with zero
/// rows dropped. The representation is canonical: two subspaces are equal
/// iff their stored bases are equal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn from_rows(ambient_dim: usize, rows: Vec<Vec<Rat>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == ambient_dim));
        let mut m = Matrix::from_rows(rows);
        if m.rows() == 0 {
            return Subspace::zero(ambient_dim);
        }
        let pivots = rref_in_place(&mut m);
        let basis = Matrix::from_rows(m.row_vecs().into_iter().take(pivots.len()).collect());
        Subspace {
            ambient_dim,
            basis: if pivots.is_empty() {
                Matrix::zeros(0, ambient_dim)
            } else {
                basis
            },
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Matrix::zeros(0, ambient_dim),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Matrix::identity(ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> impl Iterator<Item = &[Rat]> {
        (0..self.basis.rows()).map(|i| self.basis.row(i))
    }

    /// Residue of v after eliminating along the echelon basis; zero iff v
    /// lies in the subspace.
    pub fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.ambient_dim);
        let mut w = v.to_vec();
        for row in self.basis_rows() {
            let p = row
                .iter()
                .position(|x| !x.is_zero())
                .expect("no zero rows in basis");
            if w[p].is_zero() {
                continue;
            }
            // pivot entries are 1 in reduced echelon form
            let f = w[p].clone();
            for (wj, rj) in w.iter_mut().zip(row) {
                if !rj.is_zero() {
                    *wj = &*wj - &(&f * rj);
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v).iter().all(Rat::is_zero)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim && self.basis_rows().all(|r| other.contains(r))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut rows = self.basis.row_vecs();
        rows.extend(other.basis.row_vecs());
        Ok(Subspace::from_rows(self.ambient_dim, rows))
    }

    /// Intersection by the Zassenhaus block-matrix algorithm: reduce rows
    /// [a|a] for a in the first basis and [b|0] for b in the second; rows
    /// whose left block vanishes carry a basis of the intersection in the
    /// right block.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let n = self.ambient_dim;
        let mut rows = Vec::with_capacity(self.dim() + other.dim());
        for a in self.basis_rows() {
            let mut row = a.to_vec();
            row.extend_from_slice(a);
            rows.push(row);
        }
        for b in other.basis_rows() {
            let mut row = b.to_vec();
            row.extend(std::iter::repeat_with(Rat::zero).take(n));
            rows.push(row);
        }
        if rows.is_empty() {
            return Ok(Subspace::zero(n));
        }
        let mut m = Matrix::from_rows(rows);
        rref_in_place(&mut m);
        let inter: Vec<Vec<Rat>> = m
            .row_vecs()
            .into_iter()
            .filter(|row| row[..n].iter().all(Rat::is_zero))
            .map(|row| row[n..].to_vec())
            .collect();
        Ok(Subspace::from_rows(n, inter))
    }

    /// Representatives of other/self: basis rows of `other` that extend
    /// self to a basis of `other`, in order. Requires self ⊆ other.
    pub fn complement_reps_in(&self, other: &Subspace) -> Vec<Vec<Rat>> {
        debug_assert!(self.is_subspace_of(other));
        let mut acc = self.basis.row_vecs();
        let mut acc_space = self.clone();
        let mut reps = Vec::new();
        for row in other.basis_rows() {
            if !acc_space.contains(row) {
                reps.push(row.to_vec());
                acc.push(row.to_vec());
                acc_space = Subspace::from_rows(self.ambient_dim, acc.clone());
            }
        }
        debug_assert_eq!(self.dim() + reps.len(), other.dim());
        reps
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::AmbientMismatch {
                left: self.ambient_dim,
                right: other.ambient_dim,
            });
        }
        Ok(())
    }
}

/// Incremental echelon accumulator: feeds rows one at a time, keeping only
/// those that enlarge the span. Used to compress huge constraint systems
/// (one row per tensor entry) down to at most `cols` rows before taking a
/// kernel.
pub(crate) struct RowAccumulator {
    cols: usize,
    rows: Vec<Vec<Rat>>,
}

impl RowAccumulator {
    pub fn new(cols: usize) -> Self {
        RowAccumulator {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, mut row: Vec<Rat>) {
        debug_assert_eq!(row.len(), self.cols);
        for r in &self.rows {
            let p = r.iter().position(|x| !x.is_zero()).unwrap();
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (a, b) in row.iter_mut().zip(r) {
                    if !b.is_zero() {
                        *a = &*a - &(&f * b);
                    }
                }
            }
        }
        if let Some(p) = row.iter().position(|x| !x.is_zero()) {
            let inv = row[p].recip();
            if !inv.is_one() {
                for a in row.iter_mut() {
                    if !a.is_zero() {
                        *a = &*a * &inv;
                    }
                }
            }
            // back-substitute into earlier rows to keep the set reduced
            for r in &mut self.rows {
                if !r[p].is_zero() {
                    let f = r[p].clone();
                    for (a, b) in r.iter_mut().zip(&row) {
                        if !b.is_zero() {
                            *a = &*a - &(&f * b);
                        }
                    }
                }
            }
            self.rows.push(row);
        }
    }

    pub fn is_full_rank(&self) -> bool {
        self.rows.len() == self.cols
    }

    /// Kernel of the accumulated row space, as a subspace of Q^cols.
    pub fn kernel(self) -> Subspace {
        if self.rows.is_empty() {
            return Subspace::full(self.cols);
        }
        Matrix::from_rows(self.rows).kernel()
    }
}
