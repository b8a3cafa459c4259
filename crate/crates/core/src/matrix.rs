use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::subspace::Subspace;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Dense matrix over the rationals, row-major.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Rat>>", into = "Vec<Vec<Rat>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Matrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Row-major flattening; the canonical coordinates of an endomorphism
    /// as a vector in Q^(n^2).
    pub fn flatten(&self) -> Vec<Rat> {
        self.data.clone()
    }

    pub fn from_flat(n: usize, data: &[Rat]) -> Self {
        assert_eq!(data.len(), n * n);
        Matrix {
            rows: n,
            cols: n,
            data: data.to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &Rat) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn trace(&self) -> Rat {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        acc += a * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
        a * b - b * a
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = rref_in_place(&mut m);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Null space { v : M v = 0 } as a subspace of Q^cols.
    pub fn kernel(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let mut piv_iter = pivots.iter().copied().peekable();
        let free: Vec<usize> = (0..self.cols)
            .filter(|j| {
                if piv_iter.peek() == Some(j) {
                    piv_iter.next();
                    false
                } else {
                    true
                }
            })
            .collect();
        for &f in &free {
            let mut v = vec![Rat::zero(); self.cols];
            v[f] = Rat::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, f).clone();
            }
            basis.push(v);
        }
        Subspace::from_rows(self.cols, basis)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rat::one());
        }
        let pivots = rref_in_place(&mut aug);
        if pivots.len() != n || pivots.iter().any(|&p| p >= n) {
            return Err(Error::Singular);
        }
        Ok(Matrix::from_fn(n, n, |i, j| aug.get(i, n + j).clone()))
    }

    /// One solution of M x = b, free variables set to zero; None if
    /// inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = rref_in_place(&mut aug);
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = aug.get(row, self.cols).clone();
        }
        Some(x)
    }

    /// Monic characteristic polynomial det(t·I − M), coefficients in
    /// ascending degree order (length rows + 1, leading coefficient 1).
    /// Faddeev–LeVerrier, exact over Q.
    pub fn char_poly(&self) -> Result<Vec<Rat>> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[n] = Rat::one();
        let id = Matrix::identity(n);
        let mut m = self.clone();
        for k in 1..=n {
            let c = -(m.trace() / Rat::from_int(k as i64));
            coeffs[n - k] = c.clone();
            if k < n {
                m = self * &(m + id.scale(&c));
            }
        }
        Ok(coeffs)
    }

    /// Number of distinct eigenvalues over the algebraic closure: the degree
    /// of the squarefree part char/gcd(char, char') of the characteristic
    /// polynomial.
    pub fn distinct_eigenvalue_count(&self) -> Result<usize> {
        let p = self.char_poly()?;
        let g = poly::gcd(&p, &poly::derivative(&p));
        Ok(poly::degree(&p).unwrap_or(0) - poly::degree(&g).unwrap_or(0))
    }
}

/// The endomorphism x wedge y determined by a symmetric metric g:
/// (x ∧ y)(z) = g(x,z) y − g(y,z) x.
pub fn wedge_to_endo(x: &[Rat], y: &[Rat], metric: &Matrix) -> Result<Matrix> {
    let n = x.len();
    if y.len() != n || metric.rows() != n || metric.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "wedge of vectors of length {} and {} with {}x{} metric",
            n,
            y.len(),
            metric.rows(),
            metric.cols()
        )));
    }
    for i in 0..n {
        for j in 0..i {
            if metric.get(i, j) != metric.get(j, i) {
                return Err(Error::MetricNotSymmetric { i, j });
            }
        }
    }
    let gx = metric.mul_vec(x);
    let gy = metric.mul_vec(y);
    Ok(Matrix::from_fn(n, n, |i, j| {
        &gx[j] * &y[i] - &gy[j] * &x[i]
    }))
}

/// In-place reduced row echelon form; returns the pivot columns in order.
pub(crate) fn rref_in_place(m: &mut Matrix) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in c..cols {
                m.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = m.get(r, c).recip();
        if !inv.is_one() {
            for j in c..cols {
                if !m.get(r, j).is_zero() {
                    let v = m.get(r, j) * &inv;
                    m.set(r, j, v);
                }
            }
        }
        for i in 0..rows {
            if i == r || m.get(i, c).is_zero() {
                continue;
            }
            let f = m.get(i, c).clone();
            for j in c..cols {
                if !m.get(r, j).is_zero() {
                    let v = m.get(i, j) - &(m.get(r, j) * &f);
                    m.set(i, j, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

impl TryFrom<Vec<Vec<Rat>>> for Matrix {
    type Error = String;
    fn try_from(rows: Vec<Vec<Rat>>) -> std::result::Result<Self, String> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err("ragged matrix rows".to_owned());
        }
        Ok(Matrix::from_rows(rows))
    }
}

impl From<Matrix> for Vec<Vec<Rat>> {
    fn from(m: Matrix) -> Self {
        m.row_vecs()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(Rat::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

macro_rules! matrix_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Matrix {
            type Output = Matrix;
            fn $method(self, rhs: &Matrix) -> Matrix {
                assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
                Matrix {
                    rows: self.rows,
                    cols: self.cols,
                    data: self
                        .data
                        .iter()
                        .zip(&rhs.data)
                        .map(|(a, b)| a $op b)
                        .collect(),
                }
            }
        }
        impl $trait for Matrix {
            type Output = Matrix;
            fn $method(self, rhs: Matrix) -> Matrix {
                (&self).$method(&rhs)
            }
        }
    };
}

matrix_binop!(Add, add, +);
matrix_binop!(Sub, sub, -);

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        &self * &rhs
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

impl Neg for Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        -&self
    }
}

/// Polynomial helpers over Q; coefficient vectors in ascending degree order.
pub(crate) mod poly {
    use super::Rat;

    pub fn degree(p: &[Rat]) -> Option<usize> {
        p.iter().rposition(|c| !c.is_zero())
    }

    pub fn derivative(p: &[Rat]) -> Vec<Rat> {
        if p.len() <= 1 {
            return vec![Rat::zero()];
        }
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * &Rat::from_int(k as i64))
            .collect()
    }

    fn make_monic(p: &mut Vec<Rat>) {
        if let Some(d) = degree(p) {
            p.truncate(d + 1);
            let lead = p[d].clone();
            if !lead.is_one() {
                let inv = lead.recip();
                for c in p.iter_mut() {
                    *c = &*c * &inv;
                }
            }
        } else {
            p.clear();
        }
    }

    fn rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let db = degree(b).expect("division by zero polynomial");
        let mut r: Vec<Rat> = a.to_vec();
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let f = &r[dr] / &b[db];
            for k in 0..=db {
                if !b[k].is_zero() {
                    r[dr - db + k] = &r[dr - db + k] - &(&f * &b[k]);
                }
            }
            r[dr] = Rat::zero();
        }
        r
    }

    /// Monic gcd via the Euclidean algorithm; gcd(0, 0) = 0.
    pub fn gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        make_monic(&mut a);
        make_monic(&mut b);
        while !b.is_empty() {
            let mut r = rem(&a, &b);
            make_monic(&mut r);
            a = b;
            b = r;
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::from_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rref_and_rank() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let (r, pivots) = a.rref();
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(r.row(0), m(&[&[1, 0, 1]]).row(0));
        assert_eq!(r.row(1), m(&[&[0, 1, 1]]).row(0));
        assert!(r.row(2).iter().all(Rat::is_zero));
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn kernel_matches_hand_computation() {
        // Kernel of [[1,2,3],[2,4,6],[1,0,1]] is spanned by (-1,-1,1).
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let k = a.kernel();
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&[Rat::from_int(-1), Rat::from_int(-1), Rat::from_int(1)]));
        for v in k.basis_rows() {
            assert!(a.mul_vec(v).iter().all(Rat::is_zero));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Matrix::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_err());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 2], &[2, 4]]);
        let x = a.solve(&[Rat::from_int(3), Rat::from_int(6)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![Rat::from_int(3), Rat::from_int(6)]);
        assert!(a.solve(&[Rat::from_int(3), Rat::from_int(7)]).is_none());
    }

    #[test]
    fn char_poly_of_identity_and_nilpotent() {
        // det(t·I − I) = (t−1)^2 = 1 − 2t + t^2
        let p = Matrix::identity(2).char_poly().unwrap();
        assert_eq!(
            p,
            vec![Rat::from_int(1), Rat::from_int(-2), Rat::from_int(1)]
        );
        // strictly upper triangular: t^2
        let n = m(&[&[0, 1], &[0, 0]]);
        assert_eq!(
            n.char_poly().unwrap(),
            vec![Rat::zero(), Rat::zero(), Rat::one()]
        );
    }

    #[test]
    fn distinct_eigenvalues() {
        assert_eq!(Matrix::identity(3).distinct_eigenvalue_count().unwrap(), 1);
        let d = m(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 2]]);
        assert_eq!(d.distinct_eigenvalue_count().unwrap(), 2);
        // companion matrix of t^2 − 2 (irreducible, two distinct roots)
        let c = m(&[&[0, 2], &[1, 0]]);
        assert_eq!(c.distinct_eigenvalue_count().unwrap(), 2);
    }

    #[test]
    fn wedge_endo_is_metric_skew() {
        let g = m(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 1]]);
        let x = [Rat::from_int(1), Rat::from_int(0), Rat::from_int(0)];
        let y = [Rat::from_int(0), Rat::from_int(1), Rat::from_int(0)];
        let w = wedge_to_endo(&x, &y, &g).unwrap();
        // (x∧y)(x) = g(x,x) y = y ; (x∧y)(y) = −g(y,y) x = −2x
        assert_eq!(w.mul_vec(&x), y.to_vec());
        assert_eq!(
            w.mul_vec(&y),
            vec![Rat::from_int(-2), Rat::zero(), Rat::zero()]
        );
        // g-skew: (Gw)^T = −Gw
        let gw = &g * &w;
        assert_eq!(gw.transpose(), -&gw);
        let bad = m(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(wedge_to_endo(&x, &y, &bad).is_err());
    }

    #[test]
    fn poly_gcd_squarefree() {
        // p = (t−1)^2 (t+2) = t^3 − 3t + 2
        let p = vec![
            Rat::from_int(2),
            Rat::from_int(-3),
            Rat::from_int(0),
            Rat::from_int(1),
        ];
        let g = poly::gcd(&p, &poly::derivative(&p));
        // gcd = t − 1
        assert_eq!(g, vec![Rat::from_int(-1), Rat::from_int(1)]);
    }
}
