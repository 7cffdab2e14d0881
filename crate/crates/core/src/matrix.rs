//! Small dense matrices over a [`Scalar`].

use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::{NumericValue, Scalar, TowerElem};

/// A 4×4 matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat4<T> {
    e: [T; 16],
}

impl<T: Scalar> Mat4<T> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        Mat4 {
            e: std::array::from_fn(|k| f(k / 4, k % 4)),
        }
    }

    pub fn from_rows(rows: [[T; 4]; 4]) -> Self {
        let mut it = rows.into_iter().flatten();
        Mat4 {
            e: std::array::from_fn(|_| it.next().unwrap()),
        }
    }

    pub fn try_from_fn(mut f: impl FnMut(usize, usize) -> Result<T>) -> Result<Self> {
        let mut v = Vec::with_capacity(16);
        for k in 0..16 {
            v.push(f(k / 4, k % 4)?);
        }
        Ok(Mat4 {
            e: v.try_into().map_err(|_| ()).unwrap(),
        })
    }

    /// Identity in the scalar context of `proto`.
    pub fn identity(proto: &T) -> Self {
        let (z, o) = (proto.zero_like(), proto.one_like());
        Self::from_fn(|i, j| if i == j { o.clone() } else { z.clone() })
    }

    pub fn scalar(x: &T) -> Self {
        let z = x.zero_like();
        Self::from_fn(|i, j| if i == j { x.clone() } else { z.clone() })
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.e[4 * i + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: T) {
        self.e[4 * i + j] = x;
    }

    pub fn entries(&self) -> &[T; 16] {
        &self.e
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&T) -> S) -> Mat4<S> {
        Mat4 {
            e: std::array::from_fn(|k| f(&self.e[k])),
        }
    }

    pub fn try_map<S: Scalar>(&self, f: impl Fn(&T) -> Result<S>) -> Result<Mat4<S>> {
        Mat4::try_from_fn(|i, j| f(self.get(i, j)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| {
            let mut terms = (0..4).filter_map(|k| {
                let (a, b) = (self.get(i, k), o.get(k, j));
                (!a.is_exact_zero() && !b.is_exact_zero()).then(|| a.s_mul(b))
            });
            match terms.next() {
                None => self.e[0].zero_like(),
                Some(first) => terms.fold(first, |acc, t| acc.s_add(&t)),
            }
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.get(i, j).s_add(o.get(i, j)))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.get(i, j).s_sub(o.get(i, j)))
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(|i, j| self.get(i, j).s_neg())
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::from_fn(|i, j| self.get(i, j).s_mul(k))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> T {
        (1..4).fold(self.get(0, 0).clone(), |acc, i| acc.s_add(self.get(i, i)))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(&self.e[0]);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    fn minor2(&self, r: [usize; 2], c: [usize; 2]) -> T {
        self.get(r[0], c[0])
            .s_mul(self.get(r[1], c[1]))
            .s_sub(&self.get(r[0], c[1]).s_mul(self.get(r[1], c[0])))
    }

    fn minor3(&self, r: [usize; 3], c: [usize; 3]) -> T {
        let mut acc = self.e[0].zero_like();
        for (k, &col) in c.iter().enumerate() {
            let rest: Vec<usize> = c.iter().copied().filter(|&x| x != col).collect();
            let sub = self.minor2([r[1], r[2]], [rest[0], rest[1]]);
            let term = self.get(r[0], col).s_mul(&sub);
            acc = if k % 2 == 0 { acc.s_add(&term) } else { acc.s_sub(&term) };
        }
        acc
    }

    /// Determinant by Laplace expansion along pairs of rows (division free).
    pub fn det(&self) -> T {
        const PAIRS: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];
        let mut acc = self.e[0].zero_like();
        for (k, &c) in PAIRS.iter().enumerate() {
            let comp = PAIRS[5 - k];
            let top = self.minor2([0, 1], c);
            if top.is_exact_zero() {
                continue;
            }
            let bottom = self.minor2([2, 3], comp);
            // Sign of the permutation (c0, c1, comp0, comp1).
            let inversions = (c[0] + c[1]) - 1;
            let term = top.s_mul(&bottom);
            acc = if inversions % 2 == 0 { acc.s_add(&term) } else { acc.s_sub(&term) };
        }
        acc
    }

    /// Adjugate (transpose of the cofactor matrix).
    pub fn adjugate(&self) -> Self {
        Self::from_fn(|i, j| {
            let rows: Vec<usize> = (0..4).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..4).filter(|&c| c != i).collect();
            let m = self.minor3([rows[0], rows[1], rows[2]], [cols[0], cols[1], cols[2]]);
            if (i + j) % 2 == 0 {
                m
            } else {
                m.s_neg()
            }
        })
    }

    /// Sum of the principal 2×2 minors.
    pub fn principal_minors2(&self) -> T {
        let mut acc = self.e[0].zero_like();
        for i in 0..4 {
            for j in i + 1..4 {
                acc = acc.s_add(&self.minor2([i, j], [i, j]));
            }
        }
        acc
    }

    /// Sum of the principal 3×3 minors, the trace of the adjugate.
    pub fn principal_minors3(&self) -> T {
        let mut acc = self.e[0].zero_like();
        for skip in 0..4 {
            let idx: Vec<usize> = (0..4).filter(|&r| r != skip).collect();
            let s = [idx[0], idx[1], idx[2]];
            acc = acc.s_add(&self.minor3(s, s));
        }
        acc
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        let adj = self.adjugate();
        Mat4::try_from_fn(|i, j| adj.get(i, j).try_div(&d))
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_exact_zero())
    }

    /// Row-major coordinates, for spanning computations.
    pub fn flatten(&self) -> Vec<T> {
        self.e.to_vec()
    }

    /// Entries in rows `r0..r0+2`, columns `c0..c0+2`.
    pub fn block(&self, r0: usize, c0: usize) -> [[T; 2]; 2] {
        [
            [self.get(r0, c0).clone(), self.get(r0, c0 + 1).clone()],
            [self.get(r0 + 1, c0).clone(), self.get(r0 + 1, c0 + 1).clone()],
        ]
    }
}

impl Mat4<TowerElem> {
    pub fn is_identity(&self) -> bool {
        (0..16).all(|k| if k % 5 == 0 { self.e[k].is_one() } else { self.e[k].is_zero() })
    }

    /// `λ` when the matrix equals `λ·I`.
    pub fn scalar_value(&self) -> Option<TowerElem> {
        let d = &self.e[0];
        (0..16)
            .all(|k| if k % 5 == 0 { self.e[k] == *d } else { self.e[k].is_zero() })
            .then(|| d.clone())
    }

    /// Number of entries that differ from the identity.
    pub fn identity_defects(&self) -> usize {
        (0..16)
            .filter(|&k| if k % 5 == 0 { !self.e[k].is_one() } else { !self.e[k].is_zero() })
            .count()
    }

    pub fn galois(&self, mask: usize) -> Self {
        self.map(|x| x.galois(mask))
    }

    pub fn to_numeric(&self) -> Result<Mat4<NumericValue>> {
        self.try_map(|x| x.to_numeric())
    }
}

impl Mat4<NumericValue> {
    pub fn to_c64(&self) -> nalgebra::Matrix4<num_complex::Complex64> {
        nalgebra::Matrix4::from_fn(|i, j| self.get(i, j).to_c64())
    }

    pub fn from_c64(m: &nalgebra::Matrix4<num_complex::Complex64>) -> Self {
        Mat4::from_fn(|i, j| NumericValue::from_c64(m[(i, j)]))
    }

    pub fn conj_transpose(&self) -> Self {
        Mat4::from_fn(|i, j| self.get(j, i).conj())
    }

    /// Largest entry modulus, in double precision.
    pub fn max_abs(&self) -> f64 {
        self.e.iter().map(|x| x.abs().hi()).fold(0.0, f64::max)
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Mat4<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..4 {
            let row: Vec<String> = (0..4).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A dense `rows × cols` matrix used by the elimination routines.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Ok(DenseMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: T) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Tower;

    fn q(rows: [[i64; 4]; 4]) -> Mat4<TowerElem> {
        let t = Tower::rationals();
        Mat4::from_fn(|i, j| t.from_int(rows[i][j]))
    }

    #[test]
    fn determinant_and_inverse() {
        let m = q([[2, 1, 0, 3], [1, -1, 4, 0], [0, 5, 1, 1], [3, 0, 0, 2]]);
        // Oracle: permutation expansion.
        assert_eq!(m.det(), Tower::rationals().from_int(91));
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
    }

    #[test]
    fn permutation_determinant_signs() {
        let swap = q([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert_eq!(swap.det(), Tower::rationals().from_int(-1));
        let cycle = q([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]]);
        assert_eq!(cycle.det(), Tower::rationals().from_int(-1));
        let dbl = q([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]);
        assert_eq!(dbl.det(), Tower::rationals().from_int(1));
    }

    #[test]
    fn principal_minor_sums() {
        let m = q([[1, 2, 0, 0], [3, 4, 0, 0], [0, 0, 5, 0], [0, 0, 0, 6]]);
        // eigen-symmetric functions: blocks (1,2;3,4) has tr 5 det -2.
        // e2 = -2 + 5*(5+6) + 30 = 83, e3 = -2*11 + 5*30 = 128
        assert_eq!(m.principal_minors2(), Tower::rationals().from_int(83));
        assert_eq!(m.principal_minors3(), Tower::rationals().from_int(128));
        assert_eq!(m.adjugate().trace(), m.principal_minors3());
    }
}
