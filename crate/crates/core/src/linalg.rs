//! Exact elimination: fraction-free (Bareiss) echelon form, rank,
//! determinant and a canonical nullspace basis.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalars::Scalar;

/// Row echelon form produced by Bareiss elimination.
#[derive(Clone, Debug)]
pub struct Echelon<T> {
    /// The first `rank` rows of the eliminated matrix.
    pub rows: Vec<Vec<T>>,
    pub pivot_cols: Vec<usize>,
    /// Pivot entries in elimination order; their vanishing locus is where the
    /// rank can drop under specialization.
    pub pivots: Vec<T>,
    pub row_swaps: usize,
}

impl<T> Echelon<T> {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }
}

/// Chooses among candidate pivots; lower cost is preferred.
pub trait PivotCost {
    fn pivot_cost(&self) -> f64;
}

impl PivotCost for crate::scalars::TowerElem {
    fn pivot_cost(&self) -> f64 {
        self.size_estimate() as f64
    }
}

impl PivotCost for crate::scalars::NumericValue {
    fn pivot_cost(&self) -> f64 {
        -self.abs().hi()
    }
}

pub fn echelon<T: Scalar + PivotCost>(m: &DenseMatrix<T>) -> Result<Echelon<T>> {
    let (nr, nc) = (m.rows(), m.cols());
    let mut a: Vec<Vec<T>> = (0..nr).map(|i| m.row(i).to_vec()).collect();
    let mut pivot_cols = Vec::new();
    let mut pivots = Vec::new();
    let mut row_swaps = 0;
    let mut prev: Option<T> = None;
    let mut r = 0;
    for col in 0..nc {
        if r == nr {
            break;
        }
        let best = (r..nr)
            .filter(|&i| !a[i][col].is_exact_zero())
            .min_by(|&i, &j| a[i][col].pivot_cost().total_cmp(&a[j][col].pivot_cost()).then(i.cmp(&j)));
        let Some(p) = best else { continue };
        if p != r {
            a.swap(p, r);
            row_swaps += 1;
        }
        let piv = a[r][col].clone();
        for i in r + 1..nr {
            let f = a[i][col].clone();
            for j in col..nc {
                let mut x = piv.s_mul(&a[i][j]);
                if !f.is_exact_zero() && !a[r][j].is_exact_zero() {
                    x = x.s_sub(&f.s_mul(&a[r][j]));
                }
                if let Some(d) = &prev {
                    x = x.try_div(d)?;
                }
                a[i][j] = x;
            }
            // Columns left of `col` are already zero in rows below `r`.
        }
        // Rows above keep their values; the row itself is unchanged.
        pivot_cols.push(col);
        pivots.push(piv.clone());
        prev = Some(piv);
        r += 1;
    }
    a.truncate(r);
    Ok(Echelon {
        rows: a,
        pivot_cols,
        pivots,
        row_swaps,
    })
}

pub fn rank<T: Scalar + PivotCost>(m: &DenseMatrix<T>) -> Result<usize> {
    Ok(echelon(m)?.rank())
}

/// Determinant of a square matrix: the last Bareiss pivot, up to the sign of
/// the row permutation.
pub fn det<T: Scalar + PivotCost>(m: &DenseMatrix<T>) -> Result<T> {
    if m.rows() != m.cols() {
        return Err(Error::InvalidInput("determinant of a non-square matrix".into()));
    }
    let n = m.rows();
    let proto = m.get(0, 0).zero_like();
    if n == 0 {
        return Ok(proto.one_like());
    }
    let e = echelon(m)?;
    if e.rank() < n {
        return Ok(proto);
    }
    let last = e.rows[n - 1][n - 1].clone();
    Ok(if e.row_swaps % 2 == 1 { last.s_neg() } else { last })
}

/// A nullspace basis. Each vector has a 1 in one non-pivot column and 0 in
/// the others, which makes the basis independent of the elimination path.
#[derive(Clone, Debug)]
pub struct Nullspace<T> {
    pub basis: Vec<Vec<T>>,
    pub pivots: Vec<T>,
}

pub fn nullspace<T: Scalar + PivotCost>(m: &DenseMatrix<T>) -> Result<Nullspace<T>> {
    let nc = m.cols();
    let e = echelon(m)?;
    let proto = m.get(0, 0).zero_like();
    let is_pivot: Vec<bool> = (0..nc).map(|c| e.pivot_cols.contains(&c)).collect();
    let mut basis = Vec::new();
    for free in (0..nc).filter(|&c| !is_pivot[c]) {
        let mut x = vec![proto.clone(); nc];
        x[free] = proto.one_like();
        for (i, &pc) in e.pivot_cols.iter().enumerate().rev() {
            let mut s = proto.clone();
            for j in pc + 1..nc {
                if !e.rows[i][j].is_exact_zero() && !x[j].is_exact_zero() {
                    s = s.s_add(&e.rows[i][j].s_mul(&x[j]));
                }
            }
            x[pc] = s.s_neg().try_div(&e.rows[i][pc])?;
        }
        basis.push(x);
    }
    Ok(Nullspace { basis, pivots: e.pivots })
}

/// A subspace spanned by inserted vectors, kept in reduced row echelon form.
#[derive(Clone, Debug)]
pub struct IncrementalSpan<T> {
    dim: usize,
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: Scalar> IncrementalSpan<T> {
    pub fn new(dim: usize) -> Self {
        IncrementalSpan { dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    fn reduce(&self, v: &[T]) -> Vec<T> {
        let mut v = v.to_vec();
        for (pc, row) in &self.rows {
            if v[*pc].is_exact_zero() {
                continue;
            }
            let f = v[*pc].clone();
            for j in 0..self.dim {
                if !row[j].is_exact_zero() {
                    v[j] = v[j].s_sub(&f.s_mul(&row[j]));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.reduce(v).iter().all(|x| x.is_exact_zero())
    }

    /// Adds `v` if it is outside the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &[T]) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::InvalidInput(format!("expected a {}-vector", self.dim)));
        }
        let r = self.reduce(v);
        let Some(pc) = r.iter().position(|x| !x.is_exact_zero()) else {
            return Ok(false);
        };
        let inv = r[pc].one_like().try_div(&r[pc])?;
        let r: Vec<T> = r.iter().map(|x| x.s_mul(&inv)).collect();
        for (_, row) in self.rows.iter_mut() {
            if row[pc].is_exact_zero() {
                continue;
            }
            let f = row[pc].clone();
            for j in 0..self.dim {
                if !r[j].is_exact_zero() {
                    row[j] = row[j].s_sub(&f.s_mul(&r[j]));
                }
            }
        }
        self.rows.push((pc, r));
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{Tower, TowerElem};

    fn q(rows: &[&[i64]]) -> DenseMatrix<TowerElem> {
        let t = Tower::rationals();
        DenseMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| t.from_int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn rank_and_det() {
        let m = q(&[&[2, 1, 0, 3], &[1, -1, 4, 0], &[0, 5, 1, 1], &[3, 0, 0, 2]]);
        assert_eq!(rank(&m).unwrap(), 4);
        assert_eq!(det(&m).unwrap(), Tower::rationals().from_int(91));
        let s = q(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&s).unwrap(), 2);
        assert!(det(&s).unwrap().is_zero());
        let p = q(&[&[0, 1], &[1, 0]]);
        assert_eq!(det(&p).unwrap(), Tower::rationals().from_int(-1));
    }

    #[test]
    fn canonical_nullspace() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&m).unwrap();
        assert_eq!(ns.basis.len(), 2);
        let t = Tower::rationals();
        assert_eq!(ns.basis[0], vec![t.from_int(-2), t.one(), t.zero()]);
        assert_eq!(ns.basis[1], vec![t.from_int(-3), t.zero(), t.one()]);
    }

    #[test]
    fn incremental_span() {
        let t = Tower::rationals();
        let mut s = IncrementalSpan::new(3);
        assert!(s.insert(&[t.from_int(0), t.from_int(1), t.from_int(1)]).unwrap());
        assert!(s.insert(&[t.from_int(1), t.from_int(1), t.from_int(0)]).unwrap());
        assert!(!s.insert(&[t.from_int(1), t.from_int(3), t.from_int(2)]).unwrap());
        assert!(s.insert(&[t.from_int(0), t.from_int(0), t.from_int(5)]).unwrap());
        assert!(s.is_full());
    }
}
