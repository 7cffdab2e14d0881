//! Bilinear and Hermitian forms preserved by a set of matrices.

use std::cmp::Ordering;

use nalgebra::{DMatrix, Matrix4};
use num_bigint::BigInt;
use num_complex::Complex64;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{nullspace, IncrementalSpan};
use crate::matrix::{DenseMatrix, Mat4};
use crate::scalars::{BaseField, NumericValue, Scalar, TowerElem, ZPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
    Hermitian,
}

#[derive(Clone, Debug)]
pub struct FormSpace<T> {
    pub symmetry: Symmetry,
    pub basis: Vec<Mat4<T>>,
    /// Numerators of the norms of the elimination pivots. The dimension can
    /// only grow at common zeros of these.
    pub exceptional_locus: Vec<String>,
}

impl<T> FormSpace<T> {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Signature {
    pub positives: usize,
    pub negatives: usize,
    pub zeros: usize,
}

impl Signature {
    /// Signature `(3,1)` or `(1,3)`: nondegenerate with one sign appearing once.
    pub fn is_lorentzian_up_to_sign(&self) -> bool {
        self.zeros == 0 && ((self.positives, self.negatives) == (3, 1) || (self.positives, self.negatives) == (1, 3))
    }
}

/// Index pairs parametrizing the form space: `(i, j)` with `i ≤ j` for
/// symmetric forms and `i < j` for antisymmetric ones.
fn parameter_pairs(sym: Symmetry) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in i..4 {
            if sym == Symmetry::Antisymmetric && i == j {
                continue;
            }
            out.push((i, j));
        }
    }
    out
}

fn basis_form<T: Scalar>(proto: &T, sym: Symmetry, (i, j): (usize, usize)) -> Mat4<T> {
    let mut b = Mat4::scalar(&proto.zero_like());
    b.set(i, j, proto.one_like());
    if i != j {
        let other = if sym == Symmetry::Antisymmetric { proto.one_like().s_neg() } else { proto.one_like() };
        b.set(j, i, other);
    }
    b
}

/// Scales so that the first nonzero entry in row-major order is 1.
fn normalize<T: Scalar>(m: &Mat4<T>) -> Result<Mat4<T>> {
    match m.entries().iter().find(|x| !x.is_exact_zero()) {
        None => Ok(m.clone()),
        Some(lead) => {
            let inv = lead.one_like().try_div(lead)?;
            Ok(m.scale(&inv))
        }
    }
}

fn locus_of(pivots: &[TowerElem]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for p in pivots {
        let n = p.norm();
        if n.is_constant() {
            continue;
        }
        let s = squarefree(n.numer()).to_string();
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

fn squarefree(p: &ZPoly) -> ZPoly {
    let d = ZPoly::new(
        p.coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    );
    let g = p.gcd(&d);
    p.div_exact(&g).unwrap_or_else(|| p.clone()).primitive_part()
}

/// Exact solution space of `gᵀJg = J` over symmetric or antisymmetric `J`.
pub fn invariant_forms(gens: &[Mat4<TowerElem>], sym: Symmetry) -> Result<FormSpace<TowerElem>> {
    if sym == Symmetry::Hermitian {
        return invariant_hermitian_exact(gens);
    }
    let Some(first) = gens.first() else {
        return Err(Error::InvalidInput("at least one generator is required".into()));
    };
    let proto = first.get(0, 0).clone();
    let pairs = parameter_pairs(sym);
    let columns: Vec<Vec<Mat4<TowerElem>>> = pairs
        .iter()
        .map(|&pq| {
            let b = basis_form(&proto, sym, pq);
            gens.iter().map(|g| g.transpose().mul(&b).mul(g).sub(&b)).collect()
        })
        .collect();
    // The residual has the same symmetry, so the entries at `pairs` suffice.
    let mut rows = Vec::new();
    for gi in 0..gens.len() {
        for &(a, b) in &pairs {
            rows.push(columns.iter().map(|col| col[gi].get(a, b).clone()).collect());
        }
    }
    let system = DenseMatrix::from_rows(rows)?;
    let ns = nullspace(&system)?;
    let mut basis = Vec::new();
    for x in ns.basis {
        let mut j = Mat4::scalar(&proto.zero_like());
        for (k, &pq) in pairs.iter().enumerate() {
            if !x[k].is_zero() {
                j = j.add(&basis_form(&proto, sym, pq).scale(&x[k]));
            }
        }
        basis.push(normalize(&j)?);
    }
    Ok(FormSpace {
        symmetry: sym,
        basis,
        exceptional_locus: locus_of(&ns.pivots),
    })
}

/// Complex conjugation on a tower over Q (the identity on real towers).
fn conj_mask(x: &TowerElem) -> Result<usize> {
    x.tower()
        .conjugation_mask()
        .ok_or_else(|| Error::InvalidInput("Hermitian forms need a tower over Q".into()))
}

/// `J* = σ(J)ᵀ` with σ the complex conjugation of the tower.
pub fn conj_transpose(m: &Mat4<TowerElem>) -> Result<Mat4<TowerElem>> {
    let mask = conj_mask(m.get(0, 0))?;
    Ok(m.transpose().galois(mask))
}

/// Exact solutions of `g*Jg = J` with `J = J*`.
///
/// The system is solved for arbitrary `J` over the tower field `K`, giving a
/// space `W` closed under `J ↦ J*`. Its Hermitian part has real dimension
/// `dim_K W`, spanned by `W + W*` and `ω(W − W*)` for a purely imaginary `ω`.
/// Over a real tower this counts symmetric plus antisymmetric solutions,
/// matching `J = S + iA`.
pub fn invariant_hermitian_exact(gens: &[Mat4<TowerElem>]) -> Result<FormSpace<TowerElem>> {
    let Some(first) = gens.first() else {
        return Err(Error::InvalidInput("at least one generator is required".into()));
    };
    let proto = first.get(0, 0).clone();
    if proto.tower().base() != BaseField::Rationals {
        return Err(Error::InvalidInput("exact Hermitian forms need a specialized context".into()));
    }
    let mask = conj_mask(&proto)?;
    let gstar: Vec<Mat4<TowerElem>> = gens.iter().map(|g| g.transpose().galois(mask)).collect();
    let unit = |k: usize| {
        let mut b = Mat4::scalar(&proto.zero_like());
        b.set(k / 4, k % 4, proto.one_like());
        b
    };
    let columns: Vec<Vec<Mat4<TowerElem>>> = (0..16)
        .map(|k| {
            let b = unit(k);
            gens.iter().zip(&gstar).map(|(g, gs)| gs.mul(&b).mul(g).sub(&b)).collect()
        })
        .collect();
    let mut rows = Vec::new();
    for gi in 0..gens.len() {
        for e in 0..16 {
            rows.push(columns.iter().map(|col| col[gi].get(e / 4, e % 4).clone()).collect());
        }
    }
    let ns = nullspace(&DenseMatrix::from_rows(rows)?)?;
    let dim = ns.basis.len();
    let w: Vec<Mat4<TowerElem>> = ns
        .basis
        .iter()
        .map(|x| Mat4::from_fn(|i, j| x[4 * i + j].clone()))
        .collect();
    // A purely imaginary unit, when the tower has one.
    let omega = (0..proto.tower().depth())
        .find(|&i| mask & (1 << i) != 0)
        .map(|i| proto.tower().generator(i));
    let mut span = IncrementalSpan::new(16);
    let mut basis = Vec::new();
    for wk in &w {
        let ws = wk.transpose().galois(mask);
        let mut candidates = vec![wk.add(&ws)];
        match &omega {
            Some(om) => candidates.push(wk.sub(&ws).scale(om)),
            // Real tower: the antisymmetric part corresponds to iA.
            None => candidates.push(wk.sub(&ws)),
        }
        for cand in candidates {
            if basis.len() == dim || cand.is_zero() {
                continue;
            }
            if span.insert(&cand.flatten())? {
                basis.push(normalize_hermitian(&cand)?);
            }
        }
    }
    if basis.len() != dim {
        return Err(Error::StructureViolation(format!(
            "Hermitian descent produced {} forms for a {dim}-dimensional solution space",
            basis.len()
        )));
    }
    Ok(FormSpace {
        symmetry: Symmetry::Hermitian,
        basis,
        exceptional_locus: locus_of(&ns.pivots),
    })
}

// Scales by a real factor only, so the result stays Hermitian.
fn normalize_hermitian(m: &Mat4<TowerElem>) -> Result<Mat4<TowerElem>> {
    let mask = conj_mask(m.get(0, 0))?;
    let lead = m.entries().iter().find(|x| !x.is_zero()).expect("nonzero form");
    let real = lead.galois(mask) == *lead;
    if !real || lead.tower().base() != BaseField::Rationals {
        return Ok(m.clone());
    }
    let inv = lead.inv()?;
    Ok(m.scale(&inv))
}

/// Numeric solutions of `g*Jg = J` over Hermitian `J`, found as the right
/// singular vectors of the stacked real 16-parameter system.
pub fn invariant_hermitian(gens: &[Mat4<NumericValue>], cfg: &Config) -> Result<FormSpace<NumericValue>> {
    if gens.is_empty() {
        return Err(Error::InvalidInput("at least one generator is required".into()));
    }
    let gs: Vec<Matrix4<Complex64>> = gens.iter().map(|g| g.to_c64()).collect();
    let herm_basis: Vec<Matrix4<Complex64>> = (0..16).map(hermitian_unit).collect();
    let mut a = DMatrix::<f64>::zeros(32 * gs.len(), 16);
    for (gi, g) in gs.iter().enumerate() {
        let gstar = g.adjoint();
        for (k, b) in herm_basis.iter().enumerate() {
            let r = gstar * b * g - b;
            for e in 0..16 {
                let z = r[(e / 4, e % 4)];
                a[(32 * gi + 2 * e, k)] = z.re;
                a[(32 * gi + 2 * e + 1, k)] = z.im;
            }
        }
    }
    let (sigma, v) = svd_nullspace(&a)?;
    let smax = sigma.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut basis = Vec::new();
    for (k, &s) in sigma.iter().enumerate() {
        let rel = s / smax;
        if rel < cfg.rank_zero {
            let x = v.column(k);
            let mut j = Matrix4::<Complex64>::zeros();
            for (p, b) in herm_basis.iter().enumerate() {
                j += b * Complex64::new(x[p], 0.0);
            }
            basis.push(normalize_numeric(&j));
        } else if rel < cfg.rank_ambiguous {
            return Err(Error::RankAmbiguous {
                sigma: rel,
                lo: cfg.rank_zero,
                hi: cfg.rank_ambiguous,
            });
        }
    }
    for j in &basis {
        for g in &gs {
            let res = hermitian_residual(g, j);
            if res > cfg.residual_tol {
                return Err(Error::ConvergenceFailure(format!("Hermitian form residual {res:e}")));
            }
        }
    }
    Ok(FormSpace {
        symmetry: Symmetry::Hermitian,
        basis: basis.iter().map(Mat4::from_c64).collect(),
        exceptional_locus: Vec::new(),
    })
}

/// Max-norm of `g*Jg − J`.
pub fn hermitian_residual(g: &Matrix4<Complex64>, j: &Matrix4<Complex64>) -> f64 {
    (g.adjoint() * j * g - j).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

// Real basis of 4×4 Hermitian matrices: E_ii, E_ij + E_ji, i(E_ij − E_ji).
fn hermitian_unit(k: usize) -> Matrix4<Complex64> {
    let mut m = Matrix4::<Complex64>::zeros();
    if k < 4 {
        m[(k, k)] = Complex64::new(1.0, 0.0);
        return m;
    }
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let (i, j) = pairs[(k - 4) % 6];
    if k < 10 {
        m[(i, j)] = Complex64::new(1.0, 0.0);
        m[(j, i)] = Complex64::new(1.0, 0.0);
    } else {
        m[(i, j)] = Complex64::new(0.0, 1.0);
        m[(j, i)] = Complex64::new(0.0, -1.0);
    }
    m
}

// Singular values and right singular vectors as columns, padded to 16 when
// the system has fewer rows than unknowns.
fn svd_nullspace(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.ncols();
    let padded = if a.nrows() < n {
        let mut p = DMatrix::<f64>::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = nalgebra::linalg::SVD::try_new(padded, false, true, 1e-15, 10_000)
        .ok_or_else(|| Error::ConvergenceFailure("SVD did not converge".into()))?;
    let vt = svd.v_t.ok_or_else(|| Error::ConvergenceFailure("SVD returned no right vectors".into()))?;
    let sigma: Vec<f64> = svd.singular_values.iter().cloned().collect();
    Ok((sigma, vt.transpose()))
}

// Real rescaling so the largest entry has modulus 1 and the first entry of
// that modulus (row-major, within 1e-12) is real positive where possible.
fn normalize_numeric(j: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let max = j.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return *j;
    }
    let lead = (0..16)
        .map(|k| j[(k / 4, k % 4)])
        .find(|z| z.norm() > 1e-8 * max)
        .expect("nonzero entry");
    let s = if lead.re < 0.0 { -1.0 } else { 1.0 };
    j * Complex64::new(s / max, 0.0)
}

/// Diagonal entries of a congruence diagonalization `PJP* = D` over an
/// exact tower.
pub fn congruence_diagonal(j: &Mat4<TowerElem>) -> Result<Vec<TowerElem>> {
    let mask = conj_mask(j.get(0, 0))?;
    let n = 4;
    let mut a: Vec<Vec<TowerElem>> = (0..n).map(|i| (0..n).map(|k| j.get(i, k).clone()).collect()).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut diag = Vec::new();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&k| !a[k][k].is_zero());
        let k = match pivot {
            Some(k) => k,
            None => {
                let off = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&l| (i, l)))
                    .find(|&(i, l)| i != l && !a[i][l].is_zero());
                let Some((i, l)) = off else {
                    diag.extend(active.iter().map(|_| j.get(0, 0).tower().zero()));
                    break;
                };
                // Row i += t·row l, column i += σ(t)·column l, with t = a_il,
                // makes the new a_ii = 2·a_il·σ(a_il) nonzero.
                let t = a[i][l].clone();
                let ts = t.galois(mask);
                for c in 0..n {
                    let add = t.mul(&a[l][c]);
                    a[i][c] = a[i][c].add(&add);
                }
                for r in 0..n {
                    let add = a[r][l].mul(&ts);
                    a[r][i] = a[r][i].add(&add);
                }
                i
            }
        };
        let d = a[k][k].clone();
        let dinv = d.inv()?;
        active.retain(|&x| x != k);
        for &r in &active {
            for &c in &active {
                let upd = a[r][k].mul(&a[k][c]).mul(&dinv);
                a[r][c] = a[r][c].sub(&upd);
            }
        }
        diag.push(d);
    }
    Ok(diag)
}

fn real_sign(x: &TowerElem) -> Result<Ordering> {
    if x.is_zero() {
        return Ok(Ordering::Equal);
    }
    if x.tower().is_real() {
        return x.sign();
    }
    let n = x.to_numeric()?;
    let (re, im) = (n.re.hi(), n.im.hi());
    if im.abs() > 1e-12 * (1.0 + re.abs()) || re.abs() < 1e-25 {
        return Err(Error::StructureViolation(format!("diagonal entry {x} is not a nonzero real")));
    }
    Ok(if re > 0.0 { Ordering::Greater } else { Ordering::Less })
}

/// Signature of an exactly symmetric (real tower) or Hermitian matrix.
pub fn signature(j: &Mat4<TowerElem>) -> Result<Signature> {
    if conj_transpose(j)? != *j {
        return Err(Error::InvalidInput("matrix is not self-adjoint".into()));
    }
    let mut s = Signature {
        positives: 0,
        negatives: 0,
        zeros: 0,
    };
    for d in congruence_diagonal(j)? {
        match real_sign(&d)? {
            Ordering::Greater => s.positives += 1,
            Ordering::Less => s.negatives += 1,
            Ordering::Equal => s.zeros += 1,
        }
    }
    Ok(s)
}

/// Signature of a numeric Hermitian matrix from its eigenvalues; those
/// below `tol` times the largest modulus count as zero.
pub fn signature_numeric(j: &Mat4<NumericValue>, tol: f64) -> Signature {
    let m = j.to_c64();
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigenvalues();
    let max = eig.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut s = Signature {
        positives: 0,
        negatives: 0,
        zeros: 0,
    };
    for &x in eig.iter() {
        if x.abs() <= tol * max || max == 0.0 {
            s.zeros += 1;
        } else if x > 0.0 {
            s.positives += 1;
        } else {
            s.negatives += 1;
        }
    }
    s
}
