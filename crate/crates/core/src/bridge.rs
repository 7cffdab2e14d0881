//! `PSL(2,ℂ) → SO⁺(3,1)` through the action on 2×2 Hermitian matrices,
//! isometry classification, and the block reduction at `v = i√2`.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use crate::charpoly::eigen_report;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::matrix::Mat4;
use crate::rep::{ExactContext, Word};
use crate::scalars::{NumericValue, Scalar, TowerElem};

/// Scalars with a complex conjugation and a square root of −1.
pub trait ComplexScalar: Scalar {
    fn conjugate(&self) -> Result<Self>;
    fn imaginary_unit(proto: &Self) -> Result<Self>;
}

impl ComplexScalar for NumericValue {
    fn conjugate(&self) -> Result<Self> {
        Ok(self.conj())
    }

    fn imaginary_unit(_: &Self) -> Result<Self> {
        Ok(NumericValue::i())
    }
}

impl ComplexScalar for TowerElem {
    fn conjugate(&self) -> Result<Self> {
        self.conj()
    }

    /// Looks for a basis element `√d` with `−d` a rational square and picks
    /// the root with positive imaginary part.
    fn imaginary_unit(proto: &Self) -> Result<Self> {
        let t = proto.tower();
        for mask in 1..t.size() {
            let d = t.mask_product(mask);
            let Some(c) = d.neg().sqrt() else { continue };
            if !c.is_constant() {
                continue;
            }
            let mut coeffs = vec![crate::scalars::RatFunc::zero(); t.size()];
            coeffs[mask] = c.inv()?;
            let i = t.from_coeffs(coeffs)?;
            return Ok(if i.to_numeric()?.im.hi() > 0.0 { i } else { i.neg() });
        }
        Err(Error::InvalidInput("the tower does not contain i".into()))
    }
}

/// An element of `SL(2,ℂ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sl2<T>(pub [[T; 2]; 2]);

impl<T: Scalar> Sl2<T> {
    pub fn det(&self) -> T {
        let m = &self.0;
        m[0][0].s_mul(&m[1][1]).s_sub(&m[0][1].s_mul(&m[1][0]))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Sl2(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0].s_mul(&b[0][j]).s_add(&a[i][1].s_mul(&b[1][j])))
        }))
    }

    pub fn neg(&self) -> Self {
        Sl2(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j].s_neg())))
    }
}

impl Sl2<TowerElem> {
    pub fn exact(m: [[TowerElem; 2]; 2]) -> Result<Self> {
        let s = Sl2(m);
        if !s.det().is_one() {
            return Err(Error::InvalidInput(format!("determinant {} is not 1", s.det())));
        }
        Ok(s)
    }
}

impl Sl2<NumericValue> {
    pub fn numeric(m: [[NumericValue; 2]; 2], tol: f64) -> Result<Self> {
        let s = Sl2(m);
        let err = (&s.det() - &NumericValue::one()).abs().hi();
        if !(err <= tol) {
            return Err(Error::InvalidInput(format!("determinant is 1 only up to {err:e}")));
        }
        Ok(s)
    }

    /// `[[a, b], [c, (1 + bc)/a]]` with `a, b, c` drawn from the unit square
    /// scaled by 2, rejecting small `|a|`.
    pub fn random(rng: &mut impl rand::Rng) -> Self {
        let mut draw = || NumericValue::from_c64(Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        loop {
            let (a, b, c) = (draw(), draw(), draw());
            if a.abs().hi() < 0.25 {
                continue;
            }
            let d = (&NumericValue::one() + &(&b * &c)).try_div(&a).expect("a is bounded away from 0");
            return Sl2([[a, b], [c, d]]);
        }
    }
}

/// Coordinates of a Hermitian `H` in the basis `(I, σ_z, σ_x, [[0, i], [−i, 0]])`,
/// that is `(t, z, x, y)` for `H = [[t+z, x+iy], [x−iy, t−z]]`.
fn herm_coords<T: ComplexScalar>(h: &[[T; 2]; 2], i: &T) -> Result<[T; 4]> {
    let two = i.from_i64_like(2);
    let t = h[0][0].s_add(&h[1][1]).try_div(&two)?;
    let z = h[0][0].s_sub(&h[1][1]).try_div(&two)?;
    let x = h[0][1].s_add(&h[1][0]).try_div(&two)?;
    // h01 − h10 = 2iy.
    let y = h[0][1].s_sub(&h[1][0]).try_div(&two.s_mul(i))?;
    Ok([t, z, x, y])
}

fn herm_basis<T: ComplexScalar>(i: &T) -> [[[T; 2]; 2]; 4] {
    let (z, o) = (i.zero_like(), i.one_like());
    [
        [[o.clone(), z.clone()], [z.clone(), o.clone()]],
        [[o.clone(), z.clone()], [z.clone(), o.s_neg()]],
        [[z.clone(), o.clone()], [o.clone(), z.clone()]],
        [[z.clone(), i.clone()], [i.s_neg(), z.clone()]],
    ]
}

/// Matrix of `H ↦ A*HA` on the Hermitian basis.
///
/// Row `k` holds the coordinates of `A*H_kA`. With this row convention
/// `tau(AB) = tau(A)·tau(B)`; the column convention would reverse the order.
pub fn tau<T: ComplexScalar>(a: &Sl2<T>) -> Result<Mat4<T>> {
    let proto = &a.0[0][0];
    let i = T::imaginary_unit(proto)?;
    let astar: [[T; 2]; 2] = [
        [a.0[0][0].conjugate()?, a.0[1][0].conjugate()?],
        [a.0[0][1].conjugate()?, a.0[1][1].conjugate()?],
    ];
    let astar = Sl2(astar);
    let mut rows = Vec::with_capacity(4);
    for h in herm_basis(&i) {
        let img = astar.mul(&Sl2(h)).mul(a);
        rows.push(herm_coords(&img.0, &i)?);
    }
    let rows: [[T; 4]; 4] = rows.try_into().map_err(|_| Error::InvalidInput("four rows".into()))?;
    Ok(Mat4::from_rows(rows))
}

/// `J_M = diag(−1, 1, 1, 1)` in `(t, ·, ·, ·)` coordinates.
pub fn minkowski_form() -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 1.0, 1.0, 1.0))
}

/// Max-norm of `mᵀ J_M m − J_M`.
pub fn minkowski_check(m: &Matrix4<f64>) -> f64 {
    let j = minkowski_form();
    (m.transpose() * j * m - j).abs().max()
}

pub fn minkowski_check_numeric(m: &Mat4<NumericValue>) -> f64 {
    let re = m.to_c64().map(|z| z.re);
    let im = m.to_c64().map(|z| z.im).abs().max();
    minkowski_check(&re).max(im)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsometryClass {
    Hyperbolic,
    Parabolic,
    Elliptic,
    Inconclusive,
}

/// The form an isometry is checked against.
#[derive(Clone, Debug)]
pub enum PreservedForm {
    /// `mᵀJm = J` with `J = diag(−1, 1, 1, 1)`.
    Minkowski,
    /// `mᵀJm = J` for a given symmetric `J`.
    Bilinear(Matrix4<f64>),
    /// `m*Hm = H`.
    Hermitian(Matrix4<Complex64>),
    /// No form check, for elements classified on their own.
    Unchecked,
}

/// Classifies an isometry of real or complex hyperbolic space by its
/// eigenvalues: hyperbolic when a modulus exceeds `1 + gap_tol`, otherwise
/// elliptic or parabolic according to diagonalizability once all moduli
/// are within `unit_band` of 1. The form residual is measured relative to
/// `‖m‖²‖J‖` and must stay below `residual_tol`.
pub fn classify_isometry(m: &Mat4<NumericValue>, form: &PreservedForm, cfg: &Config) -> Result<IsometryClass> {
    let mc = m.to_c64();
    let mnorm = mc.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bilinear = |j: Matrix4<Complex64>| {
        let jn = j.iter().map(|z| z.norm()).fold(0.0, f64::max);
        (mc.transpose() * j * mc - j).iter().map(|z| z.norm()).fold(0.0, f64::max) / (mnorm * mnorm * jn)
    };
    let residual = match form {
        PreservedForm::Minkowski => bilinear(minkowski_form().map(|x| Complex64::new(x, 0.0))),
        PreservedForm::Bilinear(j) => bilinear(j.map(|x| Complex64::new(x, 0.0))),
        PreservedForm::Hermitian(h) => {
            let hn = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
            crate::forms::hermitian_residual(&mc, h) / (mnorm * mnorm * hn)
        }
        PreservedForm::Unchecked => 0.0,
    };
    if !(residual <= cfg.residual_tol) {
        return Err(Error::NotAnIsometry(residual));
    }
    let rep = eigen_report(m, cfg)?;
    let moduli: Vec<f64> = rep.moduli.iter().map(|x| x.hi()).collect();
    if moduli[0] > 1.0 + cfg.gap_tol {
        return Ok(IsometryClass::Hyperbolic);
    }
    if moduli.iter().any(|&r| (r - 1.0).abs() > cfg.unit_band) {
        return Ok(IsometryClass::Inconclusive);
    }
    let eig: Vec<Complex64> = rep.eigenvalues.iter().map(|z| z.to_c64()).collect();
    Ok(if is_diagonalizable(&mc, &eig, cfg.cond_threshold) {
        IsometryClass::Elliptic
    } else {
        IsometryClass::Parabolic
    })
}

/// Builds an eigenvector matrix from the `k` smallest right singular vectors
/// of `m − λI` for each eigenvalue cluster of multiplicity `k`. The matrix is
/// diagonalizable when these are genuine eigenvectors and the resulting
/// matrix has condition number below `cond_threshold`.
pub fn is_diagonalizable(m: &Matrix4<Complex64>, eig: &[Complex64], cond_threshold: f64) -> bool {
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for &l in eig {
        match clusters.iter_mut().find(|(c, _)| (c - l).norm() <= 1e-6 * (1.0 + l.norm())) {
            Some((_, k)) => *k += 1,
            None => clusters.push((l, 1)),
        }
    }
    let mut vectors: Vec<nalgebra::Vector4<Complex64>> = Vec::new();
    for (l, k) in clusters {
        let shifted = m - Matrix4::<Complex64>::identity() * l;
        let svd = shifted.svd(false, true);
        let Some(vt) = svd.v_t else { return false };
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        for &idx in order.iter().take(k) {
            let v: nalgebra::Vector4<Complex64> = vt.row(idx).adjoint();
            if (shifted * v).norm() > 1e-6 * scale {
                return false;
            }
            vectors.push(v);
        }
    }
    let mut vm = DMatrix::<Complex64>::zeros(4, 4);
    for (j, v) in vectors.iter().enumerate() {
        vm.set_column(j, v);
    }
    let s = vm.singular_values();
    let (max, min) = (s.max(), s.min());
    min > 0.0 && max / min < cond_threshold
}

/// Outcome of conjugating `ρ_{i√2}` by the permutation matrix `M`.
#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub u: Mat4<TowerElem>,
    pub c: Mat4<TowerElem>,
    /// `(upper-left, lower-right)` 2×2 blocks of the conjugated `u`.
    pub u_blocks: (Sl2<TowerElem>, Sl2<TowerElem>),
    pub c_blocks: (Sl2<TowerElem>, Sl2<TowerElem>),
    /// Determinants of the diagonal blocks of `u` and `c`, which are `∓i`
    /// and `−1`; only their products over words of the surface group are 1.
    pub generator_block_dets: [(String, String); 2],
    /// Words of the surface group whose blocks were checked to have
    /// determinant 1 and traces conjugate up to the sign character.
    pub checked_words: Vec<String>,
    /// `(ε(a), ε(b))` with `tr UL(γ) = ε(γ)·conj(tr LR(γ))`. The two blocks
    /// are lifts of the same `PSL(2,ℂ)` representation differing by `ε`.
    pub sign_character: (i8, i8),
}

/// `M` with `Me₀ = e₁, Me₁ = e₃, Me₂ = e₀, Me₃ = e₂`.
pub fn reduction_matrix(proto: &TowerElem) -> Mat4<TowerElem> {
    let t = proto.tower();
    let p = [[0, 0, 1, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 1, 0, 0]];
    Mat4::from_fn(|i, j| t.from_int(p[i][j]))
}

/// The expected conjugated generators, with `i√2 = √−2`, `√6`, `i = √−6·√6/6`
/// and `i√3 = √−2·√6/2`.
fn displayed_matrices(ctx: &ExactContext) -> (Mat4<TowerElem>, Mat4<TowerElem>) {
    let t = ctx.tower();
    let k = |n: i64| t.from_int(n);
    let i_sqrt2 = ctx.v().clone();
    let sqrt6 = ctx.s2().clone();
    let i = ctx.s1().mul(ctx.s2()).scale(&crate::scalars::RatFunc::from_frac(1, 6));
    let i_sqrt3 = i_sqrt2.mul(&sqrt6).scale(&crate::scalars::RatFunc::from_frac(1, 2));
    let q = |x: &TowerElem, d: i64| x.scale(&crate::scalars::RatFunc::from_frac(1, d));
    let u = Mat4::from_rows([
        [k(1), k(0), k(0), k(0)],
        [k(0), i.neg(), k(0), k(0)],
        [k(0), k(0), k(1), k(0)],
        [k(0), k(1), k(0), i.clone()],
    ]);
    let c = Mat4::from_rows([
        [
            q(&i_sqrt2.sub(&sqrt6), 4),
            q(&k(-6).sub(&i_sqrt3.add(&i_sqrt3)), 8),
            k(0),
            k(0),
        ],
        [k(-1), q(&i_sqrt2.neg().add(&sqrt6), 4), k(0), k(0)],
        [
            k(0),
            k(0),
            q(&i_sqrt2.add(&sqrt6), 4),
            q(&k(6).sub(&i_sqrt3.add(&i_sqrt3)), 8),
        ],
        [k(0), k(0), k(1), q(&i_sqrt2.neg().sub(&sqrt6), 4)],
    ]);
    (u, c)
}

fn blocks(m: &Mat4<TowerElem>) -> (Sl2<TowerElem>, Sl2<TowerElem>) {
    let b = |r: usize, c: usize| Sl2([[m.get(r, c).clone(), m.get(r, c + 1).clone()], [m.get(r + 1, c).clone(), m.get(r + 1, c + 1).clone()]]);
    (b(0, 0), b(2, 2))
}

fn entry_list(m: &Mat4<TowerElem>, expected: &Mat4<TowerElem>, name: &str) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            if m.get(i, j) != expected.get(i, j) {
                out.push(format!("{name}[{},{}] = {} (expected {})", i + 1, j + 1, m.get(i, j), expected.get(i, j)));
            }
        }
    }
    out
}

/// Words of the surface group used to compare the two diagonal blocks.
pub const REDUCTION_WORDS: [&str; 5] = ["a", "b", "ab", "aB", "abAB"];

/// Conjugates `ρ_{i√2}(u)` and `ρ_{i√2}(c)` by `M` and checks the block
/// structure, the displayed entries, and that on the surface group both
/// diagonal blocks have determinant 1 and the upper-left block has the
/// conjugate character of the lower-right one up to a sign character.
pub fn reduce_at_isqrt2() -> Result<ReductionResult> {
    let ctx = ExactContext::at_i_sqrt2()?;
    let ev = ctx.evaluator()?;
    let m = reduction_matrix(ctx.v());
    let minv = m.inverse()?;
    let conj = |g: &Mat4<TowerElem>| minv.mul(g).mul(&m);
    let u = conj(ev.u());
    let c = conj(ev.c());
    let (eu, ec) = displayed_matrices(&ctx);
    let mut problems = entry_list(&u, &eu, "u");
    problems.extend(entry_list(&c, &ec, "c"));
    for (name, g) in [("u", &u), ("c", &c)] {
        for i in 0..2 {
            for j in 2..4 {
                if !g.get(i, j).is_zero() {
                    problems.push(format!("{name}[{},{}] is {} in the upper-right block", i + 1, j + 1, g.get(i, j)));
                }
            }
        }
    }
    let mut checked = Vec::new();
    let mut signs: Vec<(&str, usize, usize, Option<i8>)> = Vec::new();
    for w in REDUCTION_WORDS {
        let g = conj(&ev.evaluate(&Word::parse(w)?));
        let (ul, lr) = blocks(&g);
        for (label, b) in [("upper-left", &ul), ("lower-right", &lr)] {
            if !b.det().is_one() {
                problems.push(format!("{label} block of {w} has determinant {}", b.det()));
            }
        }
        let tr_ul = ul.0[0][0].add(&ul.0[1][1]);
        let tr_lr = lr.0[0][0].add(&lr.0[1][1]).conj()?;
        let sign = if tr_ul == tr_lr {
            None
        } else if tr_ul == tr_lr.neg() {
            Some(-1)
        } else {
            problems.push(format!("{w}: block traces {tr_ul} and conj {tr_lr} differ beyond sign"));
            continue;
        };
        // Zero traces are compatible with either sign.
        let sign = if tr_ul.is_zero() { None } else { Some(sign.unwrap_or(1)) };
        let parity = |l: char| w.chars().filter(|x| x.eq_ignore_ascii_case(&l)).count() % 2;
        signs.push((w, parity('a'), parity('b'), sign));
        checked.push(w.to_string());
    }
    // The sign must be a character: determined by its values on a and b.
    let value = |w: &str| signs.iter().find(|s| s.0 == w).and_then(|s| s.3);
    let (ea, eb) = (value("a").unwrap_or(1), value("b").unwrap_or(1));
    for &(w, pa, pb, sign) in &signs {
        let expected = if pa == 1 { ea } else { 1 } * if pb == 1 { eb } else { 1 };
        if let Some(s) = sign {
            if s != expected {
                problems.push(format!("{w}: block trace sign {s} is not multiplicative"));
            }
        }
    }
    let lr_c = blocks(&c).1;
    if !lr_c.0[0][0].add(&lr_c.0[1][1]).is_zero() {
        problems.push("lower-right block of c has nonzero trace".into());
    }
    if !problems.is_empty() {
        return Err(Error::StructureViolation(problems.join("; ")));
    }
    let det_pair = |g: &Mat4<TowerElem>| {
        let (a, b) = blocks(g);
        (a.det().to_string(), b.det().to_string())
    };
    Ok(ReductionResult {
        generator_block_dets: [det_pair(&u), det_pair(&c)],
        u_blocks: blocks(&u),
        c_blocks: blocks(&c),
        u,
        c,
        checked_words: checked,
        sign_character: (ea, eb),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Tower;

    #[test]
    fn tau_of_identity_and_minus_identity() {
        let one = NumericValue::one();
        let z = NumericValue::zero();
        let id = Sl2([[one, z], [z, one]]);
        let t = tau(&id).unwrap();
        assert!(minkowski_check_numeric(&t) < 1e-15);
        assert_eq!(tau(&id.neg()).unwrap().to_c64(), t.to_c64());
        assert_eq!(t.to_c64(), Matrix4::identity());
    }

    #[test]
    fn gaussian_tower_has_i() {
        let t = Tower::new(crate::scalars::BaseField::Rationals, vec![crate::scalars::RatFunc::from_int(-1)]).unwrap();
        let i = TowerElem::imaginary_unit(&t.one()).unwrap();
        assert_eq!(i.mul(&i), t.from_int(-1));
        assert!(TowerElem::imaginary_unit(&Tower::rationals().one()).is_err());
    }
}
