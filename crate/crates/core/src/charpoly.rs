//! Characteristic polynomials, their `(p, q, r)` shape and eigenvalue gaps.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{Matrix4, Schur};
use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::matrix::Mat4;
use crate::scalars::numeric::{format_decimal, NumericValue};
use crate::scalars::{BaseField, RatFunc, Scalar, Tower, TowerElem};

/// `χ(Q) = det(Q·I − M) = c₀ + c₁Q + c₂Q² + c₃Q³ + c₄Q⁴`, with `c₄ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly4<T> {
    pub c: [T; 5],
}

/// Coefficients from the elementary symmetric functions of the eigenvalues:
/// trace, principal 2×2 and 3×3 minor sums, and the determinant.
pub fn char_poly<T: Scalar>(m: &Mat4<T>) -> Poly4<T> {
    let one = m.get(0, 0).one_like();
    Poly4 {
        c: [
            m.det(),
            m.principal_minors3().s_neg(),
            m.principal_minors2(),
            m.trace().s_neg(),
            one,
        ],
    }
}

/// The Faddeev–LeVerrier recursion, an independent route to the same
/// coefficients.
pub fn faddeev_leverrier<T: Scalar>(m: &Mat4<T>) -> Result<Poly4<T>> {
    let proto = m.get(0, 0);
    let id = Mat4::identity(proto);
    let mut c = [proto.zero_like(), proto.zero_like(), proto.zero_like(), proto.zero_like(), proto.one_like()];
    let mut mk = Mat4::scalar(&proto.zero_like());
    for k in 1..=4 {
        // M_k = A·M_{k−1} + c_{n−k+1}·I, c_{n−k} = −tr(A·M_k)/k
        mk = m.mul(&mk).add(&id.scale(&c[5 - k]));
        let t = m.mul(&mk).trace();
        c[4 - k] = t.s_neg().try_div(&proto.from_i64_like(k as i64))?;
    }
    Ok(Poly4 { c })
}

impl<T: Scalar> Poly4<T> {
    pub fn eval(&self, x: &T) -> T {
        self.c.iter().rev().skip(1).fold(self.c[4].clone(), |acc, ci| acc.s_mul(x).s_add(ci))
    }
}

impl Poly4<TowerElem> {
    /// `(c₀, …, c₄) = (c₄, …, c₀)` exactly.
    pub fn is_palindromic(&self) -> bool {
        self.c[0] == self.c[4] && self.c[1] == self.c[3]
    }

    pub fn to_numeric(&self) -> Result<Poly4<NumericValue>> {
        let mut out = Vec::with_capacity(5);
        for x in &self.c {
            out.push(x.to_numeric()?);
        }
        Ok(Poly4 {
            c: out.try_into().expect("five coefficients"),
        })
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Poly4<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..5).rev().map(|k| format!("({})*Q^{k}", self.c[k])).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `χ = 1 − (p − q√(v²−4))Q + rQ² − (p + q√(v²−4))Q³ + Q⁴` with `p, q, r ∈ Q(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharShape {
    pub p: RatFunc,
    pub q: RatFunc,
    pub r: RatFunc,
}

impl CharShape {
    /// True when all three lie in `Q[v]`.
    pub fn is_polynomial(&self) -> bool {
        self.p.is_polynomial() && self.q.is_polynomial() && self.r.is_polynomial()
    }

    /// Rebuilds `χ` over the given symbolic tower.
    pub fn reconstruct(&self, tower: &std::sync::Arc<Tower>) -> Poly4<TowerElem> {
        let p = tower.from_base(self.p.clone());
        let qs = tower.generator(0).scale(&self.q);
        Poly4 {
            c: [
                tower.one(),
                p.sub(&qs).neg(),
                tower.from_base(self.r.clone()),
                p.add(&qs).neg(),
                tower.one(),
            ],
        }
    }
}

fn only_masks(x: &TowerElem, allowed: &[usize]) -> bool {
    x.coeffs().iter().enumerate().all(|(s, c)| c.is_zero() || allowed.contains(&s))
}

/// Splits a symbolic `χ` into `(p, q, r)` and checks every coefficient has the
/// expected shape.
pub fn shape_decompose(chi: &Poly4<TowerElem>) -> Result<CharShape> {
    let tower = chi.c[0].tower();
    if tower.base() != BaseField::RationalFunctions || tower.depth() != 2 {
        return Err(Error::InvalidInput(
            "shape decomposition needs the symbolic tower Q(v)(√(v²−4), √(v²+8))".into(),
        ));
    }
    if !chi.c[0].is_one() || !chi.c[4].is_one() {
        return Err(Error::ShapeViolation(format!("constant term {} is not 1", chi.c[0])));
    }
    for k in [1, 3] {
        if !only_masks(&chi.c[k], &[0, 1]) {
            return Err(Error::ShapeViolation(format!(
                "coefficient of Q^{k} has a √(v²+8) component: {}",
                chi.c[k]
            )));
        }
    }
    if !only_masks(&chi.c[2], &[0]) {
        return Err(Error::ShapeViolation(format!(
            "coefficient of Q^2 is not in Q(v): {}",
            chi.c[2]
        )));
    }
    let half = RatFunc::from_frac(1, 2);
    let (c1, c3) = (&chi.c[1], &chi.c[3]);
    let p = c1.add(c3).neg().coeff(0).mul(&half);
    // c₁ − c₃ = 2q√(v²−4): a pure layer-1 element.
    let diff = c1.sub(c3);
    if !diff.coeff(0).is_zero() {
        return Err(Error::ShapeViolation(format!(
            "c1 - c3 has a rational part: {}",
            diff.coeff(0)
        )));
    }
    let q = diff.coeff(1).mul(&half);
    Ok(CharShape {
        p,
        q,
        r: chi.c[2].coeff(0).clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Biproximality {
    Biproximal,
    NotBiproximal,
    Inconclusive,
}

/// `|λ₂λ₃| ≠ 1` cannot be refuted numerically, so the verdict is either
/// `Holds` or `Inconclusive`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstruction {
    Holds,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct EigenReport {
    /// Eigenvalues sorted by decreasing modulus.
    pub eigenvalues: [NumericValue; 4],
    pub moduli: [TwoFloat; 4],
    pub top_gap: TwoFloat,
    pub bottom_gap: TwoFloat,
    pub biproximal: Biproximality,
    pub l2l3: TwoFloat,
    pub l1l4: NumericValue,
    pub obstruction: Obstruction,
    /// Largest `|χ(λ)| / (1 + |λ|)⁴` after polishing.
    pub residual: f64,
}

impl EigenReport {
    pub fn moduli_strings(&self, sig: usize) -> [String; 4] {
        std::array::from_fn(|i| format_decimal(self.moduli[i], sig))
    }
}

fn horner(chi: &Poly4<NumericValue>, z: &NumericValue) -> (NumericValue, NumericValue) {
    let mut p = chi.c[4];
    let mut dp = NumericValue::zero();
    for k in (0..4).rev() {
        dp = &(&dp * z) + &p;
        p = &(&p * z) + &chi.c[k];
    }
    (p, dp)
}

fn companion_roots(chi: &Poly4<NumericValue>) -> Result<[Complex64; 4]> {
    let c: Vec<Complex64> = chi.c.iter().map(|x| x.to_c64()).collect();
    let mut m = Matrix4::<Complex64>::zeros();
    for i in 1..4 {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..4 {
        m[(i, 3)] = -c[i];
    }
    let schur = Schur::try_new(m, 1e-15, 10_000)
        .ok_or_else(|| Error::ConvergenceFailure("Schur iteration on the companion matrix".into()))?;
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| Error::ConvergenceFailure("companion matrix did not triangularize".into()))?;
    Ok([ev[0], ev[1], ev[2], ev[3]])
}

fn polish(chi: &Poly4<NumericValue>, z0: Complex64) -> NumericValue {
    let mut z = NumericValue::from_c64(z0);
    let tiny = TwoFloat::from(1e-31);
    for _ in 0..60 {
        let (p, dp) = horner(chi, &z);
        if p.is_zero() || dp.is_zero() {
            break;
        }
        let Ok(step) = p.try_div(&dp) else { break };
        let next = &z - &step;
        if !(next.re.hi().is_finite() && next.im.hi().is_finite()) {
            break;
        }
        z = next;
        if step.abs() <= tiny * (TwoFloat::from(1.0) + z.abs()) {
            break;
        }
    }
    z
}

/// Relative radius within which polished roots are treated as one multiple
/// root. A k-fold root is only resolved to about eps^(1/k), roughly 1e-8 for
/// k = 4 in double-double, while the mean of the cluster is accurate.
const CLUSTER_RADIUS: f64 = 1e-6;

fn merge_clusters(roots: &mut [NumericValue]) {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            let d = (&roots[i] - &roots[j]).abs().hi();
            if d <= CLUSTER_RADIUS * (1.0 + roots[i].abs().hi()) {
                let (a, b) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == b {
                        *l = a;
                    }
                }
            }
        }
    }
    for l in 0..n {
        let members: Vec<usize> = (0..n).filter(|&k| label[k] == l).collect();
        if members.len() < 2 {
            continue;
        }
        let sum = members.iter().fold(NumericValue::zero(), |acc, &k| &acc + &roots[k]);
        let mean = sum.scale(crate::scalars::numeric::dd_div(TwoFloat::from(1.0), TwoFloat::from(members.len() as f64)));
        for &k in &members {
            roots[k] = mean;
        }
    }
}

fn ratio(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    if b == TwoFloat::from(0.0) {
        TwoFloat::from(f64::INFINITY)
    } else {
        crate::scalars::numeric::dd_div(a, b)
    }
}

fn gap_verdict(r: TwoFloat, cfg: &Config) -> Biproximality {
    if r > TwoFloat::from(1.0 + cfg.gap_tol) {
        Biproximality::Biproximal
    } else if r <= TwoFloat::from(1.0 + cfg.unit_band) {
        Biproximality::NotBiproximal
    } else {
        Biproximality::Inconclusive
    }
}

/// Roots of a numeric characteristic polynomial by companion-matrix
/// eigenvalues polished with Newton's method in double-double.
pub fn eigen_report_from_poly(chi: &Poly4<NumericValue>, cfg: &Config) -> Result<EigenReport> {
    let starts = companion_roots(chi)?;
    let mut roots: Vec<NumericValue> = starts.iter().map(|&z| polish(chi, z)).collect();
    merge_clusters(&mut roots);
    let mut residual = 0.0f64;
    for z in &roots {
        let (p, _) = horner(chi, z);
        let scale = (1.0 + z.abs().hi()).powi(4);
        residual = residual.max(p.abs().hi() / scale);
    }
    if !(residual < 1e-8) {
        return Err(Error::ConvergenceFailure(format!("root residual {residual:e} after polishing")));
    }
    roots.sort_by(|a, b| {
        b.abs()
            .partial_cmp(&a.abs())
            .unwrap_or(Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
    });
    let eigenvalues: [NumericValue; 4] = roots.try_into().expect("four roots");
    let moduli: [TwoFloat; 4] = std::array::from_fn(|i| eigenvalues[i].abs());
    let top_gap = ratio(moduli[0], moduli[1]);
    let bottom_gap = ratio(moduli[2], moduli[3]);
    let biproximal = match (gap_verdict(top_gap, cfg), gap_verdict(bottom_gap, cfg)) {
        (Biproximality::Biproximal, Biproximality::Biproximal) => Biproximality::Biproximal,
        (Biproximality::NotBiproximal, _) | (_, Biproximality::NotBiproximal) => Biproximality::NotBiproximal,
        _ => Biproximality::Inconclusive,
    };
    let l2l3 = moduli[1] * moduli[2];
    let deviation = (l2l3 - TwoFloat::from(1.0)).abs();
    let obstruction = if deviation > TwoFloat::from(cfg.gap_tol) {
        Obstruction::Holds
    } else {
        Obstruction::Inconclusive
    };
    let l1l4 = &eigenvalues[0] * &eigenvalues[3];
    Ok(EigenReport {
        eigenvalues,
        moduli,
        top_gap,
        bottom_gap,
        biproximal,
        l2l3,
        l1l4,
        obstruction,
        residual,
    })
}

pub fn eigen_report(m: &Mat4<NumericValue>, cfg: &Config) -> Result<EigenReport> {
    eigen_report_from_poly(&char_poly(m), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::{ExactContext, Word};

    #[test]
    fn u_has_expected_polynomial() {
        let ctx = ExactContext::symbolic();
        let ev = ctx.evaluator().unwrap();
        let chi = char_poly(ev.u());
        let t = ctx.tower();
        let expected = [1, -2, 2, -2, 1].map(|k| t.from_int(k));
        assert_eq!(chi.c, expected);
        assert!(chi.is_palindromic());
        let shape = shape_decompose(&chi).unwrap();
        assert_eq!(shape, CharShape { p: RatFunc::from_int(2), q: RatFunc::zero(), r: RatFunc::from_int(2) });
    }

    #[test]
    fn empty_word_shape() {
        let ctx = ExactContext::symbolic();
        let ev = ctx.evaluator().unwrap();
        let shape = shape_decompose(&char_poly(&ev.evaluate(&Word::empty()))).unwrap();
        assert_eq!(shape, CharShape { p: RatFunc::from_int(4), q: RatFunc::zero(), r: RatFunc::from_int(6) });
    }

    #[test]
    fn faddeev_leverrier_agrees() {
        let ctx = ExactContext::symbolic();
        let ev = ctx.evaluator().unwrap();
        for w in ["uc", "ab", "aBu", "cuC"] {
            let m = ev.evaluate(&Word::parse(w).unwrap());
            assert_eq!(char_poly(&m), faddeev_leverrier(&m).unwrap(), "word {w}");
        }
    }

    #[test]
    fn palindromic_quartic_detection() {
        let t = Tower::rationals();
        let p = Poly4 { c: [1, -3, 2, -5, 1].map(|k| t.from_int(k)) };
        assert!(!p.is_palindromic());
    }

    #[test]
    fn finite_order_is_not_biproximal() {
        let ctx = ExactContext::at_rational(&num_rational::BigRational::from_integer(3.into())).unwrap().to_numeric().unwrap();
        let ev = ctx.evaluator().unwrap();
        let r = eigen_report(ev.u(), &Config::default()).unwrap();
        assert_eq!(r.biproximal, Biproximality::NotBiproximal);
        let id = eigen_report(&ev.identity(), &Config::default()).unwrap();
        assert_eq!(id.biproximal, Biproximality::NotBiproximal);
    }
}
