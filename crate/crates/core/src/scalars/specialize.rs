//! Substituting a value for `v` in elements of a tower over Q(v).
//!
//! A specialization is fixed by the images of `v` and of each root `√dᵢ`;
//! an element `Σ c_S(v) ∏_{i∈S} √dᵢ` maps to `Σ c_S(v₀) ∏ rootᵢ`.

use std::sync::Arc;

use num_rational::BigRational;
use twofloat::TwoFloat;

use super::numeric::{bigint_to_twofloat, rational_to_twofloat, NumericValue};
use super::poly::ZPoly;
use super::ratfunc::RatFunc;
use super::tower::{BaseField, LayerKind, Tower, TowerElem};
use crate::error::{Error, Result};

fn check_source(source: &Tower) -> Result<()> {
    if source.base() != BaseField::RationalFunctions {
        return Err(Error::InvalidInput("specialization needs a tower over Q(v)".into()));
    }
    Ok(())
}

fn mask_images<T: Clone>(roots: &[T], one: T, mul: impl Fn(&T, &T) -> T) -> Vec<T> {
    let mut out = vec![one; 1 << roots.len()];
    for mask in 1..out.len() {
        let low = mask.trailing_zeros() as usize;
        out[mask] = mul(&out[mask & (mask - 1)], &roots[low]);
    }
    out
}

/// Exact specialization into a tower over Q.
#[derive(Clone, Debug)]
pub struct ExactSpecialization {
    target: Arc<Tower>,
    v: TowerElem,
    roots: Vec<TowerElem>,
    kinds: Vec<LayerKind>,
    rational_v: Option<BigRational>,
    root_products: Vec<TowerElem>,
}

impl ExactSpecialization {
    /// `v ↦ v₀ ∈ Q`. The target tower has the discriminants `dᵢ(v₀)` after
    /// zero, square and dependent layers are collapsed.
    pub fn at_rational(source: &Tower, v0: &BigRational) -> Result<Self> {
        check_source(source)?;
        let discs = source
            .discs()
            .iter()
            .map(|d| d.eval_rational(v0).map(RatFunc::from_rational))
            .collect::<Result<Vec<_>>>()?;
        let (target, roots, kinds) = Tower::reduced(BaseField::Rationals, &discs)?;
        let v = target.from_rational(v0.clone());
        let root_products = mask_images(&roots, target.one(), |a, b| a.mul(b));
        Ok(ExactSpecialization {
            target,
            v,
            roots,
            kinds,
            rational_v: Some(v0.clone()),
            root_products,
        })
    }

    /// `v ↦ v₀` and `√dᵢ ↦ rootᵢ` for elements of a tower over Q. Each root
    /// must square to `dᵢ(v₀)` exactly.
    pub fn at_point(source: &Tower, v: TowerElem, roots: Vec<TowerElem>) -> Result<Self> {
        check_source(source)?;
        if roots.len() != source.depth() {
            return Err(Error::InvalidInput(format!(
                "expected {} root images, got {}",
                source.depth(),
                roots.len()
            )));
        }
        let target = v.tower().clone();
        if target.base() != BaseField::Rationals {
            return Err(Error::InvalidInput("target tower must be over Q".into()));
        }
        for (i, (d, r)) in source.discs().iter().zip(&roots).enumerate() {
            let d_at = eval_in_tower(d, &v)?;
            if r.mul(r) != d_at {
                return Err(Error::DegenerateContext(format!(
                    "image of root {} does not square to {}",
                    i + 1,
                    d_at
                )));
            }
        }
        let root_products = mask_images(&roots, target.one(), |a, b| a.mul(b));
        let kinds = (0..roots.len()).map(LayerKind::Generator).collect();
        Ok(ExactSpecialization {
            target,
            rational_v: v.as_base().map(|b| b.content().clone()),
            v,
            roots,
            kinds,
            root_products,
        })
    }

    pub fn target(&self) -> &Arc<Tower> {
        &self.target
    }

    pub fn v(&self) -> &TowerElem {
        &self.v
    }

    pub fn roots(&self) -> &[TowerElem] {
        &self.roots
    }

    /// How each source root was realised in the target (for `at_rational`).
    pub fn layer_kinds(&self) -> &[LayerKind] {
        &self.kinds
    }

    pub fn eval_base(&self, c: &RatFunc) -> Result<TowerElem> {
        match &self.rational_v {
            Some(q) => Ok(self.target.from_rational(c.eval_rational(q)?)),
            None => eval_in_tower(c, &self.v),
        }
    }

    pub fn apply(&self, x: &TowerElem) -> Result<TowerElem> {
        check_source(x.tower())?;
        if x.tower().depth() != self.roots.len() {
            return Err(Error::InvalidInput("element is not from the source tower".into()));
        }
        let mut acc = self.target.zero();
        for (s, c) in x.coeffs().iter().enumerate() {
            if c.is_zero() || self.root_products[s].is_zero() {
                continue;
            }
            let term = match (&self.rational_v, self.root_products[s].as_base()) {
                (Some(q), _) => self.root_products[s].scale(&RatFunc::from_rational(c.eval_rational(q)?)),
                (None, Some(b)) => eval_in_tower(c, &self.v)?.scale(b),
                (None, None) => eval_in_tower(c, &self.v)?.mul(&self.root_products[s]),
            };
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

fn horner_tower(p: &ZPoly, x: &TowerElem) -> TowerElem {
    let tower = x.tower();
    let mut acc = tower.zero();
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(x).add(&tower.from_rational(BigRational::from_integer(c.clone())));
    }
    acc
}

/// Evaluates a rational function of `v` at a tower element.
pub fn eval_in_tower(c: &RatFunc, x: &TowerElem) -> Result<TowerElem> {
    let tower = x.tower();
    if let Some(k) = c.as_constant() {
        return Ok(tower.from_rational(k.clone()));
    }
    let num = horner_tower(c.numer(), x);
    let den = horner_tower(c.denom(), x);
    if den.is_zero() {
        return Err(Error::PoleAtSpecialization(format!("denominator {} vanishes at v = {}", c.denom(), x)));
    }
    Ok(num.div(&den)?.scale(&RatFunc::from_rational(c.content().clone())))
}

/// Numeric specialization at a complex point in double-double precision.
#[derive(Clone, Debug)]
pub struct NumericSpecialization {
    v: NumericValue,
    roots: Vec<NumericValue>,
    root_products: Vec<NumericValue>,
}

impl NumericSpecialization {
    /// Roots follow the branch convention: a real positive `dᵢ(v₀)` takes its
    /// positive root, a real negative one takes `i√|dᵢ|`, and a non-real
    /// value takes the principal root.
    pub fn at(source: &Tower, v0: NumericValue) -> Result<Self> {
        check_source(source)?;
        let mut roots = Vec::with_capacity(source.depth());
        for (i, d) in source.discs().iter().enumerate() {
            let dv = eval_numeric(d, &v0)?;
            let root = if dv.im == TwoFloat::from(0.0) {
                NumericValue::sqrt_of_real(dv.re, i)
            } else {
                dv.sqrt_principal(i)
            };
            roots.push(root);
        }
        Ok(Self::with_roots(v0, roots))
    }

    /// Explicit root images, for callers that fix branches themselves.
    pub fn with_roots(v: NumericValue, roots: Vec<NumericValue>) -> Self {
        let root_products = mask_images(&roots, NumericValue::one(), |a, b| a * b);
        NumericSpecialization { v, roots, root_products }
    }

    pub fn v(&self) -> &NumericValue {
        &self.v
    }

    pub fn roots(&self) -> &[NumericValue] {
        &self.roots
    }

    pub fn eval_base(&self, c: &RatFunc) -> Result<NumericValue> {
        eval_numeric(c, &self.v)
    }

    pub fn apply(&self, x: &TowerElem) -> Result<NumericValue> {
        check_source(x.tower())?;
        if x.tower().depth() != self.roots.len() {
            return Err(Error::InvalidInput("element is not from the source tower".into()));
        }
        let mut acc = NumericValue::zero();
        for (s, c) in x.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = &eval_numeric(c, &self.v)? * &self.root_products[s];
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

fn horner_numeric(p: &ZPoly, x: &NumericValue) -> NumericValue {
    let mut acc = NumericValue::zero();
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * x) + &NumericValue::from_real(bigint_to_twofloat(c));
    }
    acc
}

pub fn eval_numeric(c: &RatFunc, x: &NumericValue) -> Result<NumericValue> {
    let k = NumericValue::from_real(rational_to_twofloat(c.content()));
    if c.is_constant() {
        return Ok(k);
    }
    let num = horner_numeric(c.numer(), x);
    let den = horner_numeric(c.denom(), x);
    if den.is_zero() {
        return Err(Error::PoleAtSpecialization(format!("denominator {} vanishes numerically", c.denom())));
    }
    Ok(&num.try_div(&den)? * &k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn source() -> Arc<Tower> {
        Tower::new(
            BaseField::RationalFunctions,
            vec![
                RatFunc::from_poly(&ZPoly::from_i64(&[-4, 0, 1])),
                RatFunc::from_poly(&ZPoly::from_i64(&[8, 0, 1])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn collapse_at_two() {
        let t = source();
        let s = ExactSpecialization::at_rational(&t, &BigRational::from_integer(2.into())).unwrap();
        assert!(s.apply(&t.generator(0)).unwrap().is_zero());
        let r = s.apply(&t.generator(1)).unwrap();
        assert_eq!(s.target().discs(), &[RatFunc::from_int(12)]);
        assert_eq!(r, s.target().generator(0));
    }

    #[test]
    fn numeric_branch_inside_interval() {
        let t = source();
        let s = NumericSpecialization::at(&t, NumericValue::from_f64(1.0)).unwrap();
        let r = s.apply(&t.generator(0)).unwrap();
        assert!(r.re.hi() == 0.0);
        assert!((r.im.hi() - 3f64.sqrt()).abs() < 1e-15);
        let sq = &r * &r;
        assert!((sq.re + TwoFloat::from(3.0)).abs() < TwoFloat::from(1e-28));
    }

    #[test]
    fn pole_detected() {
        let t = source();
        let x = t.from_base(RatFunc::from_poly(&ZPoly::from_i64(&[-4, 0, 1])).inv().unwrap());
        let s = ExactSpecialization::at_rational(&t, &BigRational::from_integer(2.into())).unwrap();
        assert!(matches!(s.apply(&x), Err(Error::PoleAtSpecialization(_))));
    }
}
