//! Towers of quadratic extensions `K = F(√d₁, …, √d_k)` over F = Q or Q(v).
//!
//! An element stores `2^k` base-field coefficients; coefficient `S` (a bit
//! mask over the layers) multiplies `∏_{i∈S} √dᵢ`. Towers are built so that no
//! product of discriminants is a square in F, which keeps `K` a field.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::numeric::NumericValue;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum BaseField {
    Rationals,
    RationalFunctions,
}

/// How a requested square root was realised when the tower was reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LayerKind {
    /// The discriminant is zero; the root is 0.
    Zero,
    /// The discriminant is a square in the base; the root is that base element.
    Square(RatFunc),
    /// `d·∏_{i∈mask} dᵢ` is a square `r²`; the root is `r/∏dᵢ · ∏√dᵢ`.
    Dependent { mask: usize, root: RatFunc },
    /// A genuine new layer at the given index.
    Generator(usize),
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Tower {
    base: BaseField,
    discs: Vec<RatFunc>,
    mask_products: Vec<RatFunc>,
}

impl Tower {
    /// A tower with the given discriminants, rejecting any degenerate layer.
    pub fn new(base: BaseField, discs: Vec<RatFunc>) -> Result<Arc<Tower>> {
        let (tower, kinds) = Self::reduce(base, &discs)?;
        if kinds.iter().all(|k| matches!(k, LayerKind::Generator(_))) {
            Ok(tower)
        } else {
            Err(Error::DegenerateContext(format!(
                "discriminants {:?} are not independent non-squares",
                discs.iter().map(|d| d.to_string()).collect::<Vec<_>>()
            )))
        }
    }

    pub fn rationals() -> Arc<Tower> {
        Arc::new(Self::build(BaseField::Rationals, Vec::new()))
    }

    pub fn rational_functions() -> Arc<Tower> {
        Arc::new(Self::build(BaseField::RationalFunctions, Vec::new()))
    }

    fn build(base: BaseField, discs: Vec<RatFunc>) -> Tower {
        let k = discs.len();
        let mut mask_products = vec![RatFunc::one(); 1 << k];
        for mask in 1..(1usize << k) {
            let low = mask.trailing_zeros() as usize;
            mask_products[mask] = mask_products[mask & (mask - 1)].mul(&discs[low]);
        }
        Tower {
            base,
            discs,
            mask_products,
        }
    }

    /// Builds the tower for the requested square roots after collapsing zero,
    /// square and dependent discriminants, and returns the image of each
    /// requested `√dᵢ`.
    pub fn reduced(base: BaseField, requested: &[RatFunc]) -> Result<(Arc<Tower>, Vec<TowerElem>, Vec<LayerKind>)> {
        let (tower, kinds) = Self::reduce(base, requested)?;
        let images = kinds
            .iter()
            .map(|kind| match kind {
                LayerKind::Zero => tower.zero(),
                LayerKind::Square(r) => tower.from_base(r.clone()),
                LayerKind::Dependent { mask, root } => {
                    let mut coeffs = vec![RatFunc::zero(); tower.size()];
                    coeffs[*mask] = root.div(&tower.mask_products[*mask]).expect("nonzero product");
                    TowerElem {
                        tower: tower.clone(),
                        coeffs,
                    }
                }
                LayerKind::Generator(i) => tower.generator(*i),
            })
            .collect();
        Ok((tower, images, kinds))
    }

    fn reduce(base: BaseField, requested: &[RatFunc]) -> Result<(Arc<Tower>, Vec<LayerKind>)> {
        if base == BaseField::Rationals && requested.iter().any(|d| !d.is_constant()) {
            return Err(Error::InvalidInput("a rational tower needs constant discriminants".into()));
        }
        let mut kept: Vec<RatFunc> = Vec::new();
        let mut kinds = Vec::with_capacity(requested.len());
        for d in requested {
            if d.is_zero() {
                kinds.push(LayerKind::Zero);
                continue;
            }
            if let Some(r) = d.sqrt() {
                kinds.push(LayerKind::Square(r));
                continue;
            }
            let partial = Self::build(base, kept.clone());
            let dependent = (1..partial.size()).find_map(|mask| {
                d.mul(&partial.mask_products[mask]).sqrt().map(|root| (mask, root))
            });
            match dependent {
                Some((mask, root)) => kinds.push(LayerKind::Dependent { mask, root }),
                None => {
                    kinds.push(LayerKind::Generator(kept.len()));
                    kept.push(d.clone());
                }
            }
        }
        Ok((Arc::new(Self::build(base, kept)), kinds))
    }

    pub fn base(&self) -> BaseField {
        self.base
    }

    pub fn depth(&self) -> usize {
        self.discs.len()
    }

    /// Number of coefficients of an element, `2^depth`.
    pub fn size(&self) -> usize {
        1 << self.discs.len()
    }

    pub fn discs(&self) -> &[RatFunc] {
        &self.discs
    }

    pub fn zero(self: &Arc<Self>) -> TowerElem {
        TowerElem {
            tower: self.clone(),
            coeffs: vec![RatFunc::zero(); self.size()],
        }
    }

    pub fn one(self: &Arc<Self>) -> TowerElem {
        self.from_base(RatFunc::one())
    }

    pub fn from_int(self: &Arc<Self>, k: i64) -> TowerElem {
        self.from_base(RatFunc::from_int(k))
    }

    pub fn from_rational(self: &Arc<Self>, q: BigRational) -> TowerElem {
        self.from_base(RatFunc::from_rational(q))
    }

    pub fn from_base(self: &Arc<Self>, x: RatFunc) -> TowerElem {
        debug_assert!(self.base == BaseField::RationalFunctions || x.is_constant());
        let mut coeffs = vec![RatFunc::zero(); self.size()];
        coeffs[0] = x;
        TowerElem {
            tower: self.clone(),
            coeffs,
        }
    }

    /// The element `√dᵢ`.
    pub fn generator(self: &Arc<Self>, i: usize) -> TowerElem {
        assert!(i < self.depth(), "layer {i} out of range");
        let mut coeffs = vec![RatFunc::zero(); self.size()];
        coeffs[1 << i] = RatFunc::one();
        TowerElem {
            tower: self.clone(),
            coeffs,
        }
    }

    pub fn from_coeffs(self: &Arc<Self>, coeffs: Vec<RatFunc>) -> Result<TowerElem> {
        if coeffs.len() != self.size() {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                self.size(),
                coeffs.len()
            )));
        }
        Ok(TowerElem {
            tower: self.clone(),
            coeffs,
        })
    }

    /// Layers whose root is imaginary: the Galois mask realising complex
    /// conjugation. Only defined over Q.
    pub fn conjugation_mask(&self) -> Option<usize> {
        if self.base != BaseField::Rationals {
            return None;
        }
        Some(
            self.discs
                .iter()
                .enumerate()
                .filter(|(_, d)| d.content().is_negative())
                .fold(0, |m, (i, _)| m | (1 << i)),
        )
    }

    /// True when every discriminant is a positive rational, so that the
    /// tower embeds in R with all roots positive.
    pub fn is_real(&self) -> bool {
        self.conjugation_mask() == Some(0)
    }

    pub fn mask_product(&self, mask: usize) -> &RatFunc {
        &self.mask_products[mask]
    }
}

#[derive(Clone, Debug)]
pub struct TowerElem {
    tower: Arc<Tower>,
    coeffs: Vec<RatFunc>,
}

impl PartialEq for TowerElem {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.tower, &other.tower) || self.tower == other.tower) && self.coeffs == other.coeffs
    }
}

impl Eq for TowerElem {}

impl TowerElem {
    fn same_tower(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.tower, &other.tower) || self.tower == other.tower,
            "tower elements from different towers"
        );
    }

    fn with(&self, coeffs: Vec<RatFunc>) -> TowerElem {
        TowerElem {
            tower: self.tower.clone(),
            coeffs,
        }
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> &RatFunc {
        &self.coeffs[mask]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The base-field value, when all root components vanish.
    pub fn as_base(&self) -> Option<&RatFunc> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| &self.coeffs[0])
    }

    /// Rough storage size in bits, used to prefer small pivots.
    pub fn size_estimate(&self) -> u64 {
        self.coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| {
                let (dn, dd) = c.degrees();
                let bits = c.numer().max_norm().bits() + c.denom().max_norm().bits();
                let k = c.content();
                (dn + dd + 1) as u64 * bits.max(1) + k.numer().bits() + k.denom().bits()
            })
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_tower(other);
        self.with(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_tower(other);
        self.with(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn neg(&self) -> Self {
        self.with(self.coeffs.iter().map(|a| a.neg()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_tower(other);
        let n = self.coeffs.len();
        let mut terms: Vec<Vec<RatFunc>> = vec![Vec::new(); n];
        for (s, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (t, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let mut prod = a.mul(b);
                let both = s & t;
                if both != 0 {
                    prod = prod.mul(self.tower.mask_product(both));
                }
                terms[s ^ t].push(prod);
            }
        }
        self.with(terms.into_iter().map(sum_ratfuncs).collect())
    }

    pub fn scale(&self, k: &RatFunc) -> Self {
        self.with(self.coeffs.iter().map(|a| a.mul(k)).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = self.tower.one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// The automorphism fixing the base and sending `√dᵢ ↦ −√dᵢ` for `i` in
    /// `mask`.
    pub fn galois(&self, mask: usize) -> Self {
        self.with(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(s, c)| if (s & mask).count_ones() % 2 == 1 { c.neg() } else { c.clone() })
                .collect(),
        )
    }

    /// Complex conjugation, for towers over Q.
    pub fn conj(&self) -> Result<Self> {
        let mask = self
            .tower
            .conjugation_mask()
            .ok_or_else(|| Error::InvalidInput("complex conjugation needs a tower over Q".into()))?;
        Ok(self.galois(mask))
    }

    // Multiplies by the conjugate in the top remaining layer until only the
    // base component is left. The running product of conjugates and the
    // final base element are returned; together they give the product of all
    // 2^k - 1 nontrivial conjugates and the norm.
    fn conjugate_chain(&self) -> (TowerElem, RatFunc) {
        let mut cofactor = self.tower.one();
        let mut y = self.clone();
        for layer in (0..self.tower.depth()).rev() {
            let bar = y.galois(1 << layer);
            y = y.mul(&bar);
            cofactor = cofactor.mul(&bar);
        }
        let norm = y.coeffs[0].clone();
        debug_assert!(y.coeffs[1..].iter().all(|c| c.is_zero()));
        (cofactor, norm)
    }

    /// `∏_{mask} galois(mask, x)`, an element of the base field.
    pub fn norm(&self) -> RatFunc {
        self.conjugate_chain().1
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(b) = self.as_base() {
            return Ok(self.tower.from_base(b.inv()?));
        }
        let (cofactor, norm) = self.conjugate_chain();
        if norm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(cofactor.scale(&norm.inv()?))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if let Some(b) = other.as_base() {
            let binv = b.inv()?;
            return Ok(self.scale(&binv));
        }
        Ok(self.mul(&other.inv()?))
    }

    /// Exact sign of an element of a real tower over Q.
    pub fn sign(&self) -> Result<Ordering> {
        if !self.tower.is_real() {
            return Err(Error::InvalidInput("exact sign needs a real tower over Q".into()));
        }
        Ok(self.sign_below(self.tower.depth()))
    }

    // Sign of an element whose components all lie in layers < `top`.
    fn sign_below(&self, top: usize) -> Ordering {
        if top == 0 {
            return self.coeffs[0].content().cmp(&BigRational::zero());
        }
        let layer = top - 1;
        let bit = 1 << layer;
        let mut a = vec![RatFunc::zero(); self.coeffs.len()];
        let mut b = vec![RatFunc::zero(); self.coeffs.len()];
        for (s, c) in self.coeffs.iter().enumerate() {
            if s & bit == 0 {
                a[s] = c.clone();
            } else {
                b[s ^ bit] = c.clone();
            }
        }
        let (a, b) = (self.with(a), self.with(b));
        let sa = a.sign_below(layer);
        let sb = b.sign_below(layer);
        match (sa, sb) {
            (_, Ordering::Equal) => sa,
            (Ordering::Equal, _) => sb,
            _ if sa == sb => sa,
            _ => {
                // a + b√d with opposite signs: compare a² with b²d.
                let d = self.tower.from_base(self.tower.discs[layer].clone());
                let t = a.mul(&a).sub(&b.mul(&b).mul(&d));
                match t.sign_below(layer) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    /// Numeric value of an element of a tower over Q. Positive discriminants
    /// take the positive real root, negative ones the root with positive
    /// imaginary part.
    pub fn to_numeric(&self) -> Result<NumericValue> {
        if self.tower.base != BaseField::Rationals {
            return Err(Error::InvalidInput("numeric value needs a tower over Q; specialize first".into()));
        }
        let roots: Vec<NumericValue> = self
            .tower
            .discs
            .iter()
            .enumerate()
            .map(|(i, d)| NumericValue::sqrt_of_real(super::numeric::rational_to_twofloat(d.content()), i))
            .collect();
        let mut acc = NumericValue::zero();
        for (s, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = NumericValue::from_rational(c.content());
            for (i, r) in roots.iter().enumerate() {
                if s & (1 << i) != 0 {
                    term = &term * r;
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

fn sum_ratfuncs(mut terms: Vec<RatFunc>) -> RatFunc {
    // Pairwise summation keeps intermediate denominators balanced.
    if terms.is_empty() {
        return RatFunc::zero();
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.add(&b)),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop().unwrap()
}

impl fmt::Display for TowerElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (s, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if s == 0 {
                if c.is_constant() {
                    write!(f, "{c}")?;
                } else {
                    write!(f, "({c})")?;
                }
                continue;
            }
            if !c.is_one() {
                write!(f, "({c})*")?;
            }
            let roots: Vec<String> = (0..self.tower.depth())
                .filter(|i| s & (1 << i) != 0)
                .map(|i| format!("sqrt({})", self.tower.discs[i]))
                .collect();
            f.write_str(&roots.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::poly::ZPoly;

    fn qv_tower() -> Arc<Tower> {
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
    fn defining_relations() {
        let t = qv_tower();
        let s1 = t.generator(0);
        let s2 = t.generator(1);
        assert_eq!(s1.mul(&s1), t.from_base(t.discs()[0].clone()));
        let both = s1.mul(&s2);
        let expected = t.discs()[0].mul(&t.discs()[1]);
        assert_eq!(both.mul(&both), t.from_base(expected));
    }

    #[test]
    fn inverse_of_one_plus_root() {
        let t = Tower::new(BaseField::RationalFunctions, vec![RatFunc::from_poly(&ZPoly::from_i64(&[-4, 0, 1]))]).unwrap();
        let x = t.one().add(&t.generator(0));
        let inv = x.inv().unwrap();
        // (1 - √d) / (1 - d) with d = v² − 4
        let denom = RatFunc::one().sub(&t.discs()[0]);
        let expected = t.one().sub(&t.generator(0)).scale(&denom.inv().unwrap());
        assert_eq!(inv, expected);
        assert!(x.mul(&inv).is_one());
    }

    #[test]
    fn galois_actions() {
        let t = qv_tower();
        let v = t.from_base(RatFunc::var());
        let x = v.add(&t.generator(0).scale(&RatFunc::from_int(2)))
            .add(&t.generator(1).scale(&RatFunc::from_int(3)))
            .add(&t.generator(0).mul(&t.generator(1)).scale(&RatFunc::from_int(5)));
        let g = x.galois(0b01);
        assert_eq!(g.coeff(0), x.coeff(0));
        assert_eq!(g.coeff(1), &x.coeff(1).neg());
        assert_eq!(g.coeff(2), x.coeff(2));
        assert_eq!(g.coeff(3), &x.coeff(3).neg());
        assert_eq!(x.galois(0), x);
        assert_eq!(g.galois(0b01), x);
        assert!(x.norm().is_polynomial());
    }

    #[test]
    fn degenerate_layers_collapse() {
        let requested = vec![RatFunc::zero(), RatFunc::from_int(12)];
        let (t, images, kinds) = Tower::reduced(BaseField::Rationals, &requested).unwrap();
        assert_eq!(t.depth(), 1);
        assert!(images[0].is_zero());
        assert_eq!(kinds[1], LayerKind::Generator(0));

        let (t, images, kinds) =
            Tower::reduced(BaseField::Rationals, &[RatFunc::from_frac(9, 4), RatFunc::from_frac(57, 4)]).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(images[0].as_base(), Some(&RatFunc::from_frac(3, 2)));
        assert!(matches!(kinds[0], LayerKind::Square(_)));

        // 3 * 12 = 36 is a square, so √12 = 6/3 · √3.
        let (t, images, kinds) = Tower::reduced(BaseField::Rationals, &[RatFunc::from_int(3), RatFunc::from_int(12)]).unwrap();
        assert_eq!(t.depth(), 1);
        assert!(matches!(kinds[1], LayerKind::Dependent { mask: 1, .. }));
        assert_eq!(images[1].mul(&images[1]), t.from_int(12));
        assert_eq!(images[1].sign().unwrap(), Ordering::Greater);
    }

    #[test]
    fn exact_sign() {
        let t = Tower::new(BaseField::Rationals, vec![RatFunc::from_int(5), RatFunc::from_int(17)]).unwrap();
        let s5 = t.generator(0);
        let s17 = t.generator(1);
        // √17 − √5 − 1.88 > 0 since √17 − √5 ≈ 1.887
        let x = s17.sub(&s5).sub(&t.from_rational(BigRational::new(188.into(), 100.into())));
        assert_eq!(x.sign().unwrap(), Ordering::Greater);
        let y = s17.sub(&s5).sub(&t.from_rational(BigRational::new(189.into(), 100.into())));
        assert_eq!(y.sign().unwrap(), Ordering::Less);
        assert_eq!(t.zero().sign().unwrap(), Ordering::Equal);
    }

    #[test]
    fn conjugation_on_imaginary_layers() {
        let t = Tower::new(BaseField::Rationals, vec![RatFunc::from_int(-2), RatFunc::from_int(-6), RatFunc::from_int(6)]).unwrap();
        assert_eq!(t.conjugation_mask(), Some(0b011));
        let x = t.generator(1).mul(&t.generator(2)); // √−6·√6 = 6i
        let n = x.to_numeric().unwrap();
        assert!((n.im.hi() - 6.0).abs() < 1e-14 && n.re.hi().abs() < 1e-14);
        assert_eq!(x.conj().unwrap(), x.neg());
    }
}
