//! The rational function field Q(v), kept in a unique canonical form.
//!
//! An element is `c * n / d` where `c` is a rational constant and `n`, `d` are
//! coprime primitive integer polynomials with positive leading coefficients.
//! Zero is `0 * 1 / 1`. Because the form is unique, equality is structural.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::ZPoly;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    c: BigRational,
    n: ZPoly,
    d: ZPoly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc {
            c: BigRational::zero(),
            n: ZPoly::one(),
            d: ZPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(c: BigRational) -> Self {
        RatFunc {
            c,
            n: ZPoly::one(),
            d: ZPoly::one(),
        }
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_rational(BigRational::from_integer(k.into()))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// The indeterminate v.
    pub fn var() -> Self {
        Self::from_poly(&ZPoly::var())
    }

    pub fn from_poly(p: &ZPoly) -> Self {
        let (c, n) = p.primitive_split();
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc {
            c: BigRational::from_integer(c),
            n,
            d: ZPoly::one(),
        }
    }

    /// Builds `num / den` and reduces it to canonical form.
    pub fn from_polys(num: &ZPoly, den: &ZPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (cn, pn) = num.primitive_split();
        if cn.is_zero() {
            return Ok(Self::zero());
        }
        let (cd, pd) = den.primitive_split();
        let g = pn.gcd(&pd);
        let n = pn.div_exact(&g).expect("gcd divides numerator");
        let d = pd.div_exact(&g).expect("gcd divides denominator");
        Ok(RatFunc {
            c: BigRational::new(cn, cd),
            n,
            d,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.c.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.n.is_one() && self.d.is_one()
    }

    pub fn as_constant(&self) -> Option<&BigRational> {
        self.is_constant().then_some(&self.c)
    }

    /// True when the denominator is a constant, i.e. the element lies in Q[v].
    pub fn is_polynomial(&self) -> bool {
        self.d.is_one()
    }

    pub fn content(&self) -> &BigRational {
        &self.c
    }

    pub fn numer(&self) -> &ZPoly {
        &self.n
    }

    pub fn denom(&self) -> &ZPoly {
        &self.d
    }

    /// Numerator with the rational content folded in, over a common integer
    /// denominator: returns `(N, k)` with `self = N / (k * d)`.
    pub fn integer_numerator(&self) -> (ZPoly, BigInt) {
        (self.n.scale(self.c.numer()), self.c.denom().clone())
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            c: -&self.c,
            n: self.n.clone(),
            d: self.d.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.is_constant() && other.is_constant() {
            return Self::from_rational(&self.c + &other.c);
        }
        if self.d == other.d && self.n == other.n {
            let c = &self.c + &other.c;
            if c.is_zero() {
                return Self::zero();
            }
            return RatFunc {
                c,
                n: self.n.clone(),
                d: self.d.clone(),
            };
        }
        // c1 n1 / d1 + c2 n2 / d2 with g = gcd(d1, d2), d_i = g e_i.
        let (a1, b1) = (self.c.numer(), self.c.denom());
        let (a2, b2) = (other.c.numer(), other.c.denom());
        let (g, e1, e2) = if self.d == other.d {
            (self.d.clone(), ZPoly::one(), ZPoly::one())
        } else {
            let g = self.d.gcd(&other.d);
            let e1 = self.d.div_exact(&g).unwrap();
            let e2 = other.d.div_exact(&g).unwrap();
            (g, e1, e2)
        };
        let t1 = self.n.mul(&e2).scale(&(a1 * b2));
        let t2 = other.n.mul(&e1).scale(&(a2 * b1));
        let t = t1.add(&t2);
        if t.is_zero() {
            return Self::zero();
        }
        let (ct, p) = t.primitive_split();
        // Only g can share factors with the new numerator.
        let h = p.gcd(&g);
        let (p, g) = if h.is_one() {
            (p, g)
        } else {
            (p.div_exact(&h).unwrap(), g.div_exact(&h).unwrap())
        };
        RatFunc {
            c: BigRational::new(ct, b1 * b2),
            n: p,
            d: g.mul(&e1).mul(&e2),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let c = &self.c * &other.c;
        if c.is_zero() {
            return Self::zero();
        }
        if self.is_constant() {
            return RatFunc {
                c,
                n: other.n.clone(),
                d: other.d.clone(),
            };
        }
        if other.is_constant() {
            return RatFunc {
                c,
                n: self.n.clone(),
                d: self.d.clone(),
            };
        }
        let g1 = self.n.gcd(&other.d);
        let g2 = other.n.gcd(&self.d);
        let n1 = self.n.div_exact(&g1).unwrap();
        let d2 = other.d.div_exact(&g1).unwrap();
        let n2 = other.n.div_exact(&g2).unwrap();
        let d1 = self.d.div_exact(&g2).unwrap();
        RatFunc {
            c,
            n: n1.mul(&n2),
            d: d1.mul(&d2),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc {
            c: self.c.recip(),
            n: self.d.clone(),
            d: self.n.clone(),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn scale_rational(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        RatFunc {
            c: &self.c * k,
            n: self.n.clone(),
            d: self.d.clone(),
        }
    }

    /// Value at a rational point.
    pub fn eval_rational(&self, x: &BigRational) -> Result<BigRational> {
        let dv = self.d.eval_rational(x);
        if dv.is_zero() {
            return Err(Error::PoleAtSpecialization(format!(
                "denominator {} vanishes at v = {}",
                self.d, x
            )));
        }
        Ok(&self.c * self.n.eval_rational(x) / dv)
    }

    /// Square root inside Q(v), if this element is a square there.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.c.is_negative() {
            return None;
        }
        let rn = self.c.numer().sqrt();
        let rd = self.c.denom().sqrt();
        if &(&rn * &rn) != self.c.numer() || &(&rd * &rd) != self.c.denom() {
            return None;
        }
        let n = self.n.sqrt_exact()?;
        let d = self.d.sqrt_exact()?;
        Some(RatFunc {
            c: BigRational::new(rn, rd),
            n,
            d,
        })
    }

    /// Degree of the numerator and the denominator.
    pub fn degrees(&self) -> (usize, usize) {
        (self.n.degree(), self.d.degree())
    }
}

impl From<BigRational> for RatFunc {
    fn from(c: BigRational) -> Self {
        Self::from_rational(c)
    }
}

fn write_rational_poly(f: &mut fmt::Formatter<'_>, c: &BigRational, p: &ZPoly) -> fmt::Result {
    let mut first = true;
    for (i, a) in p.coeffs().iter().enumerate().rev() {
        if a.is_zero() {
            continue;
        }
        let k = c * BigRational::from_integer(a.clone());
        let neg = k.is_negative();
        let k = k.abs();
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        match i {
            0 => write!(f, "{k}")?,
            _ => {
                if !k.is_one() {
                    write!(f, "{k}*")?;
                }
                if i == 1 {
                    f.write_str("v")?;
                } else {
                    write!(f, "v^{i}")?;
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        if self.d.is_one() {
            return write_rational_poly(f, &self.c, &self.n);
        }
        f.write_str("(")?;
        write_rational_poly(f, &self.c, &self.n)?;
        write!(f, ")/({})", self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> RatFunc {
        RatFunc::from_poly(&ZPoly::from_i64(c))
    }

    #[test]
    fn canonical_form_is_unique() {
        // (2v^2 - 8) / (4v + 8) = (v - 2) / 2
        let x = RatFunc::from_polys(&ZPoly::from_i64(&[-8, 0, 2]), &ZPoly::from_i64(&[8, 4])).unwrap();
        let y = poly(&[-2, 1]).scale_rational(&BigRational::new(1.into(), 2.into()));
        assert_eq!(x, y);
        assert!(x.is_polynomial());
        let neg_den = RatFunc::from_polys(&ZPoly::from_i64(&[1]), &ZPoly::from_i64(&[0, -3])).unwrap();
        assert_eq!(neg_den.denom(), &ZPoly::var());
        assert_eq!(neg_den.content(), &BigRational::new((-1).into(), 3.into()));
    }

    #[test]
    fn field_operations() {
        let a = RatFunc::from_polys(&ZPoly::from_i64(&[1, 1]), &ZPoly::from_i64(&[8, 0, 1])).unwrap();
        let b = RatFunc::from_polys(&ZPoly::from_i64(&[-4, 0, 1]), &ZPoly::from_i64(&[2, 1])).unwrap();
        let s = a.add(&b);
        assert_eq!(s.sub(&b), a);
        let p = a.mul(&b);
        assert_eq!(p.div(&b).unwrap(), a);
        assert_eq!(a.mul(&a.inv().unwrap()), RatFunc::one());
        assert!(a.sub(&a).is_zero());
        assert_eq!(RatFunc::zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn evaluation_and_poles() {
        let a = RatFunc::from_polys(&ZPoly::from_i64(&[1]), &ZPoly::from_i64(&[-4, 0, 1])).unwrap();
        let two = BigRational::from_integer(2.into());
        assert!(matches!(a.eval_rational(&two), Err(Error::PoleAtSpecialization(_))));
        let three = BigRational::from_integer(3.into());
        assert_eq!(a.eval_rational(&three).unwrap(), BigRational::new(1.into(), 5.into()));
    }

    #[test]
    fn square_detection() {
        let sq = RatFunc::from_polys(&ZPoly::from_i64(&[9, 6, 1]), &ZPoly::from_i64(&[4])).unwrap();
        assert_eq!(sq.sqrt(), Some(RatFunc::from_polys(&ZPoly::from_i64(&[3, 1]), &ZPoly::from_i64(&[2])).unwrap()));
        assert_eq!(poly(&[-4, 0, 1]).sqrt(), None);
        assert_eq!(RatFunc::from_int(-9).sqrt(), None);
        assert_eq!(RatFunc::from_frac(9, 4).sqrt(), Some(RatFunc::from_frac(3, 2)));
    }

    #[test]
    fn display_is_readable() {
        let a = RatFunc::from_polys(&ZPoly::from_i64(&[-4, 0, -2]), &ZPoly::from_i64(&[8, 0, 1])).unwrap();
        assert_eq!(a.to_string(), "(-2*v^2 - 4)/(v^2 + 8)");
        assert_eq!(RatFunc::from_frac(-3, 4).to_string(), "-3/4");
        assert_eq!(poly(&[1, 0, 1]).scale_rational(&BigRational::new(1.into(), 2.into())).to_string(), "1/2*v^2 + 1/2");
    }
}
