//! Dense univariate polynomials over the integers.
//!
//! Coefficients are stored in ascending degree order and the vector never has
//! a trailing zero, so the zero polynomial is the empty vector. These are the
//! numerators and denominators of [`RatFunc`](super::RatFunc).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ZPoly {
    coeffs: Vec<BigInt>,
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        ZPoly { coeffs: vec![BigInt::one()] }
    }

    pub fn var() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// True for constants, including zero.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn max_norm(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn neg(&self) -> Self {
        ZPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = long.coeffs.clone();
        for (o, s) in out.iter_mut().zip(&short.coeffs) {
            *o += s;
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = other.coeffs.get(i);
            out.push(match (a, b) {
                (Some(a), Some(b)) => a - b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => -b,
                (None, None) => unreachable!(),
            });
        }
        Self::new(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        ZPoly {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Divide every coefficient by `k`; the caller guarantees exactness.
    pub fn div_scalar_exact(&self, k: &BigInt) -> Self {
        if k.is_one() {
            return self.clone();
        }
        ZPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| {
                    debug_assert!((c % k).is_zero());
                    c / k
                })
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Non-negative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Splits `self = content * prim` where `prim` is primitive with a
    /// positive leading coefficient. The returned content carries the sign.
    pub fn primitive_split(&self) -> (BigInt, ZPoly) {
        if self.is_zero() {
            return (BigInt::zero(), Self::zero());
        }
        let mut c = self.content();
        if self.lc().is_some_and(|l| l.is_negative()) {
            c = -c;
        }
        (c.clone(), self.div_scalar_exact(&c))
    }

    pub fn primitive_part(&self) -> ZPoly {
        self.primitive_split().1
    }

    /// Exact quotient `self / d` in Z[v], or `None` when `d` does not divide.
    pub fn div_exact(&self, d: &ZPoly) -> Option<ZPoly> {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if d.is_one() {
            return Some(self.clone());
        }
        if self.coeffs.len() < d.coeffs.len() {
            return None;
        }
        let dl = d.lc().unwrap();
        let dd = d.degree();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); self.coeffs.len() - dd];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(dl);
            if !r.is_zero() {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &q * dc;
            }
            quot[i] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(quot))
    }

    fn pseudo_rem(&self, d: &ZPoly) -> ZPoly {
        let dd = d.degree();
        let dl = d.lc().unwrap().clone();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let top = r.last().unwrap().clone();
            let shift = r.len() - 1 - dd;
            for c in r.iter_mut() {
                *c *= &dl;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[shift + j] -= &top * dc;
            }
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Self::new(r)
    }

    /// Greatest common divisor up to content: the result is primitive with a
    /// positive leading coefficient.
    pub fn gcd(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() {
            return other.primitive_part();
        }
        if other.is_zero() {
            return self.primitive_part();
        }
        if self.is_constant() || other.is_constant() {
            return Self::one();
        }
        let a = self.primitive_part();
        let b = other.primitive_part();
        if a == b {
            return a;
        }
        if b.degree() <= a.degree() && a.div_exact(&b).is_some() {
            return b;
        }
        if a.degree() <= b.degree() && b.div_exact(&a).is_some() {
            return a;
        }
        if let Some(g) = heuristic_gcd(&a, &b) {
            return g;
        }
        primitive_prs_gcd(a, b)
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        // Homogenised Horner: sum c_i p^i q^(n-i), divided by q^n at the end.
        let (p, q) = (x.numer(), x.denom());
        let mut acc = BigInt::zero();
        let mut qpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * p + c * &qpow;
            qpow *= q;
        }
        let denom = num_traits::pow(q.clone(), self.degree());
        BigRational::new(acc, denom)
    }

    /// Square root in Z[v] when one exists. The root has positive leading
    /// coefficient.
    pub fn sqrt_exact(&self) -> Option<ZPoly> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let n = self.degree();
        if n % 2 == 1 {
            return None;
        }
        let lc = self.lc().unwrap();
        if lc.is_negative() {
            return None;
        }
        let s = lc.sqrt();
        if &(&s * &s) != lc {
            return None;
        }
        let m = n / 2;
        let mut r = vec![BigInt::zero(); m + 1];
        r[m] = s;
        let two_lead = &r[m] * 2;
        for k in 1..=m {
            let idx = n - k;
            let mut acc = self.coeffs[idx].clone();
            for i in (m - k + 1)..m {
                let j = idx - i;
                if j > m - k && j < m + 1 && j != m {
                    acc -= &r[i] * &r[j];
                }
            }
            let (q, rem) = acc.div_rem(&two_lead);
            if !rem.is_zero() {
                return None;
            }
            r[m - k] = q;
        }
        let root = ZPoly::new(r);
        if &root.mul(&root) == self {
            Some(root)
        } else {
            None
        }
    }

    pub fn write_with_var(&self, f: &mut impl fmt::Write, var: &str) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 {
                        write!(f, "{var}")?;
                    } else {
                        write!(f, "{var}^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with_var(f, "v")
    }
}

/// Balanced residue of `x` modulo `m` in (-m/2, m/2].
fn symmetric_mod(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

// Char–Geddes–Gonnet heuristic gcd. Any candidate is verified by exact
// division, so a `None` only means the caller must fall back to the PRS.
fn heuristic_gcd(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    let bound = a.max_norm().min(b.max_norm());
    let mut xi: BigInt = bound * 2 + 29;
    let max_deg = a.degree().max(b.degree()) as u64;
    for _ in 0..6 {
        if xi.bits() * max_deg > 4_000_000 {
            return None;
        }
        let ea = a.eval_int(&xi);
        let eb = b.eval_int(&xi);
        let gamma = ea.gcd(&eb);
        if !gamma.is_zero() {
            let mut coeffs = Vec::new();
            let mut g = gamma;
            while !g.is_zero() {
                let c = symmetric_mod(&g, &xi);
                g = (g - &c) / &xi;
                coeffs.push(c);
            }
            let cand = ZPoly::new(coeffs).primitive_part();
            if !cand.is_zero() && a.div_exact(&cand).is_some() && b.div_exact(&cand).is_some() {
                return Some(cand);
            }
        }
        xi = xi * 73794 / 27011;
    }
    None
}

fn primitive_prs_gcd(a: ZPoly, b: ZPoly) -> ZPoly {
    let (mut a, mut b) = if a.degree() >= b.degree() { (a, b) } else { (b, a) };
    loop {
        let r = a.pseudo_rem(&b);
        if r.is_zero() {
            return b.primitive_part();
        }
        if r.degree() == 0 {
            return ZPoly::one();
        }
        a = b;
        b = r.primitive_part();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> ZPoly {
        ZPoly::from_i64(c)
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let f = p(&[8, 0, 1]); // v^2 + 8
        let g = p(&[-4, 0, 1]); // v^2 - 4
        let h = p(&[1, 3, -2, 5]);
        let a = f.mul(&h).scale(&BigInt::from(6));
        let b = g.mul(&h).mul(&h).scale(&BigInt::from(-4));
        assert_eq!(a.gcd(&b), h);
        assert_eq!(f.gcd(&g), ZPoly::one());
    }

    #[test]
    fn prs_matches_heuristic() {
        let h = p(&[3, -1, 0, 2]);
        let a = h.mul(&p(&[1, 1])).mul(&p(&[5, 0, 7]));
        let b = h.mul(&p(&[-1, 1])).mul(&p(&[2, 9]));
        assert_eq!(primitive_prs_gcd(a.clone(), b.clone()), h);
        assert_eq!(heuristic_gcd(&a, &b), Some(h));
    }

    #[test]
    fn exact_division_detects_remainder() {
        let a = p(&[-4, 0, 1]);
        assert_eq!(a.div_exact(&p(&[-2, 1])), Some(p(&[2, 1])));
        assert_eq!(a.div_exact(&p(&[-3, 1])), None);
        assert_eq!(p(&[1, 2]).div_exact(&p(&[2, 4])), None);
    }

    #[test]
    fn square_roots() {
        let r = p(&[3, -2, 5]);
        assert_eq!(r.mul(&r).sqrt_exact(), Some(r.clone()));
        assert_eq!(p(&[8, 0, 1]).sqrt_exact(), None);
        assert_eq!(p(&[4]).sqrt_exact(), Some(p(&[2])));
        assert_eq!(p(&[1, 0, 4, 0, 4]).sqrt_exact(), Some(p(&[1, 0, 2])));
    }

    #[test]
    fn rational_evaluation() {
        let f = p(&[-4, 0, 1]);
        let x = BigRational::new(5.into(), 2.into());
        assert_eq!(f.eval_rational(&x), BigRational::new(9.into(), 4.into()));
        assert_eq!(p(&[7]).eval_rational(&x), BigRational::from_integer(7.into()));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[-4, 0, 1]).to_string(), "v^2 - 4");
        assert_eq!(p(&[0, -3, 0, 2]).to_string(), "2*v^3 - 3*v");
    }
}
