//! Complex numbers in double-double precision (about 106 significand bits)
//! carrying the square-root branches used to produce them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Which root was taken for each tower layer, as bit masks over layers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct BranchTags {
    /// Positive real root of a positive discriminant.
    pub positive_real: u32,
    /// `i·√|d|` for a negative discriminant.
    pub positive_imaginary: u32,
    /// Principal complex root of a non-real discriminant.
    pub principal: u32,
}

impl BranchTags {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn union(self, other: Self) -> Self {
        BranchTags {
            positive_real: self.positive_real | other.positive_real,
            positive_imaginary: self.positive_imaginary | other.positive_imaginary,
            principal: self.principal | other.principal,
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericValue {
    pub re: TwoFloat,
    pub im: TwoFloat,
    branches: BranchTags,
}

pub fn rational_to_twofloat(q: &BigRational) -> TwoFloat {
    let hi = q.to_f64().unwrap_or(f64::NAN);
    if !hi.is_finite() || hi == 0.0 {
        return TwoFloat::from(hi);
    }
    let rem = q - BigRational::from_float(hi).expect("finite");
    TwoFloat::new_add(hi, rem.to_f64().unwrap_or(0.0))
}

/// Double-double quotient by long division. The `/` operator of the
/// `twofloat` crate drops the low word of the reciprocal, which leaves
/// quotients accurate only to double precision.
pub fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    if !q1.is_finite() {
        return TwoFloat::from(q1);
    }
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

pub fn bigint_to_twofloat(k: &BigInt) -> TwoFloat {
    rational_to_twofloat(&BigRational::from_integer(k.clone()))
}

/// Exact rational value of a finite double-double.
pub fn twofloat_to_rational(x: TwoFloat) -> Option<BigRational> {
    let hi = BigRational::from_float(x.hi())?;
    let lo = BigRational::from_float(x.lo())?;
    Some(hi + lo)
}

/// Parses `p/q`, an integer, or a decimal literal with optional exponent
/// into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational or decimal number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Scientific notation with `sig` significant digits, computed from the
/// exact value of the double-double.
pub fn format_decimal(x: TwoFloat, sig: usize) -> String {
    if x.hi().is_nan() {
        return "NaN".into();
    }
    if x.hi().is_infinite() {
        return if x.hi() > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let Some(r) = twofloat_to_rational(x) else {
        return "NaN".into();
    };
    format_rational(&r, sig)
}

pub fn format_rational(r: &BigRational, sig: usize) -> String {
    let sig = sig.max(1);
    if r.is_zero() {
        return format!("0.{}e0", "0".repeat(sig - 1));
    }
    let neg = r.is_negative();
    let a = r.abs();
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut e = a.to_f64().map(|f| f.log10().floor() as i64).unwrap_or(0);
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            num_traits::pow(ten.clone(), k as usize)
        } else {
            BigRational::one() / num_traits::pow(ten.clone(), (-k) as usize)
        }
    };
    // Fix the estimate so that 10^e <= a < 10^(e+1).
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let scaled = &a / pow10(e - sig as i64 + 1);
    let mut m = scaled.round().to_integer();
    if m.to_string().len() > sig {
        m /= 10;
        e += 1;
    }
    let digits = m.to_string();
    let (lead, rest) = digits.split_at(1);
    let sign = if neg { "-" } else { "" };
    if rest.is_empty() {
        format!("{sign}{lead}e{e}")
    } else {
        format!("{sign}{lead}.{rest}e{e}")
    }
}

impl NumericValue {
    pub fn new(re: TwoFloat, im: TwoFloat) -> Self {
        NumericValue {
            re,
            im,
            branches: BranchTags::empty(),
        }
    }

    pub fn zero() -> Self {
        Self::from_f64(0.0)
    }

    pub fn one() -> Self {
        Self::from_f64(1.0)
    }

    pub fn i() -> Self {
        Self::new(TwoFloat::from(0.0), TwoFloat::from(1.0))
    }

    pub fn from_f64(x: f64) -> Self {
        Self::new(TwoFloat::from(x), TwoFloat::from(0.0))
    }

    pub fn from_real(x: TwoFloat) -> Self {
        Self::new(x, TwoFloat::from(0.0))
    }

    pub fn from_rational(q: &BigRational) -> Self {
        Self::from_real(rational_to_twofloat(q))
    }

    pub fn from_c64(z: Complex64) -> Self {
        Self::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
    }

    /// Square root of a real number for tower layer `layer`: positive real
    /// for `x ≥ 0`, `i·√|x|` otherwise.
    pub fn sqrt_of_real(x: TwoFloat, layer: usize) -> Self {
        let bit = 1u32 << layer;
        if x >= TwoFloat::from(0.0) {
            let mut r = Self::from_real(x.sqrt());
            r.branches.positive_real = bit;
            r
        } else {
            let mut r = Self::new(TwoFloat::from(0.0), (-x).sqrt());
            r.branches.positive_imaginary = bit;
            r
        }
    }

    /// Principal square root (non-negative real part).
    pub fn sqrt_principal(&self, layer: usize) -> Self {
        let m = self.abs();
        let zero = TwoFloat::from(0.0);
        let half = TwoFloat::from(0.5);
        let re = ((m + self.re) * half).max(zero).sqrt();
        let mut im = ((m - self.re) * half).max(zero).sqrt();
        if self.im < zero {
            im = -im;
        }
        let mut r = Self::new(re, im);
        r.branches = self.branches;
        r.branches.principal |= 1 << layer;
        r
    }

    pub fn branches(&self) -> BranchTags {
        self.branches
    }

    pub fn with_branches(mut self, tags: BranchTags) -> Self {
        self.branches = tags;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.re == TwoFloat::from(0.0) && self.im == TwoFloat::from(0.0)
    }

    pub fn norm_sqr(&self) -> TwoFloat {
        self.re * self.re + self.im * self.im
    }

    /// Modulus `√(re² + im²)`.
    pub fn abs(&self) -> TwoFloat {
        self.re.hypot(self.im)
    }

    pub fn conj(&self) -> Self {
        let mut r = *self;
        r.im = -r.im;
        r
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.hi() + self.re.lo(), self.im.hi() + self.im.lo())
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        let den = other.norm_sqr();
        if den == TwoFloat::from(0.0) {
            return Err(Error::DivisionByZero);
        }
        let re = dd_div(self.re * other.re + self.im * other.im, den);
        let im = dd_div(self.im * other.re - self.re * other.im, den);
        Ok(Self::new(re, im).with_branches(self.branches.union(other.branches)))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one().try_div(self)
    }

    pub fn scale(&self, k: TwoFloat) -> Self {
        Self::new(self.re * k, self.im * k).with_branches(self.branches)
    }

    /// `re` and `im` formatted with `sig` significant digits.
    pub fn format(&self, sig: usize) -> String {
        let re = format_decimal(self.re, sig);
        let im = format_decimal(self.im.abs(), sig);
        let sign = if self.im.is_sign_negative() { "-" } else { "+" };
        format!("{re} {sign} {im}i")
    }
}

impl Add for &NumericValue {
    type Output = NumericValue;
    fn add(self, o: &NumericValue) -> NumericValue {
        NumericValue::new(self.re + o.re, self.im + o.im).with_branches(self.branches.union(o.branches))
    }
}

impl Sub for &NumericValue {
    type Output = NumericValue;
    fn sub(self, o: &NumericValue) -> NumericValue {
        NumericValue::new(self.re - o.re, self.im - o.im).with_branches(self.branches.union(o.branches))
    }
}

impl Mul for &NumericValue {
    type Output = NumericValue;
    fn mul(self, o: &NumericValue) -> NumericValue {
        NumericValue::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
            .with_branches(self.branches.union(o.branches))
    }
}

impl Neg for &NumericValue {
    type Output = NumericValue;
    fn neg(self) -> NumericValue {
        NumericValue::new(-self.re, -self.im).with_branches(self.branches)
    }
}

macro_rules! by_value {
    ($tr:ident, $m:ident) => {
        impl $tr for NumericValue {
            type Output = NumericValue;
            fn $m(self, o: NumericValue) -> NumericValue {
                (&self).$m(&o)
            }
        }
    };
}
by_value!(Add, add);
by_value!(Sub, sub);
by_value!(Mul, mul);

impl Neg for NumericValue {
    type Output = NumericValue;
    fn neg(self) -> NumericValue {
        -&self
    }
}

impl fmt::Display for NumericValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(f.precision().unwrap_or(30)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_rational("5/2").unwrap(), BigRational::new(5.into(), 2.into()));
        assert_eq!(parse_rational("2.5").unwrap(), BigRational::new(5.into(), 2.into()));
        assert_eq!(parse_rational("-0.125").unwrap(), BigRational::new((-1).into(), 8.into()));
        assert_eq!(parse_rational("3").unwrap(), BigRational::from_integer(3.into()));
        assert_eq!(parse_rational("1e-2").unwrap(), BigRational::new(1.into(), 100.into()));
        assert_eq!(parse_rational(".5").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn double_double_round_trip() {
        let third = BigRational::new(1.into(), 3.into());
        let x = rational_to_twofloat(&third);
        let back = twofloat_to_rational(x).unwrap();
        let err = (back - &third).abs();
        assert!(err < BigRational::new(1.into(), BigInt::from(10).pow(31)));
    }

    #[test]
    fn long_division_keeps_low_word() {
        let third = dd_div(TwoFloat::from(1.0), TwoFloat::from(3.0));
        let exact = BigRational::new(1.into(), 3.into());
        let err = (twofloat_to_rational(third).unwrap() - exact).abs();
        assert!(err < BigRational::new(1.into(), BigInt::from(10).pow(32)));
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(format_decimal(TwoFloat::from(1.5), 3), "1.50e0");
        assert_eq!(format_decimal(TwoFloat::from(-0.001), 2), "-1.0e-3");
        assert_eq!(format_decimal(TwoFloat::from(9.999), 2), "1.0e1");
        let sqrt2 = TwoFloat::from(2.0).sqrt();
        assert_eq!(format_decimal(sqrt2, 30), "1.41421356237309504880168872421e0");
    }

    #[test]
    fn branch_convention() {
        let r = NumericValue::sqrt_of_real(TwoFloat::from(-3.0), 0);
        assert!(r.re.hi() == 0.0 && (r.im.hi() - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.branches().positive_imaginary, 1);
        let sq = &r * &r;
        assert!((sq.re + TwoFloat::from(3.0)).abs() < TwoFloat::from(1e-30));
    }

    #[test]
    fn complex_division() {
        let a = NumericValue::new(TwoFloat::from(1.0), TwoFloat::from(2.0));
        let b = NumericValue::new(TwoFloat::from(3.0), TwoFloat::from(-1.0));
        let q = a.try_div(&b).unwrap();
        let back = &q * &b;
        let err = (back - a).abs();
        assert!(err < TwoFloat::from(1e-28), "{err:?} {back:?}");
        assert!(a.try_div(&NumericValue::zero()).is_err());
    }
}
