//! Scalar contexts in which `ρ_v` is evaluated.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::matrix::Mat4;
use crate::scalars::numeric::parse_rational;
use crate::scalars::{
    BaseField, ExactSpecialization, LayerKind, NumericSpecialization, NumericValue, RatFunc, Tower, TowerElem, ZPoly,
};

/// A context named on the command line: `symbolic`, `v=<rational>`,
/// `v=i*sqrt(2)` or `numeric:v=<decimal>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ContextSpec {
    Symbolic,
    Rational(BigRational),
    ISqrt2,
    Numeric(BigRational),
}

impl ContextSpec {
    pub fn is_exact(&self) -> bool {
        !matches!(self, ContextSpec::Numeric(_))
    }

    /// Parses a bare value as given to `--v`: a rational, a decimal, or
    /// `i*sqrt(2)`. Decimals are read exactly.
    pub fn from_value(text: &str) -> Result<ContextSpec> {
        let t = text.trim();
        if is_isqrt2(t) {
            return Ok(ContextSpec::ISqrt2);
        }
        Ok(ContextSpec::Rational(parse_rational(t)?))
    }

    /// The value of `v` when it is rational.
    pub fn rational_value(&self) -> Option<&BigRational> {
        match self {
            ContextSpec::Rational(q) | ContextSpec::Numeric(q) => Some(q),
            _ => None,
        }
    }
}

fn is_isqrt2(t: &str) -> bool {
    let compact: String = t.chars().filter(|c| !c.is_whitespace()).collect();
    matches!(compact.as_str(), "i*sqrt(2)" | "isqrt(2)" | "i*sqrt2" | "sqrt(-2)")
}

impl FromStr for ContextSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<ContextSpec> {
        let t = s.trim();
        if t == "symbolic" {
            return Ok(ContextSpec::Symbolic);
        }
        if let Some(rest) = t.strip_prefix("numeric:v=") {
            return Ok(ContextSpec::Numeric(parse_rational(rest)?));
        }
        if let Some(rest) = t.strip_prefix("v=") {
            return ContextSpec::from_value(rest);
        }
        Err(Error::Parse(format!(
            "unknown context {s:?}; expected symbolic, v=<rational>, v=i*sqrt(2) or numeric:v=<decimal>"
        )))
    }
}

pub fn format_value(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        q.to_string()
    }
}

impl fmt::Display for ContextSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextSpec::Symbolic => f.write_str("symbolic"),
            ContextSpec::Rational(q) => write!(f, "v={}", format_value(q)),
            ContextSpec::ISqrt2 => f.write_str("v=i*sqrt(2)"),
            ContextSpec::Numeric(q) => write!(f, "numeric:v={}", format_value(q)),
        }
    }
}

/// `Q(v)(√(v²−4), √(v²+8))`, shared by all symbolic computations.
pub fn symbolic_tower() -> Arc<Tower> {
    static TOWER: OnceLock<Arc<Tower>> = OnceLock::new();
    TOWER
        .get_or_init(|| {
            Tower::new(
                BaseField::RationalFunctions,
                vec![
                    RatFunc::from_poly(&ZPoly::from_i64(&[-4, 0, 1])),
                    RatFunc::from_poly(&ZPoly::from_i64(&[8, 0, 1])),
                ],
            )
            .expect("v^2-4 and v^2+8 are independent non-squares")
        })
        .clone()
}

/// An exact context: the symbolic tower or an exact specialization of it.
#[derive(Clone, Debug)]
pub struct ExactContext {
    spec: ContextSpec,
    tower: Arc<Tower>,
    v: TowerElem,
    s1: TowerElem,
    s2: TowerElem,
    specialization: Option<ExactSpecialization>,
}

impl ExactContext {
    pub fn symbolic() -> ExactContext {
        let t = symbolic_tower();
        ExactContext {
            spec: ContextSpec::Symbolic,
            v: t.from_base(RatFunc::var()),
            s1: t.generator(0),
            s2: t.generator(1),
            tower: t,
            specialization: None,
        }
    }

    pub fn at_rational(v0: &BigRational) -> Result<ExactContext> {
        let s = ExactSpecialization::at_rational(&symbolic_tower(), v0)?;
        Ok(ExactContext {
            spec: ContextSpec::Rational(v0.clone()),
            tower: s.target().clone(),
            v: s.v().clone(),
            s1: s.roots()[0].clone(),
            s2: s.roots()[1].clone(),
            specialization: Some(s),
        })
    }

    /// `v = i√2` over `Q(√−2, √−6, √6)`: `v = √−2`, `√(v²−4) = √−6`,
    /// `√(v²+8) = √6`.
    pub fn at_i_sqrt2() -> Result<ExactContext> {
        let t = Tower::new(
            BaseField::Rationals,
            vec![RatFunc::from_int(-2), RatFunc::from_int(-6), RatFunc::from_int(6)],
        )?;
        let v = t.generator(0);
        let s1 = t.generator(1);
        let s2 = t.generator(2);
        let s = ExactSpecialization::at_point(&symbolic_tower(), v.clone(), vec![s1.clone(), s2.clone()])?;
        Ok(ExactContext {
            spec: ContextSpec::ISqrt2,
            tower: t,
            v,
            s1,
            s2,
            specialization: Some(s),
        })
    }

    pub fn from_spec(spec: &ContextSpec) -> Result<ExactContext> {
        match spec {
            ContextSpec::Symbolic => Ok(Self::symbolic()),
            ContextSpec::Rational(q) => Self::at_rational(q),
            ContextSpec::ISqrt2 => Self::at_i_sqrt2(),
            ContextSpec::Numeric(_) => Err(Error::InvalidInput(format!("{spec} is not an exact context"))),
        }
    }

    pub fn spec(&self) -> &ContextSpec {
        &self.spec
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn is_symbolic(&self) -> bool {
        self.specialization.is_none()
    }

    pub fn v(&self) -> &TowerElem {
        &self.v
    }

    /// Image of `√(v²−4)`.
    pub fn s1(&self) -> &TowerElem {
        &self.s1
    }

    /// Image of `√(v²+8)`.
    pub fn s2(&self) -> &TowerElem {
        &self.s2
    }

    /// How the two roots were realised (zero, square, dependent or new layer).
    pub fn layer_kinds(&self) -> Vec<LayerKind> {
        match &self.specialization {
            None => vec![LayerKind::Generator(0), LayerKind::Generator(1)],
            Some(s) => s.layer_kinds().to_vec(),
        }
    }

    /// Maps an element of the symbolic tower into this context.
    pub fn specialize(&self, x: &TowerElem) -> Result<TowerElem> {
        match &self.specialization {
            None => Ok(x.clone()),
            Some(s) => s.apply(x),
        }
    }

    pub fn specialize_base(&self, c: &RatFunc) -> Result<TowerElem> {
        match &self.specialization {
            None => Ok(self.tower.from_base(c.clone())),
            Some(s) => s.eval_base(c),
        }
    }

    pub fn specialize_matrix(&self, m: &Mat4<TowerElem>) -> Result<Mat4<TowerElem>> {
        m.try_map(|x| self.specialize(x))
    }

    /// Numeric values of this context, when it is a specialization over Q.
    pub fn to_numeric(&self) -> Result<NumericContext> {
        if self.is_symbolic() {
            return Err(Error::InvalidInput("the symbolic context has no numeric value".into()));
        }
        Ok(NumericContext {
            spec: self.spec.clone(),
            v: self.v.to_numeric()?,
            s1: self.s1.to_numeric()?,
            s2: self.s2.to_numeric()?,
        })
    }
}

/// A numeric context in double-double precision.
#[derive(Clone, Debug)]
pub struct NumericContext {
    spec: ContextSpec,
    v: NumericValue,
    s1: NumericValue,
    s2: NumericValue,
}

impl NumericContext {
    /// Roots follow the branch convention of [`NumericSpecialization::at`].
    pub fn at(v0: NumericValue, spec: ContextSpec) -> Result<NumericContext> {
        let s = NumericSpecialization::at(&symbolic_tower(), v0)?;
        Ok(NumericContext {
            spec,
            v: *s.v(),
            s1: s.roots()[0],
            s2: s.roots()[1],
        })
    }

    pub fn at_rational(v0: &BigRational) -> Result<NumericContext> {
        Self::at(NumericValue::from_rational(v0), ContextSpec::Numeric(v0.clone()))
    }

    pub fn from_spec(spec: &ContextSpec) -> Result<NumericContext> {
        match spec {
            ContextSpec::Numeric(q) => Self::at_rational(q),
            ContextSpec::Symbolic => Err(Error::InvalidInput("the symbolic context has no numeric value".into())),
            other => ExactContext::from_spec(other)?.to_numeric(),
        }
    }

    pub fn spec(&self) -> &ContextSpec {
        &self.spec
    }

    pub fn v(&self) -> &NumericValue {
        &self.v
    }

    pub fn s1(&self) -> &NumericValue {
        &self.s1
    }

    pub fn s2(&self) -> &NumericValue {
        &self.s2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_context_names() {
        assert_eq!("symbolic".parse::<ContextSpec>().unwrap(), ContextSpec::Symbolic);
        assert_eq!(
            "v=5/2".parse::<ContextSpec>().unwrap(),
            ContextSpec::Rational(BigRational::new(5.into(), 2.into()))
        );
        assert_eq!("v=i*sqrt(2)".parse::<ContextSpec>().unwrap(), ContextSpec::ISqrt2);
        assert_eq!(
            "numeric:v=1.5".parse::<ContextSpec>().unwrap(),
            ContextSpec::Numeric(BigRational::new(3.into(), 2.into()))
        );
        assert!("v=".parse::<ContextSpec>().is_err());
        assert!("bogus".parse::<ContextSpec>().is_err());
        assert_eq!(ContextSpec::Rational(BigRational::new(5.into(), 2.into())).to_string(), "v=5/2");
    }

    #[test]
    fn roots_at_rational_points() {
        let c = ExactContext::at_rational(&BigRational::from_integer(3.into())).unwrap();
        assert_eq!(c.tower().discs(), &[RatFunc::from_int(5), RatFunc::from_int(17)]);
        let c = ExactContext::at_rational(&BigRational::new(5.into(), 2.into())).unwrap();
        assert_eq!(c.s1().as_base(), Some(&RatFunc::from_frac(3, 2)));
        let c = ExactContext::at_rational(&BigRational::from_integer(1.into())).unwrap();
        assert_eq!(c.s2().as_base(), Some(&RatFunc::from_int(3)));
        assert_eq!(c.s1().mul(c.s1()), c.tower().from_int(-3));
    }

    #[test]
    fn isqrt2_roots_square_correctly() {
        let c = ExactContext::at_i_sqrt2().unwrap();
        assert_eq!(c.v().mul(c.v()), c.tower().from_int(-2));
        assert_eq!(c.s1().mul(c.s1()), c.tower().from_int(-6));
        assert_eq!(c.s2().mul(c.s2()), c.tower().from_int(6));
    }
}
