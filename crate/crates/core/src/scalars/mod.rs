//! Exact and numeric scalars.

pub mod numeric;
pub mod poly;
pub mod ratfunc;
pub mod specialize;
pub mod tower;

use std::fmt;

pub use numeric::{BranchTags, NumericValue};
pub use poly::ZPoly;
pub use ratfunc::RatFunc;
pub use specialize::{ExactSpecialization, NumericSpecialization};
pub use tower::{BaseField, LayerKind, Tower, TowerElem};

use crate::error::Result;

/// The field operations matrices need, implemented for exact tower elements
/// and for numeric values.
pub trait Scalar: Clone + fmt::Debug + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, k: i64) -> Self;
    fn s_add(&self, other: &Self) -> Self;
    fn s_sub(&self, other: &Self) -> Self;
    fn s_mul(&self, other: &Self) -> Self;
    fn s_neg(&self) -> Self;
    fn try_div(&self, other: &Self) -> Result<Self>;
    fn is_exact_zero(&self) -> bool;
}

impl Scalar for TowerElem {
    fn zero_like(&self) -> Self {
        self.tower().zero()
    }
    fn one_like(&self) -> Self {
        self.tower().one()
    }
    fn from_i64_like(&self, k: i64) -> Self {
        self.tower().from_int(k)
    }
    fn s_add(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn s_sub(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn s_mul(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn s_neg(&self) -> Self {
        self.neg()
    }
    fn try_div(&self, other: &Self) -> Result<Self> {
        self.div(other)
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for NumericValue {
    fn zero_like(&self) -> Self {
        NumericValue::zero()
    }
    fn one_like(&self) -> Self {
        NumericValue::one()
    }
    fn from_i64_like(&self, k: i64) -> Self {
        NumericValue::from_f64(k as f64)
    }
    fn s_add(&self, other: &Self) -> Self {
        self + other
    }
    fn s_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn s_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn s_neg(&self) -> Self {
        -self
    }
    fn try_div(&self, other: &Self) -> Result<Self> {
        NumericValue::try_div(self, other)
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}
