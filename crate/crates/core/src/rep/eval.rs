//! The generator matrices of `ρ_v`, word evaluation and the relation suite.

use crate::error::{Error, Result};
use crate::matrix::Mat4;
use crate::scalars::{NumericValue, Scalar, TowerElem};

use super::context::{ExactContext, NumericContext};
use super::word::{Letter, Word};

/// `(ρ(u), ρ(c))` from the values of `v`, `√(v²−4)` and `√(v²+8)`.
///
/// `√((v²−4)/(v²+8))` is written `√(v²−4)·√(v²+8)/(v²+8)`.
pub fn generator_matrices<T: Scalar>(v: &T, s1: &T, s2: &T) -> Result<(Mat4<T>, Mat4<T>)> {
    let k = |n: i64| v.from_i64_like(n);
    let (zero, one) = (v.zero_like(), v.one_like());
    let v2 = v.s_mul(v);
    let v2p8 = v2.s_add(&k(8));
    if v2p8.is_exact_zero() {
        return Err(Error::PoleAtSpecialization("v^2 + 8 vanishes".into()));
    }
    let ratio = s1.s_mul(s2).try_div(&v2p8)?;
    let lower = k(-2).s_mul(&v2.s_add(&k(2))).try_div(&v2p8)?;
    let u = Mat4::from_rows([
        [one.clone(), zero.clone(), zero.clone(), zero.clone()],
        [zero.clone(), one.clone(), zero.clone(), zero.clone()],
        [zero.clone(), zero.clone(), ratio.clone(), one.clone()],
        [zero.clone(), zero.clone(), lower, ratio.s_neg()],
    ]);
    let vs2 = v.s_mul(s2);
    let c = Mat4::from_rows([
        [
            v.s_add(s2).try_div(&k(4))?,
            zero.clone(),
            k(4).s_sub(&v2).s_sub(&vs2).try_div(&k(8))?,
            zero.clone(),
        ],
        [
            zero.clone(),
            v.s_sub(s2).try_div(&k(4))?,
            zero.clone(),
            k(-4).s_add(&v2).s_sub(&vs2).try_div(&k(8))?,
        ],
        [one.clone(), zero.clone(), v.s_neg().s_sub(s2).try_div(&k(4))?, zero.clone()],
        [zero.clone(), one.s_neg(), zero.clone(), v.s_neg().s_add(s2).try_div(&k(4))?],
    ]);
    Ok((u, c))
}

/// Evaluates words from the generator matrices and their inverses, which
/// are computed once when the evaluator is built.
#[derive(Clone, Debug)]
pub struct Evaluator<T> {
    u: Mat4<T>,
    c: Mat4<T>,
    u_inv: Mat4<T>,
    c_inv: Mat4<T>,
}

impl<T: Scalar> Evaluator<T> {
    pub fn new(u: Mat4<T>, c: Mat4<T>) -> Result<Self> {
        let u_inv = u.inverse()?;
        let c_inv = c.inverse()?;
        Ok(Evaluator { u, c, u_inv, c_inv })
    }

    pub fn from_values(v: &T, s1: &T, s2: &T) -> Result<Self> {
        let (u, c) = generator_matrices(v, s1, s2)?;
        Self::new(u, c)
    }

    pub fn u(&self) -> &Mat4<T> {
        &self.u
    }

    pub fn c(&self) -> &Mat4<T> {
        &self.c
    }

    /// Image of a letter of the `{u, c, U, C}` alphabet.
    pub fn letter(&self, l: Letter) -> &Mat4<T> {
        match l {
            Letter::U => &self.u,
            Letter::C => &self.c,
            Letter::UInv => &self.u_inv,
            Letter::CInv => &self.c_inv,
            _ => panic!("letter {l:?} must be expanded first"),
        }
    }

    pub fn identity(&self) -> Mat4<T> {
        Mat4::identity(self.u.get(0, 0))
    }

    fn product(&self, expanded: &Word) -> Mat4<T> {
        let mut it = expanded.letters().iter();
        match it.next() {
            None => self.identity(),
            Some(&first) => it.fold(self.letter(first).clone(), |acc, &l| acc.mul(self.letter(l))),
        }
    }

    /// `ρ(w)`: left-to-right product over the expanded word.
    pub fn evaluate(&self, w: &Word) -> Mat4<T> {
        self.product(&w.expand())
    }

    /// `ρ(w)` without using `u⁴ = 1` to shorten the expansion.
    pub fn evaluate_unreduced(&self, w: &Word) -> Mat4<T> {
        self.product(&w.expand_free())
    }
}

impl ExactContext {
    pub fn generator_matrices(&self) -> Result<(Mat4<TowerElem>, Mat4<TowerElem>)> {
        generator_matrices(self.v(), self.s1(), self.s2())
    }

    pub fn evaluator(&self) -> Result<Evaluator<TowerElem>> {
        Evaluator::from_values(self.v(), self.s1(), self.s2())
    }
}

impl NumericContext {
    pub fn generator_matrices(&self) -> Result<(Mat4<NumericValue>, Mat4<NumericValue>)> {
        generator_matrices(self.v(), self.s1(), self.s2())
    }

    pub fn evaluator(&self) -> Result<Evaluator<NumericValue>> {
        Evaluator::from_values(self.v(), self.s1(), self.s2())
    }
}

/// The two defining relators of the Vol3 group in `a, b`.
pub const RELATORS: [&str; 2] = ["aabbABAbb", "aBaBabaaab"];

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RelationVerdict {
    Identity,
    ScalarMatrix { lambda: String },
    Failed { nonzero_entries: usize },
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct RelationEntry {
    pub relation: String,
    #[serde(flatten)]
    pub verdict: RelationVerdict,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct RelationReport {
    pub context: String,
    pub relations: Vec<RelationEntry>,
}

impl RelationReport {
    pub fn all_identity(&self) -> bool {
        self.relations.iter().all(|r| r.verdict == RelationVerdict::Identity)
    }

    pub fn any_failed(&self) -> bool {
        self.relations.iter().any(|r| matches!(r.verdict, RelationVerdict::Failed { .. }))
    }
}

fn classify(m: &Mat4<TowerElem>) -> RelationVerdict {
    if m.is_identity() {
        RelationVerdict::Identity
    } else if let Some(l) = m.scalar_value() {
        RelationVerdict::ScalarMatrix { lambda: l.to_string() }
    } else {
        RelationVerdict::Failed {
            nonzero_entries: m.identity_defects(),
        }
    }
}

/// Evaluates `u⁴` and both relators exactly. The relators are multiplied
/// out letter by letter without shortening `u`-powers.
pub fn verify_relations(ctx: &ExactContext) -> Result<RelationReport> {
    let ev = ctx.evaluator()?;
    let mut relations = vec![RelationEntry {
        relation: "uuuu".into(),
        verdict: classify(&ev.u().pow(4)),
    }];
    for r in RELATORS {
        let w = Word::parse(r)?;
        relations.push(RelationEntry {
            relation: r.into(),
            verdict: classify(&ev.evaluate_unreduced(&w)),
        });
    }
    Ok(RelationReport {
        context: ctx.spec().to_string(),
        relations,
    })
}
