//! Per-pair density pipeline and certificates.

use std::collections::HashSet;
use std::ops::ControlFlow;

use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::charpoly::{char_poly, eigen_report, shape_decompose, Biproximality, CharShape, Obstruction};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::forms::{invariant_forms, invariant_hermitian_exact, signature, Signature, Symmetry};
use crate::linalg::{det, IncrementalSpan};
use crate::matrix::{DenseMatrix, Mat4};
use crate::rep::{ContextSpec, Evaluator, ExactContext, NumericContext, Word};
use crate::scalars::numeric::format_decimal;
use crate::scalars::{Scalar, TowerElem};

/// Visits the elements `w(g1, g2)` for freely reduced words `w` in
/// `x, y, X, Y` by increasing length, lexicographic within a length, with
/// images built from the image of the prefix. Words representing an element
/// already visited (same canonical form) are skipped.
pub fn enumerate_words<T: Scalar>(
    ev: &Evaluator<T>,
    g1: &Word,
    g2: &Word,
    max_len: usize,
    include_empty: bool,
    mut visit: impl FnMut(usize, &Word, &Mat4<T>) -> Result<ControlFlow<()>>,
) -> Result<()> {
    let gens = [g1.clone(), g2.clone(), g1.inverse(), g2.inverse()];
    let images: Vec<Mat4<T>> = gens.iter().map(|g| ev.evaluate(g)).collect();
    let mut seen: HashSet<String> = HashSet::new();
    let empty = Word::empty();
    seen.insert(empty.expand().to_string());
    if include_empty && visit(0, &empty, &ev.identity())?.is_break() {
        return Ok(());
    }
    // (last abstract letter, word, image)
    let mut level: Vec<(Option<usize>, Word, Mat4<T>)> = vec![(None, empty, ev.identity())];
    for len in 1..=max_len {
        let mut next = Vec::new();
        for (last, w, m) in &level {
            for l in 0..4 {
                if last.is_some_and(|p| p == (l + 2) % 4) {
                    continue;
                }
                let word = w.concat(&gens[l]);
                if !seen.insert(word.expand().to_string()) {
                    continue;
                }
                let img = m.mul(&images[l]);
                if visit(len, &word, &img)?.is_break() {
                    return Ok(());
                }
                next.push((Some(l), word, img));
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct BurnsideWitness {
    pub words: Vec<Word>,
    /// Determinant of the 16 flattened images stacked as rows.
    pub delta: TowerElem,
}

/// Outcome of the span search behind [`burnside_witness`].
#[derive(Clone, Debug)]
pub enum BurnsideOutcome {
    Spanning(BurnsideWitness),
    /// A whole word length added nothing, so the span is the algebra
    /// generated by the pair and has this dimension.
    Closed { rank: usize, words: Vec<Word> },
    Exhausted { rank: usize, words: Vec<Word> },
}

pub fn burnside_search(g1: &Word, g2: &Word, ctx: &ExactContext, max_len: usize) -> Result<BurnsideOutcome> {
    if max_len == 0 {
        return Err(Error::InvalidInput("Burnside budget must be at least 1".into()));
    }
    let ev = ctx.evaluator()?;
    let mut span = IncrementalSpan::new(16);
    let mut words = Vec::new();
    let mut rows = Vec::new();
    let mut level_gain = (0usize, false);
    let mut closed = false;
    enumerate_words(&ev, g1, g2, max_len, true, |len, w, m| {
        if len != level_gain.0 {
            if !level_gain.1 {
                closed = true;
                return Ok(ControlFlow::Break(()));
            }
            level_gain = (len, false);
        }
        let flat = m.flatten();
        if span.insert(&flat)? {
            level_gain.1 = true;
            words.push(w.clone());
            rows.push(flat);
        }
        Ok(if span.is_full() { ControlFlow::Break(()) } else { ControlFlow::Continue(()) })
    })?;
    let rank = span.rank();
    if rank == 16 {
        let delta = det(&DenseMatrix::from_rows(rows)?)?;
        return Ok(BurnsideOutcome::Spanning(BurnsideWitness { words, delta }));
    }
    // A last level that added nothing, or an enumeration that ran out of new
    // elements before `max_len`, also closes the span.
    if closed || !level_gain.1 || level_gain.0 < max_len {
        return Ok(BurnsideOutcome::Closed { rank, words });
    }
    Ok(BurnsideOutcome::Exhausted { rank, words })
}

/// Greedy basis of the group algebra from short words; see [`burnside_search`].
pub fn burnside_witness(g1: &Word, g2: &Word, ctx: &ExactContext, max_len: usize) -> Result<BurnsideWitness> {
    match burnside_search(g1, g2, ctx, max_len)? {
        BurnsideOutcome::Spanning(w) => Ok(w),
        BurnsideOutcome::Closed { rank, .. } | BurnsideOutcome::Exhausted { rank, .. } => {
            Err(Error::BudgetExhausted { achieved: rank, max_len })
        }
    }
}

#[derive(Clone, Debug)]
pub struct NonpalindromicWitness {
    pub word: Word,
    pub shape: CharShape,
}

/// First word over `Q(v)` whose characteristic polynomial is not
/// palindromic, i.e. with `q ≢ 0`.
pub fn find_nonpalindromic_witness(g1: &Word, g2: &Word, max_len: usize) -> Result<NonpalindromicWitness> {
    let ctx = ExactContext::symbolic();
    let ev = ctx.evaluator()?;
    let mut found = None;
    enumerate_words(&ev, g1, g2, max_len, false, |_, w, m| {
        let chi = char_poly(m);
        if chi.is_palindromic() {
            return Ok(ControlFlow::Continue(()));
        }
        found = Some((w.clone(), shape_decompose(&chi)?));
        Ok(ControlFlow::Break(()))
    })?;
    match found {
        Some((word, shape)) => Ok(NonpalindromicWitness { word, shape }),
        None => Err(Error::NotFound(max_len)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceEntry {
    pub word: String,
    pub trace: String,
    pub imag: f64,
    pub is_real: bool,
}

/// Traces of the given words at a specialization. Exact contexts decide
/// reality exactly; numeric ones compare the imaginary part to `real_tol`.
pub fn trace_reality_scan(words: &[Word], spec: &ContextSpec, cfg: &Config) -> Result<Vec<TraceEntry>> {
    if spec.is_exact() {
        let ctx = ExactContext::from_spec(spec)?;
        if ctx.is_symbolic() {
            return Err(Error::InvalidInput("trace reality needs a specialized context".into()));
        }
        let ev = ctx.evaluator()?;
        words
            .iter()
            .map(|w| {
                let t = ev.evaluate(w).trace();
                let n = t.to_numeric()?;
                Ok(TraceEntry {
                    word: w.to_string(),
                    trace: n.format(30),
                    imag: n.im.hi(),
                    is_real: t.conj()? == t,
                })
            })
            .collect()
    } else {
        let ev = NumericContext::from_spec(spec)?.evaluator()?;
        Ok(words
            .iter()
            .map(|w| {
                let t = ev.evaluate(w).trace();
                TraceEntry {
                    word: w.to_string(),
                    trace: t.format(30),
                    imag: t.im.hi(),
                    is_real: t.im.hi().abs() <= cfg.real_tol,
                }
            })
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Certified,
    Failed,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// `|v| > 2`: density in `SL(4,ℝ)`.
    Sl4R,
    /// `|v| < 2`: density in `SU(3,1)`.
    Su31,
    /// `v = ±2` or a non-real `v`.
    Degenerate,
}

#[derive(Clone, Debug, Serialize)]
pub struct Irreducibility {
    pub witnesses: Vec<String>,
    pub delta_nonzero: bool,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessRecord {
    pub word: String,
    pub p: String,
    pub q: String,
    pub r: String,
    /// χ of the specialized witness is not palindromic (exact).
    pub nonpalindromic_at_v: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenRecord {
    pub moduli: [String; 4],
    pub l2l3: String,
    pub obstruction: bool,
    pub biproximal: Biproximality,
    pub l1l4_real: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FormDims {
    pub sym: usize,
    pub antisym: usize,
    pub herm: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityCertificate {
    pub pair: [String; 2],
    pub v: String,
    pub pipeline: Pipeline,
    pub irreducibility: Option<Irreducibility>,
    pub witness: Option<WitnessRecord>,
    pub eigen: Option<EigenRecord>,
    pub form_dims: Option<FormDims>,
    /// Signature of the invariant Hermitian form, when it is unique.
    pub hermitian_signature: Option<Signature>,
    /// A word with non-real trace (SU(3,1) pipeline).
    pub trace_witness: Option<TraceEntry>,
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub assumptions: Vec<String>,
    pub assumed_free: bool,
    pub config: Config,
}

impl DensityCertificate {
    fn new(g1: &Word, g2: &Word, spec: &ContextSpec, cfg: &Config) -> Self {
        DensityCertificate {
            pair: [g1.to_string(), g2.to_string()],
            v: match spec {
                ContextSpec::Symbolic => "symbolic".into(),
                ContextSpec::Rational(q) | ContextSpec::Numeric(q) => crate::rep::format_value(q),
                ContextSpec::ISqrt2 => "i*sqrt(2)".into(),
            },
            pipeline: Pipeline::Degenerate,
            irreducibility: None,
            witness: None,
            eigen: None,
            form_dims: None,
            hermitian_signature: None,
            trace_witness: None,
            verdict: Verdict::Inconclusive,
            reason: None,
            assumptions: vec!["free_pair".into(), "benoist_semisimplicity".into()],
            assumed_free: true,
            config: cfg.clone(),
        }
    }

    fn conclude(mut self, verdict: Verdict, reason: Option<String>) -> Self {
        self.verdict = verdict;
        self.reason = reason;
        self
    }
}

fn pipeline_for(spec: &ContextSpec) -> Pipeline {
    match spec.rational_value() {
        Some(q) => {
            let two = BigRational::from_integer(2.into());
            let a = q.abs();
            if a > two {
                Pipeline::Sl4R
            } else if a < two {
                Pipeline::Su31
            } else {
                Pipeline::Degenerate
            }
        }
        None => Pipeline::Degenerate,
    }
}

/// Runs the density pipeline for `⟨g1, g2⟩` at an exact specialization.
///
/// Checks run in order: commutation, Burnside spanning, a symbolic
/// non-palindromic witness confirmed at `v`, invariant forms, then the
/// eigenvalue obstruction (`|v| > 2`) or Hermitian signature and trace
/// reality (`|v| < 2`). The first decisive failure sets the verdict; any
/// component error makes the certificate INCONCLUSIVE.
pub fn certify_pair(g1: &Word, g2: &Word, spec: &ContextSpec, cfg: &Config) -> DensityCertificate {
    let cert = DensityCertificate::new(g1, g2, spec, cfg);
    match certify_inner(cert.clone(), g1, g2, spec, cfg) {
        Ok(c) => c,
        Err(e) => cert.conclude(Verdict::Inconclusive, Some(e.to_string())),
    }
}

fn certify_inner(
    mut cert: DensityCertificate,
    g1: &Word,
    g2: &Word,
    spec: &ContextSpec,
    cfg: &Config,
) -> Result<DensityCertificate> {
    cfg.validate()?;
    if !spec.is_exact() || *spec == ContextSpec::Symbolic {
        return Ok(cert.conclude(
            Verdict::Inconclusive,
            Some("certification needs an exact specialization of v".into()),
        ));
    }
    cert.pipeline = pipeline_for(spec);
    if cert.pipeline == Pipeline::Su31 {
        cert.assumptions.push("discrete_faithful_near_2".into());
    }
    let ctx = ExactContext::from_spec(spec)?;
    let ev = ctx.evaluator()?;
    let (m1, m2) = (ev.evaluate(g1), ev.evaluate(g2));
    if m1.mul(&m2) == m2.mul(&m1) {
        return Ok(cert.conclude(Verdict::Failed, Some("abelian: the images of the pair commute".into())));
    }

    let burnside = burnside_search(g1, g2, &ctx, cfg.burnside_max_len)?;
    match burnside {
        BurnsideOutcome::Spanning(w) => {
            cert.irreducibility = Some(Irreducibility {
                witnesses: w.words.iter().map(|x| x.to_string()).collect(),
                delta_nonzero: !w.delta.is_zero(),
                rank: 16,
            });
        }
        BurnsideOutcome::Closed { rank, words } => {
            cert.irreducibility = Some(Irreducibility {
                witnesses: words.iter().map(|x| x.to_string()).collect(),
                delta_nonzero: false,
                rank,
            });
            return Ok(cert.conclude(
                Verdict::Failed,
                Some(format!("reducible: the pair generates a {rank}-dimensional algebra")),
            ));
        }
        BurnsideOutcome::Exhausted { rank, words } => {
            cert.irreducibility = Some(Irreducibility {
                witnesses: words.iter().map(|x| x.to_string()).collect(),
                delta_nonzero: false,
                rank,
            });
            return Ok(cert.conclude(
                Verdict::Inconclusive,
                Some(format!("span reached rank {rank} within length {}", cfg.burnside_max_len)),
            ));
        }
    }

    let witness = match find_nonpalindromic_witness(g1, g2, cfg.witness_max_len) {
        Ok(w) => w,
        Err(Error::NotFound(n)) => {
            return Ok(cert.conclude(
                Verdict::Inconclusive,
                Some(format!("no non-palindromic word within length {n}")),
            ))
        }
        Err(e) => return Err(e),
    };
    let wm = ev.evaluate(&witness.word);
    let chi = char_poly(&wm);
    let nonpal = !chi.is_palindromic();
    check_specialization(&ctx, &witness.shape, &chi)?;
    cert.witness = Some(WitnessRecord {
        word: witness.word.to_string(),
        p: witness.shape.p.to_string(),
        q: witness.shape.q.to_string(),
        r: witness.shape.r.to_string(),
        nonpalindromic_at_v: nonpal,
    });
    if !nonpal {
        if cert.pipeline == Pipeline::Degenerate && spec.rational_value().is_some() {
            return Ok(cert.conclude(
                Verdict::Failed,
                Some("palindromic at v = ±2: every characteristic polynomial is palindromic".into()),
            ));
        }
        return Ok(cert.conclude(
            Verdict::Inconclusive,
            Some(format!("witness {} is palindromic at this v", witness.word)),
        ));
    }

    let gens = [m1.clone(), m2.clone()];
    let sym = invariant_forms(&gens, Symmetry::Symmetric)?;
    let anti = invariant_forms(&gens, Symmetry::Antisymmetric)?;
    let herm = invariant_hermitian_exact(&gens)?;
    cert.form_dims = Some(FormDims {
        sym: sym.dimension(),
        antisym: anti.dimension(),
        herm: herm.dimension(),
    });
    if herm.dimension() == 1 && cert.pipeline != Pipeline::Sl4R {
        cert.hermitian_signature = signature(&herm.basis[0]).ok();
    }
    if sym.dimension() > 0 || anti.dimension() > 0 {
        return Ok(cert.conclude(
            Verdict::Failed,
            Some(format!(
                "preserves a bilinear form (symmetric {}, antisymmetric {})",
                sym.dimension(),
                anti.dimension()
            )),
        ));
    }

    let report = eigen_report(&wm.to_numeric()?, cfg)?;
    let l1l4_real = report.l1l4.im.hi().abs() <= 1e-8 * (1.0 + report.l1l4.abs().hi());
    let obstruction = report.obstruction == Obstruction::Holds;
    cert.eigen = Some(EigenRecord {
        moduli: report.moduli_strings(30),
        l2l3: format_decimal(report.l2l3, 30),
        obstruction,
        biproximal: report.biproximal,
        l1l4_real,
    });

    match cert.pipeline {
        Pipeline::Sl4R => {
            if obstruction && l1l4_real {
                Ok(cert.conclude(Verdict::Certified, None))
            } else {
                Ok(cert.conclude(
                    Verdict::Inconclusive,
                    Some("power obstruction |λ₂λ₃| ≠ 1 not established for the witness".into()),
                ))
            }
        }
        Pipeline::Su31 => finish_su31(cert, g1, g2, spec, cfg, &witness.word),
        Pipeline::Degenerate => Ok(cert.conclude(
            Verdict::Inconclusive,
            Some("v is not a real parameter off ±2; no density pipeline applies".into()),
        )),
    }
}

fn finish_su31(
    cert: DensityCertificate,
    g1: &Word,
    g2: &Word,
    spec: &ContextSpec,
    cfg: &Config,
    witness: &Word,
) -> Result<DensityCertificate> {
    let dims = cert.form_dims.expect("forms computed");
    if dims.herm != 1 {
        return Ok(cert.conclude(
            Verdict::Inconclusive,
            Some(format!("expected one invariant Hermitian form, found {}", dims.herm)),
        ));
    }
    match cert.hermitian_signature {
        Some(s) if s.is_lorentzian_up_to_sign() => {}
        Some(s) => {
            return Ok(cert.conclude(
                Verdict::Inconclusive,
                Some(format!(
                    "invariant Hermitian form has signature ({}, {}, {}), not (3, 1)",
                    s.positives, s.negatives, s.zeros
                )),
            ))
        }
        None => {
            return Ok(cert.conclude(
                Verdict::Inconclusive,
                Some("signature of the Hermitian form undetermined".into()),
            ))
        }
    }
    let mut cert = cert;
    let mut candidates = vec![witness.clone()];
    let ctx = ExactContext::from_spec(spec)?;
    let ev = ctx.evaluator()?;
    enumerate_words(&ev, g1, g2, cfg.witness_max_len, false, |_, w, _| {
        candidates.push(w.clone());
        Ok(if candidates.len() > 256 { ControlFlow::Break(()) } else { ControlFlow::Continue(()) })
    })?;
    for w in candidates {
        let entry = trace_reality_scan(std::slice::from_ref(&w), spec, cfg)?.remove(0);
        if !entry.is_real {
            cert.trace_witness = Some(entry);
            return Ok(cert.conclude(Verdict::Certified, None));
        }
    }
    Ok(cert.conclude(
        Verdict::Inconclusive,
        Some("no word with non-real trace found".into()),
    ))
}

/// The symbolic `q` evaluated at `v` must match the one read off the
/// specialized χ, whenever `√(v²−4)` is nonzero there.
fn check_specialization(ctx: &ExactContext, shape: &CharShape, chi: &crate::charpoly::Poly4<TowerElem>) -> Result<()> {
    if ctx.s1().is_zero() {
        return Ok(());
    }
    let two_s1 = ctx.s1().add(ctx.s1());
    let q_special = chi.c[1].sub(&chi.c[3]).div(&two_s1)?;
    let q_symbolic = ctx.specialize_base(&shape.q)?;
    if q_special != q_symbolic {
        return Err(Error::StructureViolation(format!(
            "q at v is {q_special} from the specialized polynomial but {q_symbolic} from the symbolic shape"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ScanCounts {
    pub certified: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub certificates: Vec<DensityCertificate>,
    pub counts: ScanCounts,
}

/// Certificates for every `(pair, v)`, pair-major in input order, computed
/// on a pool of `workers` threads.
pub fn scan(vs: &[ContextSpec], pairs: &[(Word, Word)], cfg: &Config, workers: usize) -> Result<ScanReport> {
    use rayon::prelude::*;
    let cells: Vec<(&(Word, Word), &ContextSpec)> = pairs.iter().flat_map(|p| vs.iter().map(move |v| (p, v))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))?;
    let certificates: Vec<DensityCertificate> =
        pool.install(|| cells.par_iter().map(|((g1, g2), v)| certify_pair(g1, g2, v, cfg)).collect());
    let mut counts = ScanCounts::default();
    for c in &certificates {
        match c.verdict {
            Verdict::Certified => counts.certified += 1,
            Verdict::Failed => counts.failed += 1,
            Verdict::Inconclusive => counts.inconclusive += 1,
        }
    }
    Ok(ScanReport { certificates, counts })
}
