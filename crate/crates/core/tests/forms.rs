use proptest::prelude::*;

use strongdense::config::Config;
use strongdense::forms::{
    conj_transpose, hermitian_residual, invariant_forms, invariant_hermitian, invariant_hermitian_exact, signature,
    signature_numeric, Signature, Symmetry,
};
use strongdense::matrix::Mat4;
use strongdense::rep::{ExactContext, NumericContext, Word};
use strongdense::scalars::Tower;

fn exact(v: &str) -> ExactContext {
    ExactContext::from_spec(&v.parse().unwrap()).unwrap()
}

fn gens(ctx: &ExactContext, words: &[&str]) -> Vec<Mat4<strongdense::scalars::TowerElem>> {
    let ev = ctx.evaluator().unwrap();
    words.iter().map(|w| ev.evaluate(&Word::parse(w).unwrap())).collect()
}

fn sig(p: usize, n: usize, z: usize) -> Signature {
    Signature { positives: p, negatives: n, zeros: z }
}

#[test]
fn basis_forms_are_exactly_invariant() {
    for (v, words) in [("v=2", ["u", "c"]), ("v=3", ["u", "c"]), ("v=1", ["u", "c"])] {
        let c = exact(v);
        let g = gens(&c, &words);
        for sym in [Symmetry::Symmetric, Symmetry::Antisymmetric] {
            let space = invariant_forms(&g, sym).unwrap();
            for j in &space.basis {
                assert_eq!(j.transpose(), if sym == Symmetry::Symmetric { j.clone() } else { j.neg() });
                for m in &g {
                    assert_eq!(m.transpose().mul(j).mul(m), *j, "{v} {sym:?}");
                }
            }
        }
        let herm = invariant_hermitian_exact(&g).unwrap();
        for j in &herm.basis {
            assert_eq!(conj_transpose(j).unwrap(), *j);
            for m in &g {
                assert_eq!(conj_transpose(m).unwrap().mul(j).mul(m), *j, "{v} hermitian");
            }
        }
    }
}

// Over a real tower a Hermitian form splits into a symmetric and an
// antisymmetric one, so the dimensions add up.
#[test]
fn hermitian_dimension_over_real_towers() {
    for v in ["v=2", "v=3", "v=5/2"] {
        let c = exact(v);
        let g = gens(&c, &["u", "c"]);
        let s = invariant_forms(&g, Symmetry::Symmetric).unwrap().dimension();
        let a = invariant_forms(&g, Symmetry::Antisymmetric).unwrap().dimension();
        let h = invariant_hermitian_exact(&g).unwrap().dimension();
        assert_eq!(h, s + a, "{v}");
    }
}

#[test]
fn v2_form_is_lorentzian() {
    let c = exact("v=2");
    let space = invariant_forms(&gens(&c, &["u", "c"]), Symmetry::Symmetric).unwrap();
    assert_eq!(space.dimension(), 1);
    assert!(signature(&space.basis[0]).unwrap().is_lorentzian_up_to_sign());
}

// The exact and numeric Hermitian solvers agree on dimension and signature
// inside (−2, 2).
#[test]
fn exact_and_numeric_hermitian_agree() {
    let cfg = Config::default();
    for (v, expected) in [("3/2", sig(1, 3, 0)), ("1/2", sig(4, 0, 0)), ("0", sig(4, 0, 0)), ("1", sig(1, 0, 3))] {
        let c = exact(&format!("v={v}"));
        let e = invariant_hermitian_exact(&gens(&c, &["u", "c"])).unwrap();
        let vq = c.spec().rational_value().unwrap().clone();
        let nctx = NumericContext::at_rational(&vq).unwrap();
        let ev = nctx.evaluator().unwrap();
        let ng = [ev.u().clone(), ev.c().clone()];
        let n = invariant_hermitian(&ng, &cfg).unwrap();
        assert_eq!(e.dimension(), 1, "{v}");
        assert_eq!(n.dimension(), 1, "{v}");
        let es = signature(&e.basis[0]).unwrap();
        let ns = signature_numeric(&n.basis[0], 1e-9);
        let flip = |s: Signature| sig(s.negatives, s.positives, s.zeros);
        assert!(es == expected || es == flip(expected), "{v}: exact {es:?}");
        assert!(ns == es || ns == flip(es), "{v}: numeric {ns:?} vs exact {es:?}");
        let jc = n.basis[0].to_c64();
        for g in &ng {
            assert!(hermitian_residual(&g.to_c64(), &jc) < 1e-10);
        }
    }
}

#[test]
fn symbolic_surface_group_has_no_forms() {
    let c = ExactContext::symbolic();
    let g = gens(&c, &["a", "b"]);
    assert_eq!(invariant_forms(&g, Symmetry::Symmetric).unwrap().dimension(), 0);
    assert_eq!(invariant_forms(&g, Symmetry::Antisymmetric).unwrap().dimension(), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Oracle: Sylvester's law of inertia. PᵀDP has the inertia of D.
    #[test]
    fn signature_is_a_congruence_invariant(
        d in prop::collection::vec(-3i64..=3, 4),
        p in prop::collection::vec(-4i64..=4, 16),
    ) {
        let t = Tower::rationals();
        let pm = Mat4::from_fn(|i, j| t.from_int(p[4 * i + j]));
        prop_assume!(!pm.det().is_zero());
        let dm = Mat4::from_fn(|i, j| if i == j { t.from_int(d[i]) } else { t.zero() });
        let s = signature(&pm.transpose().mul(&dm).mul(&pm)).unwrap();
        let expected = sig(
            d.iter().filter(|x| **x > 0).count(),
            d.iter().filter(|x| **x < 0).count(),
            d.iter().filter(|x| **x == 0).count(),
        );
        prop_assert_eq!(s, expected);
    }
}
