use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use strongdense::rep::{verify_relations, ContextSpec, ExactContext, NumericContext, RelationVerdict, Word};

fn word() -> impl Strategy<Value = Word> {
    "[abABuUcC]{0,7}".prop_map(|s| Word::parse(&s).unwrap())
}

fn exact(v: &str) -> ExactContext {
    ExactContext::from_spec(&v.parse().unwrap()).unwrap()
}

#[test]
fn relations_hold_symbolically_and_at_specializations() {
    for spec in ["symbolic", "v=3", "v=2", "v=1", "v=5/2", "v=-7/3", "v=i*sqrt(2)"] {
        let report = verify_relations(&exact(spec)).unwrap();
        assert_eq!(report.relations.len(), 3, "{spec}");
        assert!(
            report.relations.iter().all(|r| r.verdict == RelationVerdict::Identity),
            "{spec}: {:?}",
            report.relations
        );
    }
}

#[test]
fn context_specs_parse() {
    assert_eq!("symbolic".parse::<ContextSpec>().unwrap(), ContextSpec::Symbolic);
    assert_eq!(ContextSpec::from_value("i*sqrt(2)").unwrap(), ContextSpec::ISqrt2);
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    assert_eq!(ContextSpec::from_value("0.5").unwrap(), ContextSpec::Rational(half));
    assert!(ContextSpec::from_value("x").is_err());
}

#[test]
fn words_parse_and_invert() {
    let w = Word::parse("abAB").unwrap();
    assert_eq!(w.inverse().to_string(), "baBA");
    assert!(Word::parse("abz").is_err());
    assert_eq!(Word::parse("aA").unwrap().expand_free().len(), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evaluation_is_a_homomorphism(x in word(), y in word()) {
        let ev = exact("v=3").evaluator().unwrap();
        prop_assert_eq!(ev.evaluate(&x.concat(&y)), ev.evaluate(&x).mul(&ev.evaluate(&y)));
        prop_assert!(ev.evaluate(&x).mul(&ev.evaluate(&x.inverse())).is_identity());
    }

    #[test]
    fn images_have_determinant_one(x in word()) {
        let ev = exact("v=5/2").evaluator().unwrap();
        prop_assert!(ev.evaluate(&x).det().is_one());
    }

    // Oracle: the double-double evaluator agrees with the exact one.
    #[test]
    fn numeric_and_exact_evaluation_agree(x in "[abAB]{0,5}") {
        let w = Word::parse(&x).unwrap();
        let v = BigRational::new(BigInt::from(7), BigInt::from(2));
        let e = ExactContext::at_rational(&v).unwrap().evaluator().unwrap().evaluate(&w).to_numeric().unwrap().to_c64();
        let n = NumericContext::at_rational(&v).unwrap().evaluator().unwrap().evaluate(&w).to_c64();
        let scale = e.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!((e - n).iter().map(|z| z.norm()).fold(0.0, f64::max) <= 1e-20 * scale);
    }

    #[test]
    fn specializing_the_symbolic_image_matches_direct_evaluation(x in "[abAB]{0,4}") {
        let w = Word::parse(&x).unwrap();
        let sym = ExactContext::symbolic().evaluator().unwrap().evaluate(&w);
        let ctx = exact("v=3");
        prop_assert_eq!(ctx.specialize_matrix(&sym).unwrap(), ctx.evaluator().unwrap().evaluate(&w));
    }
}
