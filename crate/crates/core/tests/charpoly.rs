use proptest::prelude::*;

use strongdense::charpoly::{char_poly, eigen_report, faddeev_leverrier, shape_decompose, Biproximality, Obstruction};
use strongdense::config::Config;
use strongdense::matrix::Mat4;
use strongdense::rep::{symbolic_tower, ExactContext, Word};
use strongdense::scalars::{NumericValue, RatFunc};

fn exact(v: &str) -> ExactContext {
    ExactContext::from_spec(&v.parse().unwrap()).unwrap()
}

fn word(max: usize) -> impl Strategy<Value = Word> {
    proptest::string::string_regex(&format!("[abAB]{{1,{max}}}")).unwrap().prop_map(|s| Word::parse(&s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // Oracle: Faddeev-LeVerrier computes the same coefficients.
    #[test]
    fn char_poly_matches_faddeev_leverrier(w in word(8), v in prop::sample::select(vec!["v=3", "v=5/2", "v=7", "v=1", "v=i*sqrt(2)"])) {
        let m = exact(v).evaluator().unwrap().evaluate(&w);
        prop_assert_eq!(char_poly(&m).c, faddeev_leverrier(&m).unwrap().c);
    }

    #[test]
    fn shape_reconstructs_symbolic_char_poly(w in word(5)) {
        let m = ExactContext::symbolic().evaluator().unwrap().evaluate(&w);
        let chi = char_poly(&m);
        let shape = shape_decompose(&chi).unwrap();
        prop_assert_eq!(shape.reconstruct(&symbolic_tower()).c, chi.c);
        prop_assert!(shape.is_polynomial());
    }

    // q evaluated at v equals the q read off the specialized χ.
    #[test]
    fn specialization_consistency(w in word(5)) {
        let sym = char_poly(&ExactContext::symbolic().evaluator().unwrap().evaluate(&w));
        let shape = shape_decompose(&sym).unwrap();
        let ctx = exact("v=3");
        let chi = char_poly(&ctx.evaluator().unwrap().evaluate(&w));
        // q·2√(v²−4) = c₁ − c₃ and √5 = s1 at v = 3.
        let lhs = chi.c[1].sub(&chi.c[3]);
        let q3 = ctx.specialize_base(&shape.q).unwrap();
        prop_assert_eq!(lhs, ctx.s1().mul(&q3).scale(&RatFunc::from_int(2)));
    }

    // At v = 2 every image preserves a symmetric form, so χ is palindromic.
    #[test]
    fn palindromic_at_two(w in word(8)) {
        let m = exact("v=2").evaluator().unwrap().evaluate(&w);
        prop_assert!(char_poly(&m).is_palindromic());
    }

    // Cayley-Hamilton style check: each reported eigenvalue is a root.
    #[test]
    fn eigenvalues_are_roots(w in word(6)) {
        let ctx = exact("v=3");
        let chi = char_poly(&ctx.evaluator().unwrap().evaluate(&w)).to_numeric().unwrap();
        let m = ctx.evaluator().unwrap().evaluate(&w).to_numeric().unwrap();
        let rep = eigen_report(&m, &Config::default()).unwrap();
        for z in &rep.eigenvalues {
            let scale = (1.0 + z.abs().hi()).powi(4);
            prop_assert!(chi.eval(z).abs().hi() / scale < 1e-8);
        }
        // Oracle: nalgebra eigenvalue moduli.
        let mut oracle: Vec<f64> = m.to_c64().map(|z| z.re).complex_eigenvalues().iter().map(|z| z.norm()).collect();
        oracle.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in rep.moduli.iter().zip(&oracle) {
            prop_assert!((a.hi() - b).abs() <= 1e-5 * b.max(1.0));
        }
    }
}

#[test]
fn diagonal_report() {
    let d = |x: f64| NumericValue::from_f64(x);
    let z = NumericValue::zero();
    let m = Mat4::from_rows([[d(4.0), z, z, z], [z, d(0.5), z, z], [z, z, d(1.0), z], [z, z, z, d(0.5)]]);
    let rep = eigen_report(&m, &Config::default()).unwrap();
    let mods: Vec<f64> = rep.moduli.iter().map(|x| x.hi()).collect();
    assert_eq!(mods, vec![4.0, 1.0, 0.5, 0.5]);
    assert_eq!(rep.biproximal, Biproximality::NotBiproximal);
    assert_eq!(rep.obstruction, Obstruction::Holds);
}

#[test]
fn commutator_witness_shape() {
    let m = ExactContext::symbolic().evaluator().unwrap().evaluate(&Word::parse("abAB").unwrap());
    let shape = shape_decompose(&char_poly(&m)).unwrap();
    assert_eq!(shape.q.to_string(), "1/2*v^3 + v");
    assert_eq!(shape.p.to_string(), "1/2*v^4 - 1");
    assert_eq!(shape.r.to_string(), "-4*v^2 + 1");
}

#[test]
fn generators_are_palindromic_symbolically() {
    let ev = ExactContext::symbolic().evaluator().unwrap();
    for w in ["a", "b", "ab"] {
        let shape = shape_decompose(&char_poly(&ev.evaluate(&Word::parse(w).unwrap()))).unwrap();
        assert!(shape.q.is_zero(), "{w}");
    }
}
