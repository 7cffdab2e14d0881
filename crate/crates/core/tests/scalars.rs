use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use strongdense::rep::symbolic_tower;
use strongdense::scalars::numeric::{dd_div, parse_rational, rational_to_twofloat};
use strongdense::scalars::{BaseField, ExactSpecialization, RatFunc, Tower, TowerElem};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (prop::collection::vec((-6i64..=6, 1i64..=4), 1..4), -3i64..=3, any::<bool>()).prop_map(|(cs, root, has_den)| {
        let v = RatFunc::var();
        let mut num = RatFunc::zero();
        for (k, (n, d)) in cs.into_iter().enumerate() {
            num = num.add(&RatFunc::from_frac(n, d).mul(&v.pow(k as u32)));
        }
        if has_den {
            num.div(&v.sub(&RatFunc::from_int(root))).unwrap()
        } else {
            num
        }
    })
}

fn real_tower() -> Arc<Tower> {
    Tower::new(BaseField::Rationals, vec![RatFunc::from_int(2), RatFunc::from_int(3), RatFunc::from_int(5)]).unwrap()
}

fn isqrt2_tower() -> Arc<Tower> {
    Tower::new(BaseField::Rationals, vec![RatFunc::from_int(-2), RatFunc::from_int(-6), RatFunc::from_int(6)]).unwrap()
}

fn elem(t: Arc<Tower>) -> impl Strategy<Value = TowerElem> {
    prop::collection::vec((-9i64..=9, 1i64..=5), t.size())
        .prop_map(move |cs| t.from_coeffs(cs.into_iter().map(|(n, d)| RatFunc::from_frac(n, d)).collect()).unwrap())
}

fn symbolic_elem() -> impl Strategy<Value = TowerElem> {
    let t = symbolic_tower();
    prop::collection::vec(ratfunc(), t.size()).prop_map(move |cs| t.from_coeffs(cs).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Oracle: evaluation at a rational point is a ring homomorphism.
    #[test]
    fn ratfunc_ops_commute_with_evaluation(f in ratfunc(), g in ratfunc(), x in (-20i64..=20, 1i64..=7)) {
        let x = q(x.0 * 7 + 1, x.1 * 11);
        if let (Ok(fx), Ok(gx)) = (f.eval_rational(&x), g.eval_rational(&x)) {
            prop_assert_eq!(f.add(&g).eval_rational(&x).unwrap(), &fx + &gx);
            prop_assert_eq!(f.mul(&g).eval_rational(&x).unwrap(), &fx * &gx);
            if !g.is_zero() && gx != q(0, 1) {
                prop_assert_eq!(f.div(&g).unwrap().eval_rational(&x).unwrap(), &fx / &gx);
            }
        }
    }

    #[test]
    fn ratfunc_canonical_form_is_unique(f in ratfunc(), g in ratfunc()) {
        // (f·g)/g reduces back to f syntactically.
        prop_assume!(!g.is_zero());
        prop_assert_eq!(f.mul(&g).div(&g).unwrap(), f);
    }

    #[test]
    fn galois_maps_are_ring_automorphisms(x in elem(isqrt2_tower()), y in elem(isqrt2_tower()), mask in 0usize..8) {
        prop_assert_eq!(x.mul(&y).galois(mask), x.galois(mask).mul(&y.galois(mask)));
        prop_assert_eq!(x.add(&y).galois(mask), x.galois(mask).add(&y.galois(mask)));
        prop_assert_eq!(x.galois(mask).galois(mask), x);
    }

    #[test]
    fn norm_is_product_of_conjugates(x in elem(real_tower())) {
        let mut p = x.tower().one();
        for mask in 0..8 {
            p = p.mul(&x.galois(mask));
        }
        prop_assert_eq!(p, x.tower().from_base(x.norm()));
    }

    // Oracle: the double-double value.
    #[test]
    fn exact_sign_matches_numeric_value(x in elem(real_tower())) {
        let s = x.sign().unwrap();
        let val = x.to_numeric().unwrap().re.hi();
        match s {
            Ordering::Greater => prop_assert!(val > 0.0),
            Ordering::Less => prop_assert!(val < 0.0),
            Ordering::Equal => prop_assert!(x.is_zero()),
        }
    }

    #[test]
    fn conjugation_is_complex_conjugation(x in elem(isqrt2_tower())) {
        let a = x.to_numeric().unwrap().to_c64();
        let b = x.conj().unwrap().to_numeric().unwrap().to_c64();
        prop_assert!((a.conj() - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn inverse_in_symbolic_tower(x in symbolic_elem()) {
        prop_assume!(!x.is_zero());
        prop_assert!(x.mul(&x.inv().unwrap()).is_one());
    }

    #[test]
    fn specialization_is_a_ring_homomorphism(x in symbolic_elem(), y in symbolic_elem(), v in prop::sample::select(vec![(3i64, 1i64), (5, 2), (7, 3), (1, 1), (-4, 1)])) {
        let s = ExactSpecialization::at_rational(&symbolic_tower(), &q(v.0, v.1)).unwrap();
        if let (Ok(sx), Ok(sy)) = (s.apply(&x), s.apply(&y)) {
            prop_assert_eq!(s.apply(&x.mul(&y)).unwrap(), sx.mul(&sy));
            prop_assert_eq!(s.apply(&x.add(&y)).unwrap(), sx.add(&sy));
        }
    }

    #[test]
    fn double_double_division_round_trips(n in -1_000_000i64..1_000_000, d in 1i64..1_000_000) {
        let a = rational_to_twofloat(&q(n, 1));
        let b = rational_to_twofloat(&q(d, 1));
        let back = dd_div(a, b) * b;
        prop_assert!((back - a).abs().hi() <= 1e-28 * (1.0 + a.hi().abs()));
    }
}

#[test]
fn decimals_parse_exactly() {
    assert_eq!(parse_rational("0.1").unwrap(), q(1, 10));
    assert_eq!(parse_rational("-2.50").unwrap(), q(-5, 2));
    assert_eq!(parse_rational("7/3").unwrap(), q(7, 3));
    assert!(parse_rational("abc").is_err());
}

#[test]
fn dependent_discriminants_collapse() {
    // √12 = 2√3 once √3 is present, so the tower is Q[√3] at v = 4 where
    // v² − 4 = 12 and v² + 8 = 24 = 2·12.
    let s = ExactSpecialization::at_rational(&symbolic_tower(), &q(4, 1)).unwrap();
    assert!(s.target().depth() <= 2);
    let s1 = &s.roots()[0];
    assert_eq!(s1.mul(s1), s.target().from_int(12));
}
