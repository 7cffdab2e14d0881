use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use strongdense::bridge::*;
use strongdense::config::Config;
use strongdense::forms::{invariant_forms, Symmetry};
use strongdense::matrix::Mat4;
use strongdense::rep::{ExactContext, Word};
use strongdense::scalars::{BaseField, NumericValue, RatFunc, Tower, TowerElem};

fn c(re: f64, im: f64) -> NumericValue {
    NumericValue::from_c64(Complex64::new(re, im))
}

fn max_diff(a: &Mat4<NumericValue>, b: &Mat4<NumericValue>) -> f64 {
    (a.to_c64() - b.to_c64()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn tau_is_a_homomorphism_into_so31() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let a = Sl2::random(&mut rng);
        let b = Sl2::random(&mut rng);
        let (ta, tb) = (tau(&a).unwrap(), tau(&b).unwrap());
        let tab = tau(&a.mul(&b)).unwrap();
        assert!(max_diff(&tab, &ta.mul(&tb)) < 1e-9);
        assert!(minkowski_check_numeric(&ta) < 1e-9);
        assert!(max_diff(&tau(&a.neg()).unwrap(), &ta) < 1e-25);
        // Time orientation: the (t, t) entry is at least 1.
        assert!(ta.to_c64()[(0, 0)].re >= 1.0 - 1e-9);
    }
}

fn gaussian() -> std::sync::Arc<Tower> {
    Tower::new(BaseField::Rationals, vec![RatFunc::from_int(-1)]).unwrap()
}

fn g(t: &std::sync::Arc<Tower>, re: (i64, i64), im: (i64, i64)) -> TowerElem {
    t.from_base(RatFunc::from_frac(re.0, re.1))
        .add(&t.generator(0).scale(&RatFunc::from_frac(im.0, im.1)))
}

#[test]
fn tau_exact_on_gaussian_rationals() {
    let t = gaussian();
    // det = (1+i)(1/2 - i/2)... chosen so that ad - bc = 1.
    let a = Sl2::exact([[g(&t, (1, 1), (1, 1)), g(&t, (2, 1), (0, 1))], [g(&t, (0, 1), (0, 1)), g(&t, (1, 2), (-1, 2))]]).unwrap();
    let b = Sl2::exact([[g(&t, (1, 1), (0, 1)), g(&t, (0, 1), (0, 1))], [g(&t, (3, 1), (-2, 1)), g(&t, (1, 1), (0, 1))]]).unwrap();
    let (ta, tb) = (tau(&a).unwrap(), tau(&b).unwrap());
    assert_eq!(tau(&a.mul(&b)).unwrap(), ta.mul(&tb));
    assert_eq!(tau(&a.neg()).unwrap(), ta);
    // Entries are real.
    for x in ta.entries() {
        assert_eq!(x.conj().unwrap(), *x);
    }
    assert!(minkowski_check_numeric(&ta.to_numeric().unwrap()) < 1e-25);
}

#[test]
fn tau_of_diagonal_has_squared_spectrum() {
    let s = 1.7;
    let a = Sl2([[c(s, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0 / s, 0.0)]]);
    let m = tau(&a).unwrap().to_c64().map(|z| z.re);
    // Independent oracle: nalgebra's real eigen decomposition of the symmetric result.
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(f64::total_cmp);
    let mut expected = [s.powi(-2), 1.0, 1.0, s * s];
    expected.sort_by(f64::total_cmp);
    for (x, y) in ev.iter().zip(expected) {
        assert!((x - y).abs() < 1e-12, "{ev:?}");
    }
}

#[test]
fn minkowski_residuals() {
    assert_eq!(minkowski_check(&Matrix4::identity()), 0.0);
    let d = Matrix4::from_diagonal(&nalgebra::Vector4::new(2.0, 1.0, 1.0, 1.0));
    assert!(minkowski_check(&d) > 1.0);
}

#[test]
fn isometry_classes() {
    let cfg = Config::default();
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let id = tau(&Sl2([[one, zero], [zero, one]])).unwrap();
    assert_eq!(classify_isometry(&id, &PreservedForm::Minkowski, &cfg).unwrap(), IsometryClass::Elliptic);
    let para = tau(&Sl2([[one, one], [zero, one]])).unwrap();
    assert_eq!(classify_isometry(&para, &PreservedForm::Minkowski, &cfg).unwrap(), IsometryClass::Parabolic);
    let rot = tau(&Sl2([[c(0.6, 0.8), zero], [zero, c(0.6, -0.8)]])).unwrap();
    assert_eq!(classify_isometry(&rot, &PreservedForm::Minkowski, &cfg).unwrap(), IsometryClass::Elliptic);
    let hyp = tau(&Sl2([[c(2.0, 0.0), zero], [zero, c(0.5, 0.0)]])).unwrap();
    assert_eq!(classify_isometry(&hyp, &PreservedForm::Minkowski, &cfg).unwrap(), IsometryClass::Hyperbolic);
    let scaled = Mat4::from_fn(|i, j| if i == j { c(if i == 0 { 2.0 } else { 1.0 }, 0.0) } else { zero });
    assert!(matches!(
        classify_isometry(&scaled, &PreservedForm::Minkowski, &cfg),
        Err(strongdense::Error::NotAnIsometry(_))
    ));
}

#[test]
fn holonomy_elements() {
    let cfg = Config::default();
    let ctx = ExactContext::from_spec(&"v=2".parse().unwrap()).unwrap();
    let ev = ctx.evaluator().unwrap();
    let forms = invariant_forms(&[ev.u().clone(), ev.c().clone()], Symmetry::Symmetric).unwrap();
    let j = forms.basis[0].to_numeric().unwrap().to_c64().map(|z| z.re);
    let a = ev.evaluate(&Word::parse("a").unwrap()).to_numeric().unwrap();
    assert_eq!(classify_isometry(&a, &PreservedForm::Bilinear(j), &cfg).unwrap(), IsometryClass::Hyperbolic);

    let n3 = ExactContext::from_spec(&"v=3".parse().unwrap()).unwrap().to_numeric().unwrap();
    let u = n3.evaluator().unwrap().u().clone();
    assert_eq!(classify_isometry(&u, &PreservedForm::Unchecked, &cfg).unwrap(), IsometryClass::Elliptic);
}

#[test]
fn isqrt2_reduction_matches_displayed_blocks() {
    let r = reduce_at_isqrt2().unwrap();
    assert!(r.u.get(0, 0).is_one());
    // (−6 − 2i√3)/8.
    let z = r.c.get(0, 1).to_numeric().unwrap().to_c64();
    assert!((z - Complex64::new(-0.75, -(3f64).sqrt() / 4.0)).norm() < 1e-15);
    for m in [&r.u, &r.c] {
        for i in 0..2 {
            for j in 2..4 {
                assert!(m.get(i, j).is_zero());
            }
        }
    }
    let lr = &r.c_blocks.1;
    assert!(lr.0[0][0].add(&lr.0[1][1]).is_zero());
    assert_eq!(r.sign_character, (-1, 1));
    assert_eq!(r.generator_block_dets[1], ("-1".to_string(), "-1".to_string()));
}
