use mahler_core::expr::{parse, print};
use mahler_core::poly::{
    reciprocal_conjugate, substitute_rational, GaussianRational, LaurentPoly, RationalFn, UnitComplex,
};
use mahler_core::roots::jensen_measure_1d;
use mahler_core::transform::reciprocal_pair;
use num_complex::Complex64;
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

fn coeff() -> impl Strategy<Value = GaussianRational> {
    (-5i64..=5, -3i64..=3, 1i64..=3).prop_map(|(re, im, den)| GaussianRational::from_parts((re, den), (im, 1)))
}

fn laurent(max_terms: usize, lo: i64, hi: i64) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::collection::vec(lo..=hi, 3), coeff()), 0..max_terms)
        .prop_map(|terms| LaurentPoly::from_terms(VARS.iter().map(|s| s.to_string()).collect(), terms))
}

fn univariate(max_degree: usize) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(-4i64..=4, 1..=max_degree + 1).prop_filter_map("zero", |c| {
        let coeffs: Vec<GaussianRational> = c.into_iter().map(GaussianRational::from_integer).collect();
        let p = LaurentPoly::univariate("x", &coeffs);
        (!p.is_zero()).then_some(p)
    })
}

fn point() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.0..std::f64::consts::TAU, 0.5f64..1.5), 3)
        .prop_map(|v| v.into_iter().map(|(a, r)| Complex64::from_polar(r, a)).collect())
}

/// Divides out the largest monomial factor.
fn strip_monomial(p: &LaurentPoly) -> LaurentPoly {
    let shift: Vec<i64> = p.variables().iter().map(|v| -p.min_degree_in(v)).collect();
    p.shift(&shift)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_parse_round_trip(p in laurent(6, -3, 3), q in laurent(3, 0, 2)) {
        let r = RationalFn::from_poly(p.clone());
        let back = parse(&print(&r)).unwrap();
        prop_assert_eq!(back.numerator(), r.numerator());
        if !q.is_zero() {
            let f = RationalFn::new(p, q).unwrap();
            let back = parse(&print(&f)).unwrap();
            prop_assert_eq!(back.numerator().mul(f.denominator()), f.numerator().mul(back.denominator()));
        }
    }

    #[test]
    fn ring_axioms(a in laurent(5, -2, 2), b in laurent(5, -2, 2), c in laurent(5, -2, 2)) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&LaurentPoly::one()), a.clone());
    }

    #[test]
    fn conjugation_is_an_involution(a in laurent(6, -3, 3)) {
        prop_assert_eq!(a.conjugate_coeffs().conjugate_coeffs(), a.clone());
        let (_, star) = reciprocal_pair(&a);
        if !a.is_zero() {
            // Twice gives back `a` up to a monomial.
            let (_, back) = reciprocal_pair(&star);
            prop_assert_eq!(strip_monomial(&back), strip_monomial(&a));
        }
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in laurent(5, -2, 2), b in laurent(5, -2, 2), pt in point()) {
        let (ea, eb) = (a.eval_complex(&pt), b.eval_complex(&pt));
        prop_assert!(close(a.mul(&b).eval_complex(&pt), ea * eb, 1e-9));
        prop_assert!(close(a.add(&b).eval_complex(&pt), ea + eb, 1e-9));
    }

    #[test]
    fn substitution_commutes_with_evaluation(p in laurent(5, 0, 3), k in 2i64..=4, pt in point(), re in 2i64..=4) {
        prop_assume!(p.occurs("x"));
        let g = LaurentPoly::var("x").add(&LaurentPoly::constant(GaussianRational::from_integer(re)));
        let f = reciprocal_conjugate(&g, "x", k, &UnitComplex::pythagorean(1, 2)).unwrap();
        let r = RationalFn::from_poly(p.clone()).embed(&VARS.iter().map(|s| s.to_string()).collect::<Vec<_>>());
        let sub = substitute_rational(&r, "x", &f, &g).unwrap();
        let x = pt[0];
        let fx = f.eval_complex(&[x]);
        let gx = g.eval_complex(&[x]);
        let direct = p.eval_complex(&[fx / gx, pt[1], pt[2]]);
        let via = sub.embed(&VARS.iter().map(|s| s.to_string()).collect::<Vec<_>>()).eval_complex(&pt).unwrap();
        prop_assert!(close(direct, via, 1e-8), "{direct} vs {via}");
    }

    #[test]
    fn univariate_measure_is_additive(a in univariate(6), b in univariate(6)) {
        let ma = jensen_measure_1d(&a).unwrap();
        let mb = jensen_measure_1d(&b).unwrap();
        let mab = jensen_measure_1d(&a.mul(&b)).unwrap();
        prop_assert!((mab - ma - mb).abs() < 1e-8, "{mab} vs {ma} + {mb}");
    }

    #[test]
    fn measure_ignores_reciprocal_and_power_maps(a in univariate(6), k in 1u32..=3) {
        let m = jensen_measure_1d(&a).unwrap();
        let (_, star) = reciprocal_pair(&a);
        prop_assert!((jensen_measure_1d(&star).unwrap() - m).abs() < 1e-8);
        let xk = LaurentPoly::var("x").pow(k);
        let composed = RationalFn::from_poly(a.clone());
        let composed = substitute_rational(&composed, "x", &xk, &LaurentPoly::one()).unwrap();
        prop_assert!((jensen_measure_1d(composed.numerator()).unwrap() - m).abs() < 1e-8);
    }
}
