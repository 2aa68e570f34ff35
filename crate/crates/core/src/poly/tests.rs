use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use super::scalar::rat;
use super::*;

fn small_poly(nvars: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly> {
    let term = (prop::array::uniform3(0..=max_deg), -9i64..=9, 1i64..=4);
    prop::collection::vec(term, 0..=max_terms).prop_map(move |ts| {
        MultiPoly::from_terms(
            nvars,
            ts.into_iter().map(|(mut e, n, d)| {
                for x in e.iter_mut().skip(nvars) {
                    *x = 0;
                }
                (e, rat(n, d))
            }),
        )
    })
}

fn nonconstant(nvars: usize, max_deg: u32) -> impl Strategy<Value = MultiPoly> {
    small_poly(nvars, max_deg, 4).prop_filter("nonconstant", |p| !p.is_constant())
}

fn point(nvars: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-20i64..=20, 1i64..=5).prop_map(|(n, d)| rat(n, d)), nvars)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(a in small_poly(2, 3, 5), b in small_poly(2, 3, 5), c in small_poly(2, 3, 5)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in small_poly(3, 3, 5), b in small_poly(3, 3, 5), pt in point(3)) {
        let ea = a.evaluate(&pt).unwrap();
        let eb = b.evaluate(&pt).unwrap();
        prop_assert_eq!((&a * &b).evaluate(&pt).unwrap(), &ea * &eb);
        prop_assert_eq!((&a + &b).evaluate(&pt).unwrap(), ea + eb);
    }

    #[test]
    fn canonical_text_round_trips(a in small_poly(3, 4, 6)) {
        prop_assert_eq!(MultiPoly::parse(&a.to_canonical(), 3).unwrap(), a);
    }

    #[test]
    fn exact_division_inverts_multiplication(a in small_poly(2, 3, 4), b in nonconstant(2, 3)) {
        prop_assert_eq!((&a * &b).divide_exact(&b).unwrap(), a);
    }

    #[test]
    fn gcd_divides_and_recovers_common_factor(
        g in nonconstant(2, 2), u in small_poly(2, 2, 3), v in small_poly(2, 2, 3)
    ) {
        let a = &g * &u;
        let b = &g * &v;
        let h = gcd(&a, &b).unwrap();
        if !a.is_zero() {
            prop_assert!(h.divides(&a));
        }
        if !b.is_zero() {
            prop_assert!(h.divides(&b));
        }
        prop_assert!(g.primitive().divides(&h));
        prop_assert_eq!(h.clone(), gcd(&b, &a).unwrap());
    }

    #[test]
    fn gcd_routes_agree(g in small_poly(3, 2, 3), u in nonconstant(3, 2), v in nonconstant(3, 2)) {
        let a = &g * &u;
        let b = &g * &v;
        prop_assert_eq!(gcd(&a, &b).unwrap(), gcd_subresultant(&a, &b).unwrap());
    }

    #[test]
    fn resultant_vanishes_on_common_root(
        r in (-6i64..=6, 1i64..=3), u in nonconstant(1, 3), v in nonconstant(1, 3)
    ) {
        let lin = MultiPoly::parse(&format!("{}*x - {}", r.1, r.0), 1).unwrap();
        prop_assert!(resultant(&(&lin * &u), &(&lin * &v), 0).unwrap().is_zero());
    }

    #[test]
    fn resultant_is_product_over_roots(rs in prop::collection::vec(-5i64..=5, 1..4), ss in prop::collection::vec(-5i64..=5, 1..4)) {
        let prod = |v: &[i64]| v.iter().fold(MultiPoly::one(1), |acc, &r| &acc * &MultiPoly::parse(&format!("x - {r}"), 1).unwrap());
        let expect: i64 = rs.iter().flat_map(|&r| ss.iter().map(move |&s| r - s)).product();
        let got = resultant(&prod(&rs), &prod(&ss), 0).unwrap();
        prop_assert_eq!(got.constant_value().unwrap_or_else(|| rat(0, 1)), BigRational::from_integer(BigInt::from(expect)));
    }
}

#[test]
fn homogenize_and_dehomogenize() {
    let f = MultiPoly::parse("x^2 + 3*y - 1", 2).unwrap();
    let h = f.homogenize();
    assert_eq!(h, MultiPoly::parse("x1^2 + 3*x0*x2 - x0^2", 3).unwrap());
    assert!(h.is_homogeneous());
    assert_eq!(h.dehomogenize(), f);
    assert_eq!(f.homogenize_to(3).unwrap(), &h * &MultiPoly::var(3, 0));
    assert!(f.homogenize_to(1).is_err());
}

#[test]
fn substitution_composes() {
    let f = MultiPoly::parse("x0*x1 + x2^2", 3).unwrap();
    let subs = [
        MultiPoly::parse("x0 + x1", 3).unwrap(),
        MultiPoly::parse("x1", 3).unwrap(),
        MultiPoly::parse("x0 - x2", 3).unwrap(),
    ];
    let got = f.substitute(&subs).unwrap();
    let want = MultiPoly::parse("(x0 + x1)*x1 + (x0 - x2)^2", 3).unwrap();
    assert_eq!(got, want);
}

#[test]
fn degree_queries() {
    let f = MultiPoly::parse("x0^3*x2 + x1^2 - 5", 3).unwrap();
    assert_eq!(f.degree(), Some(4));
    assert_eq!(f.degree_in(1), Some(2));
    assert_eq!(f.min_degree_in(2), Some(0));
    assert_eq!(MultiPoly::zero(3).degree(), None);
    assert!(!f.is_homogeneous());
    assert_eq!(f.leading_term().unwrap().0, &[3, 0, 1]);
}

#[test]
fn inexact_division_is_rejected() {
    let a = MultiPoly::parse("x^2 + y", 2).unwrap();
    let b = MultiPoly::parse("x + 1", 2).unwrap();
    assert_eq!(a.divide_exact(&b), Err(Error::InexactDivision));
}
