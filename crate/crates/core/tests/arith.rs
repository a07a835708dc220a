use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use telesum_core::arith::{dispersion, int, integer_roots, poly_gcd, rat, resultant, rf_normalize, sym, Polynomial, Rational};

fn p(cs: &[i64]) -> Polynomial {
    Polynomial::from_ints(sym("x"), cs)
}

/// Product of `(x - r)` over the given roots.
fn from_roots(roots: &[i64]) -> Polynomial {
    roots.iter().fold(p(&[1]), |acc, r| &acc * &p(&[-r, 1]))
}

#[test]
fn gcd_examples() {
    assert_eq!(poly_gcd(&p(&[-1, 0, 1]), &p(&[-1, 1])), p(&[-1, 1]));
    assert_eq!(poly_gcd(&p(&[1, 0, 1]), &p(&[1, 1])), p(&[1]));
    assert_eq!(poly_gcd(&p(&[-6, 0, 6]), &p(&[4, 4])), p(&[1, 1]));
    assert_eq!(poly_gcd(&p(&[0, 2]), &Polynomial::zero(sym("x"))), p(&[0, 1]));
}

#[test]
fn resultant_examples() {
    assert_eq!(resultant(&p(&[-1, 1]), &p(&[-2, 1])).unwrap(), int(-1));
    assert_eq!(resultant(&p(&[0, 1]), &p(&[0, 1])).unwrap(), int(0));
    assert_eq!(resultant(&p(&[-1, 0, 1]), &p(&[-1, 1])).unwrap(), int(0));
    assert!(resultant(&Polynomial::zero(sym("x")), &p(&[1, 1])).is_err());
}

#[test]
fn integer_root_examples() {
    let big = |v: &[i64]| v.iter().map(|x| BigInt::from(*x)).collect::<Vec<_>>();
    assert_eq!(integer_roots(&p(&[2, -3, 1])).unwrap(), big(&[1, 2]));
    assert_eq!(integer_roots(&p(&[1, 0, 1])).unwrap(), big(&[]));
    assert_eq!(integer_roots(&p(&[-1, 2])).unwrap(), big(&[]));
    assert!(integer_roots(&Polynomial::zero(sym("x"))).is_err());
}

#[test]
fn dispersion_examples() {
    assert_eq!(dispersion(&p(&[0, 1]), &p(&[-3, 1])).unwrap(), Some(3));
    assert_eq!(dispersion(&p(&[0, 1]), &p(&[1, 1])).unwrap(), None);
    assert_eq!(dispersion(&p(&[0, -2, 1]), &p(&[0, 1])).unwrap(), Some(0));
}

/// Largest `h` in `0..=bound` with a nonconstant `gcd(p(x), q(x+h))`, by scanning.
fn scan_dispersion(p: &Polynomial, q: &Polynomial, bound: i64) -> Option<u64> {
    (0..=bound).rev().find(|h| !poly_gcd(p, &q.shift(&int(*h))).is_constant()).map(|h| h as u64)
}

#[test]
fn dispersion_matches_shift_scan() {
    let cases = [(p(&[0, 1]), p(&[-3, 1])), (p(&[0, -2, 1]), p(&[0, 1])), (from_roots(&[1, 4, -2]), from_roots(&[7, 0]))];
    for (a, b) in &cases {
        assert_eq!(dispersion(a, b).unwrap(), scan_dispersion(a, b, 20));
    }
}

#[test]
fn rf_normalize_examples() {
    let r = rf_normalize(p(&[-1, 0, 1]), p(&[-1, 1])).unwrap();
    assert_eq!((r.num().clone(), r.den().clone()), (p(&[1, 1]), p(&[1])));
    let r = rf_normalize(p(&[0, 2]), p(&[4])).unwrap();
    assert_eq!(r.num(), &Polynomial::new(sym("x"), vec![int(0), rat(1, 2)]));
    assert_eq!(r.den(), &p(&[1]));
    let r = rf_normalize(p(&[0]), p(&[5, 1])).unwrap();
    assert!(r.is_zero());
    assert_eq!(r.den(), &p(&[1]));
    assert!(rf_normalize(p(&[1]), p(&[0])).is_err());
}

fn small_poly(max_deg: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-6i64..=6, 1..=max_deg + 1).prop_map(|cs| p(&cs))
}

fn nonzero_poly(max_deg: usize) -> impl Strategy<Value = Polynomial> {
    small_poly(max_deg).prop_filter("nonzero", |q| !q.is_zero())
}

fn divides(d: &Polynomial, a: &Polynomial) -> bool {
    d.is_zero() && a.is_zero() || !d.is_zero() && a.div_rem(d).1.is_zero()
}

proptest! {
    #[test]
    fn gcd_divides_both(a in small_poly(6), b in small_poly(6)) {
        let g = poly_gcd(&a, &b);
        prop_assert!(divides(&g, &a));
        prop_assert!(divides(&g, &b));
        if !g.is_zero() {
            prop_assert_eq!(g.lc(), int(1));
        }
    }

    #[test]
    fn gcd_recovers_planted_factor(f in prop::collection::vec(-4i64..=4, 1..=3), a in nonzero_poly(3), b in nonzero_poly(3)) {
        let common = from_roots(&f);
        let g = poly_gcd(&(&common * &a), &(&common * &b));
        prop_assert!(divides(&common, &g));
    }

    #[test]
    fn resultant_vanishes_iff_common_factor(a in nonzero_poly(6), b in nonzero_poly(6)) {
        let r = resultant(&a, &b).unwrap();
        prop_assert_eq!(r.is_zero(), !poly_gcd(&a, &b).is_constant());
    }

    #[test]
    fn resultant_with_planted_root(r in -5i64..=5, a in nonzero_poly(3), b in nonzero_poly(3)) {
        let lin = p(&[-r, 1]);
        prop_assert!(resultant(&(&lin * &a), &(&lin * &b)).unwrap().is_zero());
    }

    #[test]
    fn dispersion_symmetry(ra in prop::collection::vec(-6i64..=6, 1..=3), rb in prop::collection::vec(-6i64..=6, 1..=3)) {
        let a = from_roots(&ra);
        let b = from_roots(&rb);
        let d = dispersion(&a, &b).unwrap();
        prop_assert_eq!(d, scan_dispersion(&a, &b, 30));
        if let Some(h) = d {
            let h = h as i64;
            prop_assert!(!poly_gcd(&a, &b.shift(&int(h))).is_constant());
            prop_assert!(!poly_gcd(&b, &a.shift(&int(-h))).is_constant());
        }
    }

    #[test]
    fn rf_normalize_idempotent_and_value_preserving(
        num in small_poly(4),
        den in nonzero_poly(4),
        pts in prop::collection::vec((-40i64..=40, 1i64..=7), 20),
    ) {
        let r = rf_normalize(num.clone(), den.clone()).unwrap();
        let again = rf_normalize(r.num().clone(), r.den().clone()).unwrap();
        prop_assert_eq!(&again, &r);
        prop_assert_eq!(r.den().lc(), int(1));
        for (a, b) in pts {
            let x = Rational::new(a.into(), b.into());
            let d = den.eval(&x);
            if d.is_zero() {
                continue;
            }
            prop_assert_eq!(r.eval(&x).unwrap(), num.eval(&x) / d);
        }
    }
}
