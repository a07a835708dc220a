use std::collections::BTreeMap;

use proptest::prelude::*;
use telesum_core::arith::{int, rat, sym, MPoly, MRatFunc, Rational, Symbol};
use telesum_core::expr::{
    evaluate, harmonic_value, normalize, shift_quotient, ssum_value, Affine, Env, EvalError, Expr, HarmonicSumRef, SSumRef,
};

fn j() -> Symbol {
    sym("j")
}

fn n() -> Symbol {
    sym("N")
}

fn lin(terms: &[(Symbol, i64)], c: i64) -> Affine {
    Affine::from_terms(terms.iter().copied(), c)
}

fn env(pairs: &[(Symbol, i64)]) -> Env {
    pairs.iter().copied().collect()
}

fn ratfunc(num: MPoly, den: MPoly) -> MRatFunc {
    MRatFunc::new(num, den).unwrap()
}

fn harmonic(indices: &[i64], arg: Affine) -> Expr {
    Expr::Harmonic(HarmonicSumRef::new(indices.to_vec(), arg).unwrap())
}

fn rational_at(r: &MRatFunc, pairs: &[(Symbol, i64)]) -> Option<Rational> {
    let env: BTreeMap<Symbol, Rational> = pairs.iter().map(|(s, v)| (*s, int(*v))).collect();
    r.eval(&env).ok().flatten()
}

#[test]
fn shift_quotient_examples() {
    let jv = MPoly::var(j());
    let nv = MPoly::var(n());
    let one = MPoly::one();

    let q = shift_quotient(&Expr::factorial(Affine::var(j())), j()).unwrap();
    assert_eq!(q, MRatFunc::from_poly(&jv + &one));

    let q = shift_quotient(&Expr::binomial(Affine::var(n()), Affine::var(j())), j()).unwrap();
    assert_eq!(q, ratfunc(&nv - &jv, &jv + &one));
    for jj in 0..=5 {
        let at = |x: i64| evaluate(&Expr::binomial(Affine::constant(7), Affine::constant(x)), &Env::new()).unwrap();
        assert_eq!(at(jj + 1), rational_at(&q, &[(n(), 7), (j(), jj)]).unwrap() * at(jj));
    }

    let q = shift_quotient(&Expr::pochhammer(lin(&[(n(), -1)], 2), Affine::var(j())), j()).unwrap();
    assert_eq!(q, MRatFunc::from_poly(&(&jv - &nv) + &MPoly::from_int(2)));

    let q = shift_quotient(&Expr::power(int(-1), Affine::var(j())), j()).unwrap();
    assert_eq!(q, MRatFunc::from_int(-1));

    assert!(shift_quotient(&harmonic(&[1], Affine::var(j())), j()).is_none());
}

#[test]
fn evaluate_examples() {
    let none = Env::new();
    assert_eq!(evaluate(&harmonic(&[1], Affine::constant(3)), &none).unwrap(), rat(11, 6));
    assert_eq!(evaluate(&harmonic(&[-2], Affine::constant(2)), &none).unwrap(), rat(-3, 4));
    assert_eq!(evaluate(&Expr::binomial(Affine::constant(4), Affine::constant(2)), &none).unwrap(), int(6));
    let s = Expr::SSum(SSumRef::new(vec![1], vec![int(2)], Affine::var(n())).unwrap());
    assert_eq!(evaluate(&s, &env(&[(n(), 2)])).unwrap(), int(4));
}

#[test]
fn evaluate_conventions() {
    let none = Env::new();
    let c = Affine::constant;
    assert_eq!(evaluate(&Expr::binomial(c(4), c(-1)), &none).unwrap(), int(0));
    assert_eq!(evaluate(&Expr::binomial(c(4), c(5)), &none).unwrap(), int(0));
    assert_eq!(evaluate(&Expr::pochhammer(c(-3), c(0)), &none).unwrap(), int(1));
    assert_eq!(evaluate(&Expr::pochhammer(c(2), c(3)), &none).unwrap(), int(24));
    let empty = Expr::sum(j(), c(5), c(4), Expr::factorial(Affine::var(j())));
    assert_eq!(evaluate(&empty, &none).unwrap(), int(0));
}

#[test]
fn evaluate_domain_errors() {
    let none = Env::new();
    let e = evaluate(&Expr::factorial(Affine::constant(-1)), &none).unwrap_err();
    assert!(matches!(e, EvalError::Domain { .. }), "{e}");
    let pole = Expr::rational(ratfunc(MPoly::one(), &MPoly::var(n()) - &MPoly::from_int(2)));
    let e = evaluate(&pole, &env(&[(n(), 2)])).unwrap_err();
    assert!(matches!(e, EvalError::Domain { .. }), "{e}");
    assert!(matches!(evaluate(&Expr::var(n()), &none), Err(EvalError::Unbound(_))));
}

#[test]
fn normalize_examples() {
    let x = MRatFunc::var(sym("x"));
    let half = Expr::rational(&x / &MRatFunc::from_int(2));
    let inv = Expr::rational(&MRatFunc::from_int(2) / &x);
    assert_eq!(normalize(&Expr::Mul(vec![half, inv])), Expr::int(1));

    let sign = Expr::power(int(-1), Affine::var(j()));
    assert_eq!(normalize(&Expr::Mul(vec![sign.clone(), sign])), Expr::int(1));

    let (a, b, c) = (harmonic(&[1], Affine::var(n())), harmonic(&[2], Affine::var(n())), harmonic(&[-1], Affine::var(n())));
    let nested = Expr::Add(vec![a.clone(), Expr::Add(vec![b.clone(), c.clone()])]);
    assert_eq!(normalize(&nested), Expr::Add(vec![a, b, c]));
}

fn leaf() -> impl Strategy<Value = Expr> {
    let jv = || Affine::var(j());
    prop_oneof![
        (0i64..3).prop_map(move |c| Expr::factorial(Affine::var(j()).add_const(c))),
        (0i64..3, -1i64..2).prop_map(|(a, b)| Expr::binomial(Affine::var(n()).add_const(a), Affine::var(j()).add_const(b))),
        (-3i64..2).prop_map(move |c| Expr::pochhammer(lin(&[(n(), 1)], c), jv())),
        prop_oneof![Just(int(-1)), Just(int(2)), Just(rat(1, 2)), Just(int(-3))].prop_map(move |b| Expr::power(b, jv())),
        (-3i64..4, -3i64..4).prop_map(|(a, b)| Expr::rational(ratfunc(
            &MPoly::var(j()) + &MPoly::from_int(a),
            &MPoly::var(n()) + &MPoly::from_int(b)
        ))),
        (-4i64..5).prop_map(Expr::int),
        prop_oneof![Just(1i64), Just(-1), Just(2), Just(-2)].prop_map(move |m| harmonic(&[m], jv().add_const(1))),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(Expr::Add),
            prop::collection::vec(inner.clone(), 1..4).prop_map(Expr::Mul),
            (inner, -2i64..4).prop_map(|(b, k)| Expr::Pow(Box::new(b), k)),
        ]
    })
}

fn hyper_expr() -> impl Strategy<Value = Expr> {
    prop::collection::vec(leaf().prop_filter("nonzero hypergeometric", |e| !matches!(e, Expr::Harmonic(_)) && !e.is_zero()), 1..5).prop_map(Expr::Mul)
}

proptest! {
    #[test]
    fn normalize_preserves_values(e in expr(), pts in prop::collection::vec((0i64..8, 0i64..10), 50)) {
        let ne = normalize(&e);
        for (jj, nn) in pts {
            let at = env(&[(j(), jj), (n(), nn)]);
            if let Ok(v) = evaluate(&e, &at) {
                prop_assert_eq!(evaluate(&ne, &at).ok(), Some(v));
            }
        }
    }

    #[test]
    fn normalize_is_idempotent(e in expr()) {
        let once = normalize(&e);
        prop_assert_eq!(normalize(&once), once);
    }

    #[test]
    fn shift_quotient_consistent(e in hyper_expr(), nn in 0i64..12, pts in prop::collection::vec(0i64..15, 20)) {
        let q = shift_quotient(&e, j()).expect("hypergeometric");
        for j0 in pts {
            let here = evaluate(&e, &env(&[(j(), j0), (n(), nn)]));
            let next = evaluate(&e, &env(&[(j(), j0 + 1), (n(), nn)]));
            let r = rational_at(&q, &[(j(), j0), (n(), nn)]);
            if let (Ok(a), Ok(b), Some(r)) = (here, next, r) {
                prop_assert_eq!(b, r * a);
            }
        }
    }
}

/// All signed index vectors of total weight `1..=max`.
fn signed_words(max: u64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<i64>, u64)> = vec![(Vec::new(), 0)];
    while let Some((w, wt)) = stack.pop() {
        if !w.is_empty() {
            out.push(w.clone());
        }
        for m in 1..=(max - wt) as i64 {
            for s in [m, -m] {
                let mut next = w.clone();
                next.push(s);
                stack.push((next, wt + m as u64));
            }
        }
    }
    out
}

#[test]
fn harmonic_defining_recurrence() {
    for w in signed_words(4) {
        let (m, rest) = (w[0], &w[1..]);
        for big_n in 1..=20i64 {
            let sign = if m < 0 && big_n % 2 == 1 { int(-1) } else { int(1) };
            let step = sign / int(big_n).pow(m.unsigned_abs() as i32);
            let tail = if rest.is_empty() { int(1) } else { harmonic_value(rest, big_n) };
            assert_eq!(harmonic_value(&w, big_n) - harmonic_value(&w, big_n - 1), step * tail, "{w:?} at {big_n}");
        }
    }
}

#[test]
fn ssum_at_unit_weights_is_harmonic() {
    for w in signed_words(3) {
        let idx: Vec<u32> = w.iter().map(|m| m.unsigned_abs() as u32).collect();
        let xs: Vec<Rational> = w.iter().map(|m| int(m.signum())).collect();
        for big_n in 1..=20 {
            assert_eq!(ssum_value(&idx, &xs, big_n), harmonic_value(&w, big_n), "{w:?} at {big_n}");
        }
    }
}
