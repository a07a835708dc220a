use proptest::prelude::*;
use telesum::json;
use telesum::{parse, parse_expr, plain};
use telesum_core::arith::{int, rat, sym, MPoly, MRatFunc, Rational};
use telesum_core::expr::{normalize, Affine, Expr, HarmonicSumRef, Layer, SSumRef};

fn lin(terms: &[(&str, i64)], c: i64) -> Affine {
    Affine::from_terms(terms.iter().map(|(v, k)| (sym(v), *k)), c)
}

const TRIPLE: &str = "Sum(j,0,N-2, Sum(r,0,j+1, Sum(s,0,N+r-j-2, (-1)^(r+s) * Binomial(j+1,r) * Binomial(N+r-j-2,s) * Factorial(N-j-2) * Factorial(r) / ((N-s)*(s+1)*Factorial(N+r-j)))))";

#[test]
fn single_layer() {
    let s = parse("Sum(j,0,N-2, Binomial(N,j))").unwrap();
    assert_eq!(s.layers, vec![Layer { var: sym("j"), lower: Affine::constant(0), upper: lin(&[("N", 1)], -2) }]);
    assert_eq!(s.summand, Expr::binomial(lin(&[("N", 1)], 0), lin(&[("j", 1)], 0)));
}

#[test]
fn triple_sum_layers() {
    let s = parse(TRIPLE).unwrap();
    let bounds: Vec<(&str, Affine, Affine)> = s.layers.iter().map(|l| (l.var.as_str(), l.lower.clone(), l.upper.clone())).collect();
    assert_eq!(
        bounds,
        vec![
            ("j", Affine::constant(0), lin(&[("N", 1)], -2)),
            ("r", Affine::constant(0), lin(&[("j", 1)], 1)),
            ("s", Affine::constant(0), lin(&[("N", 1), ("r", 1), ("j", -1)], -2)),
        ]
    );
    let mut vars: Vec<String> = s.summand.free_vars().iter().map(|v| v.as_str().to_string()).collect();
    vars.sort();
    assert_eq!(vars, vec!["N", "j", "r", "s"]);
}

#[test]
fn unclosed_call_is_reported_at_the_end() {
    let text = "Sum(j,0,N, Binomial(N,j)";
    let e = parse(text).unwrap_err();
    assert_eq!(e.expected, "\")\"");
    assert_eq!(e.found, "end-of-input");
    assert_eq!((e.span.start, e.span.end), (text.len(), text.len()));
}

#[test]
fn diagnostics_point_into_the_input() {
    let bad = [
        "Sum(j,0,N, Binomial(N,j)",
        "Binomial(N,)",
        "Frobnicate(N)",
        "Sum(j,0,N^2, j)",
        "S[](N)",
        "(N+1",
        "N + * 2",
        "Sum(j, 0, N, 1) $",
        "",
        "Sum(j, 0, k, Sum(k, 0, N, 1))",
    ];
    for text in bad {
        let e = parse(text).unwrap_err();
        assert!(e.span.start <= e.span.end && e.span.end <= text.len(), "{text:?}: {e}");
        let shown = e.render(text);
        assert!(shown.starts_with("error: expected"), "{shown}");
    }
}

#[test]
fn render_examples() {
    let s1 = Expr::Harmonic(HarmonicSumRef::new(vec![1], lin(&[("N", 1)], 0)).unwrap());
    let np1 = lin(&[("N", 1)], 1).to_mpoly();
    let den = MRatFunc::new(MPoly::one(), &np1 * &np1).unwrap();
    assert_eq!(plain(&Expr::mul(vec![s1, Expr::rational(den)])), "S[1](N)/(N+1)^2");
    assert_eq!(plain(&Expr::rational(MRatFunc::constant(rat(22, 7)))), "22/7");
}

#[test]
fn json_rational_payload() {
    let v = json::rational(&rat(22, 7));
    assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"den":"7","num":"22"}"#);
    assert_eq!(v["num"], "22");
    assert_eq!(v["den"], "7");
    let big: Rational = int(10).pow(30) / int(3);
    assert_eq!(json::rational(&big)["num"], "1000000000000000000000000000000");
}

#[test]
fn json_is_deterministic() {
    let s = parse(TRIPLE).unwrap();
    let a = serde_json::to_string_pretty(&json::expr(&s.to_expr())).unwrap();
    let b = serde_json::to_string_pretty(&json::expr(&parse(TRIPLE).unwrap().to_expr())).unwrap();
    assert_eq!(a, b);
}

#[test]
fn shipped_examples_round_trip() {
    for text in [TRIPLE, "Sum(j,0,N-2, Binomial(N,j))", "S[1](N)/(N+1)^2 - 2*S[-2](N)/(N+1)", "SS[1,2][2,-1/2](N+1)", "Pochhammer(2-N, j)*3/4"] {
        let e = parse_expr(text).unwrap();
        assert_eq!(parse_expr(&plain(&e)).unwrap(), normalize(&e), "{text}");
    }
}

fn affine() -> impl Strategy<Value = Affine> {
    (-2i64..=2, -1i64..=1, -3i64..=3).prop_map(|(a, b, c)| Affine::from_terms([(sym("N"), a), (sym("j"), b)], c))
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-30i64..30, 1i64..6).prop_map(|(a, b)| Expr::rational(MRatFunc::constant(rat(a, b)))),
        prop_oneof![Just("N"), Just("j")].prop_map(|v| Expr::var(sym(v))),
        affine().prop_map(Expr::factorial),
        (affine(), affine()).prop_map(|(a, b)| Expr::binomial(a, b)),
        (affine(), affine()).prop_map(|(a, b)| Expr::pochhammer(a, b)),
        (prop_oneof![Just(int(-1)), Just(int(2)), Just(rat(-1, 2))], affine()).prop_map(|(b, e)| Expr::power(b, e)),
        (prop::collection::vec(prop_oneof![-3i64..=-1, 1i64..=3], 1..=3), affine())
            .prop_map(|(m, a)| Expr::Harmonic(HarmonicSumRef::new(m, a).unwrap())),
        (prop::collection::vec((1u32..=2, prop_oneof![Just(int(2)), Just(rat(1, 2)), Just(int(-1))]), 1..=2), affine()).prop_map(
            |(ls, a)| {
                let (m, x): (Vec<u32>, Vec<Rational>) = ls.into_iter().unzip();
                Expr::SSum(SSumRef::new(m, x, a).unwrap())
            }
        ),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 20, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Add),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Mul),
            (inner.clone(), -2i64..=3).prop_map(|(b, k)| Expr::Pow(Box::new(b), k)),
            (inner, affine()).prop_map(|(body, hi)| Expr::sum(sym("i"), Affine::constant(1), hi, body)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn render_then_parse_is_normalize(e in expr()) {
        let text = plain(&e);
        let back = parse_expr(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back, normalize(&e), "{}", text);
    }
}
