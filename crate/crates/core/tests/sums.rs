use std::collections::BTreeMap;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use telesum_core::arith::{int, rat, sym, MPoly, MRatFunc, Rational, Symbol};
use telesum_core::domain::Domain;
use telesum_core::expr::{Affine, Env};
use telesum_core::form::{Chain, Form};
use telesum_core::hyper::HyperTerm;
use telesum_core::sums::{
    constant_poly, form_to_sumpoly, harmonic_word, is_lyndon, quasi_shuffle, rational_to_harmonic, reduce_to_basis,
    synchronize, to_basis_form, weight, word_value, BasisError, Letter, SumPoly, Word,
};

fn n() -> Symbol {
    sym("N")
}

fn i() -> Symbol {
    sym("i")
}

fn env(v: i64) -> Env {
    [(n(), v)].into_iter().collect()
}

fn h(idx: &[i64]) -> Word {
    harmonic_word(idx)
}

fn hv(idx: &[i64], v: i64) -> Rational {
    word_value(&h(idx), v)
}

fn inv_poly(p: MPoly) -> MRatFunc {
    MRatFunc::from_poly(p).inv().unwrap()
}

fn shifted(v: Symbol, c: i64) -> MPoly {
    &MPoly::var(v) + &MPoly::from_int(c)
}

fn coeff(r: MRatFunc) -> HyperTerm {
    HyperTerm::from_coeff(r)
}

fn sign_n() -> HyperTerm {
    HyperTerm::power(&int(-1), &Affine::var(n()))
}

/// The form as a polynomial in S-sums at `N`, asserting nothing is left over.
fn as_sumpoly(f: &Form) -> SumPoly {
    let (p, left) = form_to_sumpoly(f, n());
    assert!(left.is_zero(), "unrecognized part {left}");
    p
}

fn harmonic_sum_of(summand: HyperTerm) -> Form {
    let d = Domain::new().with_param(n(), 1);
    rational_to_harmonic(&summand, i(), &Affine::constant(1), &Affine::var(n()), &d).expect("convertible")
}

#[test]
fn rational_to_harmonic_examples() {
    let f = harmonic_sum_of(coeff(inv_poly(shifted(i(), 1))));
    let expected = SumPoly::word(h(&[1]))
        .add(&SumPoly::from_hyper(&coeff(inv_poly(shifted(n(), 1)))))
        .sub(&SumPoly::one());
    assert_eq!(as_sumpoly(&f), expected);
    for v in 1..=20 {
        assert_eq!(f.eval(&env(v)).unwrap(), hv(&[1], v) + rat(1, v + 1) - int(1));
    }

    let sq = inv_poly(&MPoly::var(i()) * &MPoly::var(i()));
    assert_eq!(as_sumpoly(&harmonic_sum_of(coeff(sq))), SumPoly::word(h(&[2])));

    let alt = HyperTerm::power(&int(-1), &Affine::var(i())).scale(&inv_poly(MPoly::var(i())));
    assert_eq!(as_sumpoly(&harmonic_sum_of(alt)), SumPoly::word(h(&[-1])));

    let geo = HyperTerm::power(&int(2), &Affine::var(i())).scale(&inv_poly(MPoly::var(i())));
    let f = harmonic_sum_of(geo);
    assert_eq!(as_sumpoly(&f), SumPoly::word(vec![Letter::new(1, int(2))]));
    for v in 1..=12 {
        let direct: Rational = (1..=v).map(|k| int(2).pow(k as i32) / int(k)).sum();
        assert_eq!(f.eval(&env(v)).unwrap(), direct);
    }
}

fn poly_of(terms: &BTreeMap<Word, i64>) -> SumPoly {
    terms.iter().fold(SumPoly::zero(), |acc, (w, c)| {
        acc.add(&SumPoly::word(w.clone()).scale_hyper(&HyperTerm::constant(int(*c))))
    })
}

#[test]
fn quasi_shuffle_examples() {
    let p = quasi_shuffle(&h(&[1]), &h(&[1]));
    assert_eq!(p, BTreeMap::from([(h(&[1, 1]), 2), (h(&[2]), -1)]));
    assert_eq!(hv(&[1], 2) * hv(&[1], 2), rat(9, 4));
    assert_eq!((hv(&[1, 1], 2), hv(&[2], 2)), (rat(7, 4), rat(5, 4)));

    let p = quasi_shuffle(&h(&[1]), &h(&[2]));
    assert_eq!(p, BTreeMap::from([(h(&[1, 2]), 1), (h(&[2, 1]), 1), (h(&[3]), -1)]));
    assert_eq!(hv(&[1], 2) * hv(&[2], 2), rat(15, 8));
    assert_eq!((hv(&[1, 2], 2), hv(&[2, 1], 2), hv(&[3], 2)), (rat(13, 8), rat(11, 8), rat(9, 8)));

    let p = quasi_shuffle(&h(&[-1]), &h(&[1]));
    assert_eq!(p, BTreeMap::from([(h(&[-1, 1]), 1), (h(&[1, -1]), 1), (h(&[-2]), -1)]));
    for v in 1..=20 {
        assert_eq!(poly_of(&p).eval(n(), &env(v)).unwrap(), hv(&[-1], v) * hv(&[1], v));
    }

    assert_eq!(quasi_shuffle(&h(&[3, -1]), &[]), BTreeMap::from([(h(&[3, -1]), 1)]));
}

/// Every signed index vector of weight exactly `w`.
fn words_of_weight(w: u32) -> Vec<Vec<i64>> {
    if w == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for m in 1..=w {
        for rest in words_of_weight(w - m) {
            for s in [m as i64, -(m as i64)] {
                let mut v = vec![s];
                v.extend(&rest);
                out.push(v);
            }
        }
    }
    out
}

fn words_up_to(w: u32) -> Vec<Vec<i64>> {
    (1..=w).flat_map(words_of_weight).collect()
}

#[test]
fn quasi_shuffle_exhaustive_to_weight_five() {
    let start = Instant::now();
    let all = words_up_to(4);
    // Values at N = 0..=30 for every word up to weight 5.
    let table: BTreeMap<Vec<i64>, Vec<Rational>> =
        words_up_to(5).into_iter().map(|w| { let vals = (0..=30).map(|v| hv(&w, v)).collect(); (w, vals) }).collect();
    let value = |w: &Word, v: usize| -> Rational {
        let idx: Vec<i64> = w.iter().map(|l| l.as_harmonic().unwrap()).collect();
        if idx.is_empty() { int(1) } else { table[&idx][v].clone() }
    };
    let mut pairs = 0;
    for a in &all {
        for b in &all {
            let wa: u32 = a.iter().map(|m| m.unsigned_abs() as u32).sum();
            let wb: u32 = b.iter().map(|m| m.unsigned_abs() as u32).sum();
            if wa + wb > 5 {
                continue;
            }
            pairs += 1;
            let p = quasi_shuffle(&h(a), &h(b));
            for v in 1..=30usize {
                let lhs: Rational = p.iter().map(|(w, c)| int(*c) * value(w, v)).sum();
                assert_eq!(lhs, &table[a][v] * &table[b][v], "{a:?} * {b:?} at {v}");
            }
        }
    }
    eprintln!("{pairs} pairs in {:?}", start.elapsed());
}

#[test]
fn synchronize_examples() {
    let at = |p: &SumPoly, v: i64| p.eval(n(), &env(v)).unwrap();
    let inv_n1 = coeff(inv_poly(shifted(n(), 1)));
    assert_eq!(synchronize(&h(&[1]), n(), 1), SumPoly::word(h(&[1])).add(&SumPoly::from_hyper(&inv_n1)));

    let inv_sq = coeff(inv_poly(&MPoly::var(n()) * &MPoly::var(n())));
    assert_eq!(synchronize(&h(&[2]), n(), -1), SumPoly::word(h(&[2])).sub(&SumPoly::from_hyper(&inv_sq)));

    let p = synchronize(&h(&[1, 1]), n(), 1);
    let sq = inv_n1.mul(&inv_n1);
    let expected = SumPoly::word(h(&[1, 1]))
        .add(&SumPoly::word(h(&[1])).scale_hyper(&inv_n1))
        .add(&SumPoly::from_hyper(&sq));
    assert_eq!(p, expected);
    for v in 1..=20 {
        assert_eq!(at(&p, v), hv(&[1, 1], v + 1));
    }
}

#[test]
fn synchronize_matches_defining_recurrence() {
    for idx in words_up_to(4) {
        let w = h(&idx);
        let diff = synchronize(&w, n(), 1).sub(&SumPoly::word(w.clone()));
        // x^(N+1)/(N+1)^m · S_rest(N+1)
        let at = Affine::var(n()).add_const(1);
        let step = HyperTerm::power(&w[0].x, &at).scale(&MRatFunc::from_poly(at.to_mpoly()).pow(-(w[0].m as i64)).unwrap());
        let expected = synchronize(&w[1..], n(), 1).scale_hyper(&step);
        assert_eq!(diff, expected, "{idx:?}");
        for v in 0..8 {
            assert_eq!(SumPoly::word(w.clone()).eval(n(), &env(v + 1)).unwrap(), synchronize(&w, n(), 1).eval(n(), &env(v)).unwrap());
        }
    }
}

#[test]
fn reduce_to_basis_examples() {
    let p = constant_poly(&[(2, vec![h(&[1, 1])]), (-1, vec![h(&[2])])]);
    let (q, report) = reduce_to_basis(&p, 4).unwrap();
    assert_eq!(q, constant_poly(&[(1, vec![h(&[1]), h(&[1])])]));
    assert!(report.eliminated.contains_key(&h(&[1, 1])));

    // Closed form of the triple sum: S_1, S_2, S_{-2} are already independent.
    let r = |num: MPoly, den: MPoly| coeff(MRatFunc::new(num, den).unwrap());
    let np = || MPoly::var(n());
    let n2 = || &np() * &np();
    let cube = |p: MPoly| &(&p * &p) * &p;
    let poly_num = &(&n2() + &np()) + &MPoly::one();
    let res = SumPoly::from_hyper(&r(-&poly_num.clone(), &n2() * &cube(shifted(n(), 1))))
        .add(&SumPoly::from_hyper(&r(poly_num.clone(), &n2() * &cube(shifted(n(), 1))).mul(&sign_n())))
        .add(&SumPoly::word(h(&[1])).scale_hyper(&r(MPoly::one(), &shifted(n(), 1) * &shifted(n(), 1))))
        .sub(&SumPoly::word(h(&[2])).scale_hyper(&r(MPoly::one(), shifted(n(), 1))))
        .sub(&SumPoly::word(h(&[-2])).scale_hyper(&r(MPoly::from_int(2), shifted(n(), 1))));
    let (q, report) = reduce_to_basis(&res, 4).unwrap();
    assert_eq!(q, res);
    assert!(report.eliminated.is_empty());

    // S_1·S_2 minus its quasi-shuffle expansion.
    let product = constant_poly(&[(1, vec![h(&[1]), h(&[2])])]);
    let expansion = poly_of(&quasi_shuffle(&h(&[1]), &h(&[2])));
    let (q, _) = reduce_to_basis(&product.sub(&expansion), 4).unwrap();
    assert!(q.is_zero());

    let heavy = SumPoly::word(h(&[2, 3]));
    assert_eq!(reduce_to_basis(&heavy, 4).unwrap_err(), BasisError::WeightAboveCap(5, 4));
}

#[test]
fn lyndon_sums_are_kept() {
    for idx in words_up_to(4) {
        let w = h(&idx);
        if !is_lyndon(&w) {
            continue;
        }
        let p = SumPoly::word(w.clone());
        let (q, report) = reduce_to_basis(&p, 4).unwrap();
        assert_eq!(q, p, "{idx:?}");
        assert!(report.eliminated.is_empty());
    }
}

fn word_strategy(budget: u32) -> impl Strategy<Value = Vec<i64>> {
    prop::sample::select(words_up_to(budget))
}

fn coeff_strategy() -> impl Strategy<Value = HyperTerm> {
    (-3i64..=3, 0i64..=3, any::<bool>()).prop_map(|(c, s, alt)| {
        let r = inv_poly(shifted(n(), s)).scale(&int(c));
        let t = coeff(r);
        if alt { t.mul(&sign_n()) } else { t }
    })
}

fn monomial_strategy() -> impl Strategy<Value = SumPoly> {
    (coeff_strategy(), word_strategy(4)).prop_flat_map(|(c, first)| {
        let used: u32 = first.iter().map(|m| m.unsigned_abs() as u32).sum();
        let second = if used < 4 { word_strategy(4 - used).prop_map(Some).boxed() } else { Just(None).boxed() };
        (Just(c), Just(first), prop::option::weighted(0.4, second)).prop_map(|(c, a, b)| {
            let mut sums = vec![h(&a)];
            sums.extend(b.flatten().map(|b| h(&b)));
            SumPoly::monomial(&c, sums)
        })
    })
}

#[test]
fn random_basis_reduction() {
    let mut runner = TestRunner::new(PropConfig { cases: 50, ..PropConfig::default() });
    let poly = prop::collection::vec(monomial_strategy(), 1..=4).prop_map(|ms| ms.iter().fold(SumPoly::zero(), |a, m| a.add(m)));
    runner
        .run(&poly, |p| {
            prop_assert!(p.max_weight() <= 4);
            let (q, report) = reduce_to_basis(&p, 4).unwrap();
            for v in 1..=30 {
                prop_assert_eq!(q.eval(n(), &env(v)).unwrap(), p.eval(n(), &env(v)).unwrap());
            }
            for w in q.words() {
                prop_assert!(is_lyndon(&w));
            }
            for (w, e) in &report.eliminated {
                for v in 1..=30 {
                    prop_assert_eq!(e.eval(n(), &env(v)).unwrap(), word_value(w, v));
                }
            }
            let (again, _) = reduce_to_basis(&q, 4).unwrap();
            prop_assert_eq!(again, q);
            Ok(())
        })
        .unwrap();
}

fn nested(lower: i64, upper_shift: i64, body: Form) -> Form {
    Form::chain(Chain::new(i(), Affine::constant(lower), Affine::var(n()).add_const(upper_shift), body))
}

#[test]
fn polynomial_weighted_sums_convert() {
    let s = |idx: &[i64]| {
        let layers: Vec<(u32, Rational)> = h(idx).iter().map(|l| (l.m, l.x.clone())).collect();
        telesum_core::form::ssum_form(&layers, &Affine::var(i()))
    };
    let ipoly = |cs: &[i64]| MRatFunc::from_poly(cs.iter().rev().fold(MPoly::zero(), |a, c| &(&a * &MPoly::var(i())) + &MPoly::from_int(*c)));
    let alt = HyperTerm::power(&int(-1), &Affine::var(i()));
    let half = HyperTerm::power(&rat(1, 2), &Affine::var(i()));

    // Σ_{i=1}^N S_1(i) = (N+1)S_1(N) − N
    let f = nested(1, 0, s(&[1]));
    let p = as_sumpoly(&f);
    let expected = SumPoly::word(h(&[1]))
        .scale_hyper(&coeff(MRatFunc::from_poly(shifted(n(), 1))))
        .sub(&SumPoly::from_hyper(&coeff(MRatFunc::from_poly(MPoly::var(n())))));
    assert_eq!(p, expected);

    let cases = vec![
        nested(1, 0, s(&[2]).scale(&ipoly(&[0, 0, 1]))),
        nested(2, 1, s(&[-1]).mul_hyper(&alt).scale(&ipoly(&[1, 1]))),
        nested(1, -1, s(&[1, 1]).scale(&ipoly(&[3, 0, 2]))),
        nested(1, 0, s(&[1]).mul_hyper(&half).scale(&ipoly(&[0, 1]))),
        nested(3, 2, s(&[-2, 1]).mul_hyper(&alt)),
    ];
    for f in cases {
        let p = as_sumpoly(&f);
        let g = to_basis_form(&f, n(), 4);
        assert!(g.depth() <= f.depth() - 1, "{f} -> {g}");
        for v in 1..=15 {
            let direct = f.eval(&env(v)).unwrap();
            assert_eq!(p.eval(n(), &env(v)).unwrap(), direct, "{f} at {v}");
            assert_eq!(g.eval(&env(v)).unwrap(), direct, "{f} at {v}");
        }
    }
    assert!(weight(&h(&[-2, 1])) == 3);
}
