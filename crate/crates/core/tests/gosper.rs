use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use telesum_core::arith::{int, sym, MPoly, MRatFunc, Rational, Symbol};
use telesum_core::expr::{binomial, Affine, Env};
use telesum_core::gosper::{check_certificate, gosper, telescope_definite};
use telesum_core::hyper::HyperTerm;

fn j() -> Symbol {
    sym("j")
}

fn jp(c: i64) -> MPoly {
    &MPoly::var(j()) + &MPoly::from_int(c)
}

fn fact(a: Affine, e: i32) -> HyperTerm {
    HyperTerm::factorial(&a, e).unwrap()
}

fn recip(p: MPoly) -> MRatFunc {
    MRatFunc::from_poly(p).inv().unwrap()
}

fn upper_env(a: i64) -> Env {
    [(sym("a"), a)].into_iter().collect()
}

fn brute(f: &HyperTerm, lo: i64, hi: i64) -> Rational {
    (lo..=hi).map(|x| f.eval(&[(j(), x)].into_iter().collect()).unwrap()).sum()
}

#[test]
fn j_times_factorial_telescopes_to_factorial() {
    let f = fact(Affine::var(j()), 1).scale(&MRatFunc::var(j()));
    let cert = gosper(&f, j()).unwrap();
    assert_eq!(cert.ratio, recip(MPoly::var(j())));
    assert!(check_certificate(&f, j(), &cert));
    let s = telescope_definite(&f, j(), &Affine::constant(1), &Affine::var(sym("a"))).unwrap();
    let fa = |a: i64| -> Rational { (1..=a).map(|k| int(k)).product() };
    for a in 1..=10 {
        assert_eq!(s.eval(&upper_env(a)).unwrap(), fa(a + 1) - int(1));
        assert_eq!(s.eval(&upper_env(a)).unwrap(), brute(&f, 1, a));
    }
}

#[test]
fn reciprocal_pair_telescopes() {
    let f = HyperTerm::from_coeff(recip(&MPoly::var(j()) * &jp(1)));
    let cert = gosper(&f, j()).unwrap();
    assert!(check_certificate(&f, j(), &cert));
    // g = R·f = -1/j
    assert_eq!(cert.antidifference(&f).coeff(), &recip(MPoly::var(j())).scale(&int(-1)));
    let s = telescope_definite(&f, j(), &Affine::constant(1), &Affine::var(sym("a"))).unwrap();
    for a in 1..=10 {
        assert_eq!(s.eval(&upper_env(a)).unwrap(), int(1) - Rational::new(1.into(), (a + 1).into()));
        assert_eq!(s.eval(&upper_env(a)).unwrap(), brute(&f, 1, a));
    }
}

#[test]
fn empty_range_telescopes_to_zero() {
    let f = fact(Affine::var(j()), 1);
    let s = telescope_definite(&f, j(), &Affine::constant(5), &Affine::constant(4)).unwrap();
    assert!(s.is_zero());
}

/// Solves `p(k) = y_k·q(k)` for `p, q` of degree `d`; true if a solution with `q(k) ≠ 0` on all points exists.
fn fits_rational(points: &[(i64, Rational)], d: usize) -> bool {
    let width = 2 * (d + 1);
    let mut rows: Vec<Vec<Rational>> = points
        .iter()
        .map(|(k, y)| {
            let pw: Vec<Rational> = (0..=d).map(|e| int(k.pow(e as u32))).collect();
            pw.iter().cloned().chain(pw.iter().map(|x| -(x * y))).collect()
        })
        .collect();
    // Reduced row echelon form; the nullspace is read off the free columns.
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = int(1) / &rows[r][c];
        rows[r] = rows[r].iter().map(|x| x * &inv).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let sub: Vec<Rational> = rows[r].iter().map(|x| x * &f).collect();
                rows[i] = rows[i].iter().zip(&sub).map(|(a, b)| a - b).collect();
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..width).filter(|c| !pivots.contains(c)).any(|free| {
        let mut v = vec![Rational::zero(); width];
        v[free] = int(1);
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[row][free].clone();
        }
        points.iter().all(|(k, _)| {
            let q: Rational = (0..=d).map(|e| &v[d + 1 + e] * int(k.pow(e as u32))).sum();
            !q.is_zero()
        })
    })
}

#[test]
fn binomial_row_has_no_antidifference() {
    let n = Affine::var(sym("n"));
    let jv = Affine::var(j());
    let f = fact(n.clone(), 1).mul(&fact(jv.clone(), -1)).mul(&fact(n.sub(&jv), -1));
    assert!(gosper(&f, j()).is_none());
    // At n = 6 the partial sums are no low-degree rational multiple of the summand.
    let pts: Vec<(i64, Rational)> = (0..=6)
        .map(|k| {
            let partial: Rational = (0..k).map(|i| Rational::from(binomial(6, i))).sum();
            (k, partial / Rational::from(binomial(6, k)))
        })
        .collect();
    assert!(!fits_rational(&pts, 2));
}

#[test]
fn harmonic_numbers_are_not_hypergeometric() {
    let f = HyperTerm::from_coeff(recip(MPoly::var(j())));
    assert!(gosper(&f, j()).is_none());
    let pts: Vec<(i64, Rational)> = (1..=9)
        .map(|k| {
            let h: Rational = (1..k).map(|i| Rational::new(1.into(), i.into())).sum();
            (k, h * int(k))
        })
        .collect();
    assert!(!fits_rational(&pts, 3));
}

#[test]
fn fit_helper_accepts_rational_data() {
    let pts: Vec<(i64, Rational)> = (0..8).map(|k| (k, Rational::new((k * k + 1).into(), (k + 3).into()))).collect();
    assert!(fits_rational(&pts, 2));
}

fn poly_strategy(max_deg: usize) -> impl Strategy<Value = MPoly> {
    prop::collection::vec(-4i64..=4, 1..=max_deg + 1).prop_map(|cs| {
        cs.iter().rev().fold(MPoly::zero(), |acc, c| &(&acc * &MPoly::var(j())) + &MPoly::from_int(*c))
    })
}

fn ratio_strategy() -> impl Strategy<Value = MRatFunc> {
    (poly_strategy(3), poly_strategy(3))
        .prop_filter_map("nonzero ratio", |(p, q)| if p.is_zero() || q.is_zero() { None } else { MRatFunc::new(p, q).ok() })
}

fn kernel_strategy() -> impl Strategy<Value = HyperTerm> {
    let piece = prop_oneof![
        (0i64..3, prop_oneof![Just(1i32), Just(-1)]).prop_map(|(c, e)| fact(Affine::var(j()).add_const(c), e)),
        (-2i64..2).prop_map(|c| fact(Affine::from_terms([(j(), 2)], c + 2), 1)),
        prop_oneof![Just(int(2)), Just(int(-1)), Just(Rational::new(1.into(), 3.into()))]
            .prop_map(|b| HyperTerm::power(&b, &Affine::var(j()))),
        (-3i64..3, -3i64..3).prop_map(|(a, b)| HyperTerm::from_coeff(&MRatFunc::from_poly(jp(a)) * &recip(jp(b)))),
    ];
    prop::collection::vec(piece, 1..=3).prop_map(|ps| ps.iter().fold(HyperTerm::one(), |acc, p| acc.mul(p)))
}

#[test]
fn random_round_trips() {
    let mut runner = TestRunner::new(PropConfig { cases: 100, ..PropConfig::default() });
    runner
        .run(&(ratio_strategy(), kernel_strategy()), |(big_r, f)| {
            // F = R·f, so ΔF = f·(r·R(j+1) − R).
            let r = f.quotient(j());
            let diff = &(&r * &big_r.shift(j(), 1)) - &big_r;
            prop_assume!(!diff.is_zero());
            let d = f.scale(&diff);
            let cert = gosper(&d, j());
            prop_assert!(cert.is_some(), "no certificate for R = {}, f = {:?}", big_r, f);
            let cert = cert.unwrap();
            prop_assert!(check_certificate(&d, j(), &cert));
            Ok(())
        })
        .unwrap();
}
