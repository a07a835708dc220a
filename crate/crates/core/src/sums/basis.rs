//! Reduction of S-sum polynomials to products of Lyndon-word sums.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::arith::{MRatFunc, Rational};
use crate::hyper::HyperTerm;

use super::algebra::{quasi_shuffle, weight, Letter, SumPoly, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BasisError {
    #[error("sum of weight {0} exceeds the cap {1}")]
    WeightAboveCap(u32, u32),
}

/// Basis sums kept and the replacements used for every other sum.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BasisReport {
    pub kept: Vec<Word>,
    pub eliminated: BTreeMap<Word, SumPoly>,
}

/// Strictly smaller than each of its proper rotations.
pub fn is_lyndon(w: &[Letter]) -> bool {
    if w.is_empty() {
        return false;
    }
    (1..w.len()).all(|k| {
        let mut rot = w[k..].to_vec();
        rot.extend_from_slice(&w[..k]);
        w < rot.as_slice()
    })
}

/// Nonincreasing factorization into Lyndon words.
pub fn lyndon_factors(w: &[Letter]) -> Vec<Word> {
    let mut out = Vec::new();
    let n = w.len();
    let mut k = 0;
    while k < n {
        let (mut i, mut j) = (k, k + 1);
        while j < n && w[i] <= w[j] {
            if w[i] < w[j] {
                i = k;
            } else {
                i += 1;
            }
            j += 1;
        }
        while k <= i {
            out.push(w[k..k + j - i].to_vec());
            k += j - i;
        }
    }
    out
}

/// `S_w` as a polynomial in Lyndon-word sums.
fn expand_word(w: &Word, memo: &mut BTreeMap<Word, SumPoly>) -> SumPoly {
    if is_lyndon(w) {
        return SumPoly::word(w.clone());
    }
    if let Some(p) = memo.get(w) {
        return p.clone();
    }
    let factors = lyndon_factors(w);
    let mut prod: BTreeMap<Word, i64> = BTreeMap::new();
    prod.insert(Vec::new(), 1);
    for f in &factors {
        let mut next = BTreeMap::new();
        for (u, cu) in &prod {
            for (v, cv) in quasi_shuffle(u, f) {
                *next.entry(v).or_insert(0) += cu * cv;
            }
        }
        next.retain(|_, c| *c != 0);
        prod = next;
    }
    let lead = *prod.get(w).expect("concatenation of the factors occurs in their product");
    let inv = HyperTerm::constant(Rational::new(1.into(), lead.into()));
    let mut out = SumPoly::monomial(&HyperTerm::one(), factors).scale_hyper(&inv);
    for (u, cu) in prod {
        if &u == w {
            continue;
        }
        debug_assert!(u.len() < w.len() || u < *w, "quasi-shuffle terms precede the word");
        let c = HyperTerm::constant(Rational::new((-cu).into(), lead.into()));
        out = out.add(&expand_word(&u, memo).scale_hyper(&c));
    }
    memo.insert(w.clone(), out.clone());
    out
}

/// Rewrites every sum as a polynomial in Lyndon-word sums of weight at most `cap`.
pub fn reduce_to_basis(p: &SumPoly, cap: u32) -> Result<(SumPoly, BasisReport), BasisError> {
    for w in p.words() {
        if weight(&w) > cap {
            return Err(BasisError::WeightAboveCap(weight(&w), cap));
        }
    }
    let mut memo = BTreeMap::new();
    let mut report = BasisReport::default();
    let mut out = SumPoly::zero();
    for ((k, s), c) in &p.terms {
        let mut acc = SumPoly::from_hyper(&HyperTerm::new(c.clone(), k.clone()));
        for w in s {
            let e = expand_word(w, &mut memo);
            if !is_lyndon(w) {
                report.eliminated.insert(w.clone(), e.clone());
            }
            acc = acc.mul(&e);
        }
        out = out.add(&acc);
    }
    report.kept = out.words();
    Ok((out, report))
}

/// Coefficients constant in every variable, for building test inputs.
pub fn constant_poly(terms: &[(i64, Vec<Word>)]) -> SumPoly {
    let mut out = SumPoly::zero();
    for (c, s) in terms {
        let h = HyperTerm::from_coeff(MRatFunc::constant(Rational::from_integer((*c).into())));
        out = out.add(&SumPoly::monomial(&h, s.clone()));
    }
    out
}
