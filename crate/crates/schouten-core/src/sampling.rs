//! Deterministic sampling.
//!
//! Everything "random" in the crate is driven by [`SplitMix64`], a tiny PRNG
//! with a documented update rule, so that a seed fully determines an
//! instance and every report is reproducible.

use alloc::vec::Vec;

use crate::multivector::{DirSet, MultiVector};
use crate::poly::{Monomial, Polynomial};
use crate::scalar::Scalar;

/// SplitMix64. State update: `s += 0x9E3779B97F4A7C15`; output mixes the new
/// state with `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
/// z *= 0x94D049BB133111EB; z ^= z >> 31`.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish integer in `lo..=hi` (inclusive).
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// Random small rational with numerator in `[-9, 9]` and denominator in
    /// `[1, 4]`.
    pub fn small_rational(&mut self) -> Scalar {
        let num = self.int_in(-9, 9);
        let den = self.int_in(1, 4);
        Scalar::from_ratio(num, den)
    }
}

/// All monomials in `vars` variables of total degree exactly `degree`, in
/// ascending graded-lex order.
pub fn monomials_of_degree(vars: usize, degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = alloc::vec![0u16; vars];
    fn rec(out: &mut Vec<Monomial>, exps: &mut Vec<u16>, pos: usize, left: u32) {
        if pos + 1 == exps.len() {
            exps[pos] = left as u16;
            out.push(Monomial::new(exps.clone()));
            return;
        }
        for e in 0..=left {
            exps[pos] = e as u16;
            rec(out, exps, pos + 1, left - e);
        }
    }
    if vars == 0 {
        if degree == 0 {
            out.push(Monomial::new(Vec::new()));
        }
        return out;
    }
    rec(&mut out, &mut exps, 0, degree);
    out.sort();
    out
}

/// All monomials of total degree `<= degree`.
pub fn monomials_up_to_degree(vars: usize, degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=degree {
        out.extend(monomials_of_degree(vars, d));
    }
    out
}

/// All strictly increasing index sets of size `k` over `0..vars`.
pub fn dirsets(vars: usize, k: usize) -> Vec<DirSet> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = Vec::new();
    fn rec(out: &mut Vec<DirSet>, cur: &mut Vec<u8>, start: usize, vars: usize, k: usize) {
        if cur.len() == k {
            out.push(DirSet::new(cur.clone()).expect("strictly increasing"));
            return;
        }
        for i in start..vars {
            cur.push(i as u8);
            rec(out, cur, i + 1, vars, k);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, 0, vars, k);
    out
}

/// Deterministic random polynomial: `terms` monomials of degree `<= degree`
/// with small rational coefficients (duplicates merge, so the result may be
/// shorter).
pub fn random_polynomial(rng: &mut SplitMix64, vars: usize, degree: u32, terms: usize) -> Polynomial {
    let pool = monomials_up_to_degree(vars, degree);
    let mut p = Polynomial::zero(vars);
    for _ in 0..terms {
        let m = pool[(rng.next_u64() as usize) % pool.len()].clone();
        p = p
            .add(&Polynomial::from_terms(vars, [(m, rng.small_rational())]).expect("same vars"));
    }
    p
}

/// Deterministic random multivector of the given grade with coefficient
/// degree `<= degree`.
pub fn random_multivector(
    rng: &mut SplitMix64,
    vars: usize,
    grade: usize,
    degree: u32,
    terms: usize,
) -> MultiVector {
    let dirs = dirsets(vars, grade);
    let pool = monomials_up_to_degree(vars, degree);
    let mut mv = MultiVector::zero(vars, grade);
    if dirs.is_empty() {
        return mv;
    }
    for _ in 0..terms {
        let d = dirs[(rng.next_u64() as usize) % dirs.len()].clone();
        let m = pool[(rng.next_u64() as usize) % pool.len()].clone();
        mv.add_term(d, m, rng.small_rational());
    }
    mv
}
