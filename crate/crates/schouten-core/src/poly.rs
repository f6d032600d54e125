//! Sparse multivariate polynomials over exact scalars.
//!
//! Terms are kept in a `BTreeMap` under the graded lexicographic order, so
//! every iteration, serialization and matrix assembly downstream is
//! deterministic.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::Error;
use crate::scalar::Scalar;

/// A monomial: an exponent vector over a fixed ambient variable count, with
/// the total degree cached.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    degree: u32,
    exps: Vec<u16>,
}

impl Monomial {
    pub fn new(exps: Vec<u16>) -> Self {
        let degree = exps.iter().map(|&e| u32::from(e)).sum();
        Monomial { degree, exps }
    }

    /// The constant monomial `1` in `vars` variables.
    pub fn one(vars: usize) -> Self {
        Monomial::new(vec![0; vars])
    }

    /// The variable `x_k`.
    pub fn var(vars: usize, k: usize) -> Self {
        let mut exps = vec![0u16; vars];
        exps[k] = 1;
        Monomial::new(exps)
    }

    pub fn vars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exp(&self, k: usize) -> u16 {
        self.exps[k]
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.vars(), other.vars());
        Monomial::new(
            self.exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Divide by `x_k`, returning the quotient and the removed exponent.
    /// `None` when the monomial does not contain `x_k`.
    pub fn div_var(&self, k: usize) -> Option<(Monomial, u16)> {
        let e = self.exps[k];
        if e == 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        exps[k] -= 1;
        Some((Monomial::new(exps), e))
    }

    /// Re-embed into a larger ambient variable count (new variables get
    /// exponent zero).
    pub fn extend_vars(&self, vars: usize) -> Monomial {
        debug_assert!(vars >= self.vars());
        let mut exps = self.exps.clone();
        exps.resize(vars, 0);
        Monomial::new(exps)
    }
}

// Graded lexicographic order: total degree first, then the exponent vector.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (k, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{k}")?;
            } else {
                write!(f, "x{k}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A sparse polynomial: monomial -> nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    vars: usize,
    terms: alloc::collections::BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(vars: usize) -> Self {
        Polynomial {
            vars,
            terms: Default::default(),
        }
    }

    pub fn constant(vars: usize, c: Scalar) -> Self {
        let mut p = Polynomial::zero(vars);
        p.add_term(Monomial::one(vars), c);
        p
    }

    pub fn one(vars: usize) -> Self {
        Polynomial::constant(vars, Scalar::one())
    }

    pub fn var(vars: usize, k: usize) -> Self {
        let mut p = Polynomial::zero(vars);
        p.add_term(Monomial::var(vars, k), Scalar::one());
        p
    }

    /// Normalize a list of `(monomial, coefficient)` pairs into a polynomial:
    /// coefficients of equal monomials are summed and zero terms dropped.
    pub fn from_terms(
        vars: usize,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Result<Self, Error> {
        let mut p = Polynomial::zero(vars);
        for (m, c) in terms {
            if m.vars() != vars {
                return Err(Error::VarMismatch {
                    expected: vars,
                    found: m.vars(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter_terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.vars);
        }
        Polynomial {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.mul(c)))
                .collect(),
        }
    }

    /// Exact product.
    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, Error> {
        if self.vars != other.vars {
            return Err(Error::VarMismatch {
                expected: self.vars,
                found: other.vars,
            });
        }
        let mut out = Polynomial::zero(self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to `x_k`.
    pub fn partial(&self, k: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.vars);
        for (m, c) in &self.terms {
            if let Some((q, e)) = m.div_var(k) {
                out.add_term(q, c.mul(&Scalar::from_int(i64::from(e))));
            }
        }
        out
    }

    /// Drop all terms of total degree strictly above `d`.
    pub fn truncate(&self, d: u32) -> Polynomial {
        Polynomial {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn extend_vars(&self, vars: usize) -> Polynomial {
        Polynomial {
            vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.extend_vars(vars), c.clone()))
                .collect(),
        }
    }

    /// Substitute `images[k]` for `x_k`, truncating at total degree `trunc`
    /// when given. All images must share an ambient variable count.
    pub fn substitute(&self, images: &[Polynomial], trunc: Option<u32>) -> Polynomial {
        assert_eq!(images.len(), self.vars, "one image per variable");
        let out_vars = images.first().map_or(self.vars, Polynomial::vars);
        let clip = |p: Polynomial| match trunc {
            Some(d) => p.truncate(d),
            None => p,
        };
        let mut out = Polynomial::zero(out_vars);
        for (m, c) in &self.terms {
            let mut acc = Polynomial::constant(out_vars, c.clone());
            for (k, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    acc = clip(acc.mul(&images[k]).expect("image vars consistent"));
                }
            }
            out = out.add(&acc);
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Leading (highest) term first.
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            if m.degree() == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(vars: usize, k: usize) -> Polynomial {
        Polynomial::var(vars, k)
    }

    #[test]
    fn normalize_cancels_and_merges() {
        let m = Monomial::var(2, 0);
        let p = Polynomial::from_terms(
            2,
            [(m.clone(), Scalar::one()), (m.clone(), Scalar::from_int(-1))],
        )
        .unwrap();
        assert!(p.is_zero());

        let sq = Monomial::new(vec![2, 0]);
        let q = Polynomial::from_terms(2, [(sq.clone(), Scalar::one()), (sq, Scalar::one())])
            .unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q.coeff(&Monomial::new(vec![2, 0])), Scalar::from_int(2));

        let id = Polynomial::from_terms(
            2,
            [(Monomial::new(vec![1, 1]), Scalar::from_ratio(2, 3))],
        )
        .unwrap();
        assert_eq!(id.coeff(&Monomial::new(vec![1, 1])), Scalar::from_ratio(2, 3));
    }

    #[test]
    fn normalize_rejects_var_mismatch() {
        let err = Polynomial::from_terms(2, [(Monomial::one(3), Scalar::one())]).unwrap_err();
        assert!(matches!(err, Error::VarMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn product_examples() {
        // (x1 + x2)(x1 - x2) = x1^2 - x2^2, in the 0-based names x0, x1.
        let p = x(3, 0).add(&x(3, 1));
        let q = x(3, 0).sub(&x(3, 1));
        let pq = p.mul(&q).unwrap();
        let expect = Polynomial::from_terms(
            3,
            [
                (Monomial::new(vec![2, 0, 0]), Scalar::one()),
                (Monomial::new(vec![0, 2, 0]), Scalar::from_int(-1)),
            ],
        )
        .unwrap();
        assert_eq!(pq, expect);

        assert!(p.mul(&Polynomial::zero(3)).unwrap().is_zero());

        let xy = x(3, 0).mul(&x(3, 1)).unwrap();
        let xyz = xy.mul(&x(3, 2)).unwrap();
        assert_eq!(xyz.degree(), Some(3));
    }

    #[test]
    fn partial_examples() {
        let x0sq = x(3, 0).mul(&x(3, 0)).unwrap();
        assert_eq!(x0sq.partial(0), x(3, 0).scale(&Scalar::from_int(2)));

        let x0x1 = x(3, 0).mul(&x(3, 1)).unwrap();
        assert!(x0x1.partial(2).is_zero());

        let x0sq_x1 = x0sq.mul(&x(3, 1)).unwrap();
        assert_eq!(x0sq_x1.partial(1), x0sq);
    }

    #[test]
    fn substitution_truncates() {
        // x0^2 with x0 -> x0 + x1^2, truncated at degree 2.
        let img = x(2, 0).add(&x(2, 1).mul(&x(2, 1)).unwrap());
        let p = x(2, 0).mul(&x(2, 0)).unwrap();
        let s = p.substitute(&[img, x(2, 1)], Some(2));
        assert_eq!(s, x(2, 0).mul(&x(2, 0)).unwrap());
    }
}
