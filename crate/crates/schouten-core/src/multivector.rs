//! Polynomial multivector fields: wedge product, Schouten bracket,
//! contraction, and generic rank.
//!
//! A grade-`p` multivector is stored as a map from `(direction set, monomial)`
//! to a nonzero scalar, where the direction set is a strictly increasing set
//! of `p` indices (the wedge of the corresponding coordinate directions).
//! Sign normalization happens on construction, and the `BTreeMap` storage
//! fixes a deterministic term order.
//!
//! The Schouten bracket is computed by a bidifferential expansion over "odd"
//! direction variables. Writing `θ∂_k` for the (left) odd derivative that
//! strips the `k`-th direction and `x∂_k` for the coefficient-wise partial
//! derivative, the bracket of a `p`-vector `A` and a `q`-vector `B` is
//!
//! ```text
//! [A, B] = (-1)^(p-1) Σ_k θ∂_k(A) ∧ x∂_k(B)  -  (-1)^(p(q-1)) Σ_k θ∂_k(B) ∧ x∂_k(A)
//! ```
//!
//! The normative contract is not this formula but the identities it
//! satisfies: `[∂_k, A] = x∂_k(A)`, both graded Leibniz rules, graded
//! antisymmetry, and the graded Jacobi identity. Those are enforced by the
//! test suite; the formula is just an efficient way to realize them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::poly::{Monomial, Polynomial};
use crate::scalar::Scalar;

/// Strictly increasing set of direction indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DirSet(Vec<u8>);

impl DirSet {
    pub fn empty() -> Self {
        DirSet(Vec::new())
    }

    pub fn single(k: usize) -> Self {
        DirSet(alloc::vec![k as u8])
    }

    /// Build from an already strictly increasing index list.
    pub fn new(indices: Vec<u8>) -> Result<Self, Error> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Structural(
                "direction indices must be strictly increasing".to_string(),
            ));
        }
        Ok(DirSet(indices))
    }

    /// Sort an arbitrary index list, tracking the permutation sign.
    /// `None` when an index repeats (the wedge term vanishes).
    pub fn from_unsorted(indices: &[u8]) -> Option<(Self, bool)> {
        let mut v = indices.to_vec();
        let mut negative = false;
        // insertion sort, counting transpositions
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                negative = !negative;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((DirSet(v), negative))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[u8] {
        &self.0
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0.binary_search(&(k as u8)).is_ok()
    }

    /// Remove index `k`, returning the reduced set and the sign `(-1)^pos`
    /// of the left odd derivative. `None` when `k` is absent.
    pub fn strip(&self, k: usize) -> Option<(DirSet, bool)> {
        let pos = self.0.binary_search(&(k as u8)).ok()?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some((DirSet(v), pos % 2 == 1))
    }

    /// Disjoint merge with the wedge sign; `None` when the sets intersect.
    pub fn merge(&self, other: &DirSet) -> Option<(DirSet, bool)> {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let mut inversions = 0usize;
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                core::cmp::Ordering::Equal => return None,
                core::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    // other.0[j] jumps over the remaining self entries
                    inversions += self.0.len() - i;
                    out.push(other.0[j]);
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Some((DirSet(out), inversions % 2 == 1))
    }
}

/// A polynomial multivector field of fixed grade.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiVector {
    vars: usize,
    grade: usize,
    terms: BTreeMap<(DirSet, Monomial), Scalar>,
}

impl MultiVector {
    pub fn zero(vars: usize, grade: usize) -> Self {
        MultiVector {
            vars,
            grade,
            terms: BTreeMap::new(),
        }
    }

    /// Grade-0 multivector from a polynomial.
    pub fn from_polynomial(p: &Polynomial) -> Self {
        let mut mv = MultiVector::zero(p.vars(), 0);
        for (m, c) in p.iter_terms() {
            mv.add_term(DirSet::empty(), m.clone(), c.clone());
        }
        mv
    }

    /// The coordinate direction `∂_k`.
    pub fn direction(vars: usize, k: usize) -> Self {
        let mut mv = MultiVector::zero(vars, 1);
        mv.add_term(DirSet::single(k), Monomial::one(vars), Scalar::one());
        mv
    }

    /// Single term `c · x^mono · ∂_dirs`; `dirs` may be unsorted (the sign is
    /// normalized) and a repeated index yields zero.
    pub fn term(vars: usize, dirs: &[u8], mono: Monomial, c: Scalar) -> Result<Self, Error> {
        if mono.vars() != vars {
            return Err(Error::VarMismatch {
                expected: vars,
                found: mono.vars(),
            });
        }
        if dirs.iter().any(|&d| usize::from(d) >= vars) {
            return Err(Error::Structural(format!(
                "direction index out of range for {vars} variables"
            )));
        }
        let mut mv = MultiVector::zero(vars, dirs.len());
        if let Some((ds, neg)) = DirSet::from_unsorted(dirs) {
            mv.add_term(ds, mono, if neg { c.neg() } else { c });
        }
        Ok(mv)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn grade(&self) -> usize {
        self.grade
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

    pub fn iter_terms(&self) -> impl Iterator<Item = (&DirSet, &Monomial, &Scalar)> {
        self.terms.iter().map(|((d, m), c)| (d, m, c))
    }

    pub fn coeff(&self, dirs: &DirSet, mono: &Monomial) -> Scalar {
        self.terms
            .get(&(dirs.clone(), mono.clone()))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Largest coefficient degree, `None` when zero.
    pub fn coeff_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(_, m)| m.degree()).max()
    }

    pub fn add_term(&mut self, dirs: DirSet, mono: Monomial, c: Scalar) {
        debug_assert_eq!(dirs.len(), self.grade);
        debug_assert_eq!(mono.vars(), self.vars);
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry((dirs, mono)) {
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

    fn accumulate(&mut self, other: &MultiVector, negate: bool) {
        debug_assert_eq!(self.vars, other.vars);
        debug_assert!(other.is_zero() || other.grade == self.grade);
        for ((d, m), c) in &other.terms {
            self.add_term(d.clone(), m.clone(), if negate { c.neg() } else { c.clone() });
        }
    }

    /// Sum; grades must agree unless one side is zero.
    pub fn try_add(&self, other: &MultiVector) -> Result<MultiVector, Error> {
        if self.vars != other.vars {
            return Err(Error::VarMismatch {
                expected: self.vars,
                found: other.vars,
            });
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.grade != other.grade {
            return Err(Error::GradeMismatch {
                expected: self.grade,
                found: other.grade,
            });
        }
        let mut out = self.clone();
        out.accumulate(other, false);
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiVector) -> Result<MultiVector, Error> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> MultiVector {
        MultiVector {
            vars: self.vars,
            grade: self.grade,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> MultiVector {
        if c.is_zero() {
            return MultiVector::zero(self.vars, self.grade);
        }
        MultiVector {
            vars: self.vars,
            grade: self.grade,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.mul(c)))
                .collect(),
        }
    }

    pub fn scale_poly(&self, p: &Polynomial) -> MultiVector {
        let mut out = MultiVector::zero(self.vars, self.grade);
        for ((d, m), c) in &self.terms {
            for (pm, pc) in p.iter_terms() {
                out.add_term(d.clone(), m.mul(pm), c.mul(pc));
            }
        }
        out
    }

    /// Exterior (wedge) product. Grade-0 factors act as scalar functions.
    pub fn wedge(&self, other: &MultiVector) -> Result<MultiVector, Error> {
        if self.vars != other.vars {
            return Err(Error::VarMismatch {
                expected: self.vars,
                found: other.vars,
            });
        }
        Ok(self.wedge_unchecked(other))
    }

    fn wedge_unchecked(&self, other: &MultiVector) -> MultiVector {
        let mut out = MultiVector::zero(self.vars, self.grade + other.grade);
        for ((da, ma), ca) in &self.terms {
            for ((db, mb), cb) in &other.terms {
                if let Some((d, neg)) = da.merge(db) {
                    let c = ca.mul(cb);
                    out.add_term(d, ma.mul(mb), if neg { c.neg() } else { c });
                }
            }
        }
        out
    }

    /// Coefficient-wise partial derivative `x∂_k`; equals `[∂_k, self]`.
    pub fn x_partial(&self, k: usize) -> MultiVector {
        let mut out = MultiVector::zero(self.vars, self.grade);
        for ((d, m), c) in &self.terms {
            if let Some((q, e)) = m.div_var(k) {
                out.add_term(d.clone(), q, c.mul(&Scalar::from_int(i64::from(e))));
            }
        }
        out
    }

    /// Left odd derivative `θ∂_k`: strips the direction `k` with the sign of
    /// its position. Grade drops by one.
    pub fn theta_partial(&self, k: usize) -> MultiVector {
        let mut out = MultiVector::zero(self.vars, self.grade.saturating_sub(1));
        if self.grade == 0 {
            return out;
        }
        for ((d, m), c) in &self.terms {
            if let Some((rest, neg)) = d.strip(k) {
                out.add_term(rest, m.clone(), if neg { c.neg() } else { c.clone() });
            }
        }
        out
    }

    /// Schouten bracket of a `p`-vector with a `q`-vector, yielding a
    /// `(p + q - 1)`-vector. See the module docs for the convention.
    pub fn schouten(&self, other: &MultiVector) -> Result<MultiVector, Error> {
        if self.vars != other.vars {
            return Err(Error::VarMismatch {
                expected: self.vars,
                found: other.vars,
            });
        }
        let (p, q) = (self.grade, other.grade);
        let out_grade = (p + q).saturating_sub(1);
        let mut out = MultiVector::zero(self.vars, out_grade);
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        // (-1)^(p-1) on the first sum, -(-1)^(p(q-1)) on the second.
        let neg1 = p % 2 == 0;
        let neg2 = (p * (q + 1)) % 2 == 0;
        if p >= 1 {
            for k in 0..self.vars {
                let da = self.theta_partial(k);
                if da.is_zero() {
                    continue;
                }
                let db = other.x_partial(k);
                if db.is_zero() {
                    continue;
                }
                out.accumulate(&da.wedge_unchecked(&db), neg1);
            }
        }
        if q >= 1 {
            for k in 0..self.vars {
                let db = other.theta_partial(k);
                if db.is_zero() {
                    continue;
                }
                let da = self.x_partial(k);
                if da.is_zero() {
                    continue;
                }
                out.accumulate(&db.wedge_unchecked(&da), neg2);
            }
        }
        Ok(out)
    }

    /// The integrability residual `[Π, Π]` of a bivector field.
    pub fn integrability_residual(&self) -> Result<MultiVector, Error> {
        if self.grade != 2 {
            return Err(Error::GradeMismatch {
                expected: 2,
                found: self.grade,
            });
        }
        self.schouten(self)
    }

    /// Is this bivector a Poisson structure, i.e. `[Π, Π] = 0`?
    pub fn is_poisson(&self) -> Result<bool, Error> {
        Ok(self.integrability_residual()?.is_zero())
    }

    /// Contraction `⟨df, Π⟩` of a bivector with an exact differential:
    /// for `Π = Σ a_ij ∂_i ∧ ∂_j` this is `Σ a_ij (∂f/∂x_i ∂_j - ∂f/∂x_j ∂_i)`.
    pub fn contract_df(&self, f: &Polynomial) -> Result<MultiVector, Error> {
        if self.grade != 2 {
            return Err(Error::GradeMismatch {
                expected: 2,
                found: self.grade,
            });
        }
        if f.vars() != self.vars {
            return Err(Error::VarMismatch {
                expected: self.vars,
                found: f.vars(),
            });
        }
        let mut out = MultiVector::zero(self.vars, 1);
        for ((d, m), c) in &self.terms {
            let (i, j) = (usize::from(d.indices()[0]), usize::from(d.indices()[1]));
            let dfi = f.partial(i);
            for (pm, pc) in dfi.iter_terms() {
                out.add_term(DirSet::single(j), m.mul(pm), c.mul(pc));
            }
            let dfj = f.partial(j);
            for (pm, pc) in dfj.iter_terms() {
                out.add_term(DirSet::single(i), m.mul(pm), c.mul(pc).neg());
            }
        }
        Ok(out)
    }

    /// Generic rank `2r`, where `r` is the largest wedge power of the
    /// bivector that does not vanish identically.
    pub fn generic_rank(&self) -> Result<usize, Error> {
        if self.grade != 2 {
            return Err(Error::GradeMismatch {
                expected: 2,
                found: self.grade,
            });
        }
        if self.is_zero() {
            return Ok(0);
        }
        let mut power = self.clone();
        let mut r = 1;
        loop {
            let next = power.wedge_unchecked(self);
            if next.is_zero() {
                break;
            }
            power = next;
            r += 1;
        }
        Ok(2 * r)
    }

    /// Drop terms whose coefficient degree exceeds `d`.
    pub fn truncate_coeff_degree(&self, d: u32) -> MultiVector {
        MultiVector {
            vars: self.vars,
            grade: self.grade,
            terms: self
                .terms
                .iter()
                .filter(|((_, m), _)| m.degree() <= d)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keep only terms with coefficient degree exactly `d`.
    pub fn coeff_degree_part(&self, d: u32) -> MultiVector {
        MultiVector {
            vars: self.vars,
            grade: self.grade,
            terms: self
                .terms
                .iter()
                .filter(|((_, m), _)| m.degree() == d)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Split `self = Σ_j x_k^j · out[j]` where no `out[j]` depends on `x_k`.
    pub fn var_power_split(&self, k: usize) -> Vec<MultiVector> {
        let max_pow = self
            .terms
            .keys()
            .map(|(_, m)| u32::from(m.exp(k)))
            .max()
            .unwrap_or(0) as usize;
        let mut out = alloc::vec![MultiVector::zero(self.vars, self.grade); max_pow + 1];
        for ((d, m), c) in &self.terms {
            let e = usize::from(m.exp(k));
            let mut exps = m.exponents().to_vec();
            exps[k] = 0;
            out[e].add_term(d.clone(), Monomial::new(exps), c.clone());
        }
        out
    }

    /// Terms that do not involve the direction `∂_k`.
    pub fn without_dir(&self, k: usize) -> MultiVector {
        MultiVector {
            vars: self.vars,
            grade: self.grade,
            terms: self
                .terms
                .iter()
                .filter(|((d, _), _)| !d.contains(k))
                .map(|(key, c)| (key.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-embed into a larger ambient variable count.
    pub fn extend_vars(&self, vars: usize) -> MultiVector {
        debug_assert!(vars >= self.vars);
        MultiVector {
            vars,
            grade: self.grade,
            terms: self
                .terms
                .iter()
                .map(|((d, m), c)| ((d.clone(), m.extend_vars(vars)), c.clone()))
                .collect(),
        }
    }

    /// Generic substitution: replace `x_k` by `coeff_images[k]` inside
    /// coefficients and `∂_k` by the grade-1 field `dir_images[k]`. This is
    /// an algebra homomorphism for the wedge product, which is what makes
    /// chart restrictions and linear coordinate changes coset-safe.
    pub fn substitute(
        &self,
        vars_out: usize,
        coeff_images: &[Polynomial],
        dir_images: &[MultiVector],
    ) -> MultiVector {
        assert_eq!(coeff_images.len(), self.vars);
        assert_eq!(dir_images.len(), self.vars);
        let mut out = MultiVector::zero(vars_out, self.grade);
        for ((d, m), c) in &self.terms {
            let mut coeff = Polynomial::constant(vars_out, c.clone());
            for (k, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    coeff = coeff.mul(&coeff_images[k]).expect("consistent images");
                }
            }
            let mut acc = MultiVector::from_polynomial(&coeff);
            for &s in d.indices() {
                acc = acc.wedge_unchecked(&dir_images[usize::from(s)]);
                if acc.is_zero() {
                    break;
                }
            }
            if !acc.is_zero() {
                out.accumulate(&acc, false);
            }
        }
        // substitution may collapse everything; grade bookkeeping stays
        out.grade = self.grade;
        out
    }

    /// Exact linear change of coordinates `x = C x'`: coefficients transform
    /// by `x_i -> Σ_j C[i][j] x'_j` and directions by
    /// `∂_i -> Σ_j Cinv[j][i] ∂'_j`.
    pub fn linear_change(&self, c: &[Vec<Scalar>], cinv: &[Vec<Scalar>]) -> MultiVector {
        let m = self.vars;
        assert_eq!(c.len(), m);
        assert_eq!(cinv.len(), m);
        let coeff_images: Vec<Polynomial> = (0..m)
            .map(|i| {
                let mut p = Polynomial::zero(m);
                for (j, cij) in c[i].iter().enumerate() {
                    p = p.add(&Polynomial::var(m, j).scale(cij));
                }
                p
            })
            .collect();
        let dir_images: Vec<MultiVector> = (0..m)
            .map(|i| {
                let mut v = MultiVector::zero(m, 1);
                for (j, row) in cinv.iter().enumerate() {
                    v.add_term(DirSet::single(j), Monomial::one(m), row[i].clone());
                }
                v
            })
            .collect();
        self.substitute(m, &coeff_images, &dir_images)
    }
}

impl fmt::Display for MultiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, ((d, m), c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if m.degree() > 0 {
                write!(f, "*{m}")?;
            }
            if !d.is_empty() {
                write!(f, "*e[")?;
                for (i, s) in d.indices().iter().enumerate() {
                    if i > 0 {
                        write!(f, "^")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]")?;
            }
        }
        Ok(())
    }
}
