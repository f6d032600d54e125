//! Finite-dimensional models of global multivector fields on projective
//! space.
//!
//! A global `p`-vector field on `P^n` is represented by a polynomial
//! `p`-vector in the `n+1` homogeneous variables with coefficient degree `p`
//! (twist 0), or a vector field with quadratic coefficients (twist 1, the
//! degree-one twisted tangent bundle of the base of a projection), modulo
//! the radial ideal: `R ∧ (lower-grade fields)` resp. `{linear · R}`, where
//! `R = Σ X_i ∂_i` is the radial field.
//!
//! The quotient is realized concretely: the ideal is echelonized once with
//! graded-lex pivoting, cosets get canonical representatives supported on
//! the non-pivot coordinates, and those coordinates are the canonical basis
//! in which all deformation operators become honest finite matrices.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::multivector::{DirSet, MultiVector};
use crate::poincare::EigenData;
use crate::poly::{Monomial, Polynomial};
use crate::sampling::{dirsets, monomials_of_degree, SplitMix64};
use crate::scalar::Scalar;

/// The radial (Euler) field `R = Σ X_i ∂_i` in `m` homogeneous variables.
pub fn radial_field(m: usize) -> MultiVector {
    let mut r = MultiVector::zero(m, 1);
    for i in 0..m {
        r.add_term(DirSet::single(i), Monomial::var(m, i), Scalar::one());
    }
    r
}

type SparseRow = Vec<(usize, Scalar)>;

/// Model of `H^0(P^n, Λ^p T P^n)` (twist 0) or `H^0(P^n, T P^n(1))`
/// (twist 1) with canonical coset representatives.
#[derive(Clone, Debug)]
pub struct SectionSpace {
    n: usize,
    grade: usize,
    twist: usize,
    coeff_degree: u32,
    terms: Vec<(DirSet, Monomial)>,
    index: BTreeMap<(DirSet, Monomial), usize>,
    /// Forward-echelon rows of the radial ideal, leading coefficient 1.
    rows: Vec<SparseRow>,
    /// Leading column -> row index.
    pivot_rows: BTreeMap<usize, usize>,
    /// Non-pivot columns, ascending: the canonical coordinate system.
    basis_cols: Vec<usize>,
}

impl SectionSpace {
    /// Build the space for `P^n`, grade `p`, twist 0 or 1.
    ///
    /// Twist 0 admits `1 <= p <= n+1`; the top case `p = n+1` collapses to
    /// the zero space (the radial ideal is everything), which is exactly the
    /// wedge-operator target on `P^3`. Twist 1 is the quadratic vector field
    /// space and requires `p = 1`.
    pub fn new(n: usize, p: usize, twist: usize) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::Capability(format!("ambient dimension {n} < 2")));
        }
        let coeff_degree = match (twist, p) {
            (0, _) if (1..=n + 1).contains(&p) => p as u32,
            (1, 1) => 2,
            _ => {
                return Err(Error::Capability(format!(
                    "unsupported section space: n={n}, p={p}, twist={twist}"
                )))
            }
        };
        let m = n + 1;
        let mut terms = Vec::new();
        for d in dirsets(m, p) {
            for mono in monomials_of_degree(m, coeff_degree) {
                terms.push((d.clone(), mono));
            }
        }
        let index: BTreeMap<(DirSet, Monomial), usize> = terms
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();
        let mut space = SectionSpace {
            n,
            grade: p,
            twist,
            coeff_degree,
            terms,
            index,
            rows: Vec::new(),
            pivot_rows: BTreeMap::new(),
            basis_cols: Vec::new(),
        };
        for gen in space.ideal_generators()? {
            let coords = space.to_coords(&gen)?;
            space.insert_ideal_row(coords);
        }
        let pivots = &space.pivot_rows;
        space.basis_cols = (0..space.terms.len())
            .filter(|c| !pivots.contains_key(c))
            .collect();
        Ok(space)
    }

    fn ideal_generators(&self) -> Result<Vec<MultiVector>, Error> {
        let m = self.n + 1;
        let r = radial_field(m);
        let mut gens = Vec::new();
        match self.twist {
            0 => {
                let p = self.grade;
                for d in dirsets(m, p - 1) {
                    for mono in monomials_of_degree(m, (p - 1) as u32) {
                        let mut tau = MultiVector::zero(m, p - 1);
                        tau.add_term(d.clone(), mono.clone(), Scalar::one());
                        let gen = r.wedge(&tau)?;
                        if !gen.is_zero() {
                            gens.push(gen);
                        }
                    }
                }
            }
            _ => {
                for g in 0..m {
                    let gen = r.scale_poly(&Polynomial::var(m, g));
                    gens.push(gen);
                }
            }
        }
        Ok(gens)
    }

    fn to_coords(&self, mv: &MultiVector) -> Result<BTreeMap<usize, Scalar>, Error> {
        let mut out = BTreeMap::new();
        for (d, mono, c) in mv.iter_terms() {
            let Some(&idx) = self.index.get(&(d.clone(), mono.clone())) else {
                return Err(Error::Structural(format!(
                    "term {mono}·e{:?} is not degree-{} grade-{}",
                    d.indices(),
                    self.coeff_degree,
                    self.grade
                )));
            };
            out.insert(idx, c.clone());
        }
        Ok(out)
    }

    fn sparse_to_multivector(&self, coords: &BTreeMap<usize, Scalar>) -> MultiVector {
        let m = self.n + 1;
        let mut mv = MultiVector::zero(m, self.grade);
        for (&i, c) in coords {
            let (d, mono) = &self.terms[i];
            mv.add_term(d.clone(), mono.clone(), c.clone());
        }
        mv
    }

    /// Reduce a sparse coordinate vector to its canonical representative:
    /// pivot coordinates are eliminated in ascending order.
    fn reduce_coords(&self, mut v: BTreeMap<usize, Scalar>) -> BTreeMap<usize, Scalar> {
        loop {
            let hit = v
                .iter()
                .find(|(c, _)| self.pivot_rows.contains_key(c))
                .map(|(&c, coeff)| (c, coeff.clone()));
            let Some((col, coeff)) = hit else { break };
            v.remove(&col);
            let row = &self.rows[self.pivot_rows[&col]];
            for (c, rv) in row.iter().skip(1) {
                let delta = coeff.mul(rv);
                let slot = v.entry(*c).or_insert_with(Scalar::zero);
                *slot = slot.sub(&delta);
                if slot.is_zero() {
                    v.remove(c);
                }
            }
        }
        v
    }

    fn insert_ideal_row(&mut self, coords: BTreeMap<usize, Scalar>) {
        let reduced = self.reduce_coords(coords);
        let Some((&lead, lead_coeff)) = reduced.iter().next() else {
            return;
        };
        let inv = lead_coeff.inv().expect("nonzero leading coefficient");
        let row: SparseRow = reduced.iter().map(|(&c, v)| (c, v.mul(&inv))).collect();
        self.pivot_rows.insert(lead, self.rows.len());
        self.rows.push(row);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn twist(&self) -> usize {
        self.twist
    }

    pub fn coeff_degree(&self) -> u32 {
        self.coeff_degree
    }

    /// Dimension of the global section space.
    pub fn dimension(&self) -> usize {
        self.basis_cols.len()
    }

    /// Rank of the radial ideal inside the full coefficient space.
    pub fn ideal_rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of raw `(direction set, monomial)` coefficients.
    pub fn coefficient_count(&self) -> usize {
        self.terms.len()
    }

    /// The `i`-th canonical basis section (a single monomial term).
    pub fn basis_section(&self, i: usize) -> GlobalSection {
        let col = self.basis_cols[i];
        let mut coords = BTreeMap::new();
        coords.insert(col, Scalar::one());
        GlobalSection {
            n: self.n,
            grade: self.grade,
            twist: self.twist,
            rep: self.sparse_to_multivector(&coords),
        }
    }

    /// Reduce a homogeneous multivector to its canonical coset
    /// representative. Representatives differing by an ideal element reduce
    /// identically.
    pub fn reduce(&self, mv: &MultiVector) -> Result<GlobalSection, Error> {
        let m = self.n + 1;
        if mv.vars() != m {
            return Err(Error::VarMismatch {
                expected: m,
                found: mv.vars(),
            });
        }
        if !mv.is_zero() && mv.grade() != self.grade {
            return Err(Error::GradeMismatch {
                expected: self.grade,
                found: mv.grade(),
            });
        }
        let coords = self.to_coords(mv)?;
        let reduced = self.reduce_coords(coords);
        Ok(GlobalSection {
            n: self.n,
            grade: self.grade,
            twist: self.twist,
            rep: self.sparse_to_multivector(&reduced),
        })
    }

    /// Dense canonical coordinates of a section of this space.
    pub fn coords(&self, s: &GlobalSection) -> Result<Vec<Scalar>, Error> {
        if (s.n, s.grade, s.twist) != (self.n, self.grade, self.twist) {
            return Err(Error::Structural(
                "section does not belong to this space".to_string(),
            ));
        }
        let sparse = self.to_coords(&s.rep)?;
        let mut out = vec![Scalar::zero(); self.basis_cols.len()];
        for (i, &col) in self.basis_cols.iter().enumerate() {
            if let Some(c) = sparse.get(&col) {
                out[i] = c.clone();
            }
        }
        // canonical representatives live entirely on basis columns
        debug_assert_eq!(
            sparse.len(),
            out.iter().filter(|c| !c.is_zero()).count()
        );
        Ok(out)
    }

    /// Section with the given dense canonical coordinates.
    pub fn section_from_coords(&self, coords: &[Scalar]) -> Result<GlobalSection, Error> {
        if coords.len() != self.basis_cols.len() {
            return Err(Error::Structural(format!(
                "expected {} coordinates, got {}",
                self.basis_cols.len(),
                coords.len()
            )));
        }
        let mut sparse = BTreeMap::new();
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                sparse.insert(self.basis_cols[i], c.clone());
            }
        }
        Ok(GlobalSection {
            n: self.n,
            grade: self.grade,
            twist: self.twist,
            rep: self.sparse_to_multivector(&sparse),
        })
    }
}

/// A global multivector field: a canonical coset representative together
/// with the parameters of its owning space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GlobalSection {
    n: usize,
    grade: usize,
    twist: usize,
    rep: MultiVector,
}

impl GlobalSection {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn twist(&self) -> usize {
        self.twist
    }

    /// The canonical homogeneous representative.
    pub fn rep(&self) -> &MultiVector {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }
}

/// Restrict a global section to an affine chart `X_chart != 0`.
///
/// Coordinates are `x_j = X_j / X_chart` for `j != chart`, in ascending
/// order of `j`. Directions substitute as `∂_j -> ∂_{x_j}` and
/// `∂_chart -> -Σ x_j ∂_{x_j}`; the radial field restricts to zero, so the
/// restriction is well defined on cosets.
pub fn chart_restrict(s: &GlobalSection, chart: usize) -> MultiVector {
    chart_restrict_mv(&s.rep, s.n + 1, chart)
}

pub(crate) fn chart_restrict_mv(rep: &MultiVector, m: usize, chart: usize) -> MultiVector {
    assert!(chart < m, "chart index in range");
    let n = m - 1;
    let aff = |i: usize| if i < chart { i } else { i - 1 };
    let coeff_images: Vec<Polynomial> = (0..m)
        .map(|i| {
            if i == chart {
                Polynomial::one(n)
            } else {
                Polynomial::var(n, aff(i))
            }
        })
        .collect();
    let dir_images: Vec<MultiVector> = (0..m)
        .map(|i| {
            if i == chart {
                let mut v = MultiVector::zero(n, 1);
                for j in 0..m {
                    if j == chart {
                        continue;
                    }
                    v.add_term(
                        DirSet::single(aff(j)),
                        Monomial::var(n, aff(j)),
                        Scalar::from_int(-1),
                    );
                }
                v
            } else {
                MultiVector::direction(n, aff(i))
            }
        })
        .collect();
    rep.substitute(n, &coeff_images, &dir_images)
}

/// The pull-back bivector on `P^n` of a twist-1 vector field `Y` on
/// `P^(n-1)`: the class of `∂_{X_n} ∧ Y`.
pub fn pullback_bivector(y: &GlobalSection) -> Result<GlobalSection, Error> {
    if y.grade != 1 || y.twist != 1 {
        return Err(Error::Structural(
            "pull-back expects a twist-1 vector field section".to_string(),
        ));
    }
    if y.is_zero() {
        return Err(Error::DegenerateInput(
            "pull-back of the zero field is degenerate".to_string(),
        ));
    }
    let n = y.n + 1;
    let m = n + 1;
    let space = SectionSpace::new(n, 2, 0)?;
    let y_ext = y.rep.extend_vars(m);
    let pi_rep = MultiVector::direction(m, n).wedge(&y_ext)?;
    space.reduce(&pi_rep)
}

/// Deterministic-from-seed quadratic vector field on `P^base_dim`
/// (a twist-1 section), with integer coefficients sampled uniformly from
/// `[-9, 9]`.
///
/// When `linear_part` is given (one eigenvalue per affine coordinate of the
/// standard chart), the sampled coefficients are adjusted so the affine
/// restriction is singular at the origin with linear part exactly
/// `diag(λ)`.
pub fn random_quadratic_field(
    base_dim: usize,
    seed: u64,
    linear_part: Option<&EigenData>,
) -> Result<GlobalSection, Error> {
    if base_dim < 2 {
        return Err(Error::Capability(format!(
            "base projective dimension {base_dim} < 2"
        )));
    }
    if let Some(l) = linear_part {
        if l.len() != base_dim {
            return Err(Error::Structural(format!(
                "eigenvalue tuple has length {}, expected {base_dim}",
                l.len()
            )));
        }
    }
    let m = base_dim + 1;
    let space = SectionSpace::new(base_dim, 1, 1)?;
    let quadratics = monomials_of_degree(m, 2);
    let mut rng = SplitMix64::new(seed);
    // components q[i] of Y = Σ q_i ∂_{X_i}, sampled in deterministic order
    let mut q: Vec<BTreeMap<Monomial, Scalar>> = Vec::with_capacity(m);
    for _ in 0..m {
        let mut comp = BTreeMap::new();
        for mono in &quadratics {
            let c = rng.int_in(-9, 9);
            if c != 0 {
                comp.insert(mono.clone(), Scalar::from_int(c));
            }
        }
        q.push(comp);
    }
    if let Some(lambda) = linear_part {
        // In the chart X_0 = 1 the affine field is
        //   Σ_{i>=1} (q_i(1,x) - x_i q_0(1,x)) ∂_i,
        // so the value at the origin is the X_0^2 coefficient of q_i and the
        // linear part is (X_0 X_j coefficient of q_i) - δ_ij (X_0^2
        // coefficient of q_0).
        let x0sq = Monomial::var(m, 0).mul(&Monomial::var(m, 0));
        let a0 = q[0].get(&x0sq).cloned().unwrap_or_else(Scalar::zero);
        for (i, comp) in q.iter_mut().enumerate().skip(1) {
            comp.remove(&x0sq);
            for j in 1..m {
                let x0xj = Monomial::var(m, 0).mul(&Monomial::var(m, j));
                if i == j {
                    let v = lambda.get(i - 1).add(&a0);
                    if v.is_zero() {
                        comp.remove(&x0xj);
                    } else {
                        comp.insert(x0xj, v);
                    }
                } else {
                    comp.remove(&x0xj);
                }
            }
        }
    }
    let mut rep = MultiVector::zero(m, 1);
    for (i, comp) in q.iter().enumerate() {
        for (mono, c) in comp {
            rep.add_term(DirSet::single(i), mono.clone(), c.clone());
        }
    }
    space.reduce(&rep)
}
