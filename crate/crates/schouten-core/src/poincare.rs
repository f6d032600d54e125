//! Local normal-form machinery around a diagonalizable singularity.
//!
//! For a diagonal vector field `Y = Σ λ_i y_i ∂_i` the adjoint operators
//! `ad_Y = [Y, ·]` act diagonally on the monomial bases of vector and
//! bivector fields, with eigenvalues `⟨λ, I⟩ - λ_s` and
//! `⟨λ, I⟩ - λ_i - λ_j`. Bounded non-resonance certificates make every
//! kernel and homological solve here exact and decidable: absolute
//! non-resonance is not decidable over the rationals (integer relations
//! always exist in dimension ≥ 2), but every computation below only consults
//! eigenvalue combinations of bounded order, and the bound is always carried
//! in the certificate.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::Error;
use crate::matrix::{self, ExactMatrix};
use crate::multivector::{DirSet, MultiVector};
use crate::poly::{Monomial, Polynomial};
use crate::sampling::{dirsets, monomials_up_to_degree};
use crate::scalar::Scalar;

/// Default truncation degree for germ-level computations.
pub const DEFAULT_TRUNCATION_DEGREE: u32 = 4;
/// Default order for formal linearization.
pub const DEFAULT_LINEARIZATION_ORDER: u32 = 4;

/// An eigenvalue tuple `λ = (λ_1, …, λ_m)`, rational or Gaussian rational.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EigenData(Vec<Scalar>);

impl EigenData {
    pub fn new(values: Vec<Scalar>) -> Result<Self, Error> {
        if values.len() < 2 {
            return Err(Error::Structural(
                "eigenvalue tuple needs at least two entries".to_string(),
            ));
        }
        Ok(EigenData(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Scalar] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.0[i]
    }

    /// `⟨λ, a⟩` for an integer vector.
    pub fn pair_int(&self, a: &[i64]) -> Scalar {
        let mut acc = Scalar::zero();
        for (l, &ai) in self.0.iter().zip(a) {
            if ai != 0 {
                acc = acc.add(&l.mul(&Scalar::from_int(ai)));
            }
        }
        acc
    }

    /// `⟨λ, I⟩` for a monomial exponent vector.
    pub fn pair_monomial(&self, m: &Monomial) -> Scalar {
        let mut acc = Scalar::zero();
        for (l, &e) in self.0.iter().zip(m.exponents()) {
            if e != 0 {
                acc = acc.add(&l.mul(&Scalar::from_int(i64::from(e))));
            }
        }
        acc
    }
}

impl fmt::Display for EigenData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Outcome of a bounded resonance search: either "no integer relation of
/// order ≤ B", or a witness vector `a` with `Σ a_i λ_i = 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ResonanceCertificate {
    pub order_bound: u32,
    pub witness: Option<Vec<i64>>,
}

impl ResonanceCertificate {
    pub fn is_nonresonant(&self) -> bool {
        self.witness.is_none()
    }
}

impl fmt::Display for ResonanceCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "non-resonant to order {}", self.order_bound),
            Some(a) => {
                let order: i64 = a.iter().map(|x| x.abs()).sum();
                write!(f, "resonant at order {order} with witness {a:?}")
            }
        }
    }
}

/// Exhaustive search for a nonzero integer relation `Σ a_i λ_i = 0` with
/// `Σ |a_i| ≤ order`. Witnesses are canonical (first nonzero entry positive)
/// and the search runs in ascending order, then lexicographically, so the
/// reported witness is the smallest one.
pub fn nonresonant_up_to_order(lambda: &EigenData, order: u32) -> ResonanceCertificate {
    let m = lambda.len();
    fn search(
        lambda: &EigenData,
        a: &mut Vec<i64>,
        pos: usize,
        remaining: i64,
        started: bool,
    ) -> Option<Vec<i64>> {
        let m = lambda.len();
        if pos == m {
            if remaining == 0 && started && lambda.pair_int(a).is_zero() {
                return Some(a.clone());
            }
            return None;
        }
        let lo = if started { -remaining } else { 0 };
        for v in lo..=remaining {
            a[pos] = v;
            if let Some(w) = search(lambda, a, pos + 1, remaining - v.abs(), started || v != 0)
            {
                return Some(w);
            }
        }
        a[pos] = 0;
        None
    }
    for s in 1..=i64::from(order) {
        let mut a = vec![0i64; m];
        if let Some(witness) = search(lambda, &mut a, 0, s, false) {
            return ResonanceCertificate {
                order_bound: order,
                witness: Some(witness),
            };
        }
    }
    ResonanceCertificate {
        order_bound: order,
        witness: None,
    }
}

type Point = (BigRational, BigRational);

fn cross(p: &Point, q: &Point) -> BigRational {
    &p.0 * &q.1 - &p.1 * &q.0
}

fn dot(p: &Point, q: &Point) -> BigRational {
    &p.0 * &q.0 + &p.1 * &q.1
}

fn sub(p: &Point, q: &Point) -> Point {
    (&p.0 - &q.0, &p.1 - &q.1)
}

fn origin_in_hull(points: &[Point]) -> bool {
    use num_traits::Signed;
    let zero = BigRational::zero();
    if points.iter().any(|p| p.0.is_zero() && p.1.is_zero()) {
        return true;
    }
    // Carathéodory in the plane: membership reduces to segments and
    // non-degenerate triangles, decided by exact orientation predicates.
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            if cross(p, q).is_zero() && dot(p, q) <= zero {
                return true;
            }
        }
    }
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (&points[i], &points[j], &points[k]);
                let area = cross(&sub(b, a), &sub(c, a));
                if area.is_zero() {
                    continue; // collinear: segment checks already decided it
                }
                let neg = |p: &Point| (-p.0.clone(), -p.1.clone());
                let s1 = cross(&sub(b, a), &neg(a));
                let s2 = cross(&sub(c, b), &neg(b));
                let s3 = cross(&sub(a, c), &neg(c));
                let all_nonneg = !s1.is_negative() && !s2.is_negative() && !s3.is_negative();
                let all_nonpos = !s1.is_positive() && !s2.is_positive() && !s3.is_positive();
                if all_nonneg || all_nonpos {
                    return true;
                }
            }
        }
    }
    false
}

/// Is `λ` in the Poincaré half of the domain condition, i.e. is the origin
/// outside the convex hull of the eigenvalues viewed as exact points of the
/// plane?
pub fn in_poincare_domain(lambda: &EigenData) -> bool {
    let points: Vec<Point> = lambda.values().iter().map(|s| (s.re(), s.im())).collect();
    !origin_in_hull(&points)
}

/// The diagonal vector field `Y = Σ λ_i y_i ∂_i`.
pub fn diagonal_field(lambda: &EigenData) -> MultiVector {
    let m = lambda.len();
    let mut y = MultiVector::zero(m, 1);
    for (i, l) in lambda.values().iter().enumerate() {
        y.add_term(DirSet::single(i), Monomial::var(m, i), l.clone());
    }
    y
}

/// Eigenvalue of `ad_Y` on the monomial term `y^I ∂_dirs`:
/// `⟨λ, I⟩ - Σ_{s ∈ dirs} λ_s`.
pub fn ad_eigenvalue(lambda: &EigenData, dirs: &DirSet, mono: &Monomial) -> Scalar {
    let mut acc = lambda.pair_monomial(mono);
    for &s in dirs.indices() {
        acc = acc.sub(lambda.get(usize::from(s)));
    }
    acc
}

/// Apply `ad_Y = [Y, ·]` for the diagonal field, using the diagonal action
/// on the monomial basis. Supports grades 1 and 2; agrees with the generic
/// Schouten bracket (enforced by tests).
pub fn ad_diagonal(lambda: &EigenData, a: &MultiVector) -> Result<MultiVector, Error> {
    if a.vars() != lambda.len() {
        return Err(Error::VarMismatch {
            expected: lambda.len(),
            found: a.vars(),
        });
    }
    if !(1..=2).contains(&a.grade()) {
        return Err(Error::Capability(format!(
            "diagonal adjoint is defined on grades 1 and 2, got {}",
            a.grade()
        )));
    }
    let mut out = MultiVector::zero(a.vars(), a.grade());
    for (d, m, c) in a.iter_terms() {
        let eig = ad_eigenvalue(lambda, d, m);
        out.add_term(d.clone(), m.clone(), c.mul(&eig));
    }
    Ok(out)
}

/// Exact kernel of `ad_Y` on the degree-`≤ d` truncation in the given grade.
///
/// Requires `λ` to be certified non-resonant to order `d + 2` first; under
/// that certificate the kernel is exactly the diagonal monomials
/// (`y_i ∂_i` at grade 1, `y_i y_j ∂_i∧∂_j` at grade 2), which is verified
/// against the enumerated spectrum rather than assumed.
pub fn ad_diagonal_kernel(
    lambda: &EigenData,
    grade: usize,
    d: u32,
) -> Result<Vec<MultiVector>, Error> {
    let cert = nonresonant_up_to_order(lambda, d + 2);
    if !cert.is_nonresonant() {
        return Err(Error::Resonance(cert));
    }
    if !(1..=2).contains(&grade) {
        return Err(Error::Capability(format!(
            "diagonal adjoint kernel is defined on grades 1 and 2, got {grade}"
        )));
    }
    let m = lambda.len();
    let mut kernel = Vec::new();
    let mut image_count = 0usize;
    let mut total = 0usize;
    for dirs in dirsets(m, grade) {
        for mono in monomials_up_to_degree(m, d) {
            total += 1;
            let term = {
                let mut t = MultiVector::zero(m, grade);
                t.add_term(dirs.clone(), mono.clone(), Scalar::one());
                t
            };
            let eig = ad_eigenvalue(lambda, &dirs, &mono);
            // each basis monomial must be an exact eigenvector
            let applied = ad_diagonal(lambda, &term)?;
            if applied != term.scale(&eig) {
                return Err(Error::Structural(
                    "diagonal adjoint is not acting diagonally".to_string(),
                ));
            }
            if eig.is_zero() {
                let expected_diagonal = match grade {
                    1 => mono == Monomial::var(m, usize::from(dirs.indices()[0])),
                    _ => {
                        let (i, j) = (
                            usize::from(dirs.indices()[0]),
                            usize::from(dirs.indices()[1]),
                        );
                        mono == Monomial::var(m, i).mul(&Monomial::var(m, j))
                    }
                };
                if !expected_diagonal {
                    // cannot happen under the certificate; keep it honest
                    return Err(Error::Structural(format!(
                        "unexpected kernel element {term} despite certificate"
                    )));
                }
                kernel.push(term);
            } else {
                image_count += 1;
            }
        }
    }
    debug_assert_eq!(kernel.len() + image_count, total);
    Ok(kernel)
}

/// Solve `ad_Y(X) = gamma` monomial-wise by exact eigenvalue division.
/// Fails when `gamma` has a component along a kernel direction, listing the
/// offending monomials.
pub fn solve_ad_diagonal(lambda: &EigenData, gamma: &MultiVector) -> Result<MultiVector, Error> {
    if gamma.is_zero() {
        return Ok(gamma.clone());
    }
    if !(1..=2).contains(&gamma.grade()) {
        return Err(Error::Capability(format!(
            "homological solve is defined on grades 1 and 2, got {}",
            gamma.grade()
        )));
    }
    let mut offending: Vec<String> = Vec::new();
    let mut out = MultiVector::zero(gamma.vars(), gamma.grade());
    for (d, m, c) in gamma.iter_terms() {
        let eig = ad_eigenvalue(lambda, d, m);
        if eig.is_zero() {
            offending.push(format!("{m}·e{:?}", d.indices()));
        } else {
            out.add_term(d.clone(), m.clone(), c.div(&eig));
        }
    }
    if !offending.is_empty() {
        return Err(Error::NotInImage {
            monomials: offending.join(", "),
        });
    }
    Ok(out)
}

/// Division by a vector field in the exterior algebra: given `W` with
/// `W ∧ Y = 0`, find `V` of coefficient degree ≤ `d` with `W = Y ∧ V`, as an
/// exact linear solve on coefficients. The solution is canonical: unknowns
/// are ordered by `(direction, monomial)` and free variables are zero.
pub fn wedge_divide(y: &MultiVector, w: &MultiVector, d: u32) -> Result<MultiVector, Error> {
    if y.grade() != 1 {
        return Err(Error::GradeMismatch {
            expected: 1,
            found: y.grade(),
        });
    }
    if w.vars() != y.vars() {
        return Err(Error::VarMismatch {
            expected: y.vars(),
            found: w.vars(),
        });
    }
    if !w.is_zero() && w.grade() != 2 {
        return Err(Error::GradeMismatch {
            expected: 2,
            found: w.grade(),
        });
    }
    if !w.wedge(y)?.is_zero() {
        return Err(Error::Hypothesis("W ∧ Y ≠ 0, nothing to divide".to_string()));
    }
    let m = y.vars();
    if w.is_zero() {
        return Ok(MultiVector::zero(m, 1));
    }
    // Unknown basis for V and its images under Y ∧ (·).
    let mut unknowns: Vec<(DirSet, Monomial)> = Vec::new();
    for dir in dirsets(m, 1) {
        for mono in monomials_up_to_degree(m, d) {
            unknowns.push((dir.clone(), mono));
        }
    }
    let mut row_index: BTreeMap<(DirSet, Monomial), usize> = BTreeMap::new();
    let mut columns: Vec<Vec<((DirSet, Monomial), Scalar)>> = Vec::new();
    for (dir, mono) in &unknowns {
        let mut basis_vec = MultiVector::zero(m, 1);
        basis_vec.add_term(dir.clone(), mono.clone(), Scalar::one());
        let img = y.wedge(&basis_vec)?;
        let mut col = Vec::new();
        for (dd, mm, cc) in img.iter_terms() {
            let key = (dd.clone(), mm.clone());
            let next = row_index.len();
            row_index.entry(key.clone()).or_insert(next);
            col.push((key, cc.clone()));
        }
        columns.push(col);
    }
    for (dd, mm, _) in w.iter_terms() {
        let key = (dd.clone(), mm.clone());
        let next = row_index.len();
        row_index.entry(key).or_insert(next);
    }
    let rows = row_index.len();
    let mut entries = Vec::new();
    for (cidx, col) in columns.iter().enumerate() {
        for (key, val) in col {
            entries.push((row_index[key], cidx, val.clone()));
        }
    }
    let a = ExactMatrix::from_entries(rows, unknowns.len(), entries)?;
    let mut rhs = vec![Scalar::zero(); rows];
    for (dd, mm, cc) in w.iter_terms() {
        rhs[row_index[&(dd.clone(), mm.clone())]] = cc.clone();
    }
    let sol = matrix::solve_particular(&a, &rhs).ok_or_else(|| {
        Error::DivisionFailed(format!("no vector field of degree ≤ {d} divides the input"))
    })?;
    let mut v = MultiVector::zero(m, 1);
    for (x, (dir, mono)) in sol.into_iter().zip(unknowns) {
        if !x.is_zero() {
            v.add_term(dir, mono, x);
        }
    }
    debug_assert!(y.wedge(&v).unwrap() == w.clone());
    Ok(v)
}

/// Constructive decomposition of a bivector against the diagonal field:
/// `alpha0 = Y ∧ Z + Σ a_ij y_i y_j ∂_i∧∂_j + residual`, with the residual
/// exactly zero whenever the hypothesis `[alpha0, Y] ∧ Y = 0` holds.
#[derive(Clone, Debug)]
pub struct BivectorDecomposition {
    pub vector_part: MultiVector,
    pub diagonal: BTreeMap<(u8, u8), Scalar>,
    pub residual: MultiVector,
}

impl BivectorDecomposition {
    /// Reassemble `Y ∧ Z + Σ a_ij y_i y_j ∂_i∧∂_j + residual`.
    pub fn reassemble(&self, lambda: &EigenData) -> MultiVector {
        let m = lambda.len();
        let y = diagonal_field(lambda);
        let mut acc = y.wedge(&self.vector_part).expect("same vars");
        for ((i, j), a) in &self.diagonal {
            let mono = Monomial::var(m, usize::from(*i)).mul(&Monomial::var(m, usize::from(*j)));
            let term = MultiVector::term(m, &[*i, *j], mono, a.clone()).expect("valid term");
            acc = acc.try_add(&term).expect("grade 2");
        }
        acc.try_add(&self.residual).expect("grade 2")
    }
}

/// Run the constructive pipeline: wedge-divide `[Y, alpha0]` by `Y`, split
/// the quotient into kernel and image parts, solve the homological equation
/// for `Z`, and read the diagonal coefficients off the remainder.
pub fn decompose_bivector(
    lambda: &EigenData,
    alpha0: &MultiVector,
    d: u32,
) -> Result<BivectorDecomposition, Error> {
    let m = lambda.len();
    if alpha0.vars() != m {
        return Err(Error::VarMismatch {
            expected: m,
            found: alpha0.vars(),
        });
    }
    if !alpha0.is_zero() && alpha0.grade() != 2 {
        return Err(Error::GradeMismatch {
            expected: 2,
            found: alpha0.grade(),
        });
    }
    let cert = nonresonant_up_to_order(lambda, d + 2);
    if !cert.is_nonresonant() {
        return Err(Error::Resonance(cert));
    }
    let y = diagonal_field(lambda);
    let hyp = alpha0.schouten(&y)?.wedge(&y)?;
    if !hyp.is_zero() {
        return Err(Error::Hypothesis(
            "[alpha0, Y] ∧ Y ≠ 0; the decomposition hypothesis fails".to_string(),
        ));
    }
    // W = [Y, alpha0] = Y ∧ V for some V (wedge division).
    let w = y.schouten(alpha0)?;
    let v = wedge_divide(&y, &w, d)?;
    // Project away the kernel component of V; Z solves ad_Y(Z) = V - V1.
    let mut v_im = MultiVector::zero(m, 1);
    for (dirs, mono, c) in v.iter_terms() {
        if !ad_eigenvalue(lambda, dirs, mono).is_zero() {
            v_im.add_term(dirs.clone(), mono.clone(), c.clone());
        }
    }
    let z = solve_ad_diagonal(lambda, &v_im)?;
    // alpha0 - Y∧Z lies in the kernel of ad_Y: read the diagonal
    // coefficients and keep whatever is left as the residual.
    let remainder = alpha0.try_sub(&y.wedge(&z)?)?;
    let mut diagonal = BTreeMap::new();
    let mut residual = MultiVector::zero(m, 2);
    for (dirs, mono, c) in remainder.iter_terms() {
        let (i, j) = (dirs.indices()[0], dirs.indices()[1]);
        let diag_mono =
            Monomial::var(m, usize::from(i)).mul(&Monomial::var(m, usize::from(j)));
        if *mono == diag_mono {
            diagonal.insert((i, j), c.clone());
        } else {
            residual.add_term(dirs.clone(), mono.clone(), c.clone());
        }
    }
    Ok(BivectorDecomposition {
        vector_part: z,
        diagonal,
        residual,
    })
}

/// A polynomial change of coordinates `y_i = images[i](z)`.
#[derive(Clone, Debug)]
pub struct CoordinateChange {
    vars: usize,
    images: Vec<Polynomial>,
}

impl CoordinateChange {
    pub fn identity(vars: usize) -> Self {
        CoordinateChange {
            vars,
            images: (0..vars).map(|k| Polynomial::var(vars, k)).collect(),
        }
    }

    pub fn new(images: Vec<Polynomial>) -> Self {
        let vars = images.len();
        CoordinateChange { vars, images }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    /// `self ∘ inner`, truncated at total degree `trunc`.
    pub fn compose(&self, inner: &CoordinateChange, trunc: u32) -> CoordinateChange {
        CoordinateChange {
            vars: self.vars,
            images: self
                .images
                .iter()
                .map(|p| p.substitute(&inner.images, Some(trunc)))
                .collect(),
        }
    }

    /// Push a vector field through this change of coordinates, exactly, up
    /// to coefficient degree `trunc`.
    pub fn apply_to_field(&self, w: &MultiVector, trunc: u32) -> Result<MultiVector, Error> {
        transform_vector_field(w, &self.images, trunc)
    }
}

fn vector_components(w: &MultiVector) -> Vec<Polynomial> {
    let m = w.vars();
    let mut comps = vec![Polynomial::zero(m); m];
    for (dirs, mono, c) in w.iter_terms() {
        let s = usize::from(dirs.indices()[0]);
        comps[s] = comps[s]
            .add(&Polynomial::from_terms(m, [(mono.clone(), c.clone())]).expect("same vars"));
    }
    comps
}

fn field_from_components(comps: &[Polynomial]) -> MultiVector {
    let m = comps.len();
    let mut w = MultiVector::zero(m, 1);
    for (s, p) in comps.iter().enumerate() {
        for (mono, c) in p.iter_terms() {
            w.add_term(DirSet::single(s), mono.clone(), c.clone());
        }
    }
    w
}

/// Transform the vector field `W` under `y = φ(z)`:
/// `W̃(z) = (Dφ(z))^{-1} · W(φ(z))`, truncated at coefficient degree `trunc`.
pub fn transform_vector_field(
    w: &MultiVector,
    images: &[Polynomial],
    trunc: u32,
) -> Result<MultiVector, Error> {
    let m = w.vars();
    if w.grade() != 1 && !w.is_zero() {
        return Err(Error::GradeMismatch {
            expected: 1,
            found: w.grade(),
        });
    }
    if images.len() != m {
        return Err(Error::Structural(
            "coordinate change has wrong arity".to_string(),
        ));
    }
    // Jacobian J = J0 + J+, with constant part J0 invertible.
    let jac: Vec<Vec<Polynomial>> = images
        .iter()
        .map(|p| (0..m).map(|j| p.partial(j)).collect())
        .collect();
    let j0_dense: Vec<Vec<Scalar>> = jac
        .iter()
        .map(|row| row.iter().map(|p| p.coeff(&Monomial::one(m))).collect())
        .collect();
    let j0 = ExactMatrix::from_dense(&j0_dense);
    let j0inv = matrix::inverse(&j0).ok_or_else(|| {
        Error::Hypothesis("coordinate change has singular linear part".to_string())
    })?;
    let j0inv_dense = j0inv.to_dense();
    // N = -J0^{-1} J+, a nilpotent-mod-degree polynomial matrix.
    let jplus: Vec<Vec<Polynomial>> = jac
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(|(c, p)| p.sub(&Polynomial::constant(m, j0_dense[r][c].clone())))
                .collect()
        })
        .collect();
    let mat_mul = |a: &[Vec<Polynomial>], b: &[Vec<Polynomial>]| -> Vec<Vec<Polynomial>> {
        let mut out = vec![vec![Polynomial::zero(m); m]; m];
        for r in 0..m {
            for c in 0..m {
                let mut acc = Polynomial::zero(m);
                for (k, brow) in b.iter().enumerate() {
                    acc = acc.add(&a[r][k].mul(&brow[c]).expect("same vars").truncate(trunc));
                }
                out[r][c] = acc.truncate(trunc);
            }
        }
        out
    };
    let scalar_mat = |s: &[Vec<Scalar>]| -> Vec<Vec<Polynomial>> {
        s.iter()
            .map(|row| row.iter().map(|v| Polynomial::constant(m, v.clone())).collect())
            .collect()
    };
    let n_mat = {
        let mut nm = mat_mul(&scalar_mat(&j0inv_dense), &jplus);
        for row in nm.iter_mut() {
            for p in row.iter_mut() {
                *p = p.neg();
            }
        }
        nm
    };
    // J^{-1} = (Σ_t N^t) J0^{-1}, finite modulo the truncation degree.
    let mut series = scalar_mat(&{
        let mut id = vec![vec![Scalar::zero(); m]; m];
        for (k, row) in id.iter_mut().enumerate() {
            row[k] = Scalar::one();
        }
        id
    });
    let mut power = n_mat.clone();
    let mut t = 1u32;
    loop {
        let vanished = power.iter().all(|row| row.iter().all(Polynomial::is_zero));
        if vanished || t > trunc {
            break;
        }
        for r in 0..m {
            for c in 0..m {
                series[r][c] = series[r][c].add(&power[r][c]);
            }
        }
        power = mat_mul(&power, &n_mat);
        t += 1;
    }
    let jinv = mat_mul(&series, &scalar_mat(&j0inv_dense));
    // Compose the components with φ and contract with J^{-1}.
    let comps = vector_components(w);
    let composed: Vec<Polynomial> = comps
        .iter()
        .map(|p| p.substitute(images, Some(trunc)))
        .collect();
    let mut out_comps = vec![Polynomial::zero(m); m];
    for a in 0..m {
        let mut acc = Polynomial::zero(m);
        for (b, comp) in composed.iter().enumerate() {
            acc = acc.add(&jinv[a][b].mul(comp).expect("same vars").truncate(trunc));
        }
        out_comps[a] = acc.truncate(trunc);
    }
    Ok(field_from_components(&out_comps))
}

/// Result of truncated Poincaré linearization.
#[derive(Clone, Debug)]
pub struct Linearization {
    pub eigenvalues: EigenData,
    /// The composite change `y = Φ(z)`.
    pub change: CoordinateChange,
    /// The transformed field, truncated at the requested order.
    pub transformed: MultiVector,
    /// `transformed - Σ λ_i z_i ∂_i`, truncated; zero on success.
    pub residual: MultiVector,
}

/// Degree-by-degree formal linearization of a vector field singular at the
/// origin, up to coefficient degree `order`.
///
/// The linear part must be diagonal, or diagonalizable with rational
/// eigenvalues; diagonalization over field extensions is not supported and
/// reports a capability error. A vanishing adjoint eigenvalue at some degree
/// aborts with a resonance certificate carrying the witness.
pub fn linearize_formal(field: &MultiVector, order: u32) -> Result<Linearization, Error> {
    let m = field.vars();
    if field.grade() != 1 {
        return Err(Error::GradeMismatch {
            expected: 1,
            found: field.grade(),
        });
    }
    if !field.coeff_degree_part(0).is_zero() {
        return Err(Error::Hypothesis(
            "vector field is not singular at the origin".to_string(),
        ));
    }
    // Linear part as an exact matrix L[i][j] = coefficient of x_j in comp i.
    let mut l = vec![vec![Scalar::zero(); m]; m];
    for (dirs, mono, c) in field.coeff_degree_part(1).iter_terms() {
        let i = usize::from(dirs.indices()[0]);
        let j = (0..m).find(|&k| mono.exp(k) == 1).expect("degree one");
        l[i][j] = c.clone();
    }
    let is_diagonal = (0..m).all(|i| (0..m).all(|j| i == j || l[i][j].is_zero()));
    let (lambda, mut current, mut change) = if is_diagonal {
        let lambda = EigenData::new((0..m).map(|i| l[i][i].clone()).collect())?;
        (lambda, field.clone(), CoordinateChange::identity(m))
    } else {
        let (lambda, c, cinv) = diagonalize(&l)?;
        let current = field.linear_change(&c, &cinv);
        let images: Vec<Polynomial> = (0..m)
            .map(|i| {
                let mut p = Polynomial::zero(m);
                for (j, cij) in c[i].iter().enumerate() {
                    p = p.add(&Polynomial::var(m, j).scale(cij));
                }
                p
            })
            .collect();
        (lambda, current, CoordinateChange::new(images))
    };
    let cert = nonresonant_up_to_order(&lambda, order);
    if !cert.is_nonresonant() {
        return Err(Error::Resonance(cert));
    }
    for k in 2..=order {
        let h = current.coeff_degree_part(k);
        if h.is_zero() {
            continue;
        }
        // Solve ad_Y(P) = h monomial-wise; a vanishing eigenvalue is a
        // genuine resonance and is reported with its witness.
        let mut p = MultiVector::zero(m, 1);
        for (dirs, mono, c) in h.iter_terms() {
            let eig = ad_eigenvalue(&lambda, dirs, mono);
            if eig.is_zero() {
                let s = usize::from(dirs.indices()[0]);
                let mut witness: Vec<i64> = mono
                    .exponents()
                    .iter()
                    .map(|&e| i64::from(e))
                    .collect();
                witness[s] -= 1;
                let order_of_witness: i64 = witness.iter().map(|x| x.abs()).sum();
                return Err(Error::Resonance(ResonanceCertificate {
                    order_bound: order_of_witness as u32,
                    witness: Some(witness),
                }));
            }
            p.add_term(dirs.clone(), mono.clone(), c.div(&eig));
        }
        let step = CoordinateChange::new(
            (0..m)
                .map(|i| {
                    let mut img = Polynomial::var(m, i);
                    for (dirs, mono, c) in p.iter_terms() {
                        if usize::from(dirs.indices()[0]) == i {
                            img = img.add(
                                &Polynomial::from_terms(m, [(mono.clone(), c.clone())])
                                    .expect("same vars"),
                            );
                        }
                    }
                    img
                })
                .collect(),
        );
        current = transform_vector_field(&current, step.images(), order)?;
        change = change.compose(&step, order);
        debug_assert!(current
            .truncate_coeff_degree(k)
            .try_sub(&diagonal_field(&lambda))
            .expect("grade 1")
            .is_zero());
    }
    let transformed = current.truncate_coeff_degree(order);
    let residual = transformed
        .try_sub(&diagonal_field(&lambda))
        .expect("grade 1");
    Ok(Linearization {
        eigenvalues: lambda,
        change,
        transformed,
        residual,
    })
}

type Diagonalization = (EigenData, Vec<Vec<Scalar>>, Vec<Vec<Scalar>>);

/// Diagonalize an exact matrix with rational spectrum. Returns
/// `(eigenvalues-in-diagonal-order, C, C^{-1})` with `L = C diag C^{-1}`.
fn diagonalize(l: &[Vec<Scalar>]) -> Result<Diagonalization, Error> {
    let m = l.len();
    if l.iter()
        .any(|row| row.iter().any(|v| !v.is_rational()))
    {
        return Err(Error::Capability(
            "diagonalization of non-diagonal Gaussian linear parts is not supported".to_string(),
        ));
    }
    let roots = rational_eigenvalues(l)?;
    let mut c_cols: Vec<Vec<Scalar>> = Vec::new();
    let mut lambda: Vec<Scalar> = Vec::new();
    for root in roots {
        // kernel of L - root·I gives the eigenvectors
        let dense: Vec<Vec<Scalar>> = (0..m)
            .map(|r| {
                (0..m)
                    .map(|cc| {
                        if r == cc {
                            l[r][cc].sub(&root)
                        } else {
                            l[r][cc].clone()
                        }
                    })
                    .collect()
            })
            .collect();
        let kernel = matrix::kernel_basis(&ExactMatrix::from_dense(&dense));
        for v in kernel {
            lambda.push(root.clone());
            c_cols.push(v);
        }
    }
    if c_cols.len() != m {
        return Err(Error::Capability(
            "linear part is not diagonalizable over the rationals".to_string(),
        ));
    }
    let c: Vec<Vec<Scalar>> = (0..m)
        .map(|r| (0..m).map(|cc| c_cols[cc][r].clone()).collect())
        .collect();
    let cinv = matrix::inverse(&ExactMatrix::from_dense(&c))
        .ok_or_else(|| Error::Capability("eigenvector matrix is singular".to_string()))?;
    Ok((EigenData::new(lambda)?, c, cinv.to_dense()))
}

/// All rational eigenvalues (with multiplicity collapsed) of an exact
/// rational matrix, by rational-root search on the characteristic polynomial.
fn rational_eigenvalues(l: &[Vec<Scalar>]) -> Result<Vec<Scalar>, Error> {
    use num_bigint::BigInt;
    use num_traits::{One, Signed};
    let m = l.len();
    // char poly coefficients by Faddeev–LeVerrier: p(x) = x^m + c_1 x^(m-1) + …
    let mut coeffs: Vec<Scalar> = vec![Scalar::one()];
    let mut mat_m: Vec<Vec<Scalar>> = vec![vec![Scalar::zero(); m]; m]; // M_0 = 0
    let mut prev_c = Scalar::one();
    for k in 1..=m {
        // M_k = L·M_{k-1} + c_{k-1}·I
        let mut next = vec![vec![Scalar::zero(); m]; m];
        for r in 0..m {
            for c in 0..m {
                let mut acc = if r == c { prev_c.clone() } else { Scalar::zero() };
                for (t, mrow) in mat_m.iter().enumerate() {
                    acc = acc.add(&l[r][t].mul(&mrow[c]));
                }
                next[r][c] = acc;
            }
        }
        mat_m = next;
        // c_k = -tr(L·M_k)/k
        let mut tr = Scalar::zero();
        for r in 0..m {
            for (t, mrow) in mat_m.iter().enumerate() {
                tr = tr.add(&l[r][t].mul(&mrow[r]));
            }
        }
        let ck = tr.div(&Scalar::from_int(k as i64)).neg();
        prev_c = ck.clone();
        coeffs.push(ck);
    }
    // scale to integer coefficients
    let mut lcm = BigInt::one();
    for c in &coeffs {
        lcm = num_integer::Integer::lcm(&lcm, c.re().denom());
    }
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| (c.re() * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let lead = ints[0].clone();
    let tail = ints.last().cloned().unwrap_or_else(BigInt::one);
    let bound = BigInt::from(1_000_000u64);
    if lead.abs() > bound || tail.abs() > bound {
        return Err(Error::Capability(
            "characteristic polynomial coefficients too large for rational root search"
                .to_string(),
        ));
    }
    let divisors = |n: &BigInt| -> Vec<i64> {
        let n: i64 = i64::try_from(n.abs()).unwrap_or(0);
        if n == 0 {
            return vec![1];
        }
        let mut out = Vec::new();
        let mut d = 1;
        while d * d <= n {
            if n % d == 0 {
                out.push(d);
                out.push(n / d);
            }
            d += 1;
        }
        out.sort_unstable();
        out.dedup();
        out
    };
    let eval = |x: &Scalar| -> Scalar {
        let mut acc = Scalar::zero();
        for c in &coeffs {
            acc = acc.mul(x).add(c);
        }
        acc
    };
    let mut roots = Vec::new();
    for p in divisors(&tail) {
        for q in divisors(&lead) {
            for sign in [1i64, -1] {
                let cand = Scalar::from_ratio(sign * p, q);
                if eval(&cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    // the zero root is admissible for the search even if excluded later
    let zero = Scalar::zero();
    if eval(&zero).is_zero() && !roots.contains(&zero) {
        roots.push(zero);
    }
    Ok(roots)
}
