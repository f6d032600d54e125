//! Exact sparse matrices and fraction-free linear algebra.
//!
//! Elimination is Bareiss-style: rows are first scaled to (Gaussian) integer
//! form, after which every division in the Sylvester recurrence is exact, so
//! intermediate entries stay integral instead of accumulating fraction
//! reductions. Pivot rows are chosen by sparsity (fewest nonzeros first),
//! which keeps fill-in and coefficient growth down without leaving exact
//! arithmetic. The whole module is sequential and deterministic: the same
//! input order always yields the same echelon form and the same kernel basis.

// elimination kernels read one row while mutating another; indexed loops are
// the clear way to write that
#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::scalar::Scalar;

/// Sparse exact matrix: dimensions plus `(row, col, value)` triples kept
/// sorted with no explicit zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Scalar)>,
}

impl ExactMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        ExactMatrix {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, Scalar::one())).collect(),
        }
    }

    /// Build from triples; duplicate positions are summed, zeros dropped.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self, Error> {
        let mut map: alloc::collections::BTreeMap<(usize, usize), Scalar> = Default::default();
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::Structural(alloc::format!(
                    "entry ({r},{c}) outside {rows}x{cols} matrix"
                )));
            }
            let slot = map.entry((r, c)).or_insert_with(Scalar::zero);
            *slot = slot.add(&v);
        }
        Ok(ExactMatrix {
            rows,
            cols,
            entries: map
                .into_iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|((r, c), v)| (r, c, v))
                .collect(),
        })
    }

    /// Dense constructor used by tests and small solves.
    pub fn from_dense(data: &[Vec<Scalar>]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        let mut entries = Vec::new();
        for (r, row) in data.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    entries.push((r, c, v.clone()));
                }
            }
        }
        ExactMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, Scalar)] {
        &self.entries
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            out[*r][*c] = v.clone();
        }
        out
    }

    /// Stack `self` on top of `other` (same column count).
    pub fn stack(&self, other: &ExactMatrix) -> Result<ExactMatrix, Error> {
        if self.cols != other.cols {
            return Err(Error::Structural(alloc::format!(
                "cannot stack {}x{} on {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend(
            other
                .entries
                .iter()
                .map(|(r, c, v)| (r + self.rows, *c, v.clone())),
        );
        Ok(ExactMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![Scalar::zero(); self.rows];
        for (r, c, val) in &self.entries {
            out[*r] = out[*r].add(&val.mul(&v[*c]));
        }
        out
    }
}

/// Scale a row by the lcm of all denominators so each entry is a Gaussian
/// integer. Row scaling preserves kernels, ranks and row spans.
fn integerize_row(row: &mut [Scalar]) {
    let mut l = BigInt::one();
    for v in row.iter() {
        if v.is_zero() {
            continue;
        }
        l = l.lcm(v.re().denom());
        let im = v.im();
        if !im.is_zero() {
            l = l.lcm(im.denom());
        }
    }
    if l.is_one() {
        return;
    }
    let f = Scalar::Rational(num_rational::BigRational::from_integer(l));
    for v in row.iter_mut() {
        if !v.is_zero() {
            *v = v.mul(&f);
        }
    }
}

fn count_nonzeros(row: &[Scalar]) -> usize {
    row.iter().filter(|v| !v.is_zero()).count()
}

/// Fraction-free (Bareiss) row echelon form, in place.
///
/// Returns the pivot positions `(row, col)` in elimination order. On return,
/// `mat` is upper-echelon with respect to that pivot list.
pub fn bareiss_echelon(mat: &mut [Vec<Scalar>]) -> Vec<(usize, usize)> {
    let rows = mat.len();
    let cols = mat.first().map_or(0, Vec::len);
    for row in mat.iter_mut() {
        integerize_row(row);
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut prev_pivot = Scalar::one();
    let mut next_row = 0;
    for col in 0..cols {
        if next_row >= rows {
            break;
        }
        // Sparsest candidate pivot row; ties broken by row index.
        let cand = (next_row..rows)
            .filter(|&r| !mat[r][col].is_zero())
            .min_by_key(|&r| (count_nonzeros(&mat[r]), r));
        let Some(p) = cand else { continue };
        mat.swap(next_row, p);
        let pivot = mat[next_row][col].clone();
        for r in next_row + 1..rows {
            if mat[r][col].is_zero() {
                // Still rescale by pivot/prev to keep the recurrence exact.
                for c in col + 1..cols {
                    if !mat[r][c].is_zero() {
                        mat[r][c] = mat[r][c].mul(&pivot).div(&prev_pivot);
                    }
                }
                continue;
            }
            let head = core::mem::replace(&mut mat[r][col], Scalar::zero());
            for c in col + 1..cols {
                let t = mat[r][c]
                    .mul(&pivot)
                    .sub(&head.mul(&mat[next_row][c]));
                mat[r][c] = t.div(&prev_pivot);
            }
        }
        prev_pivot = pivot;
        pivots.push((next_row, col));
        next_row += 1;
    }
    pivots
}

/// Rank of the matrix, via fraction-free elimination.
pub fn rank(m: &ExactMatrix) -> usize {
    let mut dense = m.to_dense();
    bareiss_echelon(&mut dense).len()
}

/// Rank of a set of row vectors.
pub fn rank_of_rows(rows: &[Vec<Scalar>]) -> usize {
    let mut dense: Vec<Vec<Scalar>> = rows.to_vec();
    bareiss_echelon(&mut dense).len()
}

/// Exact basis of the right null space of `m`.
///
/// The basis is deterministic for deterministic input: free columns are taken
/// in ascending order and every vector is normalized so its first nonzero
/// coordinate is `1`. Dimension equals `cols - rank`.
pub fn kernel_basis(m: &ExactMatrix) -> Vec<Vec<Scalar>> {
    let cols = m.cols();
    let mut dense = m.to_dense();
    let pivots = bareiss_echelon(&mut dense);
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut is_pivot = vec![false; cols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Scalar::zero(); cols];
        v[free] = Scalar::one();
        // Back-substitute through the pivot rows, bottom-up.
        for &(r, pc) in pivots.iter().rev() {
            let mut acc = Scalar::zero();
            for c in pc + 1..cols {
                if !v[c].is_zero() && !dense[r][c].is_zero() {
                    acc = acc.add(&dense[r][c].mul(&v[c]));
                }
            }
            v[pc] = acc.neg().div(&dense[r][pc]);
        }
        normalize_vector(&mut v);
        basis.push(v);
    }
    basis
}

/// Scale so the first nonzero coordinate is `1`.
pub fn normalize_vector(v: &mut [Scalar]) {
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        let inv = first.inv().expect("nonzero");
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
    }
}

/// Does `v` lie in the row span of `basis`?
pub fn in_span(basis: &[Vec<Scalar>], v: &[Scalar]) -> bool {
    let r0 = rank_of_rows(basis);
    let mut all: Vec<Vec<Scalar>> = basis.to_vec();
    all.push(v.to_vec());
    rank_of_rows(&all) == r0
}

/// Mutual containment of two spans, decided by exact rank computations.
pub fn spans_equal(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> (bool, bool) {
    let ra = rank_of_rows(a);
    let rb = rank_of_rows(b);
    let mut all: Vec<Vec<Scalar>> = a.to_vec();
    all.extend(b.iter().cloned());
    let rab = rank_of_rows(&all);
    (rab == rb, rab == ra) // (a ⊆ b, b ⊆ a)
}

/// One particular exact solution of `A x = b`, or `None` when inconsistent.
///
/// Gauss-Jordan with the first admissible pivot per column; free variables
/// are set to zero, so the solution is the canonical echelon-minimal one.
pub fn solve_particular(a: &ExactMatrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(b.len(), a.rows());
    let cols = a.cols();
    let mut aug = a.to_dense();
    for (r, row) in aug.iter_mut().enumerate() {
        row.push(b[r].clone());
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next_row = 0;
    for col in 0..cols {
        let Some(p) = (next_row..aug.len()).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(next_row, p);
        let inv = aug[next_row][col].inv().expect("nonzero pivot");
        for c in col..=cols {
            if !aug[next_row][c].is_zero() {
                aug[next_row][c] = aug[next_row][c].mul(&inv);
            }
        }
        for r in 0..aug.len() {
            if r == next_row || aug[r][col].is_zero() {
                continue;
            }
            let f = core::mem::replace(&mut aug[r][col], Scalar::zero());
            for c in col + 1..=cols {
                let t = aug[next_row][c].mul(&f);
                aug[r][c] = aug[r][c].sub(&t);
            }
        }
        pivots.push((next_row, col));
        next_row += 1;
    }
    // Inconsistent iff some zero row has a nonzero augmented entry.
    for row in aug.iter().skip(next_row) {
        if !row[cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Scalar::zero(); cols];
    for &(r, c) in &pivots {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Exact inverse of a square matrix; `None` when singular.
pub fn inverse(m: &ExactMatrix) -> Option<ExactMatrix> {
    if m.rows() != m.cols() {
        return None;
    }
    let n = m.rows();
    let mut aug = m.to_dense();
    for (r, row) in aug.iter_mut().enumerate() {
        for c in 0..n {
            row.push(if c == r { Scalar::one() } else { Scalar::zero() });
        }
    }
    for col in 0..n {
        let p = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, p);
        let inv = aug[col][col].inv()?;
        for c in 0..2 * n {
            if !aug[col][c].is_zero() {
                aug[col][c] = aug[col][c].mul(&inv);
            }
        }
        for r in 0..n {
            if r == col || aug[r][col].is_zero() {
                continue;
            }
            let f = core::mem::replace(&mut aug[r][col], Scalar::zero());
            for c in 0..2 * n {
                let t = aug[col][c].mul(&f);
                aug[r][c] = aug[r][c].sub(&t);
            }
        }
    }
    let dense: Vec<Vec<Scalar>> = aug.into_iter().map(|row| row[n..].to_vec()).collect();
    Some(ExactMatrix::from_dense(&dense))
}
