//! The bracket's normative contract: generator rule, both graded Leibniz
//! identities, graded antisymmetry, graded Jacobi, and agreement with an
//! independent oracle.
//!
//! The oracle expands brackets over decomposable terms: a term
//! `c·x^E·∂_{s1}∧…∧∂_{sp}` is treated as `u_1∧…∧u_p` with `u_1 = c·x^E ∂_{s1}`
//! and the rest constant directions, and
//!
//! ```text
//! [u_1∧…∧u_p, v_1∧…∧v_q] = Σ_{i,j} (-1)^{i+j} [u_i, v_j] ∧ u_(−i) ∧ v_(−j)
//! [u_1∧…∧u_p, f]         = Σ_i (-1)^{p-i} u_i(f) · u_(−i)
//! ```
//!
//! with plain Lie brackets of vector fields inside. This shares no sign
//! logic with the production bidifferential implementation.

use schouten_core::multivector::MultiVector;
use schouten_core::poly::{Monomial, Polynomial};
use schouten_core::sampling::{random_multivector, SplitMix64};
use schouten_core::scalar::Scalar;

/// Lie bracket of two vector fields, computed from first principles.
fn lie_bracket(a: &MultiVector, b: &MultiVector) -> MultiVector {
    let m = a.vars();
    let comp = |w: &MultiVector, s: usize| -> Polynomial {
        let mut p = Polynomial::zero(m);
        for (dirs, mono, c) in w.iter_terms() {
            if usize::from(dirs.indices()[0]) == s {
                p = p
                    .add(&Polynomial::from_terms(m, [(mono.clone(), c.clone())]).unwrap());
            }
        }
        p
    };
    let mut out = MultiVector::zero(m, 1);
    for s in 0..m {
        // [A,B]^s = Σ_k (A^k ∂_k B^s - B^k ∂_k A^s)
        let mut acc = Polynomial::zero(m);
        for k in 0..m {
            acc = acc.add(&comp(a, k).mul(&comp(b, s).partial(k)).unwrap());
            acc = acc.sub(&comp(b, k).mul(&comp(a, s).partial(k)).unwrap());
        }
        let term = MultiVector::from_polynomial(&acc)
            .wedge(&MultiVector::direction(m, s))
            .unwrap();
        out = out.try_add(&term).unwrap();
    }
    out
}

/// Directional derivative `V(f)` as a grade-0 multivector.
fn apply_to_function(v: &MultiVector, f: &MultiVector) -> MultiVector {
    let m = v.vars();
    let mut out = MultiVector::zero(m, 0);
    for (dirs, mono, c) in v.iter_terms() {
        let s = usize::from(dirs.indices()[0]);
        let df = f.x_partial(s);
        let scaled = df.scale_poly(
            &Polynomial::from_terms(m, [(mono.clone(), c.clone())]).unwrap(),
        );
        out = out.try_add(&scaled).unwrap();
    }
    out
}

/// Split a single term into wedge factors: the coefficient rides on the
/// first factor.
fn factors_of_term(
    vars: usize,
    dirs: &[u8],
    mono: &Monomial,
    c: &Scalar,
) -> Vec<MultiVector> {
    let mut out = Vec::new();
    for (i, &s) in dirs.iter().enumerate() {
        if i == 0 {
            out.push(
                MultiVector::term(vars, &[s], mono.clone(), c.clone()).unwrap(),
            );
        } else {
            out.push(MultiVector::direction(vars, usize::from(s)));
        }
    }
    out
}

fn wedge_all(vars: usize, factors: &[MultiVector]) -> MultiVector {
    let mut acc =
        MultiVector::from_polynomial(&Polynomial::one(vars));
    for f in factors {
        acc = acc.wedge(f).unwrap();
    }
    acc
}

/// Oracle bracket of two single terms.
fn oracle_terms(
    vars: usize,
    da: &[u8],
    ma: &Monomial,
    ca: &Scalar,
    db: &[u8],
    mb: &Monomial,
    cb: &Scalar,
) -> MultiVector {
    let p = da.len();
    let q = db.len();
    let out_grade = (p + q).max(1) - 1;
    let mut out = MultiVector::zero(vars, out_grade);
    if p == 0 && q == 0 {
        return out;
    }
    if p == 0 {
        // antisymmetry: [f, B] = -(-1)^(q-1) [B, f], negative exactly for odd q
        let rev = oracle_terms(vars, db, mb, cb, da, ma, ca);
        return if q.is_multiple_of(2) { rev } else { rev.neg() };
    }
    if q == 0 {
        // [u_1∧…∧u_p, f] = Σ_i (-1)^(p-i) u_i(f) u_(−i)
        let us = factors_of_term(vars, da, ma, ca);
        let f = MultiVector::term(vars, &[], mb.clone(), cb.clone()).unwrap();
        for i in 0..p {
            let uf = apply_to_function(&us[i], &f);
            let rest: Vec<MultiVector> = us
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, u)| u.clone())
                .collect();
            let mut piece = uf.wedge(&wedge_all(vars, &rest)).unwrap();
            if (p - 1 - i) % 2 == 1 {
                piece = piece.neg();
            }
            out = out.try_add(&piece).unwrap();
        }
        return out;
    }
    let us = factors_of_term(vars, da, ma, ca);
    let vs = factors_of_term(vars, db, mb, cb);
    for i in 0..p {
        for j in 0..q {
            let lie = lie_bracket(&us[i], &vs[j]);
            if lie.is_zero() {
                continue;
            }
            let rest_u: Vec<MultiVector> = us
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, u)| u.clone())
                .collect();
            let rest_v: Vec<MultiVector> = vs
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, v)| v.clone())
                .collect();
            let mut piece = lie
                .wedge(&wedge_all(vars, &rest_u))
                .unwrap()
                .wedge(&wedge_all(vars, &rest_v))
                .unwrap();
            // (-1)^(i+j) with 1-based positions: (i+1)+(j+1) ≡ i+j (mod 2)
            if (i + j) % 2 == 1 {
                piece = piece.neg();
            }
            out = out.try_add(&piece).unwrap();
        }
    }
    out
}

/// Independent oracle bracket, bilinear over terms.
fn bracket_oracle(a: &MultiVector, b: &MultiVector) -> MultiVector {
    let vars = a.vars();
    let out_grade = (a.grade() + b.grade()).max(1) - 1;
    let mut out = MultiVector::zero(vars, out_grade);
    for (da, ma, ca) in a.iter_terms() {
        for (db, mb, cb) in b.iter_terms() {
            let piece = oracle_terms(vars, da.indices(), ma, ca, db.indices(), mb, cb);
            if !piece.is_zero() {
                out = out.try_add(&piece).unwrap();
            }
        }
    }
    out
}

fn sample(rng: &mut SplitMix64, vars: usize, grade: usize) -> MultiVector {
    random_multivector(rng, vars, grade, 3, 3)
}

#[test]
fn oracle_agrees_with_implementation() {
    let mut rng = SplitMix64::new(2024);
    let mut checked = 0;
    while checked < 200 {
        let vars = 2 + (rng.next_u64() % 4) as usize; // 2..=5
        let p = (rng.next_u64() % 3) as usize + 1; // 1..=3
        let q = (rng.next_u64() % 4) as usize; // 0..=3, includes functions
        if p > vars || q > vars {
            continue;
        }
        let a = sample(&mut rng, vars, p);
        let b = sample(&mut rng, vars, q);
        assert_eq!(
            a.schouten(&b).unwrap(),
            bracket_oracle(&a, &b),
            "oracle mismatch at vars={vars} p={p} q={q}"
        );
        checked += 1;
    }
}

#[test]
fn graded_antisymmetry() {
    // [A,B] = -(-1)^((p-1)(q-1)) [B,A], exactly
    let mut rng = SplitMix64::new(7);
    let mut checked = 0;
    while checked < 220 {
        let vars = 2 + (rng.next_u64() % 4) as usize;
        let p = (rng.next_u64() % 3) as usize + 1;
        let q = (rng.next_u64() % 3) as usize + 1;
        if p > vars || q > vars {
            continue;
        }
        let a = sample(&mut rng, vars, p);
        let b = sample(&mut rng, vars, q);
        let ab = a.schouten(&b).unwrap();
        let ba = b.schouten(&a).unwrap();
        // -(-1)^((p-1)(q-1)): overall +1 exactly when (p-1)(q-1) is odd
        let expect = if ((p + 1) * (q + 1)) % 2 == 1 {
            ba
        } else {
            ba.neg()
        };
        assert_eq!(ab, expect, "antisymmetry p={p} q={q}");
        checked += 1;
    }
}

#[test]
fn leibniz_first_form() {
    // [α, β∧ξ] = [α,β]∧ξ + (-1)^((p-1)q) β∧[α,ξ]
    let mut rng = SplitMix64::new(8);
    let mut checked = 0;
    while checked < 220 {
        let vars = 2 + (rng.next_u64() % 4) as usize;
        let p = (rng.next_u64() % 3) as usize + 1;
        let q = (rng.next_u64() % 3) as usize;
        let r = (rng.next_u64() % 3) as usize;
        if p > vars || q + r > vars {
            continue;
        }
        let alpha = sample(&mut rng, vars, p);
        let beta = sample(&mut rng, vars, q);
        let xi = sample(&mut rng, vars, r);
        let lhs = alpha.schouten(&beta.wedge(&xi).unwrap()).unwrap();
        let mut second = beta.wedge(&alpha.schouten(&xi).unwrap()).unwrap();
        if ((p + 1) * q) % 2 == 1 {
            second = second.neg();
        }
        let rhs = alpha
            .schouten(&beta)
            .unwrap()
            .wedge(&xi)
            .unwrap()
            .try_add(&second)
            .unwrap();
        assert_eq!(lhs, rhs, "first Leibniz p={p} q={q} r={r}");
        checked += 1;
    }
}

#[test]
fn leibniz_second_form() {
    // [α∧β, ξ] = α∧[β,ξ] + (-1)^((r-1)q) [α,ξ]∧β
    let mut rng = SplitMix64::new(9);
    let mut checked = 0;
    while checked < 220 {
        let vars = 2 + (rng.next_u64() % 4) as usize;
        let p = (rng.next_u64() % 3) as usize;
        let q = (rng.next_u64() % 3) as usize;
        let r = (rng.next_u64() % 3) as usize + 1;
        if p + q > vars || r > vars {
            continue;
        }
        let alpha = sample(&mut rng, vars, p);
        let beta = sample(&mut rng, vars, q);
        let xi = sample(&mut rng, vars, r);
        let lhs = alpha.wedge(&beta).unwrap().schouten(&xi).unwrap();
        let mut second = alpha
            .schouten(&xi)
            .unwrap()
            .wedge(&beta)
            .unwrap();
        if ((r + 1) * q) % 2 == 1 {
            second = second.neg();
        }
        let rhs = alpha
            .wedge(&beta.schouten(&xi).unwrap())
            .unwrap()
            .try_add(&second)
            .unwrap();
        assert_eq!(lhs, rhs, "second Leibniz p={p} q={q} r={r}");
        checked += 1;
    }
}

#[test]
fn graded_jacobi() {
    // (-1)^((p-1)(r-1)) [A,[B,C]] + cyclic = 0
    let mut rng = SplitMix64::new(10);
    let mut checked = 0;
    while checked < 110 {
        let vars = 2 + (rng.next_u64() % 3) as usize; // 2..=4
        let p = (rng.next_u64() % 2) as usize + 1;
        let q = (rng.next_u64() % 2) as usize + 1;
        let r = (rng.next_u64() % 2) as usize + 1;
        if p > vars || q > vars || r > vars {
            continue;
        }
        let a = sample(&mut rng, vars, p);
        let b = sample(&mut rng, vars, q);
        let c = sample(&mut rng, vars, r);
        let term = |x: &MultiVector, y: &MultiVector, z: &MultiVector, gx: usize, gz: usize| {
            let mut t = x.schouten(&y.schouten(z).unwrap()).unwrap();
            if ((gx + 1) * (gz + 1)) % 2 == 1 {
                t = t.neg();
            }
            t
        };
        let total = term(&a, &b, &c, p, r)
            .try_add(&term(&b, &c, &a, q, p))
            .unwrap()
            .try_add(&term(&c, &a, &b, r, q))
            .unwrap();
        assert!(total.is_zero(), "Jacobi p={p} q={q} r={r}");
        checked += 1;
    }
}

#[test]
fn coefficient_partial_agrees_with_direction_bracket() {
    // x∂_k(A) = [∂_k, A] on 100 random multivectors
    let mut rng = SplitMix64::new(21);
    let mut checked = 0;
    while checked < 100 {
        let vars = 2 + (rng.next_u64() % 4) as usize;
        let grade = (rng.next_u64() % 4) as usize;
        if grade > vars {
            continue;
        }
        let a = sample(&mut rng, vars, grade);
        for k in 0..vars {
            let direct = a.x_partial(k);
            let via_bracket = MultiVector::direction(vars, k).schouten(&a).unwrap();
            assert_eq!(direct, via_bracket, "vars={vars} grade={grade} k={k}");
        }
        checked += 1;
    }
}

#[test]
fn wedge_is_graded_commutative() {
    // A ∧ B = (-1)^(pq) B ∧ A
    let mut rng = SplitMix64::new(31);
    let mut checked = 0;
    while checked < 100 {
        let vars = 2 + (rng.next_u64() % 4) as usize;
        let p = (rng.next_u64() % 3) as usize;
        let q = (rng.next_u64() % 3) as usize;
        if p + q > vars {
            continue;
        }
        let a = sample(&mut rng, vars, p);
        let b = sample(&mut rng, vars, q);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let expect = if (p * q) % 2 == 1 { ba.neg() } else { ba };
        assert_eq!(ab, expect, "graded commutativity p={p} q={q}");
        checked += 1;
    }
}

#[test]
fn poisson_implies_bracket_squares_to_zero() {
    // [Π,Π] = 0 forces [Π, [Π, ξ]] = 0 for every ξ (Jacobi consequence),
    // exercised on pull-back bivectors.
    use schouten_core::poincare::EigenData;
    use schouten_core::projective::{chart_restrict, pullback_bivector, random_quadratic_field};
    let lambda = EigenData::new(vec![Scalar::from_int(2), Scalar::from_int(5)]).unwrap();
    let y = random_quadratic_field(2, 12, Some(&lambda)).unwrap();
    let pi = chart_restrict(&pullback_bivector(&y).unwrap(), 0);
    assert!(pi.is_poisson().unwrap());
    let mut rng = SplitMix64::new(13);
    for _ in 0..25 {
        let xi = sample(&mut rng, 3, 2);
        let inner = pi.schouten(&xi).unwrap();
        assert!(pi.schouten(&inner).unwrap().is_zero());
    }
}
