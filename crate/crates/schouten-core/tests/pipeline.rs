//! End-to-end pipeline checks on P^4, the smallest ambient dimension where
//! the wedge condition is a genuine constraint.

use schouten_core::deformation::{verify_pullback_deformations, DeformationSpaces};
use schouten_core::poincare::EigenData;
use schouten_core::projective::{chart_restrict, pullback_bivector, random_quadratic_field};
use schouten_core::scalar::Scalar;

fn lam(vals: &[i64]) -> EigenData {
    EigenData::new(vals.iter().map(|&v| Scalar::from_int(v)).collect()).unwrap()
}

#[test]
fn p4_section_space_dimensions() {
    let spaces = DeformationSpaces::new(4).unwrap();
    assert_eq!(spaces.bivectors().dimension(), 126);
    assert_eq!(spaces.trivectors().dimension(), 224);
    assert_eq!(spaces.quadvectors().dimension(), 126);
}

#[test]
fn p4_pullback_single_seed() {
    let lambda = lam(&[2, 5, 11]);
    let report = verify_pullback_deformations(4, 1, &lambda, 4).unwrap();
    eprintln!(
        "n=4 seed=1: dim_pois={} dim_fol={} verdict={:?} expected={:?}",
        report.dim_poisson, report.dim_foliation, report.verdict, report.expected_dim
    );
    assert!(report.verified());
    assert_eq!(report.dim_poisson, report.dim_foliation);
    assert!(report.outside_scope.is_none());
    assert_eq!(report.rank, 2);
    assert!(report.genericity.admissible());
    assert!(report.decomposition_checks.iter().all(|c| c.all_pass()));
}

#[test]
fn p4_pullback_is_rank_two_poisson() {
    let lambda = lam(&[2, 5, 11]);
    let y = random_quadratic_field(3, 9, Some(&lambda)).unwrap();
    let pi = pullback_bivector(&y).unwrap();
    let aff = chart_restrict(&pi, 0);
    assert!(aff.is_poisson().unwrap());
    assert_eq!(aff.generic_rank().unwrap(), 2);
}

#[test]
fn kernel_elements_bracket_to_zero_globally() {
    // every tangent element really kills the bracket at the section level
    let lambda = lam(&[2, 5]);
    let report = verify_pullback_deformations(3, 4, &lambda, 4).unwrap();
    let spaces = DeformationSpaces::new(3).unwrap();
    let y = random_quadratic_field(2, 4, Some(&lambda)).unwrap();
    let pi = pullback_bivector(&y).unwrap();
    for xi in &report.poisson_basis {
        let bracket = pi.rep().schouten(xi.rep()).unwrap();
        assert!(spaces.trivectors().reduce(&bracket).unwrap().is_zero());
    }
}

#[test]
fn generic_rank_is_invariant_under_linear_changes() {
    use schouten_core::matrix::{self, ExactMatrix};
    use schouten_core::sampling::{random_multivector, SplitMix64};
    let mut rng = SplitMix64::new(77);
    let mut done = 0;
    while done < 20 {
        let vars = 3 + (rng.next_u64() % 2) as usize; // 3 or 4
        let pi = random_multivector(&mut rng, vars, 2, 2, 4);
        if pi.is_zero() {
            continue;
        }
        // random small-integer matrix; skip the singular ones
        let c: Vec<Vec<schouten_core::Scalar>> = (0..vars)
            .map(|_| (0..vars).map(|_| Scalar::from_int(rng.int_in(-3, 3))).collect())
            .collect();
        let Some(cinv) = matrix::inverse(&ExactMatrix::from_dense(&c)) else {
            continue;
        };
        let moved = pi.linear_change(&c, &cinv.to_dense());
        assert_eq!(
            moved.generic_rank().unwrap(),
            pi.generic_rank().unwrap(),
            "rank invariance trial {done}"
        );
        done += 1;
    }
}
