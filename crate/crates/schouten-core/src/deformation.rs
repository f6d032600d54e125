//! Linearized deformations of projective Poisson structures.
//!
//! For a global Poisson bivector `Π` on `P^n` the two first-order tangent
//! spaces are exact kernels inside `H^0(Λ^2 T P^n)`:
//!
//! * the Poisson tangent space is `ker(ξ ↦ [Π, ξ])`,
//! * the foliation tangent space additionally imposes `Π ∧ ξ = 0`, realized
//!   by stacking the wedge operator under the bracket operator — so the
//!   foliation space is contained in the Poisson one by construction.
//!
//! For pull-back bivectors `Π = ∂_{X_n} ∧ Y` the pipeline samples `Y` with a
//! certified singularity, computes both kernels, decides subspace equality by
//! mutual exact containment, and checks every kernel element against the
//! chart-decomposition identities that a first-order deformation must
//! satisfy.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::Error;
use crate::matrix::{self, ExactMatrix};
use crate::multivector::MultiVector;
use crate::poincare::{
    in_poincare_domain, nonresonant_up_to_order, EigenData, ResonanceCertificate,
};
use crate::projective::{
    chart_restrict, pullback_bivector, random_quadratic_field, GlobalSection, SectionSpace,
};
use crate::scalar::Scalar;

/// Which linear conditions cut out the tangent space.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TangentKind {
    Poisson,
    Foliation,
}

/// An exactly computed tangent space: kernel basis in canonical coordinates
/// plus the corresponding global sections.
#[derive(Clone, Debug)]
pub struct TangentSpaceResult {
    pub kind: TangentKind,
    pub dim: usize,
    pub basis: Vec<GlobalSection>,
    pub coords: Vec<Vec<Scalar>>,
}

/// The bivector, trivector and 4-vector section spaces of a fixed `P^n`,
/// built once and shared by the operators.
pub struct DeformationSpaces {
    n: usize,
    bivectors: SectionSpace,
    trivectors: SectionSpace,
    quadvectors: SectionSpace,
}

impl DeformationSpaces {
    pub fn new(n: usize) -> Result<Self, Error> {
        if n < 3 {
            return Err(Error::Capability(format!(
                "deformation spaces need n >= 3, got {n}"
            )));
        }
        Ok(DeformationSpaces {
            n,
            bivectors: SectionSpace::new(n, 2, 0)?,
            trivectors: SectionSpace::new(n, 3, 0)?,
            // for n = 3 this is the zero space and the wedge operator is
            // identically zero, as it must be on a rank-3 tangent bundle
            quadvectors: SectionSpace::new(n, 4, 0)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bivectors(&self) -> &SectionSpace {
        &self.bivectors
    }

    pub fn trivectors(&self) -> &SectionSpace {
        &self.trivectors
    }

    pub fn quadvectors(&self) -> &SectionSpace {
        &self.quadvectors
    }

    /// Exact matrix of `ξ ↦ [Π, ξ]` from bivector to trivector sections, in
    /// the canonical bases.
    pub fn bracket_operator(&self, pi: &GlobalSection) -> Result<ExactMatrix, Error> {
        self.operator_matrix(pi, TangentKind::Poisson)
    }

    /// Exact matrix of `ξ ↦ Π ∧ ξ` from bivector to 4-vector sections.
    pub fn wedge_operator(&self, pi: &GlobalSection) -> Result<ExactMatrix, Error> {
        self.operator_matrix(pi, TangentKind::Foliation)
    }

    fn operator_matrix(&self, pi: &GlobalSection, which: TangentKind) -> Result<ExactMatrix, Error> {
        let (target, is_bracket) = match which {
            TangentKind::Poisson => (&self.trivectors, true),
            TangentKind::Foliation => (&self.quadvectors, false),
        };
        let src_dim = self.bivectors.dimension();
        let mut entries = Vec::new();
        for j in 0..src_dim {
            let xi = self.bivectors.basis_section(j);
            let image = if is_bracket {
                pi.rep().schouten(xi.rep())?
            } else {
                pi.rep().wedge(xi.rep())?
            };
            let reduced = target.reduce(&image)?;
            for (i, c) in target.coords(&reduced)?.into_iter().enumerate() {
                if !c.is_zero() {
                    entries.push((i, j, c));
                }
            }
        }
        ExactMatrix::from_entries(target.dimension(), src_dim, entries)
    }

    /// The global integrability residual `[Π, Π]` as a trivector section.
    pub fn integrability_residual(&self, pi: &GlobalSection) -> Result<GlobalSection, Error> {
        self.trivectors.reduce(&pi.rep().schouten(pi.rep())?)
    }

    /// Kernel of the bracket operator: first-order deformations inside the
    /// Poisson locus. Non-Poisson input is rejected with its residual.
    pub fn tangent_poisson(&self, pi: &GlobalSection) -> Result<TangentSpaceResult, Error> {
        self.tangent(pi, TangentKind::Poisson)
    }

    /// Kernel of the stacked (bracket over wedge) operator: first-order
    /// deformations of the induced foliation.
    pub fn tangent_foliation(&self, pi: &GlobalSection) -> Result<TangentSpaceResult, Error> {
        self.tangent(pi, TangentKind::Foliation)
    }

    fn tangent(&self, pi: &GlobalSection, kind: TangentKind) -> Result<TangentSpaceResult, Error> {
        let residual = self.integrability_residual(pi)?;
        if !residual.is_zero() {
            return Err(Error::NonPoisson {
                residual_terms: residual.rep().len(),
                residual: format!("{}", residual.rep()),
            });
        }
        let bracket = self.bracket_operator(pi)?;
        let op = match kind {
            TangentKind::Poisson => bracket,
            TangentKind::Foliation => bracket.stack(&self.wedge_operator(pi)?)?,
        };
        let coords = matrix::kernel_basis(&op);
        let basis = coords
            .iter()
            .map(|v| self.bivectors.section_from_coords(v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TangentSpaceResult {
            kind,
            dim: coords.len(),
            basis,
            coords,
        })
    }
}

/// Decomposition of an affine bivector along the fiber variable:
/// `ξ = α_0 + x α_1 + x^2 α_2 + x^3 α_3 + ∂_x ∧ β` where `x` is the fiber
/// coordinate, the `α_i` involve neither `x` nor `∂_x`, and `β` is free of
/// `∂_x` but may depend on `x`.
#[derive(Clone, Debug)]
pub struct ChartDecomposition {
    pub alphas: [MultiVector; 4],
    pub beta: MultiVector,
    pub fiber: usize,
}

impl ChartDecomposition {
    /// `α_0 + x α_1 + x^2 α_2 + x^3 α_3` as one bivector.
    pub fn alpha_full(&self) -> MultiVector {
        let vars = self.beta.vars();
        let x = crate::poly::Polynomial::var(vars, self.fiber);
        let mut acc = MultiVector::zero(vars, 2);
        let mut power = crate::poly::Polynomial::one(vars);
        for a in &self.alphas {
            acc = acc.try_add(&a.scale_poly(&power)).expect("grade 2");
            power = power.mul(&x).expect("same vars");
        }
        acc
    }

    /// Reassemble the original bivector exactly.
    pub fn reassemble(&self) -> MultiVector {
        let vars = self.beta.vars();
        let fiber_part = MultiVector::direction(vars, self.fiber)
            .wedge(&self.beta)
            .expect("same vars");
        self.alpha_full().try_add(&fiber_part).expect("grade 2")
    }
}

/// Split an affine bivector along the fiber variable. Errors when the
/// `∂_x`-free part has degree above 3 in the fiber variable, which cannot
/// happen for restrictions of global sections.
pub fn decompose_chart(xi: &MultiVector, fiber: usize) -> Result<ChartDecomposition, Error> {
    if !xi.is_zero() && xi.grade() != 2 {
        return Err(Error::GradeMismatch {
            expected: 2,
            found: xi.grade(),
        });
    }
    if fiber >= xi.vars() {
        return Err(Error::Structural(format!(
            "fiber index {fiber} out of range for {} variables",
            xi.vars()
        )));
    }
    let beta = xi.theta_partial(fiber);
    let alpha = xi.without_dir(fiber);
    let by_power = alpha.var_power_split(fiber);
    if by_power.len() > 4 {
        return Err(Error::MalformedSection(format!(
            "fiber-free part has degree {} > 3 in the fiber variable",
            by_power.len() - 1
        )));
    }
    let vars = xi.vars();
    let mut alphas: [MultiVector; 4] = [
        MultiVector::zero(vars, 2),
        MultiVector::zero(vars, 2),
        MultiVector::zero(vars, 2),
        MultiVector::zero(vars, 2),
    ];
    for (i, a) in by_power.into_iter().enumerate() {
        alphas[i] = a;
    }
    Ok(ChartDecomposition {
        alphas,
        beta,
        fiber,
    })
}

/// Exact verdicts for the identities a chart decomposition of a first-order
/// deformation must satisfy against the fiber field `Y`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DecompositionChecks {
    /// `α_i ∧ Y = 0` for `i = 1, 2, 3`.
    pub alpha_wedge: [bool; 3],
    /// `[α_0, Y] ∧ Y = 0`.
    pub alpha0_bracket: bool,
    /// `(∂α/∂x) ∧ Y = 0` for the full `α = Σ x^i α_i`.
    pub derivative_eq: bool,
    /// `[Y, α] - (∂β/∂x) ∧ Y = 0`.
    pub transport_eq: bool,
}

impl DecompositionChecks {
    pub fn all_pass(&self) -> bool {
        self.alpha_wedge.iter().all(|&b| b)
            && self.alpha0_bracket
            && self.derivative_eq
            && self.transport_eq
    }
}

/// Evaluate the decomposition identities exactly. `y` must not involve the
/// fiber variable or the fiber direction.
pub fn check_decomposition(
    dec: &ChartDecomposition,
    y: &MultiVector,
) -> Result<DecompositionChecks, Error> {
    debug_assert!(y.without_dir(dec.fiber) == *y);
    debug_assert!(y.x_partial(dec.fiber).is_zero());
    let mut alpha_wedge = [false; 3];
    for i in 1..=3 {
        alpha_wedge[i - 1] = dec.alphas[i].wedge(y)?.is_zero();
    }
    let alpha0_bracket = dec.alphas[0].schouten(y)?.wedge(y)?.is_zero();
    let alpha = dec.alpha_full();
    let derivative_eq = alpha.x_partial(dec.fiber).wedge(y)?.is_zero();
    let transport_eq = y
        .schouten(&alpha)?
        .try_sub(&dec.beta.x_partial(dec.fiber).wedge(y)?)?
        .is_zero();
    Ok(DecompositionChecks {
        alpha_wedge,
        alpha0_bracket,
        derivative_eq,
        transport_eq,
    })
}

/// Per-instance surrogates for the genericity hypotheses: the sampled field
/// has a prescribed singularity whose eigenvalues pass the Poincaré-domain
/// and bounded non-resonance tests.
#[derive(Clone, Debug)]
pub struct GenericityChecklist {
    pub in_poincare_domain: bool,
    pub resonance: ResonanceCertificate,
    pub origin_singular: bool,
    pub linear_part_prescribed: bool,
}

impl GenericityChecklist {
    pub fn admissible(&self) -> bool {
        self.in_poincare_domain
            && self.resonance.is_nonresonant()
            && self.origin_singular
            && self.linear_part_prescribed
    }
}

/// Outcome of one verification run.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// The two tangent spaces coincide (mutual exact containment).
    FirstOrderVerified,
    /// A kernel element of the Poisson tangent space is not tangent to the
    /// foliation locus: a reportable finding, not an error.
    CounterexampleCandidate,
}

/// Full record of a pull-back verification run.
#[derive(Clone, Debug)]
pub struct DeformationReport {
    pub n: usize,
    pub seed: u64,
    pub lambda: EigenData,
    pub order_bound: u32,
    pub dim_poisson: usize,
    pub dim_foliation: usize,
    pub poisson_contained_in_foliation: bool,
    pub foliation_contained_in_poisson: bool,
    pub verdict: Verdict,
    /// Set for n = 3, where the 4-vector space vanishes and the coincidence
    /// is automatic rather than a theorem instance.
    pub outside_scope: Option<String>,
    pub rank: usize,
    pub decomposition_checks: Vec<DecompositionChecks>,
    pub poisson_basis: Vec<GlobalSection>,
    pub foliation_basis: Vec<GlobalSection>,
    /// Parameter-count expectation for the common dimension (n = 4 only);
    /// a mismatch is a warning, not a failure.
    pub expected_dim: Option<usize>,
    pub genericity: GenericityChecklist,
    /// First Poisson-tangent element outside the foliation span, if any.
    pub offending: Option<GlobalSection>,
    /// Filled in by the caller; the core stays clock-free.
    pub timing_ms: Option<u64>,
}

impl DeformationReport {
    pub fn verified(&self) -> bool {
        self.verdict == Verdict::FirstOrderVerified
    }

    pub fn dim_warning(&self) -> bool {
        matches!(self.expected_dim, Some(e) if e != self.dim_poisson)
    }
}

/// End-to-end verification for one seeded pull-back instance: sample `Y`
/// with prescribed admissible eigenvalues, build `Π`, compute both tangent
/// spaces, decide equality by mutual exact containment, and run the
/// decomposition checks on every kernel element.
pub fn verify_pullback_deformations(
    n: usize,
    seed: u64,
    lambda: &EigenData,
    order_bound: u32,
) -> Result<DeformationReport, Error> {
    if n < 3 {
        return Err(Error::Capability(format!(
            "pull-back verification needs n >= 3, got {n}"
        )));
    }
    if lambda.len() != n - 1 {
        return Err(Error::Structural(format!(
            "eigenvalue tuple has length {}, expected n - 1 = {}",
            lambda.len(),
            n - 1
        )));
    }
    if !in_poincare_domain(lambda) {
        return Err(Error::Hypothesis(format!(
            "eigenvalues {lambda} are not in the Poincaré domain"
        )));
    }
    let resonance = nonresonant_up_to_order(lambda, order_bound);
    if !resonance.is_nonresonant() {
        return Err(Error::Resonance(resonance));
    }

    let y = random_quadratic_field(n - 1, seed, Some(lambda))?;
    let pi = pullback_bivector(&y)?;
    let spaces = DeformationSpaces::new(n)?;

    // Affine data in the standard chart; the fiber coordinate is the last
    // affine variable.
    let fiber = n - 1;
    let pi_aff = chart_restrict(&pi, 0);
    let y_aff = chart_restrict(&y, 0).extend_vars(n);
    let rank = pi_aff.generic_rank()?;
    let lin = y_aff.coeff_degree_part(1);
    let expected_lin = crate::poincare::diagonal_field(lambda).extend_vars(n);
    let genericity = GenericityChecklist {
        in_poincare_domain: true,
        resonance,
        origin_singular: y_aff.coeff_degree_part(0).is_zero(),
        linear_part_prescribed: lin == expected_lin,
    };

    let tp = spaces.tangent_poisson(&pi)?;
    let tf = spaces.tangent_foliation(&pi)?;
    let (pois_in_fol, fol_in_pois) = matrix::spans_equal(&tp.coords, &tf.coords);
    // stacking makes this containment structural; keep it as a hard check
    debug_assert!(fol_in_pois);

    let mut offending = None;
    if !pois_in_fol {
        for (v, sec) in tp.coords.iter().zip(&tp.basis) {
            if !matrix::in_span(&tf.coords, v) {
                offending = Some(sec.clone());
                break;
            }
        }
    }

    let mut decomposition_checks = Vec::with_capacity(tp.basis.len());
    for xi in &tp.basis {
        let xi_aff = chart_restrict(xi, 0);
        let dec = decompose_chart(&xi_aff, fiber)?;
        decomposition_checks.push(check_decomposition(&dec, &y_aff)?);
    }

    let verdict = if pois_in_fol && fol_in_pois {
        Verdict::FirstOrderVerified
    } else {
        Verdict::CounterexampleCandidate
    };
    let outside_scope = (n < 4).then(|| {
        "n < 4 is outside the theorem scope: the 4-vector space vanishes and \
         the coincidence is degenerate"
            .to_string()
    });
    // soft parameter count: center of projection (n) + quadratic fields on
    // the base (dim H^0(T P^(n-1)(1)))
    let expected_dim = (n == 4).then(|| {
        let base = SectionSpace::new(n - 1, 1, 1).expect("twist-1 space");
        n + base.dimension()
    });

    Ok(DeformationReport {
        n,
        seed,
        lambda: lambda.clone(),
        order_bound,
        dim_poisson: tp.dim,
        dim_foliation: tf.dim,
        poisson_contained_in_foliation: pois_in_fol,
        foliation_contained_in_poisson: fol_in_pois,
        verdict,
        outside_scope,
        rank,
        decomposition_checks,
        poisson_basis: tp.basis,
        foliation_basis: tf.basis,
        expected_dim,
        genericity,
        offending,
        timing_ms: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;
    use crate::sampling::SplitMix64;

    fn lam(vals: &[i64]) -> EigenData {
        EigenData::new(vals.iter().map(|&v| Scalar::from_int(v)).collect()).unwrap()
    }

    #[test]
    fn operators_agree_with_direct_computation() {
        // cross-path oracle: matrix · coords == reduce(op(Π, ξ)) for random ξ
        let lambda = lam(&[2, 5]);
        let y = random_quadratic_field(2, 3, Some(&lambda)).unwrap();
        let pi = pullback_bivector(&y).unwrap();
        let spaces = DeformationSpaces::new(3).unwrap();
        let bracket = spaces.bracket_operator(&pi).unwrap();
        let mut rng = SplitMix64::new(11);
        for _ in 0..5 {
            let coords: Vec<Scalar> = (0..spaces.bivectors().dimension())
                .map(|_| rng.small_rational())
                .collect();
            let xi = spaces.bivectors().section_from_coords(&coords).unwrap();
            let direct = spaces
                .trivectors()
                .reduce(&pi.rep().schouten(xi.rep()).unwrap())
                .unwrap();
            let direct_coords = spaces.trivectors().coords(&direct).unwrap();
            assert_eq!(bracket.apply(&coords), direct_coords);
        }
    }

    #[test]
    fn wedge_operator_vanishes_on_p3() {
        let lambda = lam(&[2, 5]);
        let y = random_quadratic_field(2, 4, Some(&lambda)).unwrap();
        let pi = pullback_bivector(&y).unwrap();
        let spaces = DeformationSpaces::new(3).unwrap();
        let wedge = spaces.wedge_operator(&pi).unwrap();
        assert_eq!(wedge.rows(), 0);
        assert!(wedge.entries().is_empty());
    }

    #[test]
    fn zero_bivector_gives_zero_operator() {
        let spaces = DeformationSpaces::new(3).unwrap();
        let zero = spaces
            .bivectors()
            .reduce(&MultiVector::zero(4, 2))
            .unwrap();
        let op = spaces.bracket_operator(&zero).unwrap();
        assert!(op.entries().is_empty());
    }

    #[test]
    fn pi_is_tangent_to_itself() {
        let lambda = lam(&[2, 5]);
        let y = random_quadratic_field(2, 5, Some(&lambda)).unwrap();
        let pi = pullback_bivector(&y).unwrap();
        let spaces = DeformationSpaces::new(3).unwrap();
        let bracket = spaces.bracket_operator(&pi).unwrap();
        let coords = spaces.bivectors().coords(&pi).unwrap();
        assert!(bracket.apply(&coords).iter().all(Scalar::is_zero));
    }

    #[test]
    fn non_poisson_input_rejected() {
        // x2 X3^2-style bivector with nonzero self-bracket, reduced to a
        // section and fed to the tangent computation.
        let spaces = DeformationSpaces::new(3).unwrap();
        let bad = MultiVector::term(
            4,
            &[0, 1],
            Monomial::new(alloc::vec![0, 0, 2, 0]),
            Scalar::one(),
        )
        .unwrap()
        .try_add(
            &MultiVector::term(
                4,
                &[2, 3],
                Monomial::new(alloc::vec![2, 0, 0, 0]),
                Scalar::one(),
            )
            .unwrap(),
        )
        .unwrap();
        let sec = spaces.bivectors().reduce(&bad).unwrap();
        let res = spaces.tangent_poisson(&sec);
        assert!(matches!(res, Err(Error::NonPoisson { .. })));
    }

    #[test]
    fn chart_decomposition_round_trip() {
        // ξ = Π restricted: α = 0, β = affine Y
        let lambda = lam(&[2, 5]);
        let y = random_quadratic_field(2, 6, Some(&lambda)).unwrap();
        let pi = pullback_bivector(&y).unwrap();
        let n = 3;
        let pi_aff = chart_restrict(&pi, 0);
        let dec = decompose_chart(&pi_aff, n - 1).unwrap();
        assert!(dec.alpha_full().is_zero());
        let y_aff = chart_restrict(&y, 0).extend_vars(n);
        assert_eq!(dec.beta, y_aff);
        assert_eq!(dec.reassemble(), pi_aff);

        // ξ = x_fiber^2 ∂_0∧∂_1: α_2 is the constant bivector
        let xi = MultiVector::term(
            3,
            &[0, 1],
            Monomial::new(alloc::vec![0, 0, 2]),
            Scalar::one(),
        )
        .unwrap();
        let dec = decompose_chart(&xi, 2).unwrap();
        assert!(dec.alphas[0].is_zero() && dec.alphas[1].is_zero() && dec.alphas[3].is_zero());
        assert_eq!(
            dec.alphas[2],
            MultiVector::term(3, &[0, 1], Monomial::one(3), Scalar::one()).unwrap()
        );
        assert!(dec.beta.is_zero());
        assert_eq!(dec.reassemble(), xi);
    }

    #[test]
    fn chart_decomposition_rejects_high_fiber_degree() {
        let xi = MultiVector::term(
            3,
            &[0, 1],
            Monomial::new(alloc::vec![0, 0, 4]),
            Scalar::one(),
        )
        .unwrap();
        assert!(matches!(
            decompose_chart(&xi, 2),
            Err(Error::MalformedSection(_))
        ));
    }

    #[test]
    fn degenerate_p3_run_is_flagged_and_verified() {
        let report = verify_pullback_deformations(3, 1, &lam(&[2, 5]), 4).unwrap();
        assert!(report.verified());
        assert!(report.outside_scope.is_some());
        assert_eq!(report.dim_poisson, report.dim_foliation);
        assert_eq!(report.rank, 2);
        assert!(report.genericity.admissible());
        assert!(report
            .decomposition_checks
            .iter()
            .all(DecompositionChecks::all_pass));
    }

    #[test]
    fn inadmissible_eigenvalues_are_rejected() {
        // resonant tuple
        assert!(matches!(
            verify_pullback_deformations(3, 1, &lam(&[1, 1]), 4),
            Err(Error::Resonance(_))
        ));
        // origin inside the hull
        assert!(matches!(
            verify_pullback_deformations(3, 1, &lam(&[1, -1]), 4),
            Err(Error::Hypothesis(_))
        ));
        // wrong length
        assert!(matches!(
            verify_pullback_deformations(4, 1, &lam(&[2, 5]), 4),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn negative_control_fails_checks() {
        // perturb a kernel element by a non-kernel basis section and watch
        // the decomposition identities fail
        let lambda = lam(&[2, 5]);
        let report = verify_pullback_deformations(3, 2, &lambda, 4).unwrap();
        let spaces = DeformationSpaces::new(3).unwrap();
        let y = random_quadratic_field(2, 2, Some(&lambda)).unwrap();
        let y_aff = chart_restrict(&y, 0).extend_vars(3);
        let pi = pullback_bivector(&y).unwrap();
        let bracket = spaces.bracket_operator(&pi).unwrap();
        // find a basis section with nonzero bracket image
        let mut tampered = None;
        for j in 0..spaces.bivectors().dimension() {
            let mut coords = alloc::vec![Scalar::zero(); spaces.bivectors().dimension()];
            coords[j] = Scalar::one();
            if !bracket.apply(&coords).iter().all(Scalar::is_zero) {
                tampered = Some(spaces.bivectors().basis_section(j));
                break;
            }
        }
        let tampered = tampered.expect("some section moves");
        let xi = report.poisson_basis.first().expect("nonempty kernel");
        let bad = xi.rep().try_add(tampered.rep()).unwrap();
        let bad_aff = crate::projective::chart_restrict_mv(&bad, 4, 0);
        let dec = decompose_chart(&bad_aff, 2).unwrap();
        let checks = check_decomposition(&dec, &y_aff).unwrap();
        assert!(!checks.all_pass());
    }

    #[test]
    fn tampered_basis_fails_containment() {
        // inject a section outside the kernel span: the exact containment
        // solves must notice
        let lambda = lam(&[2, 5]);
        let report = verify_pullback_deformations(3, 3, &lambda, 4).unwrap();
        let spaces = DeformationSpaces::new(3).unwrap();
        let y = random_quadratic_field(2, 3, Some(&lambda)).unwrap();
        let pi = pullback_bivector(&y).unwrap();
        let bracket = spaces.bracket_operator(&pi).unwrap();
        let dim = spaces.bivectors().dimension();
        let outsider = (0..dim)
            .map(|j| {
                let mut coords = alloc::vec![Scalar::zero(); dim];
                coords[j] = Scalar::one();
                coords
            })
            .find(|coords| !bracket.apply(coords).iter().all(Scalar::is_zero))
            .expect("some direction leaves the kernel");
        let kernel_coords: Vec<Vec<Scalar>> = report
            .poisson_basis
            .iter()
            .map(|s| spaces.bivectors().coords(s).unwrap())
            .collect();
        assert!(!matrix::in_span(&kernel_coords, &outsider));
        let mut tampered = kernel_coords.clone();
        tampered.push(outsider);
        let (tampered_in_kernel, kernel_in_tampered) =
            matrix::spans_equal(&tampered, &kernel_coords);
        assert!(!tampered_in_kernel);
        assert!(kernel_in_tampered);
    }

    #[test]
    fn kernels_are_basis_order_stable() {
        // permuting the operator's columns must not change the kernel span
        let lambda = lam(&[2, 5]);
        let y = random_quadratic_field(2, 8, Some(&lambda)).unwrap();
        let pi = pullback_bivector(&y).unwrap();
        let spaces = DeformationSpaces::new(3).unwrap();
        let op = spaces.bracket_operator(&pi).unwrap();
        let dim = spaces.bivectors().dimension();
        // reverse the column order
        let permuted = ExactMatrix::from_entries(
            op.rows(),
            op.cols(),
            op.entries()
                .iter()
                .map(|(r, c, v)| (*r, dim - 1 - c, v.clone())),
        )
        .unwrap();
        let k1 = matrix::kernel_basis(&op);
        let k2: Vec<Vec<Scalar>> = matrix::kernel_basis(&permuted)
            .into_iter()
            .map(|v| {
                let mut w = v.clone();
                w.reverse();
                w
            })
            .collect();
        let (a, b) = matrix::spans_equal(&k1, &k2);
        assert!(a && b);
    }
}
