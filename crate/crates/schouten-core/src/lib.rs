//! Exact symbolic calculus for polynomial multivector fields.
//!
//! Everything in this crate computes over exact scalars (rationals and
//! Gaussian rationals); there is no floating point anywhere. The crate is
//! `no_std` (with `alloc`): all IO, parsing and report formats live in the
//! companion CLI crate.
//!
//! The main layers, bottom up:
//!
//! * [`scalar`], [`poly`], [`matrix`] — exact arithmetic, sparse multivariate
//!   polynomials, and fraction-free linear algebra.
//! * [`multivector`] — polynomial multivector fields with wedge product,
//!   Schouten bracket, contraction and generic rank.
//! * [`projective`] — finite-dimensional models of global multivector fields
//!   on projective space (homogeneous representatives modulo the radial
//!   ideal), affine chart restriction, and the pull-back bivector
//!   construction.
//! * [`poincare`] — resonance certificates, convex-hull domain tests, the
//!   diagonal adjoint operator and its homological solves, wedge division,
//!   and truncated formal linearization.
//! * [`deformation`] — tangent spaces of the Poisson and foliation loci as
//!   exact kernels, chart decompositions, and the end-to-end verification of
//!   first-order deformation coincidence for pull-back structures.

#![no_std]

extern crate alloc;

pub mod deformation;
pub mod error;
pub mod matrix;
pub mod multivector;
pub mod poincare;
pub mod poly;
pub mod projective;
pub mod sampling;
pub mod scalar;

pub use error::Error;
pub use multivector::MultiVector;
pub use poly::{Monomial, Polynomial};
pub use scalar::Scalar;
