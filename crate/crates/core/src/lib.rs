//! Symmetric Beltrami fields on model Riemannian 3-manifolds.
//!
//! The crate builds curl eigenfields that commute with a Killing symmetry on
//! the flat 3-torus and the round 3-sphere, verifies the identities behind
//! their existence, and probes the invariant-torus structure of their flows:
//!
//! * [`calculus`]: pointwise chart calculus (grad/div/curl/Lie bracket,
//!   Killing and identity residuals) with analytic or finite-difference
//!   derivatives;
//! * [`spectral`]: exact band-limited calculus on the torus, curl⁻¹, helicity;
//! * [`symmetry`] / [`operator`]: symmetric subspaces and the discrete
//!   π∘curl⁻¹ eigenproblem;
//! * [`catalog`]: closed-form Killing fields (translations, the Hopf field,
//!   a rotation patch);
//! * [`scalar_eigen`]: the symmetry-constrained Laplacian eigenproblem and
//!   the quadratic Beltrami constructor with its inverse;
//! * [`fieldline`]: adaptive field-line integration, Poincaré sections,
//!   rotation-number classification;
//! * [`structure`]: first integrals, critical scans, level components and
//!   the gradient-flow chamber fibration.

pub mod calculus;
pub mod catalog;
pub mod error;
pub mod field;
pub mod fieldline;
pub mod linalg;
pub mod manifold;
pub mod operator;
pub mod scalar_eigen;
pub mod spectral;
pub mod structure;
pub mod symmetry;

pub use error::{Error, Result};
