//! Numerical laboratory for structurally stable diffeomorphisms.
//!
//! The crate is organised around a small catalog of concrete maps on the
//! circle, the 2-torus and their product:
//!
//! * [`geometry`] — phase spaces, wrap-around metrics and deterministic
//!   samplers shared by everything else.
//! * [`catalog`] — the concrete diffeomorphisms (hyperbolic toral
//!   automorphisms, north-south circle maps, derived-from-Anosov
//!   deformations, products) with exact forward and inverse evaluation.
//! * [`conjugacy`] — the `d0` metric on homeomorphisms, a fixed-point
//!   solver producing conjugacies between a linear toral automorphism and
//!   its small perturbations, and the conjugacy-space machinery `F_h`,
//!   `Ψ_{f,g}`.
//! * [`centralizer`] — explicit commuting homeomorphisms (fundamental
//!   domain extensions, bump pushes along stable fibers, product lifts)
//!   and numerical discreteness probes.
//! * [`expansive`] — separation-time searches, dense-expansiveness and
//!   sensitivity probes, shrinking-ball certificates and homoclinic point
//!   enumeration.
//! * [`chains`] — a line-oriented language for declared spectral
//!   decompositions plus the combinatorial decision procedures on the
//!   order relation between basic pieces.
//! * [`verify`] — the executable acceptance checks used by the test suite
//!   and the `stab verify` command.

pub mod catalog;
pub mod centralizer;
pub mod chains;
pub mod conjugacy;
pub mod expansive;
pub mod geometry;
pub mod verify;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite coordinate")]
    NonFiniteCoordinate,
    #[error("space mismatch")]
    SpaceMismatch,
    #[error("empty sampler")]
    EmptySampler,
    #[error("not hyperbolic")]
    NotHyperbolic,
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("inverse solve failed")]
    InverseSolveFailed,
    #[error("perturbation too large")]
    PerturbationTooLarge,
    #[error("degenerate pair")]
    DegeneratePair,
    #[error("fixed point has no transit time")]
    FixedPointTransit,
    #[error("no certificate needed at this scale")]
    CertificateScale,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("spectral spec invalid: {}", format_violations(.0))]
    InvalidSpec(Vec<chains::Violation>),
}

fn format_violations(violations: &[chains::Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
