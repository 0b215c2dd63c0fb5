//! Numerical verification of curvature identities for low-regularity
//! isometric immersions.
//!
//! The crate is organized bottom-up:
//!
//! * [`chart`] – sample lattices, differential forms, finite-difference
//!   exterior calculus and quadrature on a single chart.
//! * [`geometry`] – induced metrics, Gram–Schmidt frames, connection and
//!   curvature forms, the Pfaffian, Gauss map and sphere-volume pullback.
//! * [`chern`] – the Gauss–Bonnet–Chern transgression forms and their
//!   calibration against the Pfaffian.
//! * [`degree`] – Brouwer degree of sampled maps into spheres, spherical
//!   image measures and extrinsic-curvature sums.
//! * [`fractal`] – Whitney decompositions, box dimension and integrals over
//!   domains with fractal boundary.
//! * [`mollify`] – mollification, commutator scaling scans and rough test
//!   immersions.
//! * [`harness`] – fixtures, audits and the scenario runner used by the CLI.

pub mod chart;
pub mod chern;
pub mod degree;
pub mod error;
pub mod fractal;
pub mod geometry;
pub mod harness;
pub mod mollify;

pub use error::{Error, Result};
