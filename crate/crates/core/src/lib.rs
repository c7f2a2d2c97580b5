//! Projective structures and conformal connections on surfaces, computed on
//! explicit coordinate charts.
//!
//! The crate assembles conformal (Weyl) connections, tests projective
//! equivalence through the trace-free part of a difference tensor, builds
//! Cartan connection matrices in an orthonormal-coframe gauge and checks their
//! structure equations, integrates geodesics, and evaluates the normal-bundle
//! degree of a preserved conformal structure by Gauss–Bonnet quadrature.
//! Every derivative is a central finite difference of a sampled field.

pub mod cartan;
pub mod connections;
pub mod error;
pub mod fields;
pub mod geodesics;
pub mod models;
pub mod suite;

pub use error::{GeomError, Result};
