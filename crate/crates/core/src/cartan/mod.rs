//! The structure group `G`, its realization by 2-jets of fractional-linear
//! maps, Cartan connection matrices along explicit sections, their curvature
//! and flatness functions, gauge transformations and the complex form of the
//! structure equations.

pub mod gauge;
pub mod group;
pub mod structure;

pub use gauge::{
    gauge_transform, theta_general, weyl_connection_form, weyl_gauge, weyl_schouten, CartanGauge,
    FormMatrix,
};
pub use group::{fab, group_mul, jet_homomorphism_check, two_jet_of_fab, GroupElement, TwoJet};
pub use structure::{
    complexify, structure_residual, w_closed_form, ComplexForm, ComplexFrame, Complexified,
    CurvatureResidual, Cx, AREA_FLOOR,
};
