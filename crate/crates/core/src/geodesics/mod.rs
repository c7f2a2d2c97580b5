//! Geodesics of affine connections by fixed-step RK4 with chart switching,
//! and reparametrization-free comparison of their traces.

pub mod compare;
pub mod integrate;

pub use compare::{
    cropped_trace_distance, planarity_defect, planarity_of_points, random_initial_conditions,
    shares_geodesics, shares_geodesics_from, trace_distance, Planarity, SharingReport,
};
pub use integrate::{
    integrate_geodesic, GeodesicPath, InitialCondition, IntegrationOptions, DEFAULT_DT,
    DEFAULT_STEPS,
};
