//! Concrete surfaces and families: the round sphere with its stereographic
//! atlas, flat tori, the SL(3,ℝ) Beltrami family, the normal-bundle degree,
//! the rank of the Beltrami family and the f-invariant of two metrics sharing
//! a conformal connection.

pub mod beltrami;
pub mod invariants;
pub mod random;
pub mod surface;

pub use beltrami::{
    beltrami_metric, beltrami_metric_fd, BeltramiMetric, SL3Matrix, ILL_CONDITIONED,
};
pub use invariants::{
    degree_normal_bundle, f_invariant, family_jacobian, family_rank, family_sample_points,
    flat_torus_pair, frame_components, sl3_basis, so3_basis, DegreeReport, FInvariant, FamilyRank,
    DEGREE_WARNING, TORUS_PAIR,
};
pub use surface::{
    round_metric, round_sphere, stereo_chart, stereo_embed, stereo_embed_jacobian, ModelKind,
    SurfaceModel, POLAR_CAP, SPHERE_SWITCH_RADIUS, TORUS_PERIOD,
};
