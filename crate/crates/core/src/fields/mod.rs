//! Chart-level tensor fields, finite-difference exterior calculus, Hodge
//! duality and quadrature.

pub mod calculus;
pub mod chart;
pub mod field;
pub mod mesh;

pub use calculus::{
    area_density, codifferential, coframe_matrix, d_oneform, d_oneform_field, d_scalar,
    d_scalar_field, hodge_star, hodge_star_2form, orthonormal_coframe, star_d, Orientation,
    DEFAULT_STEP,
};
pub use chart::{Atlas, ChartId, ChartPoint, Domain, PlaneAtlas, SampleGrid};
pub use field::{
    check_metric, conformally_flat, euclidean_metric, inverse_metric, metric_at, rescaled_metric,
    wedge, CoframeField, Field, MetricField, OneFormField, ScalarField, TwoFormField, DET_FLOOR,
};
pub use mesh::{integrate_2form, Mesh};
