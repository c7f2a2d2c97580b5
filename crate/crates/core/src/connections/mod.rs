//! Torsion-free affine connections on a chart: Levi-Civita and conformal
//! connections, the trace / ι decomposition, Weyl's projective-equivalence
//! criterion, and Ricci / Schouten curvature.

pub mod christoffel;
pub mod curvature;
pub mod tensor;

pub use christoffel::{
    conformal_connection, conformal_fit, conformality_kernel_matrix, flat_connection, iota,
    iota_embed, levi_civita, metric_covariant_derivative, metric_times_vector,
    projectively_equivalent, trace, trace_free, trace_free_part, weyl_compatibility_residual,
    weyl_compatibility_tensor, ChristoffelField, DifferenceTensor, ProjectiveReport,
    ProjectiveTest, PROJECTIVE_GRID, PROJECTIVE_TOL,
};
pub use curvature::{
    connection_form, gauss_curvature, levi_civita_form, ricci, riemann, schouten,
    schouten_from_ricci, torsion_residual, ConnectionForm, RicciData, RicciValue, SchoutenMatrix,
    CURVATURE_STEP,
};
pub use tensor::Tensor3;
