use nalgebra::{Matrix2, Matrix3, Matrix3x2, Vector3};
use serde::{Deserialize, Serialize};

use super::surface::{stereo_embed, stereo_embed_jacobian};
use crate::error::{GeomError, Result};
use crate::fields::{ChartPoint, Field, MetricField};

/// Condition number above which a Beltrami metric is flagged.
pub const ILL_CONDITIONED: f64 = 1e3;

/// Element of SL(3,ℝ); the determinant is normalized to one on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SL3Matrix(Matrix3<f64>);

impl SL3Matrix {
    /// Scales `m` by `det(m)^{-1/3}`. A negative determinant is absorbed by
    /// the (odd-dimensional) sign flip.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let det = m.determinant();
        if !det.is_finite() || det.abs() < 1e-14 {
            return Err(GeomError::Argument(format!(
                "matrix is singular (det = {det})"
            )));
        }
        Ok(Self(m / det.cbrt()))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(Matrix3::from_diagonal(&Vector3::new(a, b, c)))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn condition_number(&self) -> f64 {
        let sv = self.0.singular_values();
        sv.max() / sv.min()
    }
}

/// Pullback of the unit round metric under `x ↦ ψx/|ψx|`, in stereographic
/// chart coordinates.
#[derive(Debug, Clone)]
pub struct BeltramiMetric {
    pub psi: SL3Matrix,
    pub metric: MetricField,
    pub condition_number: f64,
    pub ill_conditioned: bool,
}

/// Differential of `x ↦ ψx/|ψx|` applied to the chart tangent vectors.
fn projective_differential(
    psi: &Matrix3<f64>,
    n: &Vector3<f64>,
    jac: &Matrix3x2<f64>,
) -> Matrix3x2<f64> {
    let y = psi * n;
    let norm = y.norm();
    let f = y / norm;
    let pj = psi * jac;
    (pj - f * (f.transpose() * pj)) / norm
}

pub fn beltrami_metric(psi: &SL3Matrix) -> BeltramiMetric {
    let m = *psi.matrix();
    let metric = Field::new(move |p: ChartPoint| {
        let n = stereo_embed(&p, 1.0);
        let df = projective_differential(&m, &n, &stereo_embed_jacobian(&p, 1.0));
        let g = df.transpose() * df;
        Matrix2::new(
            g[(0, 0)],
            0.5 * (g[(0, 1)] + g[(1, 0)]),
            0.5 * (g[(0, 1)] + g[(1, 0)]),
            g[(1, 1)],
        )
    });
    let condition_number = psi.condition_number();
    BeltramiMetric {
        psi: *psi,
        metric,
        condition_number,
        ill_conditioned: condition_number > ILL_CONDITIONED,
    }
}

/// Same pullback with the Jacobian of the chart-to-chart map taken by central
/// differences of step `h`.
pub fn beltrami_metric_fd(psi: &SL3Matrix, h: f64) -> MetricField {
    let m = *psi.matrix();
    Field::new(move |p: ChartPoint| {
        let image = |q: ChartPoint| {
            let y = m * stereo_embed(&q, 1.0);
            y / y.norm()
        };
        let du = (image(p.shifted(h, 0.0)) - image(p.shifted(-h, 0.0))) / (2.0 * h);
        let dv = (image(p.shifted(0.0, h)) - image(p.shifted(0.0, -h))) / (2.0 * h);
        Matrix2::new(du.dot(&du), du.dot(&dv), du.dot(&dv), dv.dot(&dv))
    })
}
