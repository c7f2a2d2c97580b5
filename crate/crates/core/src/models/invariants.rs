use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, Matrix3, Vector2};
use serde::{Deserialize, Serialize};

use super::beltrami::{beltrami_metric, SL3Matrix};
use super::surface::SurfaceModel;
use crate::connections::{
    conformal_connection, gauss_curvature, weyl_compatibility_residual, CURVATURE_STEP,
};
use crate::error::{GeomError, Result};
use crate::fields::{
    codifferential, integrate_2form, metric_at, orthonormal_coframe, ChartPoint, Field,
    MetricField, OneFormField, Orientation, SampleGrid, ScalarField, DEFAULT_STEP,
};

/// Constants `(a, b, c)` of the second flat torus metric `a du² + 2b du dv + c dv²`.
pub const TORUS_PAIR: (f64, f64, f64) = (2.0, 0.3, 1.0);
/// Distance from the nearest integer above which a degree is flagged.
pub const DEGREE_WARNING: f64 = 0.1;

/// `du² + dv²` and `2du² + 0.6 du dv + dv²`: flat, with identical (zero)
/// Christoffel symbols, and not conformal to each other.
pub fn flat_torus_pair() -> (MetricField, MetricField) {
    let (a, b, c) = TORUS_PAIR;
    (
        Field::constant(Matrix2::identity()),
        Field::constant(Matrix2::new(a, b, b, c)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub raw: f64,
    pub degree: i64,
    /// `raw` is more than [`DEGREE_WARNING`] from `degree`.
    pub precision_warning: bool,
}

/// `−(1/π)∫(δβ − K)dμ` by mesh quadrature: the degree of the normal bundle of
/// the holomorphic curve defined by `[g]`, which equals `2χ`.
pub fn degree_normal_bundle(
    model: &SurfaceModel,
    g: &MetricField,
    beta: &OneFormField,
    resolution: (usize, usize),
) -> Result<DegreeReport> {
    if !model.is_closed() {
        return Err(GeomError::Argument(format!(
            "model '{}' is not closed",
            model.name
        )));
    }
    let mesh = model.mesh(resolution)?;
    let k = gauss_curvature(g, CURVATURE_STEP);
    let delta = codifferential(beta, g, Orientation::Positive, DEFAULT_STEP);
    let g2 = g.clone();
    let integrand = Field::try_new(move |p: ChartPoint| {
        let area = metric_at(&g2, p)?.determinant().sqrt();
        Ok((delta.at(p)? - k.at(p)?) * area)
    });
    let raw = -integrate_2form(&integrand, &mesh)? / PI;
    let degree = raw.round() as i64;
    Ok(DegreeReport {
        raw,
        degree,
        precision_warning: (raw - degree as f64).abs() > DEGREE_WARNING,
    })
}

/// Frame components `E⁻ᵀ h E⁻¹` of `h` in the orthonormal coframe of `g`.
pub fn frame_components(g: &MetricField, h: &MetricField) -> Field<Matrix2<f64>> {
    orthonormal_coframe(g).zip(h, |e, h| {
        let f = e.try_inverse().expect("coframe is invertible");
        f.transpose() * h * f
    })
}

#[derive(Debug, Clone)]
pub struct FInvariant {
    /// `(h₁₁ − h₂₂)² + 4h₁₂²` in the `g`-orthonormal coframe.
    pub f: ScalarField,
    /// Sup over the grid of `|df − 4f(α − β)|`.
    pub identity_residual: f64,
    /// Sup over the grid of `|∇h − 2α⊗h|` for `∇ = ^{(g,β)}∇`.
    pub precondition_residual: f64,
    pub precondition_failed: bool,
}

/// Evaluates the f-invariant of two metrics and its derivative identity
/// `df = 4f(α − β)` on `grid`. The identity only applies when `^{(g,β)}∇`
/// also preserves `h` with 1-form `α`; that is checked against `tol`.
pub fn f_invariant(
    g: &MetricField,
    h: &MetricField,
    beta: &OneFormField,
    alpha: &OneFormField,
    grid: &SampleGrid,
    tol: f64,
) -> Result<FInvariant> {
    let step = DEFAULT_STEP;
    let f =
        frame_components(g, h).map(|m| (m[(0, 0)] - m[(1, 1)]).powi(2) + 4.0 * m[(0, 1)].powi(2));
    let conn = conformal_connection(g, beta, step);
    let compat = weyl_compatibility_residual(&conn, h, alpha, step);
    let mut identity_residual = 0.0_f64;
    let mut precondition_residual = 0.0_f64;
    for p in grid.points() {
        let (fu, fv) = f.partials(p, step)?;
        let expected = (alpha.at(p)? - beta.at(p)?) * (4.0 * f.at(p)?);
        identity_residual = identity_residual.max((Vector2::new(fu, fv) - expected).amax());
        precondition_residual = precondition_residual.max(compat.at(p)?);
    }
    Ok(FInvariant {
        f,
        identity_residual,
        precondition_residual,
        precondition_failed: precondition_residual > tol,
    })
}

/// Twelve fixed sample points, six in each stereographic chart.
pub fn family_sample_points() -> Vec<ChartPoint> {
    let mut pts = Vec::with_capacity(12);
    for chart in 0..2 {
        for k in 0..6 {
            let t = k as f64 * PI / 3.0 + 0.2 * chart as f64;
            let r = 0.4 + 0.15 * k as f64;
            pts.push(ChartPoint::in_chart(r * t.cos(), r * t.sin(), chart));
        }
    }
    pts
}

fn unit(i: usize, j: usize) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    m[(i, j)] = 1.0;
    m
}

/// Basis of `sl(3,ℝ)`: the six off-diagonal units and two traceless diagonals.
pub fn sl3_basis() -> Vec<Matrix3<f64>> {
    let mut b: Vec<_> = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
        .iter()
        .map(|&(i, j)| unit(i, j))
        .collect();
    b.push(unit(0, 0) - unit(1, 1));
    b.push(unit(1, 1) - unit(2, 2));
    b
}

/// Basis of `so(3)`.
pub fn so3_basis() -> Vec<Matrix3<f64>> {
    [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| unit(i, j) - unit(j, i))
        .collect()
}

fn sampled_metric(psi: &SL3Matrix, points: &[ChartPoint]) -> Result<Vec<f64>> {
    let g = beltrami_metric(psi).metric;
    let mut out = Vec::with_capacity(3 * points.len());
    for &p in points {
        let m = g.at(p)?;
        out.extend([m[(0, 0)], m[(0, 1)], m[(1, 1)]]);
    }
    Ok(out)
}

/// Central-difference Jacobian of `X ↦ metric(exp(tX)·base)` at `t = 0`,
/// one column per generator, rows = sampled metric components.
pub fn family_jacobian(
    base: &SL3Matrix,
    generators: &[Matrix3<f64>],
    step: f64,
) -> Result<DMatrix<f64>> {
    let points = family_sample_points();
    let mut jac = DMatrix::zeros(3 * points.len(), generators.len());
    for (c, x) in generators.iter().enumerate() {
        let plus = SL3Matrix::new((x * step).exp() * base.matrix())?;
        let minus = SL3Matrix::new((x * -step).exp() * base.matrix())?;
        let (a, b) = (
            sampled_metric(&plus, &points)?,
            sampled_metric(&minus, &points)?,
        );
        for r in 0..a.len() {
            jac[(r, c)] = (a[r] - b[r]) / (2.0 * step);
        }
    }
    Ok(jac)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRank {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// `σ_rank / σ_{rank+1}` at the largest gap.
    pub gap_ratio: f64,
    /// `gap_ratio < 10`.
    pub inconclusive: bool,
}

/// Numerical rank of the Beltrami family at `base`, by the largest
/// singular-value gap of [`family_jacobian`] over `sl(3,ℝ)`.
pub fn family_rank(base: &SL3Matrix, fd_step: f64) -> Result<FamilyRank> {
    let jac = family_jacobian(base, &sl3_basis(), fd_step)?;
    let mut s: Vec<f64> = jac.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let floor = s[0] * f64::EPSILON;
    let (mut rank, mut gap_ratio) = (s.len(), 1.0);
    for k in 0..s.len() - 1 {
        let ratio = s[k] / s[k + 1].max(floor);
        if ratio > gap_ratio {
            gap_ratio = ratio;
            rank = k + 1;
        }
    }
    Ok(FamilyRank {
        rank,
        singular_values: s,
        gap_ratio,
        inconclusive: gap_ratio < 10.0,
    })
}
