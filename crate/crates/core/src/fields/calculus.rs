//! Exterior calculus on a chart by central finite differences.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * on a positively oriented orthonormal coframe, `⋆η¹ = η²` and `⋆η² = −η¹`;
//! * `⋆(η¹∧η²) = 1`;
//! * the codifferential on 1-forms is `δ = −⋆d⋆`, so `δβ = −div β♯`.
//!
//! [`Orientation::Reversed`] flips the sign of `⋆` and exists for auditing
//! sign-sensitive identities. `δ` is unaffected by it.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::chart::ChartPoint;
use super::field::{
    check_metric, metric_at, CoframeField, Field, MetricField, OneFormField, ScalarField,
    TwoFormField,
};
use crate::error::Result;

/// Default step for first derivatives of sampled fields.
pub const DEFAULT_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Orientation {
    #[default]
    Positive,
    Reversed,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Reversed => -1.0,
        }
    }
}

/// `df` at `p`, as coefficients on `(du, dv)`.
pub fn d_scalar(f: &ScalarField, p: ChartPoint, h: f64) -> Result<Vector2<f64>> {
    f.check_margin(p, h)?;
    let (du, dv) = f.partials(p, h)?;
    Ok(Vector2::new(du, dv))
}

/// Density of `dω` at `p`: `∂_u ω_v − ∂_v ω_u`.
pub fn d_oneform(omega: &OneFormField, p: ChartPoint, h: f64) -> Result<f64> {
    omega.check_margin(p, h)?;
    let (du, dv) = omega.partials(p, h)?;
    Ok(du[1] - dv[0])
}

pub fn d_scalar_field(f: &ScalarField, h: f64) -> OneFormField {
    let f = f.clone();
    let domain = *f.domain();
    Field::try_new(move |p| {
        let (du, dv) = f.partials(p, h)?;
        Ok(Vector2::new(du, dv))
    })
    .with_domain(domain)
}

pub fn d_oneform_field(omega: &OneFormField, h: f64) -> TwoFormField {
    let omega = omega.clone();
    let domain = *omega.domain();
    Field::try_new(move |p| {
        let (du, dv) = omega.partials(p, h)?;
        Ok(du[1] - dv[0])
    })
    .with_domain(domain)
}

/// Lower-triangular `E` with `EᵀE = g`; rows of `E` are the coefficients of
/// the coframe `(η¹, η²)`, and `det E > 0`.
pub fn coframe_matrix(g: &Matrix2<f64>, p: ChartPoint) -> Result<Matrix2<f64>> {
    check_metric(g, p)?;
    let e22 = g[(1, 1)].sqrt();
    let e21 = g[(0, 1)] / e22;
    let e11 = (g[(0, 0)] - e21 * e21).sqrt();
    Ok(Matrix2::new(e11, 0.0, e21, e22))
}

pub fn orthonormal_coframe(g: &MetricField) -> CoframeField {
    let g = g.clone();
    let domain = *g.domain();
    Field::try_new(move |p| coframe_matrix(&g.at(p)?, p)).with_domain(domain)
}

/// `⋆ω` at a point, given the metric there.
pub fn hodge_star_at(
    omega: &Vector2<f64>,
    g: &Matrix2<f64>,
    orientation: Orientation,
    p: ChartPoint,
) -> Result<Vector2<f64>> {
    let e = coframe_matrix(g, p)?;
    let det = e[(0, 0)] * e[(1, 1)];
    // frame components w = E^{-T} ω, with E lower triangular
    let w2 = omega[1] / e[(1, 1)];
    let w1 = (omega[0] - e[(1, 0)] * w2) / e[(0, 0)];
    debug_assert!(det > 0.0);
    // ⋆(w1 η¹ + w2 η²) = −w2 η¹ + w1 η², back to coordinates via Eᵀ
    let s = orientation.sign();
    Ok(e.transpose() * Vector2::new(-w2, w1) * s)
}

/// `⋆σ` for a 2-form density `σ`: `σ / √det g`.
pub fn hodge_star_2form_at(
    density: f64,
    g: &Matrix2<f64>,
    orientation: Orientation,
    p: ChartPoint,
) -> Result<f64> {
    check_metric(g, p)?;
    Ok(orientation.sign() * density / g.determinant().sqrt())
}

pub fn hodge_star(omega: &OneFormField, g: &MetricField, orientation: Orientation) -> OneFormField {
    let (omega, g) = (omega.clone(), g.clone());
    let domain = *omega.domain();
    Field::try_new(move |p| hodge_star_at(&omega.at(p)?, &g.at(p)?, orientation, p))
        .with_domain(domain)
}

pub fn hodge_star_2form(
    sigma: &TwoFormField,
    g: &MetricField,
    orientation: Orientation,
) -> ScalarField {
    let (sigma, g) = (sigma.clone(), g.clone());
    let domain = *sigma.domain();
    Field::try_new(move |p| hodge_star_2form_at(sigma.at(p)?, &g.at(p)?, orientation, p))
        .with_domain(domain)
}

/// `δβ = −⋆d⋆β`.
pub fn codifferential(
    beta: &OneFormField,
    g: &MetricField,
    orientation: Orientation,
    h: f64,
) -> ScalarField {
    let star_beta = hodge_star(beta, g, orientation);
    let d_star = d_oneform_field(&star_beta, h);
    hodge_star_2form(&d_star, g, orientation).map(|x| -x)
}

/// `⋆dβ`, the scalar coefficient of `dβ` against the area form.
pub fn star_d(beta: &OneFormField, g: &MetricField, h: f64) -> ScalarField {
    hodge_star_2form(&d_oneform_field(beta, h), g, Orientation::Positive)
}

/// Area density `√det g` on `du∧dv`.
pub fn area_density(g: &MetricField) -> TwoFormField {
    let g = g.clone();
    let domain = *g.domain();
    Field::try_new(move |p| Ok(metric_at(&g, p)?.determinant().sqrt())).with_domain(domain)
}

/// `g⁻¹`-raised vector of a 1-form at a point.
pub fn sharp_at(beta: &Vector2<f64>, g: &Matrix2<f64>, p: ChartPoint) -> Result<Vector2<f64>> {
    Ok(super::field::inverse_metric(g, p)? * beta)
}
