use std::fmt;
use std::ops::{Mul, Sub};
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};

use super::chart::{ChartPoint, Domain, SampleGrid};
use crate::error::{GeomError, Result};

/// Determinant floor below which a metric sample counts as singular.
pub const DET_FLOOR: f64 = 1e-12;

type Sampler<T> = dyn Fn(ChartPoint) -> Result<T> + Send + Sync;

/// A field sampled pointwise on chart coordinates.
///
/// Fields are immutable closures; cloning shares the sampler.
pub struct Field<T> {
    sampler: Arc<Sampler<T>>,
    domain: Domain,
}

impl<T> Clone for Field<T> {
    fn clone(&self) -> Self {
        Self {
            sampler: Arc::clone(&self.sampler),
            domain: self.domain,
        }
    }
}

impl<T> fmt::Debug for Field<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl<T: 'static> Field<T> {
    pub fn new(f: impl Fn(ChartPoint) -> T + Send + Sync + 'static) -> Self {
        Self::try_new(move |p| Ok(f(p)))
    }

    pub fn try_new(f: impl Fn(ChartPoint) -> Result<T> + Send + Sync + 'static) -> Self {
        Self {
            sampler: Arc::new(f),
            domain: Domain::Plane,
        }
    }

    pub fn constant(value: T) -> Self
    where
        T: Clone + Send + Sync,
    {
        Self::new(move |_| value.clone())
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn at(&self, p: ChartPoint) -> Result<T> {
        (self.sampler)(p)
    }

    pub fn map<U: 'static>(&self, f: impl Fn(T) -> U + Send + Sync + 'static) -> Field<U> {
        let this = self.clone();
        Field::try_new(move |p| this.at(p).map(&f)).with_domain(self.domain)
    }

    pub fn zip<U: 'static, V: 'static>(
        &self,
        other: &Field<U>,
        f: impl Fn(T, U) -> V + Send + Sync + 'static,
    ) -> Field<V> {
        let (a, b) = (self.clone(), other.clone());
        Field::try_new(move |p| Ok(f(a.at(p)?, b.at(p)?))).with_domain(self.domain)
    }

    /// Central-difference partial derivatives `(∂_u, ∂_v)` without a domain check.
    pub fn partials(&self, p: ChartPoint, h: f64) -> Result<(T, T)>
    where
        T: Sub<Output = T> + Mul<f64, Output = T>,
    {
        let s = 0.5 / h;
        let du = (self.at(p.shifted(h, 0.0))? - self.at(p.shifted(-h, 0.0))?) * s;
        let dv = (self.at(p.shifted(0.0, h))? - self.at(p.shifted(0.0, -h))?) * s;
        Ok((du, dv))
    }

    /// One Richardson step on top of [`Field::partials`]; error O(h⁴).
    pub fn partials_richardson(&self, p: ChartPoint, h: f64) -> Result<(T, T)>
    where
        T: Sub<Output = T> + Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let (cu, cv) = self.partials(p, h)?;
        let (fu, fv) = self.partials(p, 0.5 * h)?;
        Ok((
            fu * (4.0 / 3.0) - cu * (1.0 / 3.0),
            fv * (4.0 / 3.0) - cv * (1.0 / 3.0),
        ))
    }

    pub fn check_margin(&self, p: ChartPoint, margin: f64) -> Result<()> {
        if self.domain.contains_with_margin(&p, margin) {
            Ok(())
        } else {
            Err(GeomError::Domain {
                u: p.u,
                v: p.v,
                chart: p.chart,
                margin,
            })
        }
    }
}

impl Field<f64> {
    /// Largest absolute sample over a grid.
    pub fn sup_abs(&self, grid: &SampleGrid) -> Result<f64> {
        grid.points()
            .into_iter()
            .try_fold(0.0_f64, |m, p| Ok(m.max(self.at(p)?.abs())))
    }
}

/// Scalar function on a chart.
pub type ScalarField = Field<f64>;
/// 1-form: coefficients on `(du, dv)`.
pub type OneFormField = Field<Vector2<f64>>;
/// 2-form: coefficient on `du∧dv`.
pub type TwoFormField = Field<f64>;
/// Symmetric metric components `[[g11, g12], [g12, g22]]`.
pub type MetricField = Field<Matrix2<f64>>;
/// Rows are the coefficients of `η¹`, `η²` on `(du, dv)`.
pub type CoframeField = Field<Matrix2<f64>>;

pub fn euclidean_metric() -> MetricField {
    Field::constant(Matrix2::identity())
}

/// `exp(2σ)` times the Euclidean metric.
pub fn conformally_flat(log_factor: ScalarField) -> MetricField {
    log_factor.map(|s| Matrix2::identity() * (2.0 * s).exp())
}

/// Rescale a metric by `exp(2u)`.
pub fn rescaled_metric(g: &MetricField, u: &ScalarField) -> MetricField {
    g.zip(u, |m, s| m * (2.0 * s).exp())
}

/// Validate a metric sample: symmetric, positive definite, det above [`DET_FLOOR`].
pub fn check_metric(g: &Matrix2<f64>, p: ChartPoint) -> Result<()> {
    let det = g.determinant();
    if !(det > DET_FLOOR && g[(0, 0)] > 0.0) || !det.is_finite() {
        return Err(GeomError::SingularMetric {
            u: p.u,
            v: p.v,
            det,
        });
    }
    Ok(())
}

pub fn metric_at(g: &MetricField, p: ChartPoint) -> Result<Matrix2<f64>> {
    let m = g.at(p)?;
    check_metric(&m, p)?;
    Ok(m)
}

pub fn inverse_metric(g: &Matrix2<f64>, p: ChartPoint) -> Result<Matrix2<f64>> {
    check_metric(g, p)?;
    let det = g.determinant();
    Ok(Matrix2::new(g[(1, 1)], -g[(0, 1)], -g[(1, 0)], g[(0, 0)]) / det)
}

/// Density of `a∧b` on `du∧dv`.
#[inline]
pub fn wedge(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}
