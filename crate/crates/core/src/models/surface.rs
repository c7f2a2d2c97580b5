use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Matrix3x2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::fields::{Atlas, ChartPoint, Field, Mesh, MetricField};

/// Chart switching threshold on the sphere, in units of the radius.
pub const SPHERE_SWITCH_RADIUS: f64 = 2.0;
/// Angular radius of the polar caps excluded from the latitude–longitude grid.
pub const POLAR_CAP: f64 = 1e-3;
pub const TORUS_PERIOD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    /// Two stereographic charts: chart 0 projects from the north pole (south
    /// pole at the origin), chart 1 from the south pole. The transition
    /// `(u, v) ↦ r²(u, −v)/(u² + v²)` is orientation preserving.
    Sphere {
        radius: f64,
    },
    /// Unit-period square `[0, 1)²` with periodic coordinates.
    Torus,
    Plane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceModel {
    pub name: String,
    pub kind: ModelKind,
    pub euler_characteristic: i32,
}

impl SurfaceModel {
    pub fn sphere(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(GeomError::Argument(format!(
                "sphere radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            name: "sphere".into(),
            kind: ModelKind::Sphere { radius },
            euler_characteristic: 2,
        })
    }

    pub fn torus() -> Self {
        Self {
            name: "torus".into(),
            kind: ModelKind::Torus,
            euler_characteristic: 0,
        }
    }

    pub fn plane() -> Self {
        Self {
            name: "flat".into(),
            kind: ModelKind::Plane,
            euler_characteristic: 1,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "sphere" => Self::sphere(1.0),
            "torus" => Ok(Self::torus()),
            "flat" | "plane" => Ok(Self::plane()),
            other => Err(GeomError::Argument(format!("unknown model {other:?}"))),
        }
    }

    pub fn is_closed(&self) -> bool {
        !matches!(self.kind, ModelKind::Plane)
    }

    /// Re-express a sphere point in the other stereographic chart.
    pub fn transition(&self, p: &ChartPoint) -> Option<ChartPoint> {
        match self.kind {
            ModelKind::Sphere { radius } => {
                let r2 = p.u * p.u + p.v * p.v;
                if r2 == 0.0 {
                    return None;
                }
                let s = radius * radius / r2;
                Some(ChartPoint::in_chart(s * p.u, -s * p.v, 1 - p.chart.min(1)))
            }
            _ => None,
        }
    }

    /// Jacobian of [`SurfaceModel::transition`] at `p`.
    pub fn transition_jacobian(&self, p: &ChartPoint) -> Option<Matrix2<f64>> {
        match self.kind {
            ModelKind::Sphere { radius } => {
                let r2 = p.u * p.u + p.v * p.v;
                if r2 == 0.0 {
                    return None;
                }
                let s = radius * radius / (r2 * r2);
                let a = s * (p.v * p.v - p.u * p.u);
                let b = s * 2.0 * p.u * p.v;
                Some(Matrix2::new(a, -b, b, a))
            }
            _ => None,
        }
    }

    /// Quadrature mesh. On the sphere `resolution = (n_longitude, n_colatitude)`
    /// midpoint cells between the polar caps, plus one node per cap carrying
    /// the cap's chart area. On the torus a periodic `n × n` midpoint grid.
    pub fn mesh(&self, resolution: (usize, usize)) -> Result<Mesh> {
        let (n_lon, n_lat) = resolution;
        match self.kind {
            ModelKind::Sphere { radius } => sphere_mesh(radius, n_lon, n_lat),
            ModelKind::Torus => Mesh::rectangle(
                0,
                (0.0, TORUS_PERIOD),
                (0.0, TORUS_PERIOD),
                n_lon,
                n_lat,
                (true, true),
            ),
            ModelKind::Plane => Err(GeomError::Argument(
                "the plane model is not closed; no global mesh".into(),
            )),
        }
    }
}

impl Atlas for SurfaceModel {
    fn recenter(&self, p: &ChartPoint) -> Option<(ChartPoint, Matrix2<f64>)> {
        match self.kind {
            ModelKind::Sphere { radius } => {
                let limit = SPHERE_SWITCH_RADIUS * radius;
                if p.u * p.u + p.v * p.v > limit * limit {
                    Some((self.transition(p)?, self.transition_jacobian(p)?))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn contains(&self, p: &ChartPoint) -> bool {
        p.is_finite()
            && match self.kind {
                ModelKind::Sphere { .. } => p.chart <= 1,
                _ => p.chart == 0,
            }
    }

    fn embed(&self, p: &ChartPoint) -> Option<Vector3<f64>> {
        match self.kind {
            ModelKind::Sphere { radius } => Some(stereo_embed(p, radius)),
            _ => None,
        }
    }

    fn has_embedding(&self) -> bool {
        matches!(self.kind, ModelKind::Sphere { .. })
    }
}

fn chart_rotation(chart: usize) -> Matrix3<f64> {
    if chart == 0 {
        Matrix3::identity()
    } else {
        Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0))
    }
}

/// Unit vector of a stereographic chart point on the sphere of radius `r`.
pub fn stereo_embed(p: &ChartPoint, radius: f64) -> Vector3<f64> {
    let (x, y) = (p.u / radius, p.v / radius);
    let q = x * x + y * y;
    chart_rotation(p.chart) * Vector3::new(2.0 * x, 2.0 * y, q - 1.0) / (1.0 + q)
}

/// Derivative of [`stereo_embed`] with respect to `(u, v)`.
pub fn stereo_embed_jacobian(p: &ChartPoint, radius: f64) -> Matrix3x2<f64> {
    let (x, y) = (p.u / radius, p.v / radius);
    let q = x * x + y * y;
    let d = 1.0 + q;
    let d2 = d * d;
    // ∂/∂x and ∂/∂y of (2x, 2y, q − 1)/(1 + q)
    let jx = Vector3::new(2.0 * (d - 2.0 * x * x), -4.0 * x * y, 4.0 * x) / d2;
    let jy = Vector3::new(-4.0 * x * y, 2.0 * (d - 2.0 * y * y), 4.0 * y) / d2;
    chart_rotation(p.chart) * Matrix3x2::from_columns(&[jx, jy]) / radius
}

/// Chart coordinates of a unit vector, in the chart where it is farthest from
/// the projection pole.
pub fn stereo_chart(n: &Vector3<f64>, radius: f64) -> ChartPoint {
    let chart = if n[2] <= 0.0 { 0 } else { 1 };
    let m = chart_rotation(chart) * n;
    let s = radius / (1.0 - m[2]);
    ChartPoint::in_chart(s * m[0], s * m[1], chart)
}

/// Round metric `4r⁴/(r² + u² + v²)² (du² + dv²)`, identical in both charts.
pub fn round_metric(radius: f64) -> MetricField {
    Field::new(move |p: ChartPoint| {
        let r2 = radius * radius;
        let c = 4.0 * r2 * r2 / (r2 + p.u * p.u + p.v * p.v).powi(2);
        Matrix2::identity() * c
    })
}

/// Round sphere of the given radius with its metric.
pub fn round_sphere(radius: f64) -> Result<(SurfaceModel, MetricField)> {
    Ok((SurfaceModel::sphere(radius)?, round_metric(radius)))
}

fn sphere_mesh(radius: f64, n_lon: usize, n_lat: usize) -> Result<Mesh> {
    if n_lon == 0 || n_lat < 2 {
        return Err(GeomError::Argument(
            "sphere mesh needs n_lon ≥ 1 and n_lat ≥ 2".into(),
        ));
    }
    let eps = POLAR_CAP;
    let d_theta = (PI - 2.0 * eps) / n_lat as f64;
    let d_phi = 2.0 * PI / n_lon as f64;
    let r2 = radius * radius;
    let mut nodes = Vec::with_capacity(n_lon * n_lat + 2);
    let mut weights = Vec::with_capacity(n_lon * n_lat + 2);
    for j in 0..n_lat {
        // colatitude measured from the north pole
        let theta = eps + (j as f64 + 0.5) * d_theta;
        for i in 0..n_lon {
            let phi = (i as f64 + 0.5) * d_phi;
            let n = Vector3::new(
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            );
            let p = stereo_chart(&n, radius);
            let q = p.u * p.u + p.v * p.v;
            let sqrt_g = 4.0 * r2 * r2 / (r2 + q).powi(2);
            // chart area = surface area / √det g
            weights.push(r2 * theta.sin() * d_theta * d_phi / sqrt_g);
            nodes.push(p);
        }
    }
    // Each cap becomes one node at its pole weighted by the cap's chart area
    // (a disk of radius r·tan(ε/2)); the error is O(ε⁴).
    let cap = PI * r2 * (0.5 * eps).tan().powi(2);
    for chart in [0, 1] {
        nodes.push(ChartPoint::in_chart(0.0, 0.0, chart));
        weights.push(cap);
    }
    Mesh::new(nodes, weights, (true, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{area_density, integrate_2form};

    #[test]
    fn transition_round_trip() {
        let m = SurfaceModel::sphere(1.3).unwrap();
        for &(u, v) in &[(0.3, -0.2), (2.5, 1.0), (-4.0, 7.0)] {
            let p = ChartPoint::new(u, v);
            let q = m.transition(&p).unwrap();
            assert_eq!(q.chart, 1);
            let back = m.transition(&q).unwrap();
            assert!((back.u - u).abs() < 1e-12 && (back.v - v).abs() < 1e-12);
            assert_eq!(back.chart, 0);
            assert!((stereo_embed(&p, 1.3) - stereo_embed(&q, 1.3)).norm() < 1e-12);
        }
    }

    #[test]
    fn transition_jacobian_matches_differences() {
        let m = SurfaceModel::sphere(1.0).unwrap();
        let p = ChartPoint::new(0.7, -1.1);
        let j = m.transition_jacobian(&p).unwrap();
        let h = 1e-6;
        let f = |q: ChartPoint| m.transition(&q).unwrap().coords();
        let du = (f(p.shifted(h, 0.0)) - f(p.shifted(-h, 0.0))) / (2.0 * h);
        let dv = (f(p.shifted(0.0, h)) - f(p.shifted(0.0, -h))) / (2.0 * h);
        assert!((j.column(0) - du).norm() < 1e-8);
        assert!((j.column(1) - dv).norm() < 1e-8);
        assert!(j.determinant() > 0.0);
    }

    #[test]
    fn embedding_is_unit_and_inverted_by_chart() {
        for chart in [0, 1] {
            let p = ChartPoint::in_chart(0.4, 0.9, chart);
            let n = stereo_embed(&p, 2.0);
            assert!((n.norm() - 1.0).abs() < 1e-14);
            let q = stereo_chart(&n, 2.0);
            let back = if q.chart == chart {
                q
            } else {
                SurfaceModel::sphere(2.0).unwrap().transition(&q).unwrap()
            };
            assert!((back.coords() - p.coords()).norm() < 1e-12);
        }
    }

    #[test]
    fn embedding_jacobian_matches_differences() {
        let p = ChartPoint::in_chart(0.35, -0.6, 1);
        let j = stereo_embed_jacobian(&p, 1.5);
        let h = 1e-6;
        let du = (stereo_embed(&p.shifted(h, 0.0), 1.5) - stereo_embed(&p.shifted(-h, 0.0), 1.5))
            / (2.0 * h);
        let dv = (stereo_embed(&p.shifted(0.0, h), 1.5) - stereo_embed(&p.shifted(0.0, -h), 1.5))
            / (2.0 * h);
        assert!((j.column(0) - du).norm() < 1e-8);
        assert!((j.column(1) - dv).norm() < 1e-8);
    }

    #[test]
    fn sphere_area_converges_at_second_order() {
        let (model, g) = round_sphere(1.0).unwrap();
        let area = area_density(&g);
        let err = |n: usize| {
            let mesh = model.mesh((2 * n, n)).unwrap();
            (integrate_2form(&area, &mesh).unwrap() - 4.0 * PI).abs()
        };
        let (e1, e2) = (err(50), err(100));
        assert!(e2 / (4.0 * PI) < 1e-3);
        assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn unknown_model_name() {
        assert!(SurfaceModel::by_name("klein-bottle").is_err());
        assert!(SurfaceModel::sphere(0.0).is_err());
    }
}
