use nalgebra::{Vector2, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::connections::ChristoffelField;
use crate::error::{GeomError, Result};
use crate::fields::{Atlas, ChartPoint};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_STEPS: usize = 10_000;

/// Start point and unit chart direction of a geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    pub point: ChartPoint,
    direction: Vector2<f64>,
}

impl InitialCondition {
    pub fn new(point: ChartPoint, direction: Vector2<f64>) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0) || !n.is_finite() || !point.is_finite() {
            return Err(GeomError::Argument(
                "initial direction must be finite and non-zero".into(),
            ));
        }
        Ok(Self {
            point,
            direction: direction / n,
        })
    }

    pub fn direction(&self) -> Vector2<f64> {
        self.direction
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationOptions {
    pub steps: usize,
    pub dt: f64,
    /// Rescale the velocity to unit chart length after every step. This is a
    /// reparametrization, so it leaves the trace unchanged; it keeps the step
    /// size meaningful for connections whose geodesics speed up or stall.
    pub renormalize: bool,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            dt: DEFAULT_DT,
            renormalize: false,
        }
    }
}

impl IntegrationOptions {
    pub fn new(steps: usize, dt: f64) -> Self {
        Self {
            steps,
            dt,
            ..Self::default()
        }
    }

    pub fn renormalized(mut self) -> Self {
        self.renormalize = true;
        self
    }
}

/// Ordered samples of an integrated geodesic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub samples: Vec<ChartPoint>,
    /// Chart velocity at each sample.
    pub velocities: Vec<Vector2<f64>>,
    pub embedded: Option<Vec<Vector3<f64>>>,
    /// Set when the path left the atlas or the connection's domain.
    pub truncated: bool,
}

impl GeodesicPath {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Builds a path from embedded points only (chart samples are left at the
    /// origin of chart 0); used for comparing externally produced traces.
    pub fn from_embedded(points: Vec<Vector3<f64>>) -> Self {
        let n = points.len();
        Self {
            samples: vec![ChartPoint::new(0.0, 0.0); n],
            velocities: vec![Vector2::zeros(); n],
            embedded: Some(points),
            truncated: false,
        }
    }

    pub fn from_chart(samples: Vec<ChartPoint>) -> Self {
        let n = samples.len();
        Self {
            samples,
            velocities: vec![Vector2::zeros(); n],
            embedded: None,
            truncated: false,
        }
    }
}

fn acceleration(conn: &ChristoffelField, p: ChartPoint, v: &Vector2<f64>) -> Result<Vector2<f64>> {
    Ok(-conn.at(p)?.apply(v, v))
}

fn rhs(conn: &ChristoffelField, chart: usize, y: &Vector4<f64>) -> Result<Vector4<f64>> {
    let v = Vector2::new(y[2], y[3]);
    let a = acceleration(conn, ChartPoint::in_chart(y[0], y[1], chart), &v)?;
    Ok(Vector4::new(v[0], v[1], a[0], a[1]))
}

fn rk4_step(
    conn: &ChristoffelField,
    chart: usize,
    y: &Vector4<f64>,
    dt: f64,
) -> Result<Vector4<f64>> {
    let k1 = rhs(conn, chart, y)?;
    let k2 = rhs(conn, chart, &(y + k1 * (0.5 * dt)))?;
    let k3 = rhs(conn, chart, &(y + k2 * (0.5 * dt)))?;
    let k4 = rhs(conn, chart, &(y + k3 * dt))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}

/// Solves `ẍⁱ + Γⁱ_jk ẋʲẋᵏ = 0` with fixed-step RK4, switching charts
/// whenever the atlas asks to recenter. The initial chart velocity is the
/// unit direction of `ic`.
pub fn integrate_geodesic(
    conn: &ChristoffelField,
    ic: &InitialCondition,
    atlas: &dyn Atlas,
    options: &IntegrationOptions,
) -> Result<GeodesicPath> {
    if !(options.dt > 0.0) {
        return Err(GeomError::Argument(format!(
            "dt must be positive, got {}",
            options.dt
        )));
    }
    let mut p = ic.point;
    let mut v = ic.direction;
    if let Some((q, jac)) = atlas.recenter(&p) {
        p = q;
        v = jac * v;
        if options.renormalize {
            v /= v.norm();
        }
    }
    let mut samples = Vec::with_capacity(options.steps + 1);
    let mut velocities = Vec::with_capacity(options.steps + 1);
    samples.push(p);
    velocities.push(v);
    let mut truncated = false;
    for _ in 0..options.steps {
        let y = Vector4::new(p.u, p.v, v[0], v[1]);
        let next = match rk4_step(conn, p.chart, &y, options.dt) {
            Ok(next) => next,
            Err(GeomError::Domain { .. }) | Err(GeomError::SingularMetric { .. }) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        if next.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::Integration(format!(
                "non-finite state after {} steps",
                samples.len() - 1
            )));
        }
        p = ChartPoint::in_chart(next[0], next[1], p.chart);
        v = Vector2::new(next[2], next[3]);
        if let Some((q, jac)) = atlas.recenter(&p) {
            p = q;
            v = jac * v;
        }
        if !atlas.contains(&p) {
            truncated = true;
            break;
        }
        if options.renormalize {
            v /= v.norm();
        }
        samples.push(p);
        velocities.push(v);
    }
    let embedded = atlas.has_embedding().then(|| {
        samples
            .iter()
            .map(|s| atlas.embed(s).expect("atlas embeds"))
            .collect()
    });
    Ok(GeodesicPath {
        samples,
        velocities,
        embedded,
        truncated,
    })
}
