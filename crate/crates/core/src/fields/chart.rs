use nalgebra::{Matrix2, Vector2, Vector3};
use serde::{Deserialize, Serialize};

pub type ChartId = usize;

/// A point given by local coordinates `(u, v)` in a numbered chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub u: f64,
    pub v: f64,
    pub chart: ChartId,
}

impl ChartPoint {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v, chart: 0 }
    }

    pub fn in_chart(u: f64, v: f64, chart: ChartId) -> Self {
        Self { u, v, chart }
    }

    pub fn coords(&self) -> Vector2<f64> {
        Vector2::new(self.u, self.v)
    }

    pub fn shifted(&self, du: f64, dv: f64) -> Self {
        Self {
            u: self.u + du,
            v: self.v + dv,
            chart: self.chart,
        }
    }

    pub fn with_coords(&self, x: Vector2<f64>) -> Self {
        Self {
            u: x[0],
            v: x[1],
            chart: self.chart,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

/// Coordinate region on which a field may be sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    /// The whole coordinate plane of every chart.
    Plane,
    Rect {
        u: (f64, f64),
        v: (f64, f64),
    },
}

impl Domain {
    pub fn contains_with_margin(&self, p: &ChartPoint, margin: f64) -> bool {
        if !p.is_finite() {
            return false;
        }
        match self {
            Domain::Plane => true,
            Domain::Rect { u, v } => {
                p.u - margin >= u.0
                    && p.u + margin <= u.1
                    && p.v - margin >= v.0
                    && p.v + margin <= v.1
            }
        }
    }
}

/// Chart bookkeeping needed to follow a curve across an atlas.
pub trait Atlas: Send + Sync {
    /// If `p` has left the well-conditioned part of its chart, re-express it in
    /// another chart. Returns the new point and the Jacobian of the transition
    /// map evaluated at `p` (maps old chart velocities to new ones).
    fn recenter(&self, p: &ChartPoint) -> Option<(ChartPoint, Matrix2<f64>)>;

    /// Whether `p` lies in the region covered by the atlas.
    fn contains(&self, p: &ChartPoint) -> bool;

    /// Unit-norm embedding into R³ when the surface has one.
    fn embed(&self, p: &ChartPoint) -> Option<Vector3<f64>>;

    fn has_embedding(&self) -> bool {
        false
    }
}

/// Single-chart atlas on the coordinate plane, optionally bounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneAtlas {
    pub bounds: Domain,
}

impl Default for PlaneAtlas {
    fn default() -> Self {
        Self {
            bounds: Domain::Plane,
        }
    }
}

impl Atlas for PlaneAtlas {
    fn recenter(&self, _p: &ChartPoint) -> Option<(ChartPoint, Matrix2<f64>)> {
        None
    }

    fn contains(&self, p: &ChartPoint) -> bool {
        p.chart == 0 && self.bounds.contains_with_margin(p, 0.0)
    }

    fn embed(&self, _p: &ChartPoint) -> Option<Vector3<f64>> {
        None
    }
}

/// Tensor-product sample grid on a rectangle of one chart, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub chart: ChartId,
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub n: usize,
}

impl SampleGrid {
    pub fn new(u: (f64, f64), v: (f64, f64), n: usize) -> Self {
        Self { chart: 0, u, v, n }
    }

    pub fn square(half_width: f64, n: usize) -> Self {
        Self::new((-half_width, half_width), (-half_width, half_width), n)
    }

    pub fn in_chart(mut self, chart: ChartId) -> Self {
        self.chart = chart;
        self
    }

    pub fn points(&self) -> Vec<ChartPoint> {
        let n = self.n.max(1);
        let lerp = |(a, b): (f64, f64), i: usize| {
            if n == 1 {
                0.5 * (a + b)
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        };
        let mut pts = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                pts.push(ChartPoint::in_chart(
                    lerp(self.u, i),
                    lerp(self.v, j),
                    self.chart,
                ));
            }
        }
        pts
    }
}
