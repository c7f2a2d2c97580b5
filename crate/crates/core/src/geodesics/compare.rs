use nalgebra::{DMatrix, Vector3};
use rand::Rng;
use rstar::primitives::Line;
use rstar::{PointDistance, RTree};
use serde::{Deserialize, Serialize};

use super::integrate::{integrate_geodesic, GeodesicPath, InitialCondition, IntegrationOptions};
use crate::connections::ChristoffelField;
use crate::error::{GeomError, Result};
use crate::fields::{Atlas, ChartPoint};
use crate::models::random::{seeded, CorpusRng};

/// Points of a path in the space used for comparison: the embedding if both
/// paths carry one, otherwise the common chart.
fn comparison_points(
    p1: &GeodesicPath,
    p2: &GeodesicPath,
) -> Result<(Vec<[f64; 3]>, Vec<[f64; 3]>)> {
    if let (Some(a), Some(b)) = (&p1.embedded, &p2.embedded) {
        let conv = |v: &Vec<Vector3<f64>>| v.iter().map(|x| [x[0], x[1], x[2]]).collect();
        return Ok((conv(a), conv(b)));
    }
    let chart = p1.samples.first().map(|s| s.chart);
    let same = |p: &GeodesicPath| p.samples.iter().all(|s| Some(s.chart) == chart);
    if !same(p1) || !same(p2) {
        return Err(GeomError::Incomparable(
            "paths span several charts and carry no embedding".into(),
        ));
    }
    let conv = |p: &GeodesicPath| p.samples.iter().map(|s| [s.u, s.v, 0.0]).collect();
    Ok((conv(p1), conv(p2)))
}

fn segments(points: &[[f64; 3]]) -> RTree<Line<[f64; 3]>> {
    if points.len() == 1 {
        return RTree::bulk_load(vec![Line::new(points[0], points[0])]);
    }
    RTree::bulk_load(points.windows(2).map(|w| Line::new(w[0], w[1])).collect())
}

fn directed(points: &[[f64; 3]], tree: &RTree<Line<[f64; 3]>>) -> f64 {
    points
        .iter()
        .map(|q| {
            tree.nearest_neighbor(q)
                .map_or(f64::INFINITY, |l| l.distance_2(q))
        })
        .fold(0.0, f64::max)
        .sqrt()
}

fn hausdorff(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    directed(a, &segments(b)).max(directed(b, &segments(a)))
}

/// Symmetric Hausdorff distance between the polylines of two traces.
pub fn trace_distance(p1: &GeodesicPath, p2: &GeodesicPath) -> Result<f64> {
    if p1.is_empty() || p2.is_empty() {
        return Err(GeomError::Argument(
            "trace_distance needs non-empty paths".into(),
        ));
    }
    let (a, b) = comparison_points(p1, p2)?;
    Ok(hausdorff(&a, &b))
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn polyline_length(points: &[[f64; 3]]) -> f64 {
    points.windows(2).map(|w| dist(&w[0], &w[1])).sum()
}

/// Initial piece of a polyline of the given length.
fn crop(points: &[[f64; 3]], length: f64) -> Vec<[f64; 3]> {
    let mut out = vec![points[0]];
    let mut acc = 0.0;
    for w in points.windows(2) {
        let d = dist(&w[0], &w[1]);
        if acc + d >= length {
            let t = if d > 0.0 { (length - acc) / d } else { 0.0 };
            out.push([0, 1, 2].map(|i| w[0][i] + t * (w[1][i] - w[0][i])));
            return out;
        }
        acc += d;
        out.push(w[1]);
    }
    out
}

/// Trace distance after cropping both paths to their common length, so that
/// two differently parametrized runs of the same geodesic compare equal.
pub fn cropped_trace_distance(p1: &GeodesicPath, p2: &GeodesicPath) -> Result<f64> {
    if p1.is_empty() || p2.is_empty() {
        return Err(GeomError::Argument(
            "trace_distance needs non-empty paths".into(),
        ));
    }
    let (a, b) = comparison_points(p1, p2)?;
    let length = polyline_length(&a).min(polyline_length(&b));
    Ok(hausdorff(&crop(&a, length), &crop(&b, length)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Planarity {
    /// `σ₃/σ₁` of the stacked embedded samples.
    pub defect: f64,
    /// The samples are (numerically) collinear: `σ₂/σ₁ < 1e-8`.
    pub degenerate: bool,
}

/// Smallest-to-largest singular value ratio of the embedded samples; zero
/// exactly when they lie in a plane through the origin.
pub fn planarity_defect(path: &GeodesicPath) -> Result<Planarity> {
    let points = path
        .embedded
        .as_ref()
        .ok_or_else(|| GeomError::Argument("planarity needs embedded samples".into()))?;
    planarity_of_points(points)
}

pub fn planarity_of_points(points: &[Vector3<f64>]) -> Result<Planarity> {
    if points.len() < 10 {
        return Err(GeomError::Argument(format!(
            "planarity needs at least 10 samples, got {}",
            points.len()
        )));
    }
    let m = DMatrix::from_fn(points.len(), 3, |i, j| points[i][j]);
    // Reduce to the 3×3 triangular factor first; its singular values are those of `m`.
    let r = m.qr().r();
    let mut s: Vec<f64> = r.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    if s[0] == 0.0 {
        return Ok(Planarity {
            defect: 0.0,
            degenerate: true,
        });
    }
    Ok(Planarity {
        defect: s[2] / s[0],
        degenerate: s[1] / s[0] < 1e-8,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharingReport {
    pub shared: bool,
    pub max_distance: f64,
    pub distances: Vec<f64>,
    pub truncated: usize,
}

/// Random initial conditions in `[−w, w]²` of the given charts, drawn in order.
pub fn random_initial_conditions(
    rng: &mut CorpusRng,
    n: usize,
    half_width: f64,
    charts: &[usize],
) -> Vec<InitialCondition> {
    (0..n)
        .map(|k| {
            let chart = charts[k % charts.len()];
            let p = ChartPoint::in_chart(
                rng.random_range(-half_width..half_width),
                rng.random_range(-half_width..half_width),
                chart,
            );
            let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            InitialCondition::new(p, nalgebra::Vector2::new(t.cos(), t.sin()))
                .expect("unit direction")
        })
        .collect()
}

/// Integrates both connections from each initial condition with the same
/// direction and compares traces. Velocities are renormalized so both runs
/// cover comparable lengths.
pub fn shares_geodesics_from(
    a: &ChristoffelField,
    b: &ChristoffelField,
    atlas: &dyn Atlas,
    ics: &[InitialCondition],
    tol: f64,
    options: &IntegrationOptions,
) -> Result<SharingReport> {
    let options = options.renormalized();
    let mut distances = Vec::with_capacity(ics.len());
    let mut truncated = 0;
    for ic in ics {
        let p1 = integrate_geodesic(a, ic, atlas, &options)?;
        let p2 = integrate_geodesic(b, ic, atlas, &options)?;
        truncated += usize::from(p1.truncated) + usize::from(p2.truncated);
        distances.push(cropped_trace_distance(&p1, &p2)?);
    }
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    Ok(SharingReport {
        shared: max_distance < tol,
        max_distance,
        distances,
        truncated,
    })
}

/// [`shares_geodesics_from`] over `n_samples` initial conditions drawn from
/// `seed` in `[−1, 1]²` of chart 0.
pub fn shares_geodesics(
    a: &ChristoffelField,
    b: &ChristoffelField,
    atlas: &dyn Atlas,
    n_samples: usize,
    tol: f64,
    seed: u64,
    options: &IntegrationOptions,
) -> Result<SharingReport> {
    let ics = random_initial_conditions(&mut seeded(seed), n_samples, 1.0, &[0]);
    shares_geodesics_from(a, b, atlas, &ics, tol, options)
}
