//! Seeded generators for test corpora.
//!
//! All draws come from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha), so a
//! port that reproduces ChaCha8 and the draw order reproduces every corpus.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::beltrami::SL3Matrix;
use super::surface::{stereo_embed, stereo_embed_jacobian};
use crate::fields::{ChartPoint, Field, MetricField, OneFormField, ScalarField};

pub type CorpusRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Σ aₘ sin(kₘ·x + cₘ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    terms: Vec<(f64, Vector2<f64>, f64)>,
}

impl TrigPolynomial {
    /// Random frequencies in `[−max_freq, max_freq]²`, amplitudes summing to
    /// at most `amplitude`.
    pub fn random(rng: &mut CorpusRng, n_terms: usize, max_freq: f64, amplitude: f64) -> Self {
        let terms = (0..n_terms)
            .map(|_| {
                let k = Vector2::new(
                    rng.random_range(-max_freq..max_freq),
                    rng.random_range(-max_freq..max_freq),
                );
                let a = amplitude / n_terms as f64 * rng.random_range(0.5..1.0);
                (a, k, rng.random_range(0.0..2.0 * PI))
            })
            .collect();
        Self { terms }
    }

    /// Random integer wave vectors times 2π: periodic on the unit torus.
    pub fn random_periodic(
        rng: &mut CorpusRng,
        n_terms: usize,
        max_mode: i32,
        amplitude: f64,
    ) -> Self {
        let terms = (0..n_terms)
            .map(|_| {
                let k = Vector2::new(
                    rng.random_range(-max_mode..=max_mode) as f64,
                    rng.random_range(-max_mode..=max_mode) as f64,
                ) * (2.0 * PI);
                let a = amplitude / n_terms as f64 * rng.random_range(0.5..1.0);
                (a, k, rng.random_range(0.0..2.0 * PI))
            })
            .collect();
        Self { terms }
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.terms
            .iter()
            .map(|(a, k, c)| a * (k[0] * u + k[1] * v + c).sin())
            .sum()
    }

    pub fn field(&self) -> ScalarField {
        let t = self.clone();
        Field::new(move |p: ChartPoint| t.eval(p.u, p.v))
    }
}

fn pair_form(a: TrigPolynomial, b: TrigPolynomial) -> OneFormField {
    Field::new(move |p: ChartPoint| Vector2::new(a.eval(p.u, p.v), b.eval(p.u, p.v)))
}

/// Smooth 1-form on the plane with coefficients bounded by `amplitude`.
pub fn random_plane_one_form(rng: &mut CorpusRng, amplitude: f64) -> OneFormField {
    let a = TrigPolynomial::random(rng, 3, 2.0, amplitude);
    let b = TrigPolynomial::random(rng, 3, 2.0, amplitude);
    pair_form(a, b)
}

/// Smooth periodic 1-form on the unit torus.
pub fn random_torus_one_form(rng: &mut CorpusRng, amplitude: f64) -> OneFormField {
    let a = TrigPolynomial::random_periodic(rng, 3, 2, amplitude);
    let b = TrigPolynomial::random_periodic(rng, 3, 2, amplitude);
    pair_form(a, b)
}

/// `e^{2σ}[[1 + a, b], [b, 1 + c]]` with small smooth `σ, a, b, c`;
/// positive definite whenever `amplitude < 0.5`.
pub fn random_plane_metric(rng: &mut CorpusRng, amplitude: f64) -> MetricField {
    let s = TrigPolynomial::random(rng, 3, 1.5, amplitude);
    let a = TrigPolynomial::random(rng, 2, 1.5, amplitude);
    let b = TrigPolynomial::random(rng, 2, 1.5, amplitude);
    let c = TrigPolynomial::random(rng, 2, 1.5, amplitude);
    Field::new(move |p: ChartPoint| {
        let (u, v) = (p.u, p.v);
        let off = b.eval(u, v);
        Matrix2::new(1.0 + a.eval(u, v), off, off, 1.0 + c.eval(u, v)) * (2.0 * s.eval(u, v)).exp()
    })
}

/// 1-form on the sphere pulled back from the ambient covector field
/// `w(x) = A x + (b·x)² c`; globally smooth, valid in both charts.
pub fn ambient_one_form(
    a: Matrix3<f64>,
    b: Vector3<f64>,
    c: Vector3<f64>,
    radius: f64,
) -> OneFormField {
    Field::new(move |p: ChartPoint| {
        let n = stereo_embed(&p, radius);
        let w = a * n + c * b.dot(&n).powi(2);
        stereo_embed_jacobian(&p, radius).transpose() * w * radius
    })
}

/// Random ambient 1-form with `|w| ≤ amplitude` on the unit sphere.
pub fn random_sphere_one_form(rng: &mut CorpusRng, amplitude: f64, radius: f64) -> OneFormField {
    let mut normal = || rng.sample::<f64, _>(StandardNormal);
    let a = Matrix3::from_fn(|_, _| normal());
    let b = Vector3::from_fn(|_, _| normal());
    let c = Vector3::from_fn(|_, _| normal());
    let bound = a.norm() + b.norm_squared() * c.norm();
    let s = amplitude / bound;
    ambient_one_form(a * s, b, c * s, radius)
}

/// `exp`-free draw: `I + spread·N(0,1)`, normalized to SL(3,ℝ) and redrawn
/// until its condition number is at most `max_cond`.
pub fn random_sl3(rng: &mut CorpusRng, spread: f64, max_cond: f64) -> SL3Matrix {
    loop {
        let m = Matrix3::identity()
            + Matrix3::from_fn(|_, _| spread * rng.sample::<f64, _>(StandardNormal));
        if let Ok(psi) = SL3Matrix::new(m) {
            if psi.condition_number() <= max_cond {
                return psi;
            }
        }
    }
}

/// Random point in `[−w, w]²` of a chart and a random unit direction.
pub fn random_chart_point(
    rng: &mut CorpusRng,
    half_width: f64,
    chart: usize,
) -> (ChartPoint, Vector2<f64>) {
    let p = ChartPoint::in_chart(
        rng.random_range(-half_width..half_width),
        rng.random_range(-half_width..half_width),
        chart,
    );
    let t = rng.random_range(0.0..2.0 * PI);
    (p, Vector2::new(t.cos(), t.sin()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let a = TrigPolynomial::random(&mut seeded(7), 3, 2.0, 1.0);
        let b = TrigPolynomial::random(&mut seeded(7), 3, 2.0, 1.0);
        assert_eq!(a, b);
        let psi = random_sl3(&mut seeded(42), 0.4, 5.0);
        assert!(psi.condition_number() <= 5.0);
        assert!((psi.matrix().determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_polynomial_is_periodic() {
        let t = TrigPolynomial::random_periodic(&mut seeded(3), 4, 2, 1.0);
        assert!((t.eval(0.3, 0.2) - t.eval(1.3, -0.8)).abs() < 1e-12);
    }

    #[test]
    fn random_metric_is_positive_definite() {
        let g = random_plane_metric(&mut seeded(11), 0.3);
        for p in crate::fields::SampleGrid::square(1.0, 9).points() {
            assert!(crate::fields::check_metric(&g.at(p).unwrap(), p).is_ok());
        }
    }
}
