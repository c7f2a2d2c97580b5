use std::fmt::Write as _;

use nalgebra::{Complex, Matrix3, Vector2};

use super::gauge::{CartanGauge, FormMatrix};
use crate::connections::gauss_curvature;
use crate::error::{GeomError, Result};
use crate::fields::{
    codifferential, hodge_star, orthonormal_coframe, star_d, wedge, ChartPoint, Field, MetricField,
    OneFormField, Orientation, SampleGrid, ScalarField,
};

/// Below this `θ¹₀∧θ²₀` density the flatness functions are not extracted.
pub const AREA_FLOOR: f64 = 1e-10;

/// Curvature `Ω = dθ + θ∧θ` of a gauge, as `du∧dv` densities, with the
/// flatness functions read off the top row.
#[derive(Debug, Clone)]
pub struct CurvatureResidual {
    pub omega: Field<Matrix3<f64>>,
    pub w1: ScalarField,
    pub w2: ScalarField,
    area: ScalarField,
}

fn wedge_matrix(a: &FormMatrix, b: &FormMatrix) -> Matrix3<f64> {
    // (a∧b)_{μν} = Σ_λ a_{μλ} ∧ b_{λν}
    a.component(0) * b.component(1) - a.component(1) * b.component(0)
}

fn exterior_derivative(theta: &Field<FormMatrix>, p: ChartPoint, h: f64) -> Result<Matrix3<f64>> {
    let (du, dv) = theta.partials(p, h)?;
    Ok(du.component(1) - dv.component(0))
}

fn area_of(t: &FormMatrix) -> f64 {
    wedge(&t.get(1, 0), &t.get(2, 0))
}

fn checked_area(t: &FormMatrix) -> Result<f64> {
    let a = area_of(t);
    if a.abs() < AREA_FLOOR {
        return Err(GeomError::DegenerateAreaForm(a));
    }
    Ok(a)
}

/// All nine entries of `dθ + θ∧θ`, derivatives by central differences of step `h`.
pub fn structure_residual(theta: &CartanGauge, h: f64) -> CurvatureResidual {
    let t = theta.theta.clone();
    let domain = *t.domain();
    let omega = Field::try_new(move |p| {
        let v = t.at(p)?;
        Ok(exterior_derivative(&t, p, h)? + wedge_matrix(&v, &v))
    })
    .with_domain(domain);
    let t = theta.theta.clone();
    let area = Field::try_new(move |p| checked_area(&t.at(p)?)).with_domain(domain);
    let w = omega.zip(&area, |o, a| Vector2::new(o[(0, 1)], o[(0, 2)]) / a);
    CurvatureResidual {
        w1: w.map(|w| w[0]),
        w2: w.map(|w| w[1]),
        omega,
        area,
    }
}

impl CurvatureResidual {
    pub fn w_at(&self, p: ChartPoint) -> Result<Vector2<f64>> {
        Ok(Vector2::new(self.w1.at(p)?, self.w2.at(p)?))
    }

    /// Largest entry of `Ω` outside positions (0,1), (0,2), in units of `θ¹₀∧θ²₀`.
    pub fn shape_defect_at(&self, p: ChartPoint) -> Result<f64> {
        let o = self.omega.at(p)?;
        let a = self.area.at(p)?;
        let mut m = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                if !(i == 0 && j > 0) {
                    m = m.max(o[(i, j)].abs());
                }
            }
        }
        Ok(m / a.abs())
    }

    pub fn shape_defect(&self, grid: &SampleGrid) -> Result<f64> {
        grid.points()
            .into_iter()
            .try_fold(0.0_f64, |m, p| Ok(m.max(self.shape_defect_at(p)?)))
    }

    /// Plot-ready samples, header `chart_id,u,v,w1,w2`.
    pub fn w_csv(&self, grid: &SampleGrid) -> Result<String> {
        let mut out = String::from("chart_id,u,v,w1,w2\n");
        for p in grid.points() {
            let w = self.w_at(p)?;
            writeln!(out, "{},{:e},{:e},{:e},{:e}", p.chart, p.u, p.v, w[0], w[1])
                .expect("write to String");
        }
        Ok(out)
    }
}

/// `Ŵ₁η¹ + Ŵ₂η² = −⋆d(K−δβ) + ⅓d⋆dβ − 2(K−δβ)⋆β + ⅔β⋆dβ`, returned as `(Ŵ₁, Ŵ₂)`
/// in the orthonormal coframe. Every derivative level uses step `h`.
///
/// The sign of the last term is the one forced by expanding the top row of
/// `dφ + φ∧φ` for the Weyl gauge; with the opposite sign the two pipelines
/// disagree at first order in `β`.
pub fn w_closed_form(g: &MetricField, beta: &OneFormField, h: f64) -> Field<Vector2<f64>> {
    let k = gauss_curvature(g, h);
    let delta = codifferential(beta, g, Orientation::Positive, h);
    let sd = star_d(beta, g, h);
    let kd = k.zip(&delta, |k, d| k - d);
    let d_kd = Field::try_new({
        let kd = kd.clone();
        move |p| kd.partials(p, h).map(|(a, b)| Vector2::new(a, b))
    });
    let star_d_kd = hodge_star(&d_kd, g, Orientation::Positive);
    let star_beta = hodge_star(beta, g, Orientation::Positive);
    let coframe = orthonormal_coframe(g);
    let beta = beta.clone();
    Field::try_new(move |p| {
        let (su, sv) = sd.partials(p, h)?;
        let c = kd.at(p)?;
        let omega = -star_d_kd.at(p)? + Vector2::new(su, sv) / 3.0 - star_beta.at(p)? * (2.0 * c)
            + beta.at(p)? * (2.0 / 3.0 * sd.at(p)?);
        let e = coframe.at(p)?;
        Ok(e.transpose().try_inverse().expect("coframe is invertible") * omega)
    })
    .with_domain(*g.domain())
}

pub type Cx = Complex<f64>;
/// Complex 1-form: `(du, dv)` coefficients.
pub type ComplexForm = [Cx; 2];

fn cform(re: Vector2<f64>, im: Vector2<f64>) -> ComplexForm {
    [Cx::new(re[0], im[0]), Cx::new(re[1], im[1])]
}

fn cwedge(a: &ComplexForm, b: &ComplexForm) -> Cx {
    a[0] * b[1] - a[1] * b[0]
}

fn conj(a: &ComplexForm) -> ComplexForm {
    [a[0].conj(), a[1].conj()]
}

/// `ω₁, ω₂, ξ, ψ` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexFrame {
    pub omega1: ComplexForm,
    pub omega2: ComplexForm,
    pub xi: ComplexForm,
    pub psi: ComplexForm,
}

impl ComplexFrame {
    pub fn from_theta(t: &FormMatrix) -> Self {
        let g = |i, j| t.get(i, j);
        Self {
            omega1: cform(g(1, 0), g(2, 0)),
            omega2: cform(g(1, 1) - g(2, 2), g(1, 2) + g(2, 1)),
            xi: cform(g(0, 1), g(0, 2)),
            psi: cform(g(0, 0) * -1.5, (g(1, 2) - g(2, 1)) * -0.5),
        }
    }
}

/// Complex form of a gauge with residuals of
///
/// ```text
/// dω₁ = ω₁∧ψ + ½ω̄₁∧ω₂
/// dω₂ = −ω₁∧ξ + ω₂∧ψ + ψ̄∧ω₂
/// dξ  = W ω̄₁∧ω₁ − ½ξ̄∧ω₂ + ψ̄∧ξ
/// dψ  = −½ω̄₁∧ξ + ¼ω̄₂∧ω₂ + ξ̄∧ω₁
/// ```
///
/// with `W = ½(W₂ − iW₁)` taken from [`structure_residual`].
#[derive(Debug, Clone)]
pub struct Complexified {
    pub frame: Field<ComplexFrame>,
    /// `du∧dv` densities of (left − right) for the four equations.
    pub residuals: Field<[Cx; 4]>,
    /// The same four quantities assembled from the real curvature entries.
    pub from_real: Field<[Cx; 4]>,
}

pub fn complexify(theta: &CartanGauge, h: f64) -> Complexified {
    let t = theta.theta.clone();
    let domain = *t.domain();
    let frame = t.map(|m| ComplexFrame::from_theta(&m));
    let curvature = structure_residual(theta, h);

    let residuals = Field::try_new({
        let t = t.clone();
        let curvature = curvature.clone();
        move |p| {
            let f = ComplexFrame::from_theta(&t.at(p)?);
            let (du, dv) = t.partials(p, h)?;
            let (d, e) = (ComplexFrame::from_theta(&du), ComplexFrame::from_theta(&dv));
            // d(a) density = ∂_u a_v − ∂_v a_u
            let ext = |du_part: &ComplexForm, dv_part: &ComplexForm| du_part[1] - dv_part[0];
            let d_omega1 = ext(&d.omega1, &e.omega1);
            let d_omega2 = ext(&d.omega2, &e.omega2);
            let d_xi = ext(&d.xi, &e.xi);
            let d_psi = ext(&d.psi, &e.psi);
            let w = curvature.w_at(p)?;
            let big_w = Cx::new(w[1], -w[0]) * 0.5;
            let (o1, o2, xi, psi) = (f.omega1, f.omega2, f.xi, f.psi);
            Ok([
                d_omega1 - cwedge(&o1, &psi) - cwedge(&conj(&o1), &o2) * 0.5,
                d_omega2 + cwedge(&o1, &xi) - cwedge(&o2, &psi) - cwedge(&conj(&psi), &o2),
                d_xi - big_w * cwedge(&conj(&o1), &o1) + cwedge(&conj(&xi), &o2) * 0.5
                    - cwedge(&conj(&psi), &xi),
                d_psi + cwedge(&conj(&o1), &xi) * 0.5
                    - cwedge(&conj(&o2), &o2) * 0.25
                    - cwedge(&conj(&xi), &o1),
            ])
        }
    })
    .with_domain(domain);

    let from_real = Field::try_new(move |p| {
        let o = curvature.omega.at(p)?;
        let w = curvature.w_at(p)?;
        let area = curvature.area.at(p)?;
        Ok([
            Cx::new(o[(1, 0)], o[(2, 0)]),
            Cx::new(o[(1, 1)] - o[(2, 2)], o[(1, 2)] + o[(2, 1)]),
            Cx::new(o[(0, 1)] - w[0] * area, o[(0, 2)] - w[1] * area),
            Cx::new(-1.5 * o[(0, 0)], -0.5 * (o[(1, 2)] - o[(2, 1)])),
        ])
    })
    .with_domain(domain);

    Complexified {
        frame,
        residuals,
        from_real,
    }
}

impl Complexified {
    /// Largest modulus among the four residual densities at `p`.
    pub fn max_residual_at(&self, p: ChartPoint) -> Result<f64> {
        Ok(self
            .residuals
            .at(p)?
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }
}
