use std::ops::{Add, Mul, Sub};

use nalgebra::{Matrix2, Matrix3, Vector2};

use super::group::GroupElement;
use crate::connections::{gauss_curvature, levi_civita_form, ConnectionForm, SchoutenMatrix};
use crate::error::Result;
use crate::fields::{
    codifferential, hodge_star, orthonormal_coframe, star_d, ChartPoint, CoframeField, Field,
    MetricField, OneFormField, Orientation,
};

/// 3×3 matrix of 1-forms at a point; entry `(μ, ν)` holds the `(du, dv)`
/// coefficients of `θ^μ_ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormMatrix(pub [[Vector2<f64>; 3]; 3]);

impl FormMatrix {
    pub fn zeros() -> Self {
        Self([[Vector2::zeros(); 3]; 3])
    }

    pub fn get(&self, mu: usize, nu: usize) -> Vector2<f64> {
        self.0[mu][nu]
    }

    /// The `du` (`c = 0`) or `dv` (`c = 1`) coefficient matrix.
    pub fn component(&self, c: usize) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.0[i][j][c])
    }

    pub fn from_components(du: &Matrix3<f64>, dv: &Matrix3<f64>) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = Vector2::new(du[(i, j)], dv[(i, j)]);
            }
        }
        m
    }

    pub fn trace(&self) -> Vector2<f64> {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn sup_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|v| v.amax())
            .fold(0.0, f64::max)
    }
}

impl Add for FormMatrix {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_components(
            &(self.component(0) + o.component(0)),
            &(self.component(1) + o.component(1)),
        )
    }
}

impl Sub for FormMatrix {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_components(
            &(self.component(0) - o.component(0)),
            &(self.component(1) - o.component(1)),
        )
    }
}

impl Mul<f64> for FormMatrix {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::from_components(&(self.component(0) * s), &(self.component(1) * s))
    }
}

/// An `sl(3,ℝ)`-valued 1-form pulled back to a chart along a section.
#[derive(Debug, Clone)]
pub struct CartanGauge {
    pub theta: Field<FormMatrix>,
}

impl CartanGauge {
    pub fn new(theta: Field<FormMatrix>) -> Self {
        Self { theta }
    }

    pub fn at(&self, p: ChartPoint) -> Result<FormMatrix> {
        self.theta.at(p)
    }

    /// `|tr θ|` at `p`.
    pub fn trace_defect(&self, p: ChartPoint) -> Result<f64> {
        Ok(self.at(p)?.trace().amax())
    }
}

/// Scalar ingredients of the Weyl gauge at a point.
#[derive(Debug, Clone, Copy)]
struct WeylData {
    eta: Matrix2<f64>,
    phi: Vector2<f64>,
    k: f64,
    delta_beta: f64,
    star_dbeta: f64,
    beta: Vector2<f64>,
    star_beta: Vector2<f64>,
}

#[derive(Clone)]
struct WeylFields {
    coframe: CoframeField,
    phi: OneFormField,
    k: Field<f64>,
    delta_beta: Field<f64>,
    star_dbeta: Field<f64>,
    beta: OneFormField,
    star_beta: OneFormField,
}

impl WeylFields {
    fn new(g: &MetricField, beta: &OneFormField, h: f64) -> Self {
        Self {
            coframe: orthonormal_coframe(g),
            phi: levi_civita_form(g, h),
            k: gauss_curvature(g, h),
            delta_beta: codifferential(beta, g, Orientation::Positive, h),
            star_dbeta: star_d(beta, g, h),
            beta: beta.clone(),
            star_beta: hodge_star(beta, g, Orientation::Positive),
        }
    }

    fn at(&self, p: ChartPoint) -> Result<WeylData> {
        Ok(WeylData {
            eta: self.coframe.at(p)?,
            phi: self.phi.at(p)?,
            k: self.k.at(p)?,
            delta_beta: self.delta_beta.at(p)?,
            star_dbeta: self.star_dbeta.at(p)?,
            beta: self.beta.at(p)?,
            star_beta: self.star_beta.at(p)?,
        })
    }
}

fn eta_rows(e: &Matrix2<f64>) -> [Vector2<f64>; 2] {
    [e.row(0).transpose(), e.row(1).transpose()]
}

/// The Cartan connection of `^{(g,β)}∇` along the orthonormal coframe section
/// with `ξ ≡ 0`:
///
/// ```text
/// ⅔β    (δβ−K)η¹ + ⅓(⋆dβ)η²    −⅓(⋆dβ)η¹ + (δβ−K)η²
/// η¹    −⅓β                    ⋆β − φ
/// η²    φ − ⋆β                 −⅓β
/// ```
pub fn weyl_gauge(g: &MetricField, beta: &OneFormField, h: f64) -> CartanGauge {
    let data = WeylFields::new(g, beta, h);
    let domain = *g.domain();
    CartanGauge::new(
        Field::try_new(move |p| {
            let w = data.at(p)?;
            let [e1, e2] = eta_rows(&w.eta);
            let s = w.delta_beta - w.k;
            let t = w.star_dbeta / 3.0;
            Ok(FormMatrix([
                [w.beta * (2.0 / 3.0), e1 * s + e2 * t, e2 * s - e1 * t],
                [e1, -w.beta / 3.0, w.star_beta - w.phi],
                [e2, w.phi - w.star_beta, -w.beta / 3.0],
            ]))
        })
        .with_domain(domain),
    )
}

/// Connection form of `^{(g,β)}∇` in the orthonormal coframe:
/// `ζ = (−β, ⋆β − φ; φ − ⋆β, −β)`.
pub fn weyl_connection_form(g: &MetricField, beta: &OneFormField, h: f64) -> ConnectionForm {
    let data = WeylFields::new(g, beta, h);
    Field::try_new(move |p| {
        let w = data.at(p)?;
        Ok([
            [-w.beta, w.star_beta - w.phi],
            [w.phi - w.star_beta, -w.beta],
        ])
    })
    .with_domain(*g.domain())
}

/// Schouten frame components of `^{(g,β)}∇`:
/// `S = (K − δβ, ⅓⋆dβ; −⅓⋆dβ, K − δβ)`.
pub fn weyl_schouten(g: &MetricField, beta: &OneFormField, h: f64) -> SchoutenMatrix {
    let data = WeylFields::new(g, beta, h);
    Field::try_new(move |p| {
        let w = data.at(p)?;
        let d = w.k - w.delta_beta;
        let t = w.star_dbeta / 3.0;
        Ok(Matrix2::new(d, t, -t, d))
    })
    .with_domain(*g.domain())
}

/// Cartan connection along the section `x ↦ (coframe(x), ξ(x))` of
/// `F⁺ × ℝ₂`:
///
/// ```text
/// −⅓tr ζ − ξη    dξ − ξζ − Sᵗη − ξηξ
///  η             ζ − ⅓ I tr ζ + ηξ
/// ```
///
/// `ξ` is a row vector of functions; `dξ` is taken by central differences of step `h`.
pub fn theta_general(
    zeta: &ConnectionForm,
    schouten: &SchoutenMatrix,
    xi: &Field<Vector2<f64>>,
    coframe: &CoframeField,
    h: f64,
) -> CartanGauge {
    let (zeta, schouten, xi, coframe) =
        (zeta.clone(), schouten.clone(), xi.clone(), coframe.clone());
    let domain = *coframe.domain();
    CartanGauge::new(
        Field::try_new(move |p| {
            let z = zeta.at(p)?;
            let s = schouten.at(p)?;
            let x = xi.at(p)?;
            let (xu, xv) = xi.partials(p, h)?;
            let eta = eta_rows(&coframe.at(p)?);
            let tr = z[0][0] + z[1][1];
            let xi_eta = eta[0] * x[0] + eta[1] * x[1];
            let mut m = FormMatrix::zeros();
            m.0[0][0] = -tr / 3.0 - xi_eta;
            for j in 0..2 {
                let dxi = Vector2::new(xu[j], xv[j]);
                let xi_zeta: Vector2<f64> = (0..2).map(|i| z[i][j] * x[i]).sum();
                let st_eta: Vector2<f64> = (0..2).map(|i| eta[i] * s[(i, j)]).sum();
                m.0[0][j + 1] = dxi - xi_zeta - st_eta - xi_eta * x[j];
                m.0[j + 1][0] = eta[j];
                for k in 0..2 {
                    let diag = if j == k { tr / 3.0 } else { Vector2::zeros() };
                    m.0[j + 1][k + 1] = z[j][k] - diag + eta[j] * x[k];
                }
            }
            Ok(m)
        })
        .with_domain(domain),
    )
}

/// `h⁻¹θh + h⁻¹dh`; `dh` by central differences of step `step`.
pub fn gauge_transform(theta: &CartanGauge, h: &Field<GroupElement>, step: f64) -> CartanGauge {
    let theta = theta.theta.clone();
    let hm = h.map(|g| g.matrix());
    let domain = *theta.domain();
    CartanGauge::new(
        Field::try_new(move |p| {
            let t = theta.at(p)?;
            let m = hm.at(p)?;
            let mi = m.try_inverse().expect("group elements are invertible");
            let (du, dv) = hm.partials(p, step)?;
            let cu = mi * t.component(0) * m + mi * du;
            let cv = mi * t.component(1) * m + mi * dv;
            Ok(FormMatrix::from_components(&cu, &cv))
        })
        .with_domain(domain),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::euclidean_metric;

    #[test]
    fn euclidean_weyl_gauge_is_the_flat_frame() {
        let theta = weyl_gauge(
            &euclidean_metric(),
            &Field::constant(Vector2::zeros()),
            1e-3,
        );
        let m = theta.at(ChartPoint::new(0.3, -0.2)).unwrap();
        assert_eq!(m.get(1, 0), Vector2::new(1.0, 0.0));
        assert_eq!(m.get(2, 0), Vector2::new(0.0, 1.0));
        let mut rest = m;
        rest.0[1][0] = Vector2::zeros();
        rest.0[2][0] = Vector2::zeros();
        assert_eq!(rest.sup_norm(), 0.0);
    }

    #[test]
    fn form_matrix_arithmetic() {
        let a = FormMatrix::from_components(&Matrix3::identity(), &Matrix3::from_element(2.0));
        let b = (a + a) * 0.5 - a;
        assert_eq!(b, FormMatrix::zeros());
        assert_eq!(a.trace(), Vector2::new(3.0, 6.0));
    }
}
