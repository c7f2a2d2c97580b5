use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::christoffel::ChristoffelField;
use super::tensor::Tensor3;
use crate::error::Result;
use crate::fields::{
    coframe_matrix, metric_at, wedge, CoframeField, Field, MetricField, OneFormField, ScalarField,
};

/// Step for derivatives of Christoffel symbols.
pub const CURVATURE_STEP: f64 = 1e-4;

/// Ricci tensor split as `Ric = sym + skew·(du⊗dv − dv⊗du)` in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicciValue {
    pub sym: Matrix2<f64>,
    pub skew: f64,
}

impl RicciValue {
    pub fn full(&self) -> Matrix2<f64> {
        self.sym + Matrix2::new(0.0, self.skew, -self.skew, 0.0)
    }
}

pub type RicciData = Field<RicciValue>;
/// Frame components `S_ij` of the projective Schouten tensor.
pub type SchoutenMatrix = Field<Matrix2<f64>>;
/// Connection 1-forms `ζ^i_j` relative to a coframe.
pub type ConnectionForm = Field<[[Vector2<f64>; 2]; 2]>;

/// `R^i_jkl = ∂_k Γ^i_lj − ∂_l Γ^i_kj + Γ^i_km Γ^m_lj − Γ^i_lm Γ^m_kj`.
pub fn riemann(gamma: &Tensor3, dgamma: [Tensor3; 2]) -> [Tensor3; 2] {
    let mut r = [Tensor3::zeros(); 2];
    for (i, ri) in r.iter_mut().enumerate() {
        *ri = Tensor3::from_fn(|j, k, l| {
            let quad: f64 = (0..2)
                .map(|m| {
                    gamma.get(i, k, m) * gamma.get(m, l, j)
                        - gamma.get(i, l, m) * gamma.get(m, k, j)
                })
                .sum();
            dgamma[k].get(i, l, j) - dgamma[l].get(i, k, j) + quad
        });
    }
    r
}

/// Ricci curvature `Ric_jl = R^k_jkl`, Christoffel derivatives by central differences.
pub fn ricci(conn: &ChristoffelField, h: f64) -> RicciData {
    let conn = conn.clone();
    let domain = *conn.domain();
    Field::try_new(move |p| {
        let gamma = conn.at(p)?;
        let (du, dv) = conn.partials(p, h)?;
        let r = riemann(&gamma, [du, dv]);
        let ric = Matrix2::from_fn(|j, l| (0..2).map(|k| r[k].get(j, k, l)).sum::<f64>());
        let sym = (ric + ric.transpose()) * 0.5;
        Ok(RicciValue {
            sym,
            skew: 0.5 * (ric[(0, 1)] - ric[(1, 0)]),
        })
    })
    .with_domain(domain)
}

/// `Sch = Ric⁺ − ⅓Ric⁻` in the frame dual to `coframe`:
/// `S = [[R11, R12 − R/3], [R12 + R/3, R22]]`.
pub fn schouten(conn: &ChristoffelField, coframe: &CoframeField, h: f64) -> SchoutenMatrix {
    let ric = ricci(conn, h);
    let coframe = coframe.clone();
    Field::try_new(move |p| {
        let r = ric.at(p)?;
        let e = coframe.at(p)?;
        Ok(schouten_from_ricci(&r, &e))
    })
    .with_domain(*conn.domain())
}

pub fn schouten_from_ricci(r: &RicciValue, e: &Matrix2<f64>) -> Matrix2<f64> {
    let f = e.try_inverse().unwrap_or_else(Matrix2::zeros);
    let sym = f.transpose() * r.sym * f;
    let skew = r.skew / e.determinant();
    Matrix2::new(
        sym[(0, 0)],
        sym[(0, 1)] - skew / 3.0,
        sym[(1, 0)] + skew / 3.0,
        sym[(1, 1)],
    )
}

/// Levi-Civita connection form `φ = φ²₁` in the lower-triangular orthonormal
/// coframe gauge: `dη¹ = −η²∧φ`, `dη² = η¹∧φ`.
pub fn levi_civita_form(g: &MetricField, h: f64) -> OneFormField {
    let g = g.clone();
    let domain = *g.domain();
    Field::try_new(move |p| {
        let e = coframe_matrix(&metric_at(&g, p)?, p)?;
        let coframe = |q| -> Result<Matrix2<f64>> { coframe_matrix(&g.at(q)?, q) };
        let du = (coframe(p.shifted(h, 0.0))? - coframe(p.shifted(-h, 0.0))?) / (2.0 * h);
        let dv = (coframe(p.shifted(0.0, h))? - coframe(p.shifted(0.0, -h))?) / (2.0 * h);
        // dηⁱ density: ∂_u E[i][v] − ∂_v E[i][u]
        let d1 = du[(0, 1)] - dv[(0, 0)];
        let d2 = du[(1, 1)] - dv[(1, 0)];
        // d1 = E22 φ_u − E21 φ_v,  d2 = −E12 φ_u + E11 φ_v
        let m = Matrix2::new(e[(1, 1)], -e[(1, 0)], -e[(0, 1)], e[(0, 0)]);
        Ok(m.try_inverse().expect("coframe determinant is positive") * Vector2::new(d1, d2))
    })
    .with_domain(domain)
}

/// Gauss curvature from `dφ = −K η¹∧η²`; the same step is used for both
/// derivative levels.
pub fn gauss_curvature(g: &MetricField, h: f64) -> ScalarField {
    let phi = levi_civita_form(g, h);
    let g = g.clone();
    let domain = *g.domain();
    Field::try_new(move |p| {
        let (du, dv) = phi.partials(p, h)?;
        let dphi = du[1] - dv[0];
        let det = metric_at(&g, p)?.determinant().sqrt();
        Ok(-dphi / det)
    })
    .with_domain(domain)
}

/// `ζ^i_j(∂_b) = E^i_a (∂_b F^a_j + Γ^a_bc F^c_j)` with `F = E⁻¹` the frame.
pub fn connection_form(conn: &ChristoffelField, coframe: &CoframeField, h: f64) -> ConnectionForm {
    let (conn, coframe) = (conn.clone(), coframe.clone());
    let domain = *conn.domain();
    Field::try_new(move |p| {
        let e = coframe.at(p)?;
        let frame = coframe.map(|e| e.try_inverse().unwrap_or_else(Matrix2::zeros));
        let f = frame.at(p)?;
        let (fu, fv) = frame.partials(p, h)?;
        let gamma = conn.at(p)?;
        let mut zeta = [[Vector2::zeros(); 2]; 2];
        for (b, df) in [fu, fv].iter().enumerate() {
            // (∇_{∂_b} e_j)^a
            let nab = df + gamma.slice_lower(b) * f;
            let z = e * nab;
            for i in 0..2 {
                for j in 0..2 {
                    zeta[i][j][b] = z[(i, j)];
                }
            }
        }
        Ok(zeta)
    })
    .with_domain(domain)
}

/// Density of `ζ∧η`-type products used in torsion checks: `dηⁱ + ζⁱ_j∧ηʲ`.
pub fn torsion_residual(zeta: &[[Vector2<f64>; 2]; 2], e: &Matrix2<f64>, d_eta: [f64; 2]) -> f64 {
    let eta = [e.row(0).transpose(), e.row(1).transpose()];
    (0..2)
        .map(|i| (d_eta[i] + (0..2).map(|j| wedge(&zeta[i][j], &eta[j])).sum::<f64>()).abs())
        .fold(0.0, f64::max)
}
