use nalgebra::{Matrix2, SMatrix, Vector2};
use serde::{Deserialize, Serialize};

use super::tensor::Tensor3;
use crate::error::Result;
use crate::fields::{
    inverse_metric, metric_at, ChartPoint, Field, MetricField, OneFormField, SampleGrid,
};

/// Torsion-free affine connection as Christoffel symbols `Γ^i_jk`.
pub type ChristoffelField = Field<Tensor3>;
/// Section of `S²(T*Σ)⊗TΣ`, e.g. the difference of two connections.
pub type DifferenceTensor = Field<Tensor3>;

/// Sample-grid size used by [`ProjectiveTest::default`].
pub const PROJECTIVE_GRID: usize = 41;
pub const PROJECTIVE_TOL: f64 = 1e-5;

pub fn flat_connection() -> ChristoffelField {
    Field::constant(Tensor3::zeros())
}

fn christoffel_from_metric(gi: &Matrix2<f64>, dg: [Matrix2<f64>; 2]) -> Tensor3 {
    Tensor3::from_fn(|i, j, k| {
        0.5 * (0..2)
            .map(|l| gi[(i, l)] * (dg[j][(l, k)] + dg[k][(j, l)] - dg[l][(j, k)]))
            .sum::<f64>()
    })
}

/// Levi-Civita connection of `g`, metric derivatives by central differences.
pub fn levi_civita(g: &MetricField, h: f64) -> ChristoffelField {
    let g = g.clone();
    let domain = *g.domain();
    Field::try_new(move |p| {
        let gp = metric_at(&g, p)?;
        let gi = inverse_metric(&gp, p)?;
        let (du, dv) = g.partials(p, h)?;
        Ok(christoffel_from_metric(&gi, [du, dv]))
    })
    .with_domain(domain)
}

/// `ι(α) = α⊗Id + Id⊗α`, i.e. `φ^i_jk = α_j δ^i_k + α_k δ^i_j`.
pub fn iota(alpha: &Vector2<f64>) -> Tensor3 {
    Tensor3::from_fn(|i, j, k| alpha[j] * delta(i, k) + alpha[k] * delta(i, j))
}

pub fn iota_embed(alpha: &OneFormField) -> DifferenceTensor {
    alpha.map(|a| iota(&a))
}

/// `tr(φ)_j = φ^i_ji`.
pub fn trace(phi: &Tensor3) -> Vector2<f64> {
    Vector2::new(
        phi.get(0, 0, 0) + phi.get(1, 0, 1),
        phi.get(0, 1, 0) + phi.get(1, 1, 1),
    )
}

/// Projection onto the trace-free part: `φ₀ = φ − ⅓ ι(tr φ)`.
pub fn trace_free(phi: &Tensor3) -> Tensor3 {
    *phi - iota(&trace(phi)) * (1.0 / 3.0)
}

pub fn trace_free_part(phi: &DifferenceTensor) -> DifferenceTensor {
    phi.map(|t| trace_free(&t))
}

/// `(g⊗X)^i_jk = g_jk X^i`.
pub fn metric_times_vector(g: &Matrix2<f64>, x: &Vector2<f64>) -> Tensor3 {
    Tensor3::from_fn(|i, j, k| g[(j, k)] * x[i])
}

/// Conformal connection `ᵍ∇ + g⊗β♯ − ι(β)`, the unique torsion-free
/// connection with `∇g = 2β⊗g`.
pub fn conformal_connection(g: &MetricField, beta: &OneFormField, h: f64) -> ChristoffelField {
    let lc = levi_civita(g, h);
    let (g, beta) = (g.clone(), beta.clone());
    let domain = *g.domain();
    Field::try_new(move |p| {
        let gp = metric_at(&g, p)?;
        let b = beta.at(p)?;
        let sharp = inverse_metric(&gp, p)? * b;
        Ok(lc.at(p)? + metric_times_vector(&gp, &sharp) - iota(&b))
    })
    .with_domain(domain)
}

/// `(∇_j g)_kl = ∂_j g_kl − Γ^m_jk g_ml − Γ^m_jl g_km`, stored as `t[j][k][l]`.
pub fn metric_covariant_derivative(
    conn: &Tensor3,
    g: &Matrix2<f64>,
    dg: [Matrix2<f64>; 2],
) -> Tensor3 {
    Tensor3::from_fn(|j, k, l| {
        dg[j][(k, l)]
            - (0..2)
                .map(|m| conn.get(m, j, k) * g[(m, l)] + conn.get(m, j, l) * g[(k, m)])
                .sum::<f64>()
    })
}

/// Pointwise `∇g − 2β⊗g` at `p`.
pub fn weyl_compatibility_tensor(
    conn: &ChristoffelField,
    g: &MetricField,
    beta: &Vector2<f64>,
    p: ChartPoint,
    h: f64,
) -> Result<Tensor3> {
    let gp = metric_at(g, p)?;
    let (du, dv) = g.partials(p, h)?;
    let nabla_g = metric_covariant_derivative(&conn.at(p)?, &gp, [du, dv]);
    Ok(nabla_g - Tensor3::from_fn(|j, k, l| 2.0 * beta[j] * gp[(k, l)]))
}

/// Largest component of `∇g − 2β⊗g`, pointwise.
pub fn weyl_compatibility_residual(
    conn: &ChristoffelField,
    g: &MetricField,
    beta: &OneFormField,
    h: f64,
) -> Field<f64> {
    let (conn, g, beta) = (conn.clone(), g.clone(), beta.clone());
    let domain = *g.domain();
    Field::try_new(
        move |p| Ok(weyl_compatibility_tensor(&conn, &g, &beta.at(p)?, p, h)?.sup_norm()),
    )
    .with_domain(domain)
}

/// Best pointwise fit of `∇g ≈ 2γ⊗g` over `γ` (least squares in the
/// component norm) and the sup-norm residual left over. A non-zero residual
/// means `∇` preserves no metric conformal to `g` at this point.
pub fn conformal_fit(
    conn: &ChristoffelField,
    g: &MetricField,
    p: ChartPoint,
    h: f64,
) -> Result<(Vector2<f64>, f64)> {
    let gp = metric_at(g, p)?;
    let (du, dv) = g.partials(p, h)?;
    let t = metric_covariant_derivative(&conn.at(p)?, &gp, [du, dv]);
    let norm2: f64 = gp.iter().map(|x| x * x).sum();
    let gamma = Vector2::from_fn(|j, _| {
        (0..2)
            .flat_map(|k| (0..2).map(move |l| (k, l)))
            .map(|(k, l)| t.get(j, k, l) * gp[(k, l)])
            .sum::<f64>()
            / (2.0 * norm2)
    });
    let resid = t - Tensor3::from_fn(|j, k, l| 2.0 * gamma[j] * gp[(k, l)]);
    Ok((gamma, resid.sup_norm()))
}

/// Matrix of the linear map `X ↦ g⊗X − ⅓ι(X♭)` from vectors to the eight
/// components of a difference tensor.
pub fn conformality_kernel_matrix(g: &Matrix2<f64>) -> SMatrix<f64, 8, 2> {
    let mut m = SMatrix::<f64, 8, 2>::zeros();
    for c in 0..2 {
        let x = Vector2::from_fn(|i, _| delta(i, c));
        let t = metric_times_vector(g, &x) - iota(&(g * x)) * (1.0 / 3.0);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    m[(4 * i + 2 * j + k, c)] = t.get(i, j, k);
                }
            }
        }
    }
    m
}

#[inline]
fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveTest {
    pub tol: f64,
    pub grid: SampleGrid,
}

impl Default for ProjectiveTest {
    fn default() -> Self {
        Self {
            tol: PROJECTIVE_TOL,
            grid: SampleGrid::square(1.0, PROJECTIVE_GRID),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveReport {
    pub equivalent: bool,
    pub residual: f64,
}

/// Weyl's criterion: `∇` and `∇′` are projectively equivalent iff
/// `(∇ − ∇′)₀ = 0`. Reports the sup-norm of the trace-free difference.
pub fn projectively_equivalent(
    a: &ChristoffelField,
    b: &ChristoffelField,
    test: &ProjectiveTest,
) -> Result<ProjectiveReport> {
    let mut residual = 0.0_f64;
    for p in test.grid.points() {
        residual = residual.max(trace_free(&(a.at(p)? - b.at(p)?)).sup_norm());
    }
    Ok(ProjectiveReport {
        equivalent: residual < test.tol,
        residual,
    })
}
