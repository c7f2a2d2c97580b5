use nalgebra::{Matrix2, Matrix3, RowVector2, Vector2};
use serde::{Deserialize, Serialize};

use crate::connections::Tensor3;
use crate::error::{GeomError, Result};

/// `b⋊a = ((det a)⁻¹, b; 0, a)` in `G = ℝ²⋊GL⁺(2,ℝ) ⊂ SL(3,ℝ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    a: Matrix2<f64>,
    b: RowVector2<f64>,
}

impl GroupElement {
    pub fn new(a: Matrix2<f64>, b: RowVector2<f64>) -> Result<Self> {
        let det = a.determinant();
        if !(det > 0.0) || !det.is_finite() || !b.iter().all(|x| x.is_finite()) {
            return Err(GeomError::InvalidElement(det));
        }
        Ok(Self { a, b })
    }

    pub fn identity() -> Self {
        Self {
            a: Matrix2::identity(),
            b: RowVector2::zeros(),
        }
    }

    /// `z⋊re^{iφ}`: `a = r·[[cos φ, sin φ], [−sin φ, cos φ]]`, `b = (Re z, Im z)`.
    pub fn complex(z: (f64, f64), r: f64, phi: f64) -> Result<Self> {
        let (s, c) = phi.sin_cos();
        Self::new(Matrix2::new(c, s, -s, c) * r, RowVector2::new(z.0, z.1))
    }

    pub fn a(&self) -> &Matrix2<f64> {
        &self.a
    }

    pub fn b(&self) -> &RowVector2<f64> {
        &self.b
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        m[(0, 0)] = 1.0 / self.a.determinant();
        m.fixed_view_mut::<1, 2>(0, 1).copy_from(&self.b);
        m.fixed_view_mut::<2, 2>(1, 1).copy_from(&self.a);
        m
    }

    /// Reads the blocks of a 3×3 matrix; the lower-left block must vanish and
    /// the top-left entry must equal `(det a)⁻¹`.
    pub fn from_matrix(m: &Matrix3<f64>) -> Result<Self> {
        let a: Matrix2<f64> = m.fixed_view::<2, 2>(1, 1).into();
        let g = Self::new(a, m.fixed_view::<1, 2>(0, 1).into())?;
        let scale = m.amax().max(1.0);
        if m[(1, 0)].abs() > 1e-12 * scale
            || m[(2, 0)].abs() > 1e-12 * scale
            || (m[(0, 0)] * a.determinant() - 1.0).abs() > 1e-10
        {
            return Err(GeomError::Argument("matrix is not of the form b⋊a".into()));
        }
        Ok(g)
    }

    pub fn inverse(&self) -> Self {
        // (b⋊a)⁻¹ = −(det a) b a⁻¹ ⋊ a⁻¹
        let ai = self.a.try_inverse().expect("det a > 0");
        Self {
            a: ai,
            b: -self.b * ai * self.a.determinant(),
        }
    }
}

pub fn group_mul(g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
    GroupElement::from_matrix(&(g1.matrix() * g2.matrix()))
}

/// 2-jet at the origin of a map `ℝ² → ℝ²`; `hessian.get(i, j, k) = ∂²fⁱ/∂xʲ∂xᵏ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoJet {
    pub value: Vector2<f64>,
    pub jacobian: Matrix2<f64>,
    pub hessian: Tensor3,
}

impl TwoJet {
    /// Jet of `f ∘ g` for jets based at the origin with `g(0) = 0`.
    pub fn compose(&self, inner: &TwoJet) -> TwoJet {
        let (j1, j2) = (self.jacobian, inner.jacobian);
        let hessian = Tensor3::from_fn(|i, j, k| {
            let mut s = 0.0;
            for l in 0..2 {
                s += j1[(i, l)] * inner.hessian.get(l, j, k);
                for m in 0..2 {
                    s += self.hessian.get(i, l, m) * j2[(l, j)] * j2[(m, k)];
                }
            }
            s
        });
        TwoJet {
            value: self.value,
            jacobian: j1 * j2,
            hessian,
        }
    }

    pub fn distance(&self, other: &TwoJet) -> f64 {
        (self.value - other.value)
            .amax()
            .max((self.jacobian - other.jacobian).amax())
            .max((self.hessian - other.hessian).sup_norm())
    }
}

/// `f_{a,b}(x) = (det a)·a x / (1 + (det a) b·x)`.
pub fn fab(g: &GroupElement, x: &Vector2<f64>) -> Vector2<f64> {
    let d = g.a.determinant();
    g.a * x * d / (1.0 + d * (g.b * x)[0])
}

/// Exact 2-jet of `f_{a,b}` at the origin: Jacobian `D a`, Hessian
/// `−D²(a_ij b_k + a_ik b_j)` with `D = det a`.
pub fn two_jet_of_fab(g: &GroupElement) -> TwoJet {
    let d = g.a.determinant();
    let (a, b) = (g.a, g.b);
    TwoJet {
        value: Vector2::zeros(),
        jacobian: a * d,
        hessian: Tensor3::from_fn(|i, j, k| -d * d * (a[(i, j)] * b[k] + a[(i, k)] * b[j])),
    }
}

/// Distance between `j²f_{g1 g2}` and `j²(f_{g1} ∘ f_{g2})`; the right action
/// by pre-composition is a group action exactly when this vanishes.
pub fn jet_homomorphism_check(g1: &GroupElement, g2: &GroupElement) -> Result<f64> {
    let product = two_jet_of_fab(&group_mul(g1, g2)?);
    let composed = two_jet_of_fab(g1).compose(&two_jet_of_fab(g2));
    Ok(product.distance(&composed))
}
