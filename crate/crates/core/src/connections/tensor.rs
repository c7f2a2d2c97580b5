use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

/// Rank-3 array `t[i][j][k]` over a 2D chart. For connection data the first
/// index is the upper one: `Γ^i_jk`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Tensor3(pub [[[f64; 2]; 2]; 2]);

impl Tensor3 {
    pub fn zeros() -> Self {
        Self::default()
    }

    pub fn from_fn(f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    t.0[i][j][k] = f(i, j, k);
                }
            }
        }
        t
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.0[i][j][k]
    }

    pub fn sup_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .flatten()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Largest `|t[i][j][k] − t[i][k][j]|`.
    pub fn lower_asymmetry(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..2 {
            m = m.max((self.0[i][0][1] - self.0[i][1][0]).abs());
        }
        m
    }

    /// Slice `t[i][·][·]` as a matrix.
    pub fn slice(&self, i: usize) -> Matrix2<f64> {
        Matrix2::new(
            self.0[i][0][0],
            self.0[i][0][1],
            self.0[i][1][0],
            self.0[i][1][1],
        )
    }

    /// `(φ(v)w)^i = φ^i_jk v^j w^k`.
    pub fn apply(&self, v: &Vector2<f64>, w: &Vector2<f64>) -> Vector2<f64> {
        Vector2::new((self.slice(0) * w).dot(v), (self.slice(1) * w).dot(v))
    }
}

impl Add for Tensor3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_fn(|i, j, k| self.0[i][j][k] + o.0[i][j][k])
    }
}

impl Sub for Tensor3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_fn(|i, j, k| self.0[i][j][k] - o.0[i][j][k])
    }
}

impl Mul<f64> for Tensor3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::from_fn(|i, j, k| self.0[i][j][k] * s)
    }
}

impl Neg for Tensor3 {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Tensor3 {
    /// Matrix `M[a][c] = t[a][b][c]` for a fixed middle index `b`.
    pub fn slice_lower(&self, b: usize) -> Matrix2<f64> {
        Matrix2::new(
            self.0[0][b][0],
            self.0[0][b][1],
            self.0[1][b][0],
            self.0[1][b][1],
        )
    }
}
