use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::chart::{ChartId, ChartPoint};
use super::field::TwoFormField;
use crate::error::{GeomError, Result};

/// Quadrature nodes with weights in chart-area units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub nodes: Vec<ChartPoint>,
    pub weights: Vec<f64>,
    pub periodic: (bool, bool),
}

impl Mesh {
    pub fn new(nodes: Vec<ChartPoint>, weights: Vec<f64>, periodic: (bool, bool)) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(GeomError::Argument(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
            return Err(GeomError::Argument(format!(
                "non-positive quadrature weight {w}"
            )));
        }
        Ok(Self {
            nodes,
            weights,
            periodic,
        })
    }

    /// Midpoint rule on `[u0, u1] × [v0, v1]` with `nu × nv` cells.
    pub fn rectangle(
        chart: ChartId,
        u: (f64, f64),
        v: (f64, f64),
        nu: usize,
        nv: usize,
        periodic: (bool, bool),
    ) -> Result<Self> {
        if nu == 0 || nv == 0 {
            return Err(GeomError::Argument(
                "mesh resolution must be positive".into(),
            ));
        }
        let du = (u.1 - u.0) / nu as f64;
        let dv = (v.1 - v.0) / nv as f64;
        let mut nodes = Vec::with_capacity(nu * nv);
        for j in 0..nv {
            for i in 0..nu {
                nodes.push(ChartPoint::in_chart(
                    u.0 + (i as f64 + 0.5) * du,
                    v.0 + (j as f64 + 0.5) * dv,
                    chart,
                ));
            }
        }
        let weights = vec![du * dv; nu * nv];
        Self::new(nodes, weights, periodic)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `u,v,weight` rows (with the chart id) for debugging.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("chart_id,u,v,weight\n");
        for (p, w) in self.nodes.iter().zip(&self.weights) {
            let _ = writeln!(out, "{},{:.17e},{:.17e},{:.17e}", p.chart, p.u, p.v, w);
        }
        out
    }
}

/// `Σ wᵢ σ(xᵢ)` for a 2-form density `σ`.
pub fn integrate_2form(omega: &TwoFormField, mesh: &Mesh) -> Result<f64> {
    if mesh.is_empty() {
        return Err(GeomError::Argument(
            "cannot integrate over an empty mesh".into(),
        ));
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (p, w) in mesh.nodes.iter().zip(&mesh.weights) {
        // Kahan summation; meshes reach ~10⁵ nodes
        let y = w * omega.at(*p)? - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum)
}
