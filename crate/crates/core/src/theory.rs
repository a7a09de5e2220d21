//! Mean-field predictions of discovery probabilities, discovered degrees and
//! redundancies from betweenness and probe density.
//!
//! Discovery probabilities take rescaled betweenness `b / N`; redundancies
//! take raw betweenness.

use serde::{Deserialize, Serialize};

use crate::centrality::BetweennessTable;
use crate::error::{Error, Result};
use crate::explorer::ProbeBudget;
use crate::graph::Graph;

fn non_negative(name: &str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be a finite non-negative number, got {x}")))
    }
}

fn density(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {x}")))
    }
}

/// `1 - exp(-eps * b_ij / N)`.
pub fn predict_edge_discovery(b_tilde: f64, epsilon: f64) -> Result<f64> {
    non_negative("rescaled betweenness", b_tilde)?;
    non_negative("probe density", epsilon)?;
    Ok(-(-epsilon * b_tilde).exp_m1())
}

/// `1 - (1 - rho_t) exp(-eps * b_i / N)`.
pub fn predict_vertex_discovery(b_tilde: f64, epsilon: f64, rho_t: f64) -> Result<f64> {
    non_negative("rescaled betweenness", b_tilde)?;
    non_negative("probe density", epsilon)?;
    density("target density", rho_t)?;
    Ok(1.0 - (1.0 - rho_t) * (-epsilon * b_tilde).exp())
}

/// Linearized discovered degree `2 eps (1 + b_i / N)`.
pub fn predict_discovered_degree(b_tilde: f64, epsilon: f64) -> Result<f64> {
    non_negative("rescaled betweenness", b_tilde)?;
    non_negative("probe density", epsilon)?;
    Ok(2.0 * epsilon * (1.0 + b_tilde))
}

/// Discovered degree as the sum of edge discovery probabilities over the
/// incident edges of `v`.
pub fn predict_discovered_degree_exact(
    g: &Graph,
    table: &BetweennessTable,
    v: usize,
    epsilon: f64,
) -> Result<f64> {
    g.check_vertex(v)?;
    g.incident(v).map(|(_, e)| predict_edge_discovery(table.edge_rescaled(e), epsilon)).sum()
}

/// Per-edge `rho_s rho_t b_ij` and per-vertex `2 eps + rho_s rho_t b_i`,
/// where `eps = N rho_s rho_t`.
pub fn predict_redundancies(
    table: &BetweennessTable,
    rho_s: f64,
    rho_t: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    density("source density", rho_s)?;
    density("target density", rho_t)?;
    let w = rho_s * rho_t;
    let eps = table.n as f64 * w;
    let edges = table.edge.iter().map(|b| w * b).collect();
    let vertices = table.vertex.iter().map(|b| 2.0 * eps + w * b).collect();
    Ok((edges, vertices))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction {
    pub budget: ProbeBudget,
    /// Indexed by edge id.
    pub edge_discovery: Vec<f64>,
    pub vertex_discovery: Vec<f64>,
    /// Linearized form; not clamped at the true degree.
    pub discovered_degree: Vec<f64>,
    pub discovered_degree_exact: Vec<f64>,
    pub edge_redundancy: Vec<f64>,
    pub vertex_redundancy: Vec<f64>,
}

/// Every prediction for one graph and budget.
pub fn predict(g: &Graph, table: &BetweennessTable, budget: &ProbeBudget) -> Result<TheoryPrediction> {
    if table.n != g.n() || table.vertex.len() != g.n() || table.edge.len() != g.m() {
        return Err(Error::InvalidParameter("betweenness table does not match graph".into()));
    }
    if budget.n != g.n() {
        return Err(Error::InvalidParameter(format!(
            "budget is for {} vertices but the graph has {}",
            budget.n,
            g.n()
        )));
    }
    let eps = budget.epsilon();
    let rho_t = budget.rho_t();
    let edge_discovery = table
        .rescaled_edges()
        .into_iter()
        .map(|b| predict_edge_discovery(b, eps))
        .collect::<Result<Vec<_>>>()?;
    let vertex_discovery = table
        .rescaled_vertices()
        .into_iter()
        .map(|b| predict_vertex_discovery(b, eps, rho_t))
        .collect::<Result<Vec<_>>>()?;
    let discovered_degree = table
        .rescaled_vertices()
        .into_iter()
        .map(|b| predict_discovered_degree(b, eps))
        .collect::<Result<Vec<_>>>()?;
    let discovered_degree_exact =
        (0..g.n()).map(|v| g.incident(v).map(|(_, e)| edge_discovery[e]).sum()).collect();
    let (edge_redundancy, vertex_redundancy) = predict_redundancies(table, budget.rho_s(), rho_t)?;
    Ok(TheoryPrediction {
        budget: *budget,
        edge_discovery,
        vertex_discovery,
        discovered_degree,
        discovered_degree_exact,
        edge_redundancy,
        vertex_redundancy,
    })
}

/// Target density at which source and target roles are interchangeable for
/// a fixed probe density: `sqrt(eps / N)`.
pub fn symmetry_point(epsilon: f64, n: usize) -> f64 {
    (epsilon / n as f64).sqrt()
}

/// One observed-versus-predicted comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlayRow {
    pub id: usize,
    pub observed: f64,
    pub predicted: f64,
    pub abs_residual: f64,
    /// `NaN` when the prediction is zero.
    pub rel_residual: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub count: usize,
    pub mean_abs: f64,
    pub max_abs: f64,
    /// Over rows with a nonzero prediction.
    pub mean_rel: f64,
    pub max_rel: f64,
}

/// Pairs observations with predictions by index.
pub fn overlay(observed: &[f64], predicted: &[f64]) -> Result<Vec<OverlayRow>> {
    if observed.len() != predicted.len() {
        return Err(Error::InvalidParameter(format!(
            "overlay length mismatch: {} observed, {} predicted",
            observed.len(),
            predicted.len()
        )));
    }
    Ok(observed
        .iter()
        .zip(predicted)
        .enumerate()
        .map(|(id, (&o, &p))| OverlayRow {
            id,
            observed: o,
            predicted: p,
            abs_residual: (o - p).abs(),
            rel_residual: if p != 0.0 { (o - p).abs() / p.abs() } else { f64::NAN },
        })
        .collect())
}

pub fn residual_stats(rows: &[OverlayRow]) -> ResidualStats {
    let mut st = ResidualStats { count: rows.len(), ..Default::default() };
    if rows.is_empty() {
        return st;
    }
    let mut rel_n = 0usize;
    for r in rows {
        st.mean_abs += r.abs_residual;
        st.max_abs = st.max_abs.max(r.abs_residual);
        if r.rel_residual.is_finite() {
            st.mean_rel += r.rel_residual;
            st.max_rel = st.max_rel.max(r.rel_residual);
            rel_n += 1;
        }
    }
    st.mean_abs /= rows.len() as f64;
    if rel_n > 0 {
        st.mean_rel /= rel_n as f64;
    }
    st
}
