//! Experiment drivers: single budget points, fixed-epsilon sweeps over the
//! target density, and random versus low-betweenness deployment.

use serde::{Deserialize, Serialize};

use crate::centrality::BetweennessTable;
use crate::error::{Error, Result};
use crate::explorer::{
    monte_carlo_exploration, run_exploration, DiscoveryAverages, MonteCarloConfig, Placement,
    PlacementStrategy, ProbeBudget,
};
use crate::graph::Graph;
use crate::metrics::{mean_summary, Summary};
use crate::paths::PathSelection;
use crate::seed;
use crate::theory::symmetry_point;

/// Budget for `n_sources` sources and `round(rho_t * n)` targets (at least
/// one). When sources and targets do not fit in the graph, the target count
/// is lowered and a note says so.
pub fn fixed_budget(n: usize, n_sources: usize, rho_t: f64) -> Result<(ProbeBudget, Option<String>)> {
    if n_sources == 0 {
        return Err(Error::InvalidParameter("at least one source is required".into()));
    }
    if n_sources >= n {
        return Err(Error::BudgetExceedsGraph { requested: n_sources + 1, n });
    }
    let wanted = ((rho_t * n as f64).round() as usize).max(1);
    let n_targets = wanted.min(n - n_sources);
    let note = (n_targets < wanted).then(|| {
        format!(
            "rho_t={rho_t} asks for {wanted} targets but only {n_targets} vertices remain after {n_sources} sources; using {n_targets}"
        )
    });
    Ok((ProbeBudget::new(n, n_sources, n_targets), note))
}

/// Budget for a sweep point at fixed probe density: `N_T = round(rho_t N)`
/// (at least one) and `N_S = round(eps N / N_T)` (at least one). `None`
/// when sources and targets cannot be disjoint.
pub fn sweep_budget(n: usize, epsilon: f64, rho_t: f64) -> Option<ProbeBudget> {
    let n_targets = ((rho_t * n as f64).round() as usize).max(1);
    let n_sources = ((epsilon * n as f64 / n_targets as f64).round() as usize).max(1);
    (n_sources + n_targets <= n).then(|| ProbeBudget::new(n, n_sources, n_targets))
}

/// Target density equivalent to `rho_t` with roles exchanged.
pub fn mirror_rho_t(epsilon: f64, n: usize, rho_t: f64) -> f64 {
    epsilon / (n as f64 * rho_t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub budget: ProbeBudget,
    pub summary: Summary,
    pub averages: DiscoveryAverages,
    /// One source: sampled degree distributions show a spurious `k^-1` law.
    pub single_source_regime: bool,
}

/// Monte Carlo run for one budget.
pub fn run_point(
    g: &Graph,
    table: Option<&BetweennessTable>,
    budget: &ProbeBudget,
    psc: PathSelection,
    strategy: PlacementStrategy,
    realizations: usize,
    seed: u64,
) -> Result<PointResult> {
    let cfg = MonteCarloConfig::new(budget.n_sources, budget.n_targets, psc)
        .strategy(strategy)
        .realizations(realizations)
        .seed(seed);
    let averages = monte_carlo_exploration(g, &cfg, table)?;
    let summary = mean_summary(g, &averages, budget)?;
    Ok(PointResult { budget: *budget, summary, averages, single_source_regime: budget.n_sources == 1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub rho_t_requested: f64,
    pub rho_t: f64,
    pub mirror_rho_t: f64,
    pub n_sources: usize,
    pub n_targets: usize,
    /// Realized probe density after rounding.
    pub epsilon: f64,
    pub vertex_fraction: f64,
    pub edge_fraction: f64,
    pub degree_ratio: f64,
    /// ASP only: whether swapping the roles of realization 0 left the
    /// sampled graph unchanged.
    pub swap_symmetric: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub epsilon: f64,
    pub symmetry_point: f64,
    pub rows: Vec<SweepRow>,
    /// Grid values whose budget does not fit in the graph.
    pub dropped: Vec<f64>,
}

/// Whether ASP exploration is unchanged when sources and targets trade
/// roles.
pub fn asp_swap_symmetric(g: &Graph, placement: &Placement, seed: u64) -> bool {
    let a = run_exploration(g, placement, PathSelection::Asp, seed);
    let b = run_exploration(g, &placement.swapped(), PathSelection::Asp, seed);
    a.vertex_found == b.vertex_found && a.discovered_edges() == b.discovered_edges()
}

#[allow(clippy::too_many_arguments)]
fn sweep_row(
    g: &Graph,
    table: Option<&BetweennessTable>,
    epsilon: f64,
    rho_t: f64,
    budget: &ProbeBudget,
    psc: PathSelection,
    strategy: PlacementStrategy,
    realizations: usize,
    seed: u64,
) -> Result<SweepRow> {
    let point = run_point(g, table, budget, psc, strategy, realizations, seed)?;
    let swap_symmetric = if psc == PathSelection::Asp {
        let cfg =
            MonteCarloConfig::new(budget.n_sources, budget.n_targets, psc).strategy(strategy).seed(seed);
        let (placement, _) = crate::explorer::monte_carlo_realization(g, &cfg, table, 0)?;
        Some(asp_swap_symmetric(g, &placement, seed))
    } else {
        None
    };
    Ok(SweepRow {
        rho_t_requested: rho_t,
        rho_t: budget.rho_t(),
        mirror_rho_t: mirror_rho_t(epsilon, g.n(), budget.rho_t()),
        n_sources: budget.n_sources,
        n_targets: budget.n_targets,
        epsilon: budget.epsilon(),
        vertex_fraction: point.summary.vertex_fraction,
        edge_fraction: point.summary.edge_fraction,
        degree_ratio: point.summary.degree_ratio,
        swap_symmetric,
    })
}

/// Feasible `(grid index, rho_t, budget)` points and the dropped densities.
type FeasibleGrid = (Vec<(usize, f64, ProbeBudget)>, Vec<f64>);

fn feasible_grid(n: usize, epsilon: f64, grid: &[f64]) -> Result<FeasibleGrid> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("probe density must be positive, got {epsilon}")));
    }
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    for (i, &r) in grid.iter().enumerate() {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidParameter(format!("target density must lie in (0, 1], got {r}")));
        }
        match sweep_budget(n, epsilon, r) {
            Some(b) => points.push((i, r, b)),
            None => dropped.push(r),
        }
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter(format!("no grid point fits {n} vertices at epsilon={epsilon}")));
    }
    Ok((points, dropped))
}

/// `N*/N`, `E*/E` and `k̄*/k̄` along a grid of target densities at fixed
/// probe density. Grid point `i` uses seed `derive(seed, "sweep", i)`.
#[allow(clippy::too_many_arguments)]
pub fn symmetry_sweep(
    g: &Graph,
    table: Option<&BetweennessTable>,
    epsilon: f64,
    grid: &[f64],
    psc: PathSelection,
    strategy: PlacementStrategy,
    realizations: usize,
    seed: u64,
) -> Result<SweepResult> {
    let (points, dropped) = feasible_grid(g.n(), epsilon, grid)?;
    let rows = points
        .iter()
        .map(|&(i, r, b)| {
            let s = seed::derive(seed, "sweep", i as u64);
            sweep_row(g, table, epsilon, r, &b, psc, strategy, realizations, s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { epsilon, symmetry_point: symmetry_point(epsilon, g.n()), rows, dropped })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub random: SweepRow,
    pub low_betweenness: SweepRow,
}

impl ComparisonRow {
    pub fn vertex_gain(&self) -> f64 {
        self.low_betweenness.vertex_fraction - self.random.vertex_fraction
    }

    pub fn edge_gain(&self) -> f64 {
        self.low_betweenness.edge_fraction - self.random.edge_fraction
    }

    pub fn degree_gain(&self) -> f64 {
        self.low_betweenness.degree_ratio - self.random.degree_ratio
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub epsilon: f64,
    pub symmetry_point: f64,
    pub rows: Vec<ComparisonRow>,
    pub dropped: Vec<f64>,
}

/// Random and low-betweenness deployment on the same grid; both runs at a
/// grid point share the seed.
#[allow(clippy::too_many_arguments)]
pub fn compare_deployment(
    g: &Graph,
    table: &BetweennessTable,
    epsilon: f64,
    grid: &[f64],
    psc: PathSelection,
    realizations: usize,
    seed: u64,
) -> Result<ComparisonResult> {
    let (points, dropped) = feasible_grid(g.n(), epsilon, grid)?;
    let rows = points
        .iter()
        .map(|&(i, r, b)| {
            let s = seed::derive(seed, "sweep", i as u64);
            let run = |strategy| sweep_row(g, Some(table), epsilon, r, &b, psc, strategy, realizations, s);
            Ok(ComparisonRow {
                random: run(PlacementStrategy::Random)?,
                low_betweenness: run(PlacementStrategy::LowBetweenness)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonResult { epsilon, symmetry_point: symmetry_point(epsilon, g.n()), rows, dropped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::brandes_betweenness;

    fn balanced_tree(levels: u32) -> Graph {
        let n = 2usize.pow(levels) - 1;
        let edges: Vec<_> = (1..n).map(|v| ((v - 1) / 2, v)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn fixed_budget_rounding_and_clamp() {
        let (b, note) = fixed_budget(1000, 2, 0.1).unwrap();
        assert_eq!((b.n_sources, b.n_targets), (2, 100));
        assert!(note.is_none());
        let (b, note) = fixed_budget(10, 2, 1.0).unwrap();
        assert_eq!(b.n_targets, 8);
        assert!(note.is_some());
        let (b, _) = fixed_budget(1000, 1, 1e-6).unwrap();
        assert_eq!(b.n_targets, 1);
        assert!(fixed_budget(10, 0, 0.1).is_err());
        assert!(fixed_budget(10, 10, 0.1).is_err());
    }

    #[test]
    fn sweep_budget_rounding() {
        let b = sweep_budget(10_000, 2.0, 0.0141).unwrap();
        assert_eq!((b.n_targets, b.n_sources), (141, 142));
        assert!((b.epsilon() - 2.0).abs() < 0.02);
        assert!(sweep_budget(10_000, 2.0, 2e-4).is_none());
        let b = sweep_budget(10_000, 2.0, 0.5).unwrap();
        assert_eq!((b.n_sources, b.n_targets), (4, 5000));
    }

    #[test]
    fn single_point_sweep_and_empty_grid() {
        let g = balanced_tree(6);
        let r = symmetry_sweep(&g, None, 2.0, &[0.1], PathSelection::Rsp, PlacementStrategy::Random, 2, 1)
            .unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(r.dropped.is_empty());
        assert!(symmetry_sweep(
            &g,
            None,
            100.0,
            &[0.001],
            PathSelection::Rsp,
            PlacementStrategy::Random,
            2,
            1
        )
        .is_err());
    }

    #[test]
    fn asp_sweep_reports_swap_symmetry() {
        let g = crate::generators::generate_er(120, 5.0, 2).unwrap();
        let (g, _) = g.largest_connected_component();
        let r =
            symmetry_sweep(&g, None, 1.0, &[0.05, 0.2], PathSelection::Asp, PlacementStrategy::Random, 2, 3)
                .unwrap();
        assert!(r.rows.iter().all(|row| row.swap_symmetric == Some(true)));
    }

    #[test]
    fn low_betweenness_reaches_all_tree_leaves() {
        // 15-vertex balanced tree with 8 leaves; a budget of 2 + 6 places
        // every terminal on a leaf.
        let g = balanced_tree(4);
        let t = brandes_betweenness(&g).unwrap();
        let (b, _) = fixed_budget(g.n(), 2, 6.0 / 15.0).unwrap();
        let p =
            run_point(&g, Some(&t), &b, PathSelection::Usp, PlacementStrategy::LowBetweenness, 3, 0).unwrap();
        let leaves: Vec<usize> = (7..15).collect();
        let disc = p.averages.vertex_discovery();
        let found = leaves.iter().filter(|&&v| disc[v] == 1.0).count();
        assert_eq!(found, 8);

        let rnd = run_point(&g, Some(&t), &b, PathSelection::Usp, PlacementStrategy::Random, 50, 0).unwrap();
        let rdisc = rnd.averages.vertex_discovery();
        assert!(leaves.iter().any(|&v| rdisc[v] < 1.0));
    }

    #[test]
    fn full_coverage_comparison() {
        let g = balanced_tree(4);
        let t = brandes_betweenness(&g).unwrap();
        // eps = 7 * 8 / 15: every vertex is a source or a target.
        let eps = 56.0 / 15.0;
        let r = compare_deployment(&g, &t, eps, &[8.0 / 15.0], PathSelection::Usp, 3, 5).unwrap();
        let row = r.rows[0];
        assert_eq!(row.random.n_sources + row.random.n_targets, 15);
        assert_eq!(row.random.vertex_fraction, 1.0);
        assert_eq!(row.low_betweenness.vertex_fraction, 1.0);
    }
}
