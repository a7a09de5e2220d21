//! Source/target deployment and the probing process.
//!
//! A run probes every ordered pair `(s, t)` of a [`Placement`] with the
//! chosen path-selection criterion and accumulates the union of the probed
//! routes in a [`SampledGraph`], together with redundancy counters and the
//! per-vertex transit counts `c_i(k, j)` (probe entered `i` from `k` and left
//! toward `j`).
//!
//! Counting conventions:
//! - `r_n` increments at every vertex of a route, endpoints included.
//! - transit counts only exist for interior vertices.
//! - under ASP, every vertex and DAG edge lying on some shortest path of the
//!   pair counts once for that pair, and every (in, out) combination through
//!   an interior vertex of that DAG counts once as a transit.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::{brandes_betweenness, BetweennessTable};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::paths::{BfsWorkspace, PathSelection, SubDag, Walk};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementStrategy {
    Random,
    LowBetweenness,
}

impl fmt::Display for PlacementStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Random => "random",
            Self::LowBetweenness => "low-betweenness",
        })
    }
}

impl FromStr for PlacementStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random" => Ok(Self::Random),
            "low-betweenness" | "lowbc" => Ok(Self::LowBetweenness),
            other => Err(Error::InvalidParameter(format!(
                "unknown placement strategy '{other}' (expected random or low-betweenness)"
            ))),
        }
    }
}

/// Source and target counts for an experiment on an `n`-vertex graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeBudget {
    pub n: usize,
    pub n_sources: usize,
    pub n_targets: usize,
}

impl ProbeBudget {
    pub fn new(n: usize, n_sources: usize, n_targets: usize) -> Self {
        Self { n, n_sources, n_targets }
    }

    /// Target count `round(rho_t * n)`.
    pub fn with_target_density(n: usize, n_sources: usize, rho_t: f64) -> Self {
        Self::new(n, n_sources, (rho_t * n as f64).round() as usize)
    }

    pub fn rho_t(&self) -> f64 {
        self.n_targets as f64 / self.n as f64
    }

    pub fn rho_s(&self) -> f64 {
        self.n_sources as f64 / self.n as f64
    }

    /// Probe density `N_S * N_T / N`.
    pub fn epsilon(&self) -> f64 {
        self.n_sources as f64 * self.n_targets as f64 / self.n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub sources: Vec<usize>,
    pub targets: Vec<usize>,
    pub strategy: PlacementStrategy,
}

impl Placement {
    /// Validates an explicit placement. Sources and targets must be
    /// disjoint unless `allow_overlap` is set.
    pub fn new(
        g: &Graph,
        sources: Vec<usize>,
        targets: Vec<usize>,
        strategy: PlacementStrategy,
        allow_overlap: bool,
    ) -> Result<Self> {
        let mut seen = vec![0u8; g.n()];
        for (list, bit) in [(&sources, 1u8), (&targets, 2u8)] {
            for &v in list {
                g.check_vertex(v)?;
                if seen[v] & bit != 0 {
                    return Err(Error::InvalidParameter(format!("vertex {v} listed twice in the same role")));
                }
                seen[v] |= bit;
            }
        }
        if !allow_overlap {
            if let Some(v) = seen.iter().position(|&b| b == 3) {
                return Err(Error::InvalidParameter(format!("vertex {v} is both a source and a target")));
            }
        }
        Ok(Self { sources, targets, strategy })
    }

    pub fn budget(&self, n: usize) -> ProbeBudget {
        ProbeBudget::new(n, self.sources.len(), self.targets.len())
    }

    /// The same deployment with roles exchanged.
    pub fn swapped(&self) -> Self {
        Self { sources: self.targets.clone(), targets: self.sources.clone(), strategy: self.strategy }
    }
}

/// Sources then targets drawn uniformly without replacement.
pub fn place_random(g: &Graph, n_sources: usize, n_targets: usize, seed: u64) -> Result<Placement> {
    let requested = n_sources + n_targets;
    if requested > g.n() {
        return Err(Error::BudgetExceedsGraph { requested, n: g.n() });
    }
    let mut rng = seed::rng(seed::derive(seed, "placement", 0));
    let picked = index::sample(&mut rng, g.n(), requested).into_vec();
    Ok(Placement {
        sources: picked[..n_sources].to_vec(),
        targets: picked[n_sources..].to_vec(),
        strategy: PlacementStrategy::Random,
    })
}

/// Independent draws for sources and targets; a vertex may hold both roles.
/// Pairs with `s == t` are skipped during exploration.
pub fn place_random_overlapping(
    g: &Graph,
    n_sources: usize,
    n_targets: usize,
    seed: u64,
) -> Result<Placement> {
    let n = g.n();
    if n_sources > n || n_targets > n {
        return Err(Error::BudgetExceedsGraph { requested: n_sources.max(n_targets), n });
    }
    let mut rng = seed::rng(seed::derive(seed, "placement-overlap", 0));
    Ok(Placement {
        sources: index::sample(&mut rng, n, n_sources).into_vec(),
        targets: index::sample(&mut rng, n, n_targets).into_vec(),
        strategy: PlacementStrategy::Random,
    })
}

/// The `n_sources + n_targets` vertices of smallest betweenness (ties by
/// label); sources take the smallest ones.
pub fn place_low_betweenness(
    g: &Graph,
    table: &BetweennessTable,
    n_sources: usize,
    n_targets: usize,
) -> Result<Placement> {
    if n_sources == 0 {
        return Err(Error::InvalidParameter("at least one source is required".into()));
    }
    let requested = n_sources + n_targets;
    if requested > g.n() {
        return Err(Error::BudgetExceedsGraph { requested, n: g.n() });
    }
    if table.vertex.len() != g.n() {
        return Err(Error::InvalidParameter("betweenness table does not match graph".into()));
    }
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| table.vertex[a].total_cmp(&table.vertex[b]).then(a.cmp(&b)));
    Ok(Placement {
        sources: order[..n_sources].to_vec(),
        targets: order[n_sources..requested].to_vec(),
        strategy: PlacementStrategy::LowBetweenness,
    })
}

/// Transit count `c_i(k, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transit {
    pub vertex: usize,
    pub from: usize,
    pub to: usize,
    pub count: u64,
}

/// Union of probed routes plus the counters gathered while probing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledGraph {
    pub psc: PathSelection,
    /// Indexed by vertex of the underlying graph.
    pub vertex_found: Vec<bool>,
    /// `r_n`, indexed by vertex.
    pub vertex_redundancy: Vec<u64>,
    /// Visits of a vertex as the source or target of a probe.
    pub terminal_visits: Vec<u64>,
    /// `r_e`, indexed by edge id of the underlying graph.
    pub edge_redundancy: Vec<u64>,
    /// Sorted by `(vertex, from, to)`. Empty when transit tracking is off.
    pub transits: Vec<Transit>,
    pub probes: u64,
    pub skipped_pairs: u64,
    /// Total edge traversals over all probes.
    pub edge_steps: u64,
}

impl SampledGraph {
    fn new(g: &Graph, psc: PathSelection) -> Self {
        Self {
            psc,
            vertex_found: vec![false; g.n()],
            vertex_redundancy: vec![0; g.n()],
            terminal_visits: vec![0; g.n()],
            edge_redundancy: vec![0; g.m()],
            transits: Vec::new(),
            probes: 0,
            skipped_pairs: 0,
            edge_steps: 0,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_found.iter().filter(|&&f| f).count()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_redundancy.iter().filter(|&&r| r > 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_count() == 0
    }

    pub fn discovered_vertices(&self) -> Vec<usize> {
        (0..self.vertex_found.len()).filter(|&v| self.vertex_found[v]).collect()
    }

    /// Edge ids of discovered edges.
    pub fn discovered_edges(&self) -> Vec<usize> {
        (0..self.edge_redundancy.len()).filter(|&e| self.edge_redundancy[e] > 0).collect()
    }

    pub fn edge_found(&self, e: usize) -> bool {
        self.edge_redundancy[e] > 0
    }

    /// Discovered degree `k*` of every vertex.
    pub fn discovered_degrees(&self, g: &Graph) -> Vec<usize> {
        let mut k = vec![0; g.n()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if self.edge_redundancy[e] > 0 {
                k[u] += 1;
                k[v] += 1;
            }
        }
        k
    }

    /// Transits through `v` as `((from, to), count)`.
    pub fn transits_at(&self, v: usize) -> &[Transit] {
        let lo = self.transits.partition_point(|t| t.vertex < v);
        let hi = self.transits.partition_point(|t| t.vertex <= v);
        &self.transits[lo..hi]
    }

    /// The sampled graph on the original vertex labels; undiscovered
    /// vertices stay as isolated vertices.
    pub fn to_graph(&self, g: &Graph) -> Graph {
        let edges: Vec<(usize, usize)> = self.discovered_edges().into_iter().map(|e| g.edge(e)).collect();
        Graph::from_canonical(g.n(), edges)
    }
}

struct Recorder<'a> {
    sampled: &'a mut SampledGraph,
    raw_transits: Option<Vec<(usize, usize, usize)>>,
}

impl Recorder<'_> {
    /// Route listed from source to target.
    fn route(&mut self, vertices: &[usize], edges: &[usize]) {
        let s = &mut *self.sampled;
        s.probes += 1;
        s.edge_steps += edges.len() as u64;
        for &v in vertices {
            s.vertex_found[v] = true;
            s.vertex_redundancy[v] += 1;
        }
        for &e in edges {
            s.edge_redundancy[e] += 1;
        }
        if let (Some(&first), Some(&last)) = (vertices.first(), vertices.last()) {
            s.terminal_visits[first] += 1;
            s.terminal_visits[last] += 1;
        }
        if let Some(raw) = self.raw_transits.as_mut() {
            for w in vertices.windows(3) {
                raw.push((w[1], w[0], w[2]));
            }
        }
    }

    /// ASP pair; `root_is_target` tells which endpoint the BFS started from.
    fn subdag(&mut self, source: usize, target: usize, dag: &SubDag, root_is_target: bool) {
        let s = &mut *self.sampled;
        s.probes += 1;
        s.edge_steps += dag.edges.len() as u64;
        for &v in &dag.vertices {
            s.vertex_found[v] = true;
            s.vertex_redundancy[v] += 1;
        }
        for &(_, _, e) in &dag.edges {
            s.edge_redundancy[e] += 1;
        }
        s.terminal_visits[source] += 1;
        s.terminal_visits[target] += 1;
        if let Some(raw) = self.raw_transits.as_mut() {
            // For each DAG edge (near, far) with respect to the root: seen
            // from `near` the probe continues to `far` on the source side.
            let mut source_side: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            let mut target_side: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &(near, far, _) in &dag.edges {
                if root_is_target {
                    // Probe runs far -> near.
                    target_side.entry(far).or_default().push(near);
                    source_side.entry(near).or_default().push(far);
                } else {
                    source_side.entry(far).or_default().push(near);
                    target_side.entry(near).or_default().push(far);
                }
            }
            for (&i, ins) in &source_side {
                if i == source || i == target {
                    continue;
                }
                if let Some(outs) = target_side.get(&i) {
                    for &k in ins {
                        for &j in outs {
                            raw.push((i, k, j));
                        }
                    }
                }
            }
        }
    }

    fn finish(self) {
        if let Some(mut raw) = self.raw_transits {
            raw.sort_unstable();
            let mut out: Vec<Transit> = Vec::new();
            for (vertex, from, to) in raw {
                match out.last_mut() {
                    Some(t) if (t.vertex, t.from, t.to) == (vertex, from, to) => t.count += 1,
                    _ => out.push(Transit { vertex, from, to, count: 1 }),
                }
            }
            self.sampled.transits = out;
        }
    }
}

/// Probes every source-target pair of `placement` and returns the sampled
/// graph with all counters, transit counts included.
pub fn run_exploration(g: &Graph, placement: &Placement, psc: PathSelection, seed: u64) -> SampledGraph {
    let mut ws = BfsWorkspace::new(g.n());
    explore(g, placement, psc, seed, true, &mut ws)
}

pub(crate) fn explore(
    g: &Graph,
    placement: &Placement,
    psc: PathSelection,
    seed: u64,
    track_transits: bool,
    ws: &mut BfsWorkspace,
) -> SampledGraph {
    let mut sampled = SampledGraph::new(g, psc);
    for &v in placement.sources.iter().chain(&placement.targets) {
        sampled.vertex_found[v] = true;
    }
    let mut rec = Recorder { sampled: &mut sampled, raw_transits: track_transits.then(Vec::new) };
    let (sources, targets) = (&placement.sources, &placement.targets);
    let mut walk = Walk::default();
    let mut skipped = 0u64;

    match psc {
        PathSelection::Usp => {
            let tie_seed = seed::derive(seed, "usp-ties", 0);
            let source_rooted = sources.len() < targets.len();
            usp_probes(g, sources, targets, tie_seed, source_rooted, ws, &mut rec, &mut skipped);
        }
        PathSelection::Rsp => {
            let rsp_seed = seed::derive(seed, "rsp", 0);
            let pair_draw = |s: usize, t: usize| {
                let pair = seed::derive2(rsp_seed, "pair", s as u64, t as u64);
                seed::derive(pair, "draw", 0)
            };
            // Paths are defined by a backward walk from s in a BFS rooted at
            // t; the source-rooted branch rebuilds the same walk.
            let mut dag = SubDag::default();
            if sources.len() <= targets.len() {
                for &s in sources {
                    ws.run(g, s);
                    for &t in targets {
                        if s == t || !ws.reached(t) {
                            skipped += 1;
                            continue;
                        }
                        ws.random_route_from_root(g, t, pair_draw(s, t), &mut dag, &mut walk);
                        rec.route(&walk.vertices, &walk.edges);
                    }
                }
            } else {
                // Pairs are still recorded source-major so the transit
                // orientation and probe order do not depend on rooting.
                for &t in targets {
                    ws.run(g, t);
                    for &s in sources {
                        if s == t || !ws.reached(s) {
                            skipped += 1;
                            continue;
                        }
                        ws.random_walk_to_root(s, pair_draw(s, t), &mut walk);
                        rec.route(&walk.vertices, &walk.edges);
                    }
                }
            }
        }
        PathSelection::Asp => {
            let mut dag = SubDag::default();
            let root_is_target = targets.len() < sources.len();
            let (roots, others) = if root_is_target { (targets, sources) } else { (sources, targets) };
            for &r in roots {
                ws.run(g, r);
                for &o in others {
                    if r == o || !ws.reached(o) {
                        skipped += 1;
                        continue;
                    }
                    ws.shortest_path_subdag(o, &mut dag);
                    let (s, t) = if root_is_target { (o, r) } else { (r, o) };
                    rec.subdag(s, t, &dag, root_is_target);
                }
            }
        }
    }
    rec.finish();
    sampled.skipped_pairs = skipped;
    sampled
}

/// Routes are defined by target-rooted next hops; rooting the BFS at the
/// smaller side only changes the cost.
#[allow(clippy::too_many_arguments)]
fn usp_probes(
    g: &Graph,
    sources: &[usize],
    targets: &[usize],
    tie_seed: u64,
    source_rooted: bool,
    ws: &mut BfsWorkspace,
    rec: &mut Recorder<'_>,
    skipped: &mut u64,
) {
    let mut walk = Walk::default();
    if source_rooted {
        let mut dag = SubDag::default();
        for &s in sources {
            ws.run(g, s);
            for &t in targets {
                if s == t || !ws.reached(t) {
                    *skipped += 1;
                    continue;
                }
                ws.usp_route_from_root(g, t, tie_seed, &mut dag, &mut walk);
                rec.route(&walk.vertices, &walk.edges);
            }
        }
        return;
    }
    for &t in targets {
        ws.run(g, t);
        for &s in sources {
            if s == t || !ws.reached(s) {
                *skipped += 1;
                continue;
            }
            walk.clear();
            walk.vertices.push(s);
            let mut v = s;
            while v != t {
                let (u, e) = ws.usp_next_hop(tie_seed, v);
                walk.vertices.push(u);
                walk.edges.push(e);
                v = u;
            }
            rec.route(&walk.vertices, &walk.edges);
        }
    }
}

/// Settings for [`monte_carlo_exploration`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub n_sources: usize,
    pub n_targets: usize,
    pub psc: PathSelection,
    pub strategy: PlacementStrategy,
    pub realizations: usize,
    pub master_seed: u64,
    /// Let sources and targets share vertices (random strategy only).
    pub allow_overlap: bool,
}

impl MonteCarloConfig {
    pub fn new(n_sources: usize, n_targets: usize, psc: PathSelection) -> Self {
        Self {
            n_sources,
            n_targets,
            psc,
            strategy: PlacementStrategy::Random,
            realizations: 10,
            master_seed: 0,
            allow_overlap: false,
        }
    }

    pub fn realizations(mut self, r: usize) -> Self {
        self.realizations = r;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn strategy(mut self, strategy: PlacementStrategy) -> Self {
        self.strategy = strategy;
        self
    }
}

/// Per-realization totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationSummary {
    pub vertices_found: usize,
    pub edges_found: usize,
    pub probes: u64,
    pub skipped_pairs: u64,
}

/// Running sums over realizations. All counters are integers, so merging
/// partial sums is exact in any order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryAverages {
    pub realizations: usize,
    pub vertex_found: Vec<u64>,
    pub edge_found: Vec<u64>,
    pub vertex_redundancy: Vec<u64>,
    pub edge_redundancy: Vec<u64>,
    pub discovered_degree: Vec<u64>,
    pub edge_steps: u64,
    pub per_realization: Vec<RealizationSummary>,
}

impl DiscoveryAverages {
    fn zero(g: &Graph) -> Self {
        Self {
            realizations: 0,
            vertex_found: vec![0; g.n()],
            edge_found: vec![0; g.m()],
            vertex_redundancy: vec![0; g.n()],
            edge_redundancy: vec![0; g.m()],
            discovered_degree: vec![0; g.n()],
            edge_steps: 0,
            per_realization: Vec::new(),
        }
    }

    fn add_sample(&mut self, g: &Graph, s: &SampledGraph) {
        self.realizations += 1;
        for v in 0..g.n() {
            self.vertex_found[v] += s.vertex_found[v] as u64;
            self.vertex_redundancy[v] += s.vertex_redundancy[v];
        }
        let mut edges_found = 0;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let r = s.edge_redundancy[e];
            self.edge_redundancy[e] += r;
            if r > 0 {
                edges_found += 1;
                self.edge_found[e] += 1;
                self.discovered_degree[u] += 1;
                self.discovered_degree[v] += 1;
            }
        }
        self.edge_steps += s.edge_steps;
        self.per_realization.push(RealizationSummary {
            vertices_found: s.vertex_count(),
            edges_found,
            probes: s.probes,
            skipped_pairs: s.skipped_pairs,
        });
    }

    fn merge(mut self, other: Self) -> Self {
        self.realizations += other.realizations;
        let add = |a: &mut Vec<u64>, b: Vec<u64>| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.vertex_found, other.vertex_found);
        add(&mut self.edge_found, other.edge_found);
        add(&mut self.vertex_redundancy, other.vertex_redundancy);
        add(&mut self.edge_redundancy, other.edge_redundancy);
        add(&mut self.discovered_degree, other.discovered_degree);
        self.edge_steps += other.edge_steps;
        self.per_realization.extend(other.per_realization);
        self
    }

    fn mean(&self, sums: &[u64]) -> Vec<f64> {
        let r = self.realizations.max(1) as f64;
        sums.iter().map(|&s| s as f64 / r).collect()
    }

    /// Empirical vertex discovery probability.
    pub fn vertex_discovery(&self) -> Vec<f64> {
        self.mean(&self.vertex_found)
    }

    pub fn edge_discovery(&self) -> Vec<f64> {
        self.mean(&self.edge_found)
    }

    pub fn mean_vertex_redundancy(&self) -> Vec<f64> {
        self.mean(&self.vertex_redundancy)
    }

    pub fn mean_edge_redundancy(&self) -> Vec<f64> {
        self.mean(&self.edge_redundancy)
    }

    pub fn mean_discovered_degree(&self) -> Vec<f64> {
        self.mean(&self.discovered_degree)
    }

    pub fn total_skipped_pairs(&self) -> u64 {
        self.per_realization.iter().map(|r| r.skipped_pairs).sum()
    }
}

fn fixed_placement(
    g: &Graph,
    cfg: &MonteCarloConfig,
    table: Option<&BetweennessTable>,
) -> Result<Option<Placement>> {
    match cfg.strategy {
        PlacementStrategy::Random => Ok(None),
        PlacementStrategy::LowBetweenness => {
            let table = table.ok_or_else(|| {
                Error::InvalidParameter("low-betweenness placement needs betweenness".into())
            })?;
            place_low_betweenness(g, table, cfg.n_sources, cfg.n_targets).map(Some)
        }
    }
}

fn realization_placement(
    g: &Graph,
    cfg: &MonteCarloConfig,
    fixed: Option<&Placement>,
    r: usize,
) -> Result<Placement> {
    if let Some(p) = fixed {
        return Ok(p.clone());
    }
    let s = seed::derive(cfg.master_seed, "placement", r as u64);
    if cfg.allow_overlap {
        place_random_overlapping(g, cfg.n_sources, cfg.n_targets, s)
    } else {
        place_random(g, cfg.n_sources, cfg.n_targets, s)
    }
}

fn exploration_seed(cfg: &MonteCarloConfig, r: usize) -> u64 {
    seed::derive(cfg.master_seed, "exploration", r as u64)
}

/// Replays realization `r` of [`monte_carlo_exploration`] with transit
/// tracking on, returning its placement and sampled graph.
pub fn monte_carlo_realization(
    g: &Graph,
    cfg: &MonteCarloConfig,
    betweenness: Option<&BetweennessTable>,
    r: usize,
) -> Result<(Placement, SampledGraph)> {
    let owned;
    let table = match (cfg.strategy, betweenness) {
        (PlacementStrategy::LowBetweenness, None) => {
            owned = brandes_betweenness(g)?;
            Some(&owned)
        }
        (_, t) => t,
    };
    let fixed = fixed_placement(g, cfg, table)?;
    let placement = realization_placement(g, cfg, fixed.as_ref(), r)?;
    let sampled = run_exploration(g, &placement, cfg.psc, exploration_seed(cfg, r));
    Ok((placement, sampled))
}

/// Averages discovery indicators and counters over independent placements.
/// Realization `r` uses placement and exploration seeds derived from
/// `(master_seed, r)`, so the result does not depend on thread scheduling.
/// A betweenness table is computed on demand for the low-betweenness
/// strategy when none is supplied.
pub fn monte_carlo_exploration(
    g: &Graph,
    cfg: &MonteCarloConfig,
    betweenness: Option<&BetweennessTable>,
) -> Result<DiscoveryAverages> {
    if cfg.realizations == 0 {
        return Err(Error::InvalidParameter("at least one realization is required".into()));
    }
    let requested = cfg.n_sources + cfg.n_targets;
    if requested > g.n() && !cfg.allow_overlap {
        return Err(Error::BudgetExceedsGraph { requested, n: g.n() });
    }
    let owned;
    let table = match (cfg.strategy, betweenness) {
        (PlacementStrategy::LowBetweenness, None) => {
            owned = brandes_betweenness(g)?;
            Some(&owned)
        }
        (_, t) => t,
    };
    let fixed = fixed_placement(g, cfg, table)?;
    let place = |r: usize| realization_placement(g, cfg, fixed.as_ref(), r);

    let mut result = (0..cfg.realizations)
        .into_par_iter()
        .fold(
            || Ok((DiscoveryAverages::zero(g), BfsWorkspace::new(g.n()), Vec::new())),
            |acc: Result<(DiscoveryAverages, BfsWorkspace, Vec<usize>)>, r| {
                let (mut sums, mut ws, mut order) = acc?;
                let placement = place(r)?;
                let sampled = explore(g, &placement, cfg.psc, exploration_seed(cfg, r), false, &mut ws);
                sums.add_sample(g, &sampled);
                order.push(r);
                Ok((sums, ws, order))
            },
        )
        .map(|acc| acc.map(|(sums, _, order)| (sums, order)))
        .reduce(
            || Ok((DiscoveryAverages::zero(g), Vec::new())),
            |a, b| {
                let (sa, mut oa) = a?;
                let (sb, ob) = b?;
                oa.extend(ob);
                Ok((sa.merge(sb), oa))
            },
        )?;

    // Put per-realization summaries back in realization order.
    let (ref mut sums, ref order) = result;
    let mut paired: Vec<(usize, RealizationSummary)> =
        order.iter().copied().zip(sums.per_realization.iter().copied()).collect();
    paired.sort_by_key(|&(r, _)| r);
    sums.per_realization = paired.into_iter().map(|(_, s)| s).collect();
    Ok(result.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::brandes_betweenness;

    fn star4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn cycle4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    fn fixed(g: &Graph, s: &[usize], t: &[usize]) -> Placement {
        Placement::new(g, s.to_vec(), t.to_vec(), PlacementStrategy::Random, false).unwrap()
    }

    const ALL: [PathSelection; 3] = [PathSelection::Usp, PathSelection::Rsp, PathSelection::Asp];

    #[test]
    fn budget_identities() {
        let b = ProbeBudget::new(1000, 5, 100);
        assert!((b.epsilon() - 0.5).abs() < 1e-12);
        assert!((b.epsilon() - b.rho_t() * 5.0).abs() < 1e-12);
        assert!((b.epsilon() - 1000.0 * b.rho_s() * b.rho_t()).abs() < 1e-12);
        assert_eq!(ProbeBudget::with_target_density(1000, 2, 0.25).n_targets, 250);
    }

    #[test]
    fn random_placement() {
        let g = Graph::from_edges(10, &(1..10).map(|i| (i - 1, i)).collect::<Vec<_>>()).unwrap();
        let p = place_random(&g, 2, 3, 7).unwrap();
        let mut all: Vec<_> = p.sources.iter().chain(&p.targets).copied().collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 5);
        assert_eq!(p, place_random(&g, 2, 3, 7).unwrap());

        let full = place_random(&g, 4, 6, 1).unwrap();
        let mut all: Vec<_> = full.sources.iter().chain(&full.targets).copied().collect();
        all.sort();
        assert_eq!(all, (0..10).collect::<Vec<_>>());

        assert!(matches!(place_random(&g, 5, 6, 1), Err(Error::BudgetExceedsGraph { requested: 11, n: 10 })));
    }

    #[test]
    fn low_betweenness_placement() {
        let g = Graph::from_edges(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]).unwrap();
        let t = brandes_betweenness(&g).unwrap();
        let p = place_low_betweenness(&g, &t, 2, 2).unwrap();
        assert_eq!(p.sources, vec![3, 4]);
        assert_eq!(p.targets, vec![5, 6]);

        let s = star4();
        let t = brandes_betweenness(&s).unwrap();
        let p = place_low_betweenness(&s, &t, 1, 2).unwrap();
        assert!(!p.sources.contains(&0) && !p.targets.contains(&0));
        assert!(place_low_betweenness(&s, &t, 0, 2).is_err());
        assert!(place_low_betweenness(&s, &t, 2, 3).is_err());
    }

    #[test]
    fn placement_validation() {
        let g = star4();
        assert!(Placement::new(&g, vec![1], vec![1], PlacementStrategy::Random, false).is_err());
        assert!(Placement::new(&g, vec![1], vec![1], PlacementStrategy::Random, true).is_ok());
        assert!(Placement::new(&g, vec![1, 1], vec![2], PlacementStrategy::Random, false).is_err());
        assert!(Placement::new(&g, vec![4], vec![2], PlacementStrategy::Random, false).is_err());
    }

    #[test]
    fn star_forced_paths() {
        let g = star4();
        for psc in ALL {
            let s = run_exploration(&g, &fixed(&g, &[1], &[2, 3]), psc, 0);
            assert_eq!(s.vertex_count(), 4);
            assert_eq!(s.edge_count(), 3);
            assert_eq!(s.vertex_redundancy[0], 2);
            assert_eq!(s.edge_steps, s.edge_redundancy.iter().sum::<u64>());
        }
    }

    #[test]
    fn path_counters() {
        let g = path3();
        for psc in ALL {
            let s = run_exploration(&g, &fixed(&g, &[0], &[2]), psc, 0);
            assert_eq!(s.edge_redundancy, vec![1, 1]);
            assert_eq!(s.vertex_redundancy, vec![1, 1, 1]);
            assert_eq!(s.transits, vec![Transit { vertex: 1, from: 0, to: 2, count: 1 }]);
        }
    }

    #[test]
    fn square_degeneracy() {
        let g = cycle4();
        let asp = run_exploration(&g, &fixed(&g, &[0], &[2]), PathSelection::Asp, 0);
        assert_eq!(asp.edge_count(), 4);
        for seed in 0..10 {
            let usp = run_exploration(&g, &fixed(&g, &[0], &[2]), PathSelection::Usp, seed);
            assert_eq!(usp.edge_count(), 2);
            // Edge ids: (0,1)=0, (0,3)=1, (1,2)=2, (2,3)=3.
            let found = usp.discovered_edges();
            assert!(found == vec![0, 2] || found == vec![1, 3], "{found:?}");
        }
    }

    #[test]
    fn transit_accounting_matches_redundancy() {
        let g = crate::generators::generate_er(60, 4.0, 3).unwrap();
        let (g, _) = g.largest_connected_component();
        for psc in [PathSelection::Usp, PathSelection::Rsp] {
            let p = place_random(&g, 3, 8, 5).unwrap();
            let s = run_exploration(&g, &p, psc, 9);
            for v in 0..g.n() {
                let through: u64 = s.transits_at(v).iter().map(|t| t.count).sum();
                assert_eq!(through, s.vertex_redundancy[v] - s.terminal_visits[v]);
            }
            assert_eq!(s.edge_steps, s.edge_redundancy.iter().sum::<u64>());
        }
    }

    #[test]
    fn overlap_pairs_are_skipped() {
        let g = path3();
        let p = Placement::new(&g, vec![0, 1], vec![1, 2], PlacementStrategy::Random, true).unwrap();
        let s = run_exploration(&g, &p, PathSelection::Usp, 0);
        assert_eq!(s.skipped_pairs, 1);
        assert_eq!(s.probes, 3);
    }

    #[test]
    fn monte_carlo_single_realization_is_integral() {
        let g = cycle4();
        let cfg = MonteCarloConfig::new(1, 1, PathSelection::Usp).realizations(1).seed(5);
        let avg = monte_carlo_exploration(&g, &cfg, None).unwrap();
        assert!(avg.vertex_discovery().iter().all(|&p| p == 0.0 || p == 1.0));
        assert_eq!(avg.per_realization.len(), 1);
        let cfg = cfg.realizations(0);
        assert!(monte_carlo_exploration(&g, &cfg, None).is_err());
    }

    #[test]
    fn replayed_realization_matches_sums() {
        let g = crate::generators::generate_er(100, 5.0, 4).unwrap();
        let (g, _) = g.largest_connected_component();
        let cfg = MonteCarloConfig::new(2, 10, PathSelection::Usp).realizations(1).seed(8);
        let avg = monte_carlo_exploration(&g, &cfg, None).unwrap();
        let (_, s) = monte_carlo_realization(&g, &cfg, None, 0).unwrap();
        assert_eq!(avg.vertex_redundancy, s.vertex_redundancy);
        assert_eq!(avg.edge_redundancy, s.edge_redundancy);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let g = crate::generators::generate_er(200, 6.0, 1).unwrap();
        let (g, _) = g.largest_connected_component();
        let cfg = MonteCarloConfig::new(2, 20, PathSelection::Rsp).realizations(16).seed(3);
        let a = monte_carlo_exploration(&g, &cfg, None).unwrap();
        let b = monte_carlo_exploration(&g, &cfg, None).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| monte_carlo_exploration(&g, &cfg, None).unwrap());
        assert_eq!(a, c);
    }

    fn usp_with_rooting(g: &Graph, p: &Placement, seed: u64, source_rooted: bool) -> SampledGraph {
        let mut sampled = SampledGraph::new(g, PathSelection::Usp);
        let mut rec = Recorder { sampled: &mut sampled, raw_transits: Some(Vec::new()) };
        let mut ws = BfsWorkspace::new(g.n());
        let mut skipped = 0;
        let tie_seed = seed::derive(seed, "usp-ties", 0);
        usp_probes(g, &p.sources, &p.targets, tie_seed, source_rooted, &mut ws, &mut rec, &mut skipped);
        rec.finish();
        sampled.skipped_pairs = skipped;
        sampled
    }

    #[test]
    fn rooting_does_not_change_routes() {
        // A lattice has many equal-length alternatives at every step.
        let side = 7;
        let mut edges = Vec::new();
        for r in 0..side {
            for c in 0..side {
                let v = r * side + c;
                if c + 1 < side {
                    edges.push((v, v + 1));
                }
                if r + 1 < side {
                    edges.push((v, v + side));
                }
            }
        }
        let lattice = Graph::from_edges(side * side, &edges).unwrap();
        let er = crate::generators::generate_er(150, 5.0, 9).unwrap();
        for g in [lattice, er] {
            for seed in 0..6u64 {
                let p = place_random(&g, 3, 12, seed).unwrap();
                let a = usp_with_rooting(&g, &p, seed, false);
                let b = usp_with_rooting(&g, &p, seed, true);
                assert_eq!(a, b, "seed {seed}");
                assert!(a.probes > 0);
            }
            // Rsp: walk back from s toward a t root, or forward from an s root.
            let (mut from_t, mut from_s) = (BfsWorkspace::new(g.n()), BfsWorkspace::new(g.n()));
            let (mut wa, mut wb, mut dag) = (Walk::default(), Walk::default(), SubDag::default());
            for (s, t) in [(0, g.n() - 1), (3, 40), (g.n() / 2, 1), (10, 11)] {
                from_t.run(&g, t);
                from_s.run(&g, s);
                for pair_seed in 0..20u64 {
                    from_t.random_walk_to_root(s, pair_seed, &mut wa);
                    from_s.random_route_from_root(&g, t, pair_seed, &mut dag, &mut wb);
                    assert_eq!((&wa.vertices, &wa.edges), (&wb.vertices, &wb.edges), "{s}->{t}");
                }
            }
        }
    }
}
