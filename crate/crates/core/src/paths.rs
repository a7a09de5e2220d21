//! Shortest-path machinery: BFS predecessor DAGs with path counts, and the
//! three path-selection criteria used by the probes.
//!
//! Random choices are made with counter-based draws (a hash of seed, target
//! and vertex, or of a pair seed and step) instead of a sequential generator.
//! A USP next hop therefore depends only on `(tie_seed, target, vertex)`,
//! never on which other routes were looked up first.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

pub const UNREACHABLE: usize = usize::MAX;

/// Path-selection criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathSelection {
    /// Unique shortest path: one fixed route per target.
    Usp,
    /// Random shortest path: a fresh uniform draw per pair.
    Rsp,
    /// All shortest paths.
    Asp,
}

impl fmt::Display for PathSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Usp => "usp",
            Self::Rsp => "rsp",
            Self::Asp => "asp",
        })
    }
}

impl FromStr for PathSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "usp" => Ok(Self::Usp),
            "rsp" => Ok(Self::Rsp),
            "asp" => Ok(Self::Asp),
            other => Err(Error::InvalidParameter(format!(
                "unknown path selection '{other}' (expected usp, rsp or asp)"
            ))),
        }
    }
}

/// Uniform draw in `[0, 1)` from a 64-bit hash.
pub(crate) fn unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Reusable BFS buffers. After [`BfsWorkspace::run`], `dist`, `sigma` and the
/// predecessor lists describe the shortest-path DAG rooted at `root`.
#[derive(Debug, Clone)]
pub(crate) struct BfsWorkspace {
    pub root: usize,
    pub dist: Vec<u32>,
    pub sigma: Vec<f64>,
    /// Vertices in nondecreasing distance order.
    pub order: Vec<usize>,
    pred_range: Vec<(u32, u32)>,
    /// `(predecessor, edge id)` entries, grouped per vertex.
    preds: Vec<(usize, usize)>,
    stamp: Vec<u32>,
    epoch: u32,
    /// Path counts toward the far end of the last sub-DAG.
    count: Vec<f64>,
}

impl BfsWorkspace {
    pub fn new(n: usize) -> Self {
        Self {
            root: 0,
            dist: vec![u32::MAX; n],
            sigma: vec![0.0; n],
            order: Vec::with_capacity(n),
            pred_range: vec![(0, 0); n],
            preds: Vec::new(),
            stamp: vec![0; n],
            epoch: 0,
            count: vec![0.0; n],
        }
    }

    pub fn run(&mut self, g: &Graph, root: usize) {
        self.root = root;
        self.dist.fill(u32::MAX);
        self.order.clear();
        self.preds.clear();
        self.dist[root] = 0;
        self.order.push(root);
        let mut head = 0;
        while head < self.order.len() {
            let v = self.order[head];
            head += 1;
            let next = self.dist[v] + 1;
            for &w in g.neighbors(v) {
                if self.dist[w] == u32::MAX {
                    self.dist[w] = next;
                    self.order.push(w);
                }
            }
        }
        // Second pass in BFS order: predecessors already carry final counts.
        self.sigma[root] = 1.0;
        self.pred_range[root] = (0, 0);
        for i in 1..self.order.len() {
            let v = self.order[i];
            let want = self.dist[v] - 1;
            let start = self.preds.len();
            let mut s = 0.0;
            for (u, e) in g.incident(v) {
                if self.dist[u] == want {
                    self.preds.push((u, e));
                    s += self.sigma[u];
                }
            }
            self.sigma[v] = s;
            self.pred_range[v] = (start as u32, self.preds.len() as u32);
        }
        for (v, d) in self.dist.iter().enumerate() {
            if *d == u32::MAX {
                self.sigma[v] = 0.0;
                self.pred_range[v] = (0, 0);
            }
        }
    }

    pub fn reached(&self, v: usize) -> bool {
        self.dist[v] != u32::MAX
    }

    pub fn preds(&self, v: usize) -> &[(usize, usize)] {
        let (a, b) = self.pred_range[v];
        &self.preds[a as usize..b as usize]
    }

    /// Predecessor of `v` chosen with probability `sigma[u] / sigma[v]`,
    /// using `u01` as the uniform variate.
    pub fn weighted_pred(&self, v: usize, u01: f64) -> (usize, usize) {
        let preds = self.preds(v);
        let threshold = u01 * self.sigma[v];
        let mut acc = 0.0;
        for &(u, e) in preds {
            acc += self.sigma[u];
            if threshold < acc {
                return (u, e);
            }
        }
        *preds.last().expect("reachable non-root vertex has a predecessor")
    }

    /// USP next hop of `v` toward the root of this BFS.
    pub fn usp_next_hop(&self, tie_seed: u64, v: usize) -> (usize, usize) {
        let h = seed::derive2(tie_seed, "usp", self.root as u64, v as u64);
        self.weighted_pred(v, unit(h))
    }

    /// Backward walk from `from` to the root drawing a uniform shortest
    /// path. Returns vertices from `from` to the root and the edges between.
    pub fn random_walk_to_root(&self, from: usize, pair_seed: u64, out: &mut Walk) {
        out.clear();
        out.vertices.push(from);
        let mut v = from;
        let mut step = 0u64;
        while v != self.root {
            let (u, e) = self.weighted_pred(v, unit(seed::derive(pair_seed, "step", step)));
            out.vertices.push(u);
            out.edges.push(e);
            v = u;
            step += 1;
        }
    }

    /// Vertices and DAG edges lying on some shortest path between `from`
    /// and the root. Edges are reported as `(closer to root, farther, id)`.
    pub fn shortest_path_subdag(&mut self, from: usize, out: &mut SubDag) {
        out.clear();
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.stamp[from] = self.epoch;
        out.vertices.push(from);
        let mut head = 0;
        while head < out.vertices.len() {
            let v = out.vertices[head];
            head += 1;
            let (a, b) = self.pred_range[v];
            for &(u, e) in &self.preds[a as usize..b as usize] {
                out.edges.push((u, v, e));
                if self.stamp[u] != self.epoch {
                    self.stamp[u] = self.epoch;
                    out.vertices.push(u);
                }
            }
        }
    }
}

impl BfsWorkspace {
    /// USP route from the BFS root to `target`, identical to the route that
    /// [`BfsWorkspace::usp_next_hop`] produces from a BFS rooted at `target`.
    /// Lets many targets share one BFS from a source. `target` must be reached.
    pub fn usp_route_from_root(
        &mut self,
        g: &Graph,
        target: usize,
        tie_seed: u64,
        dag: &mut SubDag,
        out: &mut Walk,
    ) {
        self.route_from_root(g, target, dag, out, |_, v| {
            unit(seed::derive2(tie_seed, "usp", target as u64, v as u64))
        });
    }

    /// Path from the root to `to`, identical to
    /// [`BfsWorkspace::random_walk_to_root`] started at the root of a BFS
    /// rooted at `to`.
    pub fn random_route_from_root(
        &mut self,
        g: &Graph,
        to: usize,
        pair_seed: u64,
        dag: &mut SubDag,
        out: &mut Walk,
    ) {
        self.route_from_root(g, to, dag, out, |step, _| unit(seed::derive(pair_seed, "step", step)));
    }

    /// Walk from the root to `target`, choosing at each step among the
    /// neighbours one hop closer to `target` as `weighted_pred` would in a BFS
    /// rooted at `target`: same candidate order, weights σ toward `target`.
    fn route_from_root(
        &mut self,
        g: &Graph,
        target: usize,
        dag: &mut SubDag,
        out: &mut Walk,
        mut variate: impl FnMut(u64, usize) -> f64,
    ) {
        self.shortest_path_subdag(target, dag);
        for &v in &dag.vertices {
            self.count[v] = 0.0;
        }
        self.count[target] = 1.0;
        // Edges come out farthest first, so counts are final when used.
        for &(near, far, _) in &dag.edges {
            self.count[near] += self.count[far];
        }
        out.clear();
        out.vertices.push(self.root);
        let mut v = self.root;
        let mut step = 0u64;
        while v != target {
            let threshold = variate(step, v) * self.count[v];
            step += 1;
            let want = self.dist[v] + 1;
            let mut acc = 0.0;
            let mut chosen = None;
            for (u, e) in g.incident(v) {
                if self.stamp[u] != self.epoch || self.dist[u] != want {
                    continue;
                }
                acc += self.count[u];
                chosen = Some((u, e));
                if threshold < acc {
                    break;
                }
            }
            let (u, e) = chosen.expect("vertex on a shortest path has a successor");
            out.vertices.push(u);
            out.edges.push(e);
            v = u;
        }
    }
}

#[derive(Debug, Default, Clone)]
pub(crate) struct Walk {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Walk {
    pub fn clear(&mut self) {
        self.vertices.clear();
        self.edges.clear();
    }
}

#[derive(Debug, Default, Clone)]
pub(crate) struct SubDag {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize, usize)>,
}

impl SubDag {
    fn clear(&mut self) {
        self.vertices.clear();
        self.edges.clear();
    }
}

/// Shortest-path DAG rooted at `root`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPathDag {
    pub root: usize,
    /// Hop distance, [`UNREACHABLE`] when not reachable.
    pub dist: Vec<usize>,
    /// Number of shortest paths from the root.
    pub sigma: Vec<f64>,
    pub preds: Vec<Vec<usize>>,
}

pub fn bfs_dag(g: &Graph, root: usize) -> Result<ShortestPathDag> {
    g.check_vertex(root)?;
    let mut ws = BfsWorkspace::new(g.n());
    ws.run(g, root);
    Ok(ShortestPathDag {
        root,
        dist: ws.dist.iter().map(|&d| if d == u32::MAX { UNREACHABLE } else { d as usize }).collect(),
        sigma: ws.sigma.clone(),
        preds: (0..g.n()).map(|v| ws.preds(v).iter().map(|&(u, _)| u).collect()).collect(),
    })
}

/// Fixed routing toward one target: every vertex forwards to a single
/// next hop, so all sources share the same route from any vertex onward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UspTree {
    pub target: usize,
    pub next_hop: Vec<Option<usize>>,
}

impl UspTree {
    /// Route from `from` to the target, or `None` if unreachable.
    pub fn route(&self, from: usize) -> Option<ProbePath> {
        let mut vertices = vec![from];
        let mut v = from;
        while v != self.target {
            v = self.next_hop[v]?;
            vertices.push(v);
        }
        Some(ProbePath { vertices })
    }
}

/// Next hops are drawn among shortest-path predecessors with weights
/// proportional to their path counts, so the route from any fixed vertex
/// is a uniform pick among its shortest paths to the target.
pub fn build_usp_tree(g: &Graph, target: usize, tie_seed: u64) -> Result<UspTree> {
    g.check_vertex(target)?;
    let mut ws = BfsWorkspace::new(g.n());
    ws.run(g, target);
    let next_hop =
        (0..g.n()).map(|v| (v != target && ws.reached(v)).then(|| ws.usp_next_hop(tie_seed, v).0)).collect();
    Ok(UspTree { target, next_hop })
}

/// A probe route, listed from source to target.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProbePath {
    pub vertices: Vec<usize>,
}

impl ProbePath {
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Per-experiment state for [`select_paths`]: USP trees are cached per
/// target and RSP draws come from a pair-indexed stream.
#[derive(Debug, Clone)]
pub struct PathState {
    tie_seed: u64,
    rsp_seed: u64,
    draws: HashMap<(usize, usize), u64>,
    trees: HashMap<usize, UspTree>,
}

impl PathState {
    pub fn new(seed: u64) -> Self {
        Self {
            tie_seed: seed::derive(seed, "usp-ties", 0),
            rsp_seed: seed::derive(seed, "rsp", 0),
            draws: HashMap::new(),
            trees: HashMap::new(),
        }
    }

    pub fn tie_seed(&self) -> u64 {
        self.tie_seed
    }
}

/// Cap on materialized paths for ASP enumeration.
pub const MAX_ENUMERATED_PATHS: usize = 1 << 16;

pub fn select_paths(
    g: &Graph,
    source: usize,
    target: usize,
    psc: PathSelection,
    state: &mut PathState,
) -> Result<Vec<ProbePath>> {
    g.check_vertex(source)?;
    g.check_vertex(target)?;
    if source == target {
        return Err(Error::InvalidParameter("source and target must differ".into()));
    }
    let disconnected = Error::DisconnectedPair { from: source, to: target };
    match psc {
        PathSelection::Usp => {
            if !state.trees.contains_key(&target) {
                let tree = build_usp_tree(g, target, state.tie_seed)?;
                state.trees.insert(target, tree);
            }
            let path = state.trees[&target].route(source).ok_or(disconnected)?;
            Ok(vec![path])
        }
        PathSelection::Rsp => {
            let mut ws = BfsWorkspace::new(g.n());
            ws.run(g, target);
            if !ws.reached(source) {
                return Err(disconnected);
            }
            let k = state.draws.entry((source, target)).or_default();
            let pair_seed = seed::derive2(state.rsp_seed, "pair", source as u64, target as u64);
            let mut walk = Walk::default();
            ws.random_walk_to_root(source, seed::derive(pair_seed, "draw", *k), &mut walk);
            *k += 1;
            Ok(vec![ProbePath { vertices: walk.vertices }])
        }
        PathSelection::Asp => enumerate_shortest_paths(g, source, target, MAX_ENUMERATED_PATHS),
    }
}

/// Every shortest path from `source` to `target`, in lexicographic order.
pub fn enumerate_shortest_paths(
    g: &Graph,
    source: usize,
    target: usize,
    limit: usize,
) -> Result<Vec<ProbePath>> {
    let dag = bfs_dag(g, target)?;
    g.check_vertex(source)?;
    if dag.dist[source] == UNREACHABLE {
        return Err(Error::DisconnectedPair { from: source, to: target });
    }
    if dag.sigma[source] > limit as f64 {
        return Err(Error::TooManyPaths { from: source, to: target, limit });
    }
    // Walk forward from the source along predecessors toward the target.
    let mut out = Vec::new();
    let mut stack = vec![source];
    fn extend(dag: &ShortestPathDag, stack: &mut Vec<usize>, out: &mut Vec<ProbePath>) {
        let v = *stack.last().unwrap();
        if v == dag.root {
            out.push(ProbePath { vertices: stack.clone() });
            return;
        }
        for &u in &dag.preds[v] {
            stack.push(u);
            extend(dag, stack, out);
            stack.pop();
        }
    }
    extend(&dag, &mut stack, &mut out);
    Ok(out)
}
