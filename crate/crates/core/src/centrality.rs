//! Exact vertex and edge betweenness over ordered vertex pairs.
//!
//! For an ordered pair `(l, m)` each of the `sigma(l, m)` shortest paths
//! contributes `1 / sigma(l, m)` to every interior vertex and every edge it
//! uses. Summing over ordered pairs puts edge betweenness in `[2, N(N-1)]`
//! and gives leaves a vertex betweenness of zero.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::paths::BfsWorkspace;

/// Fixed number of source blocks for the parallel accumulation, so the
/// summation order never depends on the thread pool.
const SOURCE_BLOCKS: usize = 32;

pub const BRUTE_FORCE_LIMIT: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct BetweennessTable {
    pub n: usize,
    /// Indexed by vertex.
    pub vertex: Vec<f64>,
    /// Indexed by edge id.
    pub edge: Vec<f64>,
}

impl BetweennessTable {
    pub fn vertex_rescaled(&self, v: usize) -> f64 {
        self.vertex[v] / self.n as f64
    }

    pub fn edge_rescaled(&self, e: usize) -> f64 {
        self.edge[e] / self.n as f64
    }

    pub fn rescaled_vertices(&self) -> Vec<f64> {
        self.vertex.iter().map(|b| b / self.n as f64).collect()
    }

    pub fn rescaled_edges(&self) -> Vec<f64> {
        self.edge.iter().map(|b| b / self.n as f64).collect()
    }
}

fn require_connected(g: &Graph) -> Result<()> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

/// Brandes accumulation from every source.
pub fn brandes_betweenness(g: &Graph) -> Result<BetweennessTable> {
    require_connected(g)?;
    let n = g.n();
    let block = n.div_ceil(SOURCE_BLOCKS).max(1);
    let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .step_by(block)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|start| {
            let mut vertex = vec![0.0; n];
            let mut edge = vec![0.0; g.m()];
            let mut ws = BfsWorkspace::new(n);
            let mut delta = vec![0.0; n];
            for s in start..(start + block).min(n) {
                ws.run(g, s);
                for &w in &ws.order {
                    delta[w] = 0.0;
                }
                for &w in ws.order.iter().rev() {
                    let coeff = (1.0 + delta[w]) / ws.sigma[w];
                    for &(v, e) in ws.preds(w) {
                        let c = ws.sigma[v] * coeff;
                        edge[e] += c;
                        delta[v] += c;
                    }
                    if w != s {
                        vertex[w] += delta[w];
                    }
                }
            }
            (vertex, edge)
        })
        .collect();

    let mut vertex = vec![0.0; n];
    let mut edge = vec![0.0; g.m()];
    for (pv, pe) in partials {
        vertex.iter_mut().zip(pv).for_each(|(a, b)| *a += b);
        edge.iter_mut().zip(pe).for_each(|(a, b)| *a += b);
    }
    Ok(BetweennessTable { n, vertex, edge })
}

/// Reference implementation from all-pairs distances and path counts.
/// Only for small graphs; used to cross-check [`brandes_betweenness`].
pub fn brute_force_betweenness(g: &Graph) -> Result<BetweennessTable> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::GraphTooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    require_connected(g)?;

    // Floyd–Warshall hop distances.
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
        for &j in g.neighbors(i) {
            row[j] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }

    // sigma[l][m]: number of shortest l-m paths, filled by increasing distance.
    let mut sigma = vec![vec![0.0f64; n]; n];
    for l in 0..n {
        let mut by_dist: Vec<usize> = (0..n).collect();
        by_dist.sort_by_key(|&m| d[l][m]);
        sigma[l][l] = 1.0;
        for &m in by_dist.iter().skip(1) {
            sigma[l][m] =
                g.neighbors(m).iter().filter(|&&u| d[l][u] + 1 == d[l][m]).map(|&u| sigma[l][u]).sum();
        }
    }

    let mut vertex = vec![0.0; n];
    for (i, b) in vertex.iter_mut().enumerate() {
        for l in 0..n {
            for m in 0..n {
                if l == m || l == i || m == i {
                    continue;
                }
                if d[l][i] + d[i][m] == d[l][m] {
                    *b += sigma[l][i] * sigma[i][m] / sigma[l][m];
                }
            }
        }
    }

    let mut edge = vec![0.0; g.m()];
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        for l in 0..n {
            for m in 0..n {
                if l == m {
                    continue;
                }
                for (a, b) in [(i, j), (j, i)] {
                    if d[l][a] + 1 + d[b][m] == d[l][m] {
                        edge[e] += sigma[l][a] * sigma[b][m] / sigma[l][m];
                    }
                }
            }
        }
    }
    Ok(BetweennessTable { n, vertex, edge })
}

/// Mean rescaled vertex betweenness per degree class.
pub fn betweenness_by_degree(g: &Graph, table: &BetweennessTable) -> BTreeMap<usize, f64> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for v in 0..g.n() {
        let slot = acc.entry(g.degree(v)).or_default();
        slot.0 += table.vertex_rescaled(v);
        slot.1 += 1;
    }
    acc.into_iter().map(|(k, (sum, count))| (k, sum / count as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-9, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn path_graph() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let t = brandes_betweenness(&g).unwrap();
        assert_close(&t.vertex, &[0.0, 2.0, 0.0]);
        assert_close(&t.edge, &[4.0, 4.0]);
    }

    #[test]
    fn star_graph() {
        let t = brandes_betweenness(&star4()).unwrap();
        assert_close(&t.vertex, &[6.0, 0.0, 0.0, 0.0]);
        assert_close(&t.edge, &[6.0, 6.0, 6.0]);
    }

    #[test]
    fn square_and_complete_graphs() {
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let t = brute_force_betweenness(&c4).unwrap();
        assert_close(&t.vertex, &[1.0; 4]);
        assert_close(&brandes_betweenness(&c4).unwrap().vertex, &[1.0; 4]);

        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let t = brute_force_betweenness(&k4).unwrap();
        assert_close(&t.vertex, &[0.0; 4]);
        assert_close(&t.edge, &[2.0; 6]);
    }

    #[test]
    fn leaves_have_zero_betweenness() {
        let g = Graph::from_edges(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]).unwrap();
        let t = brandes_betweenness(&g).unwrap();
        for leaf in 3..7 {
            assert_eq!(t.vertex[leaf], 0.0);
        }
    }

    #[test]
    fn rejects_disconnected_and_large() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(brandes_betweenness(&g), Err(Error::Disconnected)));
        assert!(matches!(brute_force_betweenness(&g), Err(Error::Disconnected)));
        let edges: Vec<_> = (1..201).map(|i| (i - 1, i)).collect();
        let big = Graph::from_edges(201, &edges).unwrap();
        assert!(matches!(brute_force_betweenness(&big), Err(Error::GraphTooLarge { n: 201, .. })));
    }

    #[test]
    fn by_degree_on_star() {
        let g = star4();
        let t = brandes_betweenness(&g).unwrap();
        let by = betweenness_by_degree(&g, &t);
        assert_eq!(by.len(), 2);
        assert!((by[&1] - 0.0).abs() < 1e-12);
        assert!((by[&3] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn ring_has_single_degree_class() {
        let edges: Vec<_> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
        let g = Graph::from_edges(8, &edges).unwrap();
        let t = brandes_betweenness(&g).unwrap();
        let by = betweenness_by_degree(&g, &t);
        assert_eq!(by.keys().copied().collect::<Vec<_>>(), vec![2]);
    }
}
