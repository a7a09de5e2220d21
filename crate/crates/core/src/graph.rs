//! Immutable simple undirected graphs.
//!
//! Vertices are dense labels `0..n`. Adjacency is stored in compressed form
//! with every neighbor list sorted ascending, and each adjacency slot carries
//! the id of its edge so per-edge counters can be plain vectors. Edge ids
//! index the lexicographically sorted list of `(u, v)` pairs with `u < v`.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};

pub type DegreeHistogram = BTreeMap<usize, usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    slot_edge: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a canonical graph. Pairs may come in any order and
    /// orientation, but self-loops and repeated pairs are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut canon = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_canonical(n, canon))
    }

    /// `edges` must be sorted, deduplicated and oriented `u < v`.
    pub(crate) fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0; 2 * edges.len()];
        let mut slot_edge = vec![0; 2 * edges.len()];
        // With edges sorted by (u, v), every row fills in ascending order:
        // lower neighbors w arrive via (w, x) before any (x, v).
        for (id, &(u, v)) in edges.iter().enumerate() {
            neighbors[fill[u]] = v;
            slot_edge[fill[u]] = id;
            fill[u] += 1;
            neighbors[fill[v]] = u;
            slot_edge[fill[v]] = id;
            fill[v] += 1;
        }
        debug_assert!(
            (0..n).all(|v| { neighbors[offsets[v]..offsets[v + 1]].windows(2).all(|w| w[0] < w[1]) })
        );
        Self { offsets, neighbors, slot_edge, edges }
    }

    pub fn empty() -> Self {
        Self::from_canonical(0, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|v| self.degree(v)).collect()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.m() as f64 / self.n() as f64
        }
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// `(neighbor, edge id)` pairs for `v`, in neighbor order.
    pub fn incident(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.neighbors[range.clone()].iter().copied().zip(self.slot_edge[range].iter().copied())
    }

    /// Edge endpoints `(u, v)` with `u < v`.
    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        if a >= self.n() || b >= self.n() {
            return None;
        }
        let pos = self.neighbors(a).binary_search(&b).ok()?;
        Some(self.slot_edge[self.offsets[a] + pos])
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_id(a, b).is_some()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    /// Component label per vertex; components are numbered in order of
    /// their smallest vertex.
    pub fn components(&self) -> (Vec<usize>, usize) {
        const UNSEEN: usize = usize::MAX;
        let n = self.n();
        let mut label = vec![UNSEEN; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if label[start] != UNSEEN {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v) {
                    if label[w] == UNSEEN {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// Induced subgraph on `keep` (sorted ascending, no duplicates). New
    /// label `i` corresponds to original vertex `keep[i]`.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Graph {
        let mut new_label = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            new_label[v] = i;
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter_map(|&(u, v)| {
                let (a, b) = (new_label[u], new_label[v]);
                (a != usize::MAX && b != usize::MAX).then_some((a, b))
            })
            .collect();
        // Relabeling is monotone, so the list stays sorted.
        Graph::from_canonical(keep.len(), edges)
    }

    /// Largest connected component with its relabeling map (new label to
    /// original label). Ties go to the component holding the smallest label.
    pub fn largest_connected_component(&self) -> (Graph, Vec<usize>) {
        let (label, count) = self.components();
        if count <= 1 {
            return (self.clone(), (0..self.n()).collect());
        }
        let mut sizes = vec![0usize; count];
        for &c in &label {
            sizes[c] += 1;
        }
        // Components are numbered by smallest member, so the first maximum
        // is the tie-break winner.
        let best = (0..count).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a))).unwrap();
        let keep: Vec<usize> = (0..self.n()).filter(|&v| label[v] == best).collect();
        (self.induced_subgraph(&keep), keep)
    }

    pub fn degree_histogram(&self) -> DegreeHistogram {
        let mut h = DegreeHistogram::new();
        for v in 0..self.n() {
            *h.entry(self.degree(v)).or_default() += 1;
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn path_graph_degrees() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.degrees(), vec![1, 2, 1]);
        assert_eq!(g.m(), 2);
    }

    #[test]
    fn star_graph() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(g.degree(0), 3);
        let h = g.degree_histogram();
        assert_eq!(h, DegreeHistogram::from([(1, 3), (3, 1)]));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(Graph::from_edges(2, &[(0, 0)]), Err(Error::SelfLoop(0))));
        assert!(matches!(Graph::from_edges(2, &[(0, 2)]), Err(Error::VertexOutOfRange { vertex: 2, n: 2 })));
        assert!(matches!(Graph::from_edges(3, &[(0, 1), (1, 0)]), Err(Error::DuplicateEdge(0, 1))));
    }

    #[test]
    fn adjacency_sorted_and_symmetric() {
        let g = Graph::from_edges(5, &[(4, 0), (2, 0), (3, 1), (0, 1), (2, 4)]).unwrap();
        for v in 0..g.n() {
            assert!(g.neighbors(v).windows(2).all(|w| w[0] < w[1]));
            for (w, e) in g.incident(v) {
                assert!(g.neighbors(w).contains(&v));
                let (a, b) = g.edge(e);
                assert_eq!((a, b), (v.min(w), v.max(w)));
            }
        }
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (0, 4), (1, 3), (2, 4)]);
        assert_eq!(g.edge_id(4, 2), Some(4));
        assert_eq!(g.edge_id(3, 2), None);
    }

    #[test]
    fn lcc_picks_dominant_component() {
        let mut edges: Vec<_> = (1..5).map(|i| (i - 1, i)).collect();
        edges.push((6, 7));
        let g = Graph::from_edges(8, &edges).unwrap();
        let (lcc, map) = g.largest_connected_component();
        assert_eq!(lcc.n(), 5);
        assert_eq!(map, vec![0, 1, 2, 3, 4]);
        assert!(lcc.is_connected());
    }

    #[test]
    fn lcc_tie_goes_to_smallest_label() {
        let g = Graph::from_edges(6, &[(3, 4), (4, 5), (3, 5), (1, 0), (1, 2), (0, 2)]).unwrap();
        let (lcc, map) = g.largest_connected_component();
        assert_eq!(map, vec![0, 1, 2]);
        assert_eq!(lcc.m(), 3);

        let g = Graph::from_edges(6, &[(0, 4), (4, 5), (0, 5), (1, 2), (2, 3), (1, 3)]).unwrap();
        let (_, map) = g.largest_connected_component();
        assert_eq!(map, vec![0, 4, 5]);
    }

    #[test]
    fn lcc_identity_and_idempotent() {
        let g = path(6);
        let (lcc, map) = g.largest_connected_component();
        assert_eq!(lcc, g);
        assert_eq!(map, (0..6).collect::<Vec<_>>());
        let (again, _) = lcc.largest_connected_component();
        assert_eq!(again, lcc);
    }

    #[test]
    fn empty_graph_lcc() {
        let g = Graph::empty();
        let (lcc, map) = g.largest_connected_component();
        assert_eq!(lcc.n(), 0);
        assert!(map.is_empty());
    }

    #[test]
    fn handshake_identity() {
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (2, 5)]).unwrap();
        let total: usize = g.degree_histogram().iter().map(|(k, c)| k * c).sum();
        assert_eq!(total, 2 * g.m());
    }
}
