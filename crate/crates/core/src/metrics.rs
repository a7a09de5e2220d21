//! Observables computed from an underlying graph and what was sampled from
//! it: per-degree spectra, local dissymmetry of traversals, sampled degree
//! distributions and summary fractions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explorer::{DiscoveryAverages, ProbeBudget, SampledGraph};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBin {
    pub value: f64,
    pub population: usize,
}

/// Mean of some per-vertex quantity for each degree value. Bins without
/// any contributing vertex are absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DegreeSpectrum {
    pub bins: BTreeMap<usize, SpectrumBin>,
}

impl DegreeSpectrum {
    /// Averages `values[v]` grouped by `keys[v]`, skipping vertices where
    /// `include` is false.
    pub fn from_values(keys: &[usize], values: &[f64], include: impl Fn(usize) -> bool) -> Self {
        let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
        for v in 0..keys.len() {
            if include(v) {
                let slot = acc.entry(keys[v]).or_default();
                slot.0 += values[v];
                slot.1 += 1;
            }
        }
        let bins = acc
            .into_iter()
            .map(|(k, (sum, population))| (k, SpectrumBin { value: sum / population as f64, population }))
            .collect();
        Self { bins }
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.bins.get(&k).map(|b| b.value)
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, SpectrumBin)> + '_ {
        self.bins.iter().map(|(&k, &b)| (k, b))
    }

    pub fn population(&self) -> usize {
        self.bins.values().map(|b| b.population).sum()
    }
}

fn require_sampled(s: &SampledGraph) -> Result<()> {
    if s.is_empty() {
        Err(Error::NothingSampled)
    } else {
        Ok(())
    }
}

fn check_pair(g: &Graph, s: &SampledGraph) -> Result<()> {
    if s.vertex_found.len() != g.n() || s.edge_redundancy.len() != g.m() {
        return Err(Error::InvalidParameter("sampled graph does not belong to this graph".into()));
    }
    Ok(())
}

/// `N*_k / N_k` for every true degree `k`.
pub fn discovery_fraction_by_degree(g: &Graph, s: &SampledGraph) -> Result<DegreeSpectrum> {
    check_pair(g, s)?;
    require_sampled(s)?;
    let found: Vec<f64> = s.vertex_found.iter().map(|&f| f as u8 as f64).collect();
    Ok(DegreeSpectrum::from_values(&g.degrees(), &found, |_| true))
}

/// Mean of `k*_i / k_i` over discovered vertices of each true degree.
pub fn discovered_degree_ratio(g: &Graph, s: &SampledGraph) -> Result<DegreeSpectrum> {
    check_pair(g, s)?;
    require_sampled(s)?;
    let k = g.degrees();
    let ratio: Vec<f64> = s
        .discovered_degrees(g)
        .iter()
        .zip(&k)
        .map(|(&ks, &k)| if k == 0 { 0.0 } else { ks as f64 / k as f64 })
        .collect();
    Ok(DegreeSpectrum::from_values(&k, &ratio, |v| s.vertex_found[v] && k[v] > 0))
}

/// `<pi_i>` averaged per true degree, from Monte Carlo sums.
pub fn mean_discovery_by_degree(g: &Graph, avg: &DiscoveryAverages) -> DegreeSpectrum {
    DegreeSpectrum::from_values(&g.degrees(), &avg.vertex_discovery(), |_| true)
}

/// `<k*_i> / k_i` averaged per true degree, from Monte Carlo sums.
pub fn mean_degree_ratio_by_degree(g: &Graph, avg: &DiscoveryAverages) -> DegreeSpectrum {
    let k = g.degrees();
    let ratio: Vec<f64> = avg
        .mean_discovered_degree()
        .iter()
        .zip(&k)
        .map(|(&ks, &k)| if k == 0 { 0.0 } else { ks / k as f64 })
        .collect();
    DegreeSpectrum::from_values(&k, &ratio, |v| k[v] > 0)
}

/// `<r_n>` averaged per true degree, from Monte Carlo sums.
pub fn mean_redundancy_by_degree(g: &Graph, avg: &DiscoveryAverages) -> DegreeSpectrum {
    DegreeSpectrum::from_values(&g.degrees(), &avg.mean_vertex_redundancy(), |_| true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissymmetryReport {
    /// Participation ratio per vertex, `None` where no incident edge was
    /// traversed.
    pub y2: Vec<Option<f64>>,
    /// Transit entropy per vertex, `None` where undefined.
    pub entropy: Vec<Option<f64>>,
    pub y2_by_degree: DegreeSpectrum,
    pub y2_by_discovered_degree: DegreeSpectrum,
    pub entropy_by_degree: DegreeSpectrum,
    /// Vertices without incident redundancy.
    pub y2_excluded: usize,
    /// Vertices without interior transits or with `k* < 2`.
    pub entropy_excluded: usize,
}

/// `Y2(i) = sum_j f_j^2` with `f_j = r_e(i, j) / sum_j r_e(i, j)` over
/// the incident edges of `i`.
pub fn participation_ratio(g: &Graph, s: &SampledGraph) -> Result<Vec<Option<f64>>> {
    check_pair(g, s)?;
    Ok((0..g.n())
        .map(|v| {
            let total: u64 = g.incident(v).map(|(_, e)| s.edge_redundancy[e]).sum();
            if total == 0 {
                return None;
            }
            let t = total as f64;
            Some(
                g.incident(v)
                    .map(|(_, e)| {
                        let f = s.edge_redundancy[e] as f64 / t;
                        f * f
                    })
                    .sum(),
            )
        })
        .collect())
}

/// Normalized entropy of the ordered transit pairs at each vertex,
/// `-sum f log f / log(k* (k* - 1))`. A vertex crossed through a single
/// pair gets 0.
pub fn transit_entropy(g: &Graph, s: &SampledGraph) -> Result<Vec<Option<f64>>> {
    check_pair(g, s)?;
    let kstar = s.discovered_degrees(g);
    Ok((0..g.n())
        .map(|v| {
            let pairs = s.transits_at(v);
            let total: u64 = pairs.iter().map(|t| t.count).sum();
            if total == 0 || kstar[v] < 2 {
                return None;
            }
            if pairs.len() == 1 {
                return Some(0.0);
            }
            let t = total as f64;
            let h: f64 = pairs
                .iter()
                .map(|p| {
                    let f = p.count as f64 / t;
                    -f * f.ln()
                })
                .sum();
            let norm = ((kstar[v] * (kstar[v] - 1)) as f64).ln();
            Some((h / norm).clamp(0.0, 1.0))
        })
        .collect())
}

pub fn dissymmetry(g: &Graph, s: &SampledGraph) -> Result<DissymmetryReport> {
    require_sampled(s)?;
    let y2 = participation_ratio(g, s)?;
    let entropy = transit_entropy(g, s)?;
    let k = g.degrees();
    let kstar = s.discovered_degrees(g);
    let flat = |x: &[Option<f64>]| x.iter().map(|v| v.unwrap_or(0.0)).collect::<Vec<_>>();
    let y2_flat = flat(&y2);
    let h_flat = flat(&entropy);
    Ok(DissymmetryReport {
        y2_by_degree: DegreeSpectrum::from_values(&k, &y2_flat, |v| y2[v].is_some()),
        y2_by_discovered_degree: DegreeSpectrum::from_values(&kstar, &y2_flat, |v| y2[v].is_some()),
        entropy_by_degree: DegreeSpectrum::from_values(&k, &h_flat, |v| entropy[v].is_some()),
        y2_excluded: y2.iter().filter(|x| x.is_none()).count(),
        entropy_excluded: entropy.iter().filter(|x| x.is_none()).count(),
        y2,
        entropy,
    })
}

/// Empirical distribution of integer degrees.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalDegreeDistribution {
    pub counts: BTreeMap<usize, usize>,
    pub total: usize,
}

impl EmpiricalDegreeDistribution {
    pub fn from_degrees(degrees: impl IntoIterator<Item = usize>) -> Self {
        let mut d = Self::default();
        for k in degrees {
            *d.counts.entry(k).or_default() += 1;
            d.total += 1;
        }
        d
    }

    pub fn pmf(&self, k: usize) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts.get(&k).copied().unwrap_or(0) as f64 / self.total as f64
    }

    /// `(k, P(X > k))` for every observed degree `k`.
    pub fn ccdf(&self) -> Vec<(usize, f64)> {
        let mut above = self.total;
        let t = self.total as f64;
        self.counts
            .iter()
            .map(|(&k, &c)| {
                above -= c;
                (k, above as f64 / t)
            })
            .collect()
    }

    pub fn max(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    pub fn min(&self) -> Option<usize> {
        self.counts.keys().next().copied()
    }

    /// Merges another sample into this one.
    pub fn absorb(&mut self, other: &Self) {
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_default() += c;
        }
        self.total += other.total;
    }
}

/// Distribution of discovered degrees `k*` over discovered vertices.
pub fn sampled_degree_distribution(g: &Graph, s: &SampledGraph) -> Result<EmpiricalDegreeDistribution> {
    check_pair(g, s)?;
    require_sampled(s)?;
    let kstar = s.discovered_degrees(g);
    Ok(EmpiricalDegreeDistribution::from_degrees((0..g.n()).filter(|&v| s.vertex_found[v]).map(|v| kstar[v])))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub vertex_fraction: f64,
    pub edge_fraction: f64,
    pub degree_ratio: f64,
    pub epsilon: f64,
    pub rho_t: f64,
    pub n_sources: usize,
}

fn check_budget(budget: &ProbeBudget) -> Result<()> {
    if budget.epsilon() <= 0.0 {
        return Err(Error::InvalidParameter("empty experiment: no source-target pairs".into()));
    }
    Ok(())
}

fn ratios(g: &Graph, vertices: usize, edges: usize) -> (f64, f64, f64) {
    let kbar_star = if vertices == 0 { 0.0 } else { 2.0 * edges as f64 / vertices as f64 };
    (vertices as f64 / g.n() as f64, edges as f64 / g.m() as f64, kbar_star / g.mean_degree())
}

/// `N*/N`, `E*/E` and `k̄*/k̄` for one sampled graph.
pub fn summary(g: &Graph, s: &SampledGraph, budget: &ProbeBudget) -> Result<Summary> {
    check_pair(g, s)?;
    check_budget(budget)?;
    require_sampled(s)?;
    let (vf, ef, kr) = ratios(g, s.vertex_count(), s.edge_count());
    Ok(Summary {
        vertex_fraction: vf,
        edge_fraction: ef,
        degree_ratio: kr,
        epsilon: budget.epsilon(),
        rho_t: budget.rho_t(),
        n_sources: budget.n_sources,
    })
}

/// Summary fractions averaged over Monte Carlo realizations.
pub fn mean_summary(g: &Graph, avg: &DiscoveryAverages, budget: &ProbeBudget) -> Result<Summary> {
    check_budget(budget)?;
    if avg.per_realization.is_empty() {
        return Err(Error::NothingSampled);
    }
    let r = avg.per_realization.len() as f64;
    let (mut vf, mut ef, mut kr) = (0.0, 0.0, 0.0);
    for s in &avg.per_realization {
        let (a, b, c) = ratios(g, s.vertices_found, s.edges_found);
        vf += a;
        ef += b;
        kr += c;
    }
    Ok(Summary {
        vertex_fraction: vf / r,
        edge_fraction: ef / r,
        degree_ratio: kr / r,
        epsilon: budget.epsilon(),
        rho_t: budget.rho_t(),
        n_sources: budget.n_sources,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::{run_exploration, Placement, PlacementStrategy};
    use crate::paths::PathSelection;

    fn run(g: &Graph, s: &[usize], t: &[usize], psc: PathSelection) -> SampledGraph {
        let p = Placement::new(g, s.to_vec(), t.to_vec(), PlacementStrategy::Random, false).unwrap();
        run_exploration(g, &p, psc, 0)
    }

    fn star(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn full_coverage_fractions() {
        let g = star(5);
        let s = run(&g, &[1, 2], &[0, 3, 4], PathSelection::Usp);
        let f = discovery_fraction_by_degree(&g, &s).unwrap();
        assert!(f.iter().all(|(_, b)| b.value == 1.0));
        assert_eq!(f.population(), 5);
        let r = discovered_degree_ratio(&g, &s).unwrap();
        assert_eq!(r.get(4), Some(1.0));
        let b = ProbeBudget::new(5, 2, 3);
        let sm = summary(&g, &s, &b).unwrap();
        assert_eq!((sm.vertex_fraction, sm.edge_fraction, sm.degree_ratio), (1.0, 1.0, 1.0));
    }

    #[test]
    fn partial_star_summary() {
        let g = star(4);
        let s = run(&g, &[1], &[2], PathSelection::Usp);
        let sm = summary(&g, &s, &ProbeBudget::new(4, 1, 1)).unwrap();
        assert!((sm.vertex_fraction - 0.75).abs() < 1e-15);
        assert!((sm.edge_fraction - 2.0 / 3.0).abs() < 1e-15);
        let f = discovery_fraction_by_degree(&g, &s).unwrap();
        let total: f64 = f.iter().map(|(_, b)| b.value * b.population as f64).sum();
        assert!((total - s.vertex_count() as f64).abs() < 1e-12);
        assert!(summary(&g, &s, &ProbeBudget::new(4, 0, 1)).is_err());
    }

    #[test]
    fn endpoint_only_vertex_ratio() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2)]).unwrap();
        let s = run(&g, &[1], &[0], PathSelection::Usp);
        let r = discovered_degree_ratio(&g, &s).unwrap();
        assert!(r.get(3).unwrap() >= 1.0 / 3.0);
    }

    #[test]
    fn path_dissymmetry() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let s = run(&g, &[0], &[2], PathSelection::Usp);
        let y2 = participation_ratio(&g, &s).unwrap();
        assert_eq!(y2[1], Some(0.5));
        assert_eq!(y2[0], Some(1.0));
        let h = transit_entropy(&g, &s).unwrap();
        assert_eq!(h[1], Some(0.0));
        assert_eq!(h[0], None);
    }

    #[test]
    fn uniform_transits_reach_entropy_one() {
        // Triangle-free center: star with 3 leaves, every leaf probes every
        // other leaf, so all 6 ordered pairs through the center occur once.
        let g = star(4);
        let p = Placement::new(&g, vec![1, 2, 3], vec![1, 2, 3], PlacementStrategy::Random, true).unwrap();
        let s = run_exploration(&g, &p, PathSelection::Usp, 0);
        let h = transit_entropy(&g, &s).unwrap();
        assert!((h[0].unwrap() - 1.0).abs() < 1e-12);
        let y2 = participation_ratio(&g, &s).unwrap();
        assert!((y2[0].unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_sample_rejected() {
        let g = star(4);
        let s = SampledGraph {
            psc: PathSelection::Usp,
            vertex_found: vec![false; 4],
            vertex_redundancy: vec![0; 4],
            terminal_visits: vec![0; 4],
            edge_redundancy: vec![0; 3],
            transits: vec![],
            probes: 0,
            skipped_pairs: 0,
            edge_steps: 0,
        };
        assert!(matches!(discovery_fraction_by_degree(&g, &s), Err(Error::NothingSampled)));
        assert!(matches!(sampled_degree_distribution(&g, &s), Err(Error::NothingSampled)));
    }

    #[test]
    fn full_sample_distribution_matches_truth() {
        let g = crate::generators::generate_er(80, 4.0, 1).unwrap();
        let (g, _) = g.largest_connected_component();
        let all: Vec<usize> = (0..g.n()).collect();
        let (a, b) = all.split_at(g.n() / 2);
        let s = run(&g, a, b, PathSelection::Asp);
        // ASP from half the graph to the other half need not cover every
        // edge, so compare against the sampled graph's own degrees.
        let d = sampled_degree_distribution(&g, &s).unwrap();
        let sg = s.to_graph(&g);
        let expected = EmpiricalDegreeDistribution::from_degrees(sg.degrees());
        assert_eq!(d, expected);

        let truth = EmpiricalDegreeDistribution::from_degrees(g.degrees());
        let cc = truth.ccdf();
        assert_eq!(cc.last().unwrap().1, 0.0);
        assert!(cc.windows(2).all(|w| w[0].1 >= w[1].1));
    }

    #[test]
    fn ccdf_values() {
        let d = EmpiricalDegreeDistribution::from_degrees([1, 1, 2, 4]);
        assert_eq!(d.ccdf(), vec![(1, 0.5), (2, 0.25), (4, 0.0)]);
        assert_eq!(d.pmf(1), 0.5);
        assert_eq!(d.max(), Some(4));
    }
}
