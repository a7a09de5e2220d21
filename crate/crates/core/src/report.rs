//! File outputs of the command-line experiments and the JSON report that
//! lists them.
//!
//! Every output is a pure function of the configuration and the graph, so a
//! rerun with the same inputs writes byte-identical files. Reports carry no
//! timestamps or host details for that reason.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::centrality::{betweenness_by_degree, brandes_betweenness, BetweennessTable};
use crate::error::{Error, Result};
use crate::experiments::{
    compare_deployment, fixed_budget, run_point, symmetry_sweep, ComparisonResult, SweepResult, SweepRow,
};
use crate::explorer::{monte_carlo_realization, MonteCarloConfig, ProbeBudget};
use crate::graph::Graph;
use crate::io::{read_edge_list_file, write_edge_list_file, ExperimentConfig, ExperimentMode};
use crate::metrics::{
    dissymmetry, mean_degree_ratio_by_degree, mean_discovery_by_degree, mean_redundancy_by_degree,
    sampled_degree_distribution, DegreeSpectrum, Summary,
};
use crate::paths::PathSelection;
use crate::seed;
use crate::theory::{overlay, predict, residual_stats, ResidualStats};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileKind {
    Csv,
    EdgeList,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub kind: FileKind,
    /// Data rows (CSV) or edges (edge list).
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInfo {
    pub source: String,
    pub n: usize,
    pub m: usize,
    pub mean_degree: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub index: usize,
    pub rho_t_requested: f64,
    pub budget: ProbeBudget,
    pub epsilon: f64,
    pub summary: Summary,
    pub single_source_regime: bool,
    pub overlays: BTreeMap<String, ResidualStats>,
    pub y2_excluded: usize,
    pub entropy_excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Canonical configuration text; parses back to the configuration used.
    pub config: String,
    pub graph: GraphInfo,
    pub realizations: usize,
    pub points: Vec<PointReport>,
    pub symmetry_point: Option<f64>,
    pub dropped_grid_points: Vec<f64>,
    pub files: Vec<FileEntry>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    fn new(command: &str, cfg: Option<&ExperimentConfig>, g: &Graph, source: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "tracesim".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: cfg.map(ExperimentConfig::to_text).unwrap_or_default(),
            graph: GraphInfo { source: source.into(), n: g.n(), m: g.m(), mean_degree: g.mean_degree() },
            realizations: cfg.map_or(0, |c| c.realizations),
            points: Vec::new(),
            symmetry_point: None,
            dropped_grid_points: Vec::new(),
            files: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let path = out_dir.join("report.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

struct Out<'a> {
    dir: &'a Path,
    files: Vec<FileEntry>,
}

impl<'a> Out<'a> {
    fn new(dir: &'a Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir, files: Vec::new() })
    }

    fn csv(&mut self, rel: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for r in &rows {
            w.write_record(r)?;
        }
        w.flush()?;
        self.files.push(FileEntry { path: rel.into(), kind: FileKind::Csv, rows: rows.len() });
        Ok(())
    }

    fn edge_list(&mut self, rel: &str, g: &Graph) -> Result<()> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        write_edge_list_file(g, &path)?;
        self.files.push(FileEntry { path: rel.into(), kind: FileKind::EdgeList, rows: g.m() });
        Ok(())
    }
}

fn f(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

fn spectrum_rows(s: &DegreeSpectrum) -> Vec<Vec<String>> {
    s.iter().map(|(k, b)| vec![k.to_string(), f(b.value), b.population.to_string()]).collect()
}

/// Graph named by the configuration: generated from `graph` with a seed
/// derived from the master seed, or read from `graph_file`.
pub fn load_graph(cfg: &ExperimentConfig) -> Result<(Graph, String)> {
    match (&cfg.graph, &cfg.graph_file) {
        (Some(spec), None) => Ok((spec.generate(seed::derive(cfg.seed, "graph", 0))?, spec.to_string())),
        (None, Some(path)) => Ok((read_edge_list_file(path)?, path.display().to_string())),
        _ => Err(Error::InvalidParameter(
            "the configuration must name exactly one of 'graph' or 'graph_file'".into(),
        )),
    }
}

fn connected_betweenness(g: &Graph) -> Result<BetweennessTable> {
    if g.n() < 2 {
        return Err(Error::InvalidParameter("the graph needs at least two vertices".into()));
    }
    brandes_betweenness(g)
}

/// Betweenness tables: per vertex, per edge and per degree class.
pub fn run_betweenness(g: &Graph, source: &str, out_dir: &Path) -> Result<ExperimentReport> {
    let t = connected_betweenness(g)?;
    let mut out = Out::new(out_dir)?;
    out.csv(
        "betweenness_vertices.csv",
        &["vertex", "degree", "betweenness", "rescaled"],
        (0..g.n())
            .map(|v| vec![v.to_string(), g.degree(v).to_string(), f(t.vertex[v]), f(t.vertex_rescaled(v))])
            .collect(),
    )?;
    out.csv(
        "betweenness_edges.csv",
        &["edge", "u", "v", "betweenness", "rescaled"],
        g.edges()
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| {
                vec![e.to_string(), u.to_string(), v.to_string(), f(t.edge[e]), f(t.edge_rescaled(e))]
            })
            .collect(),
    )?;
    let by = betweenness_by_degree(g, &t);
    let hist = g.degree_histogram();
    out.csv(
        "betweenness_by_degree.csv",
        &["k", "value", "population"],
        by.iter().map(|(k, b)| vec![k.to_string(), f(*b), hist[k].to_string()]).collect(),
    )?;
    let mut report = ExperimentReport::new("betweenness", None, g, source);
    report.files = out.files;
    report.write(out_dir)?;
    Ok(report)
}

/// Monte Carlo exploration at every target density of a fixed-budget
/// configuration.
pub fn run_explore(
    g: &Graph,
    source: &str,
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ExperimentReport> {
    let ExperimentMode::Fixed { n_sources, rho_t } = &cfg.mode else {
        return Err(Error::InvalidParameter(
            "explore needs a fixed budget (n_sources and rho_t); use symmetry-sweep for epsilon sweeps"
                .into(),
        ));
    };
    let t = connected_betweenness(g)?;
    let mut out = Out::new(out_dir)?;
    let mut report = ExperimentReport::new("explore", Some(cfg), g, source);
    if cfg.psc == PathSelection::Asp {
        report.notes.push("theory overlays assume one path per pair; under asp they are approximate".into());
    }
    for (i, &r) in rho_t.iter().enumerate() {
        let (budget, note) = fixed_budget(g.n(), *n_sources, r)?;
        if let Some(n) = note {
            report.notes.push(format!("point {i}: {n}"));
        }
        let point_seed = seed::derive(cfg.seed, "point", i as u64);
        let point = run_point(g, Some(&t), &budget, cfg.psc, cfg.strategy, cfg.realizations, point_seed)?;
        if point.single_source_regime {
            report.notes.push(format!(
                "point {i}: single source; the sampled degree distribution is expected to show a spurious k^-1 law"
            ));
        }
        let pred = predict(g, &t, &budget)?;
        let avg = &point.averages;
        let dir = format!("point_{i}");

        let obs_pi = avg.vertex_discovery();
        let obs_rn = avg.mean_vertex_redundancy();
        let obs_k = avg.mean_discovered_degree();
        out.csv(
            &format!("{dir}/vertices.csv"),
            &[
                "vertex",
                "degree",
                "betweenness",
                "discovery",
                "predicted_discovery",
                "redundancy",
                "predicted_redundancy",
                "discovered_degree",
                "predicted_discovered_degree",
                "predicted_discovered_degree_exact",
            ],
            (0..g.n())
                .map(|v| {
                    vec![
                        v.to_string(),
                        g.degree(v).to_string(),
                        f(t.vertex[v]),
                        f(obs_pi[v]),
                        f(pred.vertex_discovery[v]),
                        f(obs_rn[v]),
                        f(pred.vertex_redundancy[v]),
                        f(obs_k[v]),
                        f(pred.discovered_degree[v]),
                        f(pred.discovered_degree_exact[v]),
                    ]
                })
                .collect(),
        )?;
        let obs_pe = avg.edge_discovery();
        let obs_re = avg.mean_edge_redundancy();
        out.csv(
            &format!("{dir}/edges.csv"),
            &[
                "edge",
                "u",
                "v",
                "betweenness",
                "discovery",
                "predicted_discovery",
                "redundancy",
                "predicted_redundancy",
            ],
            g.edges()
                .iter()
                .enumerate()
                .map(|(e, &(u, v))| {
                    vec![
                        e.to_string(),
                        u.to_string(),
                        v.to_string(),
                        f(t.edge[e]),
                        f(obs_pe[e]),
                        f(pred.edge_discovery[e]),
                        f(obs_re[e]),
                        f(pred.edge_redundancy[e]),
                    ]
                })
                .collect(),
        )?;

        let mut overlays = BTreeMap::new();
        for (name, obs, prd) in [
            ("vertex_discovery", &obs_pi, &pred.vertex_discovery),
            ("edge_discovery", &obs_pe, &pred.edge_discovery),
            ("vertex_redundancy", &obs_rn, &pred.vertex_redundancy),
            ("edge_redundancy", &obs_re, &pred.edge_redundancy),
            ("discovered_degree", &obs_k, &pred.discovered_degree_exact),
        ] {
            let rows = overlay(obs, prd)?;
            overlays.insert(name.to_string(), residual_stats(&rows));
            out.csv(
                &format!("{dir}/overlay_{name}.csv"),
                &["id", "observed", "predicted", "abs_residual", "rel_residual"],
                rows.iter()
                    .map(|r| {
                        vec![
                            r.id.to_string(),
                            f(r.observed),
                            f(r.predicted),
                            f(r.abs_residual),
                            if r.rel_residual.is_finite() { f(r.rel_residual) } else { String::new() },
                        ]
                    })
                    .collect(),
            )?;
        }

        out.csv(
            &format!("{dir}/spectrum_discovery.csv"),
            &["k", "value", "population"],
            spectrum_rows(&mean_discovery_by_degree(g, avg)),
        )?;
        out.csv(
            &format!("{dir}/spectrum_degree_ratio.csv"),
            &["k", "value", "population"],
            spectrum_rows(&mean_degree_ratio_by_degree(g, avg)),
        )?;
        let deg = g.degrees();
        let predicted_rn = DegreeSpectrum::from_values(&deg, &pred.vertex_redundancy, |_| true);
        out.csv(
            &format!("{dir}/spectrum_redundancy.csv"),
            &["k", "observed", "predicted", "population"],
            mean_redundancy_by_degree(g, avg)
                .iter()
                .map(|(k, b)| {
                    vec![k.to_string(), f(b.value), opt(predicted_rn.get(k)), b.population.to_string()]
                })
                .collect(),
        )?;

        // Single-realization observables from a replay of realization 0.
        let mc = MonteCarloConfig::new(budget.n_sources, budget.n_targets, cfg.psc)
            .strategy(cfg.strategy)
            .seed(point_seed);
        let (placement, sample) = monte_carlo_realization(g, &mc, Some(&t), 0)?;
        out.csv(
            &format!("{dir}/placement.csv"),
            &["vertex", "role"],
            placement
                .sources
                .iter()
                .map(|v| vec![v.to_string(), "source".into()])
                .chain(placement.targets.iter().map(|v| vec![v.to_string(), "target".into()]))
                .collect(),
        )?;
        out.edge_list(&format!("{dir}/sample_graph.txt"), &sample.to_graph(g))?;
        let dis = dissymmetry(g, &sample)?;
        let kstar = sample.discovered_degrees(g);
        out.csv(
            &format!("{dir}/sample_vertices.csv"),
            &["vertex", "found", "redundancy", "discovered_degree", "y2", "entropy"],
            (0..g.n())
                .map(|v| {
                    vec![
                        v.to_string(),
                        (sample.vertex_found[v] as u8).to_string(),
                        sample.vertex_redundancy[v].to_string(),
                        kstar[v].to_string(),
                        opt(dis.y2[v]),
                        opt(dis.entropy[v]),
                    ]
                })
                .collect(),
        )?;
        out.csv(
            &format!("{dir}/sample_edges.csv"),
            &["edge", "u", "v", "redundancy"],
            g.edges()
                .iter()
                .enumerate()
                .map(|(e, &(u, v))| {
                    vec![e.to_string(), u.to_string(), v.to_string(), sample.edge_redundancy[e].to_string()]
                })
                .collect(),
        )?;
        out.csv(
            &format!("{dir}/sample_transits.csv"),
            &["vertex", "from", "to", "count"],
            sample
                .transits
                .iter()
                .map(|x| {
                    vec![x.vertex.to_string(), x.from.to_string(), x.to.to_string(), x.count.to_string()]
                })
                .collect(),
        )?;
        let dist = sampled_degree_distribution(g, &sample)?;
        out.csv(
            &format!("{dir}/sample_degree_distribution.csv"),
            &["k", "count", "pmf", "ccdf"],
            dist.ccdf()
                .into_iter()
                .map(|(k, c)| vec![k.to_string(), dist.counts[&k].to_string(), f(dist.pmf(k)), f(c)])
                .collect(),
        )?;
        let mut dis_rows: BTreeMap<usize, [String; 4]> = BTreeMap::new();
        for (k, b) in dis.y2_by_degree.iter() {
            dis_rows.entry(k).or_default()[0] = f(b.value);
            dis_rows.entry(k).or_default()[1] = b.population.to_string();
        }
        for (k, b) in dis.entropy_by_degree.iter() {
            dis_rows.entry(k).or_default()[2] = f(b.value);
            dis_rows.entry(k).or_default()[3] = b.population.to_string();
        }
        out.csv(
            &format!("{dir}/spectrum_dissymmetry.csv"),
            &["k", "y2", "y2_population", "entropy", "entropy_population"],
            dis_rows.into_iter().map(|(k, [a, b, c, d])| vec![k.to_string(), a, b, c, d]).collect(),
        )?;
        out.csv(
            &format!("{dir}/spectrum_y2_by_discovered_degree.csv"),
            &["k", "value", "population"],
            spectrum_rows(&dis.y2_by_discovered_degree),
        )?;

        report.points.push(PointReport {
            index: i,
            rho_t_requested: r,
            budget,
            epsilon: budget.epsilon(),
            summary: point.summary,
            single_source_regime: point.single_source_regime,
            overlays,
            y2_excluded: dis.y2_excluded,
            entropy_excluded: dis.entropy_excluded,
        });
    }
    report.files = out.files;
    report.write(out_dir)?;
    Ok(report)
}

const SWEEP_HEADER: &[&str] = &[
    "rho_t_requested",
    "rho_t",
    "mirror_rho_t",
    "n_sources",
    "n_targets",
    "epsilon",
    "vertex_fraction",
    "edge_fraction",
    "degree_ratio",
];

fn sweep_cells(r: &SweepRow) -> Vec<String> {
    vec![
        f(r.rho_t_requested),
        f(r.rho_t),
        f(r.mirror_rho_t),
        r.n_sources.to_string(),
        r.n_targets.to_string(),
        f(r.epsilon),
        f(r.vertex_fraction),
        f(r.edge_fraction),
        f(r.degree_ratio),
    ]
}

fn sweep_params(cfg: &ExperimentConfig) -> Result<(f64, Vec<f64>)> {
    match &cfg.mode {
        ExperimentMode::Sweep { epsilon, grid } => Ok((*epsilon, grid.values())),
        ExperimentMode::Fixed { .. } => Err(Error::InvalidParameter(
            "this command needs a sweep (epsilon and a rho_t grid), not a fixed budget".into(),
        )),
    }
}

fn sweep_notes(report: &mut ExperimentReport, dropped: &[f64], psc: PathSelection) {
    if !dropped.is_empty() {
        report.notes.push(format!(
            "{} grid point(s) dropped because sources and targets would not fit in the graph",
            dropped.len()
        ));
    }
    report.notes.push(if psc == PathSelection::Usp {
        "usp reuses one route tree per target, which correlates probes and can hide the source/target symmetry; rsp shows it more cleanly".into()
    } else {
        format!("{psc} draws routes per pair; usp would reuse one route tree per target, correlating probes and partly hiding the source/target symmetry")
    });
}

/// `N*/N`, `E*/E`, `k̄*/k̄` along the target-density grid.
pub fn run_symmetry_sweep(
    g: &Graph,
    source: &str,
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<(ExperimentReport, SweepResult)> {
    let (epsilon, grid) = sweep_params(cfg)?;
    let owned;
    let table = match cfg.strategy {
        crate::explorer::PlacementStrategy::LowBetweenness => {
            owned = connected_betweenness(g)?;
            Some(&owned)
        }
        crate::explorer::PlacementStrategy::Random => None,
    };
    let result = symmetry_sweep(g, table, epsilon, &grid, cfg.psc, cfg.strategy, cfg.realizations, cfg.seed)?;
    let mut out = Out::new(out_dir)?;
    let mut header = SWEEP_HEADER.to_vec();
    header.push("swap_symmetric");
    out.csv(
        "sweep.csv",
        &header,
        result
            .rows
            .iter()
            .map(|r| {
                let mut c = sweep_cells(r);
                c.push(r.swap_symmetric.map(|b| b.to_string()).unwrap_or_default());
                c
            })
            .collect(),
    )?;
    let mut report = ExperimentReport::new("symmetry-sweep", Some(cfg), g, source);
    report.symmetry_point = Some(result.symmetry_point);
    report.dropped_grid_points = result.dropped.clone();
    sweep_notes(&mut report, &result.dropped, cfg.psc);
    if result.rows.iter().any(|r| r.swap_symmetric == Some(false)) {
        report.notes.push("asp swap check failed at some grid point".into());
    }
    report.files = out.files;
    report.write(out_dir)?;
    Ok((report, result))
}

/// Random and low-betweenness deployment side by side.
pub fn run_compare_deployment(
    g: &Graph,
    source: &str,
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<(ExperimentReport, ComparisonResult)> {
    let (epsilon, grid) = sweep_params(cfg)?;
    let t = connected_betweenness(g)?;
    let result = compare_deployment(g, &t, epsilon, &grid, cfg.psc, cfg.realizations, cfg.seed)?;
    let mut out = Out::new(out_dir)?;
    let mut header: Vec<String> = Vec::new();
    for prefix in ["random", "lowbc"] {
        header.extend(SWEEP_HEADER.iter().map(|h| format!("{prefix}_{h}")));
    }
    header.extend(["gain_vertex_fraction", "gain_edge_fraction", "gain_degree_ratio"].map(String::from));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv(
        "compare.csv",
        &header,
        result
            .rows
            .iter()
            .map(|r| {
                let mut c = sweep_cells(&r.random);
                c.extend(sweep_cells(&r.low_betweenness));
                c.extend([f(r.vertex_gain()), f(r.edge_gain()), f(r.degree_gain())]);
                c
            })
            .collect(),
    )?;
    let mut report = ExperimentReport::new("compare-deployment", Some(cfg), g, source);
    report.symmetry_point = Some(result.symmetry_point);
    report.dropped_grid_points = result.dropped.clone();
    sweep_notes(&mut report, &result.dropped, cfg.psc);
    report.files = out.files;
    report.write(out_dir)?;
    Ok((report, result))
}

/// Checks that every listed file exists, parses, and has the listed
/// number of rows.
pub fn verify_manifest(out_dir: &Path, report: &ExperimentReport) -> Result<()> {
    for entry in &report.files {
        let path = out_dir.join(&entry.path);
        let rows = match entry.kind {
            FileKind::Csv => {
                let mut r = csv::Reader::from_path(&path)?;
                let mut count = 0;
                for rec in r.records() {
                    rec?;
                    count += 1;
                }
                count
            }
            FileKind::EdgeList => read_edge_list_file(&path)?.m(),
        };
        if rows != entry.rows {
            return Err(Error::InvalidParameter(format!(
                "{} has {rows} rows, manifest says {}",
                entry.path, entry.rows
            )));
        }
    }
    Ok(())
}
