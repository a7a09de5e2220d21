//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # fixed budget: one run per listed target density
//! graph = rsf:n=10000,gamma=2.3
//! psc = usp
//! n_sources = 2
//! rho_t = 0.05, 0.1, 0.25
//! realizations = 10
//! seed = 7
//! ```
//!
//! A sweep replaces `n_sources`/`rho_t` with `epsilon` plus either
//! `rho_t_grid = <list>` or `rho_t_min`, `rho_t_max`, `rho_t_points`
//! (log-spaced). Values set later through [`RawConfig::set`] override the
//! file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explorer::PlacementStrategy;
use crate::paths::PathSelection;

use super::GraphSpec;

const KEYS: &[&str] = &[
    "graph",
    "graph_file",
    "psc",
    "strategy",
    "n_sources",
    "rho_t",
    "epsilon",
    "rho_t_grid",
    "rho_t_min",
    "rho_t_max",
    "rho_t_points",
    "realizations",
    "seed",
    "output",
];

const FIXED_KEYS: &[&str] = &["n_sources", "rho_t"];
const SWEEP_KEYS: &[&str] = &["epsilon", "rho_t_grid", "rho_t_min", "rho_t_max", "rho_t_points"];

pub const DEFAULT_REALIZATIONS: usize = 10;

/// Key-value pairs with the line each came from (0 for overrides).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::parse(line, format!("expected key = value, got '{s}'")))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Error::parse(line, format!("unknown key '{k}'")));
            }
            if v.is_empty() {
                return Err(Error::parse(line, format!("missing value for '{k}'")));
            }
            if entries.insert(k.to_string(), (v.to_string(), line)).is_some() {
                return Err(Error::parse(line, format!("key '{k}' given twice")));
            }
        }
        Ok(Self { entries })
    }

    /// Sets or replaces a key, as a command-line flag would.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::InvalidParameter(format!("unknown key '{key}'")));
        }
        self.entries.insert(key.to_string(), (value.into(), 0));
        Ok(())
    }

    pub fn remove(&mut self, key: &str) {
        self.entries.remove(key);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn value<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse().map(Some).map_err(|_| bad(*line, key, v)),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| bad(*line, key, t.trim())))
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.1)
    }
}

fn bad(line: usize, key: &str, value: &str) -> Error {
    let msg = format!("bad value '{value}' for '{key}'");
    if line == 0 {
        Error::InvalidParameter(msg)
    } else {
        Error::parse(line, msg)
    }
}

fn invalid(raw: &RawConfig, key: &str, msg: String) -> Error {
    match raw.line(key) {
        0 => Error::InvalidParameter(msg),
        line => Error::parse(line, msg),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoGrid {
    Log { min: f64, max: f64, points: usize },
    List(Vec<f64>),
}

impl RhoGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::List(v) => v.clone(),
            &Self::Log { min, max, points } => {
                if points == 1 {
                    return vec![min];
                }
                let (a, b) = (min.ln(), max.ln());
                (0..points)
                    .map(|i| {
                        if i == 0 {
                            min
                        } else if i + 1 == points {
                            max
                        } else {
                            (a + (b - a) * i as f64 / (points - 1) as f64).exp()
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentMode {
    /// One experiment per target density with a fixed source count.
    Fixed { n_sources: usize, rho_t: Vec<f64> },
    /// Fixed probe density, varying target density.
    Sweep { epsilon: f64, grid: RhoGrid },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: Option<GraphSpec>,
    pub graph_file: Option<PathBuf>,
    pub psc: PathSelection,
    pub strategy: PlacementStrategy,
    pub mode: ExperimentMode,
    pub realizations: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

fn check_density(raw: &RawConfig, key: &str, x: f64) -> Result<()> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(invalid(raw, key, format!("'{key}' must lie in (0, 1], got {x}")))
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_raw(&RawConfig::parse(text)?)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let graph = match raw.get("graph") {
            None => None,
            Some(s) => Some(s.parse::<GraphSpec>().map_err(|e| match e {
                Error::GraphSpec(m) => invalid(raw, "graph", format!("bad graph spec: {m}")),
                other => other,
            })?),
        };
        let graph_file: Option<PathBuf> = raw.get("graph_file").map(PathBuf::from);
        if graph.is_some() && graph_file.is_some() {
            return Err(invalid(raw, "graph_file", "give either 'graph' or 'graph_file', not both".into()));
        }
        let psc = raw.value::<PathSelection>("psc")?.unwrap_or(PathSelection::Usp);
        let strategy = raw.value::<PlacementStrategy>("strategy")?.unwrap_or(PlacementStrategy::Random);
        let realizations = raw.value::<usize>("realizations")?.unwrap_or(DEFAULT_REALIZATIONS);
        if realizations == 0 {
            return Err(invalid(raw, "realizations", "realizations must be at least 1".into()));
        }
        let seed =
            raw.value::<u64>("seed")?.ok_or_else(|| Error::InvalidParameter("'seed' is required".into()))?;
        let output = raw.get("output").map(PathBuf::from);

        let fixed = FIXED_KEYS.iter().any(|k| raw.has(k));
        let sweep = SWEEP_KEYS.iter().any(|k| raw.has(k));
        let mode = match (fixed, sweep) {
            (true, true) => return Err(Error::InvalidParameter(
                "give either a fixed budget (n_sources, rho_t) or a sweep (epsilon, rho_t grid), not both"
                    .into(),
            )),
            (false, false) => {
                return Err(Error::InvalidParameter(
                    "no budget: give n_sources and rho_t, or epsilon and a rho_t grid".into(),
                ))
            }
            (true, false) => {
                let n_sources = raw
                    .value::<usize>("n_sources")?
                    .ok_or_else(|| Error::InvalidParameter("'n_sources' is required".into()))?;
                if n_sources == 0 {
                    return Err(invalid(raw, "n_sources", "at least one source is required".into()));
                }
                let rho_t = raw
                    .list("rho_t")?
                    .ok_or_else(|| Error::InvalidParameter("'rho_t' is required".into()))?;
                for &r in &rho_t {
                    check_density(raw, "rho_t", r)?;
                }
                ExperimentMode::Fixed { n_sources, rho_t }
            }
            (false, true) => {
                let epsilon = raw
                    .value::<f64>("epsilon")?
                    .ok_or_else(|| Error::InvalidParameter("'epsilon' is required".into()))?;
                if !(epsilon > 0.0 && epsilon.is_finite()) {
                    return Err(invalid(
                        raw,
                        "epsilon",
                        format!("'epsilon' must be positive, got {epsilon}"),
                    ));
                }
                let log_keys = ["rho_t_min", "rho_t_max", "rho_t_points"];
                let grid = match (raw.list("rho_t_grid")?, log_keys.iter().any(|k| raw.has(k))) {
                    (Some(_), true) => {
                        return Err(Error::InvalidParameter(
                            "give either 'rho_t_grid' or rho_t_min/max/points, not both".into(),
                        ))
                    }
                    (Some(list), false) => {
                        for &r in &list {
                            check_density(raw, "rho_t_grid", r)?;
                        }
                        RhoGrid::List(list)
                    }
                    (None, _) => {
                        let need = |k: &str| {
                            raw.value::<f64>(k)?
                                .ok_or_else(|| Error::InvalidParameter(format!("'{k}' is required")))
                        };
                        let min = need("rho_t_min")?;
                        let max = need("rho_t_max")?;
                        check_density(raw, "rho_t_min", min)?;
                        check_density(raw, "rho_t_max", max)?;
                        if min > max {
                            return Err(invalid(raw, "rho_t_min", "rho_t_min exceeds rho_t_max".into()));
                        }
                        let points = raw
                            .value::<usize>("rho_t_points")?
                            .ok_or_else(|| Error::InvalidParameter("'rho_t_points' is required".into()))?;
                        if points == 0 || (points == 1 && min != max) {
                            return Err(invalid(
                                raw,
                                "rho_t_points",
                                "a single grid point needs rho_t_min = rho_t_max; zero points are not allowed".into(),
                            ));
                        }
                        RhoGrid::Log { min, max, points }
                    }
                };
                ExperimentMode::Sweep { epsilon, grid }
            }
        };
        Ok(Self { graph, graph_file, psc, strategy, mode, realizations, seed, output })
    }

    /// Canonical text that parses back to this configuration.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ");
        if let Some(g) = &self.graph {
            let _ = writeln!(out, "graph = {g}");
        }
        if let Some(p) = &self.graph_file {
            let _ = writeln!(out, "graph_file = {}", p.display());
        }
        let _ = writeln!(out, "psc = {}", self.psc);
        let _ = writeln!(out, "strategy = {}", self.strategy);
        match &self.mode {
            ExperimentMode::Fixed { n_sources, rho_t } => {
                let _ = writeln!(out, "n_sources = {n_sources}");
                let _ = writeln!(out, "rho_t = {}", join(rho_t));
            }
            ExperimentMode::Sweep { epsilon, grid } => {
                let _ = writeln!(out, "epsilon = {epsilon}");
                match grid {
                    RhoGrid::List(v) => {
                        let _ = writeln!(out, "rho_t_grid = {}", join(v));
                    }
                    RhoGrid::Log { min, max, points } => {
                        let _ = writeln!(out, "rho_t_min = {min}");
                        let _ = writeln!(out, "rho_t_max = {max}");
                        let _ = writeln!(out, "rho_t_points = {points}");
                    }
                }
            }
        }
        let _ = writeln!(out, "realizations = {}", self.realizations);
        let _ = writeln!(out, "seed = {}", self.seed);
        if let Some(p) = &self.output {
            let _ = writeln!(out, "output = {}", p.display());
        }
        out
    }
}
