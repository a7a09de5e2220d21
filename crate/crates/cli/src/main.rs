use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tracesim::io::{read_edge_list_file, write_edge_list_file, ExperimentConfig, GraphSpec, RawConfig};
use tracesim::report::{run_betweenness, run_compare_deployment, run_explore, run_symmetry_sweep};
use tracesim::{Error, Graph};

/// Traceroute-like exploration of synthetic networks.
#[derive(Parser)]
#[command(name = "tracesim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write its largest connected component.
    Generate {
        /// Generator spec, e.g. er:n=10000,k=20 or rsf:n=10000,gamma=2.3
        #[arg(long)]
        spec: String,
        #[arg(long)]
        seed: u64,
        /// Edge-list file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo exploration at one or more fixed budgets.
    Explore(ExperimentArgs),
    /// Vertex and edge betweenness of a graph.
    Betweenness {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep the target density at fixed probe density.
    SymmetrySweep(ExperimentArgs),
    /// Random versus low-betweenness deployment along a sweep.
    CompareDeployment(ExperimentArgs),
}

/// Flags override the matching keys of the config file.
#[derive(Args)]
struct ExperimentArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Edge-list file; replaces any graph named in the config.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// usp, rsp or asp
    #[arg(long)]
    psc: Option<String>,
    /// random or low-betweenness
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    realizations: Option<String>,
    #[arg(long)]
    n_sources: Option<String>,
    /// Comma-separated target densities.
    #[arg(long)]
    rho_t: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    /// Comma-separated target densities for a sweep.
    #[arg(long)]
    rho_t_grid: Option<String>,
    #[arg(long)]
    rho_t_min: Option<String>,
    #[arg(long)]
    rho_t_max: Option<String>,
    #[arg(long)]
    rho_t_points: Option<String>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn usage(context: &str, e: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("{context}: {e}"))
}

fn load_config(args: &ExperimentArgs) -> Result<ExperimentConfig, Failure> {
    let mut raw = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(&format!("cannot read {}", path.display()), e))?;
            RawConfig::parse(&text).map_err(|e| usage(&path.display().to_string(), e))?
        }
        None => RawConfig::default(),
    };
    if let Some(g) = &args.graph {
        raw.remove("graph");
        raw.set("graph_file", g.display().to_string())?;
    }
    if let Some(o) = &args.out {
        raw.set("output", o.display().to_string())?;
    }
    if let Some(s) = args.seed {
        raw.set("seed", s.to_string())?;
    }
    let flags = [
        ("psc", &args.psc),
        ("strategy", &args.strategy),
        ("realizations", &args.realizations),
        ("n_sources", &args.n_sources),
        ("rho_t", &args.rho_t),
        ("epsilon", &args.epsilon),
        ("rho_t_grid", &args.rho_t_grid),
        ("rho_t_min", &args.rho_t_min),
        ("rho_t_max", &args.rho_t_max),
        ("rho_t_points", &args.rho_t_points),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            raw.set(key, v.clone())?;
        }
    }
    Ok(ExperimentConfig::from_raw(&raw)?)
}

fn load_graph(cfg: &ExperimentConfig) -> Result<(Graph, String), Failure> {
    match (&cfg.graph, &cfg.graph_file) {
        (None, Some(path)) => {
            let g = read_edge_list_file(path).map_err(|e| match e {
                Error::Io(io) => usage(&format!("cannot read {}", path.display()), io),
                other => usage(&path.display().to_string(), other),
            })?;
            Ok((g, path.display().to_string()))
        }
        _ => Ok(tracesim::report::load_graph(cfg)?),
    }
}

fn output_dir(cfg: &ExperimentConfig) -> Result<&Path, Failure> {
    cfg.output
        .as_deref()
        .ok_or_else(|| Failure::Usage("no output directory: pass --out or set 'output'".into()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate { spec, seed, out } => {
            let spec: GraphSpec = spec.parse()?;
            let g = spec.generate(seed)?;
            write_edge_list_file(&g, &out)?;
            println!("{}: n={} m={} mean_degree={:.4}", out.display(), g.n(), g.m(), g.mean_degree());
        }
        Command::Betweenness { graph, out } => {
            let g = read_edge_list_file(&graph).map_err(|e| match e {
                Error::Io(io) => usage(&format!("cannot read {}", graph.display()), io),
                other => usage(&graph.display().to_string(), other),
            })?;
            let report = run_betweenness(&g, &graph.display().to_string(), &out)?;
            println!("{}: {} files", out.display(), report.files.len());
        }
        Command::Explore(args) => {
            let cfg = load_config(&args)?;
            let out = output_dir(&cfg)?;
            let (g, source) = load_graph(&cfg)?;
            let report = run_explore(&g, &source, &cfg, out)?;
            for p in &report.points {
                println!(
                    "rho_t={} n_s={} n_t={} eps={}: N*/N={:.4} E*/E={:.4} k*/k={:.4}",
                    p.rho_t_requested,
                    p.budget.n_sources,
                    p.budget.n_targets,
                    p.epsilon,
                    p.summary.vertex_fraction,
                    p.summary.edge_fraction,
                    p.summary.degree_ratio
                );
            }
            for n in &report.notes {
                eprintln!("note: {n}");
            }
        }
        Command::SymmetrySweep(args) => {
            let cfg = load_config(&args)?;
            let out = output_dir(&cfg)?;
            let (g, source) = load_graph(&cfg)?;
            let (report, result) = run_symmetry_sweep(&g, &source, &cfg, out)?;
            println!("symmetry point rho_t ~ {:.6}", result.symmetry_point);
            for r in &result.rows {
                println!(
                    "rho_t={:.6} n_s={} n_t={} eps={:.4}: N*/N={:.4} E*/E={:.4}",
                    r.rho_t, r.n_sources, r.n_targets, r.epsilon, r.vertex_fraction, r.edge_fraction
                );
            }
            for n in &report.notes {
                eprintln!("note: {n}");
            }
        }
        Command::CompareDeployment(args) => {
            let cfg = load_config(&args)?;
            let out = output_dir(&cfg)?;
            let (g, source) = load_graph(&cfg)?;
            let (report, result) = run_compare_deployment(&g, &source, &cfg, out)?;
            for r in &result.rows {
                println!(
                    "rho_t={:.6}: N*/N random={:.4} lowbc={:.4}  E*/E random={:.4} lowbc={:.4}",
                    r.random.rho_t,
                    r.random.vertex_fraction,
                    r.low_betweenness.vertex_fraction,
                    r.random.edge_fraction,
                    r.low_betweenness.edge_fraction
                );
            }
            for n in &report.notes {
                eprintln!("note: {n}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
