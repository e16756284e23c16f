//! Command-line experiments: η sweeps, Γ maps, invariant states, classical
//! attractors and their comparison, written as PGM, CSV and JSON.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use torusops::{ChannelSpec, MapSpec};

pub use commands::{run, Inputs};
pub use config::{CommandKind, Config};

#[derive(Debug, Parser)]
#[command(name = "torusops", version, about = "Quantum operations on the torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Hilbert space dimension
    #[arg(long)]
    pub n: Option<usize>,
    /// JSON config file; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Phase-space grid, NQxNP
    #[arg(long, value_parser = config::parse_grid)]
    pub grid: Option<[usize; 2]>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Inline channel spec, e.g. '{"type":"sdc","eps":0.5,"alpha":0.25}'
    #[arg(long, value_parser = parse_channel)]
    pub channel: Option<ChannelSpec>,
    /// Inline map spec, e.g. '{"type":"standard","k":0.065}'
    #[arg(long, value_parser = parse_map)]
    pub map: Option<MapSpec>,
}

#[derive(Debug, Args)]
pub struct Sweep {
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    /// Kick strength
    #[arg(long)]
    pub k: Option<f64>,
    /// Friction factor on the momentum
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub trajectories: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub transient: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// η of simple dissipation over an (eps, alpha) grid
    EtaSweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: Sweep,
    },
    /// Husimi map of the non-unitality operator Γ
    GammaMap {
        #[command(flatten)]
        common: Common,
    },
    /// Invariant state of noise composed with a quantized map
    Invariant {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: Sweep,
    },
    /// Histogram of the classical dissipative standard map
    Classical {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        classical: ClassicalArgs,
    },
    /// Correlate a quantum invariant Husimi field with a classical histogram
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        classical: ClassicalArgs,
        /// Husimi CSV from `invariant` (computed if absent)
        #[arg(long)]
        quantum_csv: Option<PathBuf>,
        /// Histogram CSV from `classical` (computed if absent)
        #[arg(long)]
        classical_csv: Option<PathBuf>,
    },
    /// η, unitality and related diagnostics of one channel
    Report {
        #[command(flatten)]
        common: Common,
        /// Random probes for the subleading eigenvalue estimate
        #[arg(long)]
        probes: Option<usize>,
    },
}

fn parse_channel(text: &str) -> Result<ChannelSpec, String> {
    ChannelSpec::from_json(text).map_err(|e| e.to_string())
}

fn parse_map(text: &str) -> Result<MapSpec, String> {
    MapSpec::from_json(text).map_err(|e| e.to_string())
}

impl Common {
    fn apply(&self, mut c: Config) -> Config {
        if let Some(n) = self.n {
            c.n = Some(n);
        }
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if let Some(grid) = self.grid {
            c.grid = Some(grid);
        }
        if let Some(tol) = self.tol {
            c.tol = tol;
        }
        if let Some(m) = self.max_iter {
            c.max_iter = Some(m);
        }
        if let Some(ch) = &self.channel {
            c.channel = Some(ch.clone());
        }
        if let Some(map) = self.map {
            c.map = Some(map);
        }
        c
    }
}

impl Sweep {
    fn apply(&self, mut c: Config) -> Config {
        if !self.eps.is_empty() {
            c.eps = self.eps.clone();
        }
        if !self.alpha.is_empty() {
            c.alpha = self.alpha.clone();
        }
        c
    }
}

impl ClassicalArgs {
    fn apply(&self, mut c: Config) -> Config {
        let cl = &mut c.classical;
        if let Some(k) = self.k {
            cl.k = k;
        }
        if let Some(d) = self.delta {
            cl.delta = d;
        }
        if let Some(t) = self.trajectories {
            cl.trajectories = t;
        }
        if let Some(s) = self.steps {
            cl.steps = s;
        }
        if let Some(t) = self.transient {
            cl.transient = t;
        }
        c
    }
}

/// Loads the config file, overlays the flags and runs the command. Returns
/// the `run.json` manifest.
pub fn execute(cli: Cli) -> anyhow::Result<serde_json::Value> {
    let common = match &cli.command {
        Command::EtaSweep { common, .. }
        | Command::GammaMap { common }
        | Command::Invariant { common, .. }
        | Command::Classical { common, .. }
        | Command::Compare { common, .. }
        | Command::Report { common, .. } => common,
    };
    let base = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let config = common.apply(base);
    let mut inputs = Inputs::default();
    let (kind, config) = match &cli.command {
        Command::EtaSweep { sweep, .. } => (CommandKind::EtaSweep, sweep.apply(config)),
        Command::GammaMap { .. } => (CommandKind::GammaMap, config),
        Command::Invariant { sweep, .. } => (CommandKind::Invariant, sweep.apply(config)),
        Command::Classical { classical, .. } => (CommandKind::Classical, classical.apply(config)),
        Command::Compare {
            classical,
            quantum_csv,
            classical_csv,
            ..
        } => {
            inputs.quantum = quantum_csv.clone();
            inputs.classical = classical_csv.clone();
            (CommandKind::Compare, classical.apply(config))
        }
        Command::Report { probes, .. } => {
            let mut c = config;
            if probes.is_some() {
                c.probes = *probes;
            }
            (CommandKind::Report, c)
        }
    };
    run(kind, config, &inputs, &common.out)
}
