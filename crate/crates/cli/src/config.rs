//! Experiment configuration: a JSON file overlaid by command-line flags.

use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use torusops::{AttractorParams, ChannelSpec, MapSpec};

pub const DEFAULT_GRID: [usize; 2] = [128, 128];
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalConfig {
    pub k: f64,
    pub delta: f64,
    pub trajectories: usize,
    pub steps: usize,
    pub transient: usize,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        Self {
            k: 0.065,
            delta: 0.6,
            trajectories: 1000,
            steps: 5000,
            transient: 500,
        }
    }
}

/// Pass thresholds for the figure proxies. The figures are qualitative, so
/// these are ordinary settings rather than constants of the method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub correlation: f64,
    pub overlap: f64,
    pub occupied: f64,
    pub area: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            correlation: 0.5,
            overlap: 0.3,
            occupied: 0.2,
            area: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub n: Option<usize>,
    pub seed: u64,
    pub grid: Option<[usize; 2]>,
    pub tol: f64,
    pub max_iter: Option<usize>,
    pub channel: Option<ChannelSpec>,
    pub map: Option<MapSpec>,
    pub eps: Vec<f64>,
    pub alpha: Vec<f64>,
    pub classical: ClassicalConfig,
    pub probes: Option<usize>,
    pub thresholds: Thresholds,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            n: None,
            seed: DEFAULT_SEED,
            grid: None,
            tol: DEFAULT_TOL,
            max_iter: None,
            channel: None,
            map: None,
            eps: Vec::new(),
            alpha: Vec::new(),
            classical: ClassicalConfig::default(),
            probes: None,
            thresholds: Thresholds::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    EtaSweep,
    GammaMap,
    Invariant,
    Classical,
    Compare,
    Report,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::EtaSweep => "eta-sweep",
            Self::GammaMap => "gamma-map",
            Self::Invariant => "invariant",
            Self::Classical => "classical",
            Self::Compare => "compare",
            Self::Report => "report",
        }
    }

    fn default_n(self) -> usize {
        match self {
            Self::EtaSweep => 32,
            _ => 64,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn grid(&self) -> [usize; 2] {
        self.grid.unwrap_or(DEFAULT_GRID)
    }

    pub fn dim(&self) -> usize {
        self.n.expect("resolved config has a dimension")
    }

    /// Fills every default the command needs so that the resolved config can
    /// be written next to the outputs and replayed.
    pub fn resolve(mut self, cmd: CommandKind) -> anyhow::Result<Self> {
        let n = match (self.n, self.channel.as_ref().and_then(ChannelSpec::dim)) {
            (Some(n), _) => n,
            (None, Some(n)) => n,
            (None, None) => cmd.default_n(),
        };
        self.n = Some(n);
        self.channel = self.channel.take().map(|c| c.with_dim(n));
        self.grid = Some(self.grid());
        let [nq, np] = self.grid();
        if nq == 0 || np == 0 {
            bail!("grid must be non-empty, got {nq}x{np}");
        }
        if !(self.tol > 0.0) {
            bail!("tol must be positive, got {}", self.tol);
        }
        match cmd {
            CommandKind::EtaSweep => {
                if self.eps.is_empty() {
                    self.eps = vec![0.5, 0.75];
                }
                if self.alpha.is_empty() {
                    self.alpha = (1..=n).map(|i| i as f64 / n as f64).collect();
                }
            }
            CommandKind::GammaMap | CommandKind::Report => {
                if self.channel.is_none() {
                    if cmd == CommandKind::Report {
                        bail!(
                            "report needs a channel spec (--channel or \"channel\" in the config)"
                        );
                    }
                    self.channel = Some(ChannelSpec::Sdc {
                        n: Some(n),
                        eps: 0.5,
                        alpha: 0.5,
                    });
                }
            }
            CommandKind::Invariant | CommandKind::Compare => {
                if self.map.is_none() {
                    self.map = Some(MapSpec::Standard {
                        k: self.classical.k,
                    });
                }
                let sweep = !self.eps.is_empty() || !self.alpha.is_empty();
                if self.channel.is_none() && !(sweep && cmd == CommandKind::Invariant) {
                    // "α ∼ 0" read as the smallest resolvable contraction 1/N
                    self.channel = Some(ChannelSpec::Sdc {
                        n: Some(n),
                        eps: 0.4,
                        alpha: 1.0 / n as f64,
                    });
                }
                if sweep && cmd == CommandKind::Invariant {
                    if self.channel.is_some() {
                        bail!(
                            "an eps/alpha sweep builds its own sdc channels; drop the channel spec"
                        );
                    }
                    if self.eps.is_empty() {
                        self.eps = vec![0.4];
                    }
                    if self.alpha.is_empty() {
                        self.alpha = vec![1.0 / n as f64];
                    }
                }
            }
            CommandKind::Classical => {}
        }
        if matches!(cmd, CommandKind::Classical | CommandKind::Compare) && np % 2 != 0 {
            bail!("classical histograms need an even momentum grid, got {np}");
        }
        Ok(self)
    }

    pub fn attractor_params(&self) -> AttractorParams {
        let [nq, np] = self.grid();
        AttractorParams {
            k: self.classical.k,
            delta: self.classical.delta,
            trajectories: self.classical.trajectories,
            steps: self.classical.steps,
            transient: self.classical.transient,
            nq,
            np,
            seed: self.seed,
        }
    }
}

/// Parses `NQxNP`.
pub fn parse_grid(text: &str) -> Result<[usize; 2], String> {
    let (a, b) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NQxNP, got {text:?}"))?;
    let nq = a.trim().parse().map_err(|e| format!("bad NQ {a:?}: {e}"))?;
    let np = b.trim().parse().map_err(|e| format!("bad NP {b:?}: {e}"))?;
    Ok([nq, np])
}
