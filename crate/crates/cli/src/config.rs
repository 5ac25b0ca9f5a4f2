//! Run configuration: a flat INI-style key-value file with one section per
//! concern, plus full command-line overrides. Unknown sections or keys are
//! rejected with their path.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type CfgResult<T> = Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "path")]
pub enum TrajKind {
    Static,
    Sin,
    /// The exactly solvable arcsine family.
    Lawwu,
    File(PathBuf),
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub traj: TrajKind,
    pub l0: f64,
    pub dl: f64,
    pub order: u32,
    /// Relative detuning (omega - omega_N)/omega for the sinusoidal family.
    pub domega_rel: f64,
    pub mode: Mode,
    /// Uniform seed density override (classical default 1.0; quantum
    /// default is the static vacuum).
    pub seed_value: Option<f64>,
    /// Optional sampled seed profile, two-column (tau, rho) text file.
    pub seed_file: Option<PathBuf>,
    /// Bounce periods covered by the energy curve.
    pub periods: usize,
    /// Starting point for the `trajectory` subcommand.
    pub tau0: f64,
    /// Bounce count for the `trajectory` subcommand.
    pub bounces: usize,
    /// Number of density snapshots over the run.
    pub snapshots: usize,
    /// Spatial samples per snapshot.
    pub grid: usize,
    /// Band-scan half width in delta_omega/omega.
    pub scan_halfwidth: f64,
    pub scan_samples: usize,
    pub out_dir: PathBuf,
    /// Override of the retardation solver tolerance.
    pub root_tolerance: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            traj: TrajKind::Sin,
            l0: 1.0,
            dl: 0.01,
            order: 2,
            domega_rel: 0.0,
            mode: Mode::Classical,
            seed_value: None,
            seed_file: None,
            periods: 25,
            tau0: 0.0,
            bounces: 20,
            snapshots: 3,
            grid: 1024,
            scan_halfwidth: 0.03,
            scan_samples: 200,
            out_dir: PathBuf::from("out"),
            root_tolerance: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> CfgResult<T> {
    v.parse()
        .map_err(|_| ConfigError(format!("{key}: cannot parse {v:?}")))
}

pub fn parse_traj_kind(v: &str) -> CfgResult<TrajKind> {
    match v {
        "static" => Ok(TrajKind::Static),
        "sin" => Ok(TrajKind::Sin),
        "lawwu" => Ok(TrajKind::Lawwu),
        other => {
            if let Some(path) = other.strip_prefix("file:") {
                Ok(TrajKind::File(PathBuf::from(path)))
            } else {
                Err(ConfigError(format!(
                    "trajectory.kind: expected static|sin|lawwu|file:PATH, got {other:?}"
                )))
            }
        }
    }
}

impl RunConfig {
    /// Load from an INI-style file: `[section]` headers, `key = value`
    /// lines, `#` comments. Every key must be known.
    pub fn from_file(path: &Path) -> CfgResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::from("");
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!(
                    "{}:{}: expected `key = value`, got {line:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            if current.is_empty() {
                return Err(ConfigError(format!(
                    "{}:{}: key outside any [section]",
                    path.display(),
                    lineno + 1
                )));
            }
            sections
                .get_mut(&current)
                .unwrap()
                .insert(k.trim().to_string(), v.trim().to_string());
        }

        let mut cfg = Self::default();
        for (section, keys) in &sections {
            for (key, value) in keys {
                cfg.apply(section, key, value)?;
            }
        }
        Ok(cfg)
    }

    fn apply(&mut self, section: &str, key: &str, value: &str) -> CfgResult<()> {
        let path = format!("{section}.{key}");
        match (section, key) {
            ("trajectory", "kind") => self.traj = parse_traj_kind(value)?,
            ("trajectory", "L0") => self.l0 = parse_num(&path, value)?,
            ("trajectory", "dL") => self.dl = parse_num(&path, value)?,
            ("trajectory", "N") => self.order = parse_num(&path, value)?,
            ("trajectory", "domega") => self.domega_rel = parse_num(&path, value)?,
            ("run", "mode") => {
                self.mode = match value {
                    "classical" => Mode::Classical,
                    "quantum" => Mode::Quantum,
                    other => {
                        return Err(ConfigError(format!(
                            "run.mode: expected classical|quantum, got {other:?}"
                        )))
                    }
                }
            }
            ("run", "periods") => self.periods = parse_num(&path, value)?,
            ("run", "tau0") => self.tau0 = parse_num(&path, value)?,
            ("run", "n") => self.bounces = parse_num(&path, value)?,
            ("run", "snapshots") => self.snapshots = parse_num(&path, value)?,
            ("run", "grid") => self.grid = parse_num(&path, value)?,
            ("seed", "value") => self.seed_value = Some(parse_num(&path, value)?),
            ("seed", "file") => self.seed_file = Some(PathBuf::from(value)),
            ("scan", "domega") => self.scan_halfwidth = parse_num(&path, value)?,
            ("scan", "samples") => self.scan_samples = parse_num(&path, value)?,
            ("output", "dir") => self.out_dir = PathBuf::from(value),
            ("tolerances", "root") => self.root_tolerance = Some(parse_num(&path, value)?),
            _ => return Err(ConfigError(format!("unknown config key: {path}"))),
        }
        Ok(())
    }

    /// Validate cross-field constraints the trajectory module will also
    /// enforce; failing here gives a config-shaped error (exit code 1)
    /// before any compute starts.
    pub fn validate(&self) -> CfgResult<()> {
        if !(self.l0 > 0.0) {
            return Err(ConfigError(format!("trajectory.L0 = {} must be > 0", self.l0)));
        }
        match self.traj {
            TrajKind::Sin | TrajKind::Lawwu => {
                if !(self.dl > 0.0 && self.dl < self.l0) {
                    return Err(ConfigError(format!(
                        "trajectory.dL = {} violates 0 < dL < L0 = {}",
                        self.dl, self.l0
                    )));
                }
                if self.order == 0 {
                    return Err(ConfigError("trajectory.N must be >= 1".into()));
                }
            }
            _ => {}
        }
        if let TrajKind::Sin = self.traj {
            let omega = self.omega();
            if !(omega * self.dl < 1.0) {
                return Err(ConfigError(format!(
                    "omega*dL = {} violates omega*dL < 1",
                    omega * self.dl
                )));
            }
        }
        if matches!(self.traj, TrajKind::Lawwu) && !(self.order as f64 * self.dl < self.l0) {
            return Err(ConfigError(format!(
                "N*dL = {} violates N*dL < L0 for the lawwu family",
                self.order as f64 * self.dl
            )));
        }
        if self.domega_rel.abs() >= 1.0 {
            return Err(ConfigError(format!(
                "trajectory.domega = {} must satisfy |domega| < 1 (relative detuning)",
                self.domega_rel
            )));
        }
        if let Some(v) = self.seed_value {
            if v < 0.0 && self.mode == Mode::Classical {
                return Err(ConfigError(format!(
                    "seed.value = {v} must be >= 0 for a classical run"
                )));
            }
        }
        if self.snapshots < 2 {
            return Err(ConfigError("run.snapshots must be >= 2".into()));
        }
        if self.grid < 16 {
            return Err(ConfigError("run.grid must be >= 16".into()));
        }
        if self.scan_samples < 2 {
            return Err(ConfigError("scan.samples must be >= 2".into()));
        }
        if self.periods == 0 {
            return Err(ConfigError("run.periods must be >= 1".into()));
        }
        Ok(())
    }

    /// Drive frequency of the sinusoidal family, including detuning:
    /// omega = omega_N / (1 - domega_rel).
    pub fn omega(&self) -> f64 {
        self.order as f64 * std::f64::consts::PI / self.l0 / (1.0 - self.domega_rel)
    }
}
