//! Run configuration: a TOML file of top-level keys and per-subcommand
//! sections, overlaid with command-line overrides.
//!
//! ```toml
//! subcommand = "heatmap"
//! seed = 7
//! replications = 10
//!
//! [network]
//! n = 2000
//!
//! [dynamics]
//! gamma = 0.5
//!
//! [heatmap]
//! lambda_points = 11
//! beta_grid = [0.0, 0.1, 0.2]
//! ```
//!
//! Every key is consumed exactly once; anything left over is reported as
//! unknown, with the line it was found on.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use muxepi::experiments::uniform_grid;
use muxepi::mmca::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use muxepi::{DynamicsParams, ExperimentSpec, NetworkSpec, OmegaSize, OmegaSpec, Strategy, Topology};
use serde::Serialize;
use toml::Value;

/// Environment variable consulted for the master seed when neither the
/// command line nor the file sets one.
pub const SEED_ENV: &str = "MUXEPI_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Generate,
    Mmca,
    Threshold,
    Heatmap,
    Timeseries,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Mmca => "mmca",
            Command::Threshold => "threshold",
            Command::Heatmap => "heatmap",
            Command::Timeseries => "timeseries",
            Command::Sweep => "sweep",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Command::Generate,
            Command::Mmca,
            Command::Threshold,
            Command::Heatmap,
            Command::Timeseries,
            Command::Sweep,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| format!("unknown subcommand `{s}` (expected generate, mmca, threshold, heatmap, timeseries or sweep)"))
    }
}

/// Where a configuration value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    File { line: usize },
    Flag,
    Env,
    Missing,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { line } => write!(f, "line {line}"),
            Origin::Flag => f.write_str("command line"),
            Origin::Env => write!(f, "environment variable {SEED_ENV}"),
            Origin::Missing => f.write_str("configuration"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{origin}: `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub origin: Origin,
    pub message: String,
}

/// Values set on the command line, applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub command: Option<Command>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    /// `section.key=value` assignments; the value is read as a TOML value
    /// and falls back to a bare string.
    pub assignments: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    Flag,
    Config,
    Env,
    Default,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputGraphs {
    pub awareness: Option<PathBuf>,
    pub contact: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeseriesConfig {
    pub lambda: f64,
    pub betas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub strategies: Vec<Strategy>,
    pub fractions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdConfig {
    pub gammas: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmcaConfig {
    pub tol: f64,
    pub max_steps: usize,
}

/// Fully validated configuration of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub out_dir: PathBuf,
    pub master_seed: u64,
    pub seed_source: SeedSource,
    /// Worker cap; `None` uses all cores.
    pub jobs: Option<usize>,
    pub spec: ExperimentSpec,
    pub inputs: InputGraphs,
    pub timeseries: TimeseriesConfig,
    pub sweep: SweepConfig,
    pub threshold: ThresholdConfig,
    pub mmca: MmcaConfig,
}

struct Entry {
    value: Value,
    origin: Origin,
}

/// Flattened `section.key -> value` view with provenance.
struct Entries {
    map: BTreeMap<String, Entry>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

impl Entries {
    fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let syntax = |e: toml::de::Error| ConfigError {
            key: String::new(),
            origin: e.span().map_or(Origin::Missing, |s| Origin::File {
                line: line_of(text, s.start),
            }),
            message: e.message().trim().to_string(),
        };
        let spans = toml::de::DeTable::parse(text).map_err(syntax)?;
        let values: toml::Table = toml::from_str(text).map_err(syntax)?;

        let mut lines = BTreeMap::new();
        for (k, v) in spans.get_ref() {
            let line = line_of(text, k.span().start);
            lines.insert(k.get_ref().to_string(), line);
            if let toml::de::DeValue::Table(inner) = v.get_ref() {
                for (ik, _) in inner {
                    lines.insert(format!("{}.{}", k.get_ref(), ik.get_ref()), line_of(text, ik.span().start));
                }
            }
        }

        let mut map = BTreeMap::new();
        for (k, v) in values {
            match v {
                Value::Table(section) => {
                    for (ik, iv) in section {
                        let key = format!("{k}.{ik}");
                        let origin = Origin::File {
                            line: lines.get(&key).copied().unwrap_or(0),
                        };
                        if matches!(iv, Value::Table(_)) {
                            return Err(ConfigError {
                                key,
                                origin,
                                message: "nested tables are not supported".into(),
                            });
                        }
                        map.insert(key, Entry { value: iv, origin });
                    }
                }
                other => {
                    let origin = Origin::File {
                        line: lines.get(&k).copied().unwrap_or(0),
                    };
                    map.insert(k, Entry { value: other, origin });
                }
            }
        }
        Ok(Self { map })
    }

    fn assign(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, raw) = assignment.split_once('=').ok_or_else(|| ConfigError {
            key: assignment.to_string(),
            origin: Origin::Flag,
            message: "expected KEY=VALUE".into(),
        })?;
        let key = key.trim().to_string();
        let raw = raw.trim();
        let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()));
        self.map.insert(
            key,
            Entry {
                value,
                origin: Origin::Flag,
            },
        );
        Ok(())
    }

    fn origin(&self, key: &str) -> Origin {
        self.map.get(key).map_or(Origin::Missing, |e| e.origin)
    }

    fn take(&mut self, key: &str) -> Option<(Value, Origin)> {
        self.map.remove(key).map(|e| (e.value, e.origin))
    }

    fn error(key: &str, origin: Origin, message: impl Into<String>) -> ConfigError {
        ConfigError {
            key: key.to_string(),
            origin,
            message: message.into(),
        }
    }

    fn number(key: &str, value: &Value, origin: Origin) -> Result<f64, ConfigError> {
        match value {
            Value::Float(f) => Ok(*f),
            Value::Integer(i) => Ok(*i as f64),
            other => Err(Self::error(key, origin, format!("expected a number, found {}", other.type_str()))),
        }
    }

    fn f64_in(&mut self, key: &str, default: f64, lo: f64, hi: f64) -> Result<f64, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some((v, origin)) => {
                let x = Self::number(key, &v, origin)?;
                if !(lo..=hi).contains(&x) {
                    return Err(Self::error(key, origin, format!("value {x} outside [{lo}, {hi}]")));
                }
                Ok(x)
            }
        }
    }

    fn rate(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        self.f64_in(key, default, 0.0, 1.0)
    }

    fn integer(&mut self, key: &str) -> Result<Option<(u64, Origin)>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::Integer(i), origin)) if i >= 0 => Ok(Some((i as u64, origin))),
            Some((Value::Integer(i), origin)) => Err(Self::error(key, origin, format!("value {i} must be non-negative"))),
            Some((other, origin)) => Err(Self::error(
                key,
                origin,
                format!("expected an integer, found {}", other.type_str()),
            )),
        }
    }

    fn count(&mut self, key: &str, default: usize, min: usize) -> Result<usize, ConfigError> {
        match self.integer(key)? {
            None => Ok(default),
            Some((v, origin)) => {
                let v = usize::try_from(v).map_err(|_| Self::error(key, origin, "value too large"))?;
                if v < min {
                    return Err(Self::error(key, origin, format!("value {v} must be at least {min}")));
                }
                Ok(v)
            }
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<(String, Origin)>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::String(s), origin)) => Ok(Some((s, origin))),
            Some((other, origin)) => Err(Self::error(key, origin, format!("expected a string, found {}", other.type_str()))),
        }
    }

    fn rates(&mut self, key: &str) -> Result<Option<(Vec<f64>, Origin)>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::Array(items), origin)) => {
                let mut out = Vec::with_capacity(items.len());
                for v in &items {
                    let x = Self::number(key, v, origin)?;
                    if !(0.0..=1.0).contains(&x) {
                        return Err(Self::error(key, origin, format!("value {x} outside [0, 1]")));
                    }
                    out.push(x);
                }
                if out.is_empty() {
                    return Err(Self::error(key, origin, "list must not be empty"));
                }
                Ok(Some((out, origin)))
            }
            Some((other, origin)) => Err(Self::error(key, origin, format!("expected a list, found {}", other.type_str()))),
        }
    }

    fn strategies(&mut self, key: &str) -> Result<Option<Vec<Strategy>>, ConfigError> {
        let parse = |s: &str, origin| s.parse::<Strategy>().map_err(|e| Self::error(key, origin, e.to_string()));
        match self.take(key) {
            None => Ok(None),
            Some((Value::String(s), origin)) => Ok(Some(vec![parse(&s, origin)?])),
            Some((Value::Array(items), origin)) => {
                let mut out = Vec::new();
                for v in items {
                    match v {
                        Value::String(s) => out.push(parse(&s, origin)?),
                        other => {
                            return Err(Self::error(key, origin, format!("expected strategy names, found {}", other.type_str())))
                        }
                    }
                }
                if out.is_empty() {
                    return Err(Self::error(key, origin, "list must not be empty"));
                }
                Ok(Some(out))
            }
            Some((other, origin)) => Err(Self::error(key, origin, format!("expected a list, found {}", other.type_str()))),
        }
    }

    /// A grid given either explicitly (`<name>_grid`) or as a point count
    /// over `[0, 1]` (`<name>_points`).
    fn grid(&mut self, section: &str, name: &str, default_points: usize) -> Result<Vec<f64>, ConfigError> {
        let grid_key = format!("{section}.{name}_grid");
        let points_key = format!("{section}.{name}_points");
        let explicit = self.rates(&grid_key)?;
        let has_points = self.map.contains_key(&points_key);
        let points = self.count(&points_key, default_points, 1)?;
        match explicit {
            Some((_, origin)) if has_points => Err(Self::error(
                &grid_key,
                origin,
                format!("set either {grid_key} or {points_key}, not both"),
            )),
            Some((grid, _)) => Ok(grid),
            None => Ok(uniform_grid(points)),
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.map.into_iter().next() {
            None => Ok(()),
            Some((key, entry)) => Err(Self::error(&key, entry.origin, "unknown key")),
        }
    }
}

/// Parses `text` (the configuration file, if any) with `overrides` on top.
/// `env_seed` is the value of [`SEED_ENV`], passed in so callers control the
/// environment.
pub fn parse_config(text: Option<&str>, overrides: &Overrides, env_seed: Option<&str>) -> Result<RunConfig, ConfigError> {
    let mut e = match text {
        Some(t) => Entries::from_toml(t)?,
        None => Entries { map: BTreeMap::new() },
    };
    for a in &overrides.assignments {
        e.assign(a)?;
    }

    let file_command = e.string("subcommand")?;
    let command = match (overrides.command, file_command) {
        (Some(c), _) => c,
        (None, Some((s, origin))) => s.parse().map_err(|m| Entries::error("subcommand", origin, m))?,
        (None, None) => return Err(Entries::error("subcommand", Origin::Missing, "missing subcommand")),
    };

    let file_seed = e.integer("seed")?;
    let (master_seed, seed_source) = match (overrides.seed, file_seed, env_seed) {
        (Some(s), _, _) => (s, SeedSource::Flag),
        (None, Some((s, _)), _) => (s, SeedSource::Config),
        (None, None, Some(raw)) => (
            raw.trim()
                .parse()
                .map_err(|_| Entries::error(SEED_ENV, Origin::Env, format!("`{raw}` is not an unsigned integer")))?,
            SeedSource::Env,
        ),
        (None, None, None) => (0, SeedSource::Default),
    };

    let file_out = e.string("out")?;
    let out_dir = overrides
        .out_dir
        .clone()
        .or(file_out.map(|(s, _)| PathBuf::from(s)))
        .unwrap_or_else(|| PathBuf::from("out"));
    let file_jobs = e.count("jobs", 0, 1).map(|j| (j > 0).then_some(j))?;
    let jobs = overrides.jobs.or(file_jobs);
    if jobs == Some(0) {
        return Err(Entries::error("jobs", Origin::Flag, "must be at least 1"));
    }

    let defaults = ExperimentSpec::default();
    let replications = e.count("replications", defaults.replications, 1)?;
    let topology = match e.string("topology")? {
        None => Topology::default(),
        Some((s, origin)) => match s.as_str() {
            "fresh" => Topology::Fresh,
            "quenched" => Topology::Quenched,
            _ => return Err(Entries::error("topology", origin, "expected `fresh` or `quenched`")),
        },
    };

    let nd = NetworkSpec::default();
    let n = e.count("network.n", nd.n, 1)?;
    let ws_k_origin = e.origin("network.ws_k");
    let network = NetworkSpec {
        n,
        ba_m: e.count("network.ba_m", nd.ba_m, 1)?,
        ws_k: e.count("network.ws_k", nd.ws_k, 2)?,
        ws_p: e.rate("network.ws_p", nd.ws_p)?,
    };
    if network.ws_k % 2 == 1 {
        return Err(Entries::error("network.ws_k", ws_k_origin, "must be even"));
    }
    let awareness_origin = e.origin("network.awareness_edges");
    let contact_origin = e.origin("network.contact_edges");
    let inputs = InputGraphs {
        awareness: e.string("network.awareness_edges")?.map(|(s, _)| PathBuf::from(s)),
        contact: e.string("network.contact_edges")?.map(|(s, _)| PathBuf::from(s)),
    };
    if inputs.awareness.is_some() != inputs.contact.is_some() {
        let (key, origin) = if inputs.awareness.is_some() {
            ("network.awareness_edges", awareness_origin)
        } else {
            ("network.contact_edges", contact_origin)
        };
        return Err(Entries::error(key, origin, "awareness_edges and contact_edges must be given together"));
    }

    let dd = DynamicsParams::default();
    let fraction_origin = e.origin("dynamics.initial_infected_fraction");
    let dynamics = DynamicsParams {
        lambda: e.rate("dynamics.lambda", dd.lambda)?,
        delta: e.rate("dynamics.delta", dd.delta)?,
        beta_u: e.rate("dynamics.beta_u", dd.beta_u)?,
        gamma: e.rate("dynamics.gamma", dd.gamma)?,
        mu: e.rate("dynamics.mu", dd.mu)?,
        initial_infected_fraction: e.rate("dynamics.initial_infected_fraction", dd.initial_infected_fraction)?,
        max_steps: e.count("dynamics.max_steps", dd.max_steps, 1)?,
        tail_window: e.count("dynamics.tail_window", dd.tail_window, 0)?,
    };
    if dynamics.initial_infected_fraction == 0.0 {
        return Err(Entries::error("dynamics.initial_infected_fraction", fraction_origin, "must be positive"));
    }

    let strategy = match e.string("omega.strategy")? {
        None => defaults.omega.strategy,
        Some((s, origin)) => s.parse().map_err(|m: muxepi::Error| Entries::error("omega.strategy", origin, m.to_string()))?,
    };
    let count = e.integer("omega.count")?;
    let fraction = e.take("omega.fraction");
    let size = match (count, fraction) {
        (Some(_), Some((_, origin))) => {
            return Err(Entries::error("omega.fraction", origin, "set either omega.count or omega.fraction, not both"))
        }
        (Some((c, origin)), None) => {
            if c as usize > n {
                return Err(Entries::error("omega.count", origin, format!("count {c} exceeds N={n}")));
            }
            OmegaSize::Count(c as usize)
        }
        (None, Some((v, origin))) => {
            let f = Entries::number("omega.fraction", &v, origin)?;
            if !(0.0..=1.0).contains(&f) {
                return Err(Entries::error("omega.fraction", origin, format!("value {f} outside [0, 1]")));
            }
            OmegaSize::Fraction(f)
        }
        (None, None) => match defaults.omega.size {
            OmegaSize::Count(c) => OmegaSize::Count(c.min(n)),
            other => other,
        },
    };

    let lambda_grid = e.grid("heatmap", "lambda", defaults.lambda_grid.len())?;
    let beta_grid = e.grid("heatmap", "beta", defaults.beta_grid.len())?;

    let timeseries = TimeseriesConfig {
        lambda: e.rate("timeseries.lambda", dynamics.lambda)?,
        betas: e.rates("timeseries.betas")?.map_or_else(|| vec![0.2, 0.5, 0.8], |(v, _)| v),
    };
    let sweep = SweepConfig {
        strategies: e
            .strategies("sweep.strategies")?
            .unwrap_or_else(|| vec![Strategy::DegreeTop, Strategy::Random, Strategy::DegreeBottom]),
        fractions: e
            .rates("sweep.fractions")?
            .map_or_else(|| vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5], |(v, _)| v),
    };
    let threshold = ThresholdConfig {
        gammas: e.rates("threshold.gammas")?.map_or_else(|| vec![dynamics.gamma], |(v, _)| v),
        tol: e.f64_in("threshold.tol", DEFAULT_TOL, f64::MIN_POSITIVE, 1.0)?,
        max_iter: e.count("threshold.max_iter", DEFAULT_MAX_ITER, 1)?,
    };
    let mmca = MmcaConfig {
        tol: e.f64_in("mmca.tol", DEFAULT_TOL, f64::MIN_POSITIVE, 1.0)?,
        max_steps: e.count("mmca.max_steps", DEFAULT_MAX_ITER, 1)?,
    };
    e.finish()?;

    let spec = ExperimentSpec {
        network,
        dynamics,
        lambda_grid,
        beta_grid,
        omega: OmegaSpec {
            strategy,
            size,
            seed: 0,
        },
        replications,
        master_seed,
        topology,
    };
    Ok(RunConfig {
        command,
        out_dir,
        master_seed,
        seed_source,
        jobs,
        spec,
        inputs,
        timeseries,
        sweep,
        threshold,
        mmca,
    })
}
