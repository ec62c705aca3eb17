//! Flat key-value run configuration.
//!
//! One keyspace serves every subcommand: a config file supplies
//! baseline values, `PROXIKIT_OUT_DIR` may override the output
//! directory, and command-line flags override both. Unknown keys are
//! rejected so typos fail loudly instead of silently using a default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use proxikit::aggregate::Symmetrization;
use proxikit::io::parse_timestamp;
use proxikit::model::ObservationWindow;
use proxikit::preprocess::{parse_pipeline, Strategy, StrategyKind};
use proxikit::validity::default_grid;

pub const ENV_OUT_DIR: &str = "PROXIKIT_OUT_DIR";

/// Every key a config file or `--set` may use.
pub const KNOWN_KEYS: &[&str] = &[
    "input",
    "truth",
    "nominations",
    "scenario",
    "window_start",
    "window_end",
    "pipeline",
    "sweep_kind",
    "sweep_values",
    "out_dir",
    "seed",
    "permissive",
    "symmetrize",
    "sim_badges",
    "sim_slot_s",
    "sim_max_group",
    "sim_rate_per_min",
    "sim_gap_mean_s",
    "sim_gap_max_s",
    "sim_quantum_s",
];

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    /// Reads a config file: one `key = value` per line, `#` starts a
    /// comment line, blank lines are ignored.
    pub fn load_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg = Config::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), i + 1))?;
            cfg.set(key.trim(), value.trim())
                .with_context(|| format!("{}:{}", path.display(), i + 1))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            bail!("unknown config key {key:?}");
        }
        self.values.insert(key.to_owned(), value.to_owned());
        Ok(())
    }

    /// The output directory is the only setting the environment may
    /// supply.
    pub fn apply_env(&mut self) {
        if let Ok(dir) = std::env::var(ENV_OUT_DIR) {
            if !dir.is_empty() {
                self.values.insert("out_dir".to_owned(), dir);
            }
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| anyhow!("config key {key:?} is required for this command"))
    }

    pub fn path(&self, key: &str) -> Result<PathBuf> {
        Ok(PathBuf::from(self.require(key)?))
    }

    pub fn opt_path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.get("out_dir").unwrap_or("out").into()
    }

    pub fn seed(&self) -> Result<u64> {
        self.parse_or("seed", 0)
    }

    pub fn permissive(&self) -> Result<bool> {
        match self.get("permissive") {
            None => Ok(false),
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") => Ok(false),
            Some(other) => bail!("permissive must be true or false, not {other:?}"),
        }
    }

    /// Window bounds accept epoch seconds or ISO date-times; bare clock
    /// times are only meaningful once a window exists, so they are not
    /// accepted here.
    pub fn window(&self) -> Result<ObservationWindow> {
        let parse = |key| -> Result<i64> {
            let text = self.require(key)?;
            parse_timestamp(text, None)
                .ok_or_else(|| anyhow!("{key}: cannot parse timestamp {text:?}"))
        };
        Ok(ObservationWindow::new(
            parse("window_start")?,
            parse("window_end")?,
        )?)
    }

    /// Missing pipeline means no repairs; `pipeline=default` selects the
    /// built-in interpolate/delete/close pipeline.
    pub fn pipeline(&self) -> Result<Vec<Strategy>> {
        match self.get("pipeline") {
            None => Ok(Vec::new()),
            Some(spec) => Ok(parse_pipeline(spec)?),
        }
    }

    pub fn sweep_kind(&self) -> Result<StrategyKind> {
        Ok(self.require("sweep_kind")?.parse()?)
    }

    /// Either an explicit comma list (`5,10,15`) or an inclusive range
    /// with step (`5:120:5`); missing means the kind's default grid.
    pub fn sweep_values(&self, kind: StrategyKind) -> Result<Vec<u64>> {
        let Some(text) = self.get("sweep_values") else {
            return Ok(default_grid(kind));
        };
        let bad = |_| anyhow!("sweep_values: cannot parse {text:?}");
        if let Some((start, rest)) = text.split_once(':') {
            let (end, step) = rest
                .split_once(':')
                .ok_or_else(|| anyhow!("sweep_values range needs start:end:step"))?;
            let (start, end, step) = (
                start.trim().parse::<u64>().map_err(bad)?,
                end.trim().parse::<u64>().map_err(bad)?,
                step.trim().parse::<u64>().map_err(bad)?,
            );
            if step == 0 {
                bail!("sweep_values step must be positive");
            }
            return Ok((start..=end).step_by(step as usize).collect());
        }
        text.split(',')
            .map(|v| v.trim().parse::<u64>().map_err(bad))
            .collect()
    }

    pub fn symmetrize(&self) -> Result<Symmetrization> {
        match self.get("symmetrize").unwrap_or("none") {
            "none" => Ok(Symmetrization::None),
            "weak" => Ok(Symmetrization::Weak),
            "strong" => Ok(Symmetrization::Strong),
            other => bail!("symmetrize must be none, weak, or strong, not {other:?}"),
        }
    }

    pub fn parse_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(text) => text
                .parse()
                .map_err(|_| anyhow!("{key}: cannot parse {text:?}")),
        }
    }

    /// Everything the run resolved, for the provenance artifact: the
    /// merged key-values plus any defaults the command materialized.
    pub fn resolved(&self, command: &str, extra: &[(&str, String)]) -> Vec<(String, String)> {
        let mut pairs: BTreeMap<String, String> = self.values.clone();
        pairs.insert("command".to_owned(), command.to_owned());
        pairs.insert(
            "out_dir".to_owned(),
            self.out_dir().to_string_lossy().into_owned(),
        );
        for (k, v) in extra {
            pairs.insert((*k).to_owned(), v.clone());
        }
        pairs.into_iter().collect()
    }
}
