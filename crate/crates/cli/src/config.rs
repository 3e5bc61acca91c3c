//! Settings shared by the search-like commands. Command-line flags override a
//! `key=value` file, which overrides the defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::UsageError;

pub const DEFAULT_BOUND: u64 = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub bound: u64,
    pub workers: usize,
    pub memory_budget: Option<u64>,
    pub checkpoint: Option<PathBuf>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            bound: DEFAULT_BOUND,
            workers: 1,
            memory_budget: None,
            checkpoint: None,
            format: Format::Json,
            output: None,
        }
    }
}

/// Values given on the command line; `None` defers to the file or default.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Largest doubled area `s` to enumerate.
    #[arg(long)]
    pub bound: Option<u64>,
    /// Worker threads for frontier expansion.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Frontier size limit in bytes (suffixes K, M, G accepted).
    #[arg(long, value_parser = parse_bytes)]
    pub memory_budget: Option<u64>,
    /// Directory for per-component checkpoint files.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn parse_bytes(text: &str) -> Result<u64, String> {
    let t = text.trim();
    let (digits, scale) = match t.char_indices().last() {
        Some((i, 'K' | 'k')) => (&t[..i], 1u64 << 10),
        Some((i, 'M' | 'm')) => (&t[..i], 1 << 20),
        Some((i, 'G' | 'g')) => (&t[..i], 1 << 30),
        _ => (t, 1),
    };
    digits
        .parse::<u64>()
        .ok()
        .and_then(|n| n.checked_mul(scale))
        .ok_or_else(|| format!("invalid byte count `{text}`"))
}

fn parse_file(text: &str, origin: &Path) -> Result<BTreeMap<String, String>, UsageError> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            UsageError(format!("{}:{}: expected key=value", origin.display(), n + 1))
        })?;
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

impl Config {
    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Config, UsageError> {
        let mut cfg = Config::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
            for (k, v) in parse_file(&text, path)? {
                let bad = |e: String| UsageError(format!("config key {k}: {e}"));
                match k.as_str() {
                    "bound" => cfg.bound = v.parse().map_err(|e| bad(format!("{e}")))?,
                    "workers" => cfg.workers = v.parse().map_err(|e| bad(format!("{e}")))?,
                    "memory_budget" => cfg.memory_budget = Some(parse_bytes(&v).map_err(bad)?),
                    "checkpoint" => cfg.checkpoint = Some(PathBuf::from(v)),
                    "format" => {
                        cfg.format = <Format as clap::ValueEnum>::from_str(&v, true).map_err(bad)?
                    }
                    "output" => cfg.output = Some(PathBuf::from(v)),
                    _ => return Err(UsageError(format!("unknown config key `{k}`"))),
                }
            }
        }
        if let Some(v) = flags.bound {
            cfg.bound = v;
        }
        if let Some(v) = flags.workers {
            cfg.workers = v;
        }
        if flags.memory_budget.is_some() {
            cfg.memory_budget = flags.memory_budget;
        }
        if flags.checkpoint.is_some() {
            cfg.checkpoint.clone_from(&flags.checkpoint);
        }
        if let Some(v) = flags.format {
            cfg.format = v;
        }
        if flags.output.is_some() {
            cfg.output.clone_from(&flags.output);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), UsageError> {
        if self.bound == 0 {
            return Err(UsageError("bound must be positive".into()));
        }
        if self.workers == 0 {
            return Err(UsageError("workers must be positive".into()));
        }
        if self.memory_budget == Some(0) {
            return Err(UsageError("memory budget must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bytes() {
        assert_eq!(parse_bytes("512").unwrap(), 512);
        assert_eq!(parse_bytes("2K").unwrap(), 2048);
        assert_eq!(parse_bytes("3m").unwrap(), 3 << 20);
        assert!(parse_bytes("G").is_err());
        assert!(parse_bytes("-1").is_err());
    }

    #[test]
    fn precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fleas.conf");
        std::fs::write(&path, "# comment\nbound = 900\nworkers=3\nformat=csv\n").unwrap();
        let flags = Overrides { bound: Some(100), ..Default::default() };
        let cfg = Config::resolve(Some(&path), &flags).unwrap();
        assert_eq!(cfg.bound, 100);
        assert_eq!(cfg.workers, 3);
        assert_eq!(cfg.format, Format::Csv);
        let cfg = Config::resolve(None, &Overrides::default()).unwrap();
        assert_eq!(cfg, Config::default());
    }

    #[test]
    fn rejects_bad_files_and_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.conf");
        std::fs::write(&path, "colour=blue\n").unwrap();
        assert!(Config::resolve(Some(&path), &Overrides::default()).is_err());
        std::fs::write(&path, "bound\n").unwrap();
        assert!(Config::resolve(Some(&path), &Overrides::default()).is_err());
        let zero = Overrides { bound: Some(0), ..Default::default() };
        assert!(Config::resolve(None, &zero).is_err());
    }
}
