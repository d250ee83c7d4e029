//! `key = value` run configuration files. Flags always override file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

/// Keys accepted in a config file (flag names without the leading dashes).
pub const KEYS: &[&str] = &[
    "netlist",
    "timing",
    "aging-factor",
    "delay-target",
    "opt-vectors",
    "eval-vectors",
    "seed",
    "population",
    "generations",
    "mutation",
    "mutation-max",
    "crossover",
    "elite",
    "tournament",
    "diversity-threshold",
    "init-base",
    "init-critical",
    "eligibility",
    "out-dir",
    "output-bus",
    "metric",
    "threads",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`, got `{line}`", i + 1);
            };
            let key = k.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key `{}`", i + 1, k.trim());
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                bail!("line {}: `{key}` set twice", i + 1);
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config file {}", path.display()))
    }

    /// The flag value if given, else the parsed file value, else `None`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key `{key}`: invalid value `{v}`: {e}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let c = ConfigFile::parse("# run\npopulation = 32\nseed=7\ndiversity_threshold = 0.1\n").unwrap();
        assert_eq!(c.pick::<usize>(None, "population").unwrap(), Some(32));
        assert_eq!(c.pick(Some(16usize), "population").unwrap(), Some(16));
        assert_eq!(c.pick::<f64>(None, "diversity-threshold").unwrap(), Some(0.1));
        assert_eq!(c.pick::<u64>(None, "generations").unwrap(), None);
        assert!(c.pick::<usize>(None, "seed").is_ok());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(ConfigFile::parse("popsize = 3").is_err());
        assert!(ConfigFile::parse("seed 3").is_err());
        assert!(ConfigFile::parse("seed = 1\nseed = 2").is_err());
        let c = ConfigFile::parse("seed = x").unwrap();
        assert!(c.pick::<u64>(None, "seed").is_err());
    }
}
