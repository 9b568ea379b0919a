//! Flat `key=value` configuration and its merge with command-line flags.
//!
//! Keys are the long flag names (`pt-db = 60`, `pj-auto = true`, ...).
//! Flags that set the same quantity form a group; a group given on the
//! command line replaces the file's entries for that group, and two entries
//! of one group from the same source are contradictory.

use std::collections::BTreeMap;
use std::path::Path;

use fdjam_core::{from_db, SystemParams};

use crate::error::{usage, Result};
use crate::grid::GridSpec;

pub const SEED_ENV: &str = "FDJAM_SEED";

pub const DEFAULT_PT_DB: f64 = 60.0;
pub const DEFAULT_RHO: f64 = 0.01;
pub const DEFAULT_ALPHA: f64 = 2.0;
pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SAMPLES: usize = 100_000;

const GROUPS: &[&[&str]] = &[
    &["pt", "pt-db"],
    &["pj", "pj-db", "pj-auto", "pj-opt"],
    &["rho", "rho-db"],
    &["alpha"],
    &["delta"],
    &["seed"],
    &["samples"],
    &["threads"],
    &["x-min"],
    &["x-max"],
    &["y-min"],
    &["y-max"],
    &["step"],
];

fn is_known(key: &str) -> bool {
    GROUPS.iter().any(|g| g.contains(&key))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key=value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !is_known(k) {
                return Err(usage(format!("config line {}: unknown key `{k}`", n + 1)));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(usage(format!("config line {}: duplicate key `{k}`", n + 1)));
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JamChoice {
    Power(f64),
    /// `sqrt(P_T / rho)`.
    Auto,
    /// Per-cell optimum (colluding fields only).
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub p_t: f64,
    pub jam: JamChoice,
    pub rho: f64,
    pub alpha: f64,
    pub delta: f64,
    pub seed: u64,
    pub samples: usize,
    pub threads: Option<usize>,
    pub grid: GridSpec,
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| usage(format!("`{key}`: cannot parse `{v}`")))
}

fn parse_flag(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(usage(format!("`{key}`: expected true or false, got `{v}`"))),
    }
}

impl Settings {
    /// Merges flags over the file group by group; `env_seed` is used only
    /// when neither source sets a seed.
    pub fn resolve(
        cli: &BTreeMap<String, String>,
        file: Option<&ConfigFile>,
        env_seed: Option<&str>,
    ) -> Result<Settings> {
        let mut chosen: BTreeMap<&str, String> = BTreeMap::new();
        for group in GROUPS {
            let from_cli: Vec<(&str, &String)> =
                group.iter().filter_map(|k| cli.get(*k).map(|v| (*k, v))).collect();
            let picked: Vec<(&str, String)> = if !from_cli.is_empty() {
                from_cli.into_iter().map(|(k, v)| (k, v.clone())).collect()
            } else if let Some(f) = file {
                group.iter().filter_map(|k| f.get(k).map(|v| (*k, v.to_string()))).collect()
            } else {
                Vec::new()
            };
            // A boolean jamming key set to false selects nothing.
            let mut active = Vec::new();
            for (k, v) in picked {
                if (k == "pj-auto" || k == "pj-opt") && !parse_flag(k, &v)? {
                    continue;
                }
                active.push((k, v));
            }
            if active.len() > 1 {
                let names: Vec<String> = active.iter().map(|(k, _)| format!("--{k}")).collect();
                return Err(usage(format!("contradictory options: {}", names.join(" and "))));
            }
            if let Some((k, v)) = active.pop() {
                chosen.insert(k, v);
            }
        }
        let num = |k: &str| chosen.get(k).map(|v| parse::<f64>(k, v)).transpose();

        let p_t = match (num("pt")?, num("pt-db")?) {
            (Some(v), _) => v,
            (_, Some(db)) => from_db(db),
            _ => from_db(DEFAULT_PT_DB),
        };
        let jam = if let Some(v) = num("pj")? {
            JamChoice::Power(v)
        } else if let Some(db) = num("pj-db")? {
            JamChoice::Power(from_db(db))
        } else if chosen.contains_key("pj-opt") {
            JamChoice::Optimal
        } else {
            JamChoice::Auto
        };
        let rho = match (num("rho")?, num("rho-db")?) {
            (Some(v), _) => v,
            (_, Some(db)) => from_db(db),
            _ => DEFAULT_RHO,
        };
        let seed = match chosen.get("seed") {
            Some(v) => parse("seed", v)?,
            None => match env_seed {
                Some(v) => parse(SEED_ENV, v)?,
                None => DEFAULT_SEED,
            },
        };
        let samples = match chosen.get("samples") {
            Some(v) => parse("samples", v)?,
            None => DEFAULT_SAMPLES,
        };
        if samples == 0 {
            return Err(usage("`samples` must be > 0"));
        }
        let threads = chosen.get("threads").map(|v| parse::<usize>("threads", v)).transpose()?;
        if threads == Some(0) {
            return Err(usage("`threads` must be > 0"));
        }
        let d = GridSpec::default();
        let grid = GridSpec::new(
            num("x-min")?.unwrap_or(d.x_min),
            num("x-max")?.unwrap_or(d.x_max),
            num("y-min")?.unwrap_or(d.y_min),
            num("y-max")?.unwrap_or(d.y_max),
            num("step")?.unwrap_or(d.step),
        )?;
        let settings = Settings {
            p_t,
            jam,
            rho,
            alpha: num("alpha")?.unwrap_or(DEFAULT_ALPHA),
            delta: num("delta")?.unwrap_or(DEFAULT_DELTA),
            seed,
            samples,
            threads,
            grid,
        };
        settings.params()?;
        Ok(settings)
    }

    /// System parameters; under [`JamChoice::Optimal`] `p_j` holds the
    /// automatic power as a placeholder.
    pub fn params(&self) -> Result<SystemParams> {
        let p_j = match self.jam {
            JamChoice::Power(v) => v,
            JamChoice::Auto | JamChoice::Optimal => (self.p_t / self.rho).sqrt(),
        };
        Ok(SystemParams::new(self.p_t, p_j, self.rho, self.alpha, self.delta)?)
    }

    /// Like [`Settings::params`] but rejects `--pj-opt`.
    pub fn fixed_params(&self, context: &str) -> Result<SystemParams> {
        if self.jam == JamChoice::Optimal {
            return Err(usage(format!("--pj-opt is not available for {context}")));
        }
        self.params()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn defaults() {
        let s = Settings::resolve(&cli(&[]), None, None).unwrap();
        assert_eq!(s.p_t, 1e6);
        assert_eq!(s.jam, JamChoice::Auto);
        assert_eq!((s.rho, s.alpha, s.delta, s.seed), (0.01, 2.0, 0.1, 1));
        assert_eq!(s.grid, GridSpec::default());
        assert_eq!(s.params().unwrap().p_j, 1e4);
    }

    #[test]
    fn flags_override_file_per_group() {
        let file = ConfigFile::parse("# run\npt = 100\nrho-db = -10\nseed=7\n\npj-auto = true\n").unwrap();
        let s = Settings::resolve(&cli(&[("pt-db", "30"), ("pj", "5")]), Some(&file), Some("99")).unwrap();
        assert_eq!(s.p_t, 1000.0);
        assert_eq!(s.jam, JamChoice::Power(5.0));
        assert!((s.rho - 0.1).abs() < 1e-15);
        assert_eq!(s.seed, 7);
    }

    #[test]
    fn env_seed_is_the_fallback() {
        let s = Settings::resolve(&cli(&[]), None, Some("42")).unwrap();
        assert_eq!(s.seed, 42);
        let s = Settings::resolve(&cli(&[("seed", "3")]), None, Some("42")).unwrap();
        assert_eq!(s.seed, 3);
    }

    #[test]
    fn contradictions_are_usage_errors() {
        assert!(Settings::resolve(&cli(&[("pj", "1"), ("pj-auto", "true")]), None, None).is_err());
        assert!(Settings::resolve(&cli(&[("rho", "0.1"), ("rho-db", "-10")]), None, None).is_err());
        let file = ConfigFile::parse("pj = 3\npj-db = 4\n").unwrap();
        assert!(Settings::resolve(&cli(&[]), Some(&file), None).is_err());
        assert!(Settings::resolve(&cli(&[("pj-db", "4")]), Some(&file), None).is_ok());
    }

    #[test]
    fn malformed_files_rejected() {
        assert!(ConfigFile::parse("pt 100").is_err());
        assert!(ConfigFile::parse("power = 1").is_err());
        assert!(ConfigFile::parse("pt = 1\npt = 2").is_err());
        assert!(Settings::resolve(&cli(&[("alpha", "two")]), None, None).is_err());
        assert!(Settings::resolve(&cli(&[("step", "0")]), None, None).is_err());
    }
}
