//! Run configuration: defaults, then a key=value file, then flags.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::ValueEnum;
use logthh_core::field::is_prime;
use logthh_core::monoid::DegreeSet;

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Md,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "md" => Ok(Format::Md),
            _ => Err(CliError::usage(format!("unknown format {s:?}; expected json, csv or md"))),
        }
    }
}

/// Keys accepted in a config file; each mirrors the flag of the same name.
pub const CONFIG_KEYS: [&str; 8] = ["p", "degmax", "trunc", "bound", "weights", "scenario", "format", "out"];

/// Parses `key = value` lines; `#` starts a comment line.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !CONFIG_KEYS.contains(&k) {
            return Err(CliError::usage(format!("config line {}: unknown key {k:?}", n + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::usage(format!("config line {}: duplicate key {k:?}", n + 1)));
        }
    }
    Ok(out)
}

/// Flags shared by every subcommand; `None` means not given.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct CommonArgs {
    /// Prime for F_p coefficients.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Degree cap.
    #[arg(long, global = true)]
    pub degmax: Option<i64>,
    /// Truncation size for J.
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    /// Entry bound for bar windows.
    #[arg(long, global = true)]
    pub bound: Option<i64>,
    /// Weight window, e.g. `0..6`, `1,3`, `>=2`.
    #[arg(long, global = true)]
    pub weights: Option<String>,
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file merged beneath the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub p: Option<u32>,
    pub deg_max: Option<i64>,
    pub trunc: Option<usize>,
    pub bound: Option<i64>,
    pub weights: Option<DegreeSet>,
    pub scenario: Option<String>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::usage(format!("{key}: cannot parse {v:?}")))
}

impl RunConfig {
    /// Flags win over file entries; the result is validated.
    pub fn resolve(flags: &CommonArgs, file: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let get = |k: &str| file.get(k).map(String::as_str);
        let weights = match (&flags.weights, get("weights")) {
            (Some(s), _) => Some(s.as_str()),
            (None, s) => s,
        };
        let cfg = RunConfig {
            p: flags.p.map(Ok).or_else(|| get("p").map(|v| num("p", v))).transpose()?,
            deg_max: flags.degmax.map(Ok).or_else(|| get("degmax").map(|v| num("degmax", v))).transpose()?,
            trunc: flags.trunc.map(Ok).or_else(|| get("trunc").map(|v| num("trunc", v))).transpose()?,
            bound: flags.bound.map(Ok).or_else(|| get("bound").map(|v| num("bound", v))).transpose()?,
            weights: weights.map(DegreeSet::parse).transpose().map_err(|e| CliError::usage(e.to_string()))?,
            scenario: flags.scenario.clone().or_else(|| get("scenario").map(str::to_string)),
            format: match (flags.format, get("format")) {
                (Some(f), _) => f,
                (None, Some(s)) => Format::parse(s)?,
                (None, None) => Format::default(),
            },
            out: flags.out.clone().or_else(|| get("out").map(PathBuf::from)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(p) = self.p {
            if !is_prime(p as u64) {
                return Err(CliError::usage(format!("--p {p} is not prime")));
            }
        }
        if self.deg_max.is_some_and(|d| d < 0) {
            return Err(CliError::usage("--degmax must be non-negative".into()));
        }
        if self.trunc == Some(0) {
            return Err(CliError::usage("--trunc must be positive".into()));
        }
        if self.bound.is_some_and(|b| b < 1) {
            return Err(CliError::usage("--bound must be positive".into()));
        }
        Ok(())
    }

    pub fn p_or(&self, default: u32) -> u32 {
        self.p.unwrap_or(default)
    }

    /// Weights as an explicit ascending list.
    pub fn weight_list(&self, default: &str) -> Result<Vec<i64>, CliError> {
        let set = match &self.weights {
            Some(w) => w.clone(),
            None => DegreeSet::parse(default).map_err(|e| CliError::usage(e.to_string()))?,
        };
        match set {
            DegreeSet::Finite(v) => Ok(v.into_iter().collect()),
            other => Err(CliError::usage(format!("weights must be a finite set, got {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = parse_config("# run\np = 5\ndegmax=12\nformat = json\n").unwrap();
        let flags = CommonArgs { p: Some(3), ..Default::default() };
        let cfg = RunConfig::resolve(&flags, &file).unwrap();
        assert_eq!((cfg.p, cfg.deg_max, cfg.format), (Some(3), Some(12), Format::Json));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_config("p 3").is_err());
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("p=2\np=3").is_err());
        let file = parse_config("p = 4").unwrap();
        assert_eq!(RunConfig::resolve(&CommonArgs::default(), &file).unwrap_err().code, 2);
    }

    #[test]
    fn weights_must_be_finite() {
        let flags = CommonArgs { weights: Some(">=1".into()), ..Default::default() };
        let cfg = RunConfig::resolve(&flags, &BTreeMap::new()).unwrap();
        assert!(cfg.weight_list("0").is_err());
        assert_eq!(RunConfig::default().weight_list("0..3").unwrap(), vec![0, 1, 2, 3]);
    }
}
