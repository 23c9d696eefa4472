//! Flat `key = value` scenario files.
//!
//! ```text
//! # four-cell scenario
//! n_cells = 4
//! sir_points_db = -10, 0, 10
//! ```
//!
//! Blank lines and `#` comments are ignored. Keys are the fields of
//! [`ScenarioConfig`]; anything else is rejected.

use std::fmt;
use std::path::Path;

use ircgain::comp::ScenarioConfig;
use thiserror::Error;

pub const KEYS: [&str; 8] = [
    "n_cells",
    "ues_per_cell",
    "antennas_per_bs",
    "sigma2",
    "sir_points_db",
    "iterations",
    "seed",
    "aggregation",
];

/// Where a setting came from, for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    Line(usize),
    Override,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override => f.write_str("command-line override"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown key '{key}' at {origin}")]
    UnknownKey { key: String, origin: Origin },
    #[error("invalid value for '{key}' at {origin}: {reason}")]
    InvalidValue {
        key: String,
        origin: Origin,
        reason: String,
    },
    #[error("expected 'key = value' at {origin}, got '{text}'")]
    Syntax { origin: Origin, text: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Splits `key=value`, trimming both sides.
pub fn split_pair(text: &str, origin: Origin) -> Result<(String, String), ConfigError> {
    match text.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(ConfigError::Syntax {
            origin,
            text: text.to_string(),
        }),
    }
}

/// Parses config text into `(key, value, origin)` triples.
pub fn parse(text: &str) -> Result<Vec<(String, String, Origin)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let origin = Origin::Line(i + 1);
        let (k, v) = split_pair(line, origin.clone())?;
        out.push((k, v, origin));
    }
    Ok(out)
}

fn invalid(key: &str, origin: &Origin, reason: impl ToString) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        origin: origin.clone(),
        reason: reason.to_string(),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, origin: &Origin) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| invalid(key, origin, e))
}

/// Comma-separated list of dB values.
pub fn parse_sir_list(value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| format!("'{s}': {e}")))
        .collect()
}

/// Applies one setting to `cfg`.
pub fn apply(cfg: &mut ScenarioConfig, key: &str, value: &str, origin: &Origin) -> Result<(), ConfigError> {
    match key {
        "n_cells" => cfg.n_cells = parse_num(key, value, origin)?,
        "ues_per_cell" => cfg.ues_per_cell = parse_num(key, value, origin)?,
        "antennas_per_bs" => cfg.antennas_per_bs = parse_num(key, value, origin)?,
        "sigma2" => cfg.sigma2 = parse_num(key, value, origin)?,
        "iterations" => cfg.iterations = parse_num(key, value, origin)?,
        "seed" => cfg.seed = parse_num(key, value, origin)?,
        "sir_points_db" => {
            cfg.sir_points_db = parse_sir_list(value).map_err(|e| invalid(key, origin, e))?
        }
        "aggregation" => cfg.aggregation = value.parse().map_err(|e: String| invalid(key, origin, e))?,
        _ => {
            return Err(ConfigError::UnknownKey {
                key: key.to_string(),
                origin: origin.clone(),
            })
        }
    }
    Ok(())
}

pub fn apply_text(cfg: &mut ScenarioConfig, text: &str) -> Result<(), ConfigError> {
    for (k, v, origin) in parse(text)? {
        apply(cfg, &k, &v, &origin)?;
    }
    Ok(())
}

pub fn apply_file(cfg: &mut ScenarioConfig, path: &Path) -> Result<(), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    apply_text(cfg, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ircgain::comp::Aggregation;

    #[test]
    fn parses_all_keys() {
        let text = "\
# comment line
n_cells = 2
ues_per_cell=3   # trailing comment
antennas_per_bs = 8
sigma2 = 0.5
sir_points_db = -3, 0 ,7.5
iterations = 10
seed = 99
aggregation = per-iteration
";
        let mut cfg = ScenarioConfig::default();
        apply_text(&mut cfg, text).unwrap();
        assert_eq!(cfg.n_cells, 2);
        assert_eq!(cfg.ues_per_cell, 3);
        assert_eq!(cfg.antennas_per_bs, 8);
        assert_eq!(cfg.sigma2, 0.5);
        assert_eq!(cfg.sir_points_db, vec![-3.0, 0.0, 7.5]);
        assert_eq!(cfg.iterations, 10);
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.aggregation, Aggregation::PerIteration);
    }

    #[test]
    fn unknown_key_is_named_with_line() {
        let mut cfg = ScenarioConfig::default();
        let err = apply_text(&mut cfg, "n_cells = 2\n\nnum_cells = 3\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::UnknownKey {
                key: "num_cells".into(),
                origin: Origin::Line(3)
            }
        );
        assert_eq!(err.to_string(), "unknown key 'num_cells' at line 3");
    }

    #[test]
    fn bad_values_and_syntax() {
        let mut cfg = ScenarioConfig::default();
        let err = apply_text(&mut cfg, "iterations = many").unwrap_err();
        assert!(matches!(err, ConfigError::InvalidValue { ref key, origin: Origin::Line(1), .. } if key == "iterations"));
        let err = apply_text(&mut cfg, "sir_points_db = 1, x").unwrap_err();
        assert!(err.to_string().contains("sir_points_db"));
        let err = apply_text(&mut cfg, "just words").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { origin: Origin::Line(1), .. }));
        let err = apply_text(&mut cfg, "aggregation = mean").unwrap_err();
        assert!(err.to_string().contains("aggregation"));
    }

    #[test]
    fn override_origin() {
        let (k, v) = split_pair("seed=7", Origin::Override).unwrap();
        let mut cfg = ScenarioConfig::default();
        apply(&mut cfg, &k, &v, &Origin::Override).unwrap();
        assert_eq!(cfg.seed, 7);
        let err = apply(&mut cfg, "colour", "red", &Origin::Override).unwrap_err();
        assert_eq!(err.to_string(), "unknown key 'colour' at command-line override");
    }
}
