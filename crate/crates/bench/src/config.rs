//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # forest run on a path
//! algorithm = forest
//! graph = path(1000)
//! delta = 0.5
//! seeds = 0..3
//! enforce_quotas = true
//! output = out/path
//! ```
//!
//! `k_budget` is optional and `profile` (`full` or `quick`) only affects
//! `verify`. Seeds are a comma list (`1,5,9`) or a half-open range (`0..20`).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ampc_core::graph::GraphFamily;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("bad value for `{key}`: {msg}")]
    Value { key: &'static str, msg: String },
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Forest,
    General,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Forest => "forest",
            Algorithm::General => "general",
        })
    }
}

/// Trial counts of the verification suite.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Full,
    Quick,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    #[serde(serialize_with = "as_text")]
    pub graph: GraphFamily,
    pub delta: f64,
    pub k_budget: Option<u32>,
    pub seeds: Vec<u64>,
    pub enforce_quotas: bool,
    pub output: PathBuf,
    pub profile: Profile,
}

fn as_text<S: serde::Serializer>(g: &GraphFamily, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(g)
}

const KEYS: [&str; 8] = [
    "algorithm",
    "graph",
    "delta",
    "k_budget",
    "seeds",
    "enforce_quotas",
    "output",
    "profile",
];

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        text.parse()
    }
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
        let b: u64 = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
        (a..b).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| format!("bad seed `{x}`")))
            .collect::<Result<_, _>>()?
    };
    if seeds.is_empty() {
        return Err("no seeds".into());
    }
    Ok(seeds)
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut values: Vec<(&'static str, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let k = k.trim();
            let key = *KEYS
                .iter()
                .find(|&&known| known == k)
                .ok_or_else(|| ConfigError::UnknownKey {
                    line: i + 1,
                    key: k.to_string(),
                })?;
            if values.iter().any(|(seen, _)| *seen == key) {
                return Err(ConfigError::Duplicate {
                    line: i + 1,
                    key: key.to_string(),
                });
            }
            values.push((key, v.trim().to_string()));
        }
        let get = |key: &'static str| values.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str());
        let need = |key: &'static str| get(key).ok_or(ConfigError::Missing(key));
        let bad = |key: &'static str, msg: String| ConfigError::Value { key, msg };

        let algorithm = match need("algorithm")? {
            "forest" => Algorithm::Forest,
            "general" => Algorithm::General,
            other => return Err(bad("algorithm", format!("`{other}` is neither forest nor general"))),
        };
        let graph: GraphFamily = need("graph")?.parse().map_err(|e| bad("graph", format!("{e}")))?;
        let delta: f64 = need("delta")?
            .parse()
            .map_err(|_| bad("delta", "not a number".into()))?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(bad("delta", format!("{delta} outside (0,1)")));
        }
        let k_budget = get("k_budget")
            .map(|v| v.parse::<u32>().map_err(|_| bad("k_budget", format!("`{v}`"))))
            .transpose()?;
        let seeds = parse_seeds(need("seeds")?).map_err(|m| bad("seeds", m))?;
        let enforce_quotas = match get("enforce_quotas").unwrap_or("true") {
            "true" => true,
            "false" => false,
            other => return Err(bad("enforce_quotas", format!("`{other}`"))),
        };
        let profile = match get("profile").unwrap_or("full") {
            "full" => Profile::Full,
            "quick" => Profile::Quick,
            other => return Err(bad("profile", format!("`{other}`"))),
        };
        Ok(ExperimentConfig {
            algorithm,
            graph,
            delta,
            k_budget,
            seeds,
            enforce_quotas,
            output: PathBuf::from(need("output")?),
            profile,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "algorithm = forest\ngraph = path(1000)  # a path\ndelta = 0.5\nseeds = 0..3\noutput = out\n";

    #[test]
    fn parses_sample() {
        let c: ExperimentConfig = SAMPLE.parse().unwrap();
        assert_eq!(c.algorithm, Algorithm::Forest);
        assert_eq!(c.graph, GraphFamily::Path { n: 1000 });
        assert_eq!(c.seeds, vec![0, 1, 2]);
        assert!(c.enforce_quotas);
        assert_eq!(c.k_budget, None);
        assert_eq!(c.profile, Profile::Full);
    }

    #[test]
    fn rejects_bad_input() {
        let with = |extra: &str| format!("{SAMPLE}{extra}\n").parse::<ExperimentConfig>();
        assert!(matches!(
            SAMPLE.replace("0.5", "1.5").parse::<ExperimentConfig>(),
            Err(ConfigError::Value { key: "delta", .. })
        ));
        assert!(matches!(
            with("colour = red"),
            Err(ConfigError::UnknownKey { line: 6, .. })
        ));
        assert!(matches!(with("delta = 0.4"), Err(ConfigError::Duplicate { .. })));
        assert!(matches!(with("no equals sign"), Err(ConfigError::Syntax { line: 6 })));
        assert!(matches!(
            "graph = path(3)".parse::<ExperimentConfig>(),
            Err(ConfigError::Missing("algorithm"))
        ));
        assert!(SAMPLE.replace("0..3", "4..4").parse::<ExperimentConfig>().is_err());
    }

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("3, 9,1").unwrap(), vec![3, 9, 1]);
        assert!(parse_seeds("a").is_err());
    }
}
