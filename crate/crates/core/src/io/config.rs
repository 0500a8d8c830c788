//! Scenario configuration in TOML:
//!
//! ```toml
//! [[scenario]]
//! id = "Setup1"
//! mu0 = 3.0
//! mu1 = 4.0
//! pi0 = 0.35
//! pi1 = 0.35
//! dist = "normal"      # or "scaled_squared_t"
//! atom = 0.0           # optional, default 0
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{ScenarioSpec, SurvivorDist};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenario: Vec<ScenarioEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioEntry {
    id: String,
    mu0: f64,
    mu1: f64,
    pi0: f64,
    pi1: f64,
    dist: SurvivorDist,
    #[serde(default)]
    atom: f64,
}

pub fn parse_scenarios(text: &str) -> Result<Vec<ScenarioSpec>> {
    let file: ConfigFile =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
    let mut seen = std::collections::HashSet::new();
    file.scenario
        .into_iter()
        .map(|e| {
            if !seen.insert(e.id.clone()) {
                return Err(Error::Config(format!("duplicate scenario id `{}`", e.id)));
            }
            let spec = ScenarioSpec {
                id: e.id,
                mu0: e.mu0,
                mu1: e.mu1,
                pi0: e.pi0,
                pi1: e.pi1,
                dist: e.dist,
                atom: e.atom,
            };
            spec.validate()
                .map_err(|err| Error::Config(format!("scenario `{}`: {}", spec.id, err)))?;
            Ok(spec)
        })
        .collect()
}

pub fn read_scenarios(path: &Path) -> Result<Vec<ScenarioSpec>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenarios(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
