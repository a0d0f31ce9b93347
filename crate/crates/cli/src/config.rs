//! Run configuration: flat `key = value` lines grouped into `[system]`,
//! `[domain]`, `[mesh]` and `[run]` sections, or the `config` object of a
//! previously written `report.json`.
//!
//! ```text
//! [system]
//! name = singular_hopf
//! branch = plus
//! mu = 0.01
//! A = -0.05
//! B = 0.001
//! C = 0.1
//!
//! [domain]
//! y_min = 0.01
//! y_max = 0.2
//! z_min = -0.01
//! z_max = 0.01
//!
//! [mesh]
//! d = 25
//!
//! [run]
//! epsilon = 1e-3
//! ```
//!
//! Lowercase `a, b, c` are the original parameters; uppercase `A, B, C` are
//! the rescaled ones, held fixed as ε varies. Keys may also be written in
//! dotted form (`run.epsilon = ...`) outside any section.

use std::collections::BTreeMap;
use std::path::Path;

use ini::Ini;
use serde::{Deserialize, Serialize};
use slowman::diagnostics::SweepConfig;
use slowman::prelude::*;
use slowman::system::HopfParameters;

pub const SYSTEM_NAME: &str = "singular_hopf";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSection {
    pub name: String,
    pub branch: Branch,
    pub parameters: HopfParameters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSection {
    pub d: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    pub epsilon: Vec<f64>,
    #[serde(rename = "N0")]
    pub n0: f64,
    pub update_factor: f64,
    pub tighten: bool,
    pub max_passes: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            epsilon: Vec::new(),
            n0: 64.0,
            update_factor: 0.125,
            tighten: true,
            max_passes: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub system: SystemSection,
    pub domain: Domain2,
    pub mesh: MeshSection,
    pub run: RunSection,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| config_err(format!("{key}: expected a finite number, got {v:?}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(config_err(format!("{key}: expected true or false, got {v:?}"))),
    }
}

fn parse_int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| config_err(format!("{key}: expected a non-negative integer, got {v:?}")))
}

/// Comma- or whitespace-separated numbers; brackets around the list are allowed.
fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

fn parse_branch(v: &str) -> Result<Branch> {
    match v.trim().to_ascii_lowercase().as_str() {
        "plus" | "+" => Ok(Branch::Plus),
        "minus" | "-" => Ok(Branch::Minus),
        _ => Err(config_err(format!("system.branch: expected plus or minus, got {v:?}"))),
    }
}

/// Collects `section.key -> value`, rejecting duplicates.
fn flatten(ini: &Ini) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (section, props) in ini.iter() {
        for (key, value) in props.iter() {
            let full = match section {
                Some(s) => format!("{}.{}", s.trim(), key.trim()),
                None => key.trim().to_string(),
            };
            if out.insert(full.clone(), value.trim().to_string()).is_some() {
                return Err(config_err(format!("duplicate key {full}")));
            }
        }
    }
    Ok(out)
}

impl RunConfig {
    pub fn from_ini(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut kv = flatten(&ini)?;
        let mut take = |k: &str| kv.remove(k);
        let required = |k: &str, v: Option<String>| v.ok_or_else(|| config_err(format!("missing key {k}")));

        let name = take("system.name").unwrap_or_else(|| SYSTEM_NAME.to_string());
        let branch = take("system.branch")
            .map(|v| parse_branch(&v))
            .transpose()?
            .unwrap_or(Branch::Plus);
        let mu = parse_f64("system.mu", &required("system.mu", take("system.mu"))?)?;
        let original: Vec<Option<String>> = ["system.a", "system.b", "system.c"].iter().map(|k| take(k)).collect();
        let rescaled: Vec<Option<String>> = ["system.A", "system.B", "system.C"].iter().map(|k| take(k)).collect();
        let all = |vals: &[Option<String>], keys: [&str; 3]| -> Result<[f64; 3]> {
            let mut out = [0.0; 3];
            for ((slot, v), k) in out.iter_mut().zip(vals).zip(keys) {
                *slot = parse_f64(k, v.as_deref().ok_or_else(|| config_err(format!("missing key {k}")))?)?;
            }
            Ok(out)
        };
        let any = |vals: &[Option<String>]| vals.iter().any(Option::is_some);
        let parameters = match (any(&original), any(&rescaled)) {
            (true, true) => return Err(config_err("give either original a, b, c or rescaled A, B, C, not both")),
            (true, false) => {
                let [a, b, c] = all(&original, ["system.a", "system.b", "system.c"])?;
                HopfParameters::Original { mu, a, b, c }
            }
            (false, true) => {
                let [a, b, c] = all(&rescaled, ["system.A", "system.B", "system.C"])?;
                HopfParameters::Rescaled(RescaledParams { mu, a, b, c })
            }
            (false, false) => return Err(config_err("missing system parameters a, b, c or A, B, C")),
        };

        let mut bound = |k: &str| -> Result<f64> { parse_f64(k, &required(k, take(k))?) };
        let (y_min, y_max) = (bound("domain.y_min")?, bound("domain.y_max")?);
        let (z_min, z_max) = (bound("domain.z_min")?, bound("domain.z_max")?);
        let domain = Domain2::new(y_min, y_max, z_min, z_max)?;

        let d = parse_int("mesh.d", &required("mesh.d", take("mesh.d"))?)?;

        let mut run = RunSection::default();
        if let Some(v) = take("run.epsilon") {
            run.epsilon = parse_list("run.epsilon", &v)?;
        }
        if let Some(v) = take("run.N0") {
            run.n0 = parse_f64("run.N0", &v)?;
        }
        if let Some(v) = take("run.update_factor") {
            run.update_factor = parse_f64("run.update_factor", &v)?;
        }
        if let Some(v) = take("run.tighten") {
            run.tighten = parse_bool("run.tighten", &v)?;
        }
        if let Some(v) = take("run.max_passes") {
            run.max_passes = parse_int("run.max_passes", &v)?;
        }

        if let Some(k) = kv.keys().next() {
            return Err(config_err(format!("unknown key {k}")));
        }
        let config = RunConfig {
            system: SystemSection {
                name,
                branch,
                parameters,
            },
            domain,
            mesh: MeshSection { d },
            run,
        };
        config.validate()?;
        Ok(config)
    }

    /// The `config` object of a report written by `enclose`.
    pub fn from_report(text: &str) -> Result<Self> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("report: {e}")))?;
        let config = value
            .get_mut("config")
            .map(serde_json::Value::take)
            .ok_or_else(|| Error::Parse("report has no config object".into()))?;
        let config: RunConfig =
            serde_json::from_value(config).map_err(|e| Error::Parse(format!("report config: {e}")))?;
        Domain2::new(
            config.domain.y_min,
            config.domain.y_max,
            config.domain.z_min,
            config.domain.z_max,
        )?;
        config.validate()?;
        Ok(config)
    }

    /// Reads either format, telling them apart by a leading `{`.
    pub fn from_text(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_report(text)
        } else {
            Self::from_ini(text)
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.system.name != SYSTEM_NAME {
            return Err(config_err(format!(
                "unsupported system {:?}; only {SYSTEM_NAME} is available",
                self.system.name
            )));
        }
        if self.mesh.d == 0 {
            return Err(config_err("mesh.d must be at least 1"));
        }
        if let Some(e) = self.run.epsilon.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(config_err(format!("run.epsilon entries must be positive, got {e}")));
        }
        if !(self.run.n0.is_finite() && self.run.n0 > 0.0) {
            return Err(config_err(format!("run.N0 must be positive, got {}", self.run.n0)));
        }
        if !(self.run.update_factor > 0.0 && self.run.update_factor < 0.5) {
            return Err(config_err(format!(
                "run.update_factor must lie in (0, 1/2), got {}",
                self.run.update_factor
            )));
        }
        if self.run.max_passes == 0 {
            return Err(config_err("run.max_passes must be at least 1"));
        }
        Ok(())
    }

    pub fn require_epsilons(&self) -> Result<&[f64]> {
        if self.run.epsilon.is_empty() {
            Err(config_err("run.epsilon is empty"))
        } else {
            Ok(&self.run.epsilon)
        }
    }

    pub fn sweep_config(&self) -> SweepConfig {
        let mut sc = SweepConfig::new(self.system.parameters, self.system.branch, self.domain, self.mesh.d);
        sc.epsilons = self.run.epsilon.clone();
        sc.n0 = self.run.n0;
        sc.factor = self.run.update_factor;
        sc.tighten = self.run.tighten;
        sc.max_passes = self.run.max_passes;
        sc
    }
}
