//! Flat key-value configuration.
//!
//! Files are TOML with top-level keys only, for example
//!
//! ```text
//! eta = 0.6
//! beta = 0.9
//! k_ave = 0.1
//! Po_dBm = 10
//! ```
//!
//! Layers are merged in order (defaults, then file, then `--set` flags); a
//! later layer overrides an earlier one key by key.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;
use twdf_core::linkmodel::dbm_to_watts;
use twdf_core::{ChannelParams64, HardwareProfile64, SystemConfig64, SystemParams};

/// Keys every complete configuration must define. Impairments come from
/// either `k_ave` or the pair `k1`, `k2`.
pub const REQUIRED_KEYS: [&str; 15] = [
    "eta", "beta", "T", "d_ar", "d_br", "d_ab", "alpha1", "alpha2", "noise_dBm", "Po_dBm", "R_th", "N", "m_a", "m_b",
    "m_d",
];

const IMPAIRMENT_KEYS: [&str; 3] = ["k1", "k2", "k_ave"];

/// Recorded for provenance only; no formula uses it.
pub const INERT_KEYS: [&str; 1] = ["bandwidth"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config key `{key}`: {reason}")]
    Key { key: String, reason: String },
    #[error("cannot read config {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("config {path} is not flat key-value TOML: {reason}")]
    Syntax { path: String, reason: String },
}

fn key_err(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Key {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn known(key: &str) -> bool {
    REQUIRED_KEYS.contains(&key) || IMPAIRMENT_KEYS.contains(&key) || INERT_KEYS.contains(&key)
}

/// A numeric value as written, so shapes can reject `2.5` but accept `2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Number {
    Int(i64),
    Float(f64),
}

impl Number {
    fn as_f64(self) -> f64 {
        match self {
            Number::Int(i) => i as f64,
            Number::Float(f) => f,
        }
    }
}

fn number(key: &str, value: &toml::Value) -> Result<Number, ConfigError> {
    match value {
        toml::Value::Integer(i) => Ok(Number::Int(*i)),
        toml::Value::Float(f) => Ok(Number::Float(*f)),
        other => Err(key_err(key, format!("expected a number, got {}", other.type_str()))),
    }
}

/// One layer of settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer {
    values: BTreeMap<String, Number>,
}

impl Layer {
    /// The reference scenario with `N = 16` and a 1 MHz bandwidth.
    pub fn defaults() -> Self {
        let mut l = Layer::default();
        for (k, v) in [
            ("eta", Number::Float(0.6)),
            ("beta", Number::Float(0.9)),
            ("T", Number::Int(1)),
            ("k_ave", Number::Float(0.1)),
            ("d_ar", Number::Int(5)),
            ("d_br", Number::Int(5)),
            ("d_ab", Number::Int(10)),
            ("alpha1", Number::Float(2.7)),
            ("alpha2", Number::Int(3)),
            ("noise_dBm", Number::Int(-50)),
            ("Po_dBm", Number::Int(10)),
            ("R_th", Number::Int(1)),
            ("N", Number::Int(16)),
            ("m_a", Number::Int(2)),
            ("m_b", Number::Int(2)),
            ("m_d", Number::Int(1)),
            ("bandwidth", Number::Float(1e6)),
        ] {
            l.values.insert(k.to_string(), v);
        }
        l
    }

    pub fn parse(text: &str, path: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax {
            path: path.to_string(),
            reason: e.message().to_string(),
        })?;
        let mut l = Layer::default();
        for (k, v) in &table {
            if !known(k) {
                return Err(key_err(k, "unknown key"));
            }
            l.values.insert(k.clone(), number(k, v)?);
        }
        if l.values.contains_key("k_ave") && (l.values.contains_key("k1") || l.values.contains_key("k2")) {
            return Err(key_err("k_ave", "give either k_ave or k1 and k2, not both"));
        }
        Ok(l)
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: shown.clone(),
            reason: e.to_string(),
        })?;
        Self::parse(&text, &shown)
    }

    /// Builds a layer from `KEY=VALUE` assignments.
    pub fn from_assignments<S: AsRef<str>>(items: &[S]) -> Result<Self, ConfigError> {
        let mut l = Layer::default();
        for item in items {
            let item = item.as_ref();
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| key_err(item, "expected KEY=VALUE"))?;
            let k = k.trim();
            if !known(k) {
                return Err(key_err(k, "unknown key"));
            }
            let parsed: toml::Table = format!("v = {}", v.trim())
                .parse()
                .map_err(|_| key_err(k, format!("`{}` is not a number", v.trim())))?;
            l.set(k, number(k, &parsed["v"])?);
        }
        Ok(l)
    }

    pub fn get(&self, key: &str) -> Option<Number> {
        self.values.get(key).copied()
    }

    /// Sets one key; `k_ave` and `k1`/`k2` displace each other.
    pub fn set(&mut self, key: &str, value: Number) {
        if key == "k_ave" {
            self.values.remove("k1");
            self.values.remove("k2");
        } else if key == "k1" || key == "k2" {
            if let Some(k) = self.values.remove("k_ave") {
                self.values.insert("k1".into(), k);
                self.values.insert("k2".into(), k);
            }
        }
        self.values.insert(key.to_string(), value);
    }

    /// `self` overridden by `top`.
    pub fn merged(&self, top: &Layer) -> Layer {
        let mut out = self.clone();
        for (k, v) in &top.values {
            out.set(k, *v);
        }
        out
    }

    fn float(&self, key: &str) -> Result<f64, ConfigError> {
        let v = self.get(key).ok_or_else(|| key_err(key, "missing"))?.as_f64();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(key_err(key, "must be finite"))
        }
    }

    fn positive(&self, key: &str) -> Result<f64, ConfigError> {
        let v = self.float(key)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(key_err(key, format!("must be > 0, got {v}")))
        }
    }

    fn integer(&self, key: &str) -> Result<u32, ConfigError> {
        let v = match self.get(key).ok_or_else(|| key_err(key, "missing"))? {
            Number::Int(i) => i as f64,
            Number::Float(f) if f.fract() == 0.0 => f,
            Number::Float(f) => return Err(key_err(key, format!("must be an integer, got {f}"))),
        };
        if v >= 1.0 && v <= u32::MAX as f64 {
            Ok(v as u32)
        } else {
            Err(key_err(key, format!("must be a positive integer, got {v}")))
        }
    }

    fn impairments(&self) -> Result<(f64, f64), ConfigError> {
        if self.get("k_ave").is_some() {
            let k = self.float("k_ave")?;
            return Ok((k, k));
        }
        match (self.get("k1"), self.get("k2")) {
            (None, None) => Err(key_err("k_ave", "missing (or give k1 and k2)")),
            _ => Ok((self.float("k1")?, self.float("k2")?)),
        }
    }

    /// Converts a complete layer into a validated configuration.
    pub fn build(&self) -> Result<SystemConfig64, ConfigError> {
        let in_open_unit = |key: &str| -> Result<f64, ConfigError> {
            let v = self.float(key)?;
            if v > 0.0 && v < 1.0 {
                Ok(v)
            } else {
                Err(key_err(key, format!("must lie in (0, 1), got {v}")))
            }
        };
        let eta = in_open_unit("eta")?;
        let beta = in_open_unit("beta")?;
        let block_time = self.positive("T")?;
        let target_rate = self.positive("R_th")?;
        let n = self.integer("N")?;
        let shapes = (self.integer("m_a")?, self.integer("m_b")?, self.integer("m_d")?);
        let d = (self.positive("d_ar")?, self.positive("d_br")?, self.positive("d_ab")?);
        let (alpha1, alpha2) = (self.positive("alpha1")?, self.positive("alpha2")?);
        let noise = dbm_to_watts(self.float("noise_dBm")?);
        let tx = dbm_to_watts(self.float("Po_dBm")?);
        let (k1, k2) = self.impairments()?;
        if let Some(bw) = self.get("bandwidth") {
            if !(bw.as_f64() > 0.0) {
                return Err(key_err("bandwidth", "must be > 0"));
            }
        }

        let which = if self.get("k_ave").is_some() { ("k_ave", "k_ave") } else { ("k1", "k2") };
        let hardware = HardwareProfile64::new(k1, k2).map_err(|e| {
            let key = if k1 < 0.0 || !k1.is_finite() { which.0 } else { which.1 };
            key_err(key, e.to_string())
        })?;
        let channels = ChannelParams64::from_geometry(shapes, d, alpha1, alpha2).map_err(|e| key_err("d_ab", e.to_string()))?;
        let params = SystemParams {
            tx_power: tx,
            noise_power: noise,
            eta,
            beta,
            block_time,
            target_rate,
            quadrature_order: n as usize,
            hardware,
            channels,
        };
        params.validate().map_err(|e| match e {
            twdf_core::Error::InvalidParameter { name, reason } => key_err(config_key(name), reason),
            other => key_err("config", other.to_string()),
        })
    }
}

/// Config-file spelling of a library parameter name.
fn config_key(name: &str) -> &str {
    match name {
        "tx_power" => "Po_dBm",
        "noise_power" => "noise_dBm",
        "block_time" => "T",
        "target_rate" => "R_th",
        "quadrature_order" => "N",
        other => other,
    }
}

/// Loads a complete configuration file: every key in [`REQUIRED_KEYS`] plus
/// `k_ave` or both `k1` and `k2`.
pub fn load_config(path: &Path) -> Result<SystemConfig64, ConfigError> {
    let layer = Layer::read(path)?;
    for key in REQUIRED_KEYS {
        if layer.get(key).is_none() {
            return Err(key_err(key, "missing"));
        }
    }
    layer.build()
}

/// Defaults, then the optional file, then `KEY=VALUE` overrides. The file may
/// be partial here.
pub fn resolve<S: AsRef<str>>(file: Option<&Path>, overrides: &[S]) -> Result<SystemConfig64, ConfigError> {
    resolve_layer(file, overrides)?.build()
}

pub fn resolve_layer<S: AsRef<str>>(file: Option<&Path>, overrides: &[S]) -> Result<Layer, ConfigError> {
    let mut layer = Layer::defaults();
    if let Some(path) = file {
        layer = layer.merged(&Layer::read(path)?);
    }
    Ok(layer.merged(&Layer::from_assignments(overrides)?))
}
