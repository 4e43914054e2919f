//! Declarative experiment configuration.
//!
//! A run is specified by a flat key-value TOML file, command-line flags, or
//! both; flags win. `emit` writes the resolved configuration back out so that
//! `parse(emit(spec)) == spec`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lpp_core::distributions::WeightDistribution;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Verify,
    Shape,
    Tail,
    Fekete,
    Midpoint,
    Endpoint,
    Corner,
    Identity,
    LeftTail,
    UniformWalk,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Verify => "verify",
            Family::Shape => "shape",
            Family::Tail => "tail",
            Family::Fekete => "fekete",
            Family::Midpoint => "midpoint",
            Family::Endpoint => "endpoint",
            Family::Corner => "corner",
            Family::Identity => "identity",
            Family::LeftTail => "left-tail",
            Family::UniformWalk => "uniform-walk",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "verify" => Family::Verify,
            "shape" => Family::Shape,
            "tail" => Family::Tail,
            "fekete" => Family::Fekete,
            "midpoint" => Family::Midpoint,
            "endpoint" => Family::Endpoint,
            "corner" => Family::Corner,
            "identity" => Family::Identity,
            "left-tail" => Family::LeftTail,
            "uniform-walk" => Family::UniformWalk,
            other => return Err(format!("unknown experiment family `{other}`")),
        })
    }
}

/// Weight-law descriptor as it appears in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<f64>,
}

impl DistSpec {
    /// Compact flag syntax: `exp:RATE` or `gamma:SHAPE:RATE`.
    pub fn parse_compact(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| -> Result<f64, String> {
            p.parse::<f64>().map_err(|_| format!("bad number `{p}` in distribution `{s}`"))
        };
        match parts.as_slice() {
            ["exp", r] | ["exponential", r] => Ok(DistSpec {
                kind: "exponential".into(),
                rate: Some(num(r)?),
                shape: None,
            }),
            ["gamma", k, r] => Ok(DistSpec {
                kind: "gamma".into(),
                rate: Some(num(r)?),
                shape: Some(num(k)?),
            }),
            _ => Err(format!(
                "unrecognized distribution `{s}` (expected exp:RATE or gamma:SHAPE:RATE)"
            )),
        }
    }

    pub fn build(&self) -> Result<WeightDistribution<f64>, String> {
        match self.kind.as_str() {
            "exponential" | "exp" => {
                let rate = self.rate.ok_or("exponential law needs `rate`")?;
                WeightDistribution::exponential(rate).map_err(|e| e.to_string())
            }
            "gamma" => {
                let rate = self.rate.ok_or("gamma law needs `rate`")?;
                let shape = self.shape.ok_or("gamma law needs `shape`")?;
                WeightDistribution::gamma(shape, rate).map_err(|e| e.to_string())
            }
            other => Err(format!("unknown distribution kind `{other}`")),
        }
    }
}

impl Default for DistSpec {
    fn default() -> Self {
        DistSpec {
            kind: "exponential".into(),
            rate: Some(1.0),
            shape: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Direct,
    Tilted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

/// Inclusive range syntax `a..b:step`, or a single integer.
pub fn parse_n_list(s: &str) -> Result<Vec<u32>, String> {
    if let Ok(single) = s.parse::<u32>() {
        return Ok(vec![single]);
    }
    let (range, step) = match s.split_once(':') {
        Some((r, st)) => (
            r,
            st.parse::<u32>().map_err(|_| format!("bad step in `{s}`"))?,
        ),
        None => (s, 1),
    };
    let (a, b) = range
        .split_once("..")
        .ok_or(format!("bad range `{s}` (expected a..b:step)"))?;
    let a: u32 = a.trim().parse().map_err(|_| format!("bad start in `{s}`"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad end in `{s}`"))?;
    if step == 0 || b < a {
        return Err(format!("empty or backwards range `{s}`"));
    }
    Ok((a..=b).step_by(step as usize).collect())
}

/// Sample counts accept scientific notation (`1e6`).
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("bad count `{s}`"))?;
    if !f.is_finite() || !(1.0..1e18).contains(&f) {
        return Err(format!("count `{s}` out of range"));
    }
    Ok(f.round() as u64)
}

/// The resolved, validated experiment description. Serializes to the flat
/// config file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub experiment: Family,
    pub distribution: DistSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fields: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halfwidth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu0: Option<f64>,
    /// Stored as a string in config files: TOML integers are signed and
    /// seeds use the full 64-bit range.
    #[serde(with = "seed_string")]
    pub seed: u64,
    pub workers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub timing: bool,
}

mod seed_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Int(v) if v >= 0 => Ok(v as u64),
            Raw::Int(v) => Err(serde::de::Error::custom(format!("negative seed {v}"))),
            Raw::Str(s) => s
                .parse::<u64>()
                .map_err(|_| serde::de::Error::custom(format!("bad seed `{s}`"))),
        }
    }
}

impl ExperimentSpec {
    pub fn emit(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text =
            std::fs::read_to_string(path).map_err(|e| format!("cannot read {path:?}: {e}"))?;
        Self::parse(&text)
    }

    pub fn n_values(&self) -> Result<Vec<u32>, String> {
        match &self.n_list {
            Some(s) => parse_n_list(s),
            None => Err("missing n (use --n or --n-list)".into()),
        }
    }
}
