//! Run configuration file: TOML, every field optional. Values present in
//! the file override the command-line flags, so a config pins a run down
//! completely regardless of how the command is invoked.

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Field order is emission order; `emit` followed by `parse` followed by
/// `emit` reproduces the first emission byte for byte.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u16>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u16>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<u32>>,
    /// Geometry override: marked points sit at Euclidean radius 1 - 2^-spread_exp.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread_exp: Option<u32>,
    /// Geometry override: hyperbolic translation lengths use s = 2^length_exp.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length_exp: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_cap: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output paths. `svg` feeds export-svg; `report` mirrors the report
    /// text into a file on top of stdout.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Input(format!("config: {e}")))
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("flat optional fields always serialize")
    }

    pub fn load(path: &std::path::Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    /// The spec string the file describes, when it describes one.
    pub fn spec_string(&self) -> Option<String> {
        let (n, k) = (self.n?, self.k?);
        let mut out = format!("{n},{k}");
        for m in self.m.as_deref().unwrap_or(&[]) {
            out.push_str(&format!(",{m}"));
        }
        Some(out)
    }
}
