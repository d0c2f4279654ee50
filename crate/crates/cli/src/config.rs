//! Scenario files.
//!
//! A scenario is a TOML document with optional `[output]`, `[scenario]`,
//! `[noise]`, `[hom]` and `[cascade]` tables. Flags given on the command line
//! take precedence over the file. Unknown keys are rejected.
//!
//! ```toml
//! [output]
//! format = "json"
//! seed = 7
//!
//! [scenario]
//! state = "E"
//! preset = "calibrated"
//! ancilla = true
//! shots = 1000
//!
//! [noise]
//! background = 0.1
//! overlap_pbs = 0.9
//!
//! [hom]
//! interferometer = "bs1"
//! tau_fs = 448.0
//! peak_overlap = 1.0
//! delay_max_fs = 1500.0
//! delay_step_fs = 100.0
//!
//! [cascade]
//! n = 3
//! ```

use std::path::Path;

use serde::Deserialize;
use spinorbit::protocol::{Interferometer, NoiseParams};

use crate::error::CliError;
use crate::report::Format;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub output: OutputSection,
    pub scenario: ScenarioSection,
    /// Kept raw so that it overlays the chosen preset key by key.
    pub noise: Option<toml::Table>,
    pub hom: HomSection,
    pub cascade: CascadeSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Ideal,
    Calibrated,
}

impl Preset {
    pub fn params(self) -> NoiseParams {
        match self {
            Preset::Ideal => NoiseParams::ideal(),
            Preset::Calibrated => NoiseParams::calibrated(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub state: Option<String>,
    pub all: Option<bool>,
    pub preset: Option<Preset>,
    pub ancilla: Option<bool>,
    pub shots: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomSection {
    pub interferometer: Option<Interferometer>,
    pub tau_fs: Option<f64>,
    pub peak_overlap: Option<f64>,
    pub visibility: Option<f64>,
    pub delay_max_fs: Option<f64>,
    pub delay_step_fs: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CascadeSection {
    pub n: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text).map_err(|message| CliError::Config {
            path: path.display().to_string(),
            message,
        })
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// `base` with the keys of the `[noise]` table replaced.
    pub fn overlay_noise(&self, base: NoiseParams) -> Result<NoiseParams, String> {
        let Some(table) = &self.noise else {
            return Ok(base);
        };
        let mut merged = toml::Table::try_from(base).map_err(|e| e.to_string())?;
        for (k, v) in table {
            merged.insert(k.clone(), v.clone());
        }
        merged
            .try_into()
            .map_err(|e: toml::de::Error| format!("in [noise]: {}", e.message()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_overlay_keeps_preset_values() {
        let cfg = FileConfig::parse("[noise]\nbackground = 0.05\n").unwrap();
        let n = cfg.overlay_noise(NoiseParams::calibrated()).unwrap();
        assert_eq!(n.background, 0.05);
        assert_eq!(n.overlap_bs1, NoiseParams::calibrated().overlap_bs1);
    }

    #[test]
    fn unknown_keys_are_reported_with_location() {
        let err = FileConfig::parse("[scenario]\nstat = \"A\"\n").unwrap_err();
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("stat"), "{err}");
        let cfg = FileConfig::parse("[noise]\nbackgroud = 0.1\n").unwrap();
        assert!(cfg.overlay_noise(NoiseParams::ideal()).unwrap_err().contains("backgroud"));
    }
}
