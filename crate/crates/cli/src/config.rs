//! Optional TOML configuration. Each table mirrors the flags of one
//! subcommand; a top-level `seed` applies to every subcommand that samples.

use std::path::Path;

use serde::{Deserialize, Serialize};

use rnms::Error;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generate: Option<GenerateConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<EntropyConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complexity: Option<ComplexityConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<FrequenciesConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diffract: Option<DiffractConfig>,
}

macro_rules! section {
    ($name:ident { $($field:ident : $ty:ty),* $(,)? }) => {
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $(
                #[serde(skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }
    };
}

section!(GenerateConfig { m: u32, probs: String, n: usize, letters: usize, seed: u64, format: String });
section!(EntropyConfig { m: u32, n_max: usize, tol: f64, method: String });
section!(ComplexityConfig { m: u32, ell_min: usize, ell_max: usize, method: String });
section!(FrequenciesConfig { m: u32, ell: usize, probs: String, empirical: usize, seed: u64 });
section!(DiffractConfig {
    m: u32,
    probs: String,
    n: usize,
    analytic_n: usize,
    kmax: f64,
    grid: usize,
    star_cutoff: f64,
    samples: usize,
    seed: u64,
    format: String,
    misprint_mode: bool,
});

impl Config {
    pub fn parse(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn dump(&self) -> String {
        toml::to_string(self).expect("configuration is always serialisable")
    }
}
