//! Run configuration: built-in defaults, optional TOML file, CLI flags,
//! in rising precedence.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sepkit_core::{IntegrationSettings, Rectangle};

use crate::cli::parse_domain;
use crate::CliError;

/// Optional config file contents; every field may be omitted.
///
/// ```toml
/// rtol = 1e-10
/// atol = 1e-12
/// grid = 40
/// tmax = 200.0
/// domain = "-10,10,-1.5pi,1.5pi"
/// ```
#[derive(Debug, Clone, Default, Deserialize)]
pub struct FileConfig {
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub grid: Option<usize>,
    pub tmax: Option<f64>,
    pub domain: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Effective configuration after merging.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub function: String,
    pub domain: Option<Rectangle>,
    pub grid_n: usize,
    pub settings: IntegrationSettings,
}

pub struct Merge {
    pub file: FileConfig,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
}

impl Merge {
    pub fn resolve(
        &self,
        function: &str,
        domain_flag: Option<&str>,
        grid_flag: Option<usize>,
        grid_default: usize,
        tmax_default: f64,
    ) -> Result<RunConfig, CliError> {
        let mut settings = IntegrationSettings {
            t_max: self.file.tmax.unwrap_or(tmax_default),
            ..IntegrationSettings::default()
        };
        if let Some(rtol) = self.rtol.or(self.file.rtol) {
            settings.rtol = rtol;
        }
        if let Some(atol) = self.atol.or(self.file.atol) {
            settings.atol = atol;
        }
        let domain_text = domain_flag.or(self.file.domain.as_deref());
        let domain = domain_text.map(parse_domain).transpose()?;
        Ok(RunConfig {
            function: function.to_string(),
            domain,
            grid_n: grid_flag.or(self.file.grid).unwrap_or(grid_default),
            settings,
        })
    }
}

/// Echo of the effective configuration, embedded in every JSON document.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    pub function: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    pub rtol: f64,
    pub atol: f64,
    pub t_max: f64,
}

impl ConfigEcho {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            function: cfg.function.clone(),
            domain: cfg
                .domain
                .map(|d| [d.x_min, d.x_max, d.y_min, d.y_max]),
            grid_n: Some(cfg.grid_n),
            method: None,
            rtol: cfg.settings.rtol,
            atol: cfg.settings.atol,
            t_max: cfg.settings.t_max,
        }
    }
}
