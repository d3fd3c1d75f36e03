//! Run configuration with the precedence: command-line flags, then a
//! TOML file (`--config` or the `PODLES_CONFIG` environment variable),
//! then built-in defaults.

use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputMode {
    Json,
    Text,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub q: f64,
    pub precision: u32,
    pub l_max: f64,
    pub j_max: u64,
    pub tol: f64,
    #[serde(skip)]
    pub output: OutputMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: 0.5,
            precision: 50,
            l_max: 40.5,
            j_max: 200,
            tol: 1e-8,
            output: OutputMode::Json,
        }
    }
}

/// The optional overrides, as read from a TOML file or from flags.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub q: Option<f64>,
    pub precision: Option<u32>,
    pub l_max: Option<f64>,
    pub j_max: Option<u64>,
    pub tol: Option<f64>,
    pub output: Option<OutputMode>,
}

impl RunConfig {
    fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.q {
            self.q = v;
        }
        if let Some(v) = o.precision {
            self.precision = v;
        }
        if let Some(v) = o.l_max {
            self.l_max = v;
        }
        if let Some(v) = o.j_max {
            self.j_max = v;
        }
        if let Some(v) = o.tol {
            self.tol = v;
        }
        if let Some(v) = o.output {
            self.output = v;
        }
    }

    /// The truncation cutoff as a doubled-l integer.
    pub fn twol_max(&self) -> i64 {
        (2.0 * self.l_max).round() as i64
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(format!("q must lie in (0,1), got {}", self.q));
        }
        if self.precision < 15 {
            return Err(format!("precision must be at least 15 digits, got {}", self.precision));
        }
        let t = self.twol_max();
        if t < 5 || t % 2 == 0 {
            return Err(format!(
                "l_max must be a half-integer with 2*l_max an odd integer >= 5, got {}",
                self.l_max
            ));
        }
        if self.j_max < 8 {
            return Err(format!("j_max must be at least 8, got {}", self.j_max));
        }
        if self.tol <= 0.0 || !self.tol.is_finite() {
            return Err(format!("tol must be positive, got {}", self.tol));
        }
        Ok(())
    }
}

/// Builds the effective configuration. `file` wins over the defaults and
/// `flags` wins over both.
pub fn resolve(
    flags: &Overrides,
    config_path: Option<&Path>,
) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    let path = config_path.map(|p| p.to_path_buf()).or_else(|| {
        std::env::var_os("PODLES_CONFIG").map(std::path::PathBuf::from)
    });
    if let Some(p) = path {
        let text = std::fs::read_to_string(&p)
            .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
        let file: Overrides = toml::from_str(&text)
            .map_err(|e| format!("bad config {}: {e}", p.display()))?;
        cfg.apply(&file);
    }
    cfg.apply(flags);
    cfg.validate()?;
    Ok(cfg)
}
