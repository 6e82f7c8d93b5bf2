use crate::error::CliError;
use pulseflow::oracle::OracleSettings;
use pulseflow::spectral_bvp::{DEFAULT_CUTOFF_CAP, DEFAULT_INTERVALS, DEFAULT_THRESHOLD};
use pulseflow::waveform::DEFAULT_PEARSON_THRESHOLD;
use pulseflow::{confocal_annulus_from_semiaxes, ellipse_from_semiaxes, SectionGeometry, TruncationSettings};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Cross-section, given by the semi-axes of its walls [cm].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    Circle { radius: f64 },
    CircularAnnulus { inner: f64, outer: f64 },
    Ellipse { alpha: f64, beta: f64 },
    /// Confocal annulus: outer semi-axes `(alpha2, beta2)`, inner minor
    /// semi-axis `beta1`.
    EllipticalAnnulus { alpha2: f64, beta2: f64, beta1: f64 },
}

impl GeometrySpec {
    pub fn build(&self) -> pulseflow::Result<SectionGeometry> {
        match *self {
            GeometrySpec::Circle { radius } => SectionGeometry::circle(radius),
            GeometrySpec::CircularAnnulus { inner, outer } => SectionGeometry::circular_annulus(inner, outer),
            GeometrySpec::Ellipse { alpha, beta } => ellipse_from_semiaxes(alpha, beta),
            GeometrySpec::EllipticalAnnulus { alpha2, beta2, beta1 } => {
                confocal_annulus_from_semiaxes(alpha2, beta2, beta1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformSpec {
    /// CSV of `t, f` rows; relative paths are taken from the config file's
    /// directory.
    pub path: PathBuf,
    /// Period [s]; inferred from the sampling when absent.
    #[serde(default)]
    pub period: Option<f64>,
}

fn default_max_mode() -> usize {
    50
}
fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}
fn default_intervals() -> usize {
    DEFAULT_INTERVALS
}
fn default_cap() -> usize {
    DEFAULT_CUTOFF_CAP
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_phases() -> Vec<f64> {
    vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
}
fn default_points() -> usize {
    65
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometrySpec,
    /// Kinematic viscosity [cm^2/s].
    pub nu: f64,
    #[serde(default)]
    pub waveform: Option<WaveformSpec>,
    /// Constant flow rate [cm^3/s] for steady runs, used when no waveform is
    /// given.
    #[serde(default)]
    pub flux: Option<f64>,
    /// Number of Fourier modes M of the fit; chosen by correlation when absent.
    #[serde(default)]
    pub modes: Option<usize>,
    #[serde(default)]
    pub pearson_threshold: Option<f64>,
    #[serde(default = "default_max_mode")]
    pub max_mode: usize,
    #[serde(default = "default_threshold")]
    pub mu_threshold: f64,
    #[serde(default = "default_threshold")]
    pub s_threshold: f64,
    #[serde(default = "default_intervals")]
    pub intervals: usize,
    #[serde(default = "default_cap")]
    pub cutoff_cap: usize,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Phases `t / T` written to `profiles.csv`.
    #[serde(default = "default_phases")]
    pub phases: Vec<f64>,
    /// Samples per semi-axis in `profiles.csv`.
    #[serde(default = "default_points")]
    pub profile_points: usize,
    #[serde(default)]
    pub oracle: Option<OracleSettings>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    /// Reads a config, resolving relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(w) = cfg.waveform.as_mut() {
            if w.path.is_relative() {
                w.path = base.join(&w.path);
            }
        }
        if cfg.output.is_relative() {
            cfg.output = base.join(&cfg.output);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(bad(format!("nu must be positive, got {}", self.nu)));
        }
        for (name, v) in [("mu_threshold", self.mu_threshold), ("s_threshold", self.s_threshold)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(p) = self.pearson_threshold {
            if !(p > 0.0 && p <= 1.0) {
                return Err(bad(format!("pearson_threshold must lie in (0, 1], got {p}")));
            }
        }
        if let Some(m) = self.modes {
            if m > self.max_mode {
                return Err(bad(format!("modes = {m} exceeds max_mode = {}", self.max_mode)));
            }
        }
        if let Some(w) = &self.waveform {
            if let Some(t) = w.period {
                if !(t.is_finite() && t > 0.0) {
                    return Err(bad(format!("waveform period must be positive, got {t}")));
                }
            }
        }
        if self.waveform.is_some() && self.flux.is_some() {
            return Err(bad("give either a waveform or a constant flux, not both"));
        }
        if self.profile_points < 2 {
            return Err(bad("profile_points must be at least 2"));
        }
        self.geometry.build().map_err(|e| bad(e.to_string()))?;
        Ok(())
    }

    pub fn pearson(&self) -> f64 {
        self.pearson_threshold.unwrap_or(DEFAULT_PEARSON_THRESHOLD)
    }

    pub fn truncation(&self) -> TruncationSettings {
        TruncationSettings {
            max_mode: self.max_mode,
            mu_threshold: self.mu_threshold,
            s_threshold: self.s_threshold,
            intervals: self.intervals,
            cap: self.cutoff_cap,
        }
    }

    pub fn oracle_settings(&self) -> OracleSettings {
        self.oracle.clone().unwrap_or_else(|| OracleSettings { max_periods: 60, tolerance: 1e-5, ..Default::default() })
    }
}
