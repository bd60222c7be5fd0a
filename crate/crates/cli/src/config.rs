//! Experiment configuration: a TOML file with a required `[model]` table.

use gasgiant_core::suites::SuiteParams;
use gasgiant_core::{IntegratorOptions, MetricModel, ModelKind};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 20240607;
pub const OUT_DIR_ENV: &str = "GASGIANT_OUT_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// `euclidean`, `perturbed` or `torus3d`.
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_ceiling: Option<f64>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<MetricModel, ConfigError> {
        let base = match self.name.as_str() {
            "euclidean" => {
                if self.a.is_some() || self.b.is_some() {
                    return Err(ConfigError::Invalid("model.a and model.b do not apply to euclidean".into()));
                }
                MetricModel::euclidean()
            }
            "perturbed" | "torus3d" => {
                let mut m = if self.name == "perturbed" {
                    MetricModel::perturbed()
                } else {
                    MetricModel::torus3d()
                };
                let (a0, b0) = match m.kind {
                    ModelKind::Perturbed { a, b } | ModelKind::Torus3d { a, b } => (a, b),
                    ModelKind::Euclidean => unreachable!(),
                };
                let (a, b) = (self.a.unwrap_or(a0), self.b.unwrap_or(b0));
                if !(a.is_finite() && b.is_finite()) {
                    return Err(ConfigError::Invalid("model.a and model.b must be finite".into()));
                }
                m.kind = if self.name == "perturbed" {
                    ModelKind::Perturbed { a, b }
                } else {
                    ModelKind::Torus3d { a, b }
                };
                m
            }
            other => return Err(ConfigError::Invalid(format!("unknown model.name `{other}`"))),
        };
        let mut m = base;
        if let Some(p) = self.period {
            positive("model.period", p)?;
            m = m.with_period(p);
        }
        if let Some(c) = self.x_ceiling {
            positive("model.x_ceiling", c)?;
            m = m.with_x_ceiling(c);
        }
        check_positive_definite(&m)?;
        Ok(m)
    }
}

/// Rejects parameters for which `h` degenerates somewhere below the ceiling.
fn check_positive_definite(m: &MetricModel) -> Result<(), ConfigError> {
    const N: usize = 64;
    let nk = if m.dim() == 2 { 1 } else { N };
    for i in 0..=N {
        let x = m.x_ceiling * i as f64 / N as f64;
        for j in 0..N {
            for k in 0..nk {
                let y = [m.period * j as f64 / N as f64, m.period * k as f64 / N as f64];
                let lam = m.h_min_eigenvalue(x, &y);
                if lam.is_nan() || lam <= 1e-6 {
                    return Err(ConfigError::Invalid(format!(
                        "metric degenerates at x = {x}, y = {y:?} (min eigenvalue {lam:.3e})"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("{name} must be positive, got {v}")))
    }
}

/// Pass/fail thresholds; defaults are the acceptance values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub energy_drift: f64,
    pub h0_drift: f64,
    pub exit_time: f64,
    pub asymptotic_slope: f64,
    pub short_x_slope: f64,
    pub short_y_eta_slope: f64,
    pub h_norm_lo: f64,
    pub h_norm_hi: f64,
    pub h_norm_s_max: f64,
    pub gauge: f64,
    pub transport: f64,
    pub rate_margin: f64,
    pub gradient_rel: f64,
    pub jacobi_growth: f64,
    pub along_x: f64,
    pub normal_slope: f64,
    pub pestov_base: f64,
    pub pestov_ratio: f64,
    pub fiber: f64,
    pub probe_rel: f64,
    pub probe_slope: f64,
    pub table_xi: f64,
    pub table_xdd: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            energy_drift: 1e-9,
            h0_drift: 1e-8,
            exit_time: 1e-6,
            asymptotic_slope: 2.7,
            short_x_slope: 0.9,
            short_y_eta_slope: 1.9,
            h_norm_lo: 0.5,
            h_norm_hi: 1.5,
            h_norm_s_max: 0.1,
            gauge: 1e-8,
            transport: 1e-6,
            rate_margin: 0.9,
            gradient_rel: 1e-4,
            jacobi_growth: 1.2,
            along_x: 1e-8,
            normal_slope: 1.9,
            pestov_base: 1e-2,
            pestov_ratio: 3.0,
            fiber: 1e-12,
            probe_rel: 1e-3,
            probe_slope: 0.9,
            table_xi: 1e-8,
            table_xdd: 1e-6,
        }
    }
}

impl Thresholds {
    fn validate(&self) -> Result<(), ConfigError> {
        let all = [
            ("energy_drift", self.energy_drift),
            ("h0_drift", self.h0_drift),
            ("exit_time", self.exit_time),
            ("asymptotic_slope", self.asymptotic_slope),
            ("short_x_slope", self.short_x_slope),
            ("short_y_eta_slope", self.short_y_eta_slope),
            ("h_norm_lo", self.h_norm_lo),
            ("h_norm_hi", self.h_norm_hi),
            ("h_norm_s_max", self.h_norm_s_max),
            ("gauge", self.gauge),
            ("transport", self.transport),
            ("rate_margin", self.rate_margin),
            ("gradient_rel", self.gradient_rel),
            ("jacobi_growth", self.jacobi_growth),
            ("along_x", self.along_x),
            ("normal_slope", self.normal_slope),
            ("pestov_base", self.pestov_base),
            ("pestov_ratio", self.pestov_ratio),
            ("fiber", self.fiber),
            ("probe_rel", self.probe_rel),
            ("probe_slope", self.probe_slope),
            ("table_xi", self.table_xi),
            ("table_xdd", self.table_xdd),
        ];
        for (name, v) in all {
            positive(&format!("thresholds.{name}"), v)?;
        }
        if self.h_norm_lo >= self.h_norm_hi {
            return Err(ConfigError::Invalid("thresholds.h_norm_lo must be below h_norm_hi".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub integrator: IntegratorOptions,
    #[serde(default)]
    pub params: SuiteParams,
    #[serde(default)]
    pub thresholds: Thresholds,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config values are representable in TOML")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.build()?;
        self.integrator
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("integrator: {e}")))?;
        self.params
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("params: {e}")))?;
        self.thresholds.validate()
    }

    /// `--out` beats the environment, which beats the config file.
    pub fn resolve_out_dir(&self, cli: Option<&Path>) -> PathBuf {
        if let Some(p) = cli {
            return p.to_path_buf();
        }
        if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
            return PathBuf::from(p);
        }
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("gasgiant-out"))
    }
}
