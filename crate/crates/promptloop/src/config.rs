use iqa_metrics::MetricConfig;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Optional config file (TOML). Every field can be overridden by
/// environment (`PROMPTLOOP_*`) or flags; precedence is flags > env > file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default)]
pub struct FileConfig {
    pub prompter_url: Option<String>,
    pub generator_url: Option<String>,
    pub auth_token: Option<String>,
    pub timeout_secs: Option<f64>,
    pub max_retries: Option<u32>,
    pub out_dir: Option<PathBuf>,
    pub instruction: Option<String>,
    pub metrics: MetricsOverrides,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default)]
pub struct MetricsOverrides {
    pub ssim_window: Option<usize>,
    pub ssim_sigma: Option<f64>,
    pub ssim_k1: Option<f64>,
    pub ssim_k2: Option<f64>,
    pub uiq_window: Option<usize>,
    pub fsim_scales: Option<usize>,
    pub fsim_orientations: Option<usize>,
    pub fsim_min_wavelength: Option<f64>,
    pub fsim_mult: Option<f64>,
    pub fsim_sigma_f: Option<f64>,
    pub fsim_t1: Option<f64>,
    pub fsim_t2: Option<f64>,
    pub psnr_max: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    /// MetricConfig with file overrides applied on top of defaults;
    /// the result is re-validated by every metric entry point.
    pub fn metric_config(&self, psnr_max_flag: Option<f64>) -> MetricConfig {
        let mut cfg = MetricConfig::default();
        let m = &self.metrics;
        if let Some(v) = m.ssim_window {
            cfg.ssim_window = v;
        }
        if let Some(v) = m.ssim_sigma {
            cfg.ssim_sigma = v;
        }
        if let Some(v) = m.ssim_k1 {
            cfg.ssim_k1 = v;
        }
        if let Some(v) = m.ssim_k2 {
            cfg.ssim_k2 = v;
        }
        if let Some(v) = m.uiq_window {
            cfg.uiq_window = v;
        }
        if let Some(v) = m.fsim_scales {
            cfg.fsim_scales = v;
        }
        if let Some(v) = m.fsim_orientations {
            cfg.fsim_orientations = v;
        }
        if let Some(v) = m.fsim_min_wavelength {
            cfg.fsim_min_wavelength = v;
        }
        if let Some(v) = m.fsim_mult {
            cfg.fsim_mult = v;
        }
        if let Some(v) = m.fsim_sigma_f {
            cfg.fsim_sigma_f = v;
        }
        if let Some(v) = m.fsim_t1 {
            cfg.fsim_t1 = v;
        }
        if let Some(v) = m.fsim_t2 {
            cfg.fsim_t2 = v;
        }
        if let Some(v) = psnr_max_flag.or(m.psnr_max) {
            cfg.psnr_max = v;
        }
        cfg
    }
}
