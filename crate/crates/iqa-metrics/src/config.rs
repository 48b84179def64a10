use crate::{MetricError, Result};
use serde::{Deserialize, Serialize};

/// Tunable parameters of the windowed and filter-bank metrics.
///
/// Defaults follow the classical literature parameterizations: Wang et al.
/// constants for SSIM, the 8×8 sliding window for UIQ, and the standard
/// 4-scale 4-orientation log-Gabor bank with T1 = 0.85, T2 = 160 for FSIM.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    pub ssim_window: usize,
    pub ssim_sigma: f64,
    pub ssim_k1: f64,
    pub ssim_k2: f64,
    pub uiq_window: usize,
    pub fsim_scales: usize,
    pub fsim_orientations: usize,
    pub fsim_min_wavelength: f64,
    pub fsim_mult: f64,
    pub fsim_sigma_f: f64,
    pub fsim_t1: f64,
    pub fsim_t2: f64,
    pub psnr_max: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            ssim_window: 11,
            ssim_sigma: 1.5,
            ssim_k1: 0.01,
            ssim_k2: 0.03,
            uiq_window: 8,
            fsim_scales: 4,
            fsim_orientations: 4,
            fsim_min_wavelength: 6.0,
            fsim_mult: 2.0,
            fsim_sigma_f: 0.55,
            fsim_t1: 0.85,
            fsim_t2: 160.0,
            psnr_max: 1.0,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ssim_window < 2 || self.uiq_window < 2 {
            return Err(MetricError::InvalidConfig(
                "windows must be >= 2".into(),
            ));
        }
        for (name, v) in [
            ("ssim_sigma", self.ssim_sigma),
            ("ssim_k1", self.ssim_k1),
            ("ssim_k2", self.ssim_k2),
            ("fsim_min_wavelength", self.fsim_min_wavelength),
            ("fsim_sigma_f", self.fsim_sigma_f),
            ("fsim_t1", self.fsim_t1),
            ("fsim_t2", self.fsim_t2),
            ("psnr_max", self.psnr_max),
        ] {
            if v <= 0.0 {
                return Err(MetricError::InvalidConfig(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        if self.fsim_scales == 0 || self.fsim_orientations == 0 {
            return Err(MetricError::InvalidConfig(
                "fsim bank needs at least one scale and orientation".into(),
            ));
        }
        if self.fsim_mult <= 1.0 {
            return Err(MetricError::InvalidConfig(
                "fsim_mult must be > 1".into(),
            ));
        }
        Ok(())
    }
}
