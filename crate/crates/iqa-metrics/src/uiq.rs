use crate::{shape_check, MetricConfig, MetricError, Result};
use image_core::{sliding_window_stats, to_luminance, ImageBuffer, SampleRange, WindowStats};

pub(crate) fn window_quality(s: &WindowStats) -> f64 {
    let contrast = s.var_a + s.var_b;
    let luminance = s.mean_a * s.mean_a + s.mean_b * s.mean_b;
    if contrast == 0.0 && luminance == 0.0 {
        // both windows are all-zero constants, hence identical
        return 1.0;
    }
    if contrast == 0.0 || luminance == 0.0 {
        return 0.0;
    }
    4.0 * s.covar * s.mean_a * s.mean_b / (contrast * luminance)
}

/// Universal image quality index: the covariance/luminance/contrast product
/// `Q = 4·σxy·μx·μy / [(σx²+σy²)(μx²+μy²)]` averaged over 8×8 sliding
/// windows (stride 1) on luminance.
pub fn uiq(reference: &ImageBuffer, candidate: &ImageBuffer, cfg: &MetricConfig) -> Result<f64> {
    cfg.validate()?;
    shape_check(reference, candidate)?;
    if reference.width().min(reference.height()) < cfg.uiq_window {
        return Err(MetricError::TooSmall(
            reference.width(),
            reference.height(),
            "uiq",
            cfg.uiq_window,
        ));
    }
    let ya = to_luminance(reference, SampleRange::Unit);
    let yb = to_luminance(candidate, SampleRange::Unit);
    let stats = sliding_window_stats(&ya, &yb, cfg.uiq_window, 1, None)
        .map_err(|e| MetricError::Undefined(e.to_string()))?;
    let acc: f64 = stats.iter().map(window_quality).sum();
    Ok(acc / stats.len() as f64)
}
