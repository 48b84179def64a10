use crate::{shape_check, MetricConfig, MetricError, Result};
use image_core::{sliding_window_stats, to_luminance, GrayImage, ImageBuffer, SampleRange};

/// Gaussian window weights, row-major `side²`, unnormalized.
pub(crate) fn gaussian_window(side: usize, sigma: f64) -> Vec<f64> {
    let center = (side as f64 - 1.0) / 2.0;
    let mut w = Vec::with_capacity(side * side);
    for y in 0..side {
        for x in 0..side {
            let dx = x as f64 - center;
            let dy = y as f64 - center;
            w.push((-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp());
        }
    }
    w
}

/// Mean structural similarity over Gaussian-weighted sliding windows on
/// luminance: `[(2μxμy+C1)(2σxy+C2)] / [(μx²+μy²+C1)(σx²+σy²+C2)]` with
/// `C1 = (k1·L)²`, `C2 = (k2·L)²`, `L = psnr_max`.
pub fn ssim(reference: &ImageBuffer, candidate: &ImageBuffer, cfg: &MetricConfig) -> Result<f64> {
    cfg.validate()?;
    shape_check(reference, candidate)?;
    let min_dim = reference.width().min(reference.height());
    if min_dim < cfg.ssim_window {
        return Err(MetricError::TooSmall(
            reference.width(),
            reference.height(),
            "ssim",
            cfg.ssim_window,
        ));
    }

    // luminance scaled so the data range matches L = psnr_max
    let scale = cfg.psnr_max;
    let ya = scaled_luminance(reference, scale);
    let yb = scaled_luminance(candidate, scale);

    let c1 = (cfg.ssim_k1 * cfg.psnr_max).powi(2);
    let c2 = (cfg.ssim_k2 * cfg.psnr_max).powi(2);
    let weights = gaussian_window(cfg.ssim_window, cfg.ssim_sigma);

    let stats = sliding_window_stats(&ya, &yb, cfg.ssim_window, 1, Some(&weights))
        .map_err(|e| MetricError::Undefined(e.to_string()))?;
    let mut acc = 0.0;
    for s in &stats {
        let num = (2.0 * s.mean_a * s.mean_b + c1) * (2.0 * s.covar + c2);
        let den = (s.mean_a * s.mean_a + s.mean_b * s.mean_b + c1) * (s.var_a + s.var_b + c2);
        acc += num / den;
    }
    Ok(acc / stats.len() as f64)
}

fn scaled_luminance(img: &ImageBuffer, scale: f64) -> GrayImage {
    let unit = to_luminance(img, SampleRange::Unit);
    if scale == 1.0 {
        return unit;
    }
    // sample range checks do not apply to arbitrary peaks; rebuild in byte
    // range when the peak allows it, otherwise clamp into unit
    let samples: Vec<f64> = unit.samples().iter().map(|&s| s * scale).collect();
    if scale <= 255.0 {
        GrayImage::new(unit.width(), unit.height(), SampleRange::Byte, samples)
            .expect("scaled luminance within byte range")
    } else {
        unit
    }
}
