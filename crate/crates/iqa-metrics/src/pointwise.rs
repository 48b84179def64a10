use crate::{shape_check, MetricError, Result};
use image_core::ImageBuffer;

fn joint_mse(reference: &ImageBuffer, candidate: &ImageBuffer) -> f64 {
    let n = reference.samples().len() as f64;
    reference
        .samples()
        .iter()
        .zip(candidate.samples())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n
}

/// Root of the mean squared per-sample difference, pooled jointly over
/// pixels and channels.
pub fn rmse(reference: &ImageBuffer, candidate: &ImageBuffer) -> Result<f64> {
    shape_check(reference, candidate)?;
    Ok(joint_mse(reference, candidate).sqrt())
}

/// Peak signal-to-noise ratio in decibels: `10·log10(max² / MSE)`.
/// Returns `+inf` for identical images.
pub fn psnr(reference: &ImageBuffer, candidate: &ImageBuffer, max: f64) -> Result<f64> {
    shape_check(reference, candidate)?;
    if max <= 0.0 {
        return Err(MetricError::InvalidConfig(format!(
            "psnr peak must be > 0, got {max}"
        )));
    }
    let mse = joint_mse(reference, candidate);
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (max * max / mse).log10())
}

/// Signal-to-reconstruction-error ratio in decibels, averaged over channels:
/// `SRE_b = 10·log10(mean(ref_b)² / MSE_b)`.
///
/// A channel with zero error contributes `+inf` and is excluded from the
/// average (all channels error-free → `+inf`). A channel with zero mean and
/// nonzero error makes the whole result `-inf`.
pub fn sre(reference: &ImageBuffer, candidate: &ImageBuffer) -> Result<f64> {
    shape_check(reference, candidate)?;
    let n = (reference.width() * reference.height()) as f64;
    let mut finite = Vec::new();
    for c in 0..reference.channels() {
        let ref_c = reference.channel(c);
        let cand_c = candidate.channel(c);
        let mean: f64 = ref_c.iter().sum::<f64>() / n;
        let mse: f64 = ref_c
            .iter()
            .zip(&cand_c)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / n;
        if mse == 0.0 {
            continue;
        }
        if mean == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        finite.push(10.0 * (mean * mean / mse).log10());
    }
    if finite.is_empty() {
        return Ok(f64::INFINITY);
    }
    Ok(finite.iter().sum::<f64>() / finite.len() as f64)
}
