//! Six full-reference similarity metrics over [`image_core::ImageBuffer`]
//! pairs: RMSE, PSNR, SSIM, UIQ, SRE, and FSIM.
//!
//! Every metric is a pure function of `(reference, candidate)`; callers may
//! evaluate many pairs concurrently.

mod config;
mod fsim;
mod pointwise;
mod report;
mod ssim;
mod uiq;

pub use config::MetricConfig;
pub use fsim::fsim;
pub use pointwise::{psnr, rmse, sre};
pub use report::MetricReport;
pub use ssim::ssim;
pub use uiq::uiq;

/// Errors produced while evaluating a metric.
#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("shape mismatch: reference {0}x{1}x{2}, candidate {3}x{4}x{5}")]
    ShapeMismatch(usize, usize, usize, usize, usize, usize),

    #[error("image {0}x{1} too small for {2} (needs min dimension {3})")]
    TooSmall(usize, usize, &'static str, usize),

    #[error("metric undefined: {0}")]
    Undefined(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, MetricError>;

fn shape_check(
    reference: &image_core::ImageBuffer,
    candidate: &image_core::ImageBuffer,
) -> Result<()> {
    if !reference.same_shape(candidate) {
        return Err(MetricError::ShapeMismatch(
            reference.width(),
            reference.height(),
            reference.channels(),
            candidate.width(),
            candidate.height(),
            candidate.channels(),
        ));
    }
    Ok(())
}

/// Evaluates all six metrics on one image pair. Each field equals the
/// corresponding standalone operation's result.
pub fn compare_all(
    reference: &image_core::ImageBuffer,
    candidate: &image_core::ImageBuffer,
    cfg: &MetricConfig,
) -> Result<MetricReport> {
    cfg.validate()?;
    shape_check(reference, candidate)?;
    Ok(MetricReport {
        rmse: rmse(reference, candidate)?,
        psnr: psnr(reference, candidate, cfg.psnr_max)?,
        fsim: fsim(reference, candidate, cfg)?,
        ssim: ssim(reference, candidate, cfg)?,
        uiq: uiq(reference, candidate, cfg)?,
        sre: sre(reference, candidate)?,
    })
}
