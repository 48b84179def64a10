use crate::{GrayImage, ImageError, Result};

/// Paired first and second moments of one window position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub covar: f64,
}

/// Joint windowed statistics over two same-sized images.
///
/// Emits one tuple per fully-contained window position, scanning row-major
/// with the given stride. Statistics are plain population moments, or
/// weighted moments when `weights` (row-major `window²` mask, any positive
/// scale) is supplied.
pub fn sliding_window_stats(
    a: &GrayImage,
    b: &GrayImage,
    window: usize,
    stride: usize,
    weights: Option<&[f64]>,
) -> Result<Vec<WindowStats>> {
    a.shape_check(b)?;
    if window == 0 || window > a.width().min(a.height()) {
        return Err(ImageError::InvalidBuffer(format!(
            "window {window} does not fit {}x{}",
            a.width(),
            a.height()
        )));
    }
    if let Some(w) = weights {
        if w.len() != window * window {
            return Err(ImageError::InvalidBuffer(format!(
                "weight mask has {} entries, expected {}",
                w.len(),
                window * window
            )));
        }
    }
    let stride = stride.max(1);

    let uniform = vec![1.0; window * window];
    let mask = weights.unwrap_or(&uniform);
    let total: f64 = mask.iter().sum();

    let mut out = Vec::new();
    let mut y = 0;
    while y + window <= a.height() {
        let mut x = 0;
        while x + window <= a.width() {
            out.push(window_moments(a, b, x, y, window, mask, total));
            x += stride;
        }
        y += stride;
    }
    Ok(out)
}

fn window_moments(
    a: &GrayImage,
    b: &GrayImage,
    x0: usize,
    y0: usize,
    window: usize,
    mask: &[f64],
    total: f64,
) -> WindowStats {
    let mut mean_a = 0.0;
    let mut mean_b = 0.0;
    for dy in 0..window {
        for dx in 0..window {
            let w = mask[dy * window + dx];
            mean_a += w * a.sample(x0 + dx, y0 + dy);
            mean_b += w * b.sample(x0 + dx, y0 + dy);
        }
    }
    mean_a /= total;
    mean_b /= total;

    let mut var_a = 0.0;
    let mut var_b = 0.0;
    let mut covar = 0.0;
    for dy in 0..window {
        for dx in 0..window {
            let w = mask[dy * window + dx];
            let da = a.sample(x0 + dx, y0 + dy) - mean_a;
            let db = b.sample(x0 + dx, y0 + dy) - mean_b;
            var_a += w * da * da;
            var_b += w * db * db;
            covar += w * da * db;
        }
    }
    WindowStats {
        mean_a,
        mean_b,
        var_a: var_a / total,
        var_b: var_b / total,
        covar: covar / total,
    }
}
