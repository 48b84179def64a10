use crate::{GrayImage, ImageBuffer, SampleRange};

/// Converts a buffer to luminance with BT.601 weights
/// (`Y = 0.299 R + 0.587 G + 0.114 B`), scaled to the requested range.
/// Single-channel input is passed through scaled.
pub fn to_luminance(img: &ImageBuffer, range: SampleRange) -> GrayImage {
    let scale = range.max();
    let samples: Vec<f64> = match img.channels() {
        1 => img.samples().iter().map(|&s| s * scale).collect(),
        _ => img
            .samples()
            .chunks_exact(3)
            .map(|px| (0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]) * scale)
            .collect(),
    };
    GrayImage::new(img.width(), img.height(), range, samples)
        .expect("luminance of a valid buffer is in range")
}
