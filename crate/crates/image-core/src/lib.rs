//! Shared image primitives: decoding/encoding, luminance conversion, and the
//! windowed-statistics and frequency-filtering kernels the quality metrics
//! are built on.
//!
//! All operations are pure functions on immutable inputs and are safe to
//! call concurrently.

mod buffer;
mod codec;
mod fft;
mod luminance;
mod stats;

pub use buffer::{GrayImage, ImageBuffer, SampleRange};
pub use codec::{decode, encode, ImageFormat};
pub use fft::{fft2_filter, naive_dft2_filter};
pub use luminance::to_luminance;
pub use stats::{sliding_window_stats, WindowStats};

/// Errors produced by image-core operations.
#[derive(Debug, thiserror::Error)]
pub enum ImageError {
    /// Malformed input stream. `offset` is the byte position at which the
    /// stream stopped making sense, when known.
    #[error("decode error at byte offset {offset}: {message}")]
    Decode { offset: usize, message: String },

    /// Two images that must share dimensions do not.
    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),

    /// A buffer whose fields violate the type invariants.
    #[error("invalid buffer: {0}")]
    InvalidBuffer(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ImageError>;
