use crate::{ImageError, Result};

/// Decoded raster image: row-major interleaved samples normalized to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<f64>,
}

impl ImageBuffer {
    /// Builds a buffer, validating the type invariants: dimensions ≥ 1,
    /// channels ∈ {1, 3}, sample count `w·h·c`, every sample in [0, 1].
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(ImageError::InvalidBuffer(format!(
                "dimensions must be >= 1, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(ImageError::InvalidBuffer(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        if samples.len() != width * height * channels {
            return Err(ImageError::InvalidBuffer(format!(
                "expected {} samples, got {}",
                width * height * channels,
                samples.len()
            )));
        }
        if let Some(s) = samples.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(ImageError::InvalidBuffer(format!(
                "sample {s} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Sample at (x, y) for the given channel.
    pub fn sample(&self, x: usize, y: usize, channel: usize) -> f64 {
        self.samples[(y * self.width + x) * self.channels + channel]
    }

    /// All samples of one channel, row-major.
    pub fn channel(&self, channel: usize) -> Vec<f64> {
        self.samples
            .iter()
            .skip(channel)
            .step_by(self.channels)
            .copied()
            .collect()
    }

    pub fn same_shape(&self, other: &ImageBuffer) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.channels == other.channels
    }

    pub fn shape_check(&self, other: &ImageBuffer) -> Result<()> {
        if !self.same_shape(other) {
            return Err(ImageError::ShapeMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }
}

/// Declared value range of a [`GrayImage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleRange {
    /// Samples in [0, 1].
    Unit,
    /// Samples in [0, 255].
    Byte,
}

impl SampleRange {
    pub fn max(self) -> f64 {
        match self {
            SampleRange::Unit => 1.0,
            SampleRange::Byte => 255.0,
        }
    }
}

/// Single-channel luminance image with a declared value range.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    range: SampleRange,
    samples: Vec<f64>,
}

impl GrayImage {
    pub fn new(
        width: usize,
        height: usize,
        range: SampleRange,
        samples: Vec<f64>,
    ) -> Result<Self> {
        if samples.len() != width * height {
            return Err(ImageError::InvalidBuffer(format!(
                "expected {} samples, got {}",
                width * height,
                samples.len()
            )));
        }
        let max = range.max();
        if let Some(s) = samples.iter().find(|s| !(0.0..=max).contains(*s)) {
            return Err(ImageError::InvalidBuffer(format!(
                "sample {s} outside [0, {max}]"
            )));
        }
        Ok(Self {
            width,
            height,
            range,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn range(&self) -> SampleRange {
        self.range
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    pub fn shape_check(&self, other: &GrayImage) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(ImageError::ShapeMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }
}
