use crate::{ImageBuffer, ImageError, Result};

/// Supported on-disk formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    /// ASCII ("plain") PPM, magic `P3`.
    Ppm,
}

impl ImageFormat {
    /// Guesses from a file extension; PNG when unrecognized.
    pub fn from_path(path: &std::path::Path) -> ImageFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("ppm") | Some("PPM") => ImageFormat::Ppm,
            _ => ImageFormat::Png,
        }
    }
}

/// Decodes a byte stream into a normalized float buffer.
///
/// 8-bit samples map to `s/255`, 16-bit to `s/65535`. An alpha channel is
/// dropped.
pub fn decode(bytes: &[u8], format: ImageFormat) -> Result<ImageBuffer> {
    match format {
        ImageFormat::Png => decode_png(bytes),
        ImageFormat::Ppm => decode_ppm(bytes),
    }
}

/// Encodes a buffer at 8-bit depth. `decode(encode(img))` reproduces every
/// sample within 1/510 (the 8-bit quantization half-step).
pub fn encode(img: &ImageBuffer, format: ImageFormat) -> Result<Vec<u8>> {
    match format {
        ImageFormat::Png => encode_png(img),
        ImageFormat::Ppm => Ok(encode_ppm(img)),
    }
}

fn quantize_u8(s: f64) -> u8 {
    (s * 255.0).round() as u8
}

fn decode_png(bytes: &[u8]) -> Result<ImageBuffer> {
    use image::DynamicImage;

    let dynamic = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| ImageError::Decode {
            offset: 0,
            message: e.to_string(),
        })?;
    let width = dynamic.width() as usize;
    let height = dynamic.height() as usize;

    let (channels, samples) = match dynamic {
        DynamicImage::ImageLuma8(img) => {
            (1, img.into_raw().iter().map(|&v| v as f64 / 255.0).collect())
        }
        DynamicImage::ImageLumaA8(img) => (
            1,
            img.into_raw()
                .chunks_exact(2)
                .map(|px| px[0] as f64 / 255.0)
                .collect(),
        ),
        DynamicImage::ImageLuma16(img) => (
            1,
            img.into_raw().iter().map(|&v| v as f64 / 65535.0).collect(),
        ),
        DynamicImage::ImageLumaA16(img) => (
            1,
            img.into_raw()
                .chunks_exact(2)
                .map(|px| px[0] as f64 / 65535.0)
                .collect(),
        ),
        DynamicImage::ImageRgb8(img) => {
            (3, img.into_raw().iter().map(|&v| v as f64 / 255.0).collect())
        }
        DynamicImage::ImageRgba8(img) => (
            3,
            img.into_raw()
                .chunks_exact(4)
                .flat_map(|px| px[..3].iter().map(|&v| v as f64 / 255.0))
                .collect(),
        ),
        DynamicImage::ImageRgb16(img) => (
            3,
            img.into_raw().iter().map(|&v| v as f64 / 65535.0).collect(),
        ),
        DynamicImage::ImageRgba16(img) => (
            3,
            img.into_raw()
                .chunks_exact(4)
                .flat_map(|px| px[..3].iter().map(|&v| v as f64 / 65535.0))
                .collect(),
        ),
        other => {
            return Err(ImageError::Decode {
                offset: 0,
                message: format!("unsupported png pixel layout: {:?}", other.color()),
            })
        }
    };

    ImageBuffer::new(width, height, channels, samples)
}

fn encode_png(img: &ImageBuffer) -> Result<Vec<u8>> {
    let raw: Vec<u8> = img.samples().iter().map(|&s| quantize_u8(s)).collect();
    let mut out = Vec::new();
    let color = match img.channels() {
        1 => image::ExtendedColorType::L8,
        _ => image::ExtendedColorType::Rgb8,
    };
    image::write_buffer_with_format(
        &mut std::io::Cursor::new(&mut out),
        &raw,
        img.width() as u32,
        img.height() as u32,
        color,
        image::ImageFormat::Png,
    )
    .map_err(|e| ImageError::Io(std::io::Error::other(e.to_string())))?;
    Ok(out)
}

/// Pull-based token scanner over the PPM byte stream that remembers where
/// it is, so decode errors can name a byte offset.
struct PpmScanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PpmScanner<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn error(&self, message: impl Into<String>) -> ImageError {
        ImageError::Decode {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Result<&'a str> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("unexpected end of stream"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| {
            self.pos = start;
            self.error("non-ascii token")
        })
    }

    fn next_uint(&mut self, what: &str) -> Result<u64> {
        let start_of_token = {
            self.skip_whitespace_and_comments();
            self.pos
        };
        let token = self.next_token()?;
        token.parse().map_err(|_| {
            self.pos = start_of_token;
            self.error(format!("invalid {what}: {token:?}"))
        })
    }
}

fn decode_ppm(bytes: &[u8]) -> Result<ImageBuffer> {
    let mut scan = PpmScanner::new(bytes);
    let magic = scan.next_token()?;
    if magic != "P3" {
        return Err(ImageError::Decode {
            offset: 0,
            message: format!("expected magic P3, got {magic:?}"),
        });
    }
    let width = scan.next_uint("width")? as usize;
    let height = scan.next_uint("height")? as usize;
    let maxval = scan.next_uint("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(scan.error(format!("maxval {maxval} outside 1..=65535")));
    }
    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| scan.error("dimension overflow"))?;
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let v = scan.next_uint("sample")?;
        if v > maxval {
            return Err(scan.error(format!("sample {v} exceeds maxval {maxval}")));
        }
        samples.push(v as f64 / maxval as f64);
    }
    ImageBuffer::new(width, height, 3, samples)
}

fn encode_ppm(img: &ImageBuffer) -> Vec<u8> {
    let mut out = format!("P3\n{} {}\n255\n", img.width(), img.height());
    for y in 0..img.height() {
        let mut row = Vec::with_capacity(img.width() * 3);
        for x in 0..img.width() {
            // gray buffers replicate the single channel
            for c in 0..3 {
                let ch = if img.channels() == 1 { 0 } else { c };
                row.push(quantize_u8(img.sample(x, y, ch)).to_string());
            }
        }
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_1x1_red() {
        let img = decode(b"P3 1 1 255 255 0 0", ImageFormat::Ppm).unwrap();
        assert_eq!(img.width(), 1);
        assert_eq!(img.height(), 1);
        assert_eq!(img.channels(), 3);
        assert_eq!(img.samples(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn ppm_comments_and_16bit() {
        let img = decode(
            b"P3\n# a comment\n1 1\n65535\n65535 0 32768\n",
            ImageFormat::Ppm,
        )
        .unwrap();
        assert_eq!(img.samples()[0], 1.0);
        assert!((img.samples()[2] - 32768.0 / 65535.0).abs() < 1e-15);
    }

    #[test]
    fn ppm_malformed_reports_offset() {
        let err = decode(b"P3 1 1 255 255 0 oops", ImageFormat::Ppm).unwrap_err();
        match err {
            ImageError::Decode { offset, .. } => assert_eq!(offset, 17),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ppm_truncated_stream() {
        assert!(matches!(
            decode(b"P3 2 2 255 1 2 3", ImageFormat::Ppm),
            Err(ImageError::Decode { .. })
        ));
    }

    #[test]
    fn png_all_zero() {
        let img = ImageBuffer::new(2, 2, 3, vec![0.0; 12]).unwrap();
        let bytes = encode(&img, ImageFormat::Png).unwrap();
        let back = decode(&bytes, ImageFormat::Png).unwrap();
        assert!(back.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn png_gray_midpoint() {
        let img = ImageBuffer::new(1, 1, 1, vec![128.0 / 255.0]).unwrap();
        let bytes = encode(&img, ImageFormat::Png).unwrap();
        let back = decode(&bytes, ImageFormat::Png).unwrap();
        assert!((back.samples()[0] - 128.0 / 255.0).abs() < 1e-15);
    }

    #[test]
    fn png_rgba_drops_alpha() {
        let raw = vec![10u8, 20, 30, 128];
        let mut bytes = Vec::new();
        image::write_buffer_with_format(
            &mut std::io::Cursor::new(&mut bytes),
            &raw,
            1,
            1,
            image::ExtendedColorType::Rgba8,
            image::ImageFormat::Png,
        )
        .unwrap();
        let img = decode(&bytes, ImageFormat::Png).unwrap();
        assert_eq!(img.channels(), 3);
        assert!((img.samples()[0] - 10.0 / 255.0).abs() < 1e-15);
    }

    #[test]
    fn png_garbage_is_decode_error() {
        assert!(matches!(
            decode(b"not a png", ImageFormat::Png),
            Err(ImageError::Decode { .. })
        ));
    }

    #[test]
    fn ppm_white_uses_255_token() {
        let img = ImageBuffer::new(1, 1, 1, vec![1.0]).unwrap();
        let text = String::from_utf8(encode(&img, ImageFormat::Ppm).unwrap()).unwrap();
        assert!(text.contains("255 255 255"));
    }

    #[test]
    fn round_trip_error_within_half_step() {
        // deterministic pseudo-random 4x4 buffer
        let samples: Vec<f64> = (0..48).map(|i| ((i * 37 + 11) % 101) as f64 / 100.0).collect();
        let img = ImageBuffer::new(4, 4, 3, samples.clone()).unwrap();
        for format in [ImageFormat::Png, ImageFormat::Ppm] {
            let back = decode(&encode(&img, format).unwrap(), format).unwrap();
            for (a, b) in samples.iter().zip(back.samples()) {
                assert!((a - b).abs() <= 1.0 / 510.0 + 1e-12);
            }
            // second round trip is exact
            let again = decode(&encode(&back, format).unwrap(), format).unwrap();
            assert_eq!(back.samples(), again.samples());
        }
    }
}
