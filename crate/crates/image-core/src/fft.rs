use crate::{GrayImage, ImageError, Result};
use num_complex::Complex;
use rustfft::FftPlanner;

/// Applies a frequency-domain transfer mask to an image:
/// `ifft2(fft2(img) ⊙ transfer)`.
///
/// The mask is laid out row-major in unshifted FFT order (DC at index 0).
/// Normalization is chosen so an all-ones mask returns the input exactly.
pub fn fft2_filter(img: &GrayImage, transfer: &[Complex<f64>]) -> Result<Vec<Complex<f64>>> {
    let (w, h) = (img.width(), img.height());
    if transfer.len() != w * h {
        return Err(ImageError::InvalidBuffer(format!(
            "transfer mask has {} entries, expected {}",
            transfer.len(),
            w * h
        )));
    }

    let mut field: Vec<Complex<f64>> = img
        .samples()
        .iter()
        .map(|&s| Complex::new(s, 0.0))
        .collect();

    let mut planner = FftPlanner::new();
    fft2_in_place(&mut field, w, h, &mut planner, rustfft::FftDirection::Forward);
    for (f, t) in field.iter_mut().zip(transfer) {
        *f *= t;
    }
    fft2_in_place(&mut field, w, h, &mut planner, rustfft::FftDirection::Inverse);

    let scale = 1.0 / (w * h) as f64;
    for f in &mut field {
        *f *= scale;
    }
    Ok(field)
}

fn fft2_in_place(
    data: &mut [Complex<f64>],
    width: usize,
    height: usize,
    planner: &mut FftPlanner<f64>,
    direction: rustfft::FftDirection,
) {
    let row_fft = planner.plan_fft(width, direction);
    for row in data.chunks_exact_mut(width) {
        row_fft.process(row);
    }

    let col_fft = planner.plan_fft(height, direction);
    let mut column = vec![Complex::new(0.0, 0.0); height];
    for x in 0..width {
        for y in 0..height {
            column[y] = data[y * width + x];
        }
        col_fft.process(&mut column);
        for y in 0..height {
            data[y * width + x] = column[y];
        }
    }
}

/// Reference implementation of [`fft2_filter`] that evaluates the DFT sums
/// directly (row-column naive transforms, no FFT algorithm). Slow; exists so
/// the FFT path can be checked against an independent route.
pub fn naive_dft2_filter(img: &GrayImage, transfer: &[Complex<f64>]) -> Result<Vec<Complex<f64>>> {
    let (w, h) = (img.width(), img.height());
    if transfer.len() != w * h {
        return Err(ImageError::InvalidBuffer(format!(
            "transfer mask has {} entries, expected {}",
            transfer.len(),
            w * h
        )));
    }

    let mut field: Vec<Complex<f64>> = img
        .samples()
        .iter()
        .map(|&s| Complex::new(s, 0.0))
        .collect();
    naive_dft2_in_place(&mut field, w, h, -1.0);
    for (f, t) in field.iter_mut().zip(transfer) {
        *f *= t;
    }
    naive_dft2_in_place(&mut field, w, h, 1.0);

    let scale = 1.0 / (w * h) as f64;
    for f in &mut field {
        *f *= scale;
    }
    Ok(field)
}

fn naive_dft1(input: &[Complex<f64>], sign: f64) -> Vec<Complex<f64>> {
    let n = input.len();
    (0..n)
        .map(|k| {
            let mut acc = Complex::new(0.0, 0.0);
            for (j, v) in input.iter().enumerate() {
                let angle = sign * std::f64::consts::TAU * (k * j) as f64 / n as f64;
                acc += v * Complex::new(angle.cos(), angle.sin());
            }
            acc
        })
        .collect()
}

fn naive_dft2_in_place(data: &mut [Complex<f64>], width: usize, height: usize, sign: f64) {
    for row in data.chunks_exact_mut(width) {
        let out = naive_dft1(row, sign);
        row.copy_from_slice(&out);
    }
    let mut column = vec![Complex::new(0.0, 0.0); height];
    for x in 0..width {
        for y in 0..height {
            column[y] = data[y * width + x];
        }
        let out = naive_dft1(&column, sign);
        for y in 0..height {
            data[y * width + x] = out[y];
        }
    }
}
