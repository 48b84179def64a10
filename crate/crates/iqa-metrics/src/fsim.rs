use crate::{shape_check, MetricConfig, MetricError, Result};
use image_core::{fft2_filter, to_luminance, GrayImage, ImageBuffer, SampleRange};
use num_complex::Complex;
use std::f64::consts::PI;

// Phase-congruency constants: stabilizer added to local energy sums and the
// Rayleigh-model noise gain applied to the estimated noise spread.
const PC_EPSILON: f64 = 1e-4;
const PC_NOISE_K: f64 = 2.0;
// Butterworth prefilter keeping the bank inside the Nyquist square.
const LOWPASS_CUTOFF: f64 = 0.45;
const LOWPASS_ORDER: i32 = 15;

/// Feature similarity index.
///
/// Both images are converted to byte-range luminance, mean-pooled by
/// `F = max(1, round(min(H,W)/256))`, then compared through phase-congruency
/// and Scharr gradient-magnitude maps:
/// `FSIM = Σ S_PC·S_G·PCm / Σ PCm` with `PCm = max(PC1, PC2)`.
pub fn fsim(reference: &ImageBuffer, candidate: &ImageBuffer, cfg: &MetricConfig) -> Result<f64> {
    cfg.validate()?;
    shape_check(reference, candidate)?;

    let y1 = to_luminance(reference, SampleRange::Byte);
    let y2 = to_luminance(candidate, SampleRange::Byte);
    let factor = ((y1.width().min(y1.height()) as f64 / 256.0).round() as usize).max(1);
    let a = mean_pool(&y1, factor);
    let b = mean_pool(&y2, factor);
    if a.width().min(a.height()) < 32 {
        return Err(MetricError::TooSmall(a.width(), a.height(), "fsim", 32));
    }

    let pc1 = phase_congruency(&a, cfg)?;
    let pc2 = phase_congruency(&b, cfg)?;
    let g1 = scharr_magnitude(&a);
    let g2 = scharr_magnitude(&b);

    let (t1, t2) = (cfg.fsim_t1, cfg.fsim_t2);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..pc1.len() {
        let s_pc = (2.0 * pc1[i] * pc2[i] + t1) / (pc1[i] * pc1[i] + pc2[i] * pc2[i] + t1);
        let s_g = (2.0 * g1[i] * g2[i] + t2) / (g1[i] * g1[i] + g2[i] * g2[i] + t2);
        let pcm = pc1[i].max(pc2[i]);
        num += s_pc * s_g * pcm;
        den += pcm;
    }
    if den == 0.0 {
        // all-constant pair carries no phase structure to weight
        if reference.samples() == candidate.samples() {
            return Ok(1.0);
        }
        return Err(MetricError::Undefined(
            "no phase congruency in either image".into(),
        ));
    }
    Ok(num / den)
}

/// F×F block averaging; trailing partial blocks are dropped.
fn mean_pool(img: &GrayImage, factor: usize) -> GrayImage {
    if factor <= 1 {
        return img.clone();
    }
    let w = img.width() / factor;
    let h = img.height() / factor;
    let norm = (factor * factor) as f64;
    let mut samples = Vec::with_capacity(w * h);
    for by in 0..h {
        for bx in 0..w {
            let mut acc = 0.0;
            for dy in 0..factor {
                for dx in 0..factor {
                    acc += img.sample(bx * factor + dx, by * factor + dy);
                }
            }
            samples.push(acc / norm);
        }
    }
    GrayImage::new(w, h, img.range(), samples).expect("pooled image stays in range")
}

/// Gradient magnitude with the Scharr operator:
/// [3,10,3] smoothing, [1,0,-1] difference, normalized by 16.
/// Borders use zero padding.
fn scharr_magnitude(img: &GrayImage) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let at = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            img.sample(x as usize, y as usize)
        }
    };
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut gx = 0.0;
            let mut gy = 0.0;
            for (dy, sy) in [(-1isize, 3.0), (0, 10.0), (1, 3.0)] {
                gx += sy * (at(x - 1, y + dy) - at(x + 1, y + dy));
            }
            for (dx, sx) in [(-1isize, 3.0), (0, 10.0), (1, 3.0)] {
                gy += sx * (at(x + dx, y - 1) - at(x + dx, y + 1));
            }
            gx /= 16.0;
            gy /= 16.0;
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

/// Normalized frequency coordinate for index `i` of an axis of length `n`,
/// in unshifted FFT order (DC at 0).
fn freq_coord(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64 / n as f64
    } else {
        (i as f64 - n as f64) / n as f64
    }
}

/// Phase congruency map from a log-Gabor filter bank
/// (`fsim_scales` × `fsim_orientations`), following the standard monogenic
/// energy-over-amplitude construction with Rayleigh noise compensation
/// estimated from the smallest-scale response median.
fn phase_congruency(img: &GrayImage, cfg: &MetricConfig) -> Result<Vec<f64>> {
    let (w, h) = (img.width(), img.height());
    let n = w * h;
    let scales = cfg.fsim_scales;
    let orientations = cfg.fsim_orientations;
    let sigma_theta = (PI / orientations as f64) / 1.2;
    let log_sigma = cfg.fsim_sigma_f.ln();

    // radius, angle, and lowpass grids in unshifted order
    let mut radius = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    for y in 0..h {
        let fy = freq_coord(y, h);
        for x in 0..w {
            let fx = freq_coord(x, w);
            radius.push((fx * fx + fy * fy).sqrt());
            theta.push((-fy).atan2(fx));
        }
    }
    radius[0] = 1.0; // avoid log(0) at DC; the DC gain is zeroed below
    let lowpass: Vec<f64> = radius
        .iter()
        .map(|&r| 1.0 / (1.0 + (r / LOWPASS_CUTOFF).powi(2 * LOWPASS_ORDER)))
        .collect();

    let mut energy_all = vec![0.0; n];
    let mut an_all = vec![0.0; n];

    for o in 0..orientations {
        let angle = o as f64 * PI / orientations as f64;
        let spread: Vec<f64> = theta
            .iter()
            .map(|&t| {
                let ds = t.sin() * angle.cos() - t.cos() * angle.sin();
                let dc = t.cos() * angle.cos() + t.sin() * angle.sin();
                let dt = ds.atan2(dc).abs();
                (-dt * dt / (2.0 * sigma_theta * sigma_theta)).exp()
            })
            .collect();

        let mut sum_e = vec![0.0; n];
        let mut sum_o = vec![0.0; n];
        let mut sum_an = vec![0.0; n];
        let mut responses = Vec::with_capacity(scales);
        let mut tau = 0.0;

        for s in 0..scales {
            let wavelength = cfg.fsim_min_wavelength * cfg.fsim_mult.powi(s as i32);
            let f0 = 1.0 / wavelength;
            let mut transfer = Vec::with_capacity(n);
            for i in 0..n {
                let radial = (-(radius[i] / f0).ln().powi(2) / (2.0 * log_sigma * log_sigma))
                    .exp()
                    * lowpass[i];
                let gain = if i == 0 { 0.0 } else { radial * spread[i] };
                transfer.push(Complex::new(gain, 0.0));
            }
            let field = fft2_filter(img, &transfer)
                .map_err(|e| MetricError::Undefined(e.to_string()))?;
            let mut amplitudes = Vec::with_capacity(n);
            for (i, c) in field.iter().enumerate() {
                let an = c.norm();
                sum_e[i] += c.re;
                sum_o[i] += c.im;
                sum_an[i] += an;
                amplitudes.push(an);
            }
            if s == 0 {
                tau = median(&amplitudes) / (4.0f64.ln()).sqrt();
            }
            responses.push(field);
        }

        // energy along the mean phase direction
        let mut energy = vec![0.0; n];
        for i in 0..n {
            let x_energy = (sum_e[i] * sum_e[i] + sum_o[i] * sum_o[i]).sqrt() + PC_EPSILON;
            let mean_e = sum_e[i] / x_energy;
            let mean_o = sum_o[i] / x_energy;
            for field in &responses {
                let (re, im) = (field[i].re, field[i].im);
                energy[i] += re * mean_e + im * mean_o - (re * mean_o - im * mean_e).abs();
            }
        }

        // Rayleigh-model noise threshold from the smallest-scale estimate
        let inv_mult = 1.0 / cfg.fsim_mult;
        let total_tau = tau * (1.0 - inv_mult.powi(scales as i32)) / (1.0 - inv_mult);
        let noise_mean = total_tau * (PI / 2.0).sqrt();
        let noise_sigma = total_tau * ((4.0 - PI) / 2.0).sqrt();
        let threshold = noise_mean + PC_NOISE_K * noise_sigma;

        for i in 0..n {
            energy_all[i] += (energy[i] - threshold).max(0.0);
            an_all[i] += sum_an[i];
        }
    }

    Ok((0..n)
        .map(|i| energy_all[i] / (an_all[i] + PC_EPSILON))
        .collect())
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}
