//! Independent reference recomputations backing the acceptance suite.
//!
//! Everything here is deliberately written from scratch against the metric
//! definitions, sharing no code with the production paths it checks: plain
//! double loops for the windowed metrics and a naive separable DFT for the
//! frequency-domain pipeline.

use image_core::ImageBuffer;
use iqa_metrics::MetricConfig;
use num_complex::Complex;
use std::f64::consts::{PI, TAU};

// ---------------------------------------------------------------------------
// pointwise reference metrics
// ---------------------------------------------------------------------------

pub fn rmse_reference(a: &ImageBuffer, b: &ImageBuffer) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.samples().len() {
        let d = a.samples()[i] - b.samples()[i];
        acc += d * d;
    }
    (acc / a.samples().len() as f64).sqrt()
}

pub fn psnr_reference(a: &ImageBuffer, b: &ImageBuffer, max: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.samples().len() {
        let d = a.samples()[i] - b.samples()[i];
        acc += d * d;
    }
    let mse = acc / a.samples().len() as f64;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (max * max / mse).log10()
    }
}

pub fn sre_reference(a: &ImageBuffer, b: &ImageBuffer) -> f64 {
    let n = (a.width() * a.height()) as f64;
    let mut finite = Vec::new();
    for c in 0..a.channels() {
        let mut mean = 0.0;
        let mut mse = 0.0;
        for y in 0..a.height() {
            for x in 0..a.width() {
                mean += a.sample(x, y, c);
                let d = a.sample(x, y, c) - b.sample(x, y, c);
                mse += d * d;
            }
        }
        mean /= n;
        mse /= n;
        if mse == 0.0 {
            continue;
        }
        if mean == 0.0 {
            return f64::NEG_INFINITY;
        }
        finite.push(10.0 * (mean * mean / mse).log10());
    }
    if finite.is_empty() {
        f64::INFINITY
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    }
}

// ---------------------------------------------------------------------------
// luminance helper shared by the windowed references
// ---------------------------------------------------------------------------

fn luminance(img: &ImageBuffer, scale: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(img.width() * img.height());
    for y in 0..img.height() {
        for x in 0..img.width() {
            let v = if img.channels() == 1 {
                img.sample(x, y, 0)
            } else {
                0.299 * img.sample(x, y, 0)
                    + 0.587 * img.sample(x, y, 1)
                    + 0.114 * img.sample(x, y, 2)
            };
            out.push(v * scale);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// windowed reference metrics (brute-force double loops)
// ---------------------------------------------------------------------------

pub fn ssim_reference(a: &ImageBuffer, b: &ImageBuffer, cfg: &MetricConfig) -> f64 {
    let (w, h) = (a.width(), a.height());
    let ya = luminance(a, cfg.psnr_max);
    let yb = luminance(b, cfg.psnr_max);
    let win = cfg.ssim_window;
    let center = (win as f64 - 1.0) / 2.0;
    let mut weights = Vec::with_capacity(win * win);
    for wy in 0..win {
        for wx in 0..win {
            let dx = wx as f64 - center;
            let dy = wy as f64 - center;
            weights.push((-(dx * dx + dy * dy) / (2.0 * cfg.ssim_sigma * cfg.ssim_sigma)).exp());
        }
    }
    let total: f64 = weights.iter().sum();
    let c1 = (cfg.ssim_k1 * cfg.psnr_max).powi(2);
    let c2 = (cfg.ssim_k2 * cfg.psnr_max).powi(2);

    let mut acc = 0.0;
    let mut count = 0usize;
    for y0 in 0..=(h - win) {
        for x0 in 0..=(w - win) {
            let (mut ma, mut mb) = (0.0, 0.0);
            for wy in 0..win {
                for wx in 0..win {
                    let g = weights[wy * win + wx] / total;
                    ma += g * ya[(y0 + wy) * w + x0 + wx];
                    mb += g * yb[(y0 + wy) * w + x0 + wx];
                }
            }
            let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
            for wy in 0..win {
                for wx in 0..win {
                    let g = weights[wy * win + wx] / total;
                    let da = ya[(y0 + wy) * w + x0 + wx] - ma;
                    let db = yb[(y0 + wy) * w + x0 + wx] - mb;
                    va += g * da * da;
                    vb += g * db * db;
                    cov += g * da * db;
                }
            }
            acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            count += 1;
        }
    }
    acc / count as f64
}

pub fn uiq_reference(a: &ImageBuffer, b: &ImageBuffer, cfg: &MetricConfig) -> f64 {
    let (w, h) = (a.width(), a.height());
    let ya = luminance(a, 1.0);
    let yb = luminance(b, 1.0);
    let win = cfg.uiq_window;
    let n = (win * win) as f64;

    let mut acc = 0.0;
    let mut count = 0usize;
    for y0 in 0..=(h - win) {
        for x0 in 0..=(w - win) {
            let (mut ma, mut mb) = (0.0, 0.0);
            for wy in 0..win {
                for wx in 0..win {
                    ma += ya[(y0 + wy) * w + x0 + wx];
                    mb += yb[(y0 + wy) * w + x0 + wx];
                }
            }
            ma /= n;
            mb /= n;
            let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
            for wy in 0..win {
                for wx in 0..win {
                    let da = ya[(y0 + wy) * w + x0 + wx] - ma;
                    let db = yb[(y0 + wy) * w + x0 + wx] - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            }
            va /= n;
            vb /= n;
            cov /= n;
            let contrast = va + vb;
            let lum = ma * ma + mb * mb;
            acc += if contrast == 0.0 && lum == 0.0 {
                1.0
            } else if contrast == 0.0 || lum == 0.0 {
                0.0
            } else {
                4.0 * cov * ma * mb / (contrast * lum)
            };
            count += 1;
        }
    }
    acc / count as f64
}

// ---------------------------------------------------------------------------
// FSIM reference pipeline (naive separable DFT, own filter construction)
// ---------------------------------------------------------------------------

fn dft1(input: &[Complex<f64>], sign: f64) -> Vec<Complex<f64>> {
    let n = input.len();
    (0..n)
        .map(|k| {
            let mut acc = Complex::new(0.0, 0.0);
            for (j, v) in input.iter().enumerate() {
                let angle = sign * TAU * (k * j) as f64 / n as f64;
                acc += v * Complex::new(angle.cos(), angle.sin());
            }
            acc
        })
        .collect()
}

fn dft2(data: &[Complex<f64>], w: usize, h: usize, sign: f64) -> Vec<Complex<f64>> {
    let mut out = data.to_vec();
    for row in out.chunks_exact_mut(w) {
        let t = dft1(row, sign);
        row.copy_from_slice(&t);
    }
    for x in 0..w {
        let column: Vec<Complex<f64>> = (0..h).map(|y| out[y * w + x]).collect();
        let t = dft1(&column, sign);
        for y in 0..h {
            out[y * w + x] = t[y];
        }
    }
    out
}

fn filter_with(spectrum: &[Complex<f64>], gain: &[f64], w: usize, h: usize) -> Vec<Complex<f64>> {
    let masked: Vec<Complex<f64>> = spectrum
        .iter()
        .zip(gain)
        .map(|(s, &g)| s * g)
        .collect();
    let mut field = dft2(&masked, w, h, 1.0);
    let scale = 1.0 / (w * h) as f64;
    for f in &mut field {
        *f *= scale;
    }
    field
}

fn freq(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64 / n as f64
    } else {
        (i as f64 - n as f64) / n as f64
    }
}

fn median_of(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

fn phase_congruency_reference(gray: &[f64], w: usize, h: usize, cfg: &MetricConfig) -> Vec<f64> {
    let n = w * h;
    let epsilon = 1e-4;
    let noise_k = 2.0;
    let sigma_theta = (PI / cfg.fsim_orientations as f64) / 1.2;
    let log_sigma = cfg.fsim_sigma_f.ln();

    let mut radius = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    for y in 0..h {
        for x in 0..w {
            let (fx, fy) = (freq(x, w), freq(y, h));
            radius.push((fx * fx + fy * fy).sqrt());
            theta.push((-fy).atan2(fx));
        }
    }
    radius[0] = 1.0;

    let spectrum = dft2(
        &gray.iter().map(|&v| Complex::new(v, 0.0)).collect::<Vec<_>>(),
        w,
        h,
        -1.0,
    );

    let mut energy_all = vec![0.0; n];
    let mut an_all = vec![0.0; n];

    for o in 0..cfg.fsim_orientations {
        let angle = o as f64 * PI / cfg.fsim_orientations as f64;
        let mut sum_e = vec![0.0; n];
        let mut sum_o = vec![0.0; n];
        let mut sum_an = vec![0.0; n];
        let mut fields = Vec::new();
        let mut tau = 0.0;

        for s in 0..cfg.fsim_scales {
            let f0 = 1.0 / (cfg.fsim_min_wavelength * cfg.fsim_mult.powi(s as i32));
            let gain: Vec<f64> = (0..n)
                .map(|i| {
                    if i == 0 {
                        return 0.0;
                    }
                    let radial = (-(radius[i] / f0).ln().powi(2)
                        / (2.0 * log_sigma * log_sigma))
                        .exp()
                        / (1.0 + (radius[i] / 0.45).powi(30));
                    let ds = theta[i].sin() * angle.cos() - theta[i].cos() * angle.sin();
                    let dc = theta[i].cos() * angle.cos() + theta[i].sin() * angle.sin();
                    let dt = ds.atan2(dc).abs();
                    radial * (-dt * dt / (2.0 * sigma_theta * sigma_theta)).exp()
                })
                .collect();
            let field = filter_with(&spectrum, &gain, w, h);
            for i in 0..n {
                sum_e[i] += field[i].re;
                sum_o[i] += field[i].im;
                sum_an[i] += field[i].norm();
            }
            if s == 0 {
                tau = median_of(field.iter().map(|c| c.norm()).collect()) / (4.0f64.ln()).sqrt();
            }
            fields.push(field);
        }

        let inv = 1.0 / cfg.fsim_mult;
        let total_tau = tau * (1.0 - inv.powi(cfg.fsim_scales as i32)) / (1.0 - inv);
        let threshold = total_tau * (PI / 2.0).sqrt()
            + noise_k * total_tau * ((4.0 - PI) / 2.0).sqrt();

        for i in 0..n {
            let x_energy = (sum_e[i] * sum_e[i] + sum_o[i] * sum_o[i]).sqrt() + epsilon;
            let (me, mo) = (sum_e[i] / x_energy, sum_o[i] / x_energy);
            let mut energy = 0.0;
            for field in &fields {
                let (re, im) = (field[i].re, field[i].im);
                energy += re * me + im * mo - (re * mo - im * me).abs();
            }
            energy_all[i] += (energy - threshold).max(0.0);
            an_all[i] += sum_an[i];
        }
    }

    (0..n).map(|i| energy_all[i] / (an_all[i] + epsilon)).collect()
}

fn scharr_reference(gray: &[f64], w: usize, h: usize) -> Vec<f64> {
    let at = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            gray[y as usize * w + x as usize]
        }
    };
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = (3.0 * (at(x - 1, y - 1) - at(x + 1, y - 1))
                + 10.0 * (at(x - 1, y) - at(x + 1, y))
                + 3.0 * (at(x - 1, y + 1) - at(x + 1, y + 1)))
                / 16.0;
            let gy = (3.0 * (at(x - 1, y - 1) - at(x - 1, y + 1))
                + 10.0 * (at(x, y - 1) - at(x, y + 1))
                + 3.0 * (at(x + 1, y - 1) - at(x + 1, y + 1)))
                / 16.0;
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

fn pool(gray: &[f64], w: usize, h: usize, factor: usize) -> (Vec<f64>, usize, usize) {
    if factor <= 1 {
        return (gray.to_vec(), w, h);
    }
    let (pw, ph) = (w / factor, h / factor);
    let mut out = Vec::with_capacity(pw * ph);
    for by in 0..ph {
        for bx in 0..pw {
            let mut acc = 0.0;
            for dy in 0..factor {
                for dx in 0..factor {
                    acc += gray[(by * factor + dy) * w + bx * factor + dx];
                }
            }
            out.push(acc / (factor * factor) as f64);
        }
    }
    (out, pw, ph)
}

/// Step-by-step FSIM recomputation on a naive-DFT path.
pub fn fsim_reference(a: &ImageBuffer, b: &ImageBuffer, cfg: &MetricConfig) -> f64 {
    let factor = ((a.width().min(a.height()) as f64 / 256.0).round() as usize).max(1);
    let (ya, w, h) = pool(&luminance(a, 255.0), a.width(), a.height(), factor);
    let (yb, _, _) = pool(&luminance(b, 255.0), b.width(), b.height(), factor);

    let pc1 = phase_congruency_reference(&ya, w, h, cfg);
    let pc2 = phase_congruency_reference(&yb, w, h, cfg);
    let g1 = scharr_reference(&ya, w, h);
    let g2 = scharr_reference(&yb, w, h);

    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..pc1.len() {
        let s_pc = (2.0 * pc1[i] * pc2[i] + cfg.fsim_t1)
            / (pc1[i] * pc1[i] + pc2[i] * pc2[i] + cfg.fsim_t1);
        let s_g = (2.0 * g1[i] * g2[i] + cfg.fsim_t2)
            / (g1[i] * g1[i] + g2[i] * g2[i] + cfg.fsim_t2);
        let pcm = pc1[i].max(pc2[i]);
        num += s_pc * s_g * pcm;
        den += pcm;
    }
    num / den
}
