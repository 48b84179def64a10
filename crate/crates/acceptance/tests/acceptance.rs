//! End-to-end acceptance suite. Every test prints one `ACCEPTANCE <name>:
//! PASS` line on success so the gate can be audited from the test log.

use acceptance::{
    fsim_reference, psnr_reference, rmse_reference, sre_reference, ssim_reference, uiq_reference,
};
use experiment_harness::{
    cross_check_report, emit_report, run_ablation, AblationRecord, AblationSummary, Condition,
    Manifest, ReportFormat,
};
use image_core::{ImageBuffer, ImageFormat};
use iqa_metrics::{compare_all, fsim, psnr, rmse, sre, ssim, uiq, MetricConfig, MetricReport};
use mock_backends::{MockBehavior, MockServer};
use model_clients::{BackendEndpoint, ModelClient};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::path::Path;
use std::time::Instant;

fn splitmix(v: u64) -> u64 {
    let mut v = v;
    v ^= v >> 30;
    v = v.wrapping_mul(0xbf58476d1ce4e5b9);
    v ^= v >> 27;
    v = v.wrapping_mul(0x94d049bb133111eb);
    v ^= v >> 31;
    v
}

/// Deterministic pseudo-random image with samples in [0, 1).
fn pseudo(w: usize, h: usize, c: usize, salt: u64) -> ImageBuffer {
    let samples = (0..w * h * c)
        .map(|i| {
            let v = splitmix((i as u64).wrapping_add(salt.wrapping_mul(0x9e3779b97f4a7c15)));
            (v >> 33) as f64 / (1u64 << 31) as f64
        })
        .collect();
    ImageBuffer::new(w, h, c, samples).unwrap()
}

/// Smooth synthetic scene, 64x64 RGB, distinct per salt.
fn scene(salt: u64) -> ImageBuffer {
    let mut samples = Vec::with_capacity(64 * 64 * 3);
    for y in 0..64 {
        for x in 0..64 {
            let (fx, fy) = (x as f64 / 63.0, y as f64 / 63.0);
            let s = salt as f64;
            let r = 0.5 + 0.4 * ((fx * (3.0 + s)) * std::f64::consts::PI).sin() * fy;
            let g = 0.5 + 0.3 * ((fy * (2.0 + s)) * std::f64::consts::PI).cos() * fx;
            let b = 0.3 + 0.5 * fx * fy;
            samples.extend([r.clamp(0.0, 1.0), g.clamp(0.0, 1.0), b.clamp(0.0, 1.0)]);
        }
    }
    ImageBuffer::new(64, 64, 3, samples).unwrap()
}

// ---------------------------------------------------------------------------
// 1. every metric is perfect on identical pairs
// ---------------------------------------------------------------------------

#[test]
fn metric_perfection_on_identical_pairs() {
    let start = Instant::now();
    let cfg = MetricConfig::default();
    for i in 0..50u64 {
        let w = 32 + (splitmix(i * 2 + 1) % 17) as usize;
        let h = 32 + (splitmix(i * 2 + 2) % 17) as usize;
        let c = if i % 2 == 0 { 1 } else { 3 };
        let a = pseudo(w, h, c, i + 1000);
        let report = compare_all(&a, &a, &cfg).unwrap();
        assert_eq!(report.rmse, 0.0, "image {i}: rmse must be exactly 0");
        assert_eq!(report.psnr, f64::INFINITY, "image {i}: psnr must be +inf");
        assert_eq!(report.sre, f64::INFINITY, "image {i}: sre must be +inf");
        assert!((report.ssim - 1.0).abs() < 1e-9, "image {i}: ssim {}", report.ssim);
        assert!((report.fsim - 1.0).abs() < 1e-9, "image {i}: fsim {}", report.fsim);
        assert!((report.uiq - 1.0).abs() < 1e-9, "image {i}: uiq {}", report.uiq);
        report.validate().unwrap();
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}, budget 10s");
    println!("ACCEPTANCE metric_perfection_on_identical_pairs: PASS ({elapsed:?})");
}

// ---------------------------------------------------------------------------
// 2. production metrics match brute-force recomputation on random pairs
// ---------------------------------------------------------------------------

#[test]
fn metrics_match_independent_recomputation() {
    let start = Instant::now();
    let cfg = MetricConfig::default();
    for i in 0..200u64 {
        let w = 11 + (splitmix(i * 3 + 1) % 22) as usize;
        let h = 11 + (splitmix(i * 3 + 2) % 22) as usize;
        let c = if i % 3 == 0 { 1 } else { 3 };
        let a = pseudo(w, h, c, i * 2 + 1);
        let b = pseudo(w, h, c, i * 2 + 2);

        let d = (rmse(&a, &b).unwrap() - rmse_reference(&a, &b)).abs();
        assert!(d < 1e-10, "pair {i}: rmse deviates by {d}");
        let d = (psnr(&a, &b, 1.0).unwrap() - psnr_reference(&a, &b, 1.0)).abs();
        assert!(d < 1e-10, "pair {i}: psnr deviates by {d}");
        let d = (sre(&a, &b).unwrap() - sre_reference(&a, &b)).abs();
        assert!(d < 1e-10, "pair {i}: sre deviates by {d}");
        let d = (ssim(&a, &b, &cfg).unwrap() - ssim_reference(&a, &b, &cfg)).abs();
        assert!(d < 1e-9, "pair {i}: ssim deviates by {d}");
        let d = (uiq(&a, &b, &cfg).unwrap() - uiq_reference(&a, &b, &cfg)).abs();
        assert!(d < 1e-9, "pair {i}: uiq deviates by {d}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget 30s");
    println!("ACCEPTANCE metrics_match_independent_recomputation: PASS ({elapsed:?})");
}

// ---------------------------------------------------------------------------
// 3. the frequency-domain metric agrees with a naive-DFT reimplementation
// ---------------------------------------------------------------------------

fn blur3(img: &ImageBuffer) -> ImageBuffer {
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0.0; w * h * img.channels()];
    for ch in 0..img.channels() {
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                let mut cnt = 0.0;
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                        if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
                            acc += img.sample(nx as usize, ny as usize, ch);
                            cnt += 1.0;
                        }
                    }
                }
                out[(y * w + x) * img.channels() + ch] = acc / cnt;
            }
        }
    }
    ImageBuffer::new(w, h, img.channels(), out).unwrap()
}

#[test]
fn fsim_matches_naive_dft_reference() {
    let cfg = MetricConfig::default();
    for i in 0..10u64 {
        let a = scene(i);
        let b = if i % 2 == 0 { blur3(&a) } else { scene(i + 1) };
        let fast = fsim(&a, &b, &cfg).unwrap();
        let slow = fsim_reference(&a, &b, &cfg);
        assert!(
            (fast - slow).abs() < 1e-6,
            "pair {i}: production {fast} vs reference {slow}"
        );
        let swapped = fsim(&b, &a, &cfg).unwrap();
        assert!(
            (fast - swapped).abs() < 1e-12,
            "pair {i}: asymmetric ({fast} vs {swapped})"
        );
    }
    println!("ACCEPTANCE fsim_matches_naive_dft_reference: PASS");
}

// ---------------------------------------------------------------------------
// 4. psnr/rmse consistency, on our outputs and on the published tables
// ---------------------------------------------------------------------------

fn record(image_id: &str, condition: Condition, metrics: MetricReport) -> AblationRecord {
    AblationRecord {
        image_id: image_id.into(),
        condition,
        prompts: (condition == Condition::WithPrompt).then(|| model_clients::PromptPair {
            positive: "p".into(),
            negative: "n".into(),
            raw_response: "Prompt: p\nNegative prompt: n".into(),
        }),
        metrics,
        generated_path: format!("out/{image_id}/{}.png", condition.label()).into(),
    }
}

/// Rows transcribed from the published with/without-prompt comparison:
/// the aggregate pair plus the four per-image pairs.
fn published_rows() -> Vec<(&'static str, Condition, MetricReport)> {
    let report = |rmse, psnr, fsim, ssim, uiq, sre| MetricReport {
        rmse,
        psnr,
        fsim,
        ssim,
        uiq,
        sre,
    };
    vec![
        ("aggregate", Condition::NoPrompt, report(0.01931, 34.2736, 0.28770, 0.78507, 0.03133, 48.7848)),
        ("aggregate", Condition::WithPrompt, report(0.01008, 39.8750, 0.36375, 0.92199, 0.07616, 51.6555)),
        ("dog", Condition::NoPrompt, report(0.01952, 34.1125, 0.28610, 0.78434, 0.00179, 52.8297)),
        ("dog", Condition::WithPrompt, report(0.01265, 37.9437, 0.39774, 0.88115, 0.05121, 55.0153)),
        ("astronaut", Condition::NoPrompt, report(0.01798, 34.9009, 0.27823, 0.79330, 0.00104, 51.0724)),
        ("astronaut", Condition::WithPrompt, report(0.01262, 37.9785, 0.30214, 0.88230, 0.02420, 52.6086)),
        ("plane", Condition::NoPrompt, report(0.01275, 37.7418, 0.31769, 0.92368, 0.00861, 53.8197)),
        ("plane", Condition::WithPrompt, report(0.00767, 42.2708, 0.40353, 0.96597, 0.10995, 55.7809)),
        ("skyscraper", Condition::NoPrompt, report(0.02603, 31.6809, 0.27245, 0.58362, -0.00236, 43.1745)),
        ("skyscraper", Condition::WithPrompt, report(0.01839, 34.6985, 0.31015, 0.74276, 0.03159, 44.6849)),
    ]
}

#[test]
fn psnr_rmse_identity_holds() {
    // our own metrics satisfy the unit-peak identity essentially exactly
    for i in 0..20u64 {
        let a = pseudo(24, 24, 3, i * 7 + 1);
        let b = pseudo(24, 24, 3, i * 7 + 2);
        let r = rmse(&a, &b).unwrap();
        let p = psnr(&a, &b, 1.0).unwrap();
        let deviation = (p + 20.0 * r.log10()).abs();
        assert!(deviation < 1e-9, "pair {i}: identity off by {deviation} dB");
    }

    // the transcribed published rows satisfy it to their printed precision
    let records = published_rows()
        .into_iter()
        .map(|(id, condition, metrics)| record(id, condition, metrics))
        .collect();
    let summary = AblationSummary::assemble(records, Vec::new(), 1.0);
    let violations = cross_check_report(&summary, 0.25);
    assert!(violations.is_empty(), "published rows failed: {violations:?}");

    // and the audit actually detects a corrupted row
    let mut corrupted = summary.clone();
    corrupted.records[0].metrics.psnr += 1.0;
    assert_eq!(cross_check_report(&corrupted, 0.25).len(), 1);
    println!("ACCEPTANCE psnr_rmse_identity_holds: PASS");
}

// ---------------------------------------------------------------------------
// 5. metrics degrade monotonically with growing noise
// ---------------------------------------------------------------------------

#[test]
fn metrics_degrade_monotonically_with_noise() {
    let cfg = MetricConfig::default();
    let base = scene(3);

    // one fixed standard-normal field, scaled per level, so each level is a
    // strictly larger perturbation of the same direction
    let mut rng = ChaCha12Rng::seed_from_u64(41);
    let field: Vec<f64> = (0..base.samples().len())
        .map(|_| {
            let u1 = ((rng.next_u64() >> 11) as f64 + 1.0) / (1u64 << 53) as f64;
            let u2 = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
        .collect();

    let mut previous: Option<MetricReport> = None;
    for sigma in [0.01, 0.02, 0.04, 0.08] {
        let samples: Vec<f64> = base
            .samples()
            .iter()
            .zip(&field)
            .map(|(&s, &z)| (s + sigma * z).clamp(0.0, 1.0))
            .collect();
        let noisy = ImageBuffer::new(base.width(), base.height(), 3, samples).unwrap();
        let report = compare_all(&base, &noisy, &cfg).unwrap();
        if let Some(prev) = &previous {
            assert!(report.rmse > prev.rmse, "rmse not increasing at sigma {sigma}");
            assert!(report.psnr < prev.psnr, "psnr not decreasing at sigma {sigma}");
            assert!(report.ssim < prev.ssim, "ssim not decreasing at sigma {sigma}");
            assert!(report.fsim < prev.fsim, "fsim not decreasing at sigma {sigma}");
        }
        previous = Some(report);
    }
    println!("ACCEPTANCE metrics_degrade_monotonically_with_noise: PASS");
}

// ---------------------------------------------------------------------------
// 6. end-to-end ablation against the mock backends
// ---------------------------------------------------------------------------

fn write_manifest(dir: &Path, master_seed: i64) -> Manifest {
    let ids = ["dog", "astronaut", "plane", "skyscraper"];
    let mut images = Vec::new();
    for (i, id) in ids.iter().enumerate() {
        let path = dir.join(format!("{id}.png"));
        std::fs::write(
            &path,
            image_core::encode(&scene(i as u64), ImageFormat::Png).unwrap(),
        )
        .unwrap();
        images.push(serde_json::json!({"id": id, "path": path}));
    }
    Manifest::from_json(
        &serde_json::json!({"master_seed": master_seed, "images": images}).to_string(),
    )
    .unwrap()
}

fn clients(server: &MockServer) -> (ModelClient, ModelClient) {
    let endpoint = BackendEndpoint::new(server.base_url());
    (
        ModelClient::new(endpoint.clone()).unwrap(),
        ModelClient::new(endpoint).unwrap(),
    )
}

#[test]
fn end_to_end_ablation_prefers_prompted_outputs() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_manifest(dir.path(), 7);
    let server = MockServer::spawn(MockBehavior::default()).unwrap();
    let (prompter, generator) = clients(&server);
    let summary = run_ablation(
        &manifest,
        &prompter,
        &generator,
        &MetricConfig::default(),
        &dir.path().join("out"),
    )
    .unwrap();

    assert_eq!(summary.records.len(), 8);
    assert!(summary.failures.is_empty());
    // every metric improves with prompt on every one of the four images
    for (name, wins) in &summary.win_counts {
        assert_eq!(*wins, 4, "metric {name} won only {wins}/4 images");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, budget 60s");
    println!("ACCEPTANCE end_to_end_ablation_prefers_prompted_outputs: PASS ({elapsed:?})");
}

// ---------------------------------------------------------------------------
// 7. identical seeds reproduce byte-identical reports
// ---------------------------------------------------------------------------

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_manifest(dir.path(), 23);
    let server = MockServer::spawn(MockBehavior::default()).unwrap();
    let (prompter, generator) = clients(&server);
    let cfg = MetricConfig::default();

    let csv_of = |out: &Path| {
        let summary = run_ablation(&manifest, &prompter, &generator, &cfg, out).unwrap();
        emit_report(&summary, ReportFormat::Csv).unwrap()
    };
    let first = csv_of(&dir.path().join("a"));
    let second = csv_of(&dir.path().join("b"));
    assert_eq!(first, second, "reports differ between identical runs");
    assert!(first.starts_with(b"image_id,condition,rmse,psnr,fsim,ssim,uiq,sre\n"));
    println!("ACCEPTANCE reruns_are_byte_identical: PASS");
}

// ---------------------------------------------------------------------------
// 8. the HTTP wire contract is exactly the documented shape
// ---------------------------------------------------------------------------

fn key_set(value: &serde_json::Value) -> Vec<&str> {
    let mut keys: Vec<&str> = value
        .as_object()
        .expect("body must be a JSON object")
        .keys()
        .map(String::as_str)
        .collect();
    keys.sort_unstable();
    keys
}

#[test]
fn wire_contract_matches_documentation() {
    use base64::Engine as _;

    let server = MockServer::spawn(MockBehavior::default()).unwrap();
    let http = reqwest::blocking::Client::new();
    let png = image_core::encode(&scene(9), ImageFormat::Png).unwrap();
    let png_b64 = base64::engine::general_purpose::STANDARD.encode(&png);

    // prompt endpoint: exactly the documented request fields round-trip
    let request = serde_json::json!({
        "image_png_b64": png_b64,
        "instruction": "Generate prompt and negative prompt for this image.",
    });
    assert_eq!(key_set(&request), ["image_png_b64", "instruction"]);
    let body: serde_json::Value = http
        .post(format!("{}/v1/prompts", server.base_url()))
        .json(&request)
        .send()
        .unwrap()
        .error_for_status()
        .unwrap()
        .json()
        .unwrap();
    assert_eq!(key_set(&body), ["reply"]);
    assert!(body["reply"].is_string());

    // img2img endpoint
    let request = serde_json::json!({
        "init_png_b64": png_b64,
        "prompt": "a scene",
        "negative_prompt": "noise",
        "strength": 0.6,
        "steps": 30,
        "guidance": 7.5,
        "seed": 11,
    });
    assert_eq!(
        key_set(&request),
        ["guidance", "init_png_b64", "negative_prompt", "prompt", "seed", "steps", "strength"]
    );
    let body: serde_json::Value = http
        .post(format!("{}/v1/img2img", server.base_url()))
        .json(&request)
        .send()
        .unwrap()
        .error_for_status()
        .unwrap()
        .json()
        .unwrap();
    assert_eq!(key_set(&body), ["image_png_b64"]);
    let returned = base64::engine::general_purpose::STANDARD
        .decode(body["image_png_b64"].as_str().unwrap())
        .unwrap();
    assert_eq!(image_core::decode(&returned, ImageFormat::Png).unwrap().width(), 64);

    // a bad request reports the documented error shape
    let response = http
        .post(format!("{}/v1/img2img", server.base_url()))
        .json(&serde_json::json!({
            "init_png_b64": png_b64,
            "prompt": "",
            "negative_prompt": "",
            "strength": 7.0,
            "steps": 30,
            "guidance": 7.5,
            "seed": null,
        }))
        .send()
        .unwrap();
    assert_eq!(response.status(), 400);
    let body: serde_json::Value = response.json().unwrap();
    assert_eq!(key_set(&body), ["error"]);

    // the typed client serializes to the same key sets
    let typed = serde_json::to_value(model_clients::wire::PromptRequest {
        image_png_b64: "x".into(),
        instruction: "y".into(),
    })
    .unwrap();
    assert_eq!(key_set(&typed), ["image_png_b64", "instruction"]);
    let typed = serde_json::to_value(model_clients::wire::Img2ImgRequest {
        init_png_b64: "x".into(),
        prompt: String::new(),
        negative_prompt: String::new(),
        strength: 0.6,
        steps: 30,
        guidance: 7.5,
        seed: None,
    })
    .unwrap();
    assert_eq!(
        key_set(&typed),
        ["guidance", "init_png_b64", "negative_prompt", "prompt", "seed", "steps", "strength"]
    );
    println!("ACCEPTANCE wire_contract_matches_documentation: PASS");
}
