use crate::{Condition, HarnessError, Manifest, Result};
use iqa_metrics::{compare_all, MetricConfig, MetricReport};
use model_clients::{GenerationParams, ModelClient, PromptPair};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// One completed image × condition run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationRecord {
    pub image_id: String,
    pub condition: Condition,
    /// Present iff `condition == WithPrompt`.
    pub prompts: Option<PromptPair>,
    pub metrics: MetricReport,
    pub generated_path: PathBuf,
}

/// An image × condition pair that failed; kept out of the summary but
/// reported so partial tables are visibly partial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecordedFailure {
    pub image_id: String,
    pub condition: Condition,
    pub error: String,
}

/// Per-condition metric means, taken over finite values only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionMeans {
    pub condition: Condition,
    pub rmse: Option<f64>,
    pub psnr: Option<f64>,
    pub fsim: Option<f64>,
    pub ssim: Option<f64>,
    pub uiq: Option<f64>,
    pub sre: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationSummary {
    pub records: Vec<AblationRecord>,
    pub failures: Vec<RecordedFailure>,
    pub means: Vec<ConditionMeans>,
    /// Per metric: images on which the with-prompt condition is strictly
    /// better (only counted when both conditions completed).
    pub win_counts: BTreeMap<String, usize>,
    /// True when at least one image × condition pair failed.
    pub partial: bool,
    /// Peak used for PSNR, recorded for the consistency audit.
    pub psnr_max: f64,
}

pub(crate) const METRIC_NAMES: [&str; 6] = ["rmse", "psnr", "fsim", "ssim", "uiq", "sre"];

pub(crate) fn metric_value(report: &MetricReport, name: &str) -> f64 {
    match name {
        "rmse" => report.rmse,
        "psnr" => report.psnr,
        "fsim" => report.fsim,
        "ssim" => report.ssim,
        "uiq" => report.uiq,
        "sre" => report.sre,
        _ => unreachable!("unknown metric {name}"),
    }
}

/// True when `a` beats `b` for the metric's declared direction
/// (lower is better for rmse, higher for the rest).
pub(crate) fn metric_beats(name: &str, a: f64, b: f64) -> bool {
    if name == "rmse" {
        a < b
    } else {
        a > b
    }
}

impl AblationSummary {
    pub fn assemble(
        records: Vec<AblationRecord>,
        failures: Vec<RecordedFailure>,
        psnr_max: f64,
    ) -> Self {
        let mut means = Vec::new();
        for condition in [Condition::NoPrompt, Condition::WithPrompt] {
            let of_condition: Vec<&AblationRecord> = records
                .iter()
                .filter(|r| r.condition == condition)
                .collect();
            if of_condition.is_empty() {
                continue;
            }
            let mean_of = |name: &str| -> Option<f64> {
                let finite: Vec<f64> = of_condition
                    .iter()
                    .map(|r| metric_value(&r.metrics, name))
                    .filter(|v| v.is_finite())
                    .collect();
                if finite.is_empty() {
                    None
                } else {
                    Some(finite.iter().sum::<f64>() / finite.len() as f64)
                }
            };
            means.push(ConditionMeans {
                condition,
                rmse: mean_of("rmse"),
                psnr: mean_of("psnr"),
                fsim: mean_of("fsim"),
                ssim: mean_of("ssim"),
                uiq: mean_of("uiq"),
                sre: mean_of("sre"),
            });
        }

        let mut win_counts: BTreeMap<String, usize> =
            METRIC_NAMES.iter().map(|n| (n.to_string(), 0)).collect();
        let image_ids: Vec<&str> = {
            let mut seen = Vec::new();
            for r in &records {
                if !seen.contains(&r.image_id.as_str()) {
                    seen.push(r.image_id.as_str());
                }
            }
            seen
        };
        for id in image_ids {
            let with = records
                .iter()
                .find(|r| r.image_id == id && r.condition == Condition::WithPrompt);
            let without = records
                .iter()
                .find(|r| r.image_id == id && r.condition == Condition::NoPrompt);
            if let (Some(with), Some(without)) = (with, without) {
                for name in METRIC_NAMES {
                    let a = metric_value(&with.metrics, name);
                    let b = metric_value(&without.metrics, name);
                    if metric_beats(name, a, b) {
                        *win_counts.get_mut(name).unwrap() += 1;
                    }
                }
            }
        }

        let partial = !failures.is_empty();
        Self {
            records,
            failures,
            means,
            win_counts,
            partial,
            psnr_max,
        }
    }
}

/// Runs every image × condition of the manifest against the two backends.
///
/// Metrics are computed between the ORIGINAL input image and each generated
/// image. Generated images are persisted under
/// `out_dir/<image_id>/<condition>.png`. Per-pair failures are recorded and
/// skipped; a run where nothing succeeds is an error.
pub fn run_ablation(
    manifest: &Manifest,
    prompter: &ModelClient,
    generator: &ModelClient,
    cfg: &MetricConfig,
    out_dir: &Path,
) -> Result<AblationSummary> {
    manifest.validate()?;
    let mut records = Vec::new();
    let mut failures = Vec::new();

    for entry in &manifest.images {
        let input = match std::fs::read(&entry.path).map_err(HarnessError::from).and_then(|b| {
            image_core::decode(&b, image_core::ImageFormat::from_path(&entry.path))
                .map_err(HarnessError::from)
        }) {
            Ok(img) => img,
            Err(e) => {
                for &condition in &manifest.conditions {
                    failures.push(RecordedFailure {
                        image_id: entry.id.clone(),
                        condition,
                        error: e.to_string(),
                    });
                }
                continue;
            }
        };

        let params = GenerationParams {
            seed: Some(manifest.seed_for(&entry.id)),
            ..manifest.params
        };

        for &condition in &manifest.conditions {
            match run_one(
                manifest, prompter, generator, cfg, out_dir, &entry.id, &input, condition, &params,
            ) {
                Ok(record) => records.push(record),
                Err(e) => failures.push(RecordedFailure {
                    image_id: entry.id.clone(),
                    condition,
                    error: e.to_string(),
                }),
            }
        }
    }

    if records.is_empty() {
        return Err(HarnessError::EmptyRun);
    }
    Ok(AblationSummary::assemble(records, failures, cfg.psnr_max))
}

#[allow(clippy::too_many_arguments)]
fn run_one(
    manifest: &Manifest,
    prompter: &ModelClient,
    generator: &ModelClient,
    cfg: &MetricConfig,
    out_dir: &Path,
    image_id: &str,
    input: &image_core::ImageBuffer,
    condition: Condition,
    params: &GenerationParams,
) -> std::result::Result<AblationRecord, Box<dyn std::error::Error>> {
    let prompts = match condition {
        Condition::WithPrompt => Some(prompter.request_prompts(input, &manifest.instruction)?),
        Condition::NoPrompt => None,
    };
    let generated = generator.generate_image(input, prompts.as_ref(), params)?;

    let dir = out_dir.join(image_id);
    std::fs::create_dir_all(&dir)?;
    let generated_path = dir.join(format!("{}.png", condition.label()));
    std::fs::write(
        &generated_path,
        image_core::encode(&generated, image_core::ImageFormat::Png)?,
    )?;

    let metrics = compare_all(input, &generated, cfg)?;
    Ok(AblationRecord {
        image_id: image_id.to_string(),
        condition,
        prompts,
        metrics,
        generated_path,
    })
}

/// A record whose PSNR and RMSE disagree beyond tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossCheckViolation {
    pub image_id: String,
    pub condition: Condition,
    pub rmse: f64,
    pub psnr: f64,
    pub deviation_db: f64,
}

/// Audits every record against the identity `psnr == -20·log10(rmse)`
/// (valid for a unit peak). Records with zero error satisfy it trivially.
pub fn cross_check_report(
    summary: &AblationSummary,
    tolerance_db: f64,
) -> Vec<CrossCheckViolation> {
    if summary.psnr_max != 1.0 {
        return Vec::new();
    }
    summary
        .records
        .iter()
        .filter(|r| r.metrics.rmse > 0.0 && r.metrics.psnr.is_finite())
        .filter_map(|r| {
            let deviation_db = (r.metrics.psnr + 20.0 * r.metrics.rmse.log10()).abs();
            (deviation_db > tolerance_db).then(|| CrossCheckViolation {
                image_id: r.image_id.clone(),
                condition: r.condition,
                rmse: r.metrics.rmse,
                psnr: r.metrics.psnr,
                deviation_db,
            })
        })
        .collect()
}
