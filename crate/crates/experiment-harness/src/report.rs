use crate::run::{metric_beats, metric_value, METRIC_NAMES};
use crate::{AblationSummary, HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format {other:?}")),
        }
    }
}

/// Renders a summary. CSV columns are exactly
/// `image_id,condition,rmse,psnr,fsim,ssim,uiq,sre`; markdown mirrors the
/// per-image row-pair layout with the best value per metric bolded; json is
/// a lossless dump of the summary.
pub fn emit_report(summary: &AblationSummary, format: ReportFormat) -> Result<Vec<u8>> {
    if summary.records.is_empty() {
        return Err(HarnessError::EmptySummary);
    }
    match format {
        ReportFormat::Csv => Ok(emit_csv(summary).into_bytes()),
        ReportFormat::Markdown => Ok(emit_markdown(summary).into_bytes()),
        ReportFormat::Json => Ok(serde_json::to_vec_pretty(summary)?),
    }
}

fn csv_token(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

fn emit_csv(summary: &AblationSummary) -> String {
    let mut out = String::from("image_id,condition,rmse,psnr,fsim,ssim,uiq,sre\n");
    for r in &summary.records {
        out.push_str(&r.image_id);
        out.push(',');
        out.push_str(r.condition.label());
        for name in METRIC_NAMES {
            out.push(',');
            out.push_str(&csv_token(metric_value(&r.metrics, name)));
        }
        out.push('\n');
    }
    out
}

fn md_cell(v: f64, bold: bool) -> String {
    let text = if v.is_finite() {
        format!("{v:.5}")
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    };
    if bold {
        format!("**{text}**")
    } else {
        text
    }
}

const MD_HEADER: &str = "| Images | Approach | RMSE ↓ | PSNR ↑ | FSIM ↑ | SSIM ↑ | UIQ ↑ | SRE ↑ |\n|---|---|---|---|---|---|---|---|\n";

fn emit_markdown(summary: &AblationSummary) -> String {
    let mut out = String::from("## Per-image comparison\n\n");
    out.push_str(MD_HEADER);

    let mut image_ids = Vec::new();
    for r in &summary.records {
        if !image_ids.contains(&r.image_id.as_str()) {
            image_ids.push(r.image_id.as_str());
        }
    }
    let mut any_infinite = false;
    for id in image_ids {
        let rows: Vec<_> = summary
            .records
            .iter()
            .filter(|r| r.image_id == id)
            .collect();
        for row in &rows {
            out.push_str(&format!("| {} | {} |", id, row.condition.label()));
            for name in METRIC_NAMES {
                let v = metric_value(&row.metrics, name);
                if !v.is_finite() {
                    any_infinite = true;
                }
                // best value per metric among this image's rows
                let bold = rows
                    .iter()
                    .filter(|o| o.condition != row.condition)
                    .all(|o| metric_beats(name, v, metric_value(&o.metrics, name)))
                    && rows.len() > 1;
                out.push_str(&format!(" {} |", md_cell(v, bold)));
            }
            out.push('\n');
        }
    }

    if !summary.means.is_empty() {
        out.push_str("\n## Aggregate means\n\n");
        out.push_str(MD_HEADER);
        for m in &summary.means {
            out.push_str(&format!("| all | {} |", m.condition.label()));
            for (name, value) in [
                ("rmse", m.rmse),
                ("psnr", m.psnr),
                ("fsim", m.fsim),
                ("ssim", m.ssim),
                ("uiq", m.uiq),
                ("sre", m.sre),
            ] {
                let cell = match value {
                    None => "-".to_string(),
                    Some(v) => {
                        let bold = summary
                            .means
                            .iter()
                            .filter(|o| o.condition != m.condition)
                            .all(|o| match metric_mean(o, name) {
                                Some(other) => metric_beats(name, v, other),
                                None => true,
                            })
                            && summary.means.len() > 1;
                        md_cell(v, bold)
                    }
                };
                out.push_str(&format!(" {cell} |"));
            }
            out.push('\n');
        }
    }

    if any_infinite {
        out.push_str("\nNote: `inf` entries mark error-free reconstructions; they are excluded from the aggregate means.\n");
    }
    if summary.partial {
        out.push_str(&format!(
            "\nWARNING: partial results — {} image/condition pair(s) failed.\n",
            summary.failures.len()
        ));
    }
    out
}

fn metric_mean(m: &crate::ConditionMeans, name: &str) -> Option<f64> {
    match name {
        "rmse" => m.rmse,
        "psnr" => m.psnr,
        "fsim" => m.fsim,
        "ssim" => m.ssim,
        "uiq" => m.uiq,
        "sre" => m.sre,
        _ => None,
    }
}
