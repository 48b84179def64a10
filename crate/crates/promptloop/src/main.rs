mod config;

use clap::{Parser, Subcommand};
use config::FileConfig;
use experiment_harness::{
    cross_check_report, emit_report, run_ablation, Condition, HarnessError, Manifest, ReportFormat,
};
use image_core::{ImageBuffer, ImageFormat};
use iqa_metrics::MetricConfig;
use model_clients::{BackendEndpoint, ClientError, GenerationParams, ModelClient, PromptPair};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

// Stable exit-code contract.
const EXIT_INPUT: u8 = 2;
const EXIT_BACKEND: u8 = 3;
const EXIT_EMPTY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "promptloop",
    about = "Image-to-image ablation toolkit: similarity metrics, prompt extraction, generation, reports"
)]
struct Cli {
    /// Optional TOML config file; flags and PROMPTLOOP_* env vars override it.
    #[arg(long, global = true, env = "PROMPTLOOP_CONFIG")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute all six similarity metrics between two images.
    Compare {
        reference: PathBuf,
        candidate: PathBuf,
        /// Output format: text or json.
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long)]
        psnr_max: Option<f64>,
    },
    /// Ask the vision-LLM backend for a prompt/negative-prompt pair.
    Prompt {
        image: PathBuf,
        #[arg(long, env = "PROMPTLOOP_PROMPTER")]
        endpoint: String,
        #[arg(long)]
        instruction: Option<String>,
        /// Also print the verbatim model reply.
        #[arg(long)]
        raw: bool,
    },
    /// Run one img2img generation.
    Generate {
        image: PathBuf,
        #[arg(long, env = "PROMPTLOOP_GENERATOR")]
        endpoint: String,
        #[arg(long)]
        prompt: Option<String>,
        #[arg(long, default_value = "")]
        negative: String,
        #[arg(long)]
        strength: Option<f64>,
        #[arg(long)]
        steps: Option<u32>,
        #[arg(long)]
        guidance: Option<f64>,
        #[arg(long)]
        seed: Option<i64>,
        /// Where to write the generated PNG.
        #[arg(long, default_value = "generated.png")]
        out: PathBuf,
    },
    /// Run the with/without-prompt ablation over a manifest.
    Ablate {
        manifest: PathBuf,
        #[arg(long, env = "PROMPTLOOP_PROMPTER")]
        prompter: String,
        #[arg(long, env = "PROMPTLOOP_GENERATOR")]
        generator: String,
        #[arg(long, env = "PROMPTLOOP_OUT", default_value = "out")]
        out: PathBuf,
        /// Comma-separated subset of {no_prompt, with_prompt}.
        #[arg(long)]
        conditions: Option<String>,
        /// Override the manifest master seed.
        #[arg(long)]
        seed: Option<i64>,
    },
    /// Serve the deterministic mock backends.
    MockServe {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// TOML file with MockBehavior overrides.
        #[arg(long)]
        behavior_file: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

type CliResult = Result<(), (u8, String)>;

fn input_err(message: impl std::fmt::Display) -> (u8, String) {
    (EXIT_INPUT, message.to_string())
}

fn backend_err(e: ClientError) -> (u8, String) {
    match e {
        ClientError::InvalidParams(_) | ClientError::Image(_) => (EXIT_INPUT, e.to_string()),
        _ => (EXIT_BACKEND, e.to_string()),
    }
}

fn load_image(path: &Path) -> Result<ImageBuffer, (u8, String)> {
    let bytes = std::fs::read(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    image_core::decode(&bytes, ImageFormat::from_path(path))
        .map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn endpoint_from(url: &str, file: &FileConfig) -> BackendEndpoint {
    let mut endpoint = BackendEndpoint::new(url);
    if let Some(t) = file.timeout_secs {
        endpoint.timeout_secs = t;
    }
    if let Some(r) = file.max_retries {
        endpoint.max_retries = r;
    }
    endpoint.auth_token = file.auth_token.clone();
    endpoint
}

fn run(cli: Cli) -> CliResult {
    let file = FileConfig::load(cli.config.as_deref()).map_err(input_err)?;
    match cli.command {
        Command::Compare {
            reference,
            candidate,
            format,
            psnr_max,
        } => cmd_compare(&reference, &candidate, &format, file.metric_config(psnr_max)),
        Command::Prompt {
            image,
            endpoint,
            instruction,
            raw,
        } => cmd_prompt(&image, &endpoint, instruction.as_deref(), raw, &file),
        Command::Generate {
            image,
            endpoint,
            prompt,
            negative,
            strength,
            steps,
            guidance,
            seed,
            out,
        } => {
            let mut params = GenerationParams::default();
            if let Some(v) = strength {
                params.strength = v;
            }
            if let Some(v) = steps {
                params.steps = v;
            }
            if let Some(v) = guidance {
                params.guidance = v;
            }
            params.seed = seed;
            cmd_generate(&image, &endpoint, prompt, negative, params, &out, &file)
        }
        Command::Ablate {
            manifest,
            prompter,
            generator,
            out,
            conditions,
            seed,
        } => cmd_ablate(
            &manifest, &prompter, &generator, &out, conditions, seed, &file,
        ),
        Command::MockServe {
            port,
            behavior_file,
        } => cmd_mock_serve(port, behavior_file.as_deref()),
    }
}

fn cmd_compare(
    reference: &Path,
    candidate: &Path,
    format: &str,
    cfg: MetricConfig,
) -> CliResult {
    let ref_img = load_image(reference)?;
    let cand_img = load_image(candidate)?;
    let report = iqa_metrics::compare_all(&ref_img, &cand_img, &cfg).map_err(input_err)?;
    match format {
        "json" => println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(input_err)?
        ),
        "text" => {
            let db = |v: f64| {
                if v.is_finite() {
                    format!("{v:.6}")
                } else if v > 0.0 {
                    "inf".into()
                } else {
                    "-inf".into()
                }
            };
            println!("rmse  {:.6}", report.rmse);
            println!("psnr  {}", db(report.psnr));
            println!("fsim  {:.6}", report.fsim);
            println!("ssim  {:.6}", report.ssim);
            println!("uiq   {:.6}", report.uiq);
            println!("sre   {}", db(report.sre));
        }
        other => return Err(input_err(format!("unknown format {other:?}"))),
    }
    Ok(())
}

fn cmd_prompt(
    image: &Path,
    endpoint: &str,
    instruction: Option<&str>,
    raw: bool,
    file: &FileConfig,
) -> CliResult {
    let img = load_image(image)?;
    let client = ModelClient::new(endpoint_from(endpoint, file)).map_err(backend_err)?;
    let instruction = instruction
        .map(str::to_owned)
        .or_else(|| file.instruction.clone())
        .unwrap_or_else(|| model_clients::DEFAULT_INSTRUCTION.to_string());
    let pair: PromptPair = client
        .request_prompts(&img, &instruction)
        .map_err(backend_err)?;
    println!("positive: {}", pair.positive);
    println!("negative: {}", pair.negative);
    if raw {
        println!("--- raw reply ---");
        println!("{}", pair.raw_response);
    }
    Ok(())
}

fn cmd_generate(
    image: &Path,
    endpoint: &str,
    prompt: Option<String>,
    negative: String,
    params: GenerationParams,
    out: &Path,
    file: &FileConfig,
) -> CliResult {
    let img = load_image(image)?;
    let client = ModelClient::new(endpoint_from(endpoint, file)).map_err(backend_err)?;
    let prompts = prompt.map(|positive| PromptPair {
        raw_response: positive.clone(),
        positive,
        negative,
    });
    let generated = client
        .generate_image(&img, prompts.as_ref(), &params)
        .map_err(backend_err)?;
    std::fs::write(
        out,
        image_core::encode(&generated, ImageFormat::Png).map_err(input_err)?,
    )
    .map_err(input_err)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_ablate(
    manifest_path: &Path,
    prompter: &str,
    generator: &str,
    out: &Path,
    conditions: Option<String>,
    seed: Option<i64>,
    file: &FileConfig,
) -> CliResult {
    let mut manifest = Manifest::from_file(manifest_path).map_err(input_err)?;
    if let Some(seed) = seed {
        manifest.master_seed = seed;
    }
    if let Some(instruction) = &file.instruction {
        manifest.instruction = instruction.clone();
    }
    if let Some(list) = conditions {
        let parsed: Result<Vec<Condition>, String> =
            list.split(',').map(|s| s.trim().parse()).collect();
        manifest.conditions = parsed.map_err(input_err)?;
        manifest.validate().map_err(input_err)?;
    }

    let prompter = ModelClient::new(endpoint_from(prompter, file)).map_err(backend_err)?;
    let generator = ModelClient::new(endpoint_from(generator, file)).map_err(backend_err)?;
    let cfg = file.metric_config(None);

    let summary = run_ablation(&manifest, &prompter, &generator, &cfg, out).map_err(|e| match e
    {
        HarnessError::EmptyRun => (EXIT_EMPTY, e.to_string()),
        HarnessError::InvalidManifest(_) => (EXIT_INPUT, e.to_string()),
        other => (EXIT_BACKEND, other.to_string()),
    })?;

    std::fs::create_dir_all(out).map_err(input_err)?;
    for (name, format) in [
        ("report.csv", ReportFormat::Csv),
        ("report.md", ReportFormat::Markdown),
        ("report.json", ReportFormat::Json),
    ] {
        let bytes = emit_report(&summary, format).map_err(input_err)?;
        std::fs::write(out.join(name), bytes).map_err(input_err)?;
    }

    let violations = cross_check_report(&summary, 1e-6);
    if !violations.is_empty() {
        eprintln!("warning: {} psnr/rmse consistency violation(s)", violations.len());
    }

    print!(
        "{}",
        String::from_utf8(emit_report(&summary, ReportFormat::Markdown).map_err(input_err)?)
            .expect("markdown is utf-8")
    );
    println!(
        "\n{} record(s), {} failure(s); reports under {}",
        summary.records.len(),
        summary.failures.len(),
        out.display()
    );
    Ok(())
}

fn cmd_mock_serve(port: u16, behavior_file: Option<&Path>) -> CliResult {
    let behavior = match behavior_file {
        None => mock_backends::MockBehavior::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))?
        }
    };
    mock_backends::serve_blocking(behavior, port, true).map_err(input_err)
}
