use crate::{mock_generate, mock_prompts, MockBehavior, MockError, Result};
use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine;
use image_core::ImageFormat;
use serde::{Deserialize, Serialize};
use std::net::SocketAddr;
use std::sync::Arc;

// Wire bodies, field names bit-exact with the documented contract.
#[derive(Deserialize)]
struct PromptRequest {
    image_png_b64: String,
    instruction: String,
}

#[derive(Serialize)]
struct PromptResponse {
    reply: String,
}

#[derive(Deserialize)]
struct Img2ImgRequest {
    init_png_b64: String,
    prompt: String,
    negative_prompt: String,
    strength: f64,
    steps: u32,
    #[allow(dead_code)]
    guidance: f64,
    seed: Option<i64>,
}

#[derive(Serialize)]
struct Img2ImgResponse {
    image_png_b64: String,
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

struct AppState {
    behavior: MockBehavior,
    log_requests: bool,
}

type Reject = (StatusCode, Json<ErrorBody>);

fn bad_request(message: impl Into<String>) -> Reject {
    (
        StatusCode::BAD_REQUEST,
        Json(ErrorBody {
            error: message.into(),
        }),
    )
}

fn decode_image(b64: &str) -> std::result::Result<image_core::ImageBuffer, Reject> {
    let bytes = base64::engine::general_purpose::STANDARD
        .decode(b64)
        .map_err(|e| bad_request(format!("invalid base64: {e}")))?;
    image_core::decode(&bytes, ImageFormat::Png)
        .map_err(|e| bad_request(format!("invalid png: {e}")))
}

async fn handle_prompts(
    State(state): State<Arc<AppState>>,
    Json(req): Json<PromptRequest>,
) -> std::result::Result<Json<PromptResponse>, Reject> {
    if state.log_requests {
        println!("POST /v1/prompts");
    }
    let image = decode_image(&req.image_png_b64)?;
    Ok(Json(PromptResponse {
        reply: mock_prompts(&image, &req.instruction, &state.behavior),
    }))
}

async fn handle_img2img(
    State(state): State<Arc<AppState>>,
    Json(req): Json<Img2ImgRequest>,
) -> std::result::Result<Json<Img2ImgResponse>, Reject> {
    if state.log_requests {
        println!("POST /v1/img2img");
    }
    if !(req.strength > 0.0 && req.strength <= 1.0) {
        return Err(bad_request(format!(
            "strength {} outside (0, 1]",
            req.strength
        )));
    }
    if req.steps < 1 {
        return Err(bad_request("steps must be >= 1"));
    }
    let init = decode_image(&req.init_png_b64)?;
    let out = mock_generate(
        &init,
        &req.prompt,
        &req.negative_prompt,
        req.seed,
        &state.behavior,
    );
    let bytes = image_core::encode(&out, ImageFormat::Png)
        .map_err(|e| bad_request(format!("encode failed: {e}")))?;
    Ok(Json(Img2ImgResponse {
        image_png_b64: base64::engine::general_purpose::STANDARD.encode(bytes),
    }))
}

async fn handle_healthz() -> &'static str {
    "ok"
}

fn router(behavior: MockBehavior, log_requests: bool) -> Router {
    let state = Arc::new(AppState {
        behavior,
        log_requests,
    });
    Router::new()
        .route("/v1/prompts", post(handle_prompts))
        .route("/v1/img2img", post(handle_img2img))
        .route("/healthz", get(handle_healthz))
        .with_state(state)
}

/// Serves the wire contract on `port` until the process is interrupted.
/// A port of 0 picks an ephemeral one; the bound address is printed.
pub fn serve_blocking(behavior: MockBehavior, port: u16, log_requests: bool) -> Result<()> {
    behavior.validate()?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener =
            tokio::net::TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], port))).await?;
        println!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, router(behavior, log_requests))
            .await
            .map_err(MockError::Io)
    })
}

/// In-process mock server on an ephemeral port, shut down on drop.
/// Intended for tests and the hermetic ablation path.
pub struct MockServer {
    addr: SocketAddr,
    shutdown: Option<tokio::sync::oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<()>>,
}

impl MockServer {
    pub fn spawn(behavior: MockBehavior) -> Result<Self> {
        behavior.validate()?;
        let runtime = tokio::runtime::Runtime::new()?;
        let listener = runtime.block_on(tokio::net::TcpListener::bind(SocketAddr::from((
            [127, 0, 0, 1],
            0,
        ))))?;
        let addr = listener.local_addr()?;
        let (tx, rx) = tokio::sync::oneshot::channel();
        let app = router(behavior, false);
        let thread = std::thread::spawn(move || {
            runtime.block_on(async {
                let _ = axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await;
            });
        });
        Ok(Self {
            addr,
            shutdown: Some(tx),
            thread: Some(thread),
        })
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
        }
    }
}
