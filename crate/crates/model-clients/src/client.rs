use crate::{
    parse_prompt_reply, wire, BackendEndpoint, ClientError, GenerationParams, PromptPair, Result,
};
use base64::Engine;
use image_core::{ImageBuffer, ImageFormat};
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

const INITIAL_BACKOFF: Duration = Duration::from_millis(250);

/// Blocking client for one backend. Immutable after construction and safe
/// to share; in-flight requests are capped by the concurrency limit.
pub struct ModelClient {
    endpoint: BackendEndpoint,
    http: reqwest::blocking::Client,
    slots: Arc<Gate>,
}

impl ModelClient {
    pub fn new(endpoint: BackendEndpoint) -> Result<Self> {
        Self::with_concurrency(endpoint, 4)
    }

    pub fn with_concurrency(endpoint: BackendEndpoint, limit: usize) -> Result<Self> {
        endpoint.validate()?;
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(endpoint.timeout_secs))
            .build()
            .map_err(|e| ClientError::InvalidParams(e.to_string()))?;
        Ok(Self {
            endpoint,
            http,
            slots: Arc::new(Gate::new(limit.max(1))),
        })
    }

    pub fn endpoint(&self) -> &BackendEndpoint {
        &self.endpoint
    }

    /// Sends the image and instruction to the prompter and parses the
    /// free-text reply into a [`PromptPair`].
    pub fn request_prompts(&self, image: &ImageBuffer, instruction: &str) -> Result<PromptPair> {
        if instruction.trim().is_empty() {
            return Err(ClientError::InvalidParams("instruction is empty".into()));
        }
        let body = wire::PromptRequest {
            image_png_b64: encode_png_b64(image)?,
            instruction: instruction.to_string(),
        };
        let reply: wire::PromptResponse = self.post_json("/v1/prompts", &body)?;
        parse_prompt_reply(&reply.reply)
    }

    /// Runs one img2img generation. `prompts = None` sends empty prompt
    /// fields (the prompt-less baseline condition).
    pub fn generate_image(
        &self,
        init: &ImageBuffer,
        prompts: Option<&PromptPair>,
        params: &GenerationParams,
    ) -> Result<ImageBuffer> {
        params.validate()?;
        let body = wire::Img2ImgRequest {
            init_png_b64: encode_png_b64(init)?,
            prompt: prompts.map(|p| p.positive.clone()).unwrap_or_default(),
            negative_prompt: prompts.map(|p| p.negative.clone()).unwrap_or_default(),
            strength: params.strength,
            steps: params.steps,
            guidance: params.guidance,
            seed: params.seed,
        };
        let reply: wire::Img2ImgResponse = self.post_json("/v1/img2img", &body)?;
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(&reply.image_png_b64)
            .map_err(|e| ClientError::Payload(format!("image_png_b64 not base64: {e}")))?;
        image_core::decode(&bytes, ImageFormat::Png)
            .map_err(|e| ClientError::Payload(format!("undecodable image payload: {e}")))
    }

    fn post_json<B: serde::Serialize, R: serde::de::DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<R> {
        let _slot = self.slots.acquire();
        let url = format!("{}{}", self.endpoint.base_url.trim_end_matches('/'), path);

        let mut backoff = INITIAL_BACKOFF;
        let attempts = self.endpoint.max_retries + 1;
        let mut last_err = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                std::thread::sleep(backoff);
                backoff *= 2;
            }
            let mut req = self.http.post(&url).json(body);
            if let Some(token) = &self.endpoint.auth_token {
                req = req.bearer_auth(token);
            }
            match req.send() {
                Err(e) => {
                    // transport failure: retry
                    last_err = e.to_string();
                }
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        return resp
                            .json()
                            .map_err(|e| ClientError::Payload(e.to_string()));
                    }
                    let message = resp
                        .json::<wire::ErrorResponse>()
                        .map(|e| e.error)
                        .unwrap_or_else(|e| e.to_string());
                    return Err(ClientError::Backend {
                        status: status.as_u16(),
                        message,
                    });
                }
            }
        }
        Err(ClientError::BackendUnreachable {
            attempts,
            message: last_err,
        })
    }
}

fn encode_png_b64(image: &ImageBuffer) -> Result<String> {
    let bytes = image_core::encode(image, ImageFormat::Png)?;
    Ok(base64::engine::general_purpose::STANDARD.encode(bytes))
}

/// Counting gate limiting concurrent requests per client.
struct Gate {
    state: Mutex<usize>,
    cond: Condvar,
}

struct Slot<'a>(&'a Gate);

impl Gate {
    fn new(limit: usize) -> Self {
        Self {
            state: Mutex::new(limit),
            cond: Condvar::new(),
        }
    }

    fn acquire(&self) -> Slot<'_> {
        let mut free = self.state.lock().unwrap();
        while *free == 0 {
            free = self.cond.wait(free).unwrap();
        }
        *free -= 1;
        Slot(self)
    }
}

impl Drop for Slot<'_> {
    fn drop(&mut self) {
        *self.0.state.lock().unwrap() += 1;
        self.0.cond.notify_one();
    }
}
