//! Typed clients for the two external model services: the vision-LLM
//! prompter and the img2img generator.
//!
//! Both speak the same JSON-over-HTTP contract:
//!
//! - `POST {base}/v1/prompts` body `{"image_png_b64": str, "instruction": str}`
//!   → `200 {"reply": str}`
//! - `POST {base}/v1/img2img` body `{"init_png_b64": str, "prompt": str,
//!   "negative_prompt": str, "strength": float, "steps": int,
//!   "guidance": float, "seed": int|null}` → `200 {"image_png_b64": str}`
//! - Errors: `4xx/5xx {"error": str}`. Auth: optional
//!   `Authorization: Bearer <token>`.

mod client;
mod parse;
mod types;
pub mod wire;

pub use client::ModelClient;
pub use parse::parse_prompt_reply;
pub use types::{BackendEndpoint, GenerationParams, PromptPair};

/// The instruction sent to the prompter when the caller does not override it.
pub const DEFAULT_INSTRUCTION: &str = "Generate prompt and negative prompt for this image.";

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    /// Transport failed after exhausting all retries.
    #[error("backend unreachable after {attempts} attempt(s): {message}")]
    BackendUnreachable { attempts: u32, message: String },

    /// The backend answered with a non-success status.
    #[error("backend error (http {status}): {message}")]
    Backend { status: u16, message: String },

    /// No positive prompt could be located in the model reply.
    #[error("could not parse prompts from reply: {raw_response:?}")]
    PromptParse { raw_response: String },

    /// Response payload was not the documented shape, or the image in it
    /// could not be decoded.
    #[error("bad payload: {0}")]
    Payload(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("image error: {0}")]
    Image(#[from] image_core::ImageError),
}

pub type Result<T> = std::result::Result<T, ClientError>;
