//! Deterministic in-process/HTTP test backends implementing the canonical
//! wire contract, so the full pipeline runs without GPUs.
//!
//! Replies are pure functions of the request bodies: identical requests get
//! byte-identical responses. The generator degrades the init image with less
//! noise when a prompt is present than when it is absent, so every
//! full-reference metric prefers the with-prompt output.

mod behavior;
mod handlers;
mod server;

pub use behavior::MockBehavior;
pub use handlers::{image_hash, mock_generate, mock_prompts};
pub use server::{serve_blocking, MockServer};

#[derive(Debug, thiserror::Error)]
pub enum MockError {
    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),

    #[error("bad request: {0}")]
    BadRequest(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MockError>;
