//! Request and response bodies of the canonical wire contract. Field names
//! are part of the contract; do not rename.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptRequest {
    pub image_png_b64: String,
    pub instruction: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptResponse {
    pub reply: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Img2ImgRequest {
    pub init_png_b64: String,
    pub prompt: String,
    pub negative_prompt: String,
    pub strength: f64,
    pub steps: u32,
    pub guidance: f64,
    pub seed: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Img2ImgResponse {
    pub image_png_b64: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub error: String,
}
