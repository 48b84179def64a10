use crate::{ClientError, Result};
use serde::{Deserialize, Serialize};

/// Positive and negative prompt extracted from a model reply, together with
/// the verbatim reply they came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptPair {
    pub positive: String,
    pub negative: String,
    pub raw_response: String,
}

/// img2img generation knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationParams {
    /// Denoising fraction, in (0, 1].
    pub strength: f64,
    pub steps: u32,
    pub guidance: f64,
    /// Absent means the service picks its own seed.
    pub seed: Option<i64>,
}

impl Default for GenerationParams {
    fn default() -> Self {
        Self {
            strength: 0.6,
            steps: 30,
            guidance: 7.5,
            seed: None,
        }
    }
}

impl GenerationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.strength > 0.0 && self.strength <= 1.0) {
            return Err(ClientError::InvalidParams(format!(
                "strength {} outside (0, 1]",
                self.strength
            )));
        }
        if self.steps < 1 {
            return Err(ClientError::InvalidParams("steps must be >= 1".into()));
        }
        if self.guidance < 0.0 {
            return Err(ClientError::InvalidParams(format!(
                "guidance {} must be >= 0",
                self.guidance
            )));
        }
        Ok(())
    }
}

/// Where a backend lives and how patiently to talk to it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackendEndpoint {
    pub base_url: String,
    /// Per-request timeout in seconds.
    pub timeout_secs: f64,
    /// Re-attempts on transport failure (0 = single try).
    pub max_retries: u32,
    pub auth_token: Option<String>,
}

impl BackendEndpoint {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            timeout_secs: 60.0,
            max_retries: 2,
            auth_token: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.timeout_secs <= 0.0 {
            return Err(ClientError::InvalidParams(format!(
                "timeout {} must be > 0",
                self.timeout_secs
            )));
        }
        Ok(())
    }
}
