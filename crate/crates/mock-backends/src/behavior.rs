use crate::{MockError, Result};
use serde::{Deserialize, Serialize};

/// Tunable behavior of the mock backends.
///
/// The invariant `0 ≤ noise_with_prompt < noise_without_prompt ≤ 0.5` is what
/// makes the with-prompt condition dominate every metric.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MockBehavior {
    /// Reply template; `{hash}` expands to the 16-hex-digit image hash.
    pub prompt_template: String,
    /// Gaussian σ applied when a prompt is present.
    pub noise_with_prompt: f64,
    /// Gaussian σ applied when the prompt is empty.
    pub noise_without_prompt: f64,
    /// Offset added to the first channel in the prompt-less condition.
    pub hue_shift_without_prompt: f64,
}

impl Default for MockBehavior {
    fn default() -> Self {
        Self {
            prompt_template: "Prompt: a scene with signature {hash}\n\
                              Negative prompt: noise, artifacts, {hash}"
                .into(),
            noise_with_prompt: 0.02,
            noise_without_prompt: 0.08,
            hue_shift_without_prompt: 0.05,
        }
    }
}

impl MockBehavior {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_with_prompt >= 0.0
            && self.noise_with_prompt < self.noise_without_prompt
            && self.noise_without_prompt <= 0.5)
        {
            return Err(MockError::InvalidBehavior(format!(
                "need 0 <= noise_with_prompt ({}) < noise_without_prompt ({}) <= 0.5",
                self.noise_with_prompt, self.noise_without_prompt
            )));
        }
        Ok(())
    }
}
