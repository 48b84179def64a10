use crate::{HarnessError, Result};
use model_clients::GenerationParams;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::{Path, PathBuf};

/// Ablation condition for one generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    NoPrompt,
    WithPrompt,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::NoPrompt => "no_prompt",
            Condition::WithPrompt => "with_prompt",
        }
    }
}

impl std::str::FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "no_prompt" => Ok(Condition::NoPrompt),
            "with_prompt" => Ok(Condition::WithPrompt),
            other => Err(format!("unknown condition {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub path: PathBuf,
}

fn default_instruction() -> String {
    model_clients::DEFAULT_INSTRUCTION.to_string()
}

fn default_conditions() -> Vec<Condition> {
    vec![Condition::NoPrompt, Condition::WithPrompt]
}

/// Declarative run description, loaded from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub master_seed: i64,
    #[serde(default = "default_instruction")]
    pub instruction: String,
    #[serde(default)]
    pub params: GenerationParams,
    pub images: Vec<ManifestEntry>,
    #[serde(default = "default_conditions")]
    pub conditions: Vec<Condition>,
}

impl Manifest {
    pub fn from_json(json: &str) -> Result<Self> {
        let manifest: Manifest = serde_json::from_str(json)
            .map_err(|e| HarnessError::InvalidManifest(e.to_string()))?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.images.is_empty() {
            return Err(HarnessError::InvalidManifest("no images".into()));
        }
        if self.conditions.is_empty() {
            return Err(HarnessError::InvalidManifest("no conditions".into()));
        }
        let mut seen = HashSet::new();
        for entry in &self.images {
            if entry.id.trim().is_empty() {
                return Err(HarnessError::InvalidManifest("empty image id".into()));
            }
            if !seen.insert(entry.id.as_str()) {
                return Err(HarnessError::InvalidManifest(format!(
                    "duplicate image id {:?}",
                    entry.id
                )));
            }
        }
        let unique: HashSet<_> = self.conditions.iter().collect();
        if unique.len() != self.conditions.len() {
            return Err(HarnessError::InvalidManifest("duplicate condition".into()));
        }
        Ok(())
    }

    /// Per-image seed: stable mix of the master seed and the image id,
    /// shared by both conditions so the ablation isolates the prompt.
    pub fn seed_for(&self, image_id: &str) -> i64 {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update(self.master_seed.to_be_bytes());
        hasher.update(image_id.as_bytes());
        let digest = hasher.finalize();
        i64::from_be_bytes(digest[..8].try_into().unwrap())
    }
}
