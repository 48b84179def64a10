use crate::{ClientError, PromptPair, Result};

/// Extracts a [`PromptPair`] from a free-text model reply.
///
/// Grammar: lines are scanned case-insensitively; a line starting with
/// `negative prompt:` supplies the negative prompt, and the first line
/// starting with `prompt:` that is not the negative line supplies the
/// positive one. When no labeled positive line exists, everything up to the
/// negative label (or the whole reply) is the positive prompt.
pub fn parse_prompt_reply(raw: &str) -> Result<PromptPair> {
    if raw.trim().is_empty() {
        return Err(ClientError::PromptParse {
            raw_response: raw.to_string(),
        });
    }

    let mut positive: Option<String> = None;
    let mut negative: Option<String> = None;
    let mut negative_line_index = None;

    for (i, line) in raw.lines().enumerate() {
        let lower = line.trim_start().to_lowercase();
        let trimmed = line.trim_start();
        if lower.starts_with("negative prompt:") {
            if negative.is_none() {
                negative = Some(trimmed["negative prompt:".len()..].trim().to_string());
                negative_line_index = Some(i);
            }
        } else if lower.starts_with("prompt:") && positive.is_none() {
            positive = Some(trimmed["prompt:".len()..].trim().to_string());
        }
    }

    let positive = match positive {
        Some(p) if !p.is_empty() => p,
        _ => {
            // fallback: unlabeled reply up to the negative label
            let head: String = raw
                .lines()
                .enumerate()
                .take_while(|(i, _)| Some(*i) != negative_line_index)
                .map(|(_, l)| l)
                .collect::<Vec<_>>()
                .join("\n");
            let head = head.trim().to_string();
            if head.is_empty() {
                return Err(ClientError::PromptParse {
                    raw_response: raw.to_string(),
                });
            }
            head
        }
    };

    Ok(PromptPair {
        positive,
        negative: negative.unwrap_or_default(),
        raw_response: raw.to_string(),
    })
}
