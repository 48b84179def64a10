use crate::MockBehavior;
use image_core::ImageBuffer;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// Stable 64-bit hash of an image: the first 8 bytes (big-endian) of a
/// SHA-256 over the dimensions and the 8-bit-quantized samples.
pub fn image_hash(image: &ImageBuffer) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update((image.width() as u64).to_be_bytes());
    hasher.update((image.height() as u64).to_be_bytes());
    hasher.update((image.channels() as u64).to_be_bytes());
    let quantized: Vec<u8> = image
        .samples()
        .iter()
        .map(|&s| (s * 255.0).round() as u8)
        .collect();
    hasher.update(&quantized);
    let digest = hasher.finalize();
    u64::from_be_bytes(digest[..8].try_into().unwrap())
}

/// Deterministic prompter reply: the behavior template with `{hash}`
/// expanded, plus a trailing comment echoing the instruction. Content never
/// depends on the instruction.
pub fn mock_prompts(image: &ImageBuffer, instruction: &str, behavior: &MockBehavior) -> String {
    let hash = format!("{:016x}", image_hash(image));
    let body = behavior.prompt_template.replace("{hash}", &hash);
    format!("{body}\n# instruction: {}", instruction.trim())
}

/// Deterministic img2img stand-in.
///
/// The PRNG is ChaCha12 keyed by SHA-256 over (image hash, seed,
/// prompt-empty flag); Gaussian samples come from an explicit Box-Muller
/// transform so outputs are identical across platforms. With a prompt the
/// init image gets `N(0, σ_p)` noise; without, `N(0, σ_n)` plus a hue shift
/// on the first channel. Samples are clamped back to [0, 1].
pub fn mock_generate(
    init: &ImageBuffer,
    prompt: &str,
    _negative: &str,
    seed: Option<i64>,
    behavior: &MockBehavior,
) -> ImageBuffer {
    let prompt_empty = prompt.trim().is_empty();
    let sigma = if prompt_empty {
        behavior.noise_without_prompt
    } else {
        behavior.noise_with_prompt
    };

    let mut key = Sha256::new();
    key.update(image_hash(init).to_be_bytes());
    key.update(seed.unwrap_or(0).to_be_bytes());
    key.update([u8::from(prompt_empty)]);
    let mut rng = ChaCha12Rng::from_seed(key.finalize().into());
    let mut normal = BoxMuller::default();

    let channels = init.channels();
    let samples: Vec<f64> = init
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut v = s + sigma * normal.next(&mut rng);
            if prompt_empty && i % channels == 0 {
                v += behavior.hue_shift_without_prompt;
            }
            v.clamp(0.0, 1.0)
        })
        .collect();
    ImageBuffer::new(init.width(), init.height(), channels, samples)
        .expect("clamped samples form a valid buffer")
}

/// Box-Muller standard-normal sampler over a 53-bit uniform.
#[derive(Default)]
struct BoxMuller {
    spare: Option<f64>,
}

impl BoxMuller {
    fn next(&mut self, rng: &mut ChaCha12Rng) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1], u2 in [0, 1)
        let u1 = ((rng.next_u64() >> 11) as f64 + 1.0) / (1u64 << 53) as f64;
        let u2 = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pseudo(w: usize, h: usize, salt: u64) -> ImageBuffer {
        let samples = (0..w * h * 3)
            .map(|i| {
                let mut v = (i as u64).wrapping_add(salt.wrapping_mul(0x9e3779b97f4a7c15));
                v ^= v >> 30;
                v = v.wrapping_mul(0xbf58476d1ce4e5b9);
                v ^= v >> 27;
                v = v.wrapping_mul(0x94d049bb133111eb);
                v ^= v >> 31;
                (v >> 33) as f64 / (1u64 << 31) as f64
            })
            .collect();
        ImageBuffer::new(w, h, 3, samples).unwrap()
    }

    #[test]
    fn prompts_are_deterministic() {
        let img = pseudo(8, 8, 1);
        let behavior = MockBehavior::default();
        let a = mock_prompts(&img, "whatever", &behavior);
        let b = mock_prompts(&img, "whatever", &behavior);
        assert_eq!(a, b);
    }

    #[test]
    fn one_pixel_change_changes_hash() {
        let a = pseudo(8, 8, 1);
        let mut samples = a.samples().to_vec();
        samples[0] = (samples[0] + 0.5) % 1.0;
        let b = ImageBuffer::new(8, 8, 3, samples).unwrap();
        assert_ne!(image_hash(&a), image_hash(&b));
    }

    #[test]
    fn instruction_echoed_but_ignored_for_content() {
        let img = pseudo(8, 8, 2);
        let behavior = MockBehavior::default();
        let a = mock_prompts(&img, "first instruction", &behavior);
        let b = mock_prompts(&img, "second instruction", &behavior);
        assert!(a.contains("# instruction: first instruction"));
        assert_eq!(
            a.lines().take(2).collect::<Vec<_>>(),
            b.lines().take(2).collect::<Vec<_>>()
        );
    }

    #[test]
    fn generation_is_deterministic() {
        let img = pseudo(8, 8, 3);
        let behavior = MockBehavior::default();
        let a = mock_generate(&img, "a dog", "", Some(7), &behavior);
        let b = mock_generate(&img, "a dog", "", Some(7), &behavior);
        assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn prompt_flag_changes_output() {
        let img = pseudo(8, 8, 4);
        let behavior = MockBehavior::default();
        let with = mock_generate(&img, "a dog", "", Some(7), &behavior);
        let without = mock_generate(&img, "", "", Some(7), &behavior);
        assert_ne!(with.samples(), without.samples());
    }

    #[test]
    fn zero_sigma_reproduces_init() {
        let img = pseudo(8, 8, 5);
        let behavior = MockBehavior {
            noise_with_prompt: 0.0,
            ..MockBehavior::default()
        };
        let out = mock_generate(&img, "a dog", "", Some(1), &behavior);
        assert_eq!(out.samples(), img.samples());
    }

    #[test]
    fn with_prompt_is_closer_to_init() {
        let img = pseudo(16, 16, 6);
        let behavior = MockBehavior::default();
        let with = mock_generate(&img, "a dog", "", Some(3), &behavior);
        let without = mock_generate(&img, "", "", Some(3), &behavior);
        let rmse = |x: &ImageBuffer| {
            let acc: f64 = x
                .samples()
                .iter()
                .zip(img.samples())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            (acc / x.samples().len() as f64).sqrt()
        };
        assert!(rmse(&with) < rmse(&without));
    }
}
