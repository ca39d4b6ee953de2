use std::collections::HashMap;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, Mutex};

use async_trait::async_trait;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tokio::sync::Semaphore;

use super::{GenerationError, GenerationParams};

/// One chat-style completion request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub system: String,
    pub user: String,
    pub params: GenerationParams,
    /// Number of items the prompt asks for; used by offline providers only.
    pub expected_items: usize,
}

#[async_trait]
pub trait TextGenerator: Send + Sync {
    async fn complete(&self, request: &ChatRequest) -> Result<String, GenerationError>;
}

/// Client for an OpenAI-style `/chat/completions` endpoint with a cap on
/// requests in flight.
#[derive(Debug, Clone)]
pub struct OpenAiChat {
    http: reqwest::Client,
    base_url: String,
    api_key: String,
    permits: Arc<Semaphore>,
}

impl OpenAiChat {
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>, max_in_flight: usize) -> Self {
        Self {
            http: reqwest::Client::new(),
            base_url: base_url.into().trim_end_matches('/').to_string(),
            api_key: api_key.into(),
            permits: Arc::new(Semaphore::new(max_in_flight.max(1))),
        }
    }

    /// Reads `OPENAI_API_KEY` and optionally `OPENAI_BASE_URL`.
    pub fn from_env(max_in_flight: usize) -> Result<Self, GenerationError> {
        let key = std::env::var("OPENAI_API_KEY")
            .map_err(|_| GenerationError::Config("OPENAI_API_KEY is not set".into()))?;
        let base = std::env::var("OPENAI_BASE_URL").unwrap_or_else(|_| "https://api.openai.com/v1".into());
        Ok(Self::new(base, key, max_in_flight))
    }
}

#[async_trait]
impl TextGenerator for OpenAiChat {
    async fn complete(&self, request: &ChatRequest) -> Result<String, GenerationError> {
        #[derive(Deserialize)]
        struct Message {
            content: Option<String>,
        }
        #[derive(Deserialize)]
        struct Choice {
            message: Message,
        }
        #[derive(Deserialize)]
        struct Reply {
            choices: Vec<Choice>,
        }
        let _permit = self.permits.acquire().await.expect("semaphore never closed");
        let body = serde_json::json!({
            "model": request.params.model,
            "temperature": request.params.temperature,
            "top_p": request.params.top_p,
            "messages": [
                { "role": "system", "content": request.system },
                { "role": "user", "content": request.user },
            ],
        });
        let resp = self
            .http
            .post(format!("{}/chat/completions", self.base_url))
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .await
            .map_err(|e| GenerationError::Provider(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            let text = resp.text().await.unwrap_or_default();
            return Err(GenerationError::Provider(format!("HTTP {status}: {text}")));
        }
        let reply: Reply = resp.json().await.map_err(|e| GenerationError::Provider(e.to_string()))?;
        reply
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| GenerationError::Provider("reply has no content".into()))
    }
}

const NAMES: &[&str] = &[
    "Kestrel", "Oren", "Talia", "Bram", "Ysolde", "Caspian", "Mireille", "Dax", "Noor", "Ilse",
    "Teodor", "Wren", "Soraya", "Jun", "Petra", "Ansel", "Zara", "Hollis", "Marisol", "Quill",
];
const ROLES: &[&str] = &[
    "a young geologist", "a retired pilot", "a botanist", "a cartographer", "an engineer",
    "a linguist", "a medic", "a teenage stowaway", "a salvage diver", "an astronomer",
    "a courier", "a historian", "a musician", "a robotics student", "a park ranger",
];
const PLANETS: &[&str] = &[
    "a desert moon", "an ocean planet", "a frozen world", "a jungle planet",
    "a planet of floating islands", "a tidally locked world", "a gas giant's ring station",
    "a crystal planet", "a volcanic moon", "a twilight planet", "a world of endless canyons",
    "a planet with two suns",
];
const FINDS: &[&str] = &[
    "a buried signal beacon", "a herd of singing creatures", "the ruins of a vanished city",
    "a map carved into glass", "a forest that moves at night", "a sleeping machine",
    "a river that flows uphill", "an abandoned research base", "a message in an unknown language",
    "a cave of glowing fungi", "a seed vault", "a storm that never ends",
];
const TURNS: &[&str] = &[
    "When the supply ship fails to return", "After a quake splits the landing site",
    "As the oxygen reserves run low", "When the local creatures begin to follow them",
    "After a rival crew claims the discovery", "When the planet's night lasts longer than expected",
    "As strange dreams spread through the camp", "When the radio picks up a familiar voice",
];
const GOALS: &[&str] = &[
    "must cross the wasteland alone", "must earn the trust of a wary guide",
    "must decode the warning before the next eclipse", "must repair an ancient engine",
    "must choose between rescue and discovery", "must lead the survivors to higher ground",
    "must learn to speak with the creatures", "must follow the signal into the dark",
];
const ENDINGS: &[&str] = &[
    "In the end, the journey reveals that the planet has been waiting for them.",
    "What they uncover changes how the colony sees its new home.",
    "Together they find a way home, carrying a secret that could reshape the stars.",
    "The answer lies deeper than anyone dared to dig.",
    "Their choice will decide the fate of two worlds.",
    "By dawn, nothing about the mission is what it seemed.",
    "The discovery turns a simple survey into a fight for survival.",
    "Only by working with the planet, not against it, can they survive.",
];

fn mock_plot(rng: &mut ChaCha8Rng) -> String {
    let pick = |rng: &mut ChaCha8Rng, xs: &[&'static str]| *xs.choose(rng).expect("non-empty bank");
    let name = pick(rng, NAMES);
    format!(
        "{name}, {}, lands on {} and discovers {}. {}, {name} {}. {}",
        pick(rng, ROLES),
        pick(rng, PLANETS),
        pick(rng, FINDS),
        pick(rng, TURNS),
        pick(rng, GOALS),
        pick(rng, ENDINGS),
    )
}

/// Reply layout produced by [`MockGenerator`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MockFormat {
    /// A header line then one quoted CSV row per plot.
    #[default]
    Csv,
    /// Numbered plain lines.
    Lines,
}

/// Deterministic offline generator. Each reply is a pure function of the
/// seed, the request text and how many times that same request was made.
#[derive(Debug, Default)]
pub struct MockGenerator {
    seed: u64,
    format: MockFormat,
    invalid_every: Option<usize>,
    fail_first: AtomicU32,
    attempts: Mutex<HashMap<[u8; 32], u32>>,
}

impl MockGenerator {
    pub fn new(seed: u64) -> Self {
        Self { seed, ..Default::default() }
    }

    pub fn with_format(mut self, format: MockFormat) -> Self {
        self.format = format;
        self
    }

    /// Makes every `k`-th plot of a first attempt four sentences long.
    pub fn with_invalid_every(mut self, k: usize) -> Self {
        self.invalid_every = Some(k.max(1));
        self
    }

    /// The first `n` calls fail with a provider error.
    pub fn with_failures(self, n: u32) -> Self {
        self.fail_first.store(n, Ordering::SeqCst);
        self
    }
}

#[async_trait]
impl TextGenerator for MockGenerator {
    async fn complete(&self, request: &ChatRequest) -> Result<String, GenerationError> {
        if self
            .fail_first
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1))
            .is_ok()
        {
            return Err(GenerationError::Provider("mock outage".into()));
        }
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(request.system.as_bytes());
        h.update([0u8]);
        h.update(request.user.as_bytes());
        h.update((request.expected_items as u64).to_le_bytes());
        let key: [u8; 32] = h.finalize().into();
        let attempt = {
            let mut map = self.attempts.lock().expect("attempt map lock");
            let a = map.entry(key).or_insert(0);
            *a += 1;
            *a - 1
        };
        let mut seed = key;
        seed[..4].iter_mut().zip(attempt.to_le_bytes()).for_each(|(s, a)| *s ^= a);
        let mut rng = ChaCha8Rng::from_seed(seed);

        let mut plots: Vec<String> = (0..request.expected_items).map(|_| mock_plot(&mut rng)).collect();
        if let (Some(k), 0) = (self.invalid_every, attempt) {
            for p in plots.iter_mut().skip(k - 1).step_by(k) {
                p.push_str(" Then the sky went silent.");
            }
        }
        Ok(match self.format {
            MockFormat::Csv => {
                let mut out = String::from("plot\n");
                for p in plots {
                    out.push('"');
                    out.push_str(&p.replace('"', "\"\""));
                    out.push_str("\"\n");
                }
                out
            }
            MockFormat::Lines => plots
                .iter()
                .enumerate()
                .map(|(i, p)| format!("{}. {p}\n", i + 1))
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(n: usize) -> ChatRequest {
        ChatRequest {
            system: "sys".into(),
            user: "user".into(),
            params: GenerationParams::default(),
            expected_items: n,
        }
    }

    #[tokio::test]
    async fn deterministic_per_seed() {
        let a = MockGenerator::new(1).complete(&request(3)).await.unwrap();
        let b = MockGenerator::new(1).complete(&request(3)).await.unwrap();
        let c = MockGenerator::new(2).complete(&request(3)).await.unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.lines().count(), 4);
    }

    #[tokio::test]
    async fn failures_then_success() {
        let m = MockGenerator::new(1).with_failures(2);
        assert!(m.complete(&request(1)).await.is_err());
        assert!(m.complete(&request(1)).await.is_err());
        assert!(m.complete(&request(1)).await.is_ok());
    }
}
