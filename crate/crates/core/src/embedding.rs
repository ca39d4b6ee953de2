//! Embedding vectors, providers and a content-addressed on-disk cache.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};
use std::time::Duration;

use async_trait::async_trait;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tokio::io::AsyncWriteExt;
use tokio::sync::Mutex;

pub const DEFAULT_DIM: usize = 1536;
pub const DEFAULT_EMBEDDING_MODEL: &str = "text-embedding-ada-002";
pub const MOCK_EMBEDDING_MODEL: &str = "mock-embed";

#[derive(Debug, thiserror::Error)]
pub enum EmbeddingError {
    #[error("cannot embed empty text")]
    EmptyText,
    #[error("provider returned dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("provider returned {got} vectors for {expected} texts")]
    CountMismatch { expected: usize, got: usize },
    #[error("provider error: {0}")]
    Provider(String),
    #[error("missing configuration: {0}")]
    Config(String),
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// An immutable embedding attached to the model that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    values: Arc<[f64]>,
    model_id: String,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f64>, model_id: impl Into<String>) -> Self {
        Self {
            values: values.into(),
            model_id: model_id.into(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Hex SHA-256 of `model_id`, a NUL separator and the trimmed text.
pub fn cache_key(model_id: &str, text: &str) -> String {
    let mut h = Sha256::new();
    h.update(model_id.as_bytes());
    h.update([0u8]);
    h.update(text.trim().as_bytes());
    hex::encode(h.finalize())
}

#[async_trait]
pub trait EmbeddingProvider: Send + Sync {
    fn model_id(&self) -> &str;
    fn dim(&self) -> usize;
    /// One vector per input text, in order.
    async fn embed_batch(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbeddingError>;
}

/// Deterministic unit-norm embedding from the text alone; see [`mock_values`].
pub fn mock_embed(text: &str) -> EmbeddingVector {
    EmbeddingVector::new(mock_values(text, DEFAULT_DIM), MOCK_EMBEDDING_MODEL)
}

fn gaussian(seed_text: &[u8], dim: usize) -> Vec<f64> {
    let digest = Sha256::digest(seed_text);
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    let mut rng = ChaCha8Rng::from_seed(seed);
    (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Hashed bag of words: the sum of one Gaussian direction per lowercase word
/// plus one direction for the whole trimmed text, normalised to unit length.
/// Texts sharing vocabulary come out similar; distinct texts never coincide.
pub fn mock_values(text: &str, dim: usize) -> Vec<f64> {
    let text = text.trim();
    let mut v = gaussian(text.as_bytes(), dim);
    for word in text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
    {
        let mut key = b"word\0".to_vec();
        key.extend_from_slice(word.as_bytes());
        for (a, x) in v.iter_mut().zip(gaussian(&key, dim)) {
            *a += x;
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Offline provider backed by [`mock_values`].
#[derive(Debug, Clone)]
pub struct MockEmbedder {
    dim: usize,
}

impl MockEmbedder {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self { dim }
    }
}

impl Default for MockEmbedder {
    fn default() -> Self {
        Self::new(DEFAULT_DIM)
    }
}

#[async_trait]
impl EmbeddingProvider for MockEmbedder {
    fn model_id(&self) -> &str {
        MOCK_EMBEDDING_MODEL
    }

    fn dim(&self) -> usize {
        self.dim
    }

    async fn embed_batch(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbeddingError> {
        Ok(texts.iter().map(|t| mock_values(t, self.dim)).collect())
    }
}

/// Client for an OpenAI-style `/embeddings` endpoint.
#[derive(Debug, Clone)]
pub struct OpenAiEmbedder {
    http: reqwest::Client,
    base_url: String,
    api_key: String,
    model: String,
    dim: usize,
    retries: u32,
}

impl OpenAiEmbedder {
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            http: reqwest::Client::new(),
            base_url: base_url.into().trim_end_matches('/').to_string(),
            api_key: api_key.into(),
            model: model.into(),
            dim: DEFAULT_DIM,
            retries: 3,
        }
    }

    /// Reads `OPENAI_API_KEY` and optionally `OPENAI_BASE_URL`.
    pub fn from_env(model: impl Into<String>) -> Result<Self, EmbeddingError> {
        let key = std::env::var("OPENAI_API_KEY")
            .map_err(|_| EmbeddingError::Config("OPENAI_API_KEY is not set".into()))?;
        let base = std::env::var("OPENAI_BASE_URL").unwrap_or_else(|_| "https://api.openai.com/v1".into());
        Ok(Self::new(base, key, model))
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    async fn request(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbeddingError> {
        #[derive(Deserialize)]
        struct Item {
            index: usize,
            embedding: Vec<f64>,
        }
        #[derive(Deserialize)]
        struct Reply {
            data: Vec<Item>,
        }
        let resp = self
            .http
            .post(format!("{}/embeddings", self.base_url))
            .bearer_auth(&self.api_key)
            .json(&serde_json::json!({ "model": self.model, "input": texts }))
            .send()
            .await
            .map_err(|e| EmbeddingError::Provider(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            let body = resp.text().await.unwrap_or_default();
            return Err(EmbeddingError::Provider(format!("HTTP {status}: {body}")));
        }
        let mut reply: Reply = resp.json().await.map_err(|e| EmbeddingError::Provider(e.to_string()))?;
        reply.data.sort_by_key(|i| i.index);
        Ok(reply.data.into_iter().map(|i| i.embedding).collect())
    }
}

#[async_trait]
impl EmbeddingProvider for OpenAiEmbedder {
    fn model_id(&self) -> &str {
        &self.model
    }

    fn dim(&self) -> usize {
        self.dim
    }

    async fn embed_batch(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, EmbeddingError> {
        let mut attempt = 0;
        loop {
            match self.request(texts).await {
                Ok(v) => return Ok(v),
                Err(e) if attempt < self.retries => {
                    tracing::warn!(attempt, error = %e, "embedding request failed, retrying");
                    tokio::time::sleep(Duration::from_millis(500 << attempt)).await;
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    hash: String,
    model_id: String,
    values: Vec<f64>,
}

/// Embeds texts through a provider, consulting a content-addressed cache
/// first. The cache can be persisted as an append-only JSON-lines file.
pub struct EmbeddingStore {
    provider: Arc<dyn EmbeddingProvider>,
    cache: RwLock<HashMap<String, EmbeddingVector>>,
    log: Option<Mutex<tokio::fs::File>>,
    path: Option<PathBuf>,
    calls: AtomicUsize,
}

impl EmbeddingStore {
    pub fn in_memory(provider: Arc<dyn EmbeddingProvider>) -> Self {
        Self {
            provider,
            cache: RwLock::default(),
            log: None,
            path: None,
            calls: AtomicUsize::new(0),
        }
    }

    /// Opens (or creates) a cache file and loads its entries. A truncated
    /// final line, as left by an interrupted write, is ignored.
    pub async fn open(path: impl AsRef<Path>, provider: Arc<dyn EmbeddingProvider>) -> Result<Self, EmbeddingError> {
        let path = path.as_ref().to_path_buf();
        let mut cache = HashMap::new();
        if let Ok(text) = tokio::fs::read_to_string(&path).await {
            let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
            for (i, line) in lines.iter().enumerate() {
                match serde_json::from_str::<CacheLine>(line) {
                    Ok(entry) => {
                        cache.insert(entry.hash, EmbeddingVector::new(entry.values, entry.model_id));
                    }
                    Err(e) if i + 1 == lines.len() => {
                        tracing::warn!(error = %e, "ignoring truncated final cache line");
                    }
                    Err(e) => {
                        return Err(EmbeddingError::Io(std::io::Error::new(
                            std::io::ErrorKind::InvalidData,
                            format!("{}:{}: {e}", path.display(), i + 1),
                        )))
                    }
                }
            }
            if !text.is_empty() && !text.ends_with('\n') {
                // start the next append on a fresh line
                let mut f = tokio::fs::OpenOptions::new().append(true).open(&path).await?;
                f.write_all(b"\n").await?;
            }
        }
        let file = tokio::fs::OpenOptions::new().create(true).append(true).open(&path).await?;
        Ok(Self {
            provider,
            cache: RwLock::new(cache),
            log: Some(Mutex::new(file)),
            path: Some(path),
            calls: AtomicUsize::new(0),
        })
    }

    pub fn provider(&self) -> &dyn EmbeddingProvider {
        self.provider.as_ref()
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Number of provider batch calls made by this store.
    pub fn provider_calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    /// Order-preserving embeddings for `texts`; misses go to the provider in
    /// one batch with duplicates removed.
    pub async fn embed_texts(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbeddingError> {
        if texts.iter().any(|t| t.trim().is_empty()) {
            return Err(EmbeddingError::EmptyText);
        }
        let model = self.provider.model_id().to_string();
        let keys: Vec<String> = texts.iter().map(|t| cache_key(&model, t)).collect();

        let mut misses: Vec<(String, String)> = Vec::new();
        {
            let cache = self.cache.read().expect("cache lock");
            for (key, text) in keys.iter().zip(texts) {
                if !cache.contains_key(key) && !misses.iter().any(|(k, _)| k == key) {
                    misses.push((key.clone(), text.trim().to_string()));
                }
            }
        }

        if !misses.is_empty() {
            let batch: Vec<String> = misses.iter().map(|(_, t)| t.clone()).collect();
            self.calls.fetch_add(1, Ordering::Relaxed);
            let vectors = self.provider.embed_batch(&batch).await?;
            if vectors.len() != batch.len() {
                return Err(EmbeddingError::CountMismatch {
                    expected: batch.len(),
                    got: vectors.len(),
                });
            }
            let expected = self.provider.dim();
            if let Some(bad) = vectors.iter().find(|v| v.len() != expected) {
                return Err(EmbeddingError::DimensionMismatch { expected, got: bad.len() });
            }
            let mut lines = String::new();
            let fresh: Vec<(String, EmbeddingVector)> = misses
                .into_iter()
                .zip(vectors)
                .map(|((key, _), values)| {
                    if self.log.is_some() {
                        let line = CacheLine {
                            hash: key.clone(),
                            model_id: model.clone(),
                            values: values.clone(),
                        };
                        lines.push_str(&serde_json::to_string(&line).expect("cache line serializes"));
                        lines.push('\n');
                    }
                    (key, EmbeddingVector::new(values, model.clone()))
                })
                .collect();
            if let Some(log) = &self.log {
                let mut file = log.lock().await;
                file.write_all(lines.as_bytes()).await?;
                file.flush().await?;
            }
            let mut cache = self.cache.write().expect("cache lock");
            cache.extend(fresh);
        }

        let cache = self.cache.read().expect("cache lock");
        Ok(keys.iter().map(|k| cache[k].clone()).collect())
    }
}
