use std::path::Path;
use std::sync::Arc;

use clap::ValueEnum;
use ideation_core::embedding::{EmbeddingProvider, EmbeddingStore, MockEmbedder, OpenAiEmbedder, DEFAULT_EMBEDDING_MODEL};
use ideation_core::ideas::{MockGenerator, OpenAiChat, TextGenerator};

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProviderKind {
    /// Deterministic offline provider.
    Mock,
    /// OpenAI-compatible HTTP API (OPENAI_API_KEY, OPENAI_BASE_URL).
    Openai,
}

pub fn chat(kind: ProviderKind, seed: u64, max_in_flight: usize) -> CliResult<Box<dyn TextGenerator>> {
    Ok(match kind {
        ProviderKind::Mock => Box::new(MockGenerator::new(seed)),
        ProviderKind::Openai => Box::new(OpenAiChat::from_env(max_in_flight)?),
    })
}

pub fn embedder(kind: ProviderKind) -> CliResult<Arc<dyn EmbeddingProvider>> {
    Ok(match kind {
        ProviderKind::Mock => Arc::new(MockEmbedder::default()),
        ProviderKind::Openai => Arc::new(OpenAiEmbedder::from_env(DEFAULT_EMBEDDING_MODEL)?),
    })
}

/// Embedding store, persisted when a cache path is given.
pub async fn store(kind: ProviderKind, cache: Option<&Path>) -> CliResult<EmbeddingStore> {
    let provider = embedder(kind)?;
    Ok(match cache {
        Some(path) => EmbeddingStore::open(path, provider).await?,
        None => EmbeddingStore::in_memory(provider),
    })
}
