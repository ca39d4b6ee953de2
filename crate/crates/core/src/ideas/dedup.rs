use serde::{Deserialize, Serialize};

use super::pool::IdeaPool;
use crate::diversity::{cosine_values, DiversityError};
use crate::embedding::{EmbeddingError, EmbeddingStore};

pub const DEFAULT_DEDUP_THRESHOLD: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DedupPair {
    pub a: String,
    pub b: String,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DedupReport {
    pub pairs: Vec<DedupPair>,
    pub threshold: f64,
    pub flagged_count: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum DedupError {
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Similarity(#[from] DiversityError),
}

/// All unordered pairs with cosine at or above `threshold`, most similar first.
pub fn dedup_vectors(ids: &[String], vectors: &[Vec<f64>], threshold: f64) -> Result<DedupReport, DiversityError> {
    let mut pairs = Vec::new();
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let s = cosine_values(&vectors[i], &vectors[j])?;
            if s >= threshold {
                pairs.push(DedupPair { a: ids[i].clone(), b: ids[j].clone(), similarity: s });
            }
        }
    }
    pairs.sort_by(|x, y| y.similarity.total_cmp(&x.similarity));
    Ok(DedupReport { flagged_count: pairs.len(), pairs, threshold })
}

/// Embeds every idea and flags near-duplicate pairs.
pub async fn dedup_pool(pool: &IdeaPool, store: &EmbeddingStore, threshold: f64) -> Result<DedupReport, DedupError> {
    let texts: Vec<String> = pool.ideas().iter().map(|i| i.text.clone()).collect();
    let vectors = store.embed_texts(&texts).await?;
    let ids: Vec<String> = pool.ideas().iter().map(|i| i.id.clone()).collect();
    let values: Vec<Vec<f64>> = vectors.iter().map(|v| v.values().to_vec()).collect();
    Ok(dedup_vectors(&ids, &values, threshold)?)
}
