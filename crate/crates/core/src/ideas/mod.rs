//! Plot-idea generation, validation, pool files and near-duplicate detection.

mod dedup;
mod generate;
mod parse;
mod pool;
mod prompt;
mod provider;

pub use dedup::{dedup_pool, dedup_vectors, DedupError, DedupPair, DedupReport, DEFAULT_DEDUP_THRESHOLD};
pub use generate::{generate_plots, generate_pool, GenerateOptions};
pub use parse::{parse_reply, validate_plot, Rejection, ValidatedPlot};
pub use pool::{export_pool, export_pool_string, import_pool, IdeaPool, PlotIdea, PoolError};
pub use prompt::{build_generation_prompt, number_to_words, CountStyle, PromptBundle, SYSTEM_PROMPT};
pub use provider::{ChatRequest, MockFormat, MockGenerator, OpenAiChat, TextGenerator};

use serde::{Deserialize, Serialize};

pub const DEFAULT_CHAT_MODEL: &str = "gpt-4o";

/// Sampling settings sent with each generation request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    pub retry_budget: u32,
}

impl Default for GenerationParams {
    fn default() -> Self {
        Self {
            model: DEFAULT_CHAT_MODEL.to_string(),
            temperature: 0.9,
            top_p: 1.0,
            retry_budget: 3,
        }
    }
}

impl GenerationParams {
    pub fn validate(&self) -> Result<(), GenerationError> {
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(GenerationError::InvalidParams(format!("temperature {} < 0", self.temperature)));
        }
        if self.top_p.is_nan() || self.top_p <= 0.0 || self.top_p > 1.0 {
            return Err(GenerationError::InvalidParams(format!("top_p {} not in (0, 1]", self.top_p)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum GenerationError {
    #[error("invalid generation parameters: {0}")]
    InvalidParams(String),
    #[error("missing configuration: {0}")]
    Config(String),
    #[error("provider error: {0}")]
    Provider(String),
    #[error("only {got} of {needed} valid plots after {attempts} attempts")]
    Insufficient { got: usize, needed: usize, attempts: u32 },
}
