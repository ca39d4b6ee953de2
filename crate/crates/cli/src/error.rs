use std::fmt;

use ideation_client::ClientError;
use ideation_core::diversity::DiversityError;
use ideation_core::embedding::EmbeddingError;
use ideation_core::ideas::{DedupError, GenerationError, PoolError};
use ideation_core::persona::PersonaError;
use ideation_core::stats::StatsError;
use ideation_core::text::TextError;
use ideation_service::ServiceError;
use serde::Serialize;

/// Error category; each maps to a fixed exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Config,
    Provider,
    Data,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Config => 2,
            Category::Provider => 3,
            Category::Data => 4,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl fmt::Display) -> Self {
        Self { category: Category::Config, message: message.to_string() }
    }

    pub fn provider(message: impl fmt::Display) -> Self {
        Self { category: Category::Provider, message: message.to_string() }
    }

    pub fn data(message: impl fmt::Display) -> Self {
        Self { category: Category::Data, message: message.to_string() }
    }

    /// Adds a leading context string.
    pub fn context(mut self, what: impl fmt::Display) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.category, "message": self.message }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::data(e)
    }
}

impl From<GenerationError> for CliError {
    fn from(e: GenerationError) -> Self {
        match e {
            GenerationError::InvalidParams(_) | GenerationError::Config(_) => CliError::config(e),
            GenerationError::Provider(_) | GenerationError::Insufficient { .. } => CliError::provider(e),
        }
    }
}

impl From<EmbeddingError> for CliError {
    fn from(e: EmbeddingError) -> Self {
        match e {
            EmbeddingError::Config(_) => CliError::config(e),
            EmbeddingError::Provider(_) | EmbeddingError::DimensionMismatch { .. } | EmbeddingError::CountMismatch { .. } => {
                CliError::provider(e)
            }
            _ => CliError::data(e),
        }
    }
}

impl From<DedupError> for CliError {
    fn from(e: DedupError) -> Self {
        match e {
            DedupError::Embedding(e) => e.into(),
            DedupError::Similarity(e) => CliError::data(e),
        }
    }
}

impl From<PersonaError> for CliError {
    fn from(e: PersonaError) -> Self {
        match e {
            PersonaError::RetriesExhausted { .. } => CliError::provider(e),
            _ => CliError::data(e),
        }
    }
}

impl From<ClientError> for CliError {
    fn from(e: ClientError) -> Self {
        match e {
            ClientError::Transport(_) => CliError::provider(e),
            ClientError::Api { .. } => CliError::data(e),
        }
    }
}

impl From<ServiceError> for CliError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Config(_) | ServiceError::Bind { .. } => CliError::config(e),
            _ => CliError::data(e),
        }
    }
}

macro_rules! data_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::data(e)
            }
        }
    )*};
}

data_errors!(PoolError, DiversityError, StatsError, TextError, csv::Error);
