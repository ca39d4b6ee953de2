//! Three-condition story-writing experiment: sessions, idea serving, story
//! capture and the analysis export, persisted as an append-only event log.

mod engine;
mod log;
mod model;

pub use engine::{assignment_for, Experiment, ExperimentConfig};
pub use log::{read_events, EventLog};
pub use model::{
    read_export_csv, write_export_csv, AnalysisRecord, AssignmentPolicy, Condition, Event, IdeaServed, Session,
    StoryReceipt, VerificationAnswer, VerificationReceipt, EXTERNAL_AI_REASON, TARGET_SENTENCES,
};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("idea budget of {budget} exhausted for session {session:?}")]
    BudgetExhausted { session: String, budget: usize },
    #[error("no unserved ideas remain in the pool")]
    PoolExhausted,
    #[error("story already submitted for session {0:?}")]
    StoryAlreadySubmitted(String),
    #[error("story text is empty")]
    EmptyStory,
    #[error("session {0:?} has no story yet")]
    StoryRequired(String),
    #[error("verification not applicable to session {0:?}")]
    VerificationNotApplicable(String),
    #[error("verification already recorded for session {0:?}")]
    AlreadyVerified(String),
    #[error("event log: {0}")]
    Storage(String),
}

impl ExperimentError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ExperimentError::UnknownSession(_) => "unknown-session",
            ExperimentError::BudgetExhausted { .. } => "budget-exhausted",
            ExperimentError::PoolExhausted => "pool-exhausted",
            ExperimentError::StoryAlreadySubmitted(_) => "story-already-submitted",
            ExperimentError::EmptyStory => "empty-story",
            ExperimentError::StoryRequired(_) => "story-required",
            ExperimentError::VerificationNotApplicable(_) => "verification-not-applicable",
            ExperimentError::AlreadyVerified(_) => "already-verified",
            ExperimentError::Storage(_) => "storage",
        }
    }
}
