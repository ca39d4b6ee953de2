//! Tokenisation, part-of-speech tagging and the nine-attribute linguistic profile.

mod lexicon;
mod profile;
mod tagger;
mod tokenize;

pub use lexicon::{lemma_candidates, Lexicons};
pub use profile::{
    compare_groups, profile, Attribute, GroupComparisonRow, LinguisticProfile, TextAnalyzer,
};
pub use tagger::{tag_pos, tag_sentence, PosTag, TaggerModel};
pub use tokenize::{count_sentences, split_sentences, tokenize, words, TokenizedStory};

#[derive(Debug, thiserror::Error)]
pub enum TextError {
    #[error("text is empty")]
    EmptyText,
    #[error("missing model file {0}")]
    MissingModelFile(String),
    #[error("invalid model data: {0}")]
    Model(String),
    #[error("each group needs at least 2 profiles (got {a} and {b})")]
    GroupTooSmall { a: usize, b: usize },
    #[error(transparent)]
    Stats(#[from] crate::stats::StatsError),
}
