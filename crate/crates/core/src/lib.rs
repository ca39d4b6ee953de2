//! Core library for persona-diversified ideation studies: personas, plot
//! generation, embeddings, similarity metrics, text analytics and statistics.

pub mod diversity;
pub mod embedding;
pub mod experiment;
pub mod ideas;
pub mod persona;
pub mod stats;
pub mod text;
