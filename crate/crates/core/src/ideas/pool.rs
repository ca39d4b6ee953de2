use std::collections::HashSet;
use std::io::{Read, Write};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::GenerationParams;
use crate::text::count_sentences;

const HEADER: [&str; 3] = ["idea_id", "persona_id", "text"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotIdea {
    pub id: String,
    pub persona_id: String,
    pub text: String,
    pub sentence_count: usize,
    /// Generation settings; not stored in pool files, so `None` after import.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_with: Option<GenerationParams>,
}

impl PlotIdea {
    /// Equality ignoring generation metadata.
    pub fn same_content(&self, other: &PlotIdea) -> bool {
        self.id == other.id
            && self.persona_id == other.persona_id
            && self.text == other.text
            && self.sentence_count == other.sentence_count
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PoolError {
    #[error("duplicate idea id {0:?}")]
    DuplicateId(String),
    #[error("persona {persona:?} has {got} ideas, others have {expected}")]
    NonUniform { persona: String, got: usize, expected: usize },
    #[error("bad header: expected idea_id,persona_id,text, got {0:?}")]
    Header(Vec<String>),
    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Ideas with unique ids and the same number of ideas per persona.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdeaPool {
    ideas: Vec<PlotIdea>,
    personas: Vec<String>,
}

impl IdeaPool {
    pub fn new(ideas: Vec<PlotIdea>) -> Result<Self, PoolError> {
        let mut seen = HashSet::new();
        let mut counts: IndexMap<&str, usize> = IndexMap::new();
        for idea in &ideas {
            if !seen.insert(idea.id.as_str()) {
                return Err(PoolError::DuplicateId(idea.id.clone()));
            }
            *counts.entry(&idea.persona_id).or_default() += 1;
        }
        if let Some((_, &expected)) = counts.first() {
            if let Some((p, &got)) = counts.iter().find(|(_, c)| **c != expected) {
                return Err(PoolError::NonUniform { persona: p.to_string(), got, expected });
            }
        }
        let personas = counts.keys().map(|s| s.to_string()).collect();
        Ok(Self { ideas, personas })
    }

    pub fn ideas(&self) -> &[PlotIdea] {
        &self.ideas
    }

    pub fn personas(&self) -> &[String] {
        &self.personas
    }

    pub fn len(&self) -> usize {
        self.ideas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideas.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&PlotIdea> {
        self.ideas.iter().find(|i| i.id == id)
    }

    pub fn by_persona(&self) -> IndexMap<&str, Vec<&PlotIdea>> {
        let mut out: IndexMap<&str, Vec<&PlotIdea>> = IndexMap::new();
        for idea in &self.ideas {
            out.entry(&idea.persona_id).or_default().push(idea);
        }
        out
    }

    /// Field-for-field equality ignoring generation metadata.
    pub fn same_content(&self, other: &IdeaPool) -> bool {
        self.personas == other.personas
            && self.ideas.len() == other.ideas.len()
            && self.ideas.iter().zip(&other.ideas).all(|(a, b)| a.same_content(b))
    }
}

/// Writes the pool as RFC 4180 CSV with header `idea_id,persona_id,text`.
pub fn export_pool<W: Write>(pool: &IdeaPool, out: W) -> Result<(), PoolError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    w.write_record(HEADER)?;
    for idea in &pool.ideas {
        w.write_record([&idea.id, &idea.persona_id, &idea.text])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn export_pool_string(pool: &IdeaPool) -> String {
    let mut buf = Vec::new();
    export_pool(pool, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("pool text is UTF-8")
}

pub fn import_pool<R: Read>(input: R) -> Result<IdeaPool, PoolError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        return Err(PoolError::Header(header));
    }
    let mut ideas = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let [id, persona_id, text] = [0, 1, 2].map(|j| record.get(j).unwrap_or_default().to_string());
        if id.is_empty() || persona_id.is_empty() {
            return Err(PoolError::Row { row, msg: "empty idea_id or persona_id".into() });
        }
        if text.trim().is_empty() {
            return Err(PoolError::Row { row, msg: "empty text".into() });
        }
        ideas.push(PlotIdea {
            sentence_count: count_sentences(&text),
            id,
            persona_id,
            text,
            created_with: None,
        });
    }
    IdeaPool::new(ideas)
}
