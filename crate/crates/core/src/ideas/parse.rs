use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::text::count_sentences;

/// A plot text that passed validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidatedPlot {
    pub text: String,
    pub sentence_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum Rejection {
    #[error("empty text")]
    Empty,
    #[error("sentence-count: {0}")]
    SentenceCount(usize),
    #[error("persona-leak: {0}")]
    PersonaLeak(String),
}

fn numbering_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*(?:\(?\d{1,3}[.):]|[-*\u{2022}])\s+").expect("valid regex"))
}

/// Accepts text with exactly three sentences that does not mention any of
/// `banned_names` as a whole word (case-sensitive).
pub fn validate_plot(raw: &str, banned_names: &[&str]) -> Result<ValidatedPlot, Rejection> {
    let text = raw.trim();
    if text.is_empty() {
        return Err(Rejection::Empty);
    }
    let n = count_sentences(text);
    if n != 3 {
        return Err(Rejection::SentenceCount(n));
    }
    for name in banned_names.iter().filter(|n| !n.is_empty()) {
        let leaked = text
            .split(|c: char| !(c.is_alphanumeric() || c == '\''))
            .any(|w| w == *name || w.strip_suffix("'s") == Some(name));
        if leaked {
            return Err(Rejection::PersonaLeak(name.to_string()));
        }
    }
    Ok(ValidatedPlot {
        text: text.to_string(),
        sentence_count: n,
    })
}

/// Splits a model reply into candidate plot texts. Handles plain
/// one-per-line replies, quoted CSV rows (which may span lines), code fences
/// and list numbering.
pub fn parse_reply(reply: &str) -> Vec<String> {
    let lines = reply
        .lines()
        .filter(|l| !l.trim_start().starts_with("```"));
    let mut rows: Vec<String> = Vec::new();
    let mut pending: Option<String> = None;
    for line in lines {
        let row = match pending.take() {
            Some(mut p) => {
                p.push('\n');
                p.push_str(line);
                p
            }
            None => line.to_string(),
        };
        if row.matches('"').count() % 2 == 1 {
            pending = Some(row);
        } else {
            rows.push(row);
        }
    }
    rows.extend(pending);

    rows.into_iter()
        .filter_map(|row| {
            let row = row.trim();
            if row.is_empty() {
                return None;
            }
            let text = if row.contains('"') { longest_field(row) } else { row.to_string() };
            let text = numbering_re().replace(&text, "").trim().to_string();
            (!text.is_empty()).then_some(text)
        })
        .collect()
}

fn longest_field(row: &str) -> String {
    let body = numbering_re().replace(row, "");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(body.as_bytes());
    let mut best = String::new();
    for record in reader.records().flatten() {
        for field in record.iter() {
            if field.trim().len() > best.len() {
                best = field.trim().to_string();
            }
        }
    }
    if best.is_empty() {
        row.trim_matches('"').to_string()
    } else {
        best
    }
}
