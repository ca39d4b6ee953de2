use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::lexicon::Lexicons;
use super::tagger::{tag_sentence, PosTag, TaggerModel};
use super::tokenize::tokenize;
use super::TextError;
use crate::stats::{two_sample_t, TTestResult};

/// The nine per-story linguistic attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticProfile {
    pub total_words: usize,
    pub sentences: usize,
    pub avg_words_per_sentence: f64,
    pub unique_words: usize,
    pub common_words_pct: f64,
    pub action_words: usize,
    pub descriptive_words: usize,
    pub named_characters: usize,
    pub emotional_words: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    TotalWords,
    Sentences,
    AvgWordsPerSentence,
    UniqueWords,
    CommonWordsPct,
    ActionWords,
    DescriptiveWords,
    NamedCharacters,
    EmotionalWords,
}

impl Attribute {
    pub const ALL: [Attribute; 9] = [
        Attribute::TotalWords,
        Attribute::Sentences,
        Attribute::AvgWordsPerSentence,
        Attribute::UniqueWords,
        Attribute::CommonWordsPct,
        Attribute::ActionWords,
        Attribute::DescriptiveWords,
        Attribute::NamedCharacters,
        Attribute::EmotionalWords,
    ];

    /// Human-readable label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Attribute::TotalWords => "Total Words",
            Attribute::Sentences => "Sentences",
            Attribute::AvgWordsPerSentence => "Avg Words per Sentence",
            Attribute::UniqueWords => "Unique Words",
            Attribute::CommonWordsPct => "Common Words (%)",
            Attribute::ActionWords => "Action Words",
            Attribute::DescriptiveWords => "Descriptive Words",
            Attribute::NamedCharacters => "Named Characters",
            Attribute::EmotionalWords => "Emotional Words",
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl LinguisticProfile {
    pub fn get(&self, attr: Attribute) -> f64 {
        match attr {
            Attribute::TotalWords => self.total_words as f64,
            Attribute::Sentences => self.sentences as f64,
            Attribute::AvgWordsPerSentence => self.avg_words_per_sentence,
            Attribute::UniqueWords => self.unique_words as f64,
            Attribute::CommonWordsPct => self.common_words_pct,
            Attribute::ActionWords => self.action_words as f64,
            Attribute::DescriptiveWords => self.descriptive_words as f64,
            Attribute::NamedCharacters => self.named_characters as f64,
            Attribute::EmotionalWords => self.emotional_words as f64,
        }
    }
}

/// Tagger plus lexicons; cheap to share, read-only once built.
#[derive(Debug, Clone, Default)]
pub struct TextAnalyzer {
    pub tagger: TaggerModel,
    pub lexicons: Lexicons,
}

impl TextAnalyzer {
    pub fn new(tagger: TaggerModel, lexicons: Lexicons) -> Self {
        Self { tagger, lexicons }
    }

    /// Shared instance built from the embedded data files.
    pub fn shipped() -> &'static TextAnalyzer {
        static SHARED: OnceLock<TextAnalyzer> = OnceLock::new();
        SHARED.get_or_init(TextAnalyzer::default)
    }

    pub fn profile(&self, text: &str) -> Result<LinguisticProfile, TextError> {
        let story = tokenize(text)?;
        let tagged: Vec<Vec<(&str, PosTag)>> = story
            .sentences()
            .iter()
            .map(|s| {
                let tags = tag_sentence(s, &self.tagger);
                s.iter().map(String::as_str).zip(tags).collect()
            })
            .collect();
        Ok(self.profile_tagged(&tagged))
    }

    /// Profile from already tagged sentences.
    pub fn profile_tagged(&self, sentences: &[Vec<(&str, PosTag)>]) -> LinguisticProfile {
        let tokens: Vec<(&str, PosTag)> = sentences.iter().flatten().copied().collect();
        let total = tokens.len();
        let count_tag = |tag| tokens.iter().filter(|(_, t)| *t == tag).count();
        let unique: HashSet<String> = tokens.iter().map(|(w, _)| w.to_lowercase()).collect();
        let common = tokens.iter().filter(|(w, _)| self.lexicons.is_stopword(w)).count();
        let emotional = tokens.iter().filter(|(w, _)| self.lexicons.is_emotional(w)).count();

        let noninitial: HashSet<&str> = sentences
            .iter()
            .flat_map(|s| s.iter().skip(1))
            .map(|(w, _)| strip_possessive(w))
            .collect();
        let mut named = HashSet::new();
        for sentence in sentences {
            for (i, (w, tag)) in sentence.iter().enumerate() {
                if *tag != PosTag::Propn {
                    continue;
                }
                let lemma = strip_possessive(w);
                if self.lexicons.is_stopword(lemma) || (i == 0 && !noninitial.contains(lemma)) {
                    continue;
                }
                named.insert(lemma);
            }
        }

        let n_sent = sentences.len();
        LinguisticProfile {
            total_words: total,
            sentences: n_sent,
            avg_words_per_sentence: if n_sent == 0 { 0.0 } else { total as f64 / n_sent as f64 },
            unique_words: unique.len(),
            common_words_pct: if total == 0 { 0.0 } else { 100.0 * common as f64 / total as f64 },
            action_words: count_tag(PosTag::Verb),
            descriptive_words: count_tag(PosTag::Adj),
            named_characters: named.len(),
            emotional_words: emotional,
        }
    }
}

fn strip_possessive(w: &str) -> &str {
    if w.len() > 2 && w[w.len() - 2..].eq_ignore_ascii_case("'s") {
        &w[..w.len() - 2]
    } else {
        w
    }
}

/// Profile of `text` using the shipped tagger and lexicons.
pub fn profile(text: &str) -> Result<LinguisticProfile, TextError> {
    TextAnalyzer::shipped().profile(text)
}

/// Per-attribute comparison of two groups of profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupComparisonRow {
    pub attribute: Attribute,
    pub mean_a: f64,
    pub mean_b: f64,
    pub std_a: f64,
    pub std_b: f64,
    pub t: f64,
    pub p: f64,
}

/// Two-sample t-test (pooled unless `pooled` is false) on each attribute.
pub fn compare_groups(
    a: &[LinguisticProfile],
    b: &[LinguisticProfile],
    pooled: bool,
) -> Result<Vec<GroupComparisonRow>, TextError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(TextError::GroupTooSmall { a: a.len(), b: b.len() });
    }
    Attribute::ALL
        .iter()
        .map(|&attr| {
            let xa: Vec<f64> = a.iter().map(|p| p.get(attr)).collect();
            let xb: Vec<f64> = b.iter().map(|p| p.get(attr)).collect();
            let TTestResult { t, p, .. } = two_sample_t(&xa, &xb, pooled)?;
            Ok(GroupComparisonRow {
                attribute: attr,
                mean_a: crate::stats::mean(&xa),
                mean_b: crate::stats::mean(&xb),
                std_a: crate::stats::sample_std(&xa),
                std_b: crate::stats::sample_std(&xb),
                t,
                p,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_word() {
        let p = profile("Hi.").unwrap();
        assert_eq!(p.total_words, 1);
        assert_eq!(p.sentences, 1);
        assert_eq!(p.avg_words_per_sentence, 1.0);
    }

    #[test]
    fn sentence_initial_name_needs_recurrence() {
        let once = profile("Amina smiled. The door opened.").unwrap();
        assert_eq!(once.named_characters, 0);
        let twice = profile("Amina smiled. The door opened for Amina.").unwrap();
        assert_eq!(twice.named_characters, 1);
    }

    #[test]
    fn identical_groups_compare_to_zero() {
        let texts = ["The cat sat. It was happy.", "A dog ran far away from Rome. Dogs run."];
        let group: Vec<_> = texts.iter().map(|t| profile(t).unwrap()).collect();
        for row in compare_groups(&group, &group, true).unwrap() {
            assert_eq!(row.t, 0.0, "{}", row.attribute);
            assert_eq!(row.p, 1.0, "{}", row.attribute);
        }
    }

    #[test]
    fn small_groups_rejected() {
        let p = profile("Hi.").unwrap();
        assert!(matches!(
            compare_groups(std::slice::from_ref(&p), &[p.clone(), p.clone()], true),
            Err(TextError::GroupTooSmall { .. })
        ));
    }
}
