use std::collections::HashSet;
use std::path::Path;

use super::TextError;

/// Stopword and emotion word lists.
#[derive(Debug, Clone)]
pub struct Lexicons {
    stopwords: HashSet<String>,
    emotion: HashSet<String>,
}

impl Default for Lexicons {
    fn default() -> Self {
        Self::from_sources(
            include_str!("../../data/lexicon/stopwords_en.txt"),
            include_str!("../../data/lexicon/emotion_en.txt"),
        )
    }
}

impl Lexicons {
    pub fn from_sources(stopwords: &str, emotion: &str) -> Self {
        Self {
            stopwords: word_set(stopwords),
            emotion: word_set(emotion),
        }
    }

    pub fn from_files(stopwords: impl AsRef<Path>, emotion: impl AsRef<Path>) -> Result<Self, TextError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|_| TextError::MissingModelFile(p.display().to_string()))
        };
        Ok(Self::from_sources(&read(stopwords.as_ref())?, &read(emotion.as_ref())?))
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(&word.to_lowercase())
    }

    /// True when the word or one of its suffix-stripped stems is in the emotion list.
    pub fn is_emotional(&self, word: &str) -> bool {
        lemma_candidates(word).iter().any(|c| self.emotion.contains(c))
    }

    pub fn stopword_count(&self) -> usize {
        self.stopwords.len()
    }

    pub fn emotion_count(&self) -> usize {
        self.emotion.len()
    }
}

fn word_set(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Lowercased word followed by the stems its inflectional suffixes could hide.
/// Stems shorter than three letters are not produced.
pub fn lemma_candidates(word: &str) -> Vec<String> {
    let lower = word.to_lowercase();
    let w = lower.strip_suffix("'s").unwrap_or(&lower);
    let mut out = vec![w.to_string()];
    let mut add = |s: String| {
        if s.chars().count() >= 3 {
            out.push(s);
        }
    };
    let b: Vec<char> = w.chars().collect();
    let n = b.len();
    let cut = |k: usize| b[..n - k].iter().collect::<String>();

    if w.ends_with("ies") {
        add(cut(3) + "y");
    }
    if w.ends_with("es") {
        add(cut(2));
    }
    if w.ends_with('s') {
        add(cut(1));
    }
    if w.ends_with("ied") {
        add(cut(3) + "y");
    }
    if w.ends_with("ed") {
        add(cut(2));
        add(cut(1));
        if n > 4 && b[n - 3] == b[n - 4] {
            add(cut(3));
        }
    }
    if w.ends_with("ing") {
        add(cut(3));
        add(cut(3) + "e");
        if n > 5 && b[n - 4] == b[n - 5] {
            add(cut(4));
        }
    }
    if w.ends_with("ily") {
        add(cut(3) + "y");
    }
    if w.ends_with("ly") {
        add(cut(2));
    }
    if w.ends_with("ier") {
        add(cut(3) + "y");
    }
    if w.ends_with("iest") {
        add(cut(4) + "y");
    }
    if w.ends_with("er") {
        add(cut(2));
        add(cut(1));
    }
    if w.ends_with("est") {
        add(cut(3));
        add(cut(2));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_lists_load() {
        let lex = Lexicons::default();
        assert_eq!(lex.stopword_count(), 179);
        assert!(lex.is_stopword("The"));
        assert!(!lex.is_stopword("moon"));
    }

    #[test]
    fn candidates_strip_suffixes() {
        assert!(lemma_candidates("worried").contains(&"worry".to_string()));
        assert!(lemma_candidates("smiled").contains(&"smile".to_string()));
        assert!(lemma_candidates("hoping").contains(&"hope".to_string()));
        assert!(lemma_candidates("calmly").contains(&"calm".to_string()));
        assert!(lemma_candidates("happiest").contains(&"happy".to_string()));
        assert_eq!(lemma_candidates("Fear's")[0], "fear");
    }

    #[test]
    fn short_stems_skipped() {
        assert_eq!(lemma_candidates("red"), ["red"]);
    }
}
