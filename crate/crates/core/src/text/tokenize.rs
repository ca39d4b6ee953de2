//! Sentence and word segmentation.
//!
//! Sentences end at runs of `.`, `!` or `?` (optionally followed by closing
//! quotes or brackets) that are followed by whitespace or the end of input.
//! A single period directly after a known abbreviation such as `Dr.` does not
//! end a sentence. Words are maximal runs of letters and apostrophes; digits,
//! hyphens and other punctuation separate words and are never counted.

use serde::{Deserialize, Serialize};

use super::TextError;

const ABBREVIATIONS: &[&str] = &[
    "dr", "mr", "mrs", "ms", "prof", "st", "jr", "sr", "vs", "etc", "e.g", "i.e", "mt", "capt",
    "gen", "lt", "col", "sgt", "rev", "hon", "gov", "sen", "rep", "fig", "approx", "dept", "a.m",
    "p.m", "cf", "ca",
];

const CLOSERS: &[char] = &['"', '\'', '\u{201d}', '\u{2019}', ')', ']', '}'];

/// A story split into sentences of word tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedStory {
    raw: String,
    sentences: Vec<Vec<String>>,
    tokens: Vec<String>,
}

impl TokenizedStory {
    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn sentences(&self) -> &[Vec<String>] {
        &self.sentences
    }

    /// All word tokens in order; always the concatenation of [`Self::sentences`].
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    pub fn word_count(&self) -> usize {
        self.tokens.len()
    }
}

/// Segments `text` into sentences and words.
pub fn tokenize(text: &str) -> Result<TokenizedStory, TextError> {
    if text.trim().is_empty() {
        return Err(TextError::EmptyText);
    }
    let sentences: Vec<Vec<String>> = split_sentences(text)
        .into_iter()
        .map(words)
        .filter(|w| !w.is_empty())
        .collect();
    let tokens = sentences.iter().flatten().cloned().collect();
    Ok(TokenizedStory {
        raw: text.to_string(),
        sentences,
        tokens,
    })
}

/// Number of sentences that contain at least one word.
pub fn count_sentences(text: &str) -> usize {
    split_sentences(text)
        .into_iter()
        .filter(|s| !words(s).is_empty())
        .count()
}

/// Splits `text` into trimmed sentence slices. Slices may contain no words
/// (for example a lone `...`); [`tokenize`] drops those.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if !matches!(c, '.' | '!' | '?') {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < chars.len() && matches!(chars[i].1, '.' | '!' | '?') {
            i += 1;
        }
        let single_period = i - run_start == 1 && c == '.';
        while i < chars.len() && CLOSERS.contains(&chars[i].1) {
            i += 1;
        }
        let at_end = i >= chars.len();
        if !at_end && !chars[i].1.is_whitespace() {
            continue;
        }
        if single_period && is_abbreviation(&text[..pos]) {
            continue;
        }
        let end = if at_end { text.len() } else { chars[i].0 };
        push_trimmed(&mut out, &text[start..end]);
        start = end;
    }
    push_trimmed(&mut out, &text[start..]);
    out
}

fn push_trimmed<'a>(out: &mut Vec<&'a str>, s: &'a str) {
    let s = s.trim();
    if !s.is_empty() {
        out.push(s);
    }
}

fn is_abbreviation(before_period: &str) -> bool {
    let word = before_period
        .rsplit(char::is_whitespace)
        .next()
        .unwrap_or("")
        .trim_start_matches(|c: char| !c.is_alphanumeric());
    let lower = word.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

/// Word tokens of `text`: runs of letters and apostrophes with outer
/// apostrophes trimmed. Curly apostrophes are normalised to `'`.
pub fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        let c = normalize_apostrophe(c);
        if c.is_alphabetic() || c == '\'' {
            current.push(c);
        } else {
            flush_word(&mut current, &mut out);
        }
    }
    flush_word(&mut current, &mut out);
    out
}

fn flush_word(current: &mut String, out: &mut Vec<String>) {
    let trimmed = current.trim_matches('\'');
    if trimmed.chars().any(char::is_alphabetic) {
        out.push(trimmed.to_string());
    }
    current.clear();
}

fn normalize_apostrophe(c: char) -> char {
    match c {
        '\u{2019}' | '\u{2018}' | '\u{02bc}' => '\'',
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_sentence() {
        let t = tokenize("The cat sat.").unwrap();
        assert_eq!(t.sentence_count(), 1);
        assert_eq!(t.tokens(), ["The", "cat", "sat"]);
    }

    #[test]
    fn mixed_terminators() {
        assert_eq!(tokenize("Go! Stop? Wait.").unwrap().sentence_count(), 3);
    }

    #[test]
    fn abbreviation_guard() {
        let t = tokenize("Dr. Evelyn left.").unwrap();
        assert_eq!(t.sentence_count(), 1);
        assert_eq!(t.tokens(), ["Dr", "Evelyn", "left"]);
    }

    #[test]
    fn single_letters_are_sentences() {
        assert_eq!(count_sentences("A. B. C."), 3);
    }

    #[test]
    fn ellipsis_and_closing_quote() {
        let text = "It rose behind them... They ran! She asked, \"Can we?\" He nodded.";
        assert_eq!(count_sentences(text), 4);
    }

    #[test]
    fn decimals_do_not_split() {
        assert_eq!(count_sentences("The ship moved at 3.5 units. Then it stopped."), 2);
    }

    #[test]
    fn words_drop_digits_and_split_hyphens() {
        assert_eq!(words("Kestrel-9 and dance-like"), ["Kestrel", "and", "dance", "like"]);
    }

    #[test]
    fn apostrophes_kept_inside_words() {
        assert_eq!(
            words("The planet\u{2019}s core 'glowed' don't"),
            ["The", "planet's", "core", "glowed", "don't"]
        );
    }

    #[test]
    fn trailing_text_without_terminator_counts() {
        assert_eq!(count_sentences("One. Two"), 2);
    }

    #[test]
    fn empty_text_rejected() {
        assert!(matches!(tokenize("  \n "), Err(TextError::EmptyText)));
    }

    #[test]
    fn wordless_segments_dropped() {
        let t = tokenize("Hi. ... 42.").unwrap();
        assert_eq!(t.sentence_count(), 1);
    }
}
