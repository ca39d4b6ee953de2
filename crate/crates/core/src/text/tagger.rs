//! Lexicon-and-rules part-of-speech tagger with four coarse output tags.
//!
//! The model is four plain-text files: closed-class words with their class,
//! verb lemmas (irregular forms listed explicitly), adjectives and nouns.
//! Inflected forms are generated when the model is loaded. Ambiguous words
//! are resolved from the neighbouring tokens; unknown words fall back to
//! capitalisation and suffix cues.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tokenize::TokenizedStory;
use super::TextError;

/// Coarse tag reported per token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PosTag {
    Verb,
    Adj,
    Propn,
    Other,
}

impl PosTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::Verb => "VERB",
            PosTag::Adj => "ADJ",
            PosTag::Propn => "PROPN",
            PosTag::Other => "OTHER",
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PosTag {
    type Err = TextError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "VERB" => Ok(PosTag::Verb),
            "ADJ" => Ok(PosTag::Adj),
            "PROPN" => Ok(PosTag::Propn),
            "OTHER" => Ok(PosTag::Other),
            other => Err(TextError::Model(format!("unknown tag {other:?}"))),
        }
    }
}

/// Fine word class used internally for context rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum WordClass {
    Det,
    Poss,
    Pron,
    Wh,
    Prep,
    To,
    Conj,
    Modal,
    Aux,
    Adv,
    Intj,
    Num,
    Noun,
    Verb,
    Adj,
    Propn,
}

impl WordClass {
    fn is_closed(self) -> bool {
        !matches!(
            self,
            WordClass::Noun | WordClass::Verb | WordClass::Adj | WordClass::Propn
        )
    }

    fn coarse(self) -> PosTag {
        match self {
            WordClass::Verb | WordClass::Aux => PosTag::Verb,
            WordClass::Adj => PosTag::Adj,
            WordClass::Propn => PosTag::Propn,
            _ => PosTag::Other,
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "DET" => WordClass::Det,
            "POSS" => WordClass::Poss,
            "PRON" => WordClass::Pron,
            "WH" => WordClass::Wh,
            "PREP" => WordClass::Prep,
            "TO" => WordClass::To,
            "CONJ" => WordClass::Conj,
            "MODAL" => WordClass::Modal,
            "AUX" => WordClass::Aux,
            "ADV" => WordClass::Adv,
            "INTJ" => WordClass::Intj,
            "NUM" => WordClass::Num,
            _ => return None,
        })
    }
}

const MODEL_FILES: [&str; 4] = ["closed.txt", "verbs.txt", "adjectives.txt", "nouns.txt"];

const LINKING: &[&str] = &[
    "am", "is", "are", "was", "were", "be", "been", "being", "seem", "seems", "seemed", "feel",
    "feels", "felt", "become", "becomes", "became", "look", "looks", "looked", "remain",
    "remains", "remained", "stay", "stays", "stayed", "go", "goes", "went", "gone", "grow",
    "grows", "grew", "turn", "turns", "turned", "appear", "appears", "appeared", "sound",
    "sounds", "sounded", "get", "gets", "got",
];

const DO_FORMS: &[&str] = &["do", "does", "did", "don't", "doesn't", "didn't"];

/// Lexicon and inflection tables backing [`tag_pos`].
#[derive(Debug, Clone)]
pub struct TaggerModel {
    lexicon: HashMap<String, Vec<WordClass>>,
    participles: std::collections::HashSet<String>,
}

impl Default for TaggerModel {
    fn default() -> Self {
        Self::from_sources(
            include_str!("../../data/tagger/closed.txt"),
            include_str!("../../data/tagger/verbs.txt"),
            include_str!("../../data/tagger/adjectives.txt"),
            include_str!("../../data/tagger/nouns.txt"),
        )
        .expect("embedded tagger model is valid")
    }
}

impl TaggerModel {
    /// Loads a model directory holding `closed.txt`, `verbs.txt`,
    /// `adjectives.txt` and `nouns.txt`.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self, TextError> {
        let dir = dir.as_ref();
        let mut texts = Vec::with_capacity(MODEL_FILES.len());
        for name in MODEL_FILES {
            let path = dir.join(name);
            let text = std::fs::read_to_string(&path)
                .map_err(|_| TextError::MissingModelFile(path.display().to_string()))?;
            texts.push(text);
        }
        Self::from_sources(&texts[0], &texts[1], &texts[2], &texts[3])
    }

    pub fn from_sources(
        closed: &str,
        verbs: &str,
        adjectives: &str,
        nouns: &str,
    ) -> Result<Self, TextError> {
        let mut model = TaggerModel {
            lexicon: HashMap::new(),
            participles: Default::default(),
        };
        for (lineno, line) in data_lines(closed) {
            let mut parts = line.split_whitespace();
            let (Some(word), Some(class), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(TextError::Model(format!("closed.txt:{lineno}: expected `word CLASS`")));
            };
            let class = WordClass::parse(class).ok_or_else(|| {
                TextError::Model(format!("closed.txt:{lineno}: unknown class {class:?}"))
            })?;
            model.add(word, class);
        }
        for (lineno, line) in data_lines(verbs) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let base = parts[0];
            let (past, participle) = match parts.len() {
                1 => (regular_past(base), regular_past(base)),
                3 | 4 => (parts[1].to_string(), parts[2].to_string()),
                _ => {
                    return Err(TextError::Model(format!(
                        "verbs.txt:{lineno}: expected `base [past participle [ing]]`"
                    )))
                }
            };
            let ing = parts
                .get(3)
                .map(|s| s.to_string())
                .unwrap_or_else(|| regular_ing(base));
            for form in [base.to_string(), third_person(base), past.clone(), participle.clone(), ing.clone()] {
                model.add(&form, WordClass::Verb);
            }
            for form in [past, participle, ing] {
                model.participles.insert(form);
            }
        }
        for (_, line) in data_lines(adjectives) {
            model.add(line, WordClass::Adj);
            if let Some((comparative, superlative)) = degree_forms(line) {
                model.add(&comparative, WordClass::Adj);
                model.add(&superlative, WordClass::Adj);
            }
        }
        for (lineno, line) in data_lines(nouns) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                [singular] => {
                    model.add(singular, WordClass::Noun);
                    model.add(&plural(singular), WordClass::Noun);
                }
                [singular, plural] => {
                    model.add(singular, WordClass::Noun);
                    model.add(plural, WordClass::Noun);
                }
                _ => {
                    return Err(TextError::Model(format!(
                        "nouns.txt:{lineno}: expected `singular [plural]`"
                    )))
                }
            }
        }
        Ok(model)
    }

    fn add(&mut self, word: &str, class: WordClass) {
        let entry = self.lexicon.entry(word.to_lowercase()).or_default();
        if !entry.contains(&class) {
            entry.push(class);
        }
    }

    fn lookup(&self, lower: &str) -> Option<&[WordClass]> {
        if let Some(c) = self.lexicon.get(lower) {
            return Some(c);
        }
        lower
            .strip_suffix("'s")
            .and_then(|stem| self.lexicon.get(stem))
            .map(Vec::as_slice)
    }

    /// Number of distinct surface forms in the lexicon.
    pub fn len(&self) -> usize {
        self.lexicon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lexicon.is_empty()
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn syllable_groups(word: &str) -> usize {
    let mut groups = 0;
    let mut prev_vowel = false;
    for c in word.chars() {
        let v = is_vowel(c) || c == 'y' && groups > 0;
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    groups
}

/// Monosyllabic consonant-vowel-consonant words double the final letter.
fn doubles_final(word: &str) -> bool {
    let c: Vec<char> = word.chars().collect();
    let n = c.len();
    n >= 3
        && syllable_groups(word) == 1
        && !is_vowel(c[n - 1])
        && !matches!(c[n - 1], 'w' | 'x' | 'y')
        && is_vowel(c[n - 2])
        && !is_vowel(c[n - 3])
}

fn consonant_y(word: &str) -> bool {
    let c: Vec<char> = word.chars().collect();
    c.len() >= 2 && c[c.len() - 1] == 'y' && !is_vowel(c[c.len() - 2])
}

fn regular_past(base: &str) -> String {
    if base.ends_with('e') {
        format!("{base}d")
    } else if consonant_y(base) {
        format!("{}ied", &base[..base.len() - 1])
    } else if doubles_final(base) {
        format!("{base}{}ed", &base[base.len() - 1..])
    } else {
        format!("{base}ed")
    }
}

fn regular_ing(base: &str) -> String {
    if let Some(stem) = base.strip_suffix("ie") {
        format!("{stem}ying")
    } else if base.ends_with('e') && !base.ends_with("ee") && !base.ends_with("ye") && !base.ends_with("oe") && base.len() > 2 {
        format!("{}ing", &base[..base.len() - 1])
    } else if doubles_final(base) {
        format!("{base}{}ing", &base[base.len() - 1..])
    } else {
        format!("{base}ing")
    }
}

fn third_person(base: &str) -> String {
    if base == "be" {
        "is".into()
    } else if base == "have" {
        "has".into()
    } else {
        plural(base)
    }
}

fn plural(word: &str) -> String {
    if ["s", "x", "z", "ch", "sh", "o"].iter().any(|s| word.ends_with(s)) {
        format!("{word}es")
    } else if consonant_y(word) {
        format!("{}ies", &word[..word.len() - 1])
    } else {
        format!("{word}s")
    }
}

fn degree_forms(adj: &str) -> Option<(String, String)> {
    if adj.contains(' ') || adj.contains('-') {
        return None;
    }
    let groups = syllable_groups(adj);
    if consonant_y(adj) && groups <= 2 {
        let stem = &adj[..adj.len() - 1];
        return Some((format!("{stem}ier"), format!("{stem}iest")));
    }
    if groups != 1 {
        return None;
    }
    if adj.ends_with('e') {
        Some((format!("{adj}r"), format!("{adj}st")))
    } else if doubles_final(adj) {
        let last = &adj[adj.len() - 1..];
        Some((format!("{adj}{last}er"), format!("{adj}{last}est")))
    } else {
        Some((format!("{adj}er"), format!("{adj}est")))
    }
}

const NOUN_SUFFIXES: &[&str] = &[
    "tion", "sion", "ment", "ness", "ity", "ship", "ance", "ence", "ism", "ist", "dom", "hood",
    "ure", "er", "or",
];
const ADJ_SUFFIXES: &[&str] = &[
    "ous", "ful", "ive", "able", "ible", "less", "ical", "ish", "esque", "escent", "ic", "al",
];
const VERB_SUFFIXES: &[&str] = &["ize", "ise", "ify"];

/// Classes for a word missing from the lexicon, from its shape alone.
fn guess_unknown(lower: &str) -> WordClass {
    let stem = lower.strip_suffix("'s").unwrap_or(lower);
    if NOUN_SUFFIXES.iter().any(|s| stem.ends_with(s)) {
        return WordClass::Noun;
    }
    if stem.ends_with("ly") {
        return WordClass::Adv;
    }
    if ADJ_SUFFIXES.iter().any(|s| stem.ends_with(s)) {
        return WordClass::Adj;
    }
    if stem.ends_with("ed") || stem.ends_with("ing") || VERB_SUFFIXES.iter().any(|s| stem.ends_with(s)) {
        return WordClass::Verb;
    }
    if stem.len() > 3 && consonant_y(stem) && !stem.ends_with("ry") {
        return WordClass::Adj;
    }
    WordClass::Noun
}

struct Token<'a> {
    word: &'a str,
    lower: String,
    classes: Vec<WordClass>,
    known: bool,
}

impl Token<'_> {
    fn has(&self, c: WordClass) -> bool {
        self.classes.contains(&c)
    }

    fn capitalized(&self) -> bool {
        self.word.chars().next().is_some_and(char::is_uppercase)
    }

    fn nounish(&self) -> bool {
        if self.capitalized() && !self.classes.iter().any(|c| c.is_closed()) {
            return true;
        }
        self.has(WordClass::Noun) || self.has(WordClass::Adj)
    }

    fn is_participle_form(&self, model: &TaggerModel) -> bool {
        model.participles.contains(&self.lower)
            || (!self.known && (self.lower.ends_with("ed") || self.lower.ends_with("ing")))
    }

    fn is_possessive(&self) -> bool {
        self.lower.ends_with("'s")
    }
}

/// Tags every token of `story`; one tag per token, sentence by sentence.
pub fn tag_pos(story: &TokenizedStory, model: &TaggerModel) -> Vec<PosTag> {
    story
        .sentences()
        .iter()
        .flat_map(|s| tag_sentence(s, model))
        .collect()
}

/// Tags a single sentence of word tokens.
pub fn tag_sentence(words: &[String], model: &TaggerModel) -> Vec<PosTag> {
    tag_sentence_classes(words, model)
        .into_iter()
        .map(WordClass::coarse)
        .collect()
}

fn tag_sentence_classes(words: &[String], model: &TaggerModel) -> Vec<WordClass> {
    let tokens: Vec<Token> = words
        .iter()
        .map(|w| {
            let lower = w.to_lowercase();
            match model.lookup(&lower) {
                Some(c) => Token {
                    word: w,
                    lower,
                    classes: c.to_vec(),
                    known: true,
                },
                None => Token {
                    word: w,
                    classes: vec![guess_unknown(&lower)],
                    lower,
                    known: false,
                },
            }
        })
        .collect();

    let mut assigned: Vec<WordClass> = Vec::with_capacity(tokens.len());
    for (i, tok) in tokens.iter().enumerate() {
        let prev = i.checked_sub(1).map(|j| (&tokens[j], assigned[j]));
        let next = tokens.get(i + 1);
        assigned.push(resolve(tok, i == 0, prev, next, model));
    }
    assigned
}

fn resolve(
    tok: &Token,
    initial: bool,
    prev: Option<(&Token, WordClass)>,
    next: Option<&Token>,
    model: &TaggerModel,
) -> WordClass {
    use WordClass::*;

    let closed = tok.classes.iter().copied().find(|c| c.is_closed());
    if tok.capitalized() {
        if let Some(c) = closed.filter(|_| tok.known) {
            return c;
        }
        if !initial || !tok.known {
            return Propn;
        }
    }

    let prev_class = prev.map(|(_, c)| c);
    let prev_word = prev.map(|(t, _)| t.lower.as_str()).unwrap_or("");
    let prev_possessive = prev.is_some_and(|(t, c)| t.is_possessive() && matches!(c, Noun | Propn));
    let prev_det = matches!(prev_class, Some(Det | Poss)) || prev_possessive;
    let prev_det_like = prev_det || matches!(prev_class, Some(Adj | Num));
    let prev_linking = LINKING.contains(&prev_word);
    let prev_verbal = matches!(prev_class, Some(Pron | Modal | To))
        || DO_FORMS.contains(&prev_word)
        || (prev_class == Some(Aux) && !prev_linking);
    let next_nounish = next.is_some_and(Token::nounish);
    let next_conj = next.is_some_and(|t| t.has(Conj));
    let next_is_verbal = next.is_some_and(|t| t.has(Aux) || t.has(Modal));

    let has = |c| tok.has(c);

    // participles and -ing forms directly modifying a noun
    if has(Verb) && !has(Noun) && tok.is_participle_form(model) && prev_det_like {
        if next_nounish || next_conj || has(Adj) {
            return Adj;
        }
        if prev_det && !tok.known {
            return Noun;
        }
    }

    if tok.classes.len() == 1 {
        let only = tok.classes[0];
        if only == Verb && prev_det_like && !tok.is_participle_form(model) {
            return Noun;
        }
        if only == Noun
            && !tok.known
            && tok.lower.ends_with('s')
            && !tok.lower.ends_with("ss")
            && matches!(prev_class, Some(Wh | Pron | Noun | Propn))
            && !tok.is_possessive()
        {
            return Verb;
        }
        return only;
    }

    if let Some(closed) = closed {
        if has(Verb) && prev_verbal {
            return Verb;
        }
        if has(Adj) && prev_det_like && next_nounish {
            return Adj;
        }
        if has(Noun) && prev_det_like {
            return Noun;
        }
        if has(Adj) && prev_det {
            return Adj;
        }
        if has(Adj) && prev_linking && next.is_none_or(|t| t.has(Conj) || t.has(Prep)) {
            return Adj;
        }
        return closed;
    }

    if has(Adj) && prev_linking && !next_nounish {
        return Adj;
    }
    if prev_det_like {
        if has(Adj) && next_nounish {
            return Adj;
        }
        if has(Noun) {
            return Noun;
        }
        if has(Adj) {
            return Adj;
        }
    }
    if prev_verbal && has(Verb) {
        return Verb;
    }
    if matches!(prev_class, Some(Prep)) {
        if has(Adj) && next_nounish {
            return Adj;
        }
        if has(Noun) {
            return Noun;
        }
    }
    if matches!(prev_class, Some(Wh)) {
        let inflected = tok.lower.ends_with('s') || tok.lower.ends_with("ed");
        if inflected && has(Verb) {
            return Verb;
        }
        if has(Noun) {
            return Noun;
        }
    }
    if matches!(prev_class, Some(Noun | Propn)) && has(Verb) {
        return Verb;
    }
    if prev.is_none() && next_is_verbal && has(Noun) {
        return Noun;
    }

    // defaults
    if has(Adj) && has(Noun) {
        return if next_nounish { Adj } else { Noun };
    }
    if has(Adj) && has(Verb) {
        let verbal_form = tok.lower.ends_with("ed") || tok.lower.ends_with("ing");
        return if verbal_form { Verb } else { Adj };
    }
    if has(Noun) {
        return Noun;
    }
    tok.classes[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    fn tags(text: &str) -> Vec<(String, PosTag)> {
        let story = tokenize(text).unwrap();
        let model = TaggerModel::default();
        story
            .tokens()
            .iter()
            .cloned()
            .zip(tag_pos(&story, &model))
            .collect()
    }

    fn tag_of(text: &str, word: &str) -> PosTag {
        tags(text)
            .into_iter()
            .find(|(w, _)| w == word)
            .map(|(_, t)| t)
            .unwrap()
    }

    #[test]
    fn verb_after_adverb() {
        assert_eq!(tag_of("She quickly ran.", "ran"), PosTag::Verb);
        assert_eq!(tag_of("quickly ran", "ran"), PosTag::Verb);
    }

    #[test]
    fn adjective_before_noun() {
        assert_eq!(tag_of("an ancient map", "ancient"), PosTag::Adj);
    }

    #[test]
    fn proper_noun_sentence_initial() {
        assert_eq!(tag_of("Amina smiled.", "Amina"), PosTag::Propn);
        assert_eq!(tag_of("Amina smiled.", "smiled"), PosTag::Verb);
    }

    #[test]
    fn noun_verb_ambiguity() {
        assert_eq!(tag_of("They must race home.", "race"), PosTag::Verb);
        assert_eq!(tag_of("It was a race against time.", "race"), PosTag::Other);
    }

    #[test]
    fn prenominal_participle() {
        assert_eq!(tag_of("They found the hidden city.", "hidden"), PosTag::Adj);
        assert_eq!(tag_of("They had hidden the map.", "hidden"), PosTag::Verb);
    }

    #[test]
    fn capitalized_function_word_mid_sentence() {
        assert_eq!(tag_of("He asked, \"Can we go?\"", "Can"), PosTag::Other);
    }

    #[test]
    fn inflection_generation() {
        assert_eq!(regular_past("stop"), "stopped");
        assert_eq!(regular_past("try"), "tried");
        assert_eq!(regular_past("visit"), "visited");
        assert_eq!(regular_ing("make"), "making");
        assert_eq!(regular_ing("see"), "seeing");
        assert_eq!(regular_ing("die"), "dying");
        assert_eq!(plural("mystery"), "mysteries");
        assert_eq!(plural("search"), "searches");
        assert_eq!(degree_forms("big").unwrap().0, "bigger");
        assert_eq!(degree_forms("happy").unwrap().1, "happiest");
        assert_eq!(degree_forms("great").unwrap().1, "greatest");
    }

    #[test]
    fn missing_model_file() {
        let dir = tempfile::tempdir().unwrap();
        let err = TaggerModel::from_dir(dir.path()).unwrap_err();
        assert!(matches!(err, TextError::MissingModelFile(_)));
    }

    #[test]
    fn deterministic() {
        let text = "The crew lands on a strange moon and the captain plans a daring escape.";
        assert_eq!(tags(text), tags(text));
    }
}
