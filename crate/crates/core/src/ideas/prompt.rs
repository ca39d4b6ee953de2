use serde::{Deserialize, Serialize};

use crate::persona::PersonaDescription;

/// System prompt sent with every plot request.
pub const SYSTEM_PROMPT: &str = include_str!("../../data/prompts/system.txt");
const USER_TEMPLATE: &str = include_str!("../../data/prompts/user.txt");

/// How the requested count appears in the user prompt.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountStyle {
    #[default]
    Words,
    Digits,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system: String,
    pub user: String,
    pub count: usize,
}

const ONES: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen",
];
const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

/// English cardinal for `n`, hyphenating compound tens ("thirty-one").
pub fn number_to_words(n: u64) -> String {
    match n {
        0..=19 => ONES[n as usize].to_string(),
        20..=99 => {
            let (t, o) = (n / 10, n % 10);
            if o == 0 {
                TENS[t as usize].to_string()
            } else {
                format!("{}-{}", TENS[t as usize], ONES[o as usize])
            }
        }
        100..=999 => {
            let (h, r) = (n / 100, n % 100);
            if r == 0 {
                format!("{} hundred", ONES[h as usize])
            } else {
                format!("{} hundred {}", ONES[h as usize], number_to_words(r))
            }
        }
        _ => {
            let scales = [(1_000_000_000_000, "trillion"), (1_000_000_000, "billion"), (1_000_000, "million"), (1_000, "thousand")];
            let (unit, name) = scales.into_iter().find(|(u, _)| n >= *u).expect("n >= 1000");
            let (hi, r) = (n / unit, n % unit);
            if r == 0 {
                format!("{} {name}", number_to_words(hi))
            } else {
                format!("{} {name} {}", number_to_words(hi), number_to_words(r))
            }
        }
    }
}

/// System prompt plus the user request for `count` plots. The persona
/// description goes in the system message after the fixed instructions.
pub fn build_generation_prompt(persona: &PersonaDescription, count: usize, style: CountStyle) -> PromptBundle {
    assert!(count >= 1, "count must be at least 1");
    let count_text = match style {
        CountStyle::Words => number_to_words(count as u64),
        CountStyle::Digits => count.to_string(),
    };
    let user = USER_TEMPLATE
        .trim_end()
        .replace("{count}", &count_text)
        .replace("{name}", &persona.spec.name);
    let system = format!("{}\n\nPersona description:\n{}", SYSTEM_PROMPT.trim_end(), persona.prose);
    PromptBundle { system, user, count }
}
