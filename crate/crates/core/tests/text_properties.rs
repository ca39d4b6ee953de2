use ideation_core::text::{compare_groups, profile, split_sentences, tokenize, Attribute};
use proptest::prelude::*;

const WORDS: &[&str] = &[
    "the", "ship", "Mara", "ran", "quickly", "ancient", "map", "and", "she", "was", "happy",
    "afraid", "Orion", "glowed", "under", "red", "sky", "they", "found", "a", "hidden", "city",
    "don't", "planet's", "storm", "smiled", "through", "cold", "Thalos", "of",
];

fn sentence() -> impl Strategy<Value = String> {
    (prop::collection::vec(prop::sample::select(WORDS), 1..12), prop::sample::select(&[".", "!", "?"][..]))
        .prop_map(|(ws, end)| {
            let mut s = ws.join(" ");
            let mut chars = s.chars();
            if let Some(first) = chars.next() {
                s = first.to_uppercase().collect::<String>() + chars.as_str();
            }
            s + end
        })
}

fn story() -> impl Strategy<Value = String> {
    prop::collection::vec(sentence(), 2..9).prop_map(|s| s.join(" "))
}

proptest! {
    #[test]
    fn profile_invariants(text in story()) {
        let p = profile(&text).unwrap();
        prop_assert!(p.unique_words <= p.total_words);
        prop_assert!((0.0..=100.0).contains(&p.common_words_pct));
        prop_assert_eq!(p.avg_words_per_sentence, p.total_words as f64 / p.sentences as f64);
        prop_assert!(p.action_words + p.descriptive_words <= p.total_words);
        let story = tokenize(&text).unwrap();
        let flat: Vec<String> = story.sentences().concat();
        prop_assert_eq!(flat.as_slice(), story.tokens());
        prop_assert_eq!(profile(&text).unwrap(), p);
    }

    #[test]
    fn dropping_a_sentence_never_increases_counts(text in story(), which in any::<prop::sample::Index>()) {
        let sentences = split_sentences(&text);
        let drop = which.index(sentences.len());
        let shorter: Vec<&str> = sentences.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, s)| *s).collect();
        let (full, less) = (profile(&text).unwrap(), profile(&shorter.join(" ")).unwrap());
        prop_assert!(less.total_words <= full.total_words);
        prop_assert!(less.sentences <= full.sentences);
        prop_assert!(less.unique_words <= full.unique_words);
        prop_assert!(less.emotional_words <= full.emotional_words);
        prop_assert!(less.named_characters <= full.named_characters);
    }

    #[test]
    fn comparison_antisymmetric(a in prop::collection::vec(story(), 2..5), b in prop::collection::vec(story(), 2..5)) {
        let pa: Vec<_> = a.iter().map(|t| profile(t).unwrap()).collect();
        let pb: Vec<_> = b.iter().map(|t| profile(t).unwrap()).collect();
        let ab = compare_groups(&pa, &pb, true).unwrap();
        let ba = compare_groups(&pb, &pa, true).unwrap();
        for (x, y) in ab.iter().zip(&ba) {
            prop_assert_eq!(x.attribute, y.attribute);
            prop_assert_eq!(x.t, -y.t);
        }
    }
}

#[test]
fn identical_groups_all_attributes() {
    let texts = [
        "Mara landed on the frozen moon. She smiled.",
        "The storm hit the camp at night. Orion was afraid! They ran.",
        "A hidden city glowed under the red sky.",
    ];
    let group: Vec<_> = texts.iter().map(|t| profile(t).unwrap()).collect();
    let rows = compare_groups(&group, &group, true).unwrap();
    assert_eq!(rows.len(), Attribute::ALL.len());
    for row in rows {
        assert_eq!((row.t, row.p), (0.0, 1.0), "{}", row.attribute);
    }
}
