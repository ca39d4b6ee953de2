//! Trait taxonomy, persona sampling and persona descriptions.

use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::ideas::{ChatRequest, GenerationError, GenerationParams, TextGenerator};

pub const MIN_PROSE_WORDS: usize = 100;
const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum PersonaError {
    #[error("cannot parse {what}: {msg}")]
    Parse { what: &'static str, msg: String },
    #[error("unsupported schema version {0}")]
    Version(u32),
    #[error("duplicate category {0:?}")]
    DuplicateCategory(String),
    #[error("category {0:?} needs at least 2 classes")]
    TooFewClasses(String),
    #[error("duplicate class {class:?} in category {category:?}")]
    DuplicateClass { category: String, class: String },
    #[error("taxonomy has no categories")]
    EmptyTaxonomy,
    #[error("template has no placeholder for {0:?}")]
    MissingPlaceholder(String),
    #[error("template placeholder {{{0}}} matches no category")]
    UnknownPlaceholder(String),
    #[error("persona {id:?} does not assign category {category:?}")]
    MissingTrait { id: String, category: String },
    #[error("description has {0} words, need at least {MIN_PROSE_WORDS}")]
    TooShort(usize),
    #[error("description does not mention trait {0:?}")]
    TraitNotMentioned(String),
    #[error("no valid description after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: String },
    #[error(transparent)]
    Provider(#[from] GenerationError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Lowercase identifier with runs of other characters collapsed to `_`.
pub fn slug(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraitCategory {
    pub name: String,
    pub classes: Vec<String>,
}

impl TraitCategory {
    /// Placeholder key used in templates, e.g. `pace_of_life`.
    pub fn key(&self) -> String {
        slug(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraitTaxonomy {
    pub categories: Vec<TraitCategory>,
}

#[derive(Deserialize, Serialize)]
struct TaxonomyFile {
    version: u32,
    categories: Vec<TraitCategory>,
}

impl TraitTaxonomy {
    pub fn new(categories: Vec<TraitCategory>) -> Result<Self, PersonaError> {
        if categories.is_empty() {
            return Err(PersonaError::EmptyTaxonomy);
        }
        let mut names = HashSet::new();
        let mut keys = HashSet::new();
        for c in &categories {
            if !names.insert(c.name.as_str()) || !keys.insert(c.key()) {
                return Err(PersonaError::DuplicateCategory(c.name.clone()));
            }
            if c.classes.len() < 2 {
                return Err(PersonaError::TooFewClasses(c.name.clone()));
            }
            let mut seen = HashSet::new();
            for class in &c.classes {
                if !seen.insert(class) {
                    return Err(PersonaError::DuplicateClass {
                        category: c.name.clone(),
                        class: class.clone(),
                    });
                }
            }
        }
        Ok(Self { categories })
    }

    pub fn category(&self, name: &str) -> Option<&TraitCategory> {
        self.categories.iter().find(|c| c.name == name)
    }

    /// Number of distinct trait combinations.
    pub fn combinations(&self) -> u128 {
        self.categories.iter().map(|c| c.classes.len() as u128).product()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&TaxonomyFile {
            version: SCHEMA_VERSION,
            categories: self.categories.clone(),
        })
        .expect("taxonomy serializes")
    }
}

pub fn load_taxonomy(source: &str) -> Result<TraitTaxonomy, PersonaError> {
    let file: TaxonomyFile = toml::from_str(source).map_err(|e| PersonaError::Parse {
        what: "taxonomy",
        msg: e.to_string(),
    })?;
    if file.version != SCHEMA_VERSION {
        return Err(PersonaError::Version(file.version));
    }
    TraitTaxonomy::new(file.categories)
}

pub fn load_taxonomy_file(path: impl AsRef<Path>) -> Result<TraitTaxonomy, PersonaError> {
    load_taxonomy(&std::fs::read_to_string(path)?)
}

/// The shipped 14-category taxonomy.
pub fn default_taxonomy() -> TraitTaxonomy {
    load_taxonomy(include_str!("../data/taxonomy.toml")).expect("shipped taxonomy is valid")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonaSpec {
    pub id: String,
    pub name: String,
    /// Category name to class name, in taxonomy order.
    pub traits: IndexMap<String, String>,
    pub seed: u64,
}

impl PersonaSpec {
    /// Checks that every taxonomy category is assigned exactly one of its classes.
    pub fn validate(&self, taxonomy: &TraitTaxonomy) -> Result<(), PersonaError> {
        for c in &taxonomy.categories {
            let class = self.traits.get(&c.name).ok_or_else(|| PersonaError::MissingTrait {
                id: self.id.clone(),
                category: c.name.clone(),
            })?;
            if !c.classes.contains(class) {
                return Err(PersonaError::Parse {
                    what: "persona",
                    msg: format!("{class:?} is not a class of {:?}", c.name),
                });
            }
        }
        if self.traits.len() != taxonomy.categories.len() {
            return Err(PersonaError::Parse {
                what: "persona",
                msg: "traits contain categories outside the taxonomy".into(),
            });
        }
        Ok(())
    }
}

/// Draws one class uniformly and independently per category.
pub fn sample_persona(taxonomy: &TraitTaxonomy, seed: u64, name: &str) -> PersonaSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let traits = taxonomy
        .categories
        .iter()
        .map(|c| {
            let i = rng.random_range(0..c.classes.len());
            (c.name.clone(), c.classes[i].clone())
        })
        .collect();
    PersonaSpec {
        id: format!("{}-{seed}", slug(name)),
        name: name.to_string(),
        traits,
        seed,
    }
}

pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonaDescription {
    pub spec: PersonaSpec,
    pub prose: String,
}

impl PersonaDescription {
    pub fn word_count(&self) -> usize {
        word_count(&self.prose)
    }
}

fn placeholder_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\{([a-z0-9_]+)\}").expect("valid regex"))
}

/// Prose template with `{name}` and one `{category_key}` placeholder per category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersonaTemplate {
    text: String,
}

impl Default for PersonaTemplate {
    fn default() -> Self {
        Self::new(include_str!("../data/persona_template.txt").trim_end())
    }
}

impl PersonaTemplate {
    pub fn new(text: impl Into<String>) -> Self {
        Self { text: text.into() }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Builds a template from an existing description by replacing the name
    /// and each trait class with its placeholder, longest strings first.
    pub fn from_exemplar(prose: &str, spec: &PersonaSpec) -> Self {
        let mut subs: Vec<(String, String)> = spec
            .traits
            .iter()
            .map(|(cat, class)| (class.clone(), format!("{{{}}}", slug(cat))))
            .collect();
        subs.push((spec.name.clone(), "{name}".into()));
        subs.sort_by_key(|s| std::cmp::Reverse(s.0.len()));

        let mut out = String::new();
        let mut rest = prose;
        'scan: while !rest.is_empty() {
            for (needle, placeholder) in &subs {
                if !needle.is_empty() && rest.starts_with(needle.as_str()) {
                    out.push_str(placeholder);
                    rest = &rest[needle.len()..];
                    continue 'scan;
                }
            }
            let c = rest.chars().next().expect("non-empty");
            out.push(c);
            rest = &rest[c.len_utf8()..];
        }
        Self { text: out }
    }

    /// Fills the template. Every taxonomy category must have a placeholder and
    /// every placeholder must name a category or `name`.
    pub fn render(&self, spec: &PersonaSpec, taxonomy: &TraitTaxonomy) -> Result<String, PersonaError> {
        spec.validate(taxonomy)?;
        let mut values: IndexMap<String, &str> = IndexMap::new();
        values.insert("name".into(), &spec.name);
        for c in &taxonomy.categories {
            values.insert(c.key(), &spec.traits[&c.name]);
        }
        let used: HashSet<&str> = placeholder_re()
            .captures_iter(&self.text)
            .map(|c| c.get(1).expect("group").as_str())
            .collect();
        if let Some(unknown) = used.iter().find(|k| !values.contains_key(**k)) {
            return Err(PersonaError::UnknownPlaceholder(unknown.to_string()));
        }
        if let Some(missing) = values.keys().find(|k| !used.contains(k.as_str())) {
            return Err(PersonaError::MissingPlaceholder(missing.clone()));
        }
        Ok(placeholder_re()
            .replace_all(&self.text, |c: &regex::Captures| values[&c[1]].to_string())
            .into_owned())
    }
}

/// Checks the description invariants: word count and trait mentions.
pub fn check_description(prose: &str, spec: &PersonaSpec) -> Result<(), PersonaError> {
    let words = word_count(prose);
    if words < MIN_PROSE_WORDS {
        return Err(PersonaError::TooShort(words));
    }
    if let Some(class) = spec.traits.values().find(|c| !prose.contains(c.as_str())) {
        return Err(PersonaError::TraitNotMentioned(class.clone()));
    }
    Ok(())
}

/// Template-mode rendering with the description checks applied.
pub fn render_persona(
    spec: &PersonaSpec,
    taxonomy: &TraitTaxonomy,
    template: &PersonaTemplate,
) -> Result<PersonaDescription, PersonaError> {
    let prose = template.render(spec, taxonomy)?;
    check_description(&prose, spec)?;
    Ok(PersonaDescription { spec: spec.clone(), prose })
}

const RENDER_SYSTEM: &str = "You write persona descriptions for a creative writing study. \
Write one paragraph of at least 120 words describing the person. Mention every listed trait \
using its exact wording. Output only the paragraph.";

/// Provider-mode rendering: asks a text generator for the description and
/// retries until it passes the same checks as template mode.
pub async fn render_persona_with_provider(
    spec: &PersonaSpec,
    taxonomy: &TraitTaxonomy,
    provider: &dyn TextGenerator,
    params: &GenerationParams,
) -> Result<PersonaDescription, PersonaError> {
    spec.validate(taxonomy)?;
    let traits: Vec<String> = spec.traits.iter().map(|(c, v)| format!("- {c}: {v}")).collect();
    let request = ChatRequest {
        system: RENDER_SYSTEM.to_string(),
        user: format!("Name: {}\nTraits:\n{}", spec.name, traits.join("\n")),
        params: params.clone(),
        expected_items: 1,
    };
    let mut last = String::new();
    for _ in 0..=params.retry_budget {
        match provider.complete(&request).await {
            Ok(reply) => {
                let prose = reply.trim().to_string();
                match check_description(&prose, spec) {
                    Ok(()) => return Ok(PersonaDescription { spec: spec.clone(), prose }),
                    Err(e) => last = e.to_string(),
                }
            }
            Err(e) => last = e.to_string(),
        }
    }
    Err(PersonaError::RetriesExhausted {
        attempts: params.retry_budget + 1,
        last,
    })
}

/// One of the shipped example personas with its two sample plots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixturePersona {
    pub id: String,
    pub number: u32,
    pub name: String,
    pub prose: String,
    pub sample_plots: Vec<String>,
    pub traits: IndexMap<String, String>,
}

impl FixturePersona {
    pub fn description(&self) -> PersonaDescription {
        PersonaDescription {
            spec: PersonaSpec {
                id: self.id.clone(),
                name: self.name.clone(),
                traits: self.traits.clone(),
                seed: u64::from(self.number),
            },
            prose: self.prose.clone(),
        }
    }
}

#[derive(Deserialize, Serialize)]
struct FixtureFile {
    version: u32,
    personas: Vec<FixturePersona>,
}

pub fn parse_fixtures(source: &str) -> Result<Vec<FixturePersona>, PersonaError> {
    let file: FixtureFile = toml::from_str(source).map_err(|e| PersonaError::Parse {
        what: "persona fixtures",
        msg: e.to_string(),
    })?;
    if file.version != SCHEMA_VERSION {
        return Err(PersonaError::Version(file.version));
    }
    for p in &file.personas {
        let words = word_count(&p.prose);
        if words < MIN_PROSE_WORDS {
            return Err(PersonaError::TooShort(words));
        }
    }
    Ok(file.personas)
}

pub fn fixtures_to_toml(personas: &[FixturePersona]) -> String {
    toml::to_string(&FixtureFile {
        version: SCHEMA_VERSION,
        personas: personas.to_vec(),
    })
    .expect("fixtures serialize")
}

/// The ten shipped fixture personas with their sample plots.
pub fn fixture_personas() -> Vec<FixturePersona> {
    parse_fixtures(include_str!("../data/personas.toml")).expect("shipped fixtures are valid")
}

pub fn load_fixture_personas() -> Vec<PersonaDescription> {
    fixture_personas().iter().map(FixturePersona::description).collect()
}
