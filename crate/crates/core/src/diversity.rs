//! Cosine-similarity diversity measures over embedded plots and stories.

use std::io::Write;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingVector;
pub use crate::stats::{summarize, SummaryStats};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiversityError {
    #[error("zero vector")]
    ZeroVector,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("persona {0:?} not in pool")]
    UnknownPersona(String),
    #[error("persona {id:?} has {got} embeddings, need at least 2")]
    TooFewPlots { id: String, got: usize },
    #[error("need at least 2 personas, got {0}")]
    TooFewPersonas(usize),
    #[error("need at least 2 stories, got {0}")]
    TooFewStories(usize),
    #[error("empty input")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Unit,
    Percent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub value: f64,
    pub scale: Scale,
}

impl SimilarityScore {
    pub fn unit(value: f64) -> Self {
        Self { value, scale: Scale::Unit }
    }

    pub fn to_percent(self) -> Self {
        match self.scale {
            Scale::Unit => Self { value: self.value * 100.0, scale: Scale::Percent },
            Scale::Percent => self,
        }
    }

    pub fn to_unit(self) -> Self {
        match self.scale {
            Scale::Percent => Self { value: self.value / 100.0, scale: Scale::Unit },
            Scale::Unit => self,
        }
    }
}

/// How persona means are adjusted before the inter-persona cosine.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Centering {
    #[default]
    None,
    /// Subtract the mean of every plot embedding in the pool.
    GlobalMean,
}

/// Whether the focal story contributes to the condition average it is compared with.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HomogeneityMode {
    #[default]
    LeaveOneOut,
    Inclusive,
}

/// Embeddings grouped by persona id, in pool order.
pub type PoolEmbeddings = IndexMap<String, Vec<EmbeddingVector>>;

pub fn cosine_values(u: &[f64], v: &[f64]) -> Result<f64, DiversityError> {
    if u.len() != v.len() {
        return Err(DiversityError::DimensionMismatch(u.len(), v.len()));
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(DiversityError::ZeroVector);
    }
    Ok(dot / (nu.sqrt() * nv.sqrt()))
}

pub fn cosine(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<SimilarityScore, DiversityError> {
    cosine_values(u.values(), v.values()).map(SimilarityScore::unit)
}

fn sum_vectors<'a>(vs: impl IntoIterator<Item = &'a [f64]>, dim: usize) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    for v in vs {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    acc
}

fn check_dims<'a>(vs: impl IntoIterator<Item = &'a EmbeddingVector>) -> Result<usize, DiversityError> {
    let mut dim = None;
    for v in vs {
        match dim {
            None => dim = Some(v.dim()),
            Some(d) if d != v.dim() => return Err(DiversityError::DimensionMismatch(d, v.dim())),
            _ => {}
        }
    }
    dim.ok_or(DiversityError::Empty)
}

/// Mean cosine of each embedding with the mean of the others.
fn leave_one_out(vs: &[EmbeddingVector]) -> Result<Vec<f64>, DiversityError> {
    let dim = check_dims(vs)?;
    let total = sum_vectors(vs.iter().map(|v| v.values()), dim);
    let k = (vs.len() - 1) as f64;
    vs.iter()
        .map(|v| {
            let rest: Vec<f64> = total.iter().zip(v.values()).map(|(t, x)| (t - x) / k).collect();
            cosine_values(v.values(), &rest)
        })
        .collect()
}

/// Average leave-one-out cosine within one persona's plots.
pub fn intra_persona_similarity(pool: &PoolEmbeddings, persona: &str) -> Result<SimilarityScore, DiversityError> {
    let vs = pool
        .get(persona)
        .ok_or_else(|| DiversityError::UnknownPersona(persona.to_string()))?;
    if vs.len() < 2 {
        return Err(DiversityError::TooFewPlots { id: persona.to_string(), got: vs.len() });
    }
    let scores = leave_one_out(vs)?;
    Ok(SimilarityScore::unit(scores.iter().sum::<f64>() / scores.len() as f64))
}

/// Cosine between a persona's mean plot embedding and the mean of every
/// other persona's plots, optionally centred on the pool's grand mean.
pub fn inter_persona_similarity(
    pool: &PoolEmbeddings,
    persona: &str,
    centering: Centering,
) -> Result<SimilarityScore, DiversityError> {
    if pool.len() < 2 {
        return Err(DiversityError::TooFewPersonas(pool.len()));
    }
    let focal = pool
        .get(persona)
        .ok_or_else(|| DiversityError::UnknownPersona(persona.to_string()))?;
    if focal.is_empty() {
        return Err(DiversityError::TooFewPlots { id: persona.to_string(), got: 0 });
    }
    let dim = check_dims(pool.values().flatten())?;
    let others: Vec<&EmbeddingVector> = pool
        .iter()
        .filter(|(id, _)| id.as_str() != persona)
        .flat_map(|(_, vs)| vs)
        .collect();
    if others.is_empty() {
        return Err(DiversityError::TooFewPersonas(1));
    }
    let mean_of = |vs: &[&EmbeddingVector]| {
        let n = vs.len() as f64;
        sum_vectors(vs.iter().map(|v| v.values()), dim)
            .into_iter()
            .map(|x| x / n)
            .collect::<Vec<f64>>()
    };
    let focal_refs: Vec<&EmbeddingVector> = focal.iter().collect();
    let mut m_p = mean_of(&focal_refs);
    let mut m_rest = mean_of(&others);
    if centering == Centering::GlobalMean {
        let all: Vec<&EmbeddingVector> = pool.values().flatten().collect();
        let grand = mean_of(&all);
        for ((p, r), g) in m_p.iter_mut().zip(m_rest.iter_mut()).zip(&grand) {
            *p -= g;
            *r -= g;
        }
    }
    cosine_values(&m_p, &m_rest).map(SimilarityScore::unit)
}

/// Per-story cosine with the condition's average embedding, in percent.
pub fn story_homogeneity(
    stories: &[(String, EmbeddingVector)],
    mode: HomogeneityMode,
) -> Result<Vec<(String, SimilarityScore)>, DiversityError> {
    if stories.len() < 2 {
        return Err(DiversityError::TooFewStories(stories.len()));
    }
    let vs: Vec<EmbeddingVector> = stories.iter().map(|(_, v)| v.clone()).collect();
    let values = match mode {
        HomogeneityMode::LeaveOneOut => leave_one_out(&vs)?,
        HomogeneityMode::Inclusive => {
            let dim = check_dims(&vs)?;
            let n = vs.len() as f64;
            let mean: Vec<f64> = sum_vectors(vs.iter().map(|v| v.values()), dim)
                .into_iter()
                .map(|x| x / n)
                .collect();
            vs.iter()
                .map(|v| cosine_values(v.values(), &mean))
                .collect::<Result<_, _>>()?
        }
    };
    Ok(stories
        .iter()
        .zip(values)
        .map(|((id, _), v)| (id.clone(), SimilarityScore::unit(v).to_percent()))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonaDiversityRow {
    pub persona_id: String,
    pub intra: SimilarityScore,
    pub inter: SimilarityScore,
}

/// One row per persona, in pool order.
pub fn persona_diversity(pool: &PoolEmbeddings, centering: Centering) -> Result<Vec<PersonaDiversityRow>, DiversityError> {
    pool.keys()
        .map(|id| {
            Ok(PersonaDiversityRow {
                persona_id: id.clone(),
                intra: intra_persona_similarity(pool, id)?,
                inter: inter_persona_similarity(pool, id, centering)?,
            })
        })
        .collect()
}

fn average(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

/// Two-column per-persona table followed by an `Average` row.
fn write_persona_table<W: Write>(
    out: W,
    header: &str,
    rows: &[(String, f64)],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["Persona ID", header])?;
    for (id, v) in rows {
        w.write_record([id.clone(), format!("{v:.8}")])?;
    }
    let avg = average(rows.iter().map(|(_, v)| *v));
    w.write_record(["Average".to_string(), format!("{avg:.8}")])?;
    w.flush()?;
    Ok(())
}

/// Intra-persona table: persona id and average similarity.
pub fn write_intra_table<W: Write>(out: W, rows: &[PersonaDiversityRow]) -> csv::Result<()> {
    let rows: Vec<_> = rows.iter().map(|r| (r.persona_id.clone(), r.intra.to_unit().value)).collect();
    write_persona_table(out, "Average cosine similarity", &rows)
}

/// Inter-persona table: persona id and similarity to all other personas.
pub fn write_inter_table<W: Write>(out: W, rows: &[PersonaDiversityRow]) -> csv::Result<()> {
    let rows: Vec<_> = rows.iter().map(|r| (r.persona_id.clone(), r.inter.to_unit().value)).collect();
    write_persona_table(out, "Average Cosine Similarity", &rows)
}

/// Summary statistics with one column per condition and one row per statistic.
pub fn write_summary_table<W: Write>(out: W, columns: &IndexMap<String, SummaryStats>) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![String::new()];
    header.extend(columns.keys().cloned());
    w.write_record(&header)?;
    type Row<'a> = (&'a str, fn(&SummaryStats) -> String);
    let stats: [Row; 8] = [
        ("Count", |s| s.count.to_string()),
        ("Mean", |s| format!("{:.3}", s.mean)),
        ("std", |s| format!("{:.3}", s.std)),
        ("min", |s| format!("{:.2}", s.min)),
        ("25%", |s| format!("{:.2}", s.q25)),
        ("50%", |s| format!("{:.2}", s.median)),
        ("75%", |s| format!("{:.2}", s.q75)),
        ("max", |s| format!("{:.2}", s.max)),
    ];
    for (label, f) in stats {
        let mut row = vec![label.to_string()];
        row.extend(columns.values().map(f));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
