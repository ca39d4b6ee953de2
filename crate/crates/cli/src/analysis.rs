//! Shared analysis steps behind `analyze` and `report`.

use std::fmt::Write as _;

use indexmap::IndexMap;
use ideation_core::diversity::{
    persona_diversity, story_homogeneity, summarize, write_inter_table, write_intra_table, write_summary_table,
    Centering, HomogeneityMode, PersonaDiversityRow, PoolEmbeddings, SummaryStats,
};
use ideation_core::embedding::EmbeddingStore;
use ideation_core::experiment::{AnalysisRecord, Condition};
use ideation_core::ideas::IdeaPool;
use ideation_core::stats::{comparison_table, mean, ols_dummy_with_levels, oneway_anova, regression_table};
use ideation_core::text::{compare_groups, LinguisticProfile, TextAnalyzer};

use crate::error::{CliError, CliResult};

pub async fn pool_embeddings(pool: &IdeaPool, store: &EmbeddingStore) -> CliResult<PoolEmbeddings> {
    let texts: Vec<String> = pool.ideas().iter().map(|i| i.text.clone()).collect();
    let vectors = store.embed_texts(&texts).await?;
    let mut out = PoolEmbeddings::new();
    for (idea, v) in pool.ideas().iter().zip(vectors) {
        out.entry(idea.persona_id.clone()).or_default().push(v);
    }
    Ok(out)
}

pub struct DiversityTables {
    pub rows: Vec<PersonaDiversityRow>,
    pub intra_csv: Vec<u8>,
    pub inter_csv: Vec<u8>,
}

impl DiversityTables {
    pub fn mean_intra(&self) -> f64 {
        mean(&self.rows.iter().map(|r| r.intra.value).collect::<Vec<_>>())
    }

    pub fn mean_inter(&self) -> f64 {
        mean(&self.rows.iter().map(|r| r.inter.value).collect::<Vec<_>>())
    }
}

pub fn diversity_tables(emb: &PoolEmbeddings, centering: Centering) -> CliResult<DiversityTables> {
    let rows = persona_diversity(emb, centering)?;
    let mut intra_csv = Vec::new();
    write_intra_table(&mut intra_csv, &rows)?;
    let mut inter_csv = Vec::new();
    write_inter_table(&mut inter_csv, &rows)?;
    Ok(DiversityTables { rows, intra_csv, inter_csv })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoryScore {
    pub session_id: String,
    pub condition: Condition,
    pub score: f64,
}

fn analysed(records: &[AnalysisRecord]) -> impl Iterator<Item = &AnalysisRecord> {
    records.iter().filter(|r| !r.excluded)
}

/// Per-story homogeneity (percent) within each analysis condition.
pub async fn story_scores(
    records: &[AnalysisRecord],
    store: &EmbeddingStore,
    mode: HomogeneityMode,
) -> CliResult<Vec<StoryScore>> {
    let kept: Vec<&AnalysisRecord> = analysed(records).collect();
    let texts: Vec<String> = kept.iter().map(|r| r.story.clone()).collect();
    let vectors = store.embed_texts(&texts).await?;
    let mut out = Vec::new();
    for condition in Condition::ALL {
        let group: Vec<(String, _)> = kept
            .iter()
            .zip(&vectors)
            .filter(|(r, _)| r.analysis_condition == condition)
            .map(|(r, v)| (r.session_id.clone(), v.clone()))
            .collect();
        if group.is_empty() {
            continue;
        }
        let scores = story_homogeneity(&group, mode).map_err(|e| CliError::data(e).context(condition))?;
        out.extend(scores.into_iter().map(|(id, s)| StoryScore { session_id: id, condition, score: s.value }));
    }
    out.sort_by(|a, b| a.session_id.cmp(&b.session_id));
    Ok(out)
}

pub fn story_scores_csv(scores: &[StoryScore]) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    let mut w = csv::Writer::from_writer(&mut buf);
    w.write_record(["session_id", "condition", "similarity"])?;
    for s in scores {
        w.write_record([s.session_id.as_str(), s.condition.as_str(), &format!("{:.6}", s.score)])?;
    }
    w.flush()?;
    drop(w);
    Ok(buf)
}

fn by_condition(scores: &[StoryScore]) -> IndexMap<Condition, Vec<f64>> {
    let mut map: IndexMap<Condition, Vec<f64>> = IndexMap::new();
    for c in Condition::ALL {
        let v: Vec<f64> = scores.iter().filter(|s| s.condition == c).map(|s| s.score).collect();
        if !v.is_empty() {
            map.insert(c, v);
        }
    }
    map
}

/// Summary statistics with one column per analysis condition.
pub fn story_summary_csv(scores: &[StoryScore]) -> CliResult<Vec<u8>> {
    let columns: IndexMap<String, SummaryStats> = by_condition(scores)
        .into_iter()
        .map(|(c, v)| Ok((c.to_string(), summarize(&v)?)))
        .collect::<CliResult<_>>()?;
    let mut buf = Vec::new();
    write_summary_table(&mut buf, &columns)?;
    Ok(buf)
}

/// Dummy regression on the zero-plot reference followed by the one-way ANOVA.
pub fn story_regression_text(scores: &[StoryScore]) -> CliResult<String> {
    let data: Vec<(f64, String)> = scores.iter().map(|s| (s.score, s.condition.to_string())).collect();
    let groups = by_condition(scores);
    let levels: Vec<&str> = groups.keys().map(|c| c.as_str()).collect();
    let reference = Condition::ZeroPlot.as_str();
    let fit = ols_dummy_with_levels(&data, &levels, reference)?;
    let mut out = regression_table(&fit, "Story similarity");
    let anova = oneway_anova(&groups.into_values().collect::<Vec<_>>())?;
    let _ = writeln!(out, "\nOne-way ANOVA: F({}, {}) = {:.3}, p = {:.3}", anova.df1, anova.df2, anova.f, anova.p);
    Ok(out)
}

/// Profiles of the analysed stories whose condition is in `conditions`.
pub fn profiles_for(records: &[AnalysisRecord], conditions: &[Condition]) -> CliResult<Vec<LinguisticProfile>> {
    let analyzer = TextAnalyzer::shipped();
    analysed(records)
        .filter(|r| conditions.contains(&r.analysis_condition))
        .map(|r| analyzer.profile(&r.story).map_err(|e| CliError::data(e).context(&r.session_id)))
        .collect()
}

pub fn text_report(
    a: &[LinguisticProfile],
    b: &[LinguisticProfile],
    label_a: &str,
    label_b: &str,
    pooled: bool,
) -> CliResult<String> {
    let rows = compare_groups(a, b, pooled)?;
    Ok(comparison_table(&rows, label_a, label_b))
}

/// Overlaid per-condition histograms of story similarity as a standalone SVG.
pub fn histogram_svg(scores: &[StoryScore], bins: usize) -> String {
    const W: f64 = 640.0;
    const H: f64 = 360.0;
    const M: f64 = 40.0;
    const COLORS: [&str; 3] = ["#4e79a7", "#f28e2b", "#59a14f"];
    let groups = by_condition(scores);
    let values: Vec<f64> = scores.iter().map(|s| s.score).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    if values.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let span = if hi > lo { hi - lo } else { 1.0 };
    let bins = bins.max(1);
    let counts: Vec<(Condition, Vec<usize>)> = groups
        .iter()
        .map(|(c, v)| {
            let mut h = vec![0usize; bins];
            for x in v {
                let i = (((x - lo) / span) * bins as f64).floor() as usize;
                h[i.min(bins - 1)] += 1;
            }
            (*c, h)
        })
        .collect();
    let peak = counts.iter().flat_map(|(_, h)| h.iter().copied()).max().unwrap_or(1).max(1) as f64;
    let bw = (W - 2.0 * M) / bins as f64;
    for (k, (c, h)) in counts.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        for (i, &n) in h.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let bh = (H - 2.0 * M) * n as f64 / peak;
            let _ = writeln!(
                svg,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.45"/>"#,
                M + i as f64 * bw,
                H - M - bh,
                bw,
                bh
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.0}" y="{:.0}" font-size="12" fill="{color}">{c} (n={})</text>"#,
            W - 150.0,
            M + 16.0 * k as f64,
            groups[c].len()
        );
    }
    let _ = writeln!(svg, r#"<line x1="{M}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/>"#, H - M, W - M);
    let _ = writeln!(svg, r#"<text x="{M}" y="{:.0}" font-size="12">{lo:.2}</text>"#, H - M + 16.0);
    let _ = writeln!(
        svg,
        r#"<text x="{:.0}" y="{:.0}" font-size="12" text-anchor="end">{hi:.2}</text>"#,
        W - M,
        H - M + 16.0
    );
    let _ = writeln!(svg, r#"<text x="{:.0}" y="{:.0}" font-size="12" text-anchor="middle">story similarity</text>"#, W / 2.0, H - 8.0);
    svg.push_str("</svg>\n");
    svg
}
