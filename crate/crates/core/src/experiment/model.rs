use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Number of sentences participants are asked to write.
pub const TARGET_SENTENCES: usize = 8;
pub const EXTERNAL_AI_REASON: &str = "external-AI self-report";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    ZeroPlot,
    OnePlot,
    FivePlot,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::ZeroPlot, Condition::OnePlot, Condition::FivePlot];

    pub fn budget(self) -> usize {
        match self {
            Condition::ZeroPlot => 0,
            Condition::OnePlot => 1,
            Condition::FivePlot => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::ZeroPlot => "zero-plot",
            Condition::OnePlot => "one-plot",
            Condition::FivePlot => "five-plot",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown condition {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssignmentPolicy {
    Uniform,
    /// Each consecutive block of three sessions covers all conditions once.
    #[default]
    BalancedBlock,
}

impl FromStr for AssignmentPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" | "uniform-random" => Ok(AssignmentPolicy::Uniform),
            "balanced-block" | "balanced" => Ok(AssignmentPolicy::BalancedBlock),
            other => Err(format!("unknown assignment policy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerificationAnswer {
    Yes,
    No,
    Other,
}

impl FromStr for VerificationAnswer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "yes" => Ok(Self::Yes),
            "no" => Ok(Self::No),
            "other" => Ok(Self::Other),
            other => Err(format!("unknown answer {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdeaServed {
    pub idea_id: String,
    pub text: String,
    /// 1-based position among this session's ideas.
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub condition: Condition,
    pub ideas_served: Vec<String>,
    pub story: Option<String>,
    pub verification: Option<VerificationAnswer>,
    pub created_at: String,
    pub story_at: Option<String>,
    pub verified_at: Option<String>,
}

impl Session {
    pub fn budget(&self) -> usize {
        self.condition.budget()
    }

    /// Sessions analysed as controls: assigned zero-plot or never asked for an idea.
    pub fn is_control_candidate(&self) -> bool {
        self.condition == Condition::ZeroPlot || self.ideas_served.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryReceipt {
    pub session_id: String,
    pub sentence_count: usize,
    /// `ok`, or `sentence-count: N` when the story is not eight sentences.
    pub advisory: String,
    pub verification_expected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReceipt {
    pub session_id: String,
    pub answer: VerificationAnswer,
}

/// Persisted state changes, one JSON object per log line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum Event {
    SessionCreated { session_id: String, condition: Condition, at: String },
    IdeaServed { session_id: String, idea_id: String, at: String },
    StorySubmitted { session_id: String, text: String, at: String },
    VerificationSubmitted { session_id: String, answer: VerificationAnswer, at: String },
}

impl Event {
    pub fn session_id(&self) -> &str {
        match self {
            Event::SessionCreated { session_id, .. }
            | Event::IdeaServed { session_id, .. }
            | Event::StorySubmitted { session_id, .. }
            | Event::VerificationSubmitted { session_id, .. } => session_id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub session_id: String,
    pub served_condition: Condition,
    pub analysis_condition: Condition,
    pub story: String,
    pub ideas_requested: usize,
    pub idea_ids: Vec<String>,
    pub verification: Option<VerificationAnswer>,
    pub excluded: bool,
    pub exclusion_reason: Option<String>,
}

impl AnalysisRecord {
    pub fn from_session(s: &Session) -> Option<Self> {
        let story = s.story.clone()?;
        let analysis_condition = if s.ideas_served.is_empty() { Condition::ZeroPlot } else { s.condition };
        let excluded = analysis_condition == Condition::ZeroPlot && s.verification == Some(VerificationAnswer::Yes);
        Some(Self {
            session_id: s.id.clone(),
            served_condition: s.condition,
            analysis_condition,
            story,
            ideas_requested: s.ideas_served.len(),
            idea_ids: s.ideas_served.clone(),
            verification: s.verification,
            excluded,
            exclusion_reason: excluded.then(|| EXTERNAL_AI_REASON.to_string()),
        })
    }
}

/// Writes the export as CSV, one row per completed session.
pub fn write_export_csv<W: Write>(records: &[AnalysisRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "session_id",
        "served_condition",
        "analysis_condition",
        "ideas_requested",
        "idea_ids",
        "verification",
        "excluded",
        "exclusion_reason",
        "story",
    ])?;
    for r in records {
        let verification = match r.verification {
            Some(VerificationAnswer::Yes) => "yes",
            Some(VerificationAnswer::No) => "no",
            Some(VerificationAnswer::Other) => "other",
            None => "",
        };
        w.write_record([
            r.session_id.as_str(),
            r.served_condition.as_str(),
            r.analysis_condition.as_str(),
            &r.ideas_requested.to_string(),
            &r.idea_ids.join(";"),
            verification,
            if r.excluded { "true" } else { "false" },
            r.exclusion_reason.as_deref().unwrap_or(""),
            &r.story,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an export written by [`write_export_csv`].
pub fn read_export_csv<R: Read>(input: R) -> Result<Vec<AnalysisRecord>, String> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(|e| e.to_string())?;
        let line = i + 2;
        if row.len() != 9 {
            return Err(format!("row {line}: expected 9 fields, got {}", row.len()));
        }
        let condition = |k: usize| row[k].parse::<Condition>().map_err(|e| format!("row {line}: {e}"));
        let verification = match &row[5] {
            "" => None,
            v => Some(v.parse().map_err(|e| format!("row {line}: {e}"))?),
        };
        let excluded = match &row[6] {
            "true" => true,
            "false" => false,
            v => return Err(format!("row {line}: bad excluded flag {v:?}")),
        };
        out.push(AnalysisRecord {
            session_id: row[0].to_string(),
            served_condition: condition(1)?,
            analysis_condition: condition(2)?,
            ideas_requested: row[3].parse().map_err(|e| format!("row {line}: {e}"))?,
            idea_ids: row[4].split(';').filter(|s| !s.is_empty()).map(str::to_string).collect(),
            verification,
            excluded,
            exclusion_reason: Some(row[7].to_string()).filter(|s| !s.is_empty()),
            story: row[8].to_string(),
        });
    }
    Ok(out)
}
