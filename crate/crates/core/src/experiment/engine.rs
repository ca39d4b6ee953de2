use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use chrono::{SecondsFormat, Utc};
use dashmap::DashMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;

use super::log::{read_events, EventLog};
use super::model::{
    AnalysisRecord, AssignmentPolicy, Condition, Event, IdeaServed, Session, StoryReceipt,
    VerificationAnswer, VerificationReceipt, TARGET_SENTENCES,
};
use super::ExperimentError;
use crate::ideas::IdeaPool;
use crate::text::count_sentences;

const IDEA_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub policy: AssignmentPolicy,
    pub seed: u64,
    /// Ask every completed session the external-AI question, not only controls.
    pub verify_all_sessions: bool,
}

/// Condition of the `index`-th session (0-based); a pure function of the seed.
pub fn assignment_for(policy: AssignmentPolicy, seed: u64, index: u64) -> Condition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match policy {
        AssignmentPolicy::Uniform => {
            rng.set_stream(index);
            Condition::ALL[rng.random_range(0..3)]
        }
        AssignmentPolicy::BalancedBlock => {
            rng.set_stream(index / 3);
            let mut block = Condition::ALL;
            block.shuffle(&mut rng);
            block[(index % 3) as usize]
        }
    }
}

#[derive(Debug)]
struct Entry {
    index: u64,
    session: Session,
}

/// Session store: per-session locks over an in-memory projection of the event log.
#[derive(Debug)]
pub struct Experiment {
    config: ExperimentConfig,
    pool: Arc<IdeaPool>,
    sessions: DashMap<String, Arc<Mutex<Entry>>>,
    next_index: AtomicU64,
    log: Option<EventLog>,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn session_id(index: u64) -> String {
    format!("S-{:06}", index + 1)
}

fn parse_index(id: &str) -> Option<u64> {
    id.strip_prefix("S-")?.parse::<u64>().ok()?.checked_sub(1)
}

impl Experiment {
    /// Volatile store, nothing persisted.
    pub fn in_memory(pool: Arc<IdeaPool>, config: ExperimentConfig) -> Self {
        Self { config, pool, sessions: DashMap::new(), next_index: AtomicU64::new(0), log: None }
    }

    /// Replays the log at `path` (if any) and appends new events to it.
    pub async fn open(
        pool: Arc<IdeaPool>,
        config: ExperimentConfig,
        path: impl AsRef<Path>,
    ) -> Result<Self, ExperimentError> {
        let events = read_events(path.as_ref())?;
        let mut exp = Self::in_memory(pool, config);
        for event in events {
            exp.apply(event)?;
        }
        exp.log = Some(EventLog::open(path).await?);
        Ok(exp)
    }

    fn apply(&mut self, event: Event) -> Result<(), ExperimentError> {
        let corrupt = |what: &str| ExperimentError::Storage(format!("{what} in event log"));
        match event {
            Event::SessionCreated { session_id, condition, at } => {
                let index = parse_index(&session_id).ok_or_else(|| corrupt("bad session id"))?;
                let session = Session {
                    id: session_id.clone(),
                    condition,
                    ideas_served: Vec::new(),
                    story: None,
                    verification: None,
                    created_at: at,
                    story_at: None,
                    verified_at: None,
                };
                self.sessions.insert(session_id, Arc::new(Mutex::new(Entry { index, session })));
                let next = self.next_index.get_mut();
                *next = (*next).max(index + 1);
            }
            other => {
                let entry = self
                    .sessions
                    .get(other.session_id())
                    .map(|e| Arc::clone(e.value()))
                    .ok_or_else(|| corrupt("event for unknown session"))?;
                let mut entry = entry.try_lock().map_err(|_| corrupt("contended replay"))?;
                let s = &mut entry.session;
                match other {
                    Event::IdeaServed { idea_id, .. } => s.ideas_served.push(idea_id),
                    Event::StorySubmitted { text, at, .. } => {
                        s.story = Some(text);
                        s.story_at = Some(at);
                    }
                    Event::VerificationSubmitted { answer, at, .. } => {
                        s.verification = Some(answer);
                        s.verified_at = Some(at);
                    }
                    Event::SessionCreated { .. } => unreachable!(),
                }
            }
        }
        Ok(())
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn pool(&self) -> &IdeaPool {
        &self.pool
    }

    pub fn session_count(&self) -> usize {
        self.sessions.len()
    }

    async fn record(&self, event: &Event) -> Result<(), ExperimentError> {
        match &self.log {
            Some(log) => log.append(event).await,
            None => Ok(()),
        }
    }

    fn entry(&self, id: &str) -> Result<Arc<Mutex<Entry>>, ExperimentError> {
        self.sessions
            .get(id)
            .map(|e| Arc::clone(e.value()))
            .ok_or_else(|| ExperimentError::UnknownSession(id.to_string()))
    }

    pub async fn create_session(&self) -> Result<Session, ExperimentError> {
        let index = self.next_index.fetch_add(1, Ordering::SeqCst);
        let condition = assignment_for(self.config.policy, self.config.seed, index);
        let session = Session {
            id: session_id(index),
            condition,
            ideas_served: Vec::new(),
            story: None,
            verification: None,
            created_at: now(),
            story_at: None,
            verified_at: None,
        };
        let entry = Arc::new(Mutex::new(Entry { index, session: session.clone() }));
        // Hold the lock until the creation event is durable so no later event can precede it.
        let guard = entry.lock().await;
        self.sessions.insert(session.id.clone(), Arc::clone(&entry));
        self.record(&Event::SessionCreated {
            session_id: session.id.clone(),
            condition,
            at: session.created_at.clone(),
        })
        .await?;
        drop(guard);
        Ok(session)
    }

    pub async fn session(&self, id: &str) -> Result<Session, ExperimentError> {
        Ok(self.entry(id)?.lock().await.session.clone())
    }

    /// All sessions ordered by id.
    pub async fn sessions(&self) -> Vec<Session> {
        let entries: Vec<_> = self.sessions.iter().map(|e| Arc::clone(e.value())).collect();
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            out.push(e.lock().await.session.clone());
        }
        out.sort_by(|a, b| a.id.cmp(&b.id));
        out
    }

    /// Serves one idea drawn uniformly from those this session has not seen.
    pub async fn request_idea(&self, id: &str) -> Result<IdeaServed, ExperimentError> {
        let entry = self.entry(id)?;
        let mut entry = entry.lock().await;
        let index = entry.index;
        let s = &mut entry.session;
        if s.story.is_some() {
            return Err(ExperimentError::StoryAlreadySubmitted(s.id.clone()));
        }
        if s.ideas_served.len() >= s.budget() {
            return Err(ExperimentError::BudgetExhausted { session: s.id.clone(), budget: s.budget() });
        }
        let unserved: Vec<_> =
            self.pool.ideas().iter().filter(|i| !s.ideas_served.contains(&i.id)).collect();
        if unserved.is_empty() {
            return Err(ExperimentError::PoolExhausted);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ IDEA_SALT);
        rng.set_stream(index);
        rng.set_word_pos(s.ideas_served.len() as u128 * 64);
        let idea = unserved[rng.random_range(0..unserved.len())];
        self.record(&Event::IdeaServed { session_id: s.id.clone(), idea_id: idea.id.clone(), at: now() })
            .await?;
        s.ideas_served.push(idea.id.clone());
        Ok(IdeaServed { idea_id: idea.id.clone(), text: idea.text.clone(), slot: s.ideas_served.len() })
    }

    /// Stores the story and locks the session against further idea requests.
    pub async fn submit_story(&self, id: &str, text: &str) -> Result<StoryReceipt, ExperimentError> {
        let text = text.trim();
        let entry = self.entry(id)?;
        let mut entry = entry.lock().await;
        let s = &mut entry.session;
        if s.story.is_some() {
            return Err(ExperimentError::StoryAlreadySubmitted(s.id.clone()));
        }
        if text.is_empty() {
            return Err(ExperimentError::EmptyStory);
        }
        let at = now();
        self.record(&Event::StorySubmitted { session_id: s.id.clone(), text: text.to_string(), at: at.clone() })
            .await?;
        s.story = Some(text.to_string());
        s.story_at = Some(at);
        let sentence_count = count_sentences(text);
        let advisory = if sentence_count == TARGET_SENTENCES {
            "ok".to_string()
        } else {
            format!("sentence-count: {sentence_count}")
        };
        Ok(StoryReceipt {
            session_id: s.id.clone(),
            sentence_count,
            advisory,
            verification_expected: self.config.verify_all_sessions || s.is_control_candidate(),
        })
    }

    pub async fn submit_verification(
        &self,
        id: &str,
        answer: VerificationAnswer,
    ) -> Result<VerificationReceipt, ExperimentError> {
        let entry = self.entry(id)?;
        let mut entry = entry.lock().await;
        let s = &mut entry.session;
        if s.story.is_none() {
            return Err(ExperimentError::StoryRequired(s.id.clone()));
        }
        if !(self.config.verify_all_sessions || s.is_control_candidate()) {
            return Err(ExperimentError::VerificationNotApplicable(s.id.clone()));
        }
        if s.verification.is_some() {
            return Err(ExperimentError::AlreadyVerified(s.id.clone()));
        }
        let at = now();
        self.record(&Event::VerificationSubmitted { session_id: s.id.clone(), answer, at: at.clone() })
            .await?;
        s.verification = Some(answer);
        s.verified_at = Some(at);
        Ok(VerificationReceipt { session_id: s.id.clone(), answer })
    }

    /// One record per completed session, ordered by session id.
    pub async fn export_dataset(&self) -> Vec<AnalysisRecord> {
        self.sessions().await.iter().filter_map(AnalysisRecord::from_session).collect()
    }
}
