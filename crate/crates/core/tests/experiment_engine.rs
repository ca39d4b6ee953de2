use std::collections::HashSet;
use std::sync::Arc;

use ideation_core::experiment::{
    assignment_for, read_events, AssignmentPolicy, Condition, Experiment, ExperimentConfig, ExperimentError,
    VerificationAnswer, EXTERNAL_AI_REASON,
};
use ideation_core::ideas::{IdeaPool, PlotIdea};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_pool(personas: usize, per: usize) -> Arc<IdeaPool> {
    let mut ideas = Vec::new();
    for p in 0..personas {
        for i in 0..per {
            ideas.push(PlotIdea {
                id: format!("p{p}-{i:02}"),
                persona_id: format!("p{p}"),
                text: format!("Idea {i} from persona {p}. It has a twist. It ends well."),
                sentence_count: 3,
                created_with: None,
            });
        }
    }
    Arc::new(IdeaPool::new(ideas).unwrap())
}

fn config(policy: AssignmentPolicy, seed: u64) -> ExperimentConfig {
    ExperimentConfig { policy, seed, verify_all_sessions: false }
}

const STORY: &str = "One. Two. Three. Four. Five. Six. Seven. Eight.";

#[test]
fn balanced_blocks_cover_every_condition() {
    for seed in [0, 1, 99] {
        let mut counts = [0usize; 3];
        for block in 0..33u64 {
            let got: HashSet<_> =
                (0..3).map(|k| assignment_for(AssignmentPolicy::BalancedBlock, seed, block * 3 + k)).collect();
            assert_eq!(got.len(), 3, "block {block} seed {seed}");
            for c in got {
                counts[c as usize] += 1;
            }
        }
        assert_eq!(counts, [33, 33, 33]);
    }
}

#[test]
fn uniform_assignment_within_three_sigma() {
    let n = 3000u64;
    let mut counts = [0f64; 3];
    for i in 0..n {
        counts[assignment_for(AssignmentPolicy::Uniform, 7, i) as usize] += 1.0;
    }
    let expected = n as f64 / 3.0;
    let sigma = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
    for c in counts {
        assert!((c - expected).abs() < 3.0 * sigma, "{counts:?}");
    }
}

#[tokio::test]
async fn budgets_are_enforced_per_condition() {
    let exp = Experiment::in_memory(small_pool(4, 3), config(AssignmentPolicy::BalancedBlock, 5));
    for _ in 0..9 {
        let s = exp.create_session().await.unwrap();
        for _ in 0..s.budget() {
            exp.request_idea(&s.id).await.unwrap();
        }
        let err = exp.request_idea(&s.id).await.unwrap_err();
        assert!(matches!(err, ExperimentError::BudgetExhausted { budget, .. } if budget == s.budget()));
        let served = exp.session(&s.id).await.unwrap().ideas_served;
        assert_eq!(served.iter().collect::<HashSet<_>>().len(), s.budget());
    }
}

#[tokio::test]
async fn story_locks_session_and_gates_verification() {
    let exp = Experiment::in_memory(small_pool(2, 5), config(AssignmentPolicy::BalancedBlock, 1));
    let mut by_condition = std::collections::HashMap::new();
    for _ in 0..3 {
        let s = exp.create_session().await.unwrap();
        by_condition.insert(s.condition, s.id);
    }
    let five = &by_condition[&Condition::FivePlot];
    exp.request_idea(five).await.unwrap();
    assert!(matches!(
        exp.submit_verification(five, VerificationAnswer::No).await,
        Err(ExperimentError::StoryRequired(_))
    ));
    let receipt = exp.submit_story(five, "Just one sentence.").await.unwrap();
    assert_eq!(receipt.advisory, "sentence-count: 1");
    assert!(!receipt.verification_expected);
    assert!(matches!(exp.request_idea(five).await, Err(ExperimentError::StoryAlreadySubmitted(_))));
    assert!(matches!(exp.submit_story(five, STORY).await, Err(ExperimentError::StoryAlreadySubmitted(_))));
    assert!(matches!(
        exp.submit_verification(five, VerificationAnswer::No).await,
        Err(ExperimentError::VerificationNotApplicable(_))
    ));

    let zero = &by_condition[&Condition::ZeroPlot];
    assert!(matches!(exp.submit_story(zero, "   ").await, Err(ExperimentError::EmptyStory)));
    let receipt = exp.submit_story(zero, STORY).await.unwrap();
    assert_eq!(receipt.advisory, "ok");
    assert!(receipt.verification_expected);
    exp.submit_verification(zero, VerificationAnswer::Yes).await.unwrap();
    assert!(matches!(
        exp.submit_verification(zero, VerificationAnswer::No).await,
        Err(ExperimentError::AlreadyVerified(_))
    ));

    // A one-plot session that never asked for an idea is a control candidate.
    let one = &by_condition[&Condition::OnePlot];
    assert!(exp.submit_story(one, STORY).await.unwrap().verification_expected);
    exp.submit_verification(one, VerificationAnswer::Other).await.unwrap();

    assert!(matches!(exp.session("S-999999").await, Err(ExperimentError::UnknownSession(_))));
}

/// Completes sessions until every per-condition quota is met; surplus sessions are abandoned.
async fn run_scripted_scenario(exp: &Experiment) {
    let mut need_zero_no = 33;
    let mut need_zero_yes = 3;
    let mut need_one_click = 27;
    let mut need_one_none = 5;
    let mut need_five_click = 29;
    let mut need_five_none = 3;
    let mut k = 0usize;
    while need_zero_no + need_zero_yes + need_one_click + need_one_none + need_five_click + need_five_none > 0 {
        let s = exp.create_session().await.unwrap();
        k += 1;
        match s.condition {
            Condition::ZeroPlot if need_zero_yes > 0 => {
                need_zero_yes -= 1;
                exp.submit_story(&s.id, STORY).await.unwrap();
                exp.submit_verification(&s.id, VerificationAnswer::Yes).await.unwrap();
            }
            Condition::ZeroPlot if need_zero_no > 0 => {
                need_zero_no -= 1;
                exp.submit_story(&s.id, STORY).await.unwrap();
                exp.submit_verification(&s.id, VerificationAnswer::No).await.unwrap();
            }
            Condition::OnePlot if need_one_none > 0 => {
                need_one_none -= 1;
                exp.submit_story(&s.id, STORY).await.unwrap();
                exp.submit_verification(&s.id, VerificationAnswer::No).await.unwrap();
            }
            Condition::OnePlot if need_one_click > 0 => {
                need_one_click -= 1;
                exp.request_idea(&s.id).await.unwrap();
                exp.submit_story(&s.id, STORY).await.unwrap();
            }
            Condition::FivePlot if need_five_none > 0 => {
                need_five_none -= 1;
                exp.submit_story(&s.id, STORY).await.unwrap();
            }
            Condition::FivePlot if need_five_click > 0 => {
                need_five_click -= 1;
                for _ in 0..=(k % 5) {
                    exp.request_idea(&s.id).await.unwrap();
                }
                exp.submit_story(&s.id, STORY).await.unwrap();
            }
            // Abandoned session: never completes, never exported.
            _ => {}
        }
    }
}

#[tokio::test]
async fn export_reassigns_zero_click_sessions_and_excludes_self_reports() {
    let exp = Experiment::in_memory(small_pool(10, 3), config(AssignmentPolicy::BalancedBlock, 11));
    run_scripted_scenario(&exp).await;
    let records = exp.export_dataset().await;
    assert_eq!(records.len(), 100);
    assert!(records.windows(2).all(|w| w[0].session_id < w[1].session_id));

    let moved = |from| {
        records
            .iter()
            .filter(|r| r.served_condition == from && r.analysis_condition == Condition::ZeroPlot)
            .count()
    };
    assert_eq!(moved(Condition::OnePlot), 5);
    assert_eq!(moved(Condition::FivePlot), 3);

    let excluded: Vec<_> = records.iter().filter(|r| r.excluded).collect();
    assert_eq!(excluded.len(), 3);
    assert!(excluded.iter().all(|r| r.exclusion_reason.as_deref() == Some(EXTERNAL_AI_REASON)));

    let analysed = |c| records.iter().filter(|r| !r.excluded && r.analysis_condition == c).count();
    assert_eq!(
        (analysed(Condition::ZeroPlot), analysed(Condition::OnePlot), analysed(Condition::FivePlot)),
        (41, 27, 29)
    );
}

#[tokio::test]
async fn replay_reconstructs_identical_state() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("events.jsonl");
    let pool = small_pool(10, 3);
    let cfg = config(AssignmentPolicy::BalancedBlock, 3);
    let before = {
        let exp = Experiment::open(Arc::clone(&pool), cfg.clone(), &log).await.unwrap();
        run_scripted_scenario(&exp).await;
        (exp.sessions().await, exp.export_dataset().await)
    };
    let exp = Experiment::open(Arc::clone(&pool), cfg, &log).await.unwrap();
    assert_eq!(exp.sessions().await, before.0);
    assert_eq!(exp.export_dataset().await, before.1);

    // Ids keep counting after a restart.
    let next = exp.create_session().await.unwrap();
    assert_eq!(next.id, format!("S-{:06}", before.0.len() + 1));
    assert_eq!(read_events(&log).unwrap().last().unwrap().session_id(), next.id);
}

#[tokio::test]
async fn torn_final_log_line_is_ignored() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("events.jsonl");
    let pool = small_pool(2, 3);
    let cfg = config(AssignmentPolicy::Uniform, 0);
    {
        let exp = Experiment::open(Arc::clone(&pool), cfg.clone(), &log).await.unwrap();
        exp.create_session().await.unwrap();
    }
    let mut text = std::fs::read_to_string(&log).unwrap();
    text.push_str("{\"event\":\"session-creat");
    std::fs::write(&log, text).unwrap();
    let exp = Experiment::open(pool, cfg, &log).await.unwrap();
    assert_eq!(exp.session_count(), 1);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 8)]
async fn concurrent_storm_respects_budgets() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("events.jsonl");
    let pool = small_pool(10, 3);
    let cfg = config(AssignmentPolicy::Uniform, 42);
    let exp = Arc::new(Experiment::open(Arc::clone(&pool), cfg.clone(), &log).await.unwrap());

    let mut tasks = Vec::new();
    for t in 0..100u64 {
        let exp = Arc::clone(&exp);
        tasks.push(tokio::spawn(async move {
            let mut rng = ChaCha8Rng::seed_from_u64(t);
            let s = exp.create_session().await.unwrap();
            let attempts = rng.random_range(0..9);
            let mut reqs = Vec::new();
            for _ in 0..attempts {
                let exp = Arc::clone(&exp);
                let id = s.id.clone();
                let delay = rng.random_range(0..3);
                reqs.push(tokio::spawn(async move {
                    tokio::time::sleep(std::time::Duration::from_millis(delay)).await;
                    exp.request_idea(&id).await
                }));
            }
            let mut ok = 0;
            for r in reqs {
                match r.await.unwrap() {
                    Ok(_) => ok += 1,
                    Err(ExperimentError::BudgetExhausted { .. }) => {}
                    Err(e) => panic!("unexpected {e}"),
                }
            }
            assert_eq!(ok, attempts.min(s.budget()));
            exp.submit_story(&s.id, STORY).await.unwrap();
        }));
    }
    for t in tasks {
        t.await.unwrap();
    }

    let sessions = exp.sessions().await;
    assert_eq!(sessions.len(), 100);
    let ids: HashSet<_> = sessions.iter().map(|s| s.id.clone()).collect();
    assert_eq!(ids.len(), 100);
    for s in &sessions {
        assert!(s.ideas_served.len() <= s.budget());
        let distinct: HashSet<_> = s.ideas_served.iter().collect();
        assert_eq!(distinct.len(), s.ideas_served.len(), "{} served a repeat", s.id);
        assert!(s.ideas_served.iter().all(|i| pool.get(i).is_some()));
    }
    drop(exp);
    let replayed = Experiment::open(pool, cfg, &log).await.unwrap();
    assert_eq!(replayed.sessions().await, sessions);
}

#[tokio::test]
async fn export_csv_round_trips() {
    let exp = Experiment::in_memory(small_pool(10, 3), config(AssignmentPolicy::BalancedBlock, 4));
    run_scripted_scenario(&exp).await;
    let records = exp.export_dataset().await;
    let mut buf = Vec::new();
    ideation_core::experiment::write_export_csv(&records, &mut buf).unwrap();
    let back = ideation_core::experiment::read_export_csv(buf.as_slice()).unwrap();
    assert_eq!(back, records);
}
