//! Acceptance suite: one PASS/FAIL/SKIP line per headline criterion.
//!
//! Run with `cargo test -p ideation-cli --test acceptance -- --nocapture`.
//! The live-provider smoke runs only when `IDEATION_LIVE_SMOKE=1` and
//! `OPENAI_API_KEY` are both set.

use std::collections::HashSet;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use ideation_client::ExperimentClient;
use ideation_core::diversity::{
    cosine_values, inter_persona_similarity, intra_persona_similarity, persona_diversity, story_homogeneity,
    Centering, HomogeneityMode, PoolEmbeddings,
};
use ideation_core::embedding::{EmbeddingStore, EmbeddingVector, OpenAiEmbedder, DEFAULT_EMBEDDING_MODEL};
use ideation_core::experiment::{AssignmentPolicy, Condition, Experiment, ExperimentConfig, VerificationAnswer};
use ideation_core::ideas::{
    export_pool_string, generate_pool, import_pool, GenerateOptions, GenerationParams, IdeaPool, MockGenerator,
    OpenAiChat,
};
use ideation_core::persona::load_fixture_personas;
use ideation_core::stats::dist::{f_cdf, t_cdf};
use ideation_core::stats::{ols_dummy, ols_dummy_with_levels, oneway_anova, two_sample_t};
use ideation_core::text::{compare_groups, count_sentences, profile, tag_sentence, PosTag, TaggerModel};
use ideation_service::AppState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORE_DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data");
const ADMIN: &str = "acceptance-admin";

/// Criteria expected to fail; each is analysed in the decisions ledger.
const KNOWN_RED: &[&str] = &["statistics-oracles"];

enum Outcome {
    Pass,
    Fail,
    Skip,
}

struct Line {
    name: &'static str,
    outcome: Outcome,
    detail: String,
    elapsed: Duration,
}

impl Line {
    fn new(name: &'static str, ok: bool, limit: Option<Duration>, elapsed: Duration, detail: String) -> Self {
        let in_time = limit.is_none_or(|l| elapsed < l);
        let detail = match limit {
            Some(l) if !in_time => format!("{detail}; over time limit {l:?}"),
            _ => detail,
        };
        let outcome = if ok && in_time { Outcome::Pass } else { Outcome::Fail };
        Self { name, outcome, detail, elapsed }
    }

    fn print(&self) {
        let tag = match self.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skip => "SKIP",
        };
        // written to the raw handle so the report shows without --nocapture
        let line = format!("[{tag}] {} ({:.1} ms): {}\n", self.name, self.elapsed.as_secs_f64() * 1e3, self.detail);
        let _ = std::io::stdout().lock().write_all(line.as_bytes());
    }
}

/// Sub-check results joined into one detail string.
struct Subchecks(Vec<(String, bool)>);

impl Subchecks {
    fn add(&mut self, ok: bool, text: String) {
        self.0.push((text, ok));
    }

    fn ok(&self) -> bool {
        self.0.iter().all(|(_, ok)| *ok)
    }

    fn detail(&self) -> String {
        self.0
            .iter()
            .map(|(t, ok)| if *ok { t.clone() } else { format!("{t} <- FAIL") })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn ols_consistency() -> Line {
    let start = Instant::now();
    let groups = [("zero-plot", 41usize, 90.727), ("one-plot", 27, 90.094), ("five-plot", 29, 90.326)];
    let mut data = Vec::new();
    for (label, n, m) in groups {
        // Symmetric spread around the mean keeps each group mean exact.
        for i in 0..n {
            data.push((m + 0.37 * (i as f64 - (n as f64 - 1.0) / 2.0), label.to_string()));
        }
    }
    let fit = ols_dummy_with_levels(&data, &["zero-plot", "one-plot", "five-plot"], "zero-plot").unwrap();
    let (b1, b2) = (fit.coefficients["one-plot"], fit.coefficients["five-plot"]);
    let ok = (fit.intercept - 90.727).abs() <= 0.01 && (b1 + 0.633).abs() <= 0.01 && (b2 + 0.401).abs() <= 0.01;
    Line::new(
        "ols-table-consistency",
        ok,
        Some(Duration::from_secs(1)),
        start.elapsed(),
        format!("n={} intercept={:.4} one-plot={b1:.4} five-plot={b2:.4} (tol 0.01)", fit.n, fit.intercept),
    )
}

fn brute_cos(u: &[f64], v: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut uu = 0.0;
    let mut vv = 0.0;
    for i in 0..u.len() {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    dot / (uu * vv).sqrt()
}

fn brute_mean(vs: &[&Vec<f64>]) -> Vec<f64> {
    let mut m = vec![0.0; vs[0].len()];
    for v in vs {
        for i in 0..m.len() {
            m[i] += v[i] / vs.len() as f64;
        }
    }
    m
}

fn similarity_oracle() -> Line {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let mut worst = 0.0f64;
    let normal = |rng: &mut ChaCha8Rng| rng.random_range(-1.0..1.0);

    for _ in 0..100 {
        let dim = rng.random_range(2..=1536);
        let u: Vec<f64> = (0..dim).map(|_| normal(&mut rng)).collect();
        let v: Vec<f64> = (0..dim).map(|_| normal(&mut rng)).collect();
        worst = worst.max((cosine_values(&u, &v).unwrap() - brute_cos(&u, &v)).abs());
    }

    let mut pools = 0;
    for _ in 0..25 {
        let personas = rng.random_range(2..=10);
        let per = rng.random_range(2..=10);
        let dim = rng.random_range(3..=32);
        let raw: Vec<Vec<Vec<f64>>> = (0..personas)
            .map(|_| (0..per).map(|_| (0..dim).map(|_| normal(&mut rng)).collect()).collect())
            .collect();
        let pool: PoolEmbeddings = raw
            .iter()
            .enumerate()
            .map(|(p, vs)| (format!("p{p}"), vs.iter().map(|v| EmbeddingVector::new(v.clone(), "t")).collect()))
            .collect();
        let all: Vec<&Vec<f64>> = raw.iter().flatten().collect();
        let grand = brute_mean(&all);
        for (p, vs) in raw.iter().enumerate() {
            let id = format!("p{p}");
            // Intra: each plot against the mean of the other plots of the persona.
            let mut intra = 0.0;
            for i in 0..vs.len() {
                let others: Vec<&Vec<f64>> = vs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v).collect();
                intra += brute_cos(&vs[i], &brute_mean(&others)) / vs.len() as f64;
            }
            worst = worst.max((intra_persona_similarity(&pool, &id).unwrap().value - intra).abs());
            // Inter: persona mean against the mean of every other persona's plots.
            let focal = brute_mean(&vs.iter().collect::<Vec<_>>());
            let rest: Vec<&Vec<f64>> =
                raw.iter().enumerate().filter(|(q, _)| *q != p).flat_map(|(_, vs)| vs.iter()).collect();
            let rest = brute_mean(&rest);
            let centred = |m: &[f64]| m.iter().zip(&grand).map(|(a, g)| a - g).collect::<Vec<f64>>();
            let none = brute_cos(&focal, &rest);
            let global = brute_cos(&centred(&focal), &centred(&rest));
            worst = worst.max((inter_persona_similarity(&pool, &id, Centering::None).unwrap().value - none).abs());
            worst =
                worst.max((inter_persona_similarity(&pool, &id, Centering::GlobalMean).unwrap().value - global).abs());
        }
        // Homogeneity: all plots of the pool as one condition.
        let stories: Vec<(String, EmbeddingVector)> =
            all.iter().enumerate().map(|(i, v)| (format!("s{i}"), EmbeddingVector::new((*v).clone(), "t"))).collect();
        let inclusive_mean = brute_mean(&all);
        let loo = story_homogeneity(&stories, HomogeneityMode::LeaveOneOut).unwrap();
        let inc = story_homogeneity(&stories, HomogeneityMode::Inclusive).unwrap();
        for i in 0..all.len() {
            let others: Vec<&Vec<f64>> = all.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
            let want_loo = 100.0 * brute_cos(all[i], &brute_mean(&others));
            let want_inc = 100.0 * brute_cos(all[i], &inclusive_mean);
            worst = worst.max((loo[i].1.value - want_loo).abs() / 100.0);
            worst = worst.max((inc[i].1.value - want_inc).abs() / 100.0);
        }
        pools += 1;
    }
    Line::new(
        "similarity-oracle",
        worst <= 1e-9,
        Some(Duration::from_secs(5)),
        start.elapsed(),
        format!("100 cosine pairs + {pools} pools up to 10x10, both centerings and both modes; max |diff| = {worst:.2e} (tol 1e-9)"),
    )
}

fn read_reference(name: &str) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(format!("{CORE_DATA}/reference/{name}")).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

fn statistics_oracles() -> Line {
    let start = Instant::now();
    let mut checks = Subchecks(Vec::new());

    let t = two_sample_t(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], true).unwrap();
    checks.add((t.t + 3.674).abs() <= 0.001, format!("pooled t={:.4} (want -3.674 +/- 0.001)", t.t));

    let a = oneway_anova(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
    checks.add(
        (a.f - 8.0).abs() <= 1e-6 && (a.df1, a.df2) == (2, 3),
        format!(
            "anova F={:.6} df=({},{}) (want 8.0 +/- 1e-6, classical F is MSB/MSW = {:.1}/{:.1}, the stated 8.0 equals MSB)",
            a.f, a.df1, a.df2, a.ms_between, a.ms_within
        ),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mut data = Vec::new();
        let mut groups = Vec::new();
        for g in 0..3 {
            let n = rng.random_range(3..20);
            let shift = rng.random_range(-2.0..2.0);
            let xs: Vec<f64> = (0..n).map(|_| shift + rng.random_range(-5.0..5.0)).collect();
            data.extend(xs.iter().map(|x| (*x, format!("g{g}"))));
            groups.push(xs);
        }
        let f_reg = ols_dummy(&data, "g0").unwrap().f_stat;
        let f_anova = oneway_anova(&groups).unwrap().f;
        worst = worst.max((f_reg - f_anova).abs());
    }
    checks.add(worst <= 1e-9, format!("regression F vs ANOVA F on 50 datasets: max |diff| = {worst:.1e}"));

    let mut worst_p = 0.0f64;
    let mut rows = 0;
    for r in read_reference("t_quantiles.csv") {
        worst_p = worst_p.max((t_cdf(r[2], r[0]) - r[1]).abs());
        rows += 1;
    }
    for r in read_reference("f_quantiles.csv") {
        worst_p = worst_p.max((f_cdf(r[3], r[0], r[1]) - r[2]).abs());
        rows += 1;
    }
    checks.add(worst_p <= 1e-6, format!("{rows} reference quantiles: max |p diff| = {worst_p:.1e}"));

    Line::new("statistics-oracles", checks.ok(), None, start.elapsed(), checks.detail())
}

async fn mock_pool(seed: u64) -> IdeaPool {
    generate_pool(
        &load_fixture_personas(),
        30,
        &MockGenerator::new(seed),
        &GenerationParams::default(),
        &GenerateOptions { backoff: Duration::ZERO, ..GenerateOptions::default() },
    )
    .await
    .unwrap()
}

async fn generation_pipeline() -> Line {
    let start = Instant::now();
    let mut checks = Subchecks(Vec::new());
    let pool = mock_pool(1).await;
    checks.add(pool.len() == 300, format!("{} ideas", pool.len()));
    let ids: HashSet<_> = pool.ideas().iter().map(|i| &i.id).collect();
    checks.add(ids.len() == pool.len(), format!("{} unique ids", ids.len()));
    let three = pool.ideas().iter().filter(|i| count_sentences(&i.text) == 3 && i.sentence_count == 3).count();
    checks.add(three == pool.len(), format!("{three} with exactly 3 sentences"));
    let csv = export_pool_string(&pool);
    let back = import_pool(csv.as_bytes()).unwrap();
    checks.add(export_pool_string(&back) == csv && back.same_content(&pool), "CSV round trip byte-exact".into());
    let again = export_pool_string(&mock_pool(1).await);
    checks.add(again == csv, "second seeded run bit-identical".into());
    Line::new("generation-pipeline", checks.ok(), Some(Duration::from_secs(10)), start.elapsed(), checks.detail())
}

async fn live_smoke() -> Line {
    let start = Instant::now();
    let enabled = std::env::var("IDEATION_LIVE_SMOKE").is_ok_and(|v| v == "1");
    if !enabled || std::env::var("OPENAI_API_KEY").is_err() {
        return Line {
            name: "live-provider-smoke",
            outcome: Outcome::Skip,
            detail: "set IDEATION_LIVE_SMOKE=1 and OPENAI_API_KEY to run".into(),
            elapsed: start.elapsed(),
        };
    }
    let run = async {
        let personas: Vec<_> = load_fixture_personas().into_iter().take(2).collect();
        let chat = OpenAiChat::from_env(2).map_err(|e| e.to_string())?;
        let params = GenerationParams { temperature: 0.9, top_p: 1.0, ..GenerationParams::default() };
        let pool = generate_pool(&personas, 5, &chat, &params, &GenerateOptions::default())
            .await
            .map_err(|e| e.to_string())?;
        let embedder = OpenAiEmbedder::from_env(DEFAULT_EMBEDDING_MODEL).map_err(|e| e.to_string())?;
        let store = EmbeddingStore::in_memory(Arc::new(embedder));
        let texts: Vec<String> = pool.ideas().iter().map(|i| i.text.clone()).collect();
        let vectors = store.embed_texts(&texts).await.map_err(|e| e.to_string())?;
        let mut emb = PoolEmbeddings::new();
        for (idea, v) in pool.ideas().iter().zip(vectors) {
            emb.entry(idea.persona_id.clone()).or_default().push(v);
        }
        let mut out = Vec::new();
        for c in [Centering::None, Centering::GlobalMean] {
            let rows = persona_diversity(&emb, c).map_err(|e| e.to_string())?;
            let n = rows.len() as f64;
            let intra = rows.iter().map(|r| r.intra.value).sum::<f64>() / n;
            let inter = rows.iter().map(|r| r.inter.value).sum::<f64>() / n;
            out.push((c, intra, inter));
        }
        Ok::<_, String>(out)
    };
    match run.await {
        Ok(modes) => {
            let ok = modes.iter().any(|(_, intra, inter)| intra > inter);
            let detail = modes
                .iter()
                .map(|(c, intra, inter)| format!("{c:?}: intra={intra:.4} inter={inter:.4}"))
                .collect::<Vec<_>>()
                .join("; ");
            Line::new("live-provider-smoke", ok, None, start.elapsed(), detail)
        }
        Err(e) => Line::new("live-provider-smoke", false, None, start.elapsed(), format!("provider error: {e}")),
    }
}

#[derive(serde::Deserialize)]
struct GoldenFile {
    stories: Vec<GoldenStory>,
}

#[derive(serde::Deserialize)]
struct GoldenStory {
    id: String,
    text: String,
    expected: toml::Table,
}

fn text_golden() -> Line {
    let start = Instant::now();
    let mut checks = Subchecks(Vec::new());
    let golden: GoldenFile =
        toml::from_str(&std::fs::read_to_string(format!("{CORE_DATA}/golden/stories.toml")).unwrap()).unwrap();
    let mut exact = 0;
    let mut profiles = Vec::new();
    for s in &golden.stories {
        let p = profile(&s.text).unwrap();
        let got = toml::Table::try_from(&p).unwrap();
        let same = got.len() == 9
            && got.iter().all(|(k, v)| {
                let want = &s.expected[k];
                v.as_float().or(v.as_integer().map(|i| i as f64)) == want.as_float().or(want.as_integer().map(|i| i as f64))
            });
        if same {
            exact += 1;
        } else {
            checks.add(false, format!("story {} differs", s.id));
        }
        profiles.push(p);
    }
    checks.add(exact == golden.stories.len() && exact == 5, format!("{exact}/5 stories exact on 9 attributes"));

    let text = std::fs::read_to_string(format!("{CORE_DATA}/golden/tagged_plots.txt")).unwrap();
    let model = TaggerModel::default();
    let (mut ok, mut total) = (0usize, 0usize);
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let pairs: Vec<(String, PosTag)> = line
            .split_whitespace()
            .map(|t| {
                let (w, tag) = t.rsplit_once('/').unwrap();
                (w.to_string(), tag.parse().unwrap())
            })
            .collect();
        let words: Vec<String> = pairs.iter().map(|(w, _)| w.clone()).collect();
        for ((_, want), got) in pairs.iter().zip(tag_sentence(&words, &model)) {
            total += 1;
            ok += usize::from(*want == got);
        }
    }
    let acc = ok as f64 / total as f64;
    checks.add(acc >= 0.95 && total >= 200, format!("tagger {ok}/{total} = {:.1}%", acc * 100.0));

    let rows = compare_groups(&profiles, &profiles, true).unwrap();
    let zero = rows.iter().all(|r| r.t == 0.0 && r.p == 1.0);
    checks.add(zero, format!("identical groups: t=0, p=1 on {}/9 attributes", rows.iter().filter(|r| r.t == 0.0 && r.p == 1.0).count()));
    Line::new("text-golden-suite", checks.ok(), None, start.elapsed(), checks.detail())
}

const STORY: &str = "One. Two. Three. Four. Five. Six. Seven. Eight.";

async fn start_server(pool: Arc<IdeaPool>, policy: AssignmentPolicy, seed: u64) -> ExperimentClient {
    let exp = Experiment::in_memory(pool, ExperimentConfig { policy, seed, verify_all_sessions: false });
    let addr = ideation_service::spawn(AppState::new(Arc::new(exp), ADMIN.into()), "127.0.0.1:0").await.unwrap();
    ExperimentClient::new(format!("http://{addr}")).with_admin_token(ADMIN)
}

async fn storm(client: &ExperimentClient) -> Result<String, String> {
    let mut tasks = Vec::new();
    for t in 0..100u64 {
        let client = client.clone();
        tasks.push(tokio::spawn(async move {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + t);
            tokio::time::sleep(Duration::from_millis(rng.random_range(0..20))).await;
            let s = client.create_session().await.map_err(|e| e.to_string())?;
            let attempts = rng.random_range(0..10);
            let reqs: Vec<_> = (0..attempts)
                .map(|_| {
                    let client = client.clone();
                    let id = s.id.clone();
                    let delay = Duration::from_millis(rng.random_range(0..15));
                    tokio::spawn(async move {
                        tokio::time::sleep(delay).await;
                        client.request_idea(&id).await
                    })
                })
                .collect();
            let mut served = 0;
            for r in reqs {
                match r.await.unwrap() {
                    Ok(_) => served += 1,
                    Err(e) if e.code() == Some("budget-exhausted") => {}
                    Err(e) => return Err(format!("{}: {e}", s.id)),
                }
            }
            if rng.random_bool(0.5) {
                client.submit_story(&s.id, STORY).await.map_err(|e| e.to_string())?;
            }
            Ok::<_, String>((s.id, attempts, served))
        }));
    }
    let mut over = 0;
    let mut repeats = 0;
    let mut requested = 0;
    for t in tasks {
        let (id, attempts, served) = t.await.unwrap()?;
        requested += attempts;
        let s = client.session(&id).await.map_err(|e| e.to_string())?;
        if s.ideas_served.len() > s.condition.budget() || served != s.ideas_served.len() {
            over += 1;
        }
        if s.ideas_served.iter().collect::<HashSet<_>>().len() != s.ideas_served.len() {
            repeats += 1;
        }
    }
    if over + repeats > 0 {
        return Err(format!("{over} sessions over budget, {repeats} with repeated ideas"));
    }
    Ok(format!("100 sessions, {requested} concurrent idea requests, budgets held, no repeats"))
}

async fn scripted(client: &ExperimentClient) -> Result<String, String> {
    let e = |e: ideation_client::ClientError| e.to_string();
    // Remaining quotas: control yes/no, one-plot zero-click/used, five-plot zero-click/used.
    let mut quota = [3, 33, 5, 27, 3, 29];
    let mut k = 0;
    while quota.iter().sum::<i32>() > 0 {
        let s = client.create_session().await.map_err(e)?;
        k += 1;
        let slot = match s.condition {
            Condition::ZeroPlot => [0, 1].into_iter().find(|&i| quota[i] > 0),
            Condition::OnePlot => [2, 3].into_iter().find(|&i| quota[i] > 0),
            Condition::FivePlot => [4, 5].into_iter().find(|&i| quota[i] > 0),
        };
        let Some(slot) = slot else { continue };
        quota[slot] -= 1;
        if slot == 3 || slot == 5 {
            for _ in 0..s.condition.budget().min(1 + k % 5) {
                client.request_idea(&s.id).await.map_err(e)?;
            }
        }
        client.submit_story(&s.id, STORY).await.map_err(e)?;
        match slot {
            0 => drop(client.submit_verification(&s.id, VerificationAnswer::Yes).await.map_err(e)?),
            1 | 2 => drop(client.submit_verification(&s.id, VerificationAnswer::No).await.map_err(e)?),
            _ => {}
        }
    }
    let records = client.export().await.map_err(e)?;
    let moved = |c| records.iter().filter(|r| r.served_condition == c && r.analysis_condition == Condition::ZeroPlot).count();
    let excluded = records.iter().filter(|r| r.excluded).count();
    let kept = |c| records.iter().filter(|r| !r.excluded && r.analysis_condition == c).count();
    let summary = format!(
        "{} exported; one-plot->control {}, five-plot->control {}, excluded {}; analysed {}/{}/{}",
        records.len(),
        moved(Condition::OnePlot),
        moved(Condition::FivePlot),
        excluded,
        kept(Condition::ZeroPlot),
        kept(Condition::OnePlot),
        kept(Condition::FivePlot)
    );
    let ok = moved(Condition::OnePlot) == 5
        && moved(Condition::FivePlot) == 3
        && excluded == 3
        && (kept(Condition::ZeroPlot), kept(Condition::OnePlot), kept(Condition::FivePlot)) == (41, 27, 29);
    if ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

async fn experiment_service() -> Line {
    let start = Instant::now();
    let pool = Arc::new(mock_pool(3).await);
    let mut checks = Subchecks(Vec::new());
    match storm(&start_server(Arc::clone(&pool), AssignmentPolicy::Uniform, 5).await).await {
        Ok(s) => checks.add(true, format!("storm: {s}")),
        Err(s) => checks.add(false, format!("storm: {s}")),
    }
    match scripted(&start_server(pool, AssignmentPolicy::BalancedBlock, 8).await).await {
        Ok(s) => checks.add(true, format!("scenario: {s}")),
        Err(s) => checks.add(false, format!("scenario: {s}")),
    }
    Line::new("experiment-service", checks.ok(), Some(Duration::from_secs(30)), start.elapsed(), checks.detail())
}

#[tokio::test(flavor = "multi_thread", worker_threads = 8)]
async fn acceptance() {
    let lines = vec![
        ols_consistency(),
        similarity_oracle(),
        statistics_oracles(),
        generation_pipeline().await,
        live_smoke().await,
        text_golden(),
        experiment_service().await,
    ];
    let _ = std::io::stdout().lock().write_all(b"\n");
    for l in &lines {
        l.print();
    }
    let unexpected: Vec<&str> = lines
        .iter()
        .filter(|l| matches!(l.outcome, Outcome::Fail) && !KNOWN_RED.contains(&l.name))
        .map(|l| l.name)
        .collect();
    assert!(unexpected.is_empty(), "failing criteria: {unexpected:?}");
}

/// The one red criterion must fail only on its ANOVA F = 8.0 sub-check.
#[test]
fn statistics_red_is_only_the_anova_example() {
    let line = statistics_oracles();
    let failing: Vec<&str> = line.detail.split("; ").filter(|s| s.ends_with("<- FAIL")).collect();
    assert_eq!(failing.len(), 1, "{}", line.detail);
    assert!(failing[0].starts_with("anova F=16.000000"), "{}", line.detail);
}
