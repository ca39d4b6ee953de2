use std::path::Path;

use ideation_client::ExperimentClient;
use ideation_core::diversity::Centering;
use ideation_core::experiment::{Condition, VerificationAnswer};
use ideation_core::ideas::{dedup_pool, export_pool_string, generate_pool, GenerateOptions, GenerationParams};
use ideation_core::persona::{
    default_taxonomy, fixture_personas, fixtures_to_toml, render_persona, render_persona_with_provider,
    sample_persona, PersonaTemplate,
};
use ideation_core::stats::{ols_dummy, oneway_anova, regression_table, two_sample_t};
use ideation_core::text::TextAnalyzer;
use ideation_service::ServiceConfig;
use indexmap::IndexMap;
use serde_json::json;

use crate::analysis::{self, StoryScore};
use crate::error::{CliError, CliResult};
use crate::inputs::{self, emit, write_file};
use crate::providers::{self, ProviderKind};
use crate::{
    AnalyzeCmd, CenteringArg, EmbedArgs, ExportArgs, Format, GenerationArgs, IdeasCmd, PersonaCmd, ReportArgs,
    ServeArgs, SessionCmd, StatsCmd,
};

fn print_json(value: &impl serde::Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(CliError::data)?;
    println!("{text}");
    Ok(())
}

fn params(args: &GenerationArgs) -> CliResult<GenerationParams> {
    let p = GenerationParams {
        model: args.model.clone(),
        temperature: args.temperature,
        top_p: args.top_p,
        retry_budget: args.retry_budget,
    };
    p.validate()?;
    Ok(p)
}

pub async fn persona(cmd: PersonaCmd) -> CliResult<()> {
    let taxonomy = default_taxonomy();
    match cmd {
        PersonaCmd::List => {
            print!("{}", taxonomy.to_toml());
            Ok(())
        }
        PersonaCmd::Sample { seed, count, name } => {
            for i in 0..count {
                let label = if count == 1 { name.clone() } else { format!("{name} {}", i + 1) };
                let spec = sample_persona(&taxonomy, seed + i, &label);
                println!("{}", serde_json::to_string(&spec).map_err(CliError::data)?);
            }
            Ok(())
        }
        PersonaCmd::Render { seed, name, provider } => {
            let spec = sample_persona(&taxonomy, seed, &name);
            let description = match provider {
                ProviderKind::Mock => render_persona(&spec, &taxonomy, &PersonaTemplate::default())?,
                ProviderKind::Openai => {
                    let chat = providers::chat(provider, seed, 1)?;
                    render_persona_with_provider(&spec, &taxonomy, chat.as_ref(), &GenerationParams::default()).await?
                }
            };
            println!("{}", description.prose);
            Ok(())
        }
        PersonaCmd::Fixtures { full } => {
            let fixtures = fixture_personas();
            if full {
                print!("{}", fixtures_to_toml(&fixtures));
            } else {
                for f in &fixtures {
                    println!("{}\t{}\t{} words", f.id, f.name, ideation_core::persona::word_count(&f.prose));
                }
            }
            Ok(())
        }
    }
}

pub async fn ideas(cmd: IdeasCmd) -> CliResult<()> {
    match cmd {
        IdeasCmd::Generate { personas, per_persona, provider, seed, generation, out } => {
            let params = params(&generation)?;
            let personas = inputs::load_personas(&personas, seed)?;
            let chat = providers::chat(provider, seed, generation.concurrency.max(1))?;
            let mut options = GenerateOptions { concurrency: generation.concurrency, ..GenerateOptions::default() };
            if provider == ProviderKind::Mock {
                options.backoff = std::time::Duration::ZERO;
            }
            let pool = generate_pool(&personas, per_persona, chat.as_ref(), &params, &options).await?;
            emit(out.as_deref(), export_pool_string(&pool).as_bytes())
        }
        IdeasCmd::Dedup { pool, provider, cache, threshold } => {
            let pool = inputs::load_pool(&pool)?;
            let store = providers::store(provider, cache.as_deref()).await?;
            let report = dedup_pool(&pool, &store, threshold).await?;
            print_json(&report)
        }
        IdeasCmd::Export { pool, format, out } => {
            let pool = inputs::load_pool(&pool)?;
            let bytes = match format {
                Format::Csv => export_pool_string(&pool).into_bytes(),
                Format::Json => {
                    let mut v = serde_json::to_vec_pretty(pool.ideas()).map_err(CliError::data)?;
                    v.push(b'\n');
                    v
                }
            };
            emit(out.as_deref(), &bytes)
        }
    }
}

pub async fn embed(args: EmbedArgs) -> CliResult<()> {
    let mut texts = args.text.clone();
    if let Some(p) = &args.pool {
        texts.extend(inputs::load_pool(p)?.ideas().iter().map(|i| i.text.clone()));
    }
    if let Some(p) = &args.export {
        texts.extend(inputs::load_export(p)?.into_iter().filter(|r| !r.excluded).map(|r| r.story));
    }
    if texts.is_empty() {
        return Err(CliError::config("nothing to embed: pass --pool, --export or --text"));
    }
    let store = providers::store(args.provider, Some(&args.cache)).await?;
    let vectors = store.embed_texts(&texts).await?;
    print_json(&json!({
        "texts": texts.len(),
        "dim": vectors.first().map(|v| v.dim()),
        "provider_calls": store.provider_calls(),
        "cached_entries": store.cached_entries(),
        "cache": args.cache,
    }))
}

fn centering_name(c: Centering) -> &'static str {
    match c {
        Centering::None => "none",
        Centering::GlobalMean => "global-mean",
    }
}

fn inter_file(c: Centering) -> String {
    match c {
        Centering::None => "inter_persona.csv".into(),
        Centering::GlobalMean => "inter_persona_global_mean.csv".into(),
    }
}

/// Writes the diversity tables and returns the per-mode means.
async fn diversity_outputs(
    pool: &Path,
    provider: ProviderKind,
    cache: Option<&Path>,
    centering: CenteringArg,
    out_dir: Option<&Path>,
) -> CliResult<serde_json::Value> {
    let pool = inputs::load_pool(pool)?;
    let store = providers::store(provider, cache).await?;
    let emb = analysis::pool_embeddings(&pool, &store).await?;
    let mut summary = serde_json::Map::new();
    let mut wrote_intra = false;
    for mode in centering.modes() {
        let tables = analysis::diversity_tables(&emb, mode)?;
        match out_dir {
            Some(dir) => {
                if !wrote_intra {
                    write_file(&dir.join("intra_persona.csv"), &tables.intra_csv)?;
                }
                write_file(&dir.join(inter_file(mode)), &tables.inter_csv)?;
            }
            None => {
                if !wrote_intra {
                    emit(None, &tables.intra_csv)?;
                    println!();
                }
                emit(None, &tables.inter_csv)?;
                println!();
            }
        }
        wrote_intra = true;
        summary.insert(
            centering_name(mode).into(),
            json!({ "mean_intra": tables.mean_intra(), "mean_inter": tables.mean_inter() }),
        );
    }
    Ok(serde_json::Value::Object(summary))
}

/// Writes the story tables and returns the scores.
async fn story_outputs(
    export: &Path,
    provider: ProviderKind,
    cache: Option<&Path>,
    mode: crate::ModeArg,
    out_dir: Option<&Path>,
) -> CliResult<Vec<StoryScore>> {
    let records = inputs::load_export(export)?;
    let store = providers::store(provider, cache).await?;
    let scores = analysis::story_scores(&records, &store, mode.into()).await?;
    let per_story = analysis::story_scores_csv(&scores)?;
    let summary = analysis::story_summary_csv(&scores)?;
    let regression = analysis::story_regression_text(&scores)?;
    match out_dir {
        Some(dir) => {
            write_file(&dir.join("story_similarity.csv"), &per_story)?;
            write_file(&dir.join("story_similarity_summary.csv"), &summary)?;
            write_file(&dir.join("story_regression.txt"), regression.as_bytes())?;
        }
        None => {
            emit(None, &summary)?;
            println!();
            print!("{regression}");
        }
    }
    Ok(scores)
}

fn parse_conditions(s: &str) -> CliResult<Vec<Condition>> {
    s.split(',').map(|c| c.trim().parse::<Condition>().map_err(CliError::config)).collect()
}

pub async fn analyze(cmd: AnalyzeCmd) -> CliResult<()> {
    match cmd {
        AnalyzeCmd::Diversity { pool, provider, cache, centering, out_dir } => {
            let summary = diversity_outputs(&pool, provider, cache.as_deref(), centering, out_dir.as_deref()).await?;
            if out_dir.is_some() {
                print_json(&summary)?;
            }
            Ok(())
        }
        AnalyzeCmd::Stories { export, provider, cache, mode, out_dir } => {
            story_outputs(&export, provider, cache.as_deref(), mode, out_dir.as_deref()).await?;
            Ok(())
        }
        AnalyzeCmd::Text { group_a, group_b, export, label_a, label_b, welch, out } => {
            let (a, b) = match &export {
                Some(path) => {
                    let records = inputs::load_export(path)?;
                    (
                        analysis::profiles_for(&records, &parse_conditions(&group_a)?)?,
                        analysis::profiles_for(&records, &parse_conditions(&group_b)?)?,
                    )
                }
                None => {
                    let analyzer = TextAnalyzer::shipped();
                    let load = |p: &str| -> CliResult<Vec<_>> {
                        inputs::read_story_file(Path::new(p))?
                            .iter()
                            .map(|s| analyzer.profile(s).map_err(CliError::from))
                            .collect()
                    };
                    (load(&group_a)?, load(&group_b)?)
                }
            };
            let table = analysis::text_report(&a, &b, &label_a, &label_b, !welch)?;
            emit(out.as_deref(), table.as_bytes())
        }
    }
}

fn group_values(data: &[(f64, String)], label: &str) -> CliResult<Vec<f64>> {
    let v: Vec<f64> = data.iter().filter(|(_, l)| l == label).map(|(x, _)| *x).collect();
    if v.is_empty() {
        return Err(CliError::data(format!("no rows for group {label:?}")));
    }
    Ok(v)
}

fn grouped(data: &[(f64, String)]) -> IndexMap<String, Vec<f64>> {
    let mut groups: IndexMap<String, Vec<f64>> = IndexMap::new();
    for (x, l) in data {
        groups.entry(l.clone()).or_default().push(*x);
    }
    groups
}

pub fn stats(cmd: StatsCmd) -> CliResult<()> {
    match cmd {
        StatsCmd::Regress { data, reference, dependent, json } => {
            let data = inputs::read_scores(&data)?;
            let fit = ols_dummy(&data, &reference)?;
            if json {
                print_json(&fit)
            } else {
                print!("{}", regression_table(&fit, &dependent));
                Ok(())
            }
        }
        StatsCmd::Anova { data } => {
            let data = inputs::read_scores(&data)?;
            let groups = grouped(&data);
            let result = oneway_anova(&groups.values().cloned().collect::<Vec<_>>())?;
            print_json(&json!({ "groups": groups.keys().collect::<Vec<_>>(), "result": result }))
        }
        StatsCmd::Ttest { a, b, data, group_a, group_b, welch } => {
            let (xa, xb) = match (a, b, data, group_a, group_b) {
                (Some(a), Some(b), None, _, _) => (inputs::parse_list(&a)?, inputs::parse_list(&b)?),
                (None, None, Some(path), Some(ga), Some(gb)) => {
                    let data = inputs::read_scores(&path)?;
                    (group_values(&data, &ga)?, group_values(&data, &gb)?)
                }
                _ => return Err(CliError::config("pass --a and --b, or --data with --group-a and --group-b")),
            };
            print_json(&two_sample_t(&xa, &xb, !welch)?)
        }
    }
}

pub async fn serve(args: ServeArgs) -> CliResult<()> {
    let mut config = ServiceConfig::load(args.config.as_deref()).map_err(CliError::config)?;
    if let Some(port) = args.port {
        config.port = port;
    }
    if let Some(pool) = args.pool {
        config.pool_path = pool;
    }
    if let Some(log) = args.log {
        config.log_path = log;
    }
    ideation_service::serve(config).await?;
    Ok(())
}

pub async fn session(cmd: SessionCmd) -> CliResult<()> {
    match cmd {
        SessionCmd::Create(s) => print_json(&ExperimentClient::new(s.server).create_session().await?),
        SessionCmd::Show { id, server } => print_json(&ExperimentClient::new(server.server).session(&id).await?),
        SessionCmd::Idea { id, server } => print_json(&ExperimentClient::new(server.server).request_idea(&id).await?),
        SessionCmd::Story { id, text, file, server } => {
            let text = match (text, file) {
                (Some(t), None) => t,
                (None, Some(f)) => inputs::read_text(&f)?,
                _ => return Err(CliError::config("pass exactly one of --text or --file")),
            };
            print_json(&ExperimentClient::new(server.server).submit_story(&id, &text).await?)
        }
        SessionCmd::Verify { id, answer, server } => {
            let answer: VerificationAnswer = answer.parse().map_err(CliError::config)?;
            print_json(&ExperimentClient::new(server.server).submit_verification(&id, answer).await?)
        }
    }
}

pub async fn export(args: ExportArgs) -> CliResult<()> {
    let client = ExperimentClient::new(args.server.server).with_admin_token(args.admin_token);
    let bytes = match args.format {
        Format::Csv => client.export_csv().await?.into_bytes(),
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(&client.export().await?).map_err(CliError::data)?;
            v.push(b'\n');
            v
        }
    };
    emit(args.out.as_deref(), &bytes)
}

pub async fn report(args: ReportArgs) -> CliResult<()> {
    if args.pool.is_none() && args.export.is_none() {
        return Err(CliError::config("report needs --pool, --export or both"));
    }
    let dir = args.out_dir.as_path();
    let mut written = Vec::new();
    let mut summary = serde_json::Map::new();
    if let Some(pool) = &args.pool {
        let d = diversity_outputs(pool, args.provider, args.cache.as_deref(), args.centering, Some(dir)).await?;
        summary.insert("diversity".into(), d);
        written.push("intra_persona.csv".to_string());
        written.extend(args.centering.modes().into_iter().map(inter_file));
    }
    if let Some(export) = &args.export {
        let scores = story_outputs(export, args.provider, args.cache.as_deref(), args.mode, Some(dir)).await?;
        written.extend(["story_similarity.csv", "story_similarity_summary.csv", "story_regression.txt"].map(String::from));

        let records = inputs::load_export(export)?;
        let human = analysis::profiles_for(&records, &[Condition::ZeroPlot])?;
        let assisted = analysis::profiles_for(&records, &[Condition::OnePlot, Condition::FivePlot])?;
        let one = analysis::profiles_for(&records, &[Condition::OnePlot])?;
        let five = analysis::profiles_for(&records, &[Condition::FivePlot])?;
        let t1 = analysis::text_report(&human, &assisted, "Human", "AI-Assisted", true)?;
        let t2 = analysis::text_report(&one, &five, "1-plot", "5-plots", true)?;
        write_file(&dir.join("text_human_vs_ai.txt"), t1.as_bytes())?;
        write_file(&dir.join("text_one_vs_five.txt"), t2.as_bytes())?;
        written.extend(["text_human_vs_ai.txt", "text_one_vs_five.txt"].map(String::from));

        if args.plots {
            write_file(&dir.join("story_similarity.svg"), analysis::histogram_svg(&scores, 20).as_bytes())?;
            written.push("story_similarity.svg".into());
        }
    }
    summary.insert("files".into(), json!(written));
    print_json(&serde_json::Value::Object(summary))
}
