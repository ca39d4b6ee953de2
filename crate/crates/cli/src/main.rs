//! `ideation`: persona sampling, plot generation, diversity and text analysis,
//! statistics, and the story-writing experiment service.

mod analysis;
mod commands;
mod error;
mod inputs;
mod providers;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ideation_core::diversity::{Centering, HomogeneityMode};

use crate::error::CliResult;
use crate::providers::ProviderKind;

#[derive(Parser)]
#[command(name = "ideation", version, about = "Persona-diversified ideation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trait taxonomy and persona descriptions.
    #[command(subcommand)]
    Persona(PersonaCmd),
    /// Plot-idea pools.
    #[command(subcommand)]
    Ideas(IdeasCmd),
    /// Embed texts into a persistent cache.
    Embed(EmbedArgs),
    /// Diversity and linguistic analyses.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Regression, ANOVA and t-tests on raw data.
    #[command(subcommand)]
    Stats(StatsCmd),
    /// Run the experiment HTTP service.
    Serve(ServeArgs),
    /// Talk to a running experiment service as a participant would.
    #[command(subcommand)]
    Session(SessionCmd),
    /// Download the analysis export from a running service.
    Export(ExportArgs),
    /// Write every report table and optional plots to a directory.
    Report(ReportArgs),
}

#[derive(Subcommand)]
pub enum PersonaCmd {
    /// Print the trait taxonomy.
    List,
    /// Sample trait combinations.
    Sample {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value = "Persona")]
        name: String,
    },
    /// Sample a persona and render its description.
    Render {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "Persona")]
        name: String,
        /// `mock` renders from the shipped template; `openai` asks the model.
        #[arg(long, value_enum, default_value_t = ProviderKind::Mock)]
        provider: ProviderKind,
    },
    /// Print the shipped fixture personas.
    Fixtures {
        /// Print the full fixture file instead of a summary.
        #[arg(long)]
        full: bool,
    },
}

#[derive(Args, Clone)]
pub struct GenerationArgs {
    #[arg(long, default_value = ideation_core::ideas::DEFAULT_CHAT_MODEL)]
    pub model: String,
    #[arg(long, default_value_t = 0.9)]
    pub temperature: f64,
    #[arg(long, default_value_t = 1.0)]
    pub top_p: f64,
    #[arg(long, default_value_t = 3)]
    pub retry_budget: u32,
    /// Personas generated concurrently.
    #[arg(long, default_value_t = 4)]
    pub concurrency: usize,
}

#[derive(Subcommand)]
pub enum IdeasCmd {
    /// Generate a pool of plot ideas.
    Generate {
        /// `fixtures`, `sample:N` or a persona TOML file.
        #[arg(long, default_value = "fixtures")]
        personas: String,
        #[arg(long, default_value_t = 30)]
        per_persona: usize,
        #[arg(long, value_enum, default_value_t = ProviderKind::Mock)]
        provider: ProviderKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        generation: GenerationArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Flag near-duplicate ideas by embedding similarity.
    Dedup {
        #[arg(long)]
        pool: PathBuf,
        #[arg(long, value_enum, default_value_t = ProviderKind::Mock)]
        provider: ProviderKind,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long, default_value_t = ideation_core::ideas::DEFAULT_DEDUP_THRESHOLD)]
        threshold: f64,
    },
    /// Validate a pool and write it as CSV or JSON.
    Export {
        #[arg(long)]
        pool: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args)]
pub struct EmbedArgs {
    /// Embed every idea in this pool.
    #[arg(long)]
    pub pool: Option<PathBuf>,
    /// Embed every analysed story in this export.
    #[arg(long)]
    pub export: Option<PathBuf>,
    /// Embed literal texts.
    #[arg(long)]
    pub text: Vec<String>,
    #[arg(long, value_enum, default_value_t = ProviderKind::Mock)]
    pub provider: ProviderKind,
    #[arg(long)]
    pub cache: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CenteringArg {
    None,
    GlobalMean,
    Both,
}

impl CenteringArg {
    pub fn modes(self) -> Vec<Centering> {
        match self {
            CenteringArg::None => vec![Centering::None],
            CenteringArg::GlobalMean => vec![Centering::GlobalMean],
            CenteringArg::Both => vec![Centering::None, Centering::GlobalMean],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    LeaveOneOut,
    Inclusive,
}

impl From<ModeArg> for HomogeneityMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::LeaveOneOut => HomogeneityMode::LeaveOneOut,
            ModeArg::Inclusive => HomogeneityMode::Inclusive,
        }
    }
}

#[derive(Subcommand)]
pub enum AnalyzeCmd {
    /// Intra- and inter-persona similarity of a pool.
    Diversity {
        #[arg(long)]
        pool: PathBuf,
        #[arg(long, value_enum, default_value_t = ProviderKind::Mock)]
        provider: ProviderKind,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CenteringArg::None)]
        centering: CenteringArg,
        /// Directory for the CSV tables; printed to stdout when absent.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Story homogeneity per condition with regression and ANOVA.
    Stories {
        #[arg(long)]
        export: PathBuf,
        #[arg(long, value_enum, default_value_t = ProviderKind::Mock)]
        provider: ProviderKind,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModeArg::LeaveOneOut)]
        mode: ModeArg,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Compare linguistic profiles of two groups of stories.
    Text {
        /// With `--export`, comma-separated conditions; otherwise a file of
        /// stories separated by blank lines.
        #[arg(long)]
        group_a: String,
        #[arg(long)]
        group_b: String,
        #[arg(long)]
        export: Option<PathBuf>,
        #[arg(long, default_value = "Group A")]
        label_a: String,
        #[arg(long, default_value = "Group B")]
        label_b: String,
        /// Welch's t-test instead of the pooled test.
        #[arg(long)]
        welch: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
pub enum StatsCmd {
    /// OLS on group dummies from a `value,group` CSV.
    Regress {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        reference: String,
        #[arg(long, default_value = "Score")]
        dependent: String,
        #[arg(long)]
        json: bool,
    },
    /// One-way ANOVA from a `value,group` CSV.
    Anova {
        #[arg(long)]
        data: PathBuf,
    },
    /// Two-sample t-test on comma-separated lists or two groups of a CSV.
    Ttest {
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        group_a: Option<String>,
        #[arg(long)]
        group_b: Option<String>,
        #[arg(long)]
        welch: bool,
    },
}

#[derive(Args)]
pub struct ServeArgs {
    /// TOML config; `IDEATION_*` environment variables override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long)]
    pub pool: Option<PathBuf>,
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct ServerArgs {
    #[arg(long, env = "IDEATION_SERVER", default_value = "http://127.0.0.1:8080")]
    pub server: String,
}

#[derive(Subcommand)]
pub enum SessionCmd {
    /// Start a session and print its assignment.
    Create(ServerArgs),
    Show {
        id: String,
        #[command(flatten)]
        server: ServerArgs,
    },
    /// Request one plot idea.
    Idea {
        id: String,
        #[command(flatten)]
        server: ServerArgs,
    },
    /// Submit the story from `--text` or `--file`.
    Story {
        id: String,
        #[arg(long)]
        text: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        server: ServerArgs,
    },
    /// Answer the external-AI question: yes, no or other.
    Verify {
        id: String,
        answer: String,
        #[command(flatten)]
        server: ServerArgs,
    },
}

#[derive(Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub server: ServerArgs,
    #[arg(long, env = "IDEATION_ADMIN_TOKEN", hide_env_values = true)]
    pub admin_token: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub pool: Option<PathBuf>,
    #[arg(long)]
    pub export: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ProviderKind::Mock)]
    pub provider: ProviderKind,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CenteringArg::Both)]
    pub centering: CenteringArg,
    #[arg(long, value_enum, default_value_t = ModeArg::LeaveOneOut)]
    pub mode: ModeArg,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Also write an SVG histogram of story similarity.
    #[arg(long)]
    pub plots: bool,
}

async fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Persona(cmd) => commands::persona(cmd).await,
        Command::Ideas(cmd) => commands::ideas(cmd).await,
        Command::Embed(args) => commands::embed(args).await,
        Command::Analyze(cmd) => commands::analyze(cmd).await,
        Command::Stats(cmd) => commands::stats(cmd),
        Command::Serve(args) => commands::serve(args).await,
        Command::Session(cmd) => commands::session(cmd).await,
        Command::Export(args) => commands::export(args).await,
        Command::Report(args) => commands::report(args).await,
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("{}", error::CliError::config(e).to_json());
            return ExitCode::from(2);
        }
    };
    match runtime.block_on(run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.category.exit_code() as u8)
        }
    }
}
