use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use ust_core::estimator::{
    cross_validate, train, EvalReport, Hyperparams, LearningRate, TextField, TrainingDataset,
    VocabularyConfig,
};
use ust_core::miner::{mine_projects, MiningConfig, MiningReport};
use ust_core::recommender::FallbackThresholds;
use ust_core::{analyze, AnalysisResult, Recommender, StoryPointModel};

use crate::config::{model_path, LlmArgs, ServeArgs, ServerConfig};
use crate::error::CliError;
use crate::server::{self, AppState};

#[derive(Debug, Parser)]
#[command(name = "ust", version, about = "User story tutor: readability, story points and recommendations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a story given inline or as a path to a text file
    Analyze(AnalyzeArgs),
    /// Train a story-point model from a CSV or JSON dataset
    Train(TrainArgs),
    /// Mine a dataset from GitLab projects listed in a TOML config
    Mine(MineArgs),
    /// Start the HTTP API
    Serve(ServeCommand),
}

#[derive(Debug, clap::Args)]
pub struct AnalyzeArgs {
    /// Story text, or a path to a file containing it
    pub input: String,
    /// Model file [env: UST_MODEL_PATH] [default: model.ustm]
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Print the result as JSON
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub llm: LlmArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TextFieldArg {
    Description,
    TitleAndDescription,
}

impl From<TextFieldArg> for TextField {
    fn from(arg: TextFieldArg) -> Self {
        match arg {
            TextFieldArg::Description => TextField::Description,
            TextFieldArg::TitleAndDescription => TextField::TitleAndDescription,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct TrainArgs {
    /// Dataset file (.csv with title,description,weight columns, or .json)
    pub dataset: PathBuf,
    /// Cross-validation folds; 0 skips evaluation
    #[arg(long, default_value_t = 5)]
    pub k_folds: usize,
    /// Where to write the trained model
    #[arg(long, short, default_value = "model.ustm")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "description")]
    pub text_field: TextFieldArg,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 0.01)]
    pub lr_decay: f64,
    #[arg(long, default_value_t = 1)]
    pub min_df: usize,
    #[arg(long)]
    pub max_features: Option<usize>,
    /// Print the evaluation report as JSON
    #[arg(long)]
    pub json: bool,
}

impl TrainArgs {
    fn hyperparams(&self) -> Hyperparams {
        Hyperparams {
            c: self.c,
            epsilon: self.epsilon,
            learning_rate: LearningRate { initial: self.learning_rate, decay: self.lr_decay },
            epochs: self.epochs,
            seed: self.seed,
            vocabulary: VocabularyConfig { min_df: self.min_df, max_features: self.max_features },
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct MineArgs {
    /// Mining config (TOML)
    pub config: PathBuf,
    /// Print the report as JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, clap::Args)]
pub struct ServeCommand {
    /// Server config (TOML); flags and environment override it
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub args: ServeArgs,
}

pub async fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(args) => run_analyze(args, out).await,
        Command::Train(args) => run_train(args, out),
        Command::Mine(args) => run_mine(args, out).await,
        Command::Serve(cmd) => run_serve(cmd).await,
    }
}

fn load_model(path: &Path) -> Result<StoryPointModel, CliError> {
    StoryPointModel::load(path).map_err(|e| CliError::Model(e.to_string()))
}

async fn run_analyze(args: AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let as_path = Path::new(&args.input);
    let text = if as_path.is_file() {
        std::fs::read_to_string(as_path)?
    } else {
        args.input.clone()
    };
    if text.trim().is_empty() {
        return Err(CliError::EmptyText);
    }
    let model = load_model(&model_path(args.model.as_deref()))?;
    let recommender = Recommender::new(args.llm.resolve(None)?, FallbackThresholds::default());
    let result = analyze(&text, &model, &recommender).await?;

    if args.json {
        serde_json::to_writer_pretty(&mut *out, &result).map_err(std::io::Error::from)?;
        writeln!(out)?;
    } else {
        write_analysis(out, &result)?;
    }
    Ok(())
}

pub fn write_analysis(out: &mut dyn Write, r: &AnalysisResult) -> std::io::Result<()> {
    let rd = &r.readability;
    writeln!(out, "Readability")?;
    writeln!(out, "  Gunning Fog            {:>8.2}", rd.gunning_fog)?;
    writeln!(out, "  Flesch Reading Ease    {:>8.2}", rd.flesch_reading_ease)?;
    writeln!(out, "  Coleman-Liau           {:>8.2}", rd.coleman_liau)?;
    writeln!(out, "  Automated Readability  {:>8.2}", rd.automated_readability)?;
    writeln!(out, "  Final Result           {:>8.2}", rd.final_result)?;
    writeln!(out)?;
    writeln!(out, "Estimate")?;
    writeln!(out, "  Story points           {:>8.2}", r.story_points)?;
    writeln!(out)?;
    let source = match r.recommendation.source {
        ust_core::RecommendationSource::RemoteLlm => "remote-llm",
        ust_core::RecommendationSource::OfflineHeuristic => "offline-heuristic",
    };
    writeln!(out, "Recommendation ({source})")?;
    for line in r.recommendation.text.lines() {
        writeln!(out, "  {line}")?;
    }
    Ok(())
}

fn run_train(args: TrainArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let dataset =
        TrainingDataset::load(&args.dataset, args.text_field.into()).map_err(CliError::from_dataset)?;
    let hyperparams = args.hyperparams();

    let report = match args.k_folds {
        0 => None,
        k => Some(cross_validate(&dataset, k, &hyperparams, hyperparams.seed).map_err(CliError::from_training)?),
    };
    let model = train(&dataset, &hyperparams).map_err(CliError::from_training)?;
    model.save(&args.out).map_err(|e| CliError::Model(e.to_string()))?;

    if args.json {
        let doc = serde_json::json!({
            "model": args.out,
            "examples": dataset.len(),
            "vocabulary_size": model.vocabulary().len(),
            "evaluation": report,
        });
        serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::from)?;
        writeln!(out)?;
    } else {
        writeln!(
            out,
            "trained on {} stories, vocabulary {} terms",
            dataset.len(),
            model.vocabulary().len()
        )?;
        if let Some(report) = &report {
            write_eval(out, report)?;
        }
        writeln!(out, "model written to {}", args.out.display())?;
    }
    Ok(())
}

pub fn write_eval(out: &mut dyn Write, report: &EvalReport) -> std::io::Result<()> {
    writeln!(out, "fold  MAE       baseline MAE")?;
    for (i, (mae, base)) in report.fold_mae.iter().zip(&report.baseline_fold_mae).enumerate() {
        writeln!(out, "{:>4}  {mae:>8.4}  {base:>8.4}", i + 1)?;
    }
    writeln!(out, "mean  {:>8.4}  {:>8.4}", report.mean_mae, report.baseline_mae)?;
    Ok(())
}

async fn run_mine(args: MineArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = MiningConfig::from_toml_file(&args.config)?;
    let report: MiningReport = mine_projects(&config).await?;
    if args.json {
        serde_json::to_writer_pretty(&mut *out, &report).map_err(std::io::Error::from)?;
        writeln!(out)?;
    } else {
        write!(out, "{}", report.summary)?;
        for f in &report.failures {
            writeln!(out, "failed {}: {}", f.project, f.error)?;
        }
    }
    if report.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mining(format!("{} project(s) failed", report.failures.len())))
    }
}

async fn run_serve(cmd: ServeCommand) -> Result<(), CliError> {
    let config = ServerConfig::resolve(cmd.config.as_deref(), &cmd.args)?;
    let model = load_model(&config.model_path)?;
    let recommender = Recommender::new(config.recommender.clone(), config.fallback);
    let state = Arc::new(AppState::new(Some(model), recommender));

    let listener = tokio::net::TcpListener::bind(config.bind)
        .await
        .map_err(|e| CliError::Server(format!("cannot bind {}: {e}", config.bind)))?;
    log::info!("listening on {}", listener.local_addr()?);
    server::serve(listener, state, config.body_limit, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
    .map_err(|e| CliError::Server(e.to_string()))
}
