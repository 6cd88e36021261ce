//! `gi` — game-intelligence analysis over PGN corpora plus a synthetic
//! game lab.
//!
//! Each output artifact has exactly one producing subcommand: `ingest`,
//! `annotate`, `analyze`, `report`, `compare`, `tpr`, `hist`, `lab`.

mod commands;
mod config;
mod metrics_csv;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "gi", version, about = "Game-intelligence metrics over chess games")]
struct Cli {
    /// key=value config file; flags win over config values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Md,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WdlModelKind {
    Engine,
    Human,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MissingEvalFlag {
    Error,
    Skip,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnfinishedFlag {
    Skip,
    EgiOnly,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AggregateFlag {
    Mean,
    Median,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ColorFlag {
    White,
    Black,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricFlag {
    Gi,
    Gpl,
}

#[derive(Subcommand)]
enum Command {
    /// Parse PGN files into a dataset, applying the game filter
    Ingest {
        /// PGN input path (repeatable)
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
        /// Dataset output (JSONL)
        #[arg(long)]
        output: PathBuf,
        /// Rating floor for both players
        #[arg(long)]
        min_elo: Option<u32>,
        /// Disable all filtering
        #[arg(long)]
        allow_all: bool,
        /// Keep only games involving these players (repeatable)
        #[arg(long = "player")]
        players: Vec<String>,
        /// Additional excluded Event/Site keyword (repeatable)
        #[arg(long = "exclude-keyword")]
        exclude_keywords: Vec<String>,
        /// Write the exclusion report here (JSONL)
        #[arg(long)]
        exclusion_report: Option<PathBuf>,
    },
    /// Fill missing evaluations by running a UCI engine
    Annotate {
        /// Dataset input (JSONL)
        #[arg(long)]
        input: PathBuf,
        /// Dataset output (JSONL)
        #[arg(long)]
        output: PathBuf,
        /// Engine executable (default: $GI_ENGINE_PATH)
        #[arg(long)]
        engine_path: Option<PathBuf>,
        /// Extra engine argv entry (repeatable)
        #[arg(long = "engine-arg")]
        engine_args: Vec<String>,
        /// Search depth
        #[arg(long)]
        depth: Option<u32>,
        /// Engine Threads option
        #[arg(long)]
        engine_threads: Option<u32>,
        /// Number of engine processes
        #[arg(long)]
        pool: Option<usize>,
    },
    /// Compute per-game, per-player metrics from an annotated dataset
    Analyze {
        /// Dataset input (JSONL)
        #[arg(long)]
        input: PathBuf,
        /// Metrics output (CSV)
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum)]
        wdl_model: Option<WdlModelKind>,
        /// Eval of the initial position in centipawns
        #[arg(long)]
        root_eval_cp: Option<i32>,
        #[arg(long, value_enum, default_value = "error")]
        on_missing_eval: MissingEvalFlag,
        #[arg(long, value_enum, default_value = "skip")]
        unfinished: UnfinishedFlag,
        /// Drop each player's first N moves
        #[arg(long, default_value_t = 0)]
        skip_opening: usize,
        /// Drop lost plies from accuracy instead of erroring
        #[arg(long)]
        accuracy_skip_lost: bool,
        /// Reward for a win
        #[arg(long)]
        reward_win: Option<f64>,
        /// Reward for a draw
        #[arg(long)]
        reward_draw: Option<f64>,
        /// Parallel analysis workers
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        mate_cap: Option<f64>,
        #[arg(long)]
        draw_dmax: Option<f64>,
        #[arg(long)]
        draw_tau: Option<f64>,
        #[arg(long)]
        logistic_k: Option<f64>,
    },
    /// Summary tables (means or medians) from a metrics file
    Report {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "mean")]
        aggregate: AggregateFlag,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Pairwise one-sided Mann-Whitney matrix (GI above, GPL below)
    Compare {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Comma-separated row/column order (default: descending mean GI)
        #[arg(long)]
        players: Option<String>,
        /// Restrict to games played as this color
        #[arg(long, value_enum)]
        color: Option<ColorFlag>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Tournament performance ratings from a results file
    Tpr {
        /// CSV with header player,opponent_elo,score
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Histogram of a metric as plottable CSV
    Hist {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Restrict to one player
        #[arg(long)]
        player: Option<String>,
        #[arg(long, value_enum, default_value = "gi")]
        metric: MetricFlag,
        #[arg(long, default_value_t = 0.25)]
        bin_width: f64,
        /// Restrict to games played as this color
        #[arg(long, value_enum)]
        color: Option<ColorFlag>,
    },
    /// Verify the theory's properties on random synthetic games
    Lab {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Games per property
        #[arg(long, default_value_t = 100)]
        games: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        branch: usize,
        /// gi | linear:a,b,d | gpl-only | reward-only
        #[arg(long, default_value = "gi")]
        mechanism: String,
        /// Gaming-proofness node scenarios
        #[arg(long, default_value_t = 500)]
        scenarios: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    let command_name = command_name(&cli.command);
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            let summary = serde_json::json!({
                "command": command_name,
                "error": format!("{err:#}"),
            });
            eprintln!("{summary}");
            std::process::exit(1);
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Ingest { .. } => "ingest",
        Command::Annotate { .. } => "annotate",
        Command::Analyze { .. } => "analyze",
        Command::Report { .. } => "report",
        Command::Compare { .. } => "compare",
        Command::Tpr { .. } => "tpr",
        Command::Hist { .. } => "hist",
        Command::Lab { .. } => "lab",
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = config::ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest {
            input,
            output,
            min_elo,
            allow_all,
            players,
            exclude_keywords,
            exclusion_report,
        } => commands::pipeline::ingest(
            &config,
            &input,
            &output,
            min_elo,
            allow_all,
            players,
            exclude_keywords,
            exclusion_report.as_deref(),
        ),
        Command::Annotate { input, output, engine_path, engine_args, depth, engine_threads, pool } => {
            commands::pipeline::annotate(
                &config,
                &input,
                &output,
                engine_path,
                engine_args,
                depth,
                engine_threads,
                pool,
            )
        }
        Command::Analyze {
            input,
            output,
            wdl_model,
            root_eval_cp,
            on_missing_eval,
            unfinished,
            skip_opening,
            accuracy_skip_lost,
            reward_win,
            reward_draw,
            workers,
            mate_cap,
            draw_dmax,
            draw_tau,
            logistic_k,
        } => commands::pipeline::analyze(
            &config,
            &input,
            &output,
            commands::pipeline::AnalyzeFlags {
                wdl_model: wdl_model.map(|m| match m {
                    WdlModelKind::Engine => "engine".to_string(),
                    WdlModelKind::Human => "human".to_string(),
                }),
                root_eval_cp,
                missing_eval_skip: on_missing_eval == MissingEvalFlag::Skip,
                unfinished_egi_only: unfinished == UnfinishedFlag::EgiOnly,
                skip_opening,
                accuracy_skip_lost,
                reward_win,
                reward_draw,
                workers,
                mate_cap,
                draw_dmax,
                draw_tau,
                logistic_k,
            },
        ),
        Command::Report { metrics, output, aggregate, format } => commands::reports::report(
            &metrics,
            &output,
            match aggregate {
                AggregateFlag::Mean => gi_core::stats::Aggregate::Mean,
                AggregateFlag::Median => gi_core::stats::Aggregate::Median,
            },
            format == OutputFormat::Md,
        ),
        Command::Compare { metrics, output, players, color, format } => commands::reports::compare(
            &metrics,
            &output,
            players,
            color.map(|c| match c {
                ColorFlag::White => gi_core::metrics::PlayerColor::White,
                ColorFlag::Black => gi_core::metrics::PlayerColor::Black,
            }),
            format == OutputFormat::Md,
        ),
        Command::Tpr { input, output } => commands::reports::tpr(&input, &output),
        Command::Hist { metrics, output, player, metric, bin_width, color } => {
            commands::reports::hist(
                &metrics,
                &output,
                player,
                metric == MetricFlag::Gpl,
                bin_width,
                color.map(|c| match c {
                    ColorFlag::White => gi_core::metrics::PlayerColor::White,
                    ColorFlag::Black => gi_core::metrics::PlayerColor::Black,
                }),
            )
        }
        Command::Lab { seed, games, depth, branch, mechanism, scenarios } => {
            commands::lab::run(seed, games, depth, branch, &mechanism, scenarios)
        }
    }
}
