//! The ingest → annotate → analyze pipeline.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};

use gi_core::chess::analyze::{
    analyze_game, AnalyzeError, AnalyzeOptions, MissingEvalPolicy, UnfinishedPolicy,
};
use gi_core::chess::dataset;
use gi_core::chess::filter::{filter_games, FilterSpec};
use gi_core::chess::pgn::{parse_pgn, GameRecord};
use gi_core::engine::{EngineConfig, EnginePool};
use gi_core::metrics::PlayerColor;
use gi_core::reward::RewardScheme;
use gi_core::wdl::{EloRating, EvalModel, EvalModelParams};

use crate::config::{resolve, ConfigFile, Provenance};
use crate::metrics_csv::{write_metrics, MetricsLine};

#[allow(clippy::too_many_arguments)]
pub fn ingest(
    config: &ConfigFile,
    inputs: &[PathBuf],
    output: &Path,
    min_elo: Option<u32>,
    allow_all: bool,
    players: Vec<String>,
    extra_keywords: Vec<String>,
    exclusion_report: Option<&Path>,
) -> Result<()> {
    let mut spec = if allow_all { FilterSpec::permissive() } else { FilterSpec::default() };
    if let Some(floor) = min_elo.or(config.get_parsed("filter.min_elo")?) {
        spec.min_elo = Some(floor);
    }
    spec.player_allowlist = players;
    spec.excluded_keywords.extend(extra_keywords);

    let mut games = Vec::new();
    let mut diagnostics = Vec::new();
    for path in inputs {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let report = parse_pgn(BufReader::new(file))
            .with_context(|| format!("parsing {}", path.display()))?;
        games.extend(report.games);
        diagnostics.extend(report.diagnostics);
    }
    let parsed = games.len();

    let filtered = filter_games(games, &spec);
    let out = File::create(output).with_context(|| format!("creating {}", output.display()))?;
    dataset::write_records(&filtered.kept, BufWriter::new(out))?;

    if let Some(path) = exclusion_report {
        let mut f = BufWriter::new(File::create(path)?);
        for d in &diagnostics {
            writeln!(f, "{}", serde_json::json!({"kind": "parse", "game": d.game_index, "line": d.line, "message": d.message}))?;
        }
        for e in &filtered.excluded {
            writeln!(f, "{}", serde_json::json!({"kind": "filter", "game": e.game_index + 1, "reason": e.reason}))?;
        }
    }

    println!(
        "ingest: parsed {parsed} games ({} malformed), kept {}, excluded {}",
        diagnostics.len(),
        filtered.kept.len(),
        filtered.excluded.len()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn annotate(
    config: &ConfigFile,
    input: &Path,
    output: &Path,
    engine_path: Option<PathBuf>,
    engine_args: Vec<String>,
    depth: Option<u32>,
    engine_threads: Option<u32>,
    pool: Option<usize>,
) -> Result<()> {
    let path = engine_path
        .or_else(|| config.get("engine.path").map(PathBuf::from))
        .or_else(|| std::env::var_os("GI_ENGINE_PATH").map(PathBuf::from))
        .context("no engine: pass --engine-path, set engine.path, or export GI_ENGINE_PATH")?;

    let mut engine_config = EngineConfig::new(path);
    engine_config.args = engine_args;
    engine_config.depth = resolve(depth, config.get_parsed("engine.depth")?, 20);
    engine_config.pool_size = resolve(pool, config.get_parsed("engine.pool")?, 1);
    if let Some(timeout) = config.get_parsed::<u64>("engine.position_timeout_secs")? {
        engine_config.position_timeout = Duration::from_secs(timeout);
    }
    if let Some(threads) = engine_threads.or(config.get_parsed("engine.threads")?) {
        engine_config.options.push(("Threads".into(), threads.to_string()));
    }

    let reader = BufReader::new(File::open(input)?);
    let mut records: Vec<GameRecord> =
        dataset::read_records(reader).collect::<Result<_, _>>()?;

    let mut pool = EnginePool::start(engine_config)?;
    let mut filled = 0usize;
    let mut cache_hits = 0usize;
    let mut failures = 0usize;
    for record in records.iter_mut() {
        let report = pool.annotate_game(record)?;
        filled += report.filled.len();
        cache_hits += report.cache_hits.len();
        failures += report.failures.len();
        for (ply, message) in &report.failures {
            eprintln!(
                "{}",
                serde_json::json!({"kind": "annotate-failure", "ply": ply, "message": message})
            );
        }
    }

    let out = File::create(output)?;
    dataset::write_records(&records, BufWriter::new(out))?;
    println!("annotate: filled {filled} evals ({cache_hits} from cache), {failures} failures");
    Ok(())
}

pub struct AnalyzeFlags {
    pub wdl_model: Option<String>,
    pub root_eval_cp: Option<i32>,
    pub missing_eval_skip: bool,
    pub unfinished_egi_only: bool,
    pub skip_opening: usize,
    pub accuracy_skip_lost: bool,
    pub reward_win: Option<f64>,
    pub reward_draw: Option<f64>,
    pub workers: usize,
    pub mate_cap: Option<f64>,
    pub draw_dmax: Option<f64>,
    pub draw_tau: Option<f64>,
    pub logistic_k: Option<f64>,
}

pub fn analyze(config: &ConfigFile, input: &Path, output: &Path, flags: AnalyzeFlags) -> Result<()> {
    let model_kind = flags
        .wdl_model
        .or_else(|| config.get("wdl.model").map(str::to_string))
        .unwrap_or_else(|| "engine".to_string());
    if model_kind != "engine" && model_kind != "human" {
        bail!("wdl.model must be `engine` or `human`, got `{model_kind}`");
    }

    let mut params = EvalModelParams::default();
    params.mate_cap = resolve(flags.mate_cap, config.get_parsed("wdl.mate_cap")?, params.mate_cap);
    params.draw.d_max =
        resolve(flags.draw_dmax, config.get_parsed("wdl.draw.d_max")?, params.draw.d_max);
    params.draw.tau = resolve(flags.draw_tau, config.get_parsed("wdl.draw.tau")?, params.draw.tau);
    params.logistic_k =
        resolve(flags.logistic_k, config.get_parsed("wdl.logistic_k")?, params.logistic_k);

    if params.mate_cap.is_nan() || params.mate_cap <= 100.0 {
        bail!("wdl.mate_cap must exceed 100 (the ordinary-eval cap sits 100 below it), got {}", params.mate_cap);
    }
    if params.draw.tau.is_nan() || params.draw.tau <= 0.0 {
        bail!("wdl.draw.tau must be positive, got {}", params.draw.tau);
    }
    if !(0.0..=1.0).contains(&params.draw.d_max) {
        bail!("wdl.draw.d_max must lie in [0, 1], got {}", params.draw.d_max);
    }
    if params.logistic_k.is_nan() || params.logistic_k <= 0.0 {
        bail!("wdl.logistic_k must be positive, got {}", params.logistic_k);
    }

    let reward_win = resolve(flags.reward_win, config.get_parsed("reward.win")?, 1.0);
    let reward_draw = resolve(flags.reward_draw, config.get_parsed("reward.draw")?, 0.5);
    let scheme = RewardScheme::chess_with(reward_win, reward_draw);

    let options = AnalyzeOptions {
        root_eval_cp: resolve(flags.root_eval_cp, config.get_parsed("analyze.root_eval_cp")?, 0),
        missing_eval: if flags.missing_eval_skip {
            MissingEvalPolicy::Skip
        } else {
            MissingEvalPolicy::Error
        },
        unfinished: if flags.unfinished_egi_only {
            UnfinishedPolicy::EgiOnly
        } else {
            UnfinishedPolicy::Skip
        },
        skip_opening: flags.skip_opening,
        accuracy_skip_lost: flags.accuracy_skip_lost,
    };

    let reader = BufReader::new(File::open(input)?);
    let records: Vec<GameRecord> = dataset::read_records(reader).collect::<Result<_, _>>()?;

    let model_for = |record: &GameRecord| -> Result<EvalModel> {
        if model_kind == "engine" {
            Ok(EvalModel::Engine { params })
        } else {
            let white = record
                .elo(PlayerColor::White)
                .with_context(|| format!("human model needs WhiteElo ({})", record.white()))?;
            let black = record
                .elo(PlayerColor::Black)
                .with_context(|| format!("human model needs BlackElo ({})", record.black()))?;
            Ok(EvalModel::human_from_elos(
                EloRating::new(white as f64)?,
                EloRating::new(black as f64)?,
                params,
            ))
        }
    };

    // index-ordered parallel analysis: output order is input order
    let workers = flags.workers.max(1);
    let mut results: Vec<Option<Result<_, AnalyzeError>>> = Vec::new();
    results.resize_with(records.len(), || None);
    {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots = std::sync::Mutex::new(&mut results);
        std::thread::scope(|scope| -> Result<()> {
            let mut handles = Vec::new();
            for _ in 0..workers {
                let next = &next;
                let slots = &slots;
                let records = &records;
                let scheme = &scheme;
                let model_for = &model_for;
                let options = &options;
                handles.push(scope.spawn(move || -> Result<()> {
                    loop {
                        let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                        if i >= records.len() {
                            return Ok(());
                        }
                        let model = model_for(&records[i])?;
                        let outcome = analyze_game(&records[i], &model, scheme, options);
                        slots.lock().expect("no poisoned locks")[i] = Some(outcome);
                    }
                }));
            }
            for h in handles {
                h.join().expect("analysis worker panicked")?;
            }
            Ok(())
        })?;
    }

    let mut lines = Vec::new();
    let mut skipped_unfinished = 0usize;
    let mut skipped_plies = 0usize;
    for (i, outcome) in results.into_iter().enumerate() {
        match outcome.expect("every game analyzed") {
            Ok(analysis) => {
                skipped_plies += analysis.skipped_plies.len();
                if let Some(mismatch) = &analysis.result_mismatch {
                    eprintln!(
                        "{}",
                        serde_json::json!({"kind": "result-mismatch", "game": i + 1, "message": mismatch})
                    );
                }
                lines.push(MetricsLine { game: i + 1, row: analysis.white });
                lines.push(MetricsLine { game: i + 1, row: analysis.black });
            }
            Err(AnalyzeError::Unfinished) => skipped_unfinished += 1,
            Err(e) => bail!("game {}: {e}", i + 1),
        }
    }

    let mut provenance = Provenance::new("analyze");
    provenance
        .set("wdl.model", &model_kind)
        .set("wdl.mate_cap", params.mate_cap)
        .set("wdl.draw.d_max", params.draw.d_max)
        .set("wdl.draw.tau", params.draw.tau)
        .set("wdl.logistic_k", params.logistic_k)
        .set("reward.win", reward_win)
        .set("reward.draw", reward_draw)
        .set("analyze.root_eval_cp", options.root_eval_cp)
        .set("analyze.skip_opening", options.skip_opening)
        .set("analyze.accuracy_skip_lost", options.accuracy_skip_lost)
        .set("analyze.on_missing_eval", if flags.missing_eval_skip { "skip" } else { "error" })
        .set("analyze.unfinished", if flags.unfinished_egi_only { "egi-only" } else { "skip" })
        .set("games.skipped_unfinished", skipped_unfinished)
        .set("plies.skipped", skipped_plies);

    std::fs::write(output, write_metrics(&lines, &provenance.lines()))?;
    println!(
        "analyze: {} games -> {} rows ({} unfinished skipped)",
        records.len(),
        lines.len(),
        skipped_unfinished
    );
    Ok(())
}
