//! The subcommands. Each one reads and writes tables in the output
//! directory, holding its lock for the duration.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use moodcycle_core::geo::LatLon;
use moodcycle_core::lexicon::{build_stemmed_lexicon, parse_raw_lexicon, screen_confound, MoodLexicon};
use moodcycle_core::signal::{circadian_profile, mood_score, relative_frequency, MoodScoreSeries, TermFrequencyMatrix};
use moodcycle_core::stats::{autocorrelation, tcp_test, tmd_test, tpt_test, DaySeriesSet, HourSet, TestReport};
use moodcycle_core::synth::Generator;
use moodcycle_core::textproc::{porter_stem, tokenize};
use moodcycle_core::{Error as CoreError, HOURS_PER_DAY};
use rayon::prelude::*;

use crate::centres::load_centres;
use crate::cli::{Context, Target, TestCommand};
use crate::config::synth_from_toml;
use crate::error::{data, usage, AppError, AppResult};
use crate::ingest::{ingest_files, IngestSettings};
use crate::records::{write_json_record, RecordFormat};
use crate::render::render_profile_svg;
use crate::store::{self, OutputLock};

pub const AGGREGATE: &str = "aggregate";

/// Stem of the first token of `word`.
fn stem_word(word: &str) -> AppResult<String> {
    tokenize(word)
        .first()
        .map(porter_stem)
        .ok_or_else(|| usage(format!("{word:?} contains no letters")))
}

fn load_lexicon(path: &Path) -> AppResult<(MoodLexicon, Vec<String>)> {
    let text = std::fs::read_to_string(path).map_err(AppError::io(path))?;
    let raw = parse_raw_lexicon(&text).map_err(|e| data(format!("{}: {e}", path.display())))?;
    let lexicon = build_stemmed_lexicon(&raw.moods);
    let mut warnings = raw.warnings;
    warnings.extend(lexicon.warnings().iter().cloned());
    Ok((lexicon, warnings))
}

// --- ingest -----------------------------------------------------------------

pub fn ingest(ctx: &Context, inputs: &[PathBuf], format: Option<&str>) -> AppResult<()> {
    let cfg = &ctx.config;
    let windows = cfg.require_seasons()?.to_vec();
    let centres = load_centres(cfg.require_centres()?)?;
    let (lexicon, _) = load_lexicon(cfg.require_lexicon()?)?;
    let format = match format {
        Some(name) => RecordFormat::parse(name).ok_or_else(|| usage(format!("unknown record format {name:?}")))?,
        None => cfg.format,
    };
    for p in inputs {
        if !p.is_file() {
            return Err(usage(format!("{}: no such file", p.display())));
        }
    }
    let mut stems = lexicon.all_stems();
    for c in &cfg.confounds {
        stems.insert(stem_word(&c.term)?);
        stems.insert(stem_word(&c.confound)?);
    }

    let _lock = OutputLock::acquire(&ctx.out)?;
    let settings = IngestSettings {
        centres,
        radius_km: cfg.radius_km,
        windows: windows.clone(),
        stems,
        format,
    };
    let out = ingest_files(inputs, &settings)?;
    for m in &out.matrices {
        store::write_matrix(&store::matrix_path(&ctx.out, m.season_label()), m, ctx.seed)?;
    }
    let metrics = out.stats.metrics(&windows);
    store::write_metrics(&ctx.out.join("ingest_stats.csv"), "ingest_stats", ctx.seed, &metrics)?;
    let rows: Vec<Vec<String>> = out
        .errors
        .iter()
        .map(|e| vec![e.file.display().to_string(), e.error.line.to_string(), e.error.reason.clone()])
        .collect();
    store::write_rows(&ctx.out.join("parse_errors.csv"), "parse_errors", ctx.seed, &["file", "line", "reason"], &rows)?;

    for (k, v) in &metrics {
        println!("{k}: {v}");
    }
    Ok(())
}

// --- score ------------------------------------------------------------------

fn concatenated_frequency(matrices: &[TermFrequencyMatrix], stem: &str) -> AppResult<Vec<Option<f64>>> {
    let mut out = Vec::new();
    for m in matrices {
        let rf = relative_frequency(m, stem).map_err(|_| {
            data(format!(
                "matrix for {} has no column {stem:?}; re-run ingest with the current lexicon",
                m.season_label()
            ))
        })?;
        out.extend(rf);
    }
    Ok(out)
}

pub fn score(ctx: &Context) -> AppResult<()> {
    let cfg = &ctx.config;
    let windows = cfg.require_seasons()?;
    let (mut lexicon, mut warnings) = load_lexicon(cfg.require_lexicon()?)?;
    let _lock = OutputLock::acquire(&ctx.out)?;
    let matrices = windows
        .iter()
        .map(|w| store::read_matrix(&store::matrix_path(&ctx.out, w.label())))
        .collect::<AppResult<Vec<_>>>()?;

    for c in &cfg.confounds {
        let term = stem_word(&c.term)?;
        let confound = stem_word(&c.confound)?;
        let in_mood = lexicon
            .stems(&c.mood)
            .ok_or_else(|| usage(format!("confound screening names unknown mood {:?}", c.mood)))?
            .contains(&term);
        if !in_mood {
            return Err(usage(format!("{:?} (stem {term}) is not a {} term", c.term, c.mood)));
        }
        let outcome = screen_confound(
            &concatenated_frequency(&matrices, &term)?,
            &concatenated_frequency(&matrices, &confound)?,
            c.threshold,
        )
        .map_err(|e| data(format!("screening {term} against {confound}: {e}")))?;
        lexicon.apply_screening(&c.mood, &term, &confound, outcome)?;
    }

    let mut scorable = Vec::new();
    for m in &matrices {
        if m.token_total() == 0 {
            warnings.push(format!("season {} has no tokens and is left out", m.season_label()));
        } else {
            scorable.push(m);
        }
    }
    let moods: Vec<String> = lexicon.moods().map(str::to_string).collect();
    let mut scored = 0;
    let mut term_rows = Vec::new();
    for mood in &moods {
        let result: Result<Vec<MoodScoreSeries>, (String, CoreError)> = scorable
            .iter()
            .map(|m| mood_score(m, &lexicon, mood).map_err(|e| (m.season_label().to_string(), e)))
            .collect();
        let series = match result {
            Ok(s) => s,
            Err((season, e)) => {
                warnings.push(format!("mood {mood} skipped: {e} (season {season})"));
                continue;
            }
        };
        for s in &series {
            for (stem, flag) in &s.term_flags {
                let flag = match flag {
                    moodcycle_core::signal::TermFlag::Active => "active",
                    moodcycle_core::signal::TermFlag::ZeroVariance => "zero-variance",
                };
                term_rows.push(vec![mood.clone(), s.season_label.clone(), stem.clone(), flag.to_string()]);
            }
        }
        let refs: Vec<&MoodScoreSeries> = series.iter().collect();
        let mut profiles = Vec::new();
        for s in &series {
            profiles.push(circadian_profile(&[s], &s.season_label)?);
        }
        if series.len() >= 2 {
            profiles.push(circadian_profile(&refs, AGGREGATE)?);
        }
        for p in &profiles {
            let missing: Vec<String> = p.missing_hours().map(|h| h.to_string()).collect();
            if !missing.is_empty() {
                warnings.push(format!("mood {mood} scope {}: no observations at hours {}", p.scope, missing.join(" ")));
            }
        }
        store::write_series(&store::series_path(&ctx.out, mood), &series, ctx.seed)?;
        store::write_profiles(&store::profile_path(&ctx.out, mood), &profiles, ctx.seed)?;
        scored += 1;
        println!("{mood}: {} stems scored over {} season(s)", series[0].n_terms, series.len());
    }

    let report: Vec<Vec<String>> = moods
        .iter()
        .map(|m| {
            let c = lexicon.counts(m).unwrap_or_default();
            [m.clone()]
                .into_iter()
                .chain([c.raw_words, c.skipped, c.distinct_stems, c.excluded, c.active()].map(|n| n.to_string()))
                .collect()
        })
        .collect();
    store::write_rows(
        &ctx.out.join("lexicon_report.csv"),
        "lexicon_report",
        ctx.seed,
        &["mood", "raw_words", "skipped", "distinct_stems", "excluded", "active"],
        &report,
    )?;
    let exclusions: Vec<Vec<String>> = lexicon
        .screenings()
        .iter()
        .map(|s| {
            vec![
                s.mood.clone(),
                s.stem.clone(),
                store::opt(s.outcome.correlation),
                s.confound_stem.clone(),
                s.outcome.decision.as_str().to_string(),
            ]
        })
        .collect();
    store::write_rows(
        &ctx.out.join("exclusions.csv"),
        "exclusions",
        ctx.seed,
        &["mood", "stem", "correlation", "confound_stem", "decision"],
        &exclusions,
    )?;
    store::write_rows(&ctx.out.join("terms.csv"), "terms", ctx.seed, &["mood", "season", "stem", "flag"], &term_rows)?;
    let warning_rows: Vec<Vec<String>> = warnings.iter().map(|w| vec!["score".to_string(), w.clone()]).collect();
    store::write_rows(&ctx.out.join("warnings.csv"), "warnings", ctx.seed, &["stage", "message"], &warning_rows)?;
    for w in &warnings {
        eprintln!("moodcycle: warning: {w}");
    }
    if scored == 0 {
        return Err(data("no mood is measurable on this corpus"));
    }
    Ok(())
}

// --- analyze ----------------------------------------------------------------

fn scored_moods(dir: &Path) -> AppResult<Vec<String>> {
    let mut moods = BTreeSet::new();
    let entries = std::fs::read_dir(dir).map_err(AppError::io(dir))?;
    for entry in entries {
        let name = entry.map_err(AppError::io(dir))?.file_name();
        let name = name.to_string_lossy();
        if let Some(m) = name.strip_prefix("series_").and_then(|n| n.strip_suffix(".csv")) {
            moods.insert(m.to_string());
        }
    }
    if moods.is_empty() {
        return Err(data(format!("{}: no series files; run score first", dir.display())));
    }
    Ok(moods.into_iter().collect())
}

/// The seasonal series of `mood` selected by `scope`, and the scope name.
fn select_scope(ctx: &Context, mood: &str, scope: Option<&str>) -> AppResult<(Vec<MoodScoreSeries>, String)> {
    let series = store::read_series(&store::series_path(&ctx.out, mood))?;
    let scope = match scope {
        Some(s) => s.to_string(),
        None if series.len() >= 2 => AGGREGATE.to_string(),
        None => series[0].season_label.clone(),
    };
    if scope == AGGREGATE {
        return Ok((series, scope));
    }
    let chosen: Vec<MoodScoreSeries> = series.into_iter().filter(|s| s.season_label == scope).collect();
    if chosen.is_empty() {
        return Err(usage(format!("unknown scope {scope:?} for mood {mood}")));
    }
    Ok((chosen, scope))
}

fn parse_hours(text: &str) -> AppResult<HourSet> {
    HourSet::parse(text).map_err(|e| usage(format!("hour range {text:?}: {e}")))
}

fn save_report(ctx: &Context, r: &TestReport, trace: bool) -> AppResult<()> {
    let stem = store::report_stem(r.test.as_str(), &r.mood, &r.scope);
    store::write_report(&ctx.out.join(format!("report_{stem}.csv")), r)?;
    if trace {
        store::write_trace(&ctx.out.join(format!("trace_{stem}.csv")), r)?;
    }
    println!(
        "{} {} {}: statistic={} p={} ({} of {})",
        r.test,
        r.mood,
        r.scope,
        store::opt(r.statistic),
        store::num(r.p_value()),
        r.exceedances,
        r.iterations
    );
    Ok(())
}

pub fn analyze(ctx: &Context, test: TestCommand) -> AppResult<()> {
    let target = match &test {
        TestCommand::Tcp { target, .. }
        | TestCommand::Tmd { target, .. }
        | TestCommand::Tpt { target, .. }
        | TestCommand::Acf { target, .. } => target.clone(),
    };
    let hour_sets = match &test {
        TestCommand::Tmd { ha, hb, .. } => vec![parse_hours(ha)?, parse_hours(hb)?],
        TestCommand::Tpt { hc, .. } => vec![parse_hours(hc)?],
        _ => Vec::new(),
    };
    let Target { moods, scope, trace } = target;
    let _lock = OutputLock::acquire(&ctx.out)?;
    let moods = if moods.is_empty() { scored_moods(&ctx.out)? } else { moods };
    let cfg = &ctx.config;

    for mood in &moods {
        let (series, scope) = select_scope(ctx, mood, scope.as_deref())?;
        let refs: Vec<&MoodScoreSeries> = series.iter().collect();
        let days = DaySeriesSet::from_series(&refs, &scope)?;
        match &test {
            TestCommand::Tcp { permutations, .. } => {
                let r = tcp_test(&days, permutations.unwrap_or(cfg.permutations), ctx.seed)?;
                save_report(ctx, &r, trace)?;
            }
            TestCommand::Tmd { bootstraps, .. } => {
                let b = bootstraps.unwrap_or(cfg.bootstraps);
                let r = tmd_test(&days, &hour_sets[0], &hour_sets[1], b, ctx.seed)?;
                save_report(ctx, &r, trace)?;
            }
            TestCommand::Tpt { mode, bootstraps, .. } => {
                let b = bootstraps.unwrap_or(cfg.bootstraps);
                let r = tpt_test(&days, &hour_sets[0], (*mode).into(), b, ctx.seed)?;
                save_report(ctx, &r, trace)?;
            }
            TestCommand::Acf { max_lag, .. } => {
                let values: Vec<Option<f64>> = series.iter().flat_map(|s| s.values.iter().copied()).collect();
                let lag = max_lag.unwrap_or(cfg.max_lag);
                let points = autocorrelation(&values, lag)?;
                let path = ctx.out.join(format!("{}.csv", store::report_stem("acf", mood, &scope)));
                store::write_acf(&path, mood, &scope, &points, ctx.seed)?;
                let best = points
                    .iter()
                    .filter(|p| p.r.is_some())
                    .max_by(|a, b| a.r.unwrap().total_cmp(&b.r.unwrap()).then(b.lag.cmp(&a.lag)));
                println!(
                    "acf {mood} {scope}: {} lags, largest r at lag {}",
                    points.len(),
                    best.map_or("-".to_string(), |p| p.lag.to_string())
                );
            }
        }
    }
    Ok(())
}

// --- synth ------------------------------------------------------------------

/// Days generated together before their records are written out.
const SYNTH_BATCH_DAYS: usize = 7;

pub fn synth(ctx: &Context, spec: &Path, records: Option<PathBuf>, seed: Option<u64>) -> AppResult<()> {
    let text = std::fs::read_to_string(spec).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            usage(format!("{}: no such file", spec.display()))
        } else {
            AppError::io(spec)(e)
        }
    })?;
    let fallback: Option<LatLon> = match &ctx.config.centres {
        Some(path) => load_centres(path)?.first().map(|c| c.location),
        None => None,
    };
    let mut config = synth_from_toml(&text, fallback).map_err(|e| usage(format!("{}: {e}", spec.display())))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let generator = Generator::new(&config)?;

    let _lock = OutputLock::acquire(&ctx.out)?;
    let path = records.unwrap_or_else(|| ctx.out.join("corpus.jsonl"));
    let file = File::create(&path).map_err(AppError::io(&path))?;
    let mut out = BufWriter::new(file);
    let (mut n_records, mut n_tokens) = (0u64, 0u64);
    let mut day = 0;
    while day < config.n_days {
        let days = day..(day + SYNTH_BATCH_DAYS).min(config.n_days);
        let cells: Vec<(usize, usize)> = days.flat_map(|d| (0..HOURS_PER_DAY).map(move |h| (d, h))).collect();
        let batch: Vec<Vec<(moodcycle_core::TweetRecord, usize)>> = cells
            .par_iter()
            .map(|&(d, h)| {
                generator
                    .hour(d, h)
                    .iter()
                    .enumerate()
                    .map(|(i, g)| (generator.to_record(d, h, i, g), g.words.len()))
                    .collect()
            })
            .collect();
        for (record, words) in batch.iter().flatten() {
            write_json_record(&mut out, record).map_err(AppError::io(&path))?;
            n_records += 1;
            n_tokens += *words as u64;
        }
        day += SYNTH_BATCH_DAYS;
    }
    out.flush().map_err(AppError::io(&path))?;

    let metrics = vec![
        ("records".to_string(), n_records.to_string()),
        ("tokens".to_string(), n_tokens.to_string()),
        ("n_days".to_string(), config.n_days.to_string()),
        ("seed".to_string(), config.seed.to_string()),
    ];
    store::write_metrics(&ctx.out.join("synth_stats.csv"), "synth_stats", config.seed, &metrics)?;
    println!("wrote {n_records} records ({n_tokens} tokens) to {}", path.display());
    Ok(())
}

// --- render -----------------------------------------------------------------

pub fn render(ctx: &Context, profiles: Vec<PathBuf>, output: Option<PathBuf>) -> AppResult<()> {
    let profiles = if profiles.is_empty() {
        let mut found: Vec<PathBuf> = std::fs::read_dir(&ctx.out)
            .map_err(AppError::io(&ctx.out))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("profile_") && n.ends_with(".csv"))
            })
            .collect();
        found.sort();
        if found.is_empty() {
            return Err(data(format!("{}: no profile tables; run score first", ctx.out.display())));
        }
        found
    } else {
        profiles
    };
    if output.is_some() && profiles.len() != 1 {
        return Err(usage("--output needs exactly one --profile"));
    }
    let _lock = OutputLock::acquire(&ctx.out)?;
    for path in &profiles {
        let table = store::read_profiles(path)?;
        let svg = render_profile_svg(&table);
        let target = match &output {
            Some(o) => o.clone(),
            None => {
                let name = path.file_stem().map_or("profile".into(), |s| s.to_string_lossy().into_owned());
                ctx.out.join(format!("{name}.svg"))
            }
        };
        std::fs::write(&target, svg).map_err(AppError::io(&target))?;
        println!("wrote {}", target.display());
    }
    Ok(())
}

// --- stem -------------------------------------------------------------------

pub fn stem<R: BufRead, W: Write>(input: R, mut output: W) -> AppResult<()> {
    let stdout = Path::new("<stdout>");
    for line in input.lines() {
        let line = line.map_err(AppError::io(Path::new("<stdin>")))?;
        let stems: Vec<String> = tokenize(&line).iter().map(porter_stem).collect();
        writeln!(output, "{}", stems.join(" ")).map_err(AppError::io(stdout))?;
    }
    output.flush().map_err(AppError::io(stdout))
}
