mod common;

use std::path::{Path, PathBuf};

use chrono::{DateTime, Timelike};
use common::*;
use moodcycle_core::signal::{circadian_profile, mood_score, TermFrequencyMatrix};
use moodcycle_core::synth::Generator;
use moodcycle_core::lexicon::MoodLexicon;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use tempfile::TempDir;

struct Run {
    dir: TempDir,
    config: PathBuf,
    out: PathBuf,
}

impl Run {
    fn new(lexicon: &Path) -> Run {
        let dir = tempfile::tempdir().unwrap();
        let config = write_run_config(dir.path(), lexicon, "");
        let out = dir.path().join("out");
        Run { dir, config, out }
    }

    fn args<'a>(&'a self, rest: &[&'a str]) -> Vec<&'a str> {
        let mut v = vec!["--config", s(&self.config), "--out", s(&self.out)];
        v.extend_from_slice(rest);
        v
    }

    fn ok(&self, rest: &[&str]) -> String {
        String::from_utf8(ok(&self.args(rest)).stdout).unwrap()
    }

    fn code(&self, rest: &[&str]) -> i32 {
        moodcycle(&self.args(rest)).status.code().unwrap()
    }

    fn file(&self, name: &str) -> String {
        std::fs::read_to_string(self.out.join(name)).unwrap()
    }

    /// Synthesize `n_days` at `rate` and ingest the result.
    fn synth_and_ingest(&self, n_days: usize, rate: f64) {
        let spec = write_synth_spec(self.dir.path(), n_days, rate);
        self.ok(&["synth", "--spec", s(&spec)]);
        self.ok(&["ingest", s(&self.out.join("corpus.jsonl"))]);
    }
}

fn metric(table: &str, key: &str) -> String {
    table
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("{key} missing from {table}"))
        .to_string()
}

/// Data rows of a table: comment and header skipped.
fn rows(table: &str) -> Vec<Vec<String>> {
    table
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn usage_errors_exit_1() {
    let run = Run::new(&data("lexicon.txt"));
    assert_eq!(moodcycle(&["--no-such-flag"]).status.code(), Some(1));
    assert_eq!(moodcycle(&["--config", "/nonexistent/run.toml", "score"]).status.code(), Some(1));
    let corpus = run.dir.path().join("empty.jsonl");
    std::fs::write(&corpus, "").unwrap();
    assert_eq!(run.code(&["ingest", s(&corpus), "--format", "xml"]), 1);
    assert_eq!(run.code(&["analyze", "tmd", "--ha", "25", "--hb", "1"]), 1);
    assert_eq!(moodcycle(&["--help"]).status.code(), Some(0));
}

#[test]
fn empty_and_out_of_window_corpora_exit_2() {
    let run = Run::new(&data("lexicon.txt"));
    let empty = run.dir.path().join("empty.jsonl");
    std::fs::write(&empty, "\n").unwrap();
    let out = moodcycle(&run.args(&["ingest", s(&empty)]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no records"));

    let early = run.dir.path().join("early.jsonl");
    std::fs::write(
        &early,
        r#"{"id":"1","created_at":"2009-01-01T10:00:00Z","lat":51.5074,"lon":-0.1278,"text":"happy"}"#,
    )
    .unwrap();
    let out = moodcycle(&run.args(&["ingest", s(&early)]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no records in any window"));
}

#[test]
fn missing_stage_input_exits_2() {
    let run = Run::new(&data("lexicon.txt"));
    std::fs::create_dir_all(&run.out).unwrap();
    let out = moodcycle(&run.args(&["score"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("run the earlier stage first"));
}

#[test]
fn held_lock_exits_2() {
    let run = Run::new(&data("lexicon.txt"));
    std::fs::create_dir_all(&run.out).unwrap();
    std::fs::write(run.out.join(".moodcycle.lock"), "").unwrap();
    let spec = write_synth_spec(run.dir.path(), 2, 5.0);
    assert_eq!(run.code(&["synth", "--spec", s(&spec)]), 2);
    std::fs::remove_file(run.out.join(".moodcycle.lock")).unwrap();
    run.ok(&["synth", "--spec", s(&spec)]);
    assert!(!run.out.join(".moodcycle.lock").exists());
}

#[test]
fn ingest_totals_match_generator_tokens() {
    let run = Run::new(&data("lexicon.txt"));
    run.synth_and_ingest(7, 30.0);
    let synth = run.file("synth_stats.csv");
    let ingest = run.file("ingest_stats.csv");
    assert_eq!(metric(&synth, "tokens"), metric(&ingest, "tokens"));
    assert_eq!(metric(&synth, "records"), metric(&ingest, "binned"));
    assert_eq!(metric(&ingest, "rejected"), "0");

    let matrix = run.file("matrix_summer2011.csv");
    let total: u64 = rows(&matrix).iter().map(|r| r[3].parse::<u64>().unwrap()).sum();
    assert_eq!(total.to_string(), metric(&synth, "tokens"));
}

#[test]
fn synth_is_reproducible_and_seed_sensitive() {
    let a = Run::new(&data("lexicon.txt"));
    let spec = write_synth_spec(a.dir.path(), 3, 20.0);
    a.ok(&["synth", "--spec", s(&spec), "--records", s(&a.dir.path().join("one.jsonl"))]);
    a.ok(&["synth", "--spec", s(&spec), "--records", s(&a.dir.path().join("two.jsonl"))]);
    a.ok(&["--seed", "99", "synth", "--spec", s(&spec), "--records", s(&a.dir.path().join("three.jsonl"))]);
    let read = |n: &str| std::fs::read(a.dir.path().join(n)).unwrap();
    assert_eq!(read("one.jsonl"), read("two.jsonl"));
    assert_ne!(read("one.jsonl"), read("three.jsonl"));
}

#[test]
fn single_mood_lexicon_gives_one_series() {
    let dir = tempfile::tempdir().unwrap();
    let lexicon = dir.path().join("joy.txt");
    std::fs::write(&lexicon, "[joy]\nhappy\nglad\nlovely\nsmile\nlaugh\n").unwrap();
    let run = Run::new(&lexicon);
    run.synth_and_ingest(7, 30.0);
    run.ok(&["score"]);
    let series: Vec<String> = std::fs::read_dir(&run.out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("series_"))
        .collect();
    assert_eq!(series, ["series_joy.csv"]);
}

#[test]
fn two_seasons_give_three_profile_scopes() {
    let run = Run::new(&data("lexicon.txt"));
    let extra = "[[season]]\nlabel = \"winter2010\"\nstart = 2010-12-06\nend = 2010-12-19\n";
    let text = std::fs::read_to_string(&run.config).unwrap();
    std::fs::write(&run.config, text.replace("[[season]]", &format!("{extra}\n[[season]]"))).unwrap();

    let summer = write_synth_spec(run.dir.path(), 14, 30.0);
    let winter = run.dir.path().join("winter.toml");
    let text = std::fs::read_to_string(&summer).unwrap();
    std::fs::write(&winter, text.replace("2011-06-06", "2010-12-06")).unwrap();
    let summer_file = run.dir.path().join("summer.jsonl");
    let winter_file = run.dir.path().join("winter.jsonl");
    run.ok(&["synth", "--spec", s(&summer), "--records", s(&summer_file)]);
    run.ok(&["synth", "--spec", s(&winter), "--records", s(&winter_file)]);
    run.ok(&["ingest", s(&winter_file), s(&summer_file)]);
    run.ok(&["score"]);

    let profile = run.file("profile_joy.csv");
    let mut scopes: Vec<String> = rows(&profile).into_iter().map(|r| r[1].clone()).collect();
    scopes.dedup();
    assert_eq!(scopes, ["winter2010", "summer2011", "aggregate"]);
    let aggregate_obs: Vec<String> =
        rows(&profile).into_iter().filter(|r| r[1] == "aggregate").map(|r| r[5].clone()).collect();
    assert!(aggregate_obs.iter().all(|n| n == "28"));

    let report = run.ok(&["analyze", "tcp", "--mood", "joy"]);
    assert!(report.contains("joy aggregate"), "{report}");
    run.ok(&["analyze", "tcp", "--mood", "joy", "--scope", "winter2010"]);
    assert!(run.out.join("report_tcp_joy_winter2010.csv").exists());
}

#[test]
fn identical_days_have_zero_sem() {
    let lexicon = MoodLexicon::from_stem_sets([("joy", ["happi", "glad"])]);
    let stems = lexicon.all_stems();
    let mut m = TermFrequencyMatrix::new("s", 5, stems);
    for day in 0..5 {
        for hour in 0..24 {
            let words = ["happy"; 3].into_iter().take(hour % 3 + 1).chain(["glad"; 2].into_iter().take(hour % 2 + 1));
            m.add_tokens(day, hour, words.chain(["the"; 10]));
        }
    }
    let series = mood_score(&m, &lexicon, "joy").unwrap();
    let profile = circadian_profile(&[&series], "s").unwrap();
    assert!(profile.sem.iter().all(|&v| v == 0.0), "{:?}", profile.sem);
    assert!(profile.n_obs.iter().all(|&n| n == 5));
}

#[test]
fn full_pipeline_recovers_injected_structure() {
    let run = Run::new(&data("lexicon.txt"));
    run.synth_and_ingest(84, 200.0);
    run.ok(&["score"]);

    let profile = run.file("profile_joy.csv");
    let peak = rows(&profile)
        .into_iter()
        .max_by(|a, b| a[3].parse::<f64>().unwrap().total_cmp(&b[3].parse().unwrap()))
        .unwrap();
    assert_eq!(peak[2], "9");

    run.ok(&["analyze", "acf", "--mood", "joy", "--max-lag", "48"]);
    let acf = rows(&run.file("acf_joy_summer2011.csv"));
    let r = |lag: usize| acf[lag - 1][3].parse::<f64>().unwrap();
    let best = (12..=36).max_by(|&a, &b| r(a).total_cmp(&r(b))).unwrap();
    assert_eq!(best, 24);

    run.ok(&["analyze", "tmd", "--mood", "joy", "--ha", "8-12", "--hb", "8-12"]);
    let report = rows(&run.file("report_tmd_joy_summer2011.csv"));
    assert_eq!(report[0][4], "1");

    run.ok(&["analyze", "tcp", "--mood", "sadness", "--trace"]);
    let trace = run.file("trace_tcp_sadness_summer2011.csv");
    assert_eq!(rows(&trace).len(), 200);

    run.ok(&["render"]);
    for mood in ["joy", "fear", "sadness", "anger"] {
        let svg = run.file(&format!("profile_{mood}.svg"));
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
    }
}

#[test]
fn synth_timestamps_uniform_within_the_hour() {
    let mut cfg = shipped_synth(17);
    cfg.n_days = 14;
    let generator = Generator::new(&cfg).unwrap();
    let mut bins = [0u64; 60];
    let mut tokens = 0u64;
    let mut records = 0u64;
    for day in 0..cfg.n_days {
        for hour in 0..24 {
            for r in generator.records(day, hour) {
                let t: DateTime<chrono::Utc> = r.timestamp;
                bins[t.minute() as usize] += 1;
                tokens += r.text.split(' ').count() as u64;
                records += 1;
            }
        }
    }
    let expected = records as f64 / 60.0;
    let chi2: f64 = bins.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new(59.0).unwrap().cdf(chi2);
    assert!(p > 0.001, "chi2 {chi2}, p {p}");

    let per_record = tokens as f64 / records as f64;
    assert!((per_record / cfg.tokens_per_record_mean - 1.0).abs() < 0.05, "{per_record}");
    let per_hour = records as f64 / (cfg.n_days * 24) as f64;
    assert!((per_hour / cfg.records_per_hour_mean - 1.0).abs() < 0.05, "{per_hour}");
}

#[test]
fn stem_subcommand_reads_stdin() {
    use std::io::Write;
    use std::process::{Command, Stdio};
    let mut child = Command::new(env!("CARGO_BIN_EXE_moodcycle"))
        .arg("stem")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"Feeling HAPPY, so happy!\n\nponies\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "feel happi so happi\n\nponi\n");
}

#[test]
fn tables_carry_schema_and_seed() {
    let run = Run::new(&data("lexicon.txt"));
    run.synth_and_ingest(3, 20.0);
    let first = run.file("ingest_stats.csv").lines().next().unwrap().to_string();
    assert!(first.starts_with("# moodcycle "), "{first}");
    assert!(first.ends_with("schema=ingest_stats/1 seed=7"), "{first}");
}
