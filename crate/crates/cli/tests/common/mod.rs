#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use moodcycle::config::synth_from_toml;
use moodcycle_core::synth::SynthConfig;

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// The shipped synth spec, with its seed replaced.
pub fn shipped_synth(seed: u64) -> SynthConfig {
    let text = std::fs::read_to_string(data("synth.toml")).unwrap();
    let mut cfg = synth_from_toml(&text, None).unwrap();
    cfg.seed = seed;
    cfg
}

/// A run configuration in `dir` covering the shipped synth window only.
pub fn write_run_config(dir: &Path, lexicon: &Path, extra: &str) -> PathBuf {
    let text = format!(
        "centres = {centres:?}\nlexicon = {lexicon:?}\nseed = 7\n\
         permutations = 200\nbootstraps = 1000\nmax_lag = 48\n{extra}\n\
         [[season]]\nlabel = \"summer2011\"\nstart = 2011-06-06\nend = 2011-08-28\n",
        centres = data("uk_centres.txt").display().to_string(),
        lexicon = lexicon.display().to_string(),
    );
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

/// A synth spec of `n_days` at `rate` records an hour, otherwise as shipped.
pub fn write_synth_spec(dir: &Path, n_days: usize, rate: f64) -> PathBuf {
    let text = std::fs::read_to_string(data("synth.toml")).unwrap();
    let text = text
        .replace("n_days = 84", &format!("n_days = {n_days}"))
        .replace("records_per_hour_mean = 200", &format!("records_per_hour_mean = {rate}"));
    let path = dir.join("synth.toml");
    std::fs::write(&path, text).unwrap();
    path
}

pub fn moodcycle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moodcycle"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Run and require exit 0.
pub fn ok(args: &[&str]) -> Output {
    let out = moodcycle(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
