use hyperentm::copytask::ActivityRecording;
use hyperentm::cppn::{aligned_copy_cppn, locality_seed};
use hyperentm::engine::{Encoding, ExperimentConfig};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn he(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperentm")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_aligned(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("aligned.json");
    aligned_copy_cppn().save(&path).unwrap();
    path
}

#[test]
fn evolve_without_seed_is_a_usage_error() {
    let o = he(&["evolve", "--config", "x.toml", "--out", "o"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--seed"));
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "encoding = \"direct_neat\"\nbits = 1\npopulaton_size = 5\n").unwrap();
    let o = he(&["evolve", "--config", p(&cfg), "--seed", "1", "--out", p(&dir.path().join("o"))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("populaton_size"), "{}", stderr(&o));
}

#[test]
fn evolve_writes_outputs_and_reports_budget_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "encoding = \"direct_neat\"\nbits = 1\npopulation_size = 30\nspecies_count = 3\nmax_generations = 2\n",
    )
    .unwrap();
    let out = dir.path().join("run");
    let o = he(&["evolve", "--config", p(&cfg), "--seed", "3", "--out", p(&out)]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    for f in ["stats.csv", "checkpoint.json", "champion.json", "summary.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let rows = hyperentm::engine::read_stats_csv(fs::File::open(out.join("stats.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);

    // Extending the budget resumes from the checkpoint.
    fs::write(
        &cfg,
        "encoding = \"direct_neat\"\nbits = 1\npopulation_size = 30\nspecies_count = 3\nmax_generations = 4\n",
    )
    .unwrap();
    let o = he(&[
        "evolve",
        "--config",
        p(&cfg),
        "--seed",
        "3",
        "--out",
        p(&out),
        "--resume",
        p(&out.join("checkpoint.json")),
    ]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let rows = hyperentm::engine::read_stats_csv(fs::File::open(out.join("stats.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 5);

    let o = he(&[
        "evolve",
        "--config",
        p(&cfg),
        "--seed",
        "4",
        "--out",
        p(&out),
        "--resume",
        p(&out.join("checkpoint.json")),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn record_writes_full_timeline_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let genome = write_aligned(dir.path());
    let run = |stem: &str| {
        let out = dir.path().join(stem);
        let o = he(&[
            "record", "--genome", p(&genome), "--bits", "3", "--length", "7", "--seed", "9", "--out", p(&out),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        fs::read(dir.path().join(format!("{stem}.csv"))).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    let rec = ActivityRecording::read_csv(a.as_slice()).unwrap();
    assert_eq!(rec.steps.len(), 16);
    let json = ActivityRecording::load(&dir.path().join("a.json")).unwrap();
    assert_eq!(json, rec);
}

#[test]
fn test_command_reports_generalization() {
    let dir = tempfile::tempdir().unwrap();
    let genome = write_aligned(dir.path());
    let report = dir.path().join("r.json");
    let o = he(&[
        "test", "--genome", p(&genome), "--bits", "2", "--battery", "generalization", "--seed", "1",
        "--report", p(&report),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["score"].as_f64().unwrap() >= hyperentm::copytask::SOLUTION_THRESHOLD, "{v}");
}

#[test]
fn scale_prints_a_table_and_rejects_direct_genomes() {
    let dir = tempfile::tempdir().unwrap();
    let genome = write_aligned(dir.path());
    let o = he(&["scale", "--genome", p(&genome), "--from", "1", "--to", "5", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("# which scaled to 5"), "{table}");

    let config = ExperimentConfig::preset(Encoding::DirectNeat, 1, 0);
    let direct = hyperentm::engine::initial_population(&config, &mut hyperentm::rng::stream(0, &[]))
        .unwrap()
        .remove(0);
    let direct_path = dir.path().join("direct.json");
    direct.save(&direct_path).unwrap();
    let o = he(&["scale", "--genome", p(&direct_path), "--from", "1", "--to", "5", "--seed", "1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("CPPN"), "{}", stderr(&o));
}

#[test]
fn transfer_rejects_direct_configs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "encoding = \"direct_neat\"\nbits = 1\n").unwrap();
    let seed = dir.path().join("seed.json");
    locality_seed().save(&seed).unwrap();
    let o = he(&[
        "transfer", "--config", p(&cfg), "--champion", p(&seed), "--bits", "2", "--seed", "1", "--out",
        p(&dir.path().join("t")),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn plot_rejects_empty_stats_and_draws_recordings() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("stats.csv");
    fs::write(&empty, "").unwrap();
    let o = he(&["plot", "--stats", p(&empty), "--out", p(&dir.path().join("s.svg"))]);
    assert_eq!(code(&o), 1);

    let genome = write_aligned(dir.path());
    let stem = dir.path().join("rec");
    assert_eq!(
        code(&he(&["record", "--genome", p(&genome), "--bits", "2", "--length", "4", "--seed", "1", "--out", p(&stem)])),
        0
    );
    let svg = dir.path().join("rec.svg");
    let o = he(&["plot", "--recording", p(&dir.path().join("rec.csv")), "--out", p(&svg)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("class=\"panel\"").count(), 11);
}

#[test]
fn plot_needs_exactly_one_source() {
    assert_eq!(code(&he(&["plot", "--out", "x.svg"])), 1);
    assert_eq!(code(&he(&["plot", "--stats", "a", "--recording", "b", "--out", "x.svg"])), 1);
}
