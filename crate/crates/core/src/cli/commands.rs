use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use super::plot::{recording_svg, stats_svg};
use super::{
    BatteryKind, Command, EvolveArgs, PlotArgs, RecordArgs, ScaleArgs, TestArgs, TransferArgs,
    EXIT_BUDGET, EXIT_OK,
};
use crate::copytask::{
    generate_fixed_episode, run_episode, test_scaling, ActivityRecording, Battery, ScalingReport,
};
use crate::engine::{
    build_controller, read_stats_csv, Encoding, Evolution, ExperimentConfig, STATS_HEADER,
};
use crate::entm::MemoryTape;
use crate::neat::{Genome, GenomeKind};
use crate::rng;

pub(super) fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Evolve(a) => evolve(a),
        Command::Test(a) => test(a),
        Command::Scale(a) => scale(a),
        Command::Transfer(a) => transfer(a),
        Command::Record(a) => record(a),
        Command::Plot(a) => plot(a),
    }
}

fn set_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        // Fails only if a pool already exists, e.g. when called twice in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn load_genome(path: &Path) -> Result<Genome> {
    Genome::load(path).with_context(|| format!("loading genome {}", path.display()))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn evolve(a: EvolveArgs) -> Result<i32> {
    set_threads(a.threads)?;
    let config = ExperimentConfig::load(&a.config, a.seed)
        .with_context(|| format!("invalid config {}", a.config.display()))?;
    run_experiment(config, &a.out, a.resume.as_deref())
}

fn transfer(a: TransferArgs) -> Result<i32> {
    set_threads(a.threads)?;
    let mut config = ExperimentConfig::load_unchecked(&a.config, a.seed)
        .with_context(|| format!("invalid config {}", a.config.display()))?;
    let champion = load_genome(&a.champion)?;
    if champion.kind() != GenomeKind::Cppn {
        bail!("transfer seeding requires a CPPN genome");
    }
    if !config.encoding.is_indirect() {
        bail!("transfer needs a HyperNEAT config, found direct_neat");
    }
    config.encoding = Encoding::HyperneatChampionSeeded;
    config.bits = a.bits;
    config.champion_seed_path = Some(a.champion.clone());
    config.validate().context("invalid transfer configuration")?;
    run_experiment(config, &a.out, None)
}

#[derive(Serialize)]
struct RunSummary {
    encoding: Encoding,
    bits: usize,
    seed: u64,
    config_hash: String,
    solved: bool,
    solved_generation: Option<usize>,
    terminal_generation: usize,
    champion_fitness: f64,
    champion_complexity: usize,
}

fn run_experiment(config: ExperimentConfig, out: &Path, resume: Option<&Path>) -> Result<i32> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut evo = match resume {
        Some(path) => Evolution::resume(config.clone(), path)
            .with_context(|| format!("resuming from {}", path.display()))?,
        None => Evolution::new(config.clone())?,
    };
    let checkpoint_path = out.join("checkpoint.json");
    let stats_path = out.join("stats.csv");
    let file = File::create(&stats_path).with_context(|| format!("writing {}", stats_path.display()))?;
    let mut stats = csv::Writer::from_writer(BufWriter::new(file));
    stats.write_record(STATS_HEADER)?;
    for row in evo.stats() {
        stats.write_record(row.csv_record())?;
    }
    stats.flush()?;

    while let Some(row) = evo.step()? {
        stats.write_record(row.csv_record())?;
        stats.flush()?;
        if row.generation % 25 == 0 {
            eprintln!(
                "generation {:>5}  champion {:.5}  best {:.5}  mean complexity {:.2}",
                row.generation, row.champion_fitness, row.best_ever, row.mean_complexity
            );
        }
        let every = config.checkpoint_every;
        if every > 0 && evo.generation() % every == 0 && !evo.is_finished() {
            evo.save_checkpoint(&checkpoint_path)?;
        }
    }
    evo.save_checkpoint(&checkpoint_path)?;
    drop(stats);

    let outcome = evo.into_outcome()?;
    outcome
        .champion
        .save(&out.join("champion.json"))
        .context("writing champion")?;
    let summary = RunSummary {
        encoding: config.encoding,
        bits: config.bits,
        seed: config.master_seed,
        config_hash: config.hash(),
        solved: outcome.stats.solved,
        solved_generation: outcome.stats.solved_generation,
        terminal_generation: outcome.stats.terminal_generation,
        champion_fitness: outcome.champion_fitness,
        champion_complexity: outcome.champion.complexity(),
    };
    write_json(&out.join("summary.json"), &summary)?;
    match summary.solved_generation {
        Some(g) => {
            println!("solved at generation {g} (training score {:.6})", summary.champion_fitness);
            Ok(EXIT_OK)
        }
        None => {
            println!(
                "no solution within {} generations (best training score {:.6})",
                summary.terminal_generation, summary.champion_fitness
            );
            Ok(EXIT_BUDGET)
        }
    }
}

#[derive(Serialize)]
struct TestReport {
    genome: PathBuf,
    kind: GenomeKind,
    bits: usize,
    battery: &'static str,
    episodes: usize,
    seed: u64,
    score: f64,
}

fn test(a: TestArgs) -> Result<i32> {
    set_threads(a.threads)?;
    let genome = load_genome(&a.genome)?;
    let controller = build_controller(&genome, a.bits)?;
    let (name, battery) = match a.battery {
        BatteryKind::Generalization => ("generalization", Battery::generalization()),
        BatteryKind::Long => ("long", Battery::long_sequence()),
    };
    let score = battery.evaluate(&controller, a.bits, &mut rng::stream(a.seed, &[]))?;
    println!("{name} battery ({} episodes): score {score:.6}", battery.episodes);
    let report_path = a.report.unwrap_or_else(|| {
        let stem = a.genome.file_stem().unwrap_or_default().to_string_lossy();
        a.genome.with_file_name(format!("{stem}.{name}.report.json"))
    });
    write_json(
        &report_path,
        &TestReport {
            genome: a.genome.clone(),
            kind: genome.kind(),
            bits: a.bits,
            battery: name,
            episodes: battery.episodes,
            seed: a.seed,
            score,
        },
    )?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ScaleEntry {
    genome: PathBuf,
    #[serde(flatten)]
    report: ScalingReport,
}

/// Renders scaling results as a table in the layout used for reporting
/// zero-retraining scaling: one summary row per source size plus one row
/// per genome.
pub fn scaling_table(from: usize, to: usize, entries: &[(String, ScalingReport)]) -> String {
    let scaled = entries.iter().filter(|(_, r)| r.scaled_perfectly).count();
    let mut s = String::new();
    s.push_str(&format!(
        "Scaling without further training ({} sequences of {} random bit-vectors of size {to})\n",
        entries.first().map_or(50, |(_, r)| r.episodes),
        entries.first().map_or(100, |(_, r)| r.sequence_length),
    ));
    s.push_str(&format!("| Size | # of champions | # which scaled to {to} |\n"));
    s.push_str("|------|----------------|------------------|\n");
    s.push_str(&format!("| {from} | {} | {scaled} |\n\n", entries.len()));
    s.push_str("| Genome | Connections | Score | Scaled perfectly |\n");
    s.push_str("|--------|-------------|-------|------------------|\n");
    for (name, r) in entries {
        s.push_str(&format!(
            "| {name} | {} | {:.6} | {} |\n",
            r.connections,
            r.score,
            if r.scaled_perfectly { "yes" } else { "no" }
        ));
    }
    s
}

fn scale(a: ScaleArgs) -> Result<i32> {
    set_threads(a.threads)?;
    if a.from == 0 || a.to == 0 {
        bail!("--from and --to must be at least 1");
    }
    let mut entries = Vec::new();
    for (k, path) in a.genome.iter().enumerate() {
        let genome = load_genome(path)?;
        if genome.kind() != GenomeKind::Cppn {
            bail!("scaling requires a CPPN genome ({} is a direct genome)", path.display());
        }
        let mut r = rng::stream(a.seed, &[k as u64]);
        let report = test_scaling(&genome, a.from, a.to, &mut r)?;
        entries.push((path.display().to_string(), report));
    }
    print!("{}", scaling_table(a.from, a.to, &entries));
    for (name, r) in &entries {
        if r.scaled_perfectly {
            println!("{name}: scaled perfectly");
        }
    }
    if let Some(path) = a.report {
        let json: Vec<ScaleEntry> = entries
            .into_iter()
            .map(|(g, report)| ScaleEntry {
                genome: PathBuf::from(g),
                report,
            })
            .collect();
        write_json(&path, &json)?;
    }
    Ok(EXIT_OK)
}

fn record(a: RecordArgs) -> Result<i32> {
    if a.length == 0 {
        bail!("--length must be at least 1");
    }
    let genome = load_genome(&a.genome)?;
    let controller = build_controller(&genome, a.bits)?;
    let episode = generate_fixed_episode(a.bits, a.length, &mut rng::stream(a.seed, &[]));
    let result = run_episode(
        &controller,
        &mut MemoryTape::new(a.bits),
        &episode,
        Default::default(),
        true,
    )?;
    let recording = result.recording.expect("recording requested");
    let stem = strip_extension(&a.out);
    recording.save(&stem)?;
    println!(
        "recorded {} timesteps (score {:.6}) to {}.csv and {}.json",
        recording.steps.len(),
        result.score,
        stem.display(),
        stem.display()
    );
    Ok(EXIT_OK)
}

fn strip_extension(path: &Path) -> PathBuf {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv" | "json") => path.with_extension(""),
        _ => path.to_path_buf(),
    }
}

fn plot(a: PlotArgs) -> Result<i32> {
    let svg = if let Some(path) = &a.source.stats {
        let file = File::open(path).with_context(|| format!("reading {}", path.display()))?;
        let rows = read_stats_csv(file).with_context(|| format!("reading {}", path.display()))?;
        stats_svg(&rows)
    } else if let Some(path) = &a.source.recording {
        let recording = ActivityRecording::load(path)
            .with_context(|| format!("reading {}", path.display()))?;
        recording_svg(&recording)
    } else {
        bail!("one of --stats or --recording is required");
    };
    let mut f = File::create(&a.out).with_context(|| format!("writing {}", a.out.display()))?;
    f.write_all(svg.as_bytes())?;
    println!("wrote {}", a.out.display());
    Ok(EXIT_OK)
}
