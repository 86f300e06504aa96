use hyperentm::engine::{read_stats_csv, write_stats_csv, Checkpoint, Encoding, Evolution, ExperimentConfig};
use std::fs;

fn small(encoding: Encoding, seed: u64, generations: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::preset(encoding, 1, seed);
    c.params.population_size = 40;
    c.params.species_count = 4;
    c.params.max_generations = generations;
    c
}

#[test]
fn identical_seeds_give_identical_runs() {
    for enc in [Encoding::DirectNeat, Encoding::HyperneatSeeded] {
        let a = Evolution::new(small(enc, 11, 6)).unwrap().run().unwrap();
        let b = Evolution::new(small(enc, 11, 6)).unwrap().run().unwrap();
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.champion, b.champion);
    }
}

#[test]
fn different_seeds_diverge() {
    let a = Evolution::new(small(Encoding::DirectNeat, 1, 3)).unwrap().run().unwrap();
    let b = Evolution::new(small(Encoding::DirectNeat, 2, 3)).unwrap().run().unwrap();
    assert_ne!(a.stats, b.stats);
}

#[test]
fn resumed_run_matches_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("checkpoint.json");
    for enc in [Encoding::DirectNeat, Encoding::Hyperneat] {
        let whole = Evolution::new(small(enc, 5, 10)).unwrap().run().unwrap();

        let mut first = Evolution::new(small(enc, 5, 4)).unwrap();
        while first.step().unwrap().is_some() {}
        first.save_checkpoint(&path).unwrap();
        let resumed = Evolution::resume(small(enc, 5, 10), &path).unwrap().run().unwrap();

        assert_eq!(resumed.stats, whole.stats, "{enc:?}");
        assert_eq!(resumed.champion, whole.champion);
    }
}

#[test]
fn checkpoint_mid_run_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.json");
    let mut evo = Evolution::new(small(Encoding::DirectNeat, 8, 20)).unwrap();
    for _ in 0..3 {
        evo.step().unwrap();
    }
    evo.save_checkpoint(&path).unwrap();
    let cp = Checkpoint::load(&path).unwrap();
    assert_eq!(cp.generation(), 3);
    let back = Evolution::resume(small(Encoding::DirectNeat, 8, 20), &path).unwrap();
    assert_eq!(back.population(), evo.population());
    assert_eq!(back.stats(), evo.stats());
}

#[test]
fn resume_refuses_other_configuration_or_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.json");
    let mut evo = Evolution::new(small(Encoding::DirectNeat, 3, 5)).unwrap();
    evo.step().unwrap();
    evo.save_checkpoint(&path).unwrap();

    let mut other = small(Encoding::DirectNeat, 3, 5);
    other.params.add_node_prob = 0.5;
    assert!(Evolution::resume(other, &path).is_err());
    assert!(Evolution::resume(small(Encoding::DirectNeat, 4, 5), &path).is_err());
    assert!(Evolution::resume(small(Encoding::DirectNeat, 3, 50), &path).is_ok());
}

#[test]
fn missing_empty_or_corrupt_checkpoints_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = small(Encoding::DirectNeat, 1, 5);
    assert!(Evolution::resume(config.clone(), &dir.path().join("absent.json")).is_err());
    let empty = dir.path().join("empty.json");
    fs::write(&empty, "").unwrap();
    assert!(Evolution::resume(config.clone(), &empty).is_err());
    let corrupt = dir.path().join("corrupt.json");
    fs::write(&corrupt, "{\"format\": \"something else\"}").unwrap();
    assert!(Evolution::resume(config, &corrupt).is_err());
}

#[test]
fn stats_have_one_row_per_generation_and_fixed_species_count() {
    let out = Evolution::new(small(Encoding::DirectNeat, 9, 7)).unwrap().run().unwrap();
    let gens = &out.stats.generations;
    if !out.stats.solved {
        assert_eq!(gens.len(), 8);
    }
    for (i, g) in gens.iter().enumerate() {
        assert_eq!(g.generation, i);
        assert_eq!(g.species_sizes.len(), 4);
        assert_eq!(g.species_sizes.iter().sum::<usize>(), 40);
        assert!(g.best_ever >= g.champion_fitness);
        assert!((0.0..=1.0).contains(&g.mean_fitness));
    }
    assert!(gens.windows(2).all(|w| w[1].best_ever >= w[0].best_ever));

    let mut buf = Vec::new();
    write_stats_csv(gens, &mut buf).unwrap();
    assert_eq!(&read_stats_csv(buf.as_slice()).unwrap(), gens);
}

#[test]
fn aligned_seed_population_is_solved_immediately() {
    let mut c = small(Encoding::HyperneatSeeded, 1, 5);
    c.params.add_connection_prob = 0.0;
    c.params.add_node_prob = 0.0;
    c.params.remove_connection_prob = 0.0;
    c.params.remove_node_prob = 0.0;
    c.params.weight_mutation_prob = 0.0;
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("aligned.json");
    hyperentm::cppn::aligned_copy_cppn().save(&seed).unwrap();
    c.encoding = Encoding::HyperneatChampionSeeded;
    c.champion_seed_path = Some(seed);
    let out = Evolution::new(c).unwrap().run().unwrap();
    assert!(out.stats.solved);
    assert_eq!(out.stats.solved_generation, Some(0));
}
