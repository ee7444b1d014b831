//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line. Run with `cargo test -p deodata --test acceptance`.

mod common;

use std::time::Instant;

use deodata::algorithm::Algorithm;
use deodata::dataset::QueryEntry;
use deodata::digits::{load_digits_path, DerivationConfig, PixelSelection};
use deodata::harness::{
    run_accuracy_experiment, run_convergence_sweep, run_saturation_check, SaturationUniverse,
};
use deodata::impurity::{entropy, gini, informational_energy, ImpurityMeasure, OutcomeCounts};
use deodata::predictors::{
    predict_delanga, predict_rasturnat, predict_varsate, CascadedMatchLists, MatchScoreLists,
    OutcomeScores,
};

use common::{digits_path, golden_train, nearest_neighborhood_oracle, random_instance, GOLDEN_QUERY};

const SEED: u64 = 0xDE0_DA7A;

fn golden_query() -> QueryEntry {
    QueryEntry::from_comma_list(GOLDEN_QUERY)
}

/// The four-outcome accuracy-table configuration.
fn table_config() -> DerivationConfig {
    DerivationConfig {
        target_resolution: 6,
        pixels: PixelSelection::Random { count: 6 },
        intensity_levels: 4,
        selected_outcomes: vec!["0".into(), "1".into(), "2".into(), "3".into()],
        per_outcome_train_count: 6,
        trials: 50,
        seed: SEED,
    }
}

/// The three-outcome, binary-pixel convergence configuration.
fn convergence_config() -> DerivationConfig {
    DerivationConfig {
        target_resolution: 6,
        pixels: PixelSelection::Random { count: 4 },
        intensity_levels: 2,
        selected_outcomes: vec!["0".into(), "1".into(), "7".into()],
        per_outcome_train_count: 1,
        trials: 120,
        seed: SEED,
    }
}

#[test]
fn criterion_1_worked_example_golden_suite() {
    let started = Instant::now();
    let train = golden_train();
    let query = golden_query();

    // (a) match score lists as multisets
    let lists = MatchScoreLists::build(&train, &query).unwrap();
    let multiset = |score: usize| -> Vec<&str> {
        let mut v: Vec<&str> = lists
            .get(score)
            .unwrap_or(&[])
            .iter()
            .map(String::as_str)
            .collect();
        v.sort();
        v
    };
    assert_eq!(multiset(1), ["t2"]);
    assert_eq!(multiset(2), ["t1", "t1", "t2"]);
    assert_eq!(multiset(3), ["t0", "t0"]);
    assert_eq!(multiset(4), ["t1", "t2"]);
    assert_eq!(lists.scores().count(), 4);

    // (b) swapped variant, base 2: exact scores and prediction
    let scores = OutcomeScores::build(&train, &query, 2.0).unwrap();
    assert_eq!(scores.get("t0"), Some(16.0));
    assert_eq!(scores.get("t2"), Some(22.0));
    assert_eq!(scores.get("t1"), Some(24.0));
    assert_eq!(predict_rasturnat(&train, &query, 2.0).unwrap().prediction(), "t1");

    // (c) cascaded entropies and the cascading selection
    let cascades = CascadedMatchLists::from_lists(&lists);
    let expected = [1.0, 1.5, 1.55665, 1.56127];
    for (level, want) in expected.iter().enumerate() {
        let counts = OutcomeCounts::from_outcomes(
            cascades.level(level).iter().map(String::as_str),
        );
        let got = entropy(&counts).unwrap();
        assert!(
            (got - want).abs() < 1e-4,
            "cascade level {level}: entropy {got} vs {want}"
        );
    }
    let varsate = predict_varsate(&train, &query, ImpurityMeasure::Entropy).unwrap();
    assert_eq!(varsate.selected_level, 0);

    // (d) tie-breaking proximity: skip the foreign list, then count
    let tbreak = predict_delanga(&train, &query, true).unwrap();
    assert_eq!(tbreak.prediction(), "t1");
    assert!(tbreak.tie_broken);

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1s");
    println!("criterion 1 (worked-example golden suite, {elapsed:?}): PASS");
}

#[test]
fn criterion_2_uniform_random_control() {
    let raw = load_digits_path(digits_path()).unwrap();

    // four outcomes, >= 1e5 predictions
    let mut config = table_config();
    config.trials = 150;
    let result =
        run_accuracy_experiment(&raw, &config, &[Algorithm::UniformRandom], true).unwrap();
    let score = result.score("uniform_random").unwrap();
    assert!(score.tests >= 100_000, "only {} tests", score.tests);
    assert!(
        (score.error_rate - 0.75).abs() < 0.01,
        "4-outcome error rate {}",
        score.error_rate
    );

    // three outcomes in the convergence setting
    let mut config = convergence_config();
    config.per_outcome_train_count = 8;
    config.trials = 30;
    let result =
        run_accuracy_experiment(&raw, &config, &[Algorithm::UniformRandom], true).unwrap();
    let score = result.score("uniform_random").unwrap();
    assert!(score.tests >= 10_000);
    let third = 1.0 / 3.0;
    assert!(
        (score.error_rate - (1.0 - third)).abs() < 0.01,
        "3-outcome error rate {}",
        score.error_rate
    );
    println!("criterion 2 (uniform-random control rates): PASS");
}

#[test]
fn criterion_3_accuracy_table_ordering() {
    let raw = load_digits_path(digits_path()).unwrap();
    let config = table_config();
    assert!(config.trials >= 50);
    let result =
        run_accuracy_experiment(&raw, &config, &Algorithm::benchmark_set(), true).unwrap();

    let tests = result.scores[0].tests;
    assert!(tests >= 10_000, "only {tests} tests");

    let accuracy = |id: &str| result.accuracy(id).unwrap();
    let delanga = accuracy("deodata_delanga");
    let id3 = accuracy("decision_tree_id3");
    let random_tree = accuracy("random_tree");
    let uniform = accuracy("uniform_random");

    assert!(
        delanga >= id3 + 0.02,
        "delanga {delanga} vs id3 {id3}: gap below 0.02"
    );
    assert!(id3 >= random_tree, "id3 {id3} below random tree {random_tree}");
    for id in [
        "deodata_delanga",
        "deodata_tbreak_delanga",
        "deodata_varsate_entropy",
        "deodata_rasturnat_pow_e",
    ] {
        let acc = accuracy(id);
        assert!(
            acc >= uniform + 0.25,
            "{id} {acc} not 0.25 above uniform {uniform}"
        );
    }
    println!(
        "criterion 3 (accuracy ordering over {tests} tests): PASS \
         [delanga {delanga:.4}, id3 {id3:.4}, random_tree {random_tree:.4}, uniform {uniform:.4}]"
    );
}

#[test]
fn criterion_4_convergence_trend() {
    let raw = load_digits_path(digits_path()).unwrap();
    let config = convergence_config();
    let sizes = [1usize, 2, 4, 8, 16, 32, 64];
    let algorithms = [
        Algorithm::DeodataDelanga,
        Algorithm::DecisionTreeId3,
        Algorithm::RandomTree,
    ];
    let result = run_convergence_sweep(&raw, &config, &sizes, &algorithms, true).unwrap();

    // at least 1e4 tests per size row
    let selected = raw
        .iter()
        .filter(|img| config.selected_outcomes.contains(&img.label))
        .count();
    for &size in &sizes {
        let per_trial = selected - config.selected_outcomes.len() * size;
        assert!(
            per_trial * config.trials >= 10_000,
            "size {size}: only {} tests",
            per_trial * config.trials
        );
    }

    let series = |id: &str| -> Vec<f64> {
        sizes.iter().map(|&s| result.accuracy(s, id).unwrap()).collect()
    };
    let delanga = series("deodata_delanga");
    let id3 = series("decision_tree_id3");
    let random_tree = series("random_tree");

    // (a) proximity accuracy nondecreasing up to noise
    for window in delanga.windows(2) {
        assert!(
            window[1] >= window[0] - 0.005,
            "delanga accuracy dropped: {window:?}"
        );
    }
    // (b) the delanga-id3 gap shrinks from the first size to the last
    let gap_first = delanga[0] - id3[0];
    let gap_last = delanga[6] - id3[6];
    assert!(
        gap_last < gap_first,
        "delanga-id3 gap went {gap_first} -> {gap_last}"
    );
    // (c) so does the id3-random-tree gap
    let tree_gap_first = id3[0] - random_tree[0];
    let tree_gap_last = id3[6] - random_tree[6];
    assert!(
        tree_gap_last < tree_gap_first,
        "id3-random gap went {tree_gap_first} -> {tree_gap_last}"
    );
    println!(
        "criterion 4 (convergence trend): PASS \
         [delanga-id3 {gap_first:.4} -> {gap_last:.4}, id3-random {tree_gap_first:.4} -> {tree_gap_last:.4}]"
    );
}

#[test]
fn criterion_5_nearest_neighborhood_oracle_equivalence() {
    let mut rng = deodata::seeded_rng(SEED ^ 0x5eed);
    let instances = 1000;
    for case in 0..instances {
        let instance = random_instance(&mut rng, 6);
        let train = instance.dataset();
        let query = QueryEntry::new(instance.query.clone());
        for tie_break in [false, true] {
            let got = predict_delanga(&train, &query, tie_break).unwrap();
            let want = nearest_neighborhood_oracle(
                &instance.rows,
                &instance.outcomes,
                &instance.query,
                tie_break,
            );
            assert_eq!(
                got.prediction(),
                want,
                "case {case} tie_break={tie_break}: rows {:?} outcomes {:?} query {:?}",
                instance.rows,
                instance.outcomes,
                instance.query
            );
        }
    }
    println!("criterion 5 (oracle equivalence on {instances} instances): PASS");
}

/// Exact lower tail of Binomial(n, p): P(X <= k).
fn binomial_lower_tail(n: u64, p: f64, k: u64) -> f64 {
    let mut total = 0.0;
    for x in 0..=k {
        // log-space to keep 50-trial terms stable
        let mut log_term = 0.0;
        for i in 0..x {
            log_term += ((n - i) as f64).ln() - ((x - i) as f64).ln();
        }
        log_term += x as f64 * p.ln() + (n - x) as f64 * (1.0 - p).ln();
        total += log_term.exp();
    }
    total
}

#[test]
fn criterion_6_saturation_equivalence() {
    let outcomes: Vec<String> = vec!["t0".into(), "t1".into(), "t2".into()];

    // point masses: every algorithm recovers every mode exactly
    let universe =
        SaturationUniverse::with_round_robin_modes(&[2, 2, 2], &outcomes, 1.0).unwrap();
    for replication in [1usize, 50] {
        let mut rng = deodata::seeded_rng(SEED);
        let report = run_saturation_check(&universe, replication, &mut rng).unwrap();
        for score in &report.scores {
            assert_eq!(
                score.agreement, 1.0,
                "{} at replication {replication}",
                score.algorithm
            );
        }
    }

    // 0.8-mass modes, replication 50. The empirical mode can only miss if
    // the mode outcome draws <= 25 of the 50 replications (another outcome
    // must reach at least its count), so per-combination failure is bounded
    // by the exact binomial tail and the 8-combination union bound must
    // clear the 0.95 agreement threshold before it is asserted.
    let per_combination_failure = binomial_lower_tail(50, 0.8, 25);
    assert!(per_combination_failure < 1e-4);
    let union_bound = 1.0 - 8.0 * per_combination_failure;
    assert!(union_bound >= 0.95, "bound {union_bound} too weak for the threshold");

    let universe =
        SaturationUniverse::with_round_robin_modes(&[2, 2, 2], &outcomes, 0.8).unwrap();
    let mut rng = deodata::seeded_rng(SEED);
    let report = run_saturation_check(&universe, 50, &mut rng).unwrap();
    for score in &report.scores {
        assert!(
            score.agreement >= 0.95,
            "{}: agreement {}",
            score.algorithm,
            score.agreement
        );
    }
    println!(
        "criterion 6 (saturation equivalence, failure bound {per_combination_failure:.2e}): PASS"
    );
}

#[test]
fn criterion_7_impurity_unit_checks() {
    let counts = |pairs: &[(&str, usize)]| {
        let mut c = OutcomeCounts::new();
        for (k, n) in pairs {
            c.add_count(k, *n);
        }
        c
    };

    assert!((entropy(&counts(&[("t2", 1), ("t1", 1)])).unwrap() - 1.0).abs() < 1e-12);
    assert!(
        (entropy(&counts(&[("t2", 1), ("t1", 1), ("t0", 2)])).unwrap() - 1.5).abs() < 1e-12
    );

    for k in 2usize..=8 {
        let uniform = {
            let mut c = OutcomeCounts::new();
            for i in 0..k {
                c.add_count(&format!("o{i}"), 3);
            }
            c
        };
        let expect_gini = 1.0 - 1.0 / k as f64;
        assert!((gini(&uniform).unwrap() - expect_gini).abs() < 1e-12);
        assert!((informational_energy(&uniform).unwrap() - 1.0 / k as f64).abs() < 1e-12);
    }

    use rand::Rng;
    let mut rng = deodata::seeded_rng(SEED ^ 7);
    for _ in 0..10_000 {
        let k = rng.random_range(1..=8);
        let mut c = OutcomeCounts::new();
        let mut total = 0;
        for i in 0..k {
            let n = rng.random_range(0..30);
            total += n;
            c.add_count(&format!("o{i}"), n);
        }
        if total == 0 {
            continue;
        }
        let sum = gini(&c).unwrap() + informational_energy(&c).unwrap();
        assert!((sum - 1.0).abs() < 1e-12, "gini + energy = {sum}");
    }
    println!("criterion 7 (impurity unit checks): PASS");
}

#[test]
fn criterion_8_deterministic_and_parallel_consistent() {
    let raw = load_digits_path(digits_path()).unwrap();
    let mut config = table_config();
    config.trials = 12;
    let algorithms = Algorithm::benchmark_set();

    let sequential = run_accuracy_experiment(&raw, &config, &algorithms, false).unwrap();
    let parallel = run_accuracy_experiment(&raw, &config, &algorithms, true).unwrap();
    assert_eq!(sequential, parallel, "parallel execution changed the results");

    let again = run_accuracy_experiment(&raw, &config, &algorithms, true).unwrap();
    assert_eq!(parallel, again, "same seed must reproduce the same counts");

    let sweep_a =
        run_convergence_sweep(&raw, &config, &[1, 4], &algorithms, false).unwrap();
    let sweep_b = run_convergence_sweep(&raw, &config, &[1, 4], &algorithms, true).unwrap();
    assert_eq!(sweep_a, sweep_b);
    println!("criterion 8 (determinism, parallel == sequential): PASS");
}
