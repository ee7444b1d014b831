//! Shared fixtures and independent oracles for the integration tests.
//!
//! Everything in here deliberately avoids the library's matching and
//! predictor code paths so it can serve as a cross-check.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use deodata::dataset::{CategoricalDataset, TargetColumn};

/// The six-attribute, eight-row worked example.
pub const GOLDEN_CSV: &str = "\
a1,b0,c2,d2,e2,f1,t2
a1,b0,c2,d0,e0,f1,t1
a1,b0,c1,d0,e0,f0,t0
a1,b0,c1,d1,e1,f2,t2
a1,b0,c1,d2,e2,f0,t2
a1,b1,c2,d0,e0,f1,t1
a1,b0,c2,d0,e0,f2,t0
a1,b0,c1,d0,e0,f2,t1
";

pub const GOLDEN_QUERY: &str = "a1,b2,c1,d0,e1,f2";

pub fn golden_train() -> CategoricalDataset {
    CategoricalDataset::load_csv(GOLDEN_CSV.as_bytes(), TargetColumn::Last, false).unwrap()
}

/// Path to the bundled digits CSV, resolved from the crate directory.
pub fn digits_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/digits.csv")
}

/// A randomly generated small classification instance.
pub struct RandomInstance {
    pub rows: Vec<Vec<String>>,
    pub outcomes: Vec<String>,
    pub query: Vec<String>,
}

/// Draws an instance with up to `max_attrs` attributes of up to 3 values
/// each, up to 20 rows, and a query that may contain unseen symbols.
pub fn random_instance(rng: &mut ChaCha8Rng, max_attrs: usize) -> RandomInstance {
    let attrs = rng.random_range(1..=max_attrs);
    let rows_n = rng.random_range(1..=20);
    let outcome_n = rng.random_range(1..=4);
    let cardinalities: Vec<usize> = (0..attrs).map(|_| rng.random_range(1..=3)).collect();

    let mut rows = Vec::with_capacity(rows_n);
    let mut outcomes = Vec::with_capacity(rows_n);
    for _ in 0..rows_n {
        rows.push(
            cardinalities
                .iter()
                .map(|&c| format!("v{}", rng.random_range(0..c)))
                .collect(),
        );
        outcomes.push(format!("o{}", rng.random_range(0..outcome_n)));
    }
    // one value in twelve falls outside every training alphabet
    let query = cardinalities
        .iter()
        .map(|&c| {
            if rng.random_range(0..12) == 0 {
                "unseen".to_owned()
            } else {
                format!("v{}", rng.random_range(0..c))
            }
        })
        .collect();
    RandomInstance {
        rows,
        outcomes,
        query,
    }
}

impl RandomInstance {
    pub fn dataset(&self) -> CategoricalDataset {
        let names = (0..self.rows[0].len()).map(|i| format!("a{i}")).collect();
        CategoricalDataset::new(names, "outcome".into(), self.rows.clone(), self.outcomes.clone())
            .unwrap()
    }
}

/// Brute-force nearest-neighborhood vote: collects all rows at minimal
/// Hamming distance from the query and takes the plurality outcome. Ties
/// optionally descend through the next-closest neighborhoods, narrowing to
/// the maximal-count subset at each inhabited distance; the last resort is
/// the highest overall outcome frequency, then the smallest token.
pub fn nearest_neighborhood_oracle(
    rows: &[Vec<String>],
    outcomes: &[String],
    query: &[String],
    descend_on_ties: bool,
) -> String {
    // group row outcomes by Hamming distance
    let mut by_distance: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for (row, outcome) in rows.iter().zip(outcomes) {
        let mut distance = 0;
        for (a, b) in row.iter().zip(query) {
            if a != b {
                distance += 1;
            }
        }
        by_distance.entry(distance).or_default().push(outcome);
    }

    let mut global: BTreeMap<&str, usize> = BTreeMap::new();
    for outcome in outcomes {
        *global.entry(outcome).or_insert(0) += 1;
    }
    let fallback = |tied: &[&str]| -> String {
        tied.iter()
            .min_by(|a, b| {
                global[*b]
                    .cmp(&global[*a])
                    .then_with(|| a.cmp(b))
            })
            .unwrap()
            .to_string()
    };

    let mut neighborhoods = by_distance.values();
    let nearest = neighborhoods.next().expect("at least one row");
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for outcome in nearest {
        *counts.entry(outcome).or_insert(0) += 1;
    }
    let best = *counts.values().max().unwrap();
    let mut tied: Vec<&str> = counts
        .iter()
        .filter(|(_, &c)| c == best)
        .map(|(o, _)| *o)
        .collect();
    if tied.len() == 1 {
        return tied[0].to_owned();
    }
    if !descend_on_ties {
        return fallback(&tied);
    }
    for neighborhood in neighborhoods {
        let mut local: BTreeMap<&str, usize> = tied.iter().map(|&o| (o, 0)).collect();
        let mut inhabited = false;
        for outcome in neighborhood {
            if let Some(c) = local.get_mut(*outcome) {
                *c += 1;
                inhabited = true;
            }
        }
        if !inhabited {
            continue;
        }
        let best = *local.values().max().unwrap();
        tied = local
            .into_iter()
            .filter(|&(_, c)| c == best)
            .map(|(o, _)| o)
            .collect();
        if tied.len() == 1 {
            return tied[0].to_owned();
        }
    }
    fallback(&tied)
}
