//! Concurrent data predictors for categorical attributes.
//!
//! Instead of routing a query down a decision tree one attribute at a time,
//! these classifiers compare every attribute of the query against every
//! training row in a single lazy scan and aggregate the per-row match scores
//! into a work data set. Three variants share that scan:
//!
//! * `deodata_delanga` / `deodata_tbreak_delanga` — majority vote in the
//!   best-matching score list ([`predictors::predict_delanga`]);
//! * `deodata_varsate_*` — impurity-scored cascaded match lists
//!   ([`predictors::predict_varsate`]);
//! * `deodata_rasturnat_pow_*` — cumulative exponential outcome scores
//!   ([`predictors::predict_rasturnat`]).
//!
//! The crate also ships the reference classifiers they are measured against
//! (ID3 without pruning, a random-split tree, a uniform-random control), a
//! derivation pipeline that turns 8x8 digit images into small categorical
//! datasets, and a seeded, reproducible benchmark [`harness`].
//!
//! ```
//! use deodata::dataset::{CategoricalDataset, QueryEntry, TargetColumn};
//! use deodata::predictors::predict_rasturnat;
//!
//! let csv = "a1,b0,c2,t2\na1,b0,c1,t1\na1,b1,c1,t1\n";
//! let train = CategoricalDataset::load_csv(csv.as_bytes(), TargetColumn::Last, false).unwrap();
//! let query = QueryEntry::from_comma_list("a1,b0,c1");
//! let data = predict_rasturnat(&train, &query, 2.0).unwrap();
//! assert_eq!(data.prediction(), "t1");
//! ```

pub mod algorithm;
pub mod baselines;
pub mod dataset;
pub mod digits;
pub mod error;
pub mod harness;
pub mod impurity;
pub mod matching;
pub mod predictors;

pub use algorithm::Algorithm;
pub use dataset::{CategoricalDataset, QueryEntry, TargetColumn};
pub use error::{Error, Result};
pub use predictors::LikelihoodData;

/// A reproducible generator for the randomized baselines and the saturation
/// check.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
