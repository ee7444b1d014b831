//! Seeded benchmark harness: accuracy experiments over digit-derived
//! categorical datasets, convergence sweeps over the training size, and the
//! saturated-universe agreement check.
//!
//! Every trial draws its own pixel selection and train/test split from a
//! stream derived from `(master seed, purpose, trial index)`, so trials are
//! independent, adding algorithms to a run never changes the derived
//! datasets, and parallel execution is bitwise identical to sequential.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithm::{Algorithm, FittedClassifier};
use crate::baselines::{predict_tree, train_id3, train_random_tree};
use crate::dataset::{CategoricalDataset, QueryEntry};
use crate::digits::{derive_experiment_dataset, DerivationConfig, DigitImage};
use crate::error::{Error, Result};
use crate::predictors::predict_delanga;

const DERIVATION_STREAM: &str = "derivation";

fn fnv1a(text: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for byte in text.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// An independent, reproducible generator for one `(purpose, trial)` pair.
fn stream_rng(seed: u64, purpose: &str, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(purpose));
    rng.set_stream(trial);
    rng
}

/// One row of the accuracy table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmScore {
    #[serde(rename = "algorithm id")]
    pub algorithm: String,
    pub errors: u64,
    pub tests: u64,
    #[serde(rename = "error rate")]
    pub error_rate: f64,
    pub accuracy: f64,
}

impl AlgorithmScore {
    pub fn new(algorithm: String, errors: u64, tests: u64) -> Self {
        debug_assert!(errors <= tests && tests > 0);
        let error_rate = errors as f64 / tests as f64;
        Self {
            algorithm,
            errors,
            tests,
            error_rate,
            accuracy: 1.0 - error_rate,
        }
    }
}

/// Per-algorithm error/accuracy accounting for one experiment. All rows
/// share the same test count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExperimentResult {
    pub scores: Vec<AlgorithmScore>,
}

impl ExperimentResult {
    pub fn score(&self, algorithm_id: &str) -> Option<&AlgorithmScore> {
        self.scores.iter().find(|s| s.algorithm == algorithm_id)
    }

    pub fn accuracy(&self, algorithm_id: &str) -> Option<f64> {
        self.score(algorithm_id).map(|s| s.accuracy)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(["algorithm id", "errors", "tests", "error rate", "accuracy"])?;
        for s in &self.scores {
            writer.write_record([
                s.algorithm.as_str(),
                &s.errors.to_string(),
                &s.tests.to_string(),
                &s.error_rate.to_string(),
                &s.accuracy.to_string(),
            ])?;
        }
        Ok(String::from_utf8(writer.into_inner().expect("in-memory writer")).expect("utf8"))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        {
            let headers = reader.headers()?;
            let expected = ["algorithm id", "errors", "tests", "error rate", "accuracy"];
            if headers.iter().ne(expected) {
                return Err(Error::MalformedResult(format!(
                    "unexpected header {headers:?}"
                )));
            }
        }
        let mut scores = Vec::new();
        for record in reader.records() {
            let record = record?;
            let field = |i: usize| -> Result<&str> {
                record
                    .get(i)
                    .ok_or_else(|| Error::MalformedResult("short record".into()))
            };
            scores.push(AlgorithmScore {
                algorithm: field(0)?.to_owned(),
                errors: field(1)?
                    .parse()
                    .map_err(|e| Error::MalformedResult(format!("errors: {e}")))?,
                tests: field(2)?
                    .parse()
                    .map_err(|e| Error::MalformedResult(format!("tests: {e}")))?,
                error_rate: field(3)?
                    .parse()
                    .map_err(|e| Error::MalformedResult(format!("error rate: {e}")))?,
                accuracy: field(4)?
                    .parse()
                    .map_err(|e| Error::MalformedResult(format!("accuracy: {e}")))?,
            });
        }
        Ok(Self { scores })
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// The summary table printed by the command-line driver.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let width = self
            .scores
            .iter()
            .map(|s| s.algorithm.len())
            .max()
            .unwrap_or(12)
            .max("algorithm id".len());
        out.push_str(&format!(
            "{:<width$}  {:>10}  {:>10}  {:>12}  {:>12}\n",
            "algorithm id", "errors", "tests", "error rate", "accuracy"
        ));
        for s in &self.scores {
            out.push_str(&format!(
                "{:<width$}  {:>10}  {:>10}  {:>12.9}  {:>12.9}\n",
                s.algorithm, s.errors, s.tests, s.error_rate, s.accuracy
            ));
        }
        out
    }
}

/// Accuracy per algorithm at each training size.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceResult {
    pub algorithms: Vec<String>,
    pub rows: Vec<ConvergenceRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub per_outcome_train_no: usize,
    /// Aligned with `ConvergenceResult::algorithms`.
    pub accuracies: Vec<f64>,
}

impl ConvergenceResult {
    pub fn accuracy(&self, size: usize, algorithm_id: &str) -> Option<f64> {
        let col = self.algorithms.iter().position(|a| a == algorithm_id)?;
        let row = self.rows.iter().find(|r| r.per_outcome_train_no == size)?;
        row.accuracies.get(col).copied()
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["per outcome train no".to_owned()];
        header.extend(self.algorithms.iter().cloned());
        writer.write_record(&header)?;
        for row in &self.rows {
            let mut record = vec![row.per_outcome_train_no.to_string()];
            record.extend(row.accuracies.iter().map(f64::to_string));
            writer.write_record(&record)?;
        }
        Ok(String::from_utf8(writer.into_inner().expect("in-memory writer")).expect("utf8"))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let algorithms: Vec<String> = {
            let headers = reader.headers()?;
            if headers.get(0) != Some("per outcome train no") {
                return Err(Error::MalformedResult(format!(
                    "unexpected header {headers:?}"
                )));
            }
            headers.iter().skip(1).map(str::to_owned).collect()
        };
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            if record.len() != algorithms.len() + 1 {
                return Err(Error::MalformedResult("short record".into()));
            }
            rows.push(ConvergenceRow {
                per_outcome_train_no: record[0]
                    .parse()
                    .map_err(|e| Error::MalformedResult(format!("size: {e}")))?,
                accuracies: record
                    .iter()
                    .skip(1)
                    .map(|f| {
                        f.parse()
                            .map_err(|e| Error::MalformedResult(format!("accuracy: {e}")))
                    })
                    .collect::<Result<Vec<f64>>>()?,
            });
        }
        Ok(Self { algorithms, rows })
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut out: Vec<serde_json::Value> = Vec::new();
        for row in &self.rows {
            let mut map = serde_json::Map::new();
            map.insert(
                "per outcome train no".to_owned(),
                serde_json::json!(row.per_outcome_train_no),
            );
            for (algorithm, accuracy) in self.algorithms.iter().zip(&row.accuracies) {
                map.insert(algorithm.clone(), serde_json::json!(accuracy));
            }
            out.push(serde_json::Value::Object(map));
        }
        Ok(serde_json::to_string_pretty(&out)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = serde_json::from_str(text)?;
        let mut algorithms: Vec<String> = Vec::new();
        let mut parsed = Vec::new();
        for (i, map) in rows.iter().enumerate() {
            let size = map
                .get("per outcome train no")
                .and_then(serde_json::Value::as_u64)
                .ok_or_else(|| Error::MalformedResult("missing train size".into()))?;
            let row_algorithms: Vec<String> = map
                .keys()
                .filter(|k| *k != "per outcome train no")
                .cloned()
                .collect();
            if i == 0 {
                algorithms = row_algorithms;
            } else if algorithms != row_algorithms {
                return Err(Error::MalformedResult("inconsistent algorithm columns".into()));
            }
            let accuracies = algorithms
                .iter()
                .map(|a| {
                    map[a]
                        .as_f64()
                        .ok_or_else(|| Error::MalformedResult(format!("{a}: not a number")))
                })
                .collect::<Result<Vec<f64>>>()?;
            parsed.push(ConvergenceRow {
                per_outcome_train_no: size as usize,
                accuracies,
            });
        }
        Ok(Self {
            algorithms,
            rows: parsed,
        })
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:>20}", "per outcome train no"));
        for a in &self.algorithms {
            out.push_str(&format!("  {a:>24}"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{:>20}", row.per_outcome_train_no));
            for acc in &row.accuracies {
                out.push_str(&format!("  {acc:>24.9}"));
            }
            out.push('\n');
        }
        out
    }
}

struct TrialTally {
    errors: Vec<u64>,
    tests: u64,
}

fn run_trial(
    raw: &[DigitImage],
    config: &DerivationConfig,
    algorithms: &[Algorithm],
    trial: u64,
) -> Result<TrialTally> {
    let mut data_rng = stream_rng(config.seed, DERIVATION_STREAM, trial);
    let split = derive_experiment_dataset(raw, config, &mut data_rng)?;
    let queries: Vec<QueryEntry> = (0..split.test.row_count())
        .map(|i| split.test.row_as_query(i))
        .collect();

    let mut errors = vec![0u64; algorithms.len()];
    for (slot, algorithm) in algorithms.iter().enumerate() {
        let mut alg_rng = stream_rng(config.seed, &algorithm.id(), trial);
        let fitted = FittedClassifier::fit(algorithm, &split.train, &mut alg_rng);
        for (query, truth) in queries.iter().zip(split.test.outcomes()) {
            let prediction = fitted.predict(query, &mut alg_rng)?;
            if prediction.prediction() != truth {
                errors[slot] += 1;
            }
        }
    }
    Ok(TrialTally {
        errors,
        tests: split.test.row_count() as u64,
    })
}

/// Runs `config.trials` independent trials and aggregates error counts per
/// algorithm. Within a trial every algorithm sees the same train/test pair.
pub fn run_accuracy_experiment(
    raw: &[DigitImage],
    config: &DerivationConfig,
    algorithms: &[Algorithm],
    parallel: bool,
) -> Result<ExperimentResult> {
    if algorithms.is_empty() {
        return Err(Error::EmptyInput("algorithm list"));
    }
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    config.validate()?;

    let trials: Vec<u64> = (0..config.trials as u64).collect();
    let tallies: Vec<TrialTally> = if parallel {
        trials
            .par_iter()
            .map(|&t| run_trial(raw, config, algorithms, t))
            .collect::<Result<Vec<_>>>()?
    } else {
        trials
            .iter()
            .map(|&t| run_trial(raw, config, algorithms, t))
            .collect::<Result<Vec<_>>>()?
    };

    let mut errors = vec![0u64; algorithms.len()];
    let mut tests = 0u64;
    for tally in &tallies {
        tests += tally.tests;
        for (slot, e) in tally.errors.iter().enumerate() {
            errors[slot] += e;
        }
    }
    Ok(ExperimentResult {
        scores: algorithms
            .iter()
            .zip(errors)
            .map(|(a, e)| AlgorithmScore::new(a.id(), e, tests))
            .collect(),
    })
}

/// One accuracy experiment per training size, sharing the master seed so the
/// per-trial derivation streams line up across sizes.
pub fn run_convergence_sweep(
    raw: &[DigitImage],
    config: &DerivationConfig,
    sizes: &[usize],
    algorithms: &[Algorithm],
    parallel: bool,
) -> Result<ConvergenceResult> {
    if sizes.is_empty() {
        return Err(Error::EmptyInput("size list"));
    }
    if !sizes.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter(
            "training sizes must be strictly increasing".into(),
        ));
    }
    let mut rows = Vec::new();
    for &size in sizes {
        let mut sized = config.clone();
        sized.per_outcome_train_count = size;
        let result = run_accuracy_experiment(raw, &sized, algorithms, parallel)?;
        rows.push(ConvergenceRow {
            per_outcome_train_no: size,
            accuracies: result.scores.iter().map(|s| s.accuracy).collect(),
        });
    }
    Ok(ConvergenceResult {
        algorithms: algorithms.iter().map(Algorithm::id).collect(),
        rows,
    })
}

/// An outcome distribution with a unique mode.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pairs: Vec<(String, f64)>,
}

impl OutcomeDistribution {
    pub fn new(pairs: Vec<(String, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyInput("outcome distribution"));
        }
        if pairs.iter().any(|(_, p)| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter("probabilities must be in [0, 1]".into()));
        }
        let total: f64 = pairs.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let max = pairs.iter().map(|(_, p)| *p).fold(f64::NEG_INFINITY, f64::max);
        if pairs.iter().filter(|(_, p)| *p == max).count() != 1 {
            return Err(Error::InvalidParameter("distribution mode must be unique".into()));
        }
        Ok(Self { pairs })
    }

    /// A point mass on one outcome.
    pub fn point_mass(outcome: &str) -> Self {
        Self {
            pairs: vec![(outcome.to_owned(), 1.0)],
        }
    }

    pub fn mode(&self) -> &str {
        let max = self
            .pairs
            .iter()
            .map(|(_, p)| *p)
            .fold(f64::NEG_INFINITY, f64::max);
        &self.pairs.iter().find(|(_, p)| *p == max).unwrap().0
    }

    fn sample(&self, rng: &mut impl Rng) -> &str {
        let roll: f64 = rng.random();
        let mut cumulative = 0.0;
        for (outcome, p) in &self.pairs {
            cumulative += p;
            if roll < cumulative {
                return outcome;
            }
        }
        &self.pairs.last().unwrap().0
    }
}

/// A complete enumeration of attribute-value combinations with one outcome
/// distribution per combination.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturationUniverse {
    attribute_values: Vec<Vec<String>>,
    combinations: Vec<Vec<String>>,
    distributions: Vec<OutcomeDistribution>,
}

impl SaturationUniverse {
    pub fn new(
        attribute_values: Vec<Vec<String>>,
        distributions: Vec<OutcomeDistribution>,
    ) -> Result<Self> {
        if attribute_values.is_empty() || attribute_values.iter().any(Vec::is_empty) {
            return Err(Error::EmptyInput("attribute value alphabets"));
        }
        let combinations = cartesian_product(&attribute_values);
        if distributions.len() != combinations.len() {
            return Err(Error::InvalidParameter(format!(
                "{} distributions for {} combinations",
                distributions.len(),
                combinations.len()
            )));
        }
        Ok(Self {
            attribute_values,
            combinations,
            distributions,
        })
    }

    /// Builds alphabets `v0..v(c-1)` for the given cardinalities and assigns
    /// outcome modes round-robin over the combinations, each mode holding
    /// `mode_mass` with the remainder split evenly.
    pub fn with_round_robin_modes(
        cardinalities: &[usize],
        outcomes: &[String],
        mode_mass: f64,
    ) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::EmptyInput("outcome symbols"));
        }
        if outcomes.len() == 1 && mode_mass < 1.0 {
            return Err(Error::InvalidParameter(
                "a single outcome requires mode mass 1".into(),
            ));
        }
        let attribute_values: Vec<Vec<String>> = cardinalities
            .iter()
            .map(|&c| (0..c).map(|v| format!("v{v}")).collect())
            .collect();
        let combinations = cartesian_product(&attribute_values);
        let rest = (1.0 - mode_mass) / (outcomes.len() as f64 - 1.0).max(1.0);
        let distributions = (0..combinations.len())
            .map(|i| {
                let mode = &outcomes[i % outcomes.len()];
                if mode_mass >= 1.0 {
                    Ok(OutcomeDistribution::point_mass(mode))
                } else {
                    OutcomeDistribution::new(
                        outcomes
                            .iter()
                            .map(|o| (o.clone(), if o == mode { mode_mass } else { rest }))
                            .collect(),
                    )
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(attribute_values, distributions)
    }

    pub fn combinations(&self) -> &[Vec<String>] {
        &self.combinations
    }

    pub fn distributions(&self) -> &[OutcomeDistribution] {
        &self.distributions
    }
}

fn cartesian_product(alphabets: &[Vec<String>]) -> Vec<Vec<String>> {
    let mut combos: Vec<Vec<String>> = vec![Vec::new()];
    for alphabet in alphabets {
        let mut next = Vec::with_capacity(combos.len() * alphabet.len());
        for combo in &combos {
            for value in alphabet {
                let mut extended = combo.clone();
                extended.push(value.clone());
                next.push(extended);
            }
        }
        combos = next;
    }
    combos
}

/// Per-algorithm fraction of queries whose prediction hits the combination's
/// true mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaturationScore {
    #[serde(rename = "algorithm id")]
    pub algorithm: String,
    pub matches: u64,
    pub queries: u64,
    pub agreement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SaturationReport {
    pub scores: Vec<SaturationScore>,
}

impl SaturationReport {
    pub fn agreement(&self, algorithm_id: &str) -> Option<f64> {
        self.scores
            .iter()
            .find(|s| s.algorithm == algorithm_id)
            .map(|s| s.agreement)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(["algorithm id", "matches", "queries", "agreement"])?;
        for s in &self.scores {
            writer.write_record([
                s.algorithm.as_str(),
                &s.matches.to_string(),
                &s.queries.to_string(),
                &s.agreement.to_string(),
            ])?;
        }
        Ok(String::from_utf8(writer.into_inner().expect("in-memory writer")).expect("utf8"))
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn render_table(&self) -> String {
        let mut out = format!(
            "{:<24}  {:>8}  {:>8}  {:>10}\n",
            "algorithm id", "matches", "queries", "agreement"
        );
        for s in &self.scores {
            out.push_str(&format!(
                "{:<24}  {:>8}  {:>8}  {:>10.6}\n",
                s.algorithm, s.matches, s.queries, s.agreement
            ));
        }
        out
    }
}

/// Builds a training set replicating every combination `replication` times
/// with outcomes drawn from its distribution, then checks for every
/// combination whether the tie-breaking proximity predictor, ID3, and the
/// random tree recover the distribution's mode.
///
/// The rng is consumed in a fixed order: all outcome draws in combination
/// order, then the random tree's attribute choices.
pub fn run_saturation_check(
    universe: &SaturationUniverse,
    replication: usize,
    rng: &mut impl Rng,
) -> Result<SaturationReport> {
    if replication == 0 {
        return Err(Error::InvalidParameter(
            "replication must be at least 1".into(),
        ));
    }

    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    for (combo, dist) in universe.combinations.iter().zip(&universe.distributions) {
        for _ in 0..replication {
            rows.push(combo.clone());
            outcomes.push(dist.sample(rng).to_owned());
        }
    }
    let names: Vec<String> = (0..universe.attribute_values.len())
        .map(|i| format!("a{i}"))
        .collect();
    let train = CategoricalDataset::new(names, "outcome".to_owned(), rows, outcomes)?;

    let id3 = train_id3(&train);
    let random = train_random_tree(&train, rng);

    let mut matches = [0u64; 3];
    for (combo, dist) in universe.combinations.iter().zip(&universe.distributions) {
        let query = QueryEntry::new(combo.clone());
        let mode = dist.mode();
        let predictions = [
            predict_delanga(&train, &query, true)?.prediction().to_owned(),
            predict_tree(&id3, &query)?.prediction().to_owned(),
            predict_tree(&random, &query)?.prediction().to_owned(),
        ];
        for (slot, prediction) in predictions.iter().enumerate() {
            if prediction == mode {
                matches[slot] += 1;
            }
        }
    }

    let queries = universe.combinations.len() as u64;
    let ids = ["deodata_tbreak_delanga", "decision_tree_id3", "random_tree"];
    Ok(SaturationReport {
        scores: ids
            .iter()
            .zip(matches)
            .map(|(id, m)| SaturationScore {
                algorithm: (*id).to_owned(),
                matches: m,
                queries,
                agreement: m as f64 / queries as f64,
            })
            .collect(),
    })
}

/// Writes `text` to a file, creating parent directories as needed.
pub fn write_text_file(path: &std::path::Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}
