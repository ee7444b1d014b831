//! Algorithm identifiers and a uniform fit/predict surface over the lazy
//! predictors and the tree baselines.
//!
//! Identifiers follow the benchmark naming convention:
//! `deodata_delanga`, `deodata_tbreak_delanga`,
//! `deodata_varsate_{entropy,gini,energy}`,
//! `deodata_rasturnat_pow_{2,e,<number>}`, `decision_tree_id3`,
//! `random_tree`, and `uniform_random`.

use std::fmt;

use rand::Rng;

use crate::baselines::{predict_tree, predict_uniform_random, train_id3, train_random_tree, TreeNode};
use crate::dataset::{CategoricalDataset, QueryEntry};
use crate::error::{Error, Result};
use crate::impurity::ImpurityMeasure;
use crate::predictors::{predict_delanga, predict_rasturnat, predict_varsate, LikelihoodData};

/// A classifier selected by name, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    DeodataDelanga,
    DeodataTbreakDelanga,
    DeodataVarsate(ImpurityMeasure),
    /// Exponent base of the swapped variant's score transform; must be > 1.
    DeodataRasturnat(f64),
    DecisionTreeId3,
    RandomTree,
    UniformRandom,
}

impl Algorithm {
    /// The default benchmark set, in the customary reporting order.
    pub fn benchmark_set() -> Vec<Algorithm> {
        vec![
            Algorithm::DeodataRasturnat(std::f64::consts::E),
            Algorithm::DeodataTbreakDelanga,
            Algorithm::DeodataVarsate(ImpurityMeasure::Entropy),
            Algorithm::DeodataDelanga,
            Algorithm::DecisionTreeId3,
            Algorithm::RandomTree,
            Algorithm::UniformRandom,
        ]
    }

    /// Stable textual id, e.g. `deodata_rasturnat_pow_e`.
    pub fn id(&self) -> String {
        match self {
            Self::DeodataDelanga => "deodata_delanga".into(),
            Self::DeodataTbreakDelanga => "deodata_tbreak_delanga".into(),
            Self::DeodataVarsate(measure) => format!("deodata_varsate_{measure}"),
            Self::DeodataRasturnat(base) => {
                if *base == 2.0 {
                    "deodata_rasturnat_pow_2".into()
                } else if *base == std::f64::consts::E {
                    "deodata_rasturnat_pow_e".into()
                } else {
                    format!("deodata_rasturnat_pow_{base}")
                }
            }
            Self::DecisionTreeId3 => "decision_tree_id3".into(),
            Self::RandomTree => "random_tree".into(),
            Self::UniformRandom => "uniform_random".into(),
        }
    }

    /// Parses an algorithm id. The parameterized families also accept their
    /// bare names (`deodata_varsate` means entropy, `deodata_rasturnat`
    /// means base 2).
    pub fn parse(id: &str) -> Result<Algorithm> {
        match id {
            "deodata_delanga" => Ok(Self::DeodataDelanga),
            "deodata_tbreak_delanga" => Ok(Self::DeodataTbreakDelanga),
            "deodata_varsate" => Ok(Self::DeodataVarsate(ImpurityMeasure::Entropy)),
            "deodata_rasturnat" => Ok(Self::DeodataRasturnat(2.0)),
            "decision_tree_id3" => Ok(Self::DecisionTreeId3),
            "random_tree" => Ok(Self::RandomTree),
            "uniform_random" => Ok(Self::UniformRandom),
            _ => {
                if let Some(measure) = id.strip_prefix("deodata_varsate_") {
                    let measure = measure
                        .parse::<ImpurityMeasure>()
                        .map_err(|_| Error::UnknownAlgorithm(id.to_owned()))?;
                    return Ok(Self::DeodataVarsate(measure));
                }
                if let Some(base) = id.strip_prefix("deodata_rasturnat_pow_") {
                    let base = match base {
                        "2" => 2.0,
                        "e" => std::f64::consts::E,
                        other => other
                            .parse::<f64>()
                            .map_err(|_| Error::UnknownAlgorithm(id.to_owned()))?,
                    };
                    if !(base > 1.0) || !base.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "exponent base must be a finite number > 1, got {base}"
                        )));
                    }
                    return Ok(Self::DeodataRasturnat(base));
                }
                Err(Error::UnknownAlgorithm(id.to_owned()))
            }
        }
    }

    /// Whether predictions consume randomness (training randomness counts).
    pub fn is_randomized(&self) -> bool {
        matches!(self, Self::RandomTree | Self::UniformRandom)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// An algorithm bound to a training set. Tree baselines train here once;
/// the lazy predictors just hold a reference to the rows.
pub enum FittedClassifier<'a> {
    Lazy {
        algorithm: Algorithm,
        train: &'a CategoricalDataset,
    },
    Tree(TreeNode),
    Uniform {
        outcomes: Vec<String>,
    },
}

impl<'a> FittedClassifier<'a> {
    /// Binds the algorithm to a training set. Only `random_tree` consumes
    /// the rng, at fit time.
    pub fn fit(
        algorithm: &Algorithm,
        train: &'a CategoricalDataset,
        rng: &mut impl Rng,
    ) -> FittedClassifier<'a> {
        match algorithm {
            Algorithm::DecisionTreeId3 => Self::Tree(train_id3(train)),
            Algorithm::RandomTree => Self::Tree(train_random_tree(train, rng)),
            Algorithm::UniformRandom => Self::Uniform {
                outcomes: train.distinct_outcomes(),
            },
            lazy => Self::Lazy {
                algorithm: lazy.clone(),
                train,
            },
        }
    }

    /// Predicts one query. Only `uniform_random` consumes the rng here.
    pub fn predict(&self, query: &QueryEntry, rng: &mut impl Rng) -> Result<LikelihoodData> {
        match self {
            Self::Lazy { algorithm, train } => match algorithm {
                Algorithm::DeodataDelanga => predict_delanga(train, query, false),
                Algorithm::DeodataTbreakDelanga => predict_delanga(train, query, true),
                Algorithm::DeodataVarsate(measure) => predict_varsate(train, query, *measure),
                Algorithm::DeodataRasturnat(base) => predict_rasturnat(train, query, *base),
                other => unreachable!("{other} is not a lazy predictor"),
            },
            Self::Tree(tree) => predict_tree(tree, query),
            Self::Uniform { outcomes } => {
                let outcome = predict_uniform_random(outcomes, rng)?;
                Ok(LikelihoodData {
                    entries: vec![(outcome, 1.0)],
                    tie_broken: false,
                    selected_level: 0,
                })
            }
        }
    }
}
