//! Impurity and homogeneity measures over outcome counts.
//!
//! Entropy is base 2. `gini + informational_energy = 1` for every counts
//! value; informational energy is a homogeneity measure (higher is purer),
//! which is why [`ImpurityMeasure::preference_score`] negates entropy and
//! gini but keeps energy as-is.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A multiset of outcome symbols kept as per-symbol counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OutcomeCounts {
    counts: BTreeMap<String, usize>,
    total: usize,
}

impl OutcomeCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_outcomes<'a>(outcomes: impl IntoIterator<Item = &'a str>) -> Self {
        let mut counts = Self::new();
        for outcome in outcomes {
            counts.add(outcome);
        }
        counts
    }

    pub fn add(&mut self, outcome: &str) {
        self.add_count(outcome, 1);
    }

    pub fn add_count(&mut self, outcome: &str, n: usize) {
        if n == 0 {
            return;
        }
        *self.counts.entry(outcome.to_owned()).or_insert(0) += n;
        self.total += n;
    }

    pub fn get(&self, outcome: &str) -> usize {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Number of distinct outcomes with a positive count.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// `(outcome, count)` pairs in token order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// The largest count and the set of outcomes achieving it, in token order.
    pub fn top_outcomes(&self) -> (usize, Vec<&str>) {
        let max = self.counts.values().copied().max().unwrap_or(0);
        let tied = self
            .counts
            .iter()
            .filter(|(_, &c)| c == max && max > 0)
            .map(|(k, _)| k.as_str())
            .collect();
        (max, tied)
    }

    fn probabilities(&self) -> Result<impl Iterator<Item = f64> + '_> {
        if self.is_empty() {
            return Err(Error::EmptyInput("outcome counts"));
        }
        let total = self.total as f64;
        Ok(self.counts.values().map(move |&c| c as f64 / total))
    }
}

impl<'a> FromIterator<&'a str> for OutcomeCounts {
    fn from_iter<T: IntoIterator<Item = &'a str>>(iter: T) -> Self {
        Self::from_outcomes(iter)
    }
}

/// Shannon entropy in bits: `-sum(p_i * log2(p_i))`, with `0 log 0 = 0`.
pub fn entropy(counts: &OutcomeCounts) -> Result<f64> {
    Ok(counts
        .probabilities()?
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum())
}

/// Gini index: `1 - sum(p_i^2)`.
pub fn gini(counts: &OutcomeCounts) -> Result<f64> {
    Ok(1.0 - informational_energy(counts)?)
}

/// Onicescu informational energy: `sum(p_i^2)`. Higher is purer.
pub fn informational_energy(counts: &OutcomeCounts) -> Result<f64> {
    Ok(counts.probabilities()?.map(|p| p * p).sum())
}

/// Impurity measure selected by name: "entropy" | "gini" | "energy".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImpurityMeasure {
    Entropy,
    Gini,
    Energy,
}

impl ImpurityMeasure {
    pub fn evaluate(self, counts: &OutcomeCounts) -> Result<f64> {
        match self {
            Self::Entropy => entropy(counts),
            Self::Gini => gini(counts),
            Self::Energy => informational_energy(counts),
        }
    }

    /// Polarity-normalized score where higher always means "preferred list":
    /// negated entropy, negated gini, raw informational energy.
    pub fn preference_score(self, counts: &OutcomeCounts) -> Result<f64> {
        match self {
            Self::Entropy => Ok(-entropy(counts)?),
            Self::Gini => Ok(-gini(counts)?),
            Self::Energy => informational_energy(counts),
        }
    }
}

impl FromStr for ImpurityMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(Self::Entropy),
            "gini" => Ok(Self::Gini),
            "energy" => Ok(Self::Energy),
            other => Err(Error::UnknownMeasure(other.to_owned())),
        }
    }
}

impl fmt::Display for ImpurityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Entropy => "entropy",
            Self::Gini => "gini",
            Self::Energy => "energy",
        })
    }
}
