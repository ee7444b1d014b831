//! The three concurrent data predictor variants.
//!
//! All of them are lazy: a prediction is one pass over the training rows
//! comparing every attribute against the query at once, followed by a small
//! amount of work on the aggregated structure.
//!
//! * [`predict_delanga`] (proximity): majority vote in the best-matching
//!   score list, optionally descending into lower lists to break ties.
//! * [`predict_varsate`] (cascading): accumulates the score lists top-down
//!   into increasingly inclusive lists and votes in the one with the best
//!   impurity-based predictive score.
//! * [`predict_rasturnat`] (swapped): accumulates `base^match_score` per
//!   outcome and ranks outcomes by the cumulative score.
//!
//! Every tie anywhere bottoms out in the same deterministic fallback:
//! highest overall training-set frequency, then smallest outcome token.

use std::collections::BTreeMap;

use crate::dataset::{CategoricalDataset, QueryEntry};
use crate::error::{Error, Result};
use crate::impurity::{ImpurityMeasure, OutcomeCounts};
use crate::matching::entry_match_score;

/// The work data set of the proximity and cascading variants: one multiset of
/// training outcomes per observed entry match score.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchScoreLists {
    lists: BTreeMap<usize, Vec<String>>,
}

impl MatchScoreLists {
    /// One pass over the training rows: row `r` contributes its outcome to
    /// the list keyed by `entry_match_score(query, r)`.
    pub fn build(train: &CategoricalDataset, query: &QueryEntry) -> Result<Self> {
        train.check_arity(query)?;
        let mut lists: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (row, outcome) in train.entries() {
            let score = entry_match_score(query, row)?;
            lists.entry(score).or_default().push(outcome.to_owned());
        }
        Ok(Self { lists })
    }

    /// The outcomes recorded at one score, in row order.
    pub fn get(&self, score: usize) -> Option<&[String]> {
        self.lists.get(&score).map(Vec::as_slice)
    }

    /// Scores that actually occurred, ascending.
    pub fn scores(&self) -> impl Iterator<Item = usize> + '_ {
        self.lists.keys().copied()
    }

    /// `(score, outcomes)` pairs ordered by descending score; index 0 is the
    /// best-matching list.
    pub fn ordered_descending(&self) -> Vec<(usize, &[String])> {
        self.lists
            .iter()
            .rev()
            .map(|(&score, outcomes)| (score, outcomes.as_slice()))
            .collect()
    }

    /// Total outcomes across all lists; equals the training row count.
    pub fn total_outcomes(&self) -> usize {
        self.lists.values().map(Vec::len).sum()
    }
}

/// Cascaded match lists: level `i` is the union (as a multiset) of the lists
/// with the `i + 1` highest observed scores, so each level contains the one
/// above it and the last level holds every training outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadedMatchLists {
    levels: Vec<Vec<String>>,
}

impl CascadedMatchLists {
    pub fn from_lists(lists: &MatchScoreLists) -> Self {
        let mut levels = Vec::new();
        let mut accumulated: Vec<String> = Vec::new();
        for (_, outcomes) in lists.ordered_descending() {
            accumulated.extend(outcomes.iter().cloned());
            levels.push(accumulated.clone());
        }
        Self { levels }
    }

    pub fn level(&self, index: usize) -> &[String] {
        &self.levels[index]
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[String]> {
        self.levels.iter().map(Vec::as_slice)
    }
}

/// The work data set of the swapped variant: a cumulative real score per
/// training outcome. Every outcome present in the training data has an entry
/// and every score is at least 1 (a row contributes `base^score >= base^0`).
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeScores {
    scores: BTreeMap<String, f64>,
}

impl OutcomeScores {
    /// One pass over the training rows: row `r` adds `base^match_score` to
    /// its outcome's cumulative score.
    pub fn build(train: &CategoricalDataset, query: &QueryEntry, base: f64) -> Result<Self> {
        if !(base > 1.0) || !base.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "exponent base must be a finite number > 1, got {base}"
            )));
        }
        train.check_arity(query)?;
        let mut scores: BTreeMap<String, f64> = BTreeMap::new();
        for (row, outcome) in train.entries() {
            let score = entry_match_score(query, row)?;
            *scores.entry(outcome.to_owned()).or_insert(0.0) += base.powi(score as i32);
        }
        Ok(Self { scores })
    }

    pub fn get(&self, outcome: &str) -> Option<f64> {
        self.scores.get(outcome).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.scores.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// Ordered outcome/score pairs produced by every predictor. The head is the
/// prediction; `tie_broken` records whether the top of the ranking had to be
/// resolved by a tie policy; `selected_level` says which list or level the
/// likelihoods came from (tree predictions store the node depth).
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodData {
    pub entries: Vec<(String, f64)>,
    pub tie_broken: bool,
    pub selected_level: usize,
}

impl LikelihoodData {
    pub fn prediction(&self) -> &str {
        &self.entries[0].0
    }

    /// Builds the ranking from counts or scores: descending score, ties in
    /// token order, with the elected winner moved to the front.
    pub(crate) fn from_scores(
        scores: impl IntoIterator<Item = (String, f64)>,
        winner: &str,
        tie_broken: bool,
        selected_level: usize,
    ) -> Self {
        let mut entries: Vec<(String, f64)> = scores.into_iter().collect();
        entries.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        if let Some(pos) = entries.iter().position(|(o, _)| o == winner) {
            let head = entries.remove(pos);
            entries.insert(0, head);
        }
        Self {
            entries,
            tie_broken,
            selected_level,
        }
    }

    pub(crate) fn from_counts(
        counts: &OutcomeCounts,
        winner: &str,
        tie_broken: bool,
        selected_level: usize,
    ) -> Self {
        Self::from_scores(
            counts.iter().map(|(o, c)| (o.to_owned(), c as f64)),
            winner,
            tie_broken,
            selected_level,
        )
    }
}

/// The deterministic last-resort tie rule shared by every predictor and the
/// tree baselines: highest overall training-set frequency wins, then the
/// lexicographically smallest token.
pub fn fallback_winner<'a>(
    tied: impl IntoIterator<Item = &'a str>,
    global: &OutcomeCounts,
) -> String {
    tied.into_iter()
        .max_by(|a, b| {
            global
                .get(a)
                .cmp(&global.get(b))
                .then_with(|| b.cmp(a)) // equal frequencies: smaller token ranks higher
        })
        .expect("fallback_winner called with an empty tie set")
        .to_owned()
}

/// Resolves a tie by scanning the match score lists below `start_level` in
/// descending-score order. A list containing none of the tied outcomes is
/// skipped; otherwise the tie set narrows to the outcomes with the maximal
/// count in that list and the scan continues until one outcome remains. If
/// the lists run out, the global fallback rule decides.
pub fn tie_break_descend(
    ordered_lists: &[(usize, &[String])],
    tied: &[&str],
    start_level: usize,
    global: &OutcomeCounts,
) -> String {
    debug_assert!(tied.len() >= 2);
    let mut tied: Vec<&str> = tied.to_vec();
    for (_, list) in ordered_lists.iter().skip(start_level + 1) {
        let mut counts: BTreeMap<&str, usize> = tied.iter().map(|&o| (o, 0)).collect();
        let mut seen_any = false;
        for outcome in list.iter() {
            if let Some(c) = counts.get_mut(outcome.as_str()) {
                *c += 1;
                seen_any = true;
            }
        }
        if !seen_any {
            continue;
        }
        let best = counts.values().copied().max().unwrap();
        tied = counts
            .into_iter()
            .filter(|&(_, c)| c == best)
            .map(|(o, _)| o)
            .collect();
        if tied.len() == 1 {
            return tied[0].to_owned();
        }
    }
    fallback_winner(tied, global)
}

/// Proximity variant: the likelihoods are the outcome counts of the
/// highest-score list. With `tie_break` on, count ties descend into the
/// lower lists; with it off, the global fallback applies immediately.
pub fn predict_delanga(
    train: &CategoricalDataset,
    query: &QueryEntry,
    tie_break: bool,
) -> Result<LikelihoodData> {
    let lists = MatchScoreLists::build(train, query)?;
    let ordered = lists.ordered_descending();
    let counts = OutcomeCounts::from_outcomes(ordered[0].1.iter().map(String::as_str));
    let (_, top) = counts.top_outcomes();

    let (winner, tie_broken) = if top.len() > 1 {
        let global = train.outcome_counts();
        let winner = if tie_break {
            tie_break_descend(&ordered, &top, 0, &global)
        } else {
            fallback_winner(top.iter().copied(), &global)
        };
        (winner, true)
    } else {
        (top[0].to_owned(), false)
    };

    Ok(LikelihoodData::from_counts(&counts, &winner, tie_broken, 0))
}

/// Cascading variant: scores every cascaded match list with the
/// polarity-normalized measure, keeps the maximum (earliest level on score
/// ties), and votes in that list. Count ties descend through the match score
/// lists below the selected level.
pub fn predict_varsate(
    train: &CategoricalDataset,
    query: &QueryEntry,
    measure: ImpurityMeasure,
) -> Result<LikelihoodData> {
    let lists = MatchScoreLists::build(train, query)?;
    let ordered = lists.ordered_descending();
    let cascades = CascadedMatchLists::from_lists(&lists);

    let mut selected = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (level, list) in cascades.iter().enumerate() {
        let counts = OutcomeCounts::from_outcomes(list.iter().map(String::as_str));
        let score = measure.preference_score(&counts)?;
        if score > best_score {
            best_score = score;
            selected = level;
        }
    }

    let counts =
        OutcomeCounts::from_outcomes(cascades.level(selected).iter().map(String::as_str));
    let (_, top) = counts.top_outcomes();
    let (winner, tie_broken) = if top.len() > 1 {
        let global = train.outcome_counts();
        (tie_break_descend(&ordered, &top, selected, &global), true)
    } else {
        (top[0].to_owned(), false)
    };

    Ok(LikelihoodData::from_counts(&counts, &winner, tie_broken, selected))
}

/// Swapped variant: ranks outcomes by the cumulative `base^match_score`
/// total. Exact score ties resolve by the global fallback rule.
pub fn predict_rasturnat(
    train: &CategoricalDataset,
    query: &QueryEntry,
    base: f64,
) -> Result<LikelihoodData> {
    let scores = OutcomeScores::build(train, query, base)?;
    let best = scores
        .iter()
        .map(|(_, s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<&str> = scores
        .iter()
        .filter(|&(_, s)| s == best)
        .map(|(o, _)| o)
        .collect();

    let (winner, tie_broken) = if top.len() > 1 {
        let global = train.outcome_counts();
        (fallback_winner(top.iter().copied(), &global), true)
    } else {
        (top[0].to_owned(), false)
    };

    Ok(LikelihoodData::from_scores(
        scores.iter().map(|(o, s)| (o.to_owned(), s)),
        &winner,
        tie_broken,
        0,
    ))
}

/// The six-attribute, eight-row worked example used by tests across the
/// crate.
#[cfg(test)]
pub(crate) const GOLDEN_CSV: &str = "\
a1,b0,c2,d2,e2,f1,t2
a1,b0,c2,d0,e0,f1,t1
a1,b0,c1,d0,e0,f0,t0
a1,b0,c1,d1,e1,f2,t2
a1,b0,c1,d2,e2,f0,t2
a1,b1,c2,d0,e0,f1,t1
a1,b0,c2,d0,e0,f2,t0
a1,b0,c1,d0,e0,f2,t1
";
