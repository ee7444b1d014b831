//! Per-attribute and per-row match scores between a query and training rows.
//!
//! Unit scoring: a column contributes one point on an exact symbol match and
//! zero otherwise, so an entry match score is always `A - hamming_distance`.
//! Attribute weights are uniform.

use crate::dataset::QueryEntry;
use crate::error::{Error, Result};

/// 1 iff the two symbols are identical, else 0.
pub fn column_match_score(query_value: &str, entry_value: &str) -> usize {
    usize::from(query_value == entry_value)
}

/// Sum of column match scores over all attribute positions; in `[0, A]`.
pub fn entry_match_score(query: &QueryEntry, row: &[String]) -> Result<usize> {
    if query.len() != row.len() {
        return Err(Error::ArityMismatch {
            expected: row.len(),
            found: query.len(),
        });
    }
    Ok(query
        .values()
        .iter()
        .zip(row)
        .map(|(q, e)| column_match_score(q, e))
        .sum())
}

/// Count of attribute positions where the two rows differ.
pub fn hamming_distance(a: &[String], b: &[String]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::ArityMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}
