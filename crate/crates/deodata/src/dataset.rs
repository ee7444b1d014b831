//! Categorical training tables and query entries.
//!
//! Every value is an opaque text symbol compared by exact, case-sensitive
//! equality. There are no ordering semantics and no missing values; an empty
//! field is just the empty symbol.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::impurity::OutcomeCounts;

/// Which CSV column holds the target outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetColumn {
    Last,
    Index(usize),
}

/// A table of categorical symbols (N rows x A attributes) plus one outcome
/// symbol per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoricalDataset {
    attribute_names: Vec<String>,
    outcome_name: String,
    rows: Vec<Vec<String>>,
    outcomes: Vec<String>,
}

impl CategoricalDataset {
    /// Builds a dataset, validating the shape invariants: at least one
    /// attribute, at least one row, every row of equal width, one outcome
    /// per row.
    pub fn new(
        attribute_names: Vec<String>,
        outcome_name: String,
        rows: Vec<Vec<String>>,
        outcomes: Vec<String>,
    ) -> Result<Self> {
        let width = attribute_names.len();
        if width == 0 {
            return Err(Error::EmptyInput("dataset needs at least one attribute"));
        }
        if rows.is_empty() {
            return Err(Error::EmptyInput("dataset needs at least one row"));
        }
        if rows.len() != outcomes.len() {
            return Err(Error::InvalidParameter(format!(
                "{} rows but {} outcomes",
                rows.len(),
                outcomes.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: width,
                    found: row.len(),
                });
            }
        }
        Ok(Self {
            attribute_names,
            outcome_name,
            rows,
            outcomes,
        })
    }

    /// Parses delimiter-separated text. The target column is removed from the
    /// attributes and stored as the outcomes; all other columns keep their
    /// order and their verbatim symbols.
    pub fn load_csv(source: impl Read, target: TargetColumn, has_header: bool) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(source);

        let mut records = Vec::new();
        for record in reader.records() {
            let record = record?;
            records.push(record.iter().map(str::to_owned).collect::<Vec<String>>());
        }
        if records.is_empty() {
            return Err(Error::EmptyInput("csv source has no records"));
        }

        let width = records[0].len();
        for (i, record) in records.iter().enumerate() {
            if record.len() != width {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: width,
                    found: record.len(),
                });
            }
        }
        if width < 2 {
            return Err(Error::InvalidParameter(
                "need at least two columns: one attribute plus the target".into(),
            ));
        }

        let target_index = match target {
            TargetColumn::Last => width - 1,
            TargetColumn::Index(i) => {
                if i >= width {
                    return Err(Error::TargetOutOfRange { index: i, width });
                }
                i
            }
        };

        let mut records = records.into_iter();
        let (attribute_names, outcome_name) = if has_header {
            let mut header = records.next().unwrap();
            let outcome_name = header.remove(target_index);
            (header, outcome_name)
        } else {
            let names = (0..width)
                .filter(|&i| i != target_index)
                .map(|i| format!("col{i}"))
                .collect();
            (names, "outcome".to_owned())
        };

        let mut rows = Vec::new();
        let mut outcomes = Vec::new();
        for mut record in records {
            outcomes.push(record.remove(target_index));
            rows.push(record);
        }
        if rows.is_empty() {
            return Err(Error::EmptyInput("csv source has a header but no rows"));
        }

        Self::new(attribute_names, outcome_name, rows, outcomes)
    }

    pub fn load_csv_path(path: impl AsRef<Path>, target: TargetColumn, has_header: bool) -> Result<Self> {
        Self::load_csv(std::fs::File::open(path)?, target, has_header)
    }

    /// Serializes back to CSV with the outcome as the last column. A dataset
    /// loaded with `TargetColumn::Last` round-trips symbol-for-symbol.
    pub fn write_csv(&self, sink: impl Write, include_header: bool) -> Result<()> {
        let mut writer = csv::Writer::from_writer(sink);
        if include_header {
            let mut header = self.attribute_names.clone();
            header.push(self.outcome_name.clone());
            writer.write_record(&header)?;
        }
        for (row, outcome) in self.rows.iter().zip(&self.outcomes) {
            let mut record = row.clone();
            record.push(outcome.clone());
            writer.write_record(&record)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn attribute_count(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn outcome_name(&self) -> &str {
        &self.outcome_name
    }

    pub fn row(&self, index: usize) -> &[String] {
        &self.rows[index]
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    /// Iterates `(attribute row, outcome)` pairs in table order.
    pub fn entries(&self) -> impl Iterator<Item = (&[String], &str)> {
        self.rows
            .iter()
            .map(Vec::as_slice)
            .zip(self.outcomes.iter().map(String::as_str))
    }

    /// Counts of every outcome over the whole table.
    pub fn outcome_counts(&self) -> OutcomeCounts {
        OutcomeCounts::from_outcomes(self.outcomes.iter().map(String::as_str))
    }

    /// Distinct outcome symbols, sorted.
    pub fn distinct_outcomes(&self) -> Vec<String> {
        let mut out: Vec<String> = self.outcomes.clone();
        out.sort();
        out.dedup();
        out
    }

    /// Checks that a query has one value per attribute.
    pub fn check_arity(&self, query: &QueryEntry) -> Result<()> {
        if query.len() != self.attribute_count() {
            return Err(Error::ArityMismatch {
                expected: self.attribute_count(),
                found: query.len(),
            });
        }
        Ok(())
    }

    /// The query corresponding to a training row (used by memorization and
    /// saturation checks).
    pub fn row_as_query(&self, index: usize) -> QueryEntry {
        QueryEntry::new(self.rows[index].clone())
    }
}

/// A list of attribute values to classify. Values absent from the training
/// data are legal and simply never match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryEntry {
    values: Vec<String>,
}

impl QueryEntry {
    pub fn new(values: Vec<String>) -> Self {
        Self { values }
    }

    /// Builds a query from a plain comma-separated list (no quoting rules).
    pub fn from_comma_list(text: &str) -> Self {
        Self::new(text.split(',').map(str::to_owned).collect())
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<Vec<String>> for QueryEntry {
    fn from(values: Vec<String>) -> Self {
        Self::new(values)
    }
}

impl From<&[String]> for QueryEntry {
    fn from(values: &[String]) -> Self {
        Self::new(values.to_vec())
    }
}

/// Reads a CSV of query rows (every column is an attribute value).
pub fn load_queries_csv(source: impl Read, has_header: bool) -> Result<Vec<QueryEntry>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_reader(source);
    let mut queries = Vec::new();
    for record in reader.records() {
        let record = record?;
        queries.push(QueryEntry::new(
            record.iter().map(str::to_owned).collect(),
        ));
    }
    if queries.is_empty() {
        return Err(Error::EmptyInput("query csv has no rows"));
    }
    Ok(queries)
}
