//! Derivation of categorical experiment datasets from 8x8 gray-scale digit
//! images: downscale, random pixel selection, intensity quantization, outcome
//! filtering, and a disjoint train/test split.
//!
//! Raw digits are accepted as a CSV of 65 columns: 64 intensities in `0..=16`
//! row-major plus the digit label, the standard flat export of the usual
//! hand-written digits collection.

use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dataset::CategoricalDataset;
use crate::error::{Error, Result};

/// Side length of a raw digit image.
pub const IMAGE_SIDE: usize = 8;
/// Pixel count of a raw digit image.
pub const IMAGE_PIXELS: usize = IMAGE_SIDE * IMAGE_SIDE;
/// Largest raw intensity value.
pub const MAX_INTENSITY: f64 = 16.0;

/// A labeled 8x8 intensity grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitImage {
    pub label: String,
    pub pixels: Vec<f64>,
}

/// Reads the 65-column digits CSV (no header).
pub fn load_digits_csv(source: impl Read) -> Result<Vec<DigitImage>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut images = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != IMAGE_PIXELS + 1 {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: IMAGE_PIXELS + 1,
                found: record.len(),
            });
        }
        let mut pixels = Vec::with_capacity(IMAGE_PIXELS);
        for field in record.iter().take(IMAGE_PIXELS) {
            let value: f64 = field.parse().map_err(|_| {
                Error::InvalidParameter(format!("row {}: non-numeric intensity {field:?}", i + 1))
            })?;
            if !(0.0..=MAX_INTENSITY).contains(&value) {
                return Err(Error::InvalidParameter(format!(
                    "row {}: intensity {value} outside 0..={MAX_INTENSITY}",
                    i + 1
                )));
            }
            pixels.push(value);
        }
        images.push(DigitImage {
            label: record[IMAGE_PIXELS].to_owned(),
            pixels,
        });
    }
    if images.is_empty() {
        return Err(Error::EmptyInput("digits csv has no rows"));
    }
    Ok(images)
}

pub fn load_digits_path(path: impl AsRef<Path>) -> Result<Vec<DigitImage>> {
    load_digits_csv(std::fs::File::open(path)?)
}

fn span_overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

/// Block-average pooling from 8x8 down to `target x target`. Each output
/// cell averages the source area it covers, with fractional row/column
/// coverage when 8 is not divisible by the target, so output intensities
/// stay in the source range.
pub fn downscale_image(pixels: &[f64], target_resolution: usize) -> Result<Vec<f64>> {
    if pixels.len() != IMAGE_PIXELS {
        return Err(Error::InvalidParameter(format!(
            "expected {IMAGE_PIXELS} pixels, got {}",
            pixels.len()
        )));
    }
    if target_resolution == 0 || target_resolution > IMAGE_SIDE {
        return Err(Error::InvalidParameter(format!(
            "target resolution must be in 1..={IMAGE_SIDE}, got {target_resolution}"
        )));
    }
    if target_resolution == IMAGE_SIDE {
        return Ok(pixels.to_vec());
    }

    let cell = IMAGE_SIDE as f64 / target_resolution as f64;
    let mut out = vec![0.0; target_resolution * target_resolution];
    for oy in 0..target_resolution {
        let y0 = oy as f64 * cell;
        let y1 = y0 + cell;
        for ox in 0..target_resolution {
            let x0 = ox as f64 * cell;
            let x1 = x0 + cell;
            let mut weighted = 0.0;
            let mut area = 0.0;
            for sy in y0.floor() as usize..(y1.ceil() as usize).min(IMAGE_SIDE) {
                let wy = span_overlap(sy as f64, sy as f64 + 1.0, y0, y1);
                if wy == 0.0 {
                    continue;
                }
                for sx in x0.floor() as usize..(x1.ceil() as usize).min(IMAGE_SIDE) {
                    let wx = span_overlap(sx as f64, sx as f64 + 1.0, x0, x1);
                    if wx == 0.0 {
                        continue;
                    }
                    weighted += wy * wx * pixels[sy * IMAGE_SIDE + sx];
                    area += wy * wx;
                }
            }
            out[oy * target_resolution + ox] = weighted / area;
        }
    }
    Ok(out)
}

/// Maps an intensity to one of `levels` tokens `"q0".."q(levels-1)"` by
/// uniform-width binning: `floor(value * levels / (max + eps))`. Monotone in
/// the value; `levels = 2` gives the on/off setting.
pub fn quantize_intensity(value: f64, levels: usize, max_intensity: f64) -> Result<String> {
    const EPS: f64 = 1e-9;
    if levels < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 intensity levels, got {levels}"
        )));
    }
    if !value.is_finite() || !(0.0..=max_intensity).contains(&value) {
        return Err(Error::InvalidParameter(format!(
            "intensity {value} outside 0..={max_intensity}"
        )));
    }
    let bin = (value * levels as f64 / (max_intensity + EPS)).floor() as usize;
    Ok(format!("q{}", bin.min(levels - 1)))
}

/// Which pixels of the scaled image become attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PixelSelection {
    /// Explicit flat indices into the scaled image.
    Fixed(Vec<usize>),
    /// `count` indices sampled without replacement from the derivation rng.
    Random { count: usize },
}

impl PixelSelection {
    pub fn count(&self) -> usize {
        match self {
            Self::Fixed(indices) => indices.len(),
            Self::Random { count } => *count,
        }
    }
}

/// Parameters of one derived experiment dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationConfig {
    pub target_resolution: usize,
    pub pixels: PixelSelection,
    pub intensity_levels: usize,
    /// Digit labels kept in the experiment.
    pub selected_outcomes: Vec<String>,
    pub per_outcome_train_count: usize,
    pub trials: usize,
    pub seed: u64,
}

impl DerivationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target_resolution == 0 || self.target_resolution > IMAGE_SIDE {
            return Err(Error::InvalidParameter(format!(
                "target resolution must be in 1..={IMAGE_SIDE}, got {}",
                self.target_resolution
            )));
        }
        let available = self.target_resolution * self.target_resolution;
        let count = self.pixels.count();
        if count == 0 || count > available {
            return Err(Error::InvalidParameter(format!(
                "pixel count {count} must be in 1..={available} for resolution {}",
                self.target_resolution
            )));
        }
        if let PixelSelection::Fixed(indices) = &self.pixels {
            if let Some(&bad) = indices.iter().find(|&&i| i >= available) {
                return Err(Error::InvalidParameter(format!(
                    "pixel index {bad} out of range for a {0}x{0} image",
                    self.target_resolution
                )));
            }
        }
        if self.intensity_levels < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 intensity levels, got {}",
                self.intensity_levels
            )));
        }
        if self.selected_outcomes.is_empty() {
            return Err(Error::EmptyInput("selected outcomes"));
        }
        if self.per_outcome_train_count == 0 {
            return Err(Error::InvalidParameter(
                "per-outcome training count must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Outcomes sorted and deduplicated; the order in which rng draws happen.
    fn canonical_outcomes(&self) -> Vec<String> {
        let mut outcomes = self.selected_outcomes.clone();
        outcomes.sort();
        outcomes.dedup();
        outcomes
    }
}

/// A derived train/test pair plus the provenance needed to audit it: the
/// source image index of every row and the selected pixel indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedSplit {
    pub train: CategoricalDataset,
    pub test: CategoricalDataset,
    pub train_sources: Vec<usize>,
    pub test_sources: Vec<usize>,
    pub pixel_indices: Vec<usize>,
}

/// Filters to the selected outcomes, downscales, picks pixels, quantizes,
/// and draws exactly `per_outcome_train_count` training rows per outcome
/// without replacement; everything left over becomes the test set, so the
/// two sides never share a source image.
///
/// The rng is consumed in a fixed order: pixel selection first (when
/// random), then one shuffle per outcome in sorted-outcome order.
pub fn derive_experiment_dataset(
    raw: &[DigitImage],
    config: &DerivationConfig,
    rng: &mut impl Rng,
) -> Result<DerivedSplit> {
    config.validate()?;
    let resolution = config.target_resolution;
    let available = resolution * resolution;

    let mut pixel_indices = match &config.pixels {
        PixelSelection::Fixed(indices) => indices.clone(),
        PixelSelection::Random { count } => {
            let mut all: Vec<usize> = (0..available).collect();
            all.shuffle(rng);
            all.truncate(*count);
            all
        }
    };
    pixel_indices.sort_unstable();

    let outcomes = config.canonical_outcomes();
    let required = config.per_outcome_train_count + 1;
    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    for outcome in &outcomes {
        let members: Vec<usize> = raw
            .iter()
            .enumerate()
            .filter(|(_, img)| &img.label == outcome)
            .map(|(i, _)| i)
            .collect();
        if members.len() < required {
            return Err(Error::InsufficientImages {
                outcome: outcome.clone(),
                available: members.len(),
                required,
            });
        }
        groups.push((outcome.clone(), members));
    }

    let featurize = |image: &DigitImage| -> Result<Vec<String>> {
        let scaled = downscale_image(&image.pixels, resolution)?;
        pixel_indices
            .iter()
            .map(|&p| quantize_intensity(scaled[p], config.intensity_levels, MAX_INTENSITY))
            .collect()
    };

    let mut train_rows = Vec::new();
    let mut train_outcomes = Vec::new();
    let mut train_sources = Vec::new();
    let mut test_rows = Vec::new();
    let mut test_outcomes = Vec::new();
    let mut test_sources = Vec::new();

    for (outcome, mut members) in groups {
        members.shuffle(rng);
        for (slot, &source) in members.iter().enumerate() {
            let row = featurize(&raw[source])?;
            if slot < config.per_outcome_train_count {
                train_rows.push(row);
                train_outcomes.push(outcome.clone());
                train_sources.push(source);
            } else {
                test_rows.push(row);
                test_outcomes.push(outcome.clone());
                test_sources.push(source);
            }
        }
    }

    let names: Vec<String> = pixel_indices.iter().map(|p| format!("p{p}")).collect();
    let train = CategoricalDataset::new(
        names.clone(),
        "digit".to_owned(),
        train_rows,
        train_outcomes,
    )?;
    let test = CategoricalDataset::new(names, "digit".to_owned(), test_rows, test_outcomes)?;

    Ok(DerivedSplit {
        train,
        test,
        train_sources,
        test_sources,
        pixel_indices,
    })
}
