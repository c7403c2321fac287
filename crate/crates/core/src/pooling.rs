//! Study ingestion and pooling on the transformed scale.
//!
//! Studies are transformed individually, averaged on the θ scale, and the
//! average is mapped back with the clamped inverse at the harmonic-mean
//! sample size of the set.

use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::transform::{ft_inverse_clamped, ft_transform_counts, harmonic_n};
use crate::types::{EffectiveSampleSize, StudyRecord, Theta};

pub const CSV_HEADER: [&str; 3] = ["id", "events", "size"];

/// A nonempty list of studies with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySet {
    studies: Vec<StudyRecord>,
}

impl StudySet {
    pub fn new(studies: Vec<StudyRecord>) -> Result<Self> {
        if studies.is_empty() {
            return Err(Error::Validation("study set is empty".into()));
        }
        let mut seen = HashSet::with_capacity(studies.len());
        for s in &studies {
            if !seen.insert(s.study_id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate study id {:?}",
                    s.study_id
                )));
            }
        }
        Ok(Self { studies })
    }

    pub fn studies(&self) -> &[StudyRecord] {
        &self.studies
    }

    pub fn len(&self) -> usize {
        self.studies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.studies.is_empty()
    }

    /// Harmonic mean of the study sizes.
    pub fn effective_n(&self) -> Result<EffectiveSampleSize> {
        let sizes: Vec<f64> = self.studies.iter().map(|s| s.size as f64).collect();
        harmonic_n(&sizes)
    }
}

/// Reads studies from CSV with header `id,events,size`.
///
/// The header is matched case-insensitively. Blank lines and lines starting
/// with `#` are skipped. Errors carry the 1-based line number.
pub fn parse_studies<R: Read>(mut source: R) -> Result<StudySet> {
    let mut text = String::new();
    source.read_to_string(&mut text).map_err(|e| Error::Parse {
        row: 0,
        message: format!("cannot read input: {e}"),
    })?;

    let mut header_seen = false;
    let mut studies = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields = split_fields(trimmed, row)?;
        if !header_seen {
            let matches = fields.len() == CSV_HEADER.len()
                && fields
                    .iter()
                    .zip(CSV_HEADER)
                    .all(|(got, want)| got.eq_ignore_ascii_case(want));
            if !matches {
                return Err(Error::Parse {
                    row,
                    message: format!(
                        "expected header `{}`, found `{trimmed}`",
                        CSV_HEADER.join(",")
                    ),
                });
            }
            header_seen = true;
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::Parse {
                row,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        if fields[0].is_empty() {
            return Err(Error::Parse {
                row,
                message: "empty study id".into(),
            });
        }
        let events = parse_count(&fields[1], "events", row)?;
        let size = parse_count(&fields[2], "size", row)?;
        studies.push(StudyRecord::new(fields[0].as_str(), events, size)?);
    }
    if !header_seen {
        return Err(Error::Parse {
            row: 1,
            message: format!("missing header `{}`", CSV_HEADER.join(",")),
        });
    }
    StudySet::new(studies)
}

/// Splits one line into trimmed fields, honouring CSV quoting.
fn split_fields(line: &str, row: usize) -> Result<Vec<String>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(line.as_bytes());
    let mut record = csv::StringRecord::new();
    match reader.read_record(&mut record) {
        Ok(true) => Ok(record.iter().map(str::to_owned).collect()),
        Ok(false) => Ok(Vec::new()),
        Err(e) => Err(Error::Parse {
            row,
            message: e.to_string(),
        }),
    }
}

fn parse_count(field: &str, name: &str, row: usize) -> Result<u64> {
    field.parse::<u64>().map_err(|_| Error::Parse {
        row,
        message: format!("{name} must be a nonnegative integer, got {field:?}"),
    })
}

/// Weighting used when averaging on the θ scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolMethod {
    /// Weights `nᵢ + ½`, the reciprocal of the usual large-sample variance
    /// `1 / (4n + 2)` of the transform up to a constant factor.
    FixedEffect,
    Unweighted,
}

impl PoolMethod {
    fn weight(self, study: &StudyRecord) -> f64 {
        match self {
            PoolMethod::FixedEffect => study.size as f64 + 0.5,
            PoolMethod::Unweighted => 1.0,
        }
    }
}

impl fmt::Display for PoolMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoolMethod::FixedEffect => "fixed_effect",
            PoolMethod::Unweighted => "unweighted",
        })
    }
}

impl FromStr for PoolMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fixed" | "fixed_effect" | "fixed-effect" => Ok(PoolMethod::FixedEffect),
            "unweighted" => Ok(PoolMethod::Unweighted),
            other => Err(Error::domain(format!("unknown pooling method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyContribution {
    pub study_id: String,
    pub theta: Theta,
    /// Normalized weight; weights sum to 1 across the set.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PooledResult {
    pub pooled_theta: Theta,
    pub effective_n: EffectiveSampleSize,
    pub pooled_proportion: f64,
    pub method: PoolMethod,
    pub per_study: Vec<StudyContribution>,
}

/// Weighted mean of the per-study transforms, mapped back to a proportion.
pub fn pool(set: &StudySet, method: PoolMethod) -> Result<PooledResult> {
    let mut thetas = Vec::with_capacity(set.len());
    let mut weights = Vec::with_capacity(set.len());
    for study in set.studies() {
        thetas.push(ft_transform_counts(study)?);
        weights.push(method.weight(study));
    }
    let total: f64 = weights.iter().sum();
    let mean = thetas
        .iter()
        .zip(&weights)
        .map(|(t, w)| t.radians() * w)
        .sum::<f64>()
        / total;

    // Rounding can push the mean a hair past the extreme study values.
    let (lo, hi) = thetas
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
            (lo.min(t.radians()), hi.max(t.radians()))
        });
    let pooled_theta = Theta::new(mean.clamp(lo, hi))?;

    let effective_n = set.effective_n()?;
    let pooled_proportion = ft_inverse_clamped(pooled_theta, effective_n)?;

    let per_study = set
        .studies()
        .iter()
        .zip(thetas)
        .zip(weights)
        .map(|((s, theta), w)| StudyContribution {
            study_id: s.study_id.clone(),
            theta,
            weight: w / total,
        })
        .collect();

    Ok(PooledResult {
        pooled_theta,
        effective_n,
        pooled_proportion,
        method,
        per_study,
    })
}

/// Maps a θ-scale value back to a proportion using the set's harmonic-mean
/// sample size.
pub fn back_transform(theta: Theta, set: &StudySet) -> Result<f64> {
    ft_inverse_clamped(theta, set.effective_n()?)
}
