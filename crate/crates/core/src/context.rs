//! Context vectors `f_k ∈ (0, 1]`: how strongly each point relates to the
//! chosen context attribute.
//!
//! Four generators are provided:
//! - [`context_f1`]: cluster the raw attribute with FCM (same C as the main
//!   run) and take each point's membership in one selected context cluster;
//! - [`context_f2`]: `sigmoid(exp(-z²))` of the attribute's z-score;
//! - [`context_random`]: uniform draws, the baseline;
//! - [`context_from_file`]: user-supplied values.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dataset::ContextSeries;
use crate::error::{Error, Result};
use crate::fcm::{fcm_run, ClusteringResult, FcmParams};

/// Lower clamp applied to FCM-derived context values.
pub const F1_CLAMP: f64 = 1e-6;

/// Lower end of the random baseline range `(RANDOM_FLOOR, 1]`.
pub const RANDOM_FLOOR: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextMethod {
    F1,
    F2,
    Random,
    File,
}

impl FromStr for ContextMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(ContextMethod::F1),
            "f2" => Ok(ContextMethod::F2),
            "random" => Ok(ContextMethod::Random),
            "file" => Ok(ContextMethod::File),
            other => Err(Error::param(format!("unknown context method `{other}`"))),
        }
    }
}

/// Which FCM cluster of the context attribute supplies the context values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum F1Target {
    /// Cluster whose center value is largest ("high income").
    #[default]
    Highest,
    /// Cluster whose center value is smallest.
    Lowest,
    /// Cluster of the given rank when centers are sorted ascending.
    Index(usize),
    /// Each point's largest membership, whatever its cluster. Not
    /// context-specific; kept for comparison only.
    RowMax,
}

impl FromStr for F1Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "highest" => Ok(F1Target::Highest),
            "lowest" => Ok(F1Target::Lowest),
            "rowmax" => Ok(F1Target::RowMax),
            other => other
                .strip_prefix("index:")
                .unwrap_or(other)
                .parse::<usize>()
                .map(F1Target::Index)
                .map_err(|_| Error::param(format!("unknown f1 target `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum ContextMetadata {
    F1 {
        target: F1Target,
        /// FCM label of the selected cluster; `None` for `rowmax`.
        chosen_cluster: Option<usize>,
        /// FCM cluster centers on the context attribute, by FCM label.
        centers: Vec<f64>,
        fcm_iterations: usize,
        fcm_converged: bool,
        /// Number of values raised to the lower clamp.
        clamped: usize,
    },
    F2 {
        mean: f64,
        std_dev: f64,
    },
    Random {
        seed: u64,
    },
    File {
        path: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContextVector {
    values: Vec<f64>,
    #[serde(skip)]
    method: ContextMethod,
    metadata: ContextMetadata,
}

impl ContextVector {
    pub fn new(values: Vec<f64>, method: ContextMethod, metadata: ContextMetadata) -> Result<Self> {
        if let Some((k, &v)) = values
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v > 0.0 && v <= 1.0))
        {
            return Err(Error::ContextOutOfRange {
                line: k + 1,
                value: v,
            });
        }
        Ok(ContextVector {
            values,
            method,
            metadata,
        })
    }

    /// Externally supplied values, tagged as `file` with no path.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(
            values,
            ContextMethod::File,
            ContextMetadata::File { path: None },
        )
    }

    /// `f ≡ 1`, which reduces the constrained scheme to plain FCM.
    pub fn ones(n: usize) -> Self {
        ContextVector {
            values: vec![1.0; n],
            method: ContextMethod::File,
            metadata: ContextMetadata::File { path: None },
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn method(&self) -> ContextMethod {
        self.method
    }

    pub fn metadata(&self) -> &ContextMetadata {
        &self.metadata
    }
}

/// Context vector together with the FCM run it was read from.
#[derive(Clone, Debug)]
pub struct F1Output {
    pub context: ContextVector,
    pub clustering: ClusteringResult,
}

pub fn context_f1(
    series: &ContextSeries,
    target: F1Target,
    params: &FcmParams,
) -> Result<ContextVector> {
    context_f1_detailed(series, target, params).map(|out| out.context)
}

pub fn context_f1_detailed(
    series: &ContextSeries,
    target: F1Target,
    params: &FcmParams,
) -> Result<F1Output> {
    let clustering = fcm_run(&series.to_dataset()?, params)?;
    let centers: Vec<f64> = clustering.centers.as_array().column(0).to_vec();

    let mut order: Vec<usize> = (0..centers.len()).collect();
    order.sort_by(|&a, &b| centers[a].total_cmp(&centers[b]));
    let chosen = match target {
        F1Target::Highest => Some(*order.last().expect("c >= 2")),
        F1Target::Lowest => Some(order[0]),
        F1Target::Index(rank) => Some(*order.get(rank).ok_or_else(|| {
            Error::param(format!(
                "f1 index {rank} out of range for {} clusters",
                centers.len()
            ))
        })?),
        F1Target::RowMax => None,
    };

    let u = clustering.partition.memberships();
    let mut clamped = 0;
    let values = (0..u.nrows())
        .map(|k| {
            let raw = match chosen {
                Some(j) => u[[k, j]],
                None => u.row(k).iter().copied().fold(0.0, f64::max),
            };
            if raw < F1_CLAMP {
                clamped += 1;
                F1_CLAMP
            } else {
                raw.min(1.0)
            }
        })
        .collect();

    let metadata = ContextMetadata::F1 {
        target,
        chosen_cluster: chosen,
        centers,
        fcm_iterations: clustering.iterations,
        fcm_converged: clustering.converged,
        clamped,
    };
    Ok(F1Output {
        context: ContextVector::new(values, ContextMethod::F1, metadata)?,
        clustering,
    })
}

/// `f_k = 1 / (1 + exp(-exp(-(y_k - μ)² / σ²)))` with the population
/// standard deviation (divisor N).
pub fn context_f2(series: &ContextSeries) -> Result<ContextVector> {
    let y = &series.values;
    let n = y.len();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("context series"));
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::ConstantSeries);
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let std_dev = var.sqrt();
    if !(std_dev > 0.0) {
        return Err(Error::ConstantSeries);
    }
    let values = y
        .iter()
        .map(|&v| {
            let z = (v - mean) / std_dev;
            let gauss = (-z * z).exp();
            1.0 / (1.0 + (-gauss).exp())
        })
        .collect();
    ContextVector::new(
        values,
        ContextMethod::F2,
        ContextMetadata::F2 { mean, std_dev },
    )
}

/// Uniform draws on `(0.01, 1]`.
pub fn context_random(n: usize, seed: u64) -> Result<ContextVector> {
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = 1.0 - RANDOM_FLOOR;
    let values = (0..n).map(|_| 1.0 - span * rng.random::<f64>()).collect();
    ContextVector::new(
        values,
        ContextMethod::Random,
        ContextMetadata::Random { seed },
    )
}

/// One value per line. A non-numeric first line is taken as a column
/// header; blank lines are skipped.
pub fn context_from_file(path: impl AsRef<Path>) -> Result<ContextVector> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let cell = raw.trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) if v > 0.0 && v <= 1.0 => values.push(v),
            Ok(v) => return Err(Error::ContextOutOfRange { line, value: v }),
            Err(_) if line == 1 && !cell.contains(',') => continue,
            Err(_) => {
                return Err(Error::ContextUnparseable {
                    line,
                    value: cell.to_string(),
                })
            }
        }
    }
    ContextVector::new(
        values,
        ContextMethod::File,
        ContextMetadata::File {
            path: Some(path.display().to_string()),
        },
    )
}
