//! IFV spatial cluster-validity index. Larger is better.
//!
//! ```text
//! IFV = (1/C) Σ_j [ (1/N) Σ_k u_kj² · (log2 C − (1/N) Σ_k log2 u_kj)² ] · SD_max / σ̄_D
//! ```
//!
//! The bracketed entropy term is a per-cluster constant. Memberships are
//! used as given (rows may sum to `f_k < 1`); zeros are clamped to
//! [`MEMBERSHIP_FLOOR`] so the logarithm is defined.

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fcm::{Centers, PartitionMatrix};

pub const MEMBERSHIP_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IfvReport {
    pub ifv: f64,
    pub sd_max: f64,
    pub sigma_bar: f64,
    pub per_cluster_terms: Vec<f64>,
    /// Memberships raised to the floor before taking logs. Non-zero counts
    /// mean the index is sensitive to the floor value.
    pub clamped_entries: usize,
    /// SD_max or σ̄_D was zero; IFV is reported as 0.
    pub degenerate: bool,
}

/// Maximum squared distance between two distinct centers.
pub fn sd_max(centers: &Centers) -> f64 {
    let v = centers.as_array();
    let mut best: f64 = 0.0;
    for i in 0..centers.c() {
        for j in (i + 1)..centers.c() {
            let d2: f64 = v
                .row(i)
                .iter()
                .zip(v.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            best = best.max(d2);
        }
    }
    best
}

/// Mean over clusters of the mean squared point-to-center distance.
pub fn sigma_bar(dataset: &Dataset, centers: &Centers) -> f64 {
    let x = dataset.features();
    let n = dataset.len() as f64;
    let total: f64 = centers
        .as_array()
        .rows()
        .into_iter()
        .map(|vj| {
            x.rows()
                .into_iter()
                .map(|xk| {
                    xk.iter()
                        .zip(vj)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .sum::<f64>()
                / n
        })
        .sum();
    total / centers.c() as f64
}

pub fn ifv(dataset: &Dataset, partition: &PartitionMatrix, centers: &Centers) -> Result<IfvReport> {
    let c = partition.c();
    if c < 2 || centers.c() != c {
        return Err(Error::param(format!(
            "IFV needs C >= 2 with matching centers, got {c} columns and {} centers",
            centers.c()
        )));
    }
    if partition.n() != dataset.len() || centers.dim() != dataset.dim() {
        return Err(Error::Shape(
            "partition, centers and dataset disagree".into(),
        ));
    }
    let n = partition.n() as f64;
    let log2_c = (c as f64).log2();
    let u = partition.memberships();

    let mut clamped_entries = 0;
    let per_cluster_terms: Vec<f64> = (0..c)
        .map(|j| {
            let mut sq = 0.0;
            let mut log_sum = 0.0;
            for k in 0..partition.n() {
                let mut ukj = u[[k, j]];
                if ukj < MEMBERSHIP_FLOOR {
                    ukj = MEMBERSHIP_FLOOR;
                    clamped_entries += 1;
                }
                sq += ukj * ukj;
                log_sum += ukj.log2();
            }
            let bracket = log2_c - log_sum / n;
            (sq / n) * bracket * bracket
        })
        .collect();

    let sd = sd_max(centers);
    let sigma = sigma_bar(dataset, centers);
    let degenerate = !(sd > 0.0 && sigma > 0.0);
    let mean_term = per_cluster_terms.iter().sum::<f64>() / c as f64;
    let ifv = if degenerate {
        0.0
    } else {
        mean_term * sd / sigma
    };

    Ok(IfvReport {
        ifv,
        sd_max: sd,
        sigma_bar: sigma,
        per_cluster_terms,
        clamped_entries,
        degenerate,
    })
}
