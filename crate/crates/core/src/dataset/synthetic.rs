use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::Dataset;
use crate::error::{Error, Result};

/// Per-cluster Gaussian blob parameters, `k × r`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSpec {
    pub means: Vec<Vec<f64>>,
    pub spreads: Vec<Vec<f64>>,
}

impl FeatureSpec {
    /// Blob `j` has mean `separation * ((j + d) mod k)` on dimension `d`, so
    /// every pair of blobs differs on every dimension.
    pub fn well_separated(k: usize, r: usize, separation: f64, spread: f64) -> Self {
        FeatureSpec {
            means: (0..k)
                .map(|j| (0..r).map(|d| separation * ((j + d) % k) as f64).collect())
                .collect(),
            spreads: vec![vec![spread; r]; k],
        }
    }

    pub fn dim(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }
}

/// Geography of the generated areas: blob `j` occupies a square region of
/// half-width `region_radius` centred on a circle inside `[0, extent]²`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeoSpec {
    pub extent: f64,
    pub region_radius: f64,
    pub population: (f64, f64),
}

impl Default for GeoSpec {
    fn default() -> Self {
        GeoSpec {
            extent: 100.0,
            region_radius: 10.0,
            population: (100.0, 1000.0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticDataset {
    pub dataset: Dataset,
    /// Ground-truth blob of each point.
    pub labels: Vec<usize>,
}

/// Draws `n_areas` points from `n_clusters` blobs, assigned round-robin.
/// Output is a pure function of the arguments.
pub fn generate_synthetic(
    n_areas: usize,
    n_clusters: usize,
    features: &FeatureSpec,
    geo: &GeoSpec,
    seed: u64,
) -> Result<SyntheticDataset> {
    if n_clusters < 2 || n_areas < n_clusters {
        return Err(Error::param(format!(
            "need n_areas >= n_clusters >= 2, got n_areas={n_areas}, n_clusters={n_clusters}"
        )));
    }
    let r = features.dim();
    if r == 0
        || features.means.len() != n_clusters
        || features.spreads.len() != n_clusters
        || features
            .means
            .iter()
            .chain(&features.spreads)
            .any(|row| row.len() != r)
    {
        return Err(Error::param(format!(
            "feature spec must be {n_clusters}x{r} means and spreads"
        )));
    }
    if features.spreads.iter().flatten().any(|&s| !(s >= 0.0)) {
        return Err(Error::param("spreads must be non-negative"));
    }
    let (pop_lo, pop_hi) = geo.population;
    if !(pop_lo > 0.0 && pop_hi >= pop_lo) {
        return Err(Error::param("population range must satisfy 0 < lo <= hi"));
    }
    if !(geo.extent > 0.0 && geo.region_radius > 0.0) {
        return Err(Error::param("extent and region radius must be positive"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..n_areas).map(|k| k % n_clusters).collect();
    let unit = Normal::new(0.0, 1.0).expect("unit normal");

    let mut x = Array2::zeros((n_areas, r));
    for (k, &j) in labels.iter().enumerate() {
        for d in 0..r {
            x[[k, d]] = features.means[j][d] + features.spreads[j][d] * unit.sample(&mut rng);
        }
    }

    let half = geo.extent / 2.0;
    let ring = geo.extent / 3.0;
    let mut coords = Array2::zeros((n_areas, 2));
    for (k, &j) in labels.iter().enumerate() {
        let angle = std::f64::consts::TAU * j as f64 / n_clusters as f64;
        coords[[k, 0]] =
            half + ring * angle.cos() + rng.random_range(-1.0..1.0) * geo.region_radius;
        coords[[k, 1]] =
            half + ring * angle.sin() + rng.random_range(-1.0..1.0) * geo.region_radius;
    }

    let populations = (0..n_areas)
        .map(|_| {
            if pop_hi > pop_lo {
                rng.random_range(pop_lo..pop_hi)
            } else {
                pop_lo
            }
        })
        .collect();

    let dataset = Dataset::new(
        (0..n_areas).map(|k| format!("area_{k}")).collect(),
        (0..r).map(|d| format!("feature_{d}")).collect(),
        x,
        Some(coords),
        Some(populations),
    )?;
    Ok(SyntheticDataset { dataset, labels })
}
