//! Context-constrained fuzzy geographically weighted clustering.
//!
//! Each iteration recomputes centers, recomputes memberships under the
//! row-sum constraint `Σ_j u_kj = f_k`, then blends every row with the
//! gravity-weighted average of the other areas' rows and rescales it back
//! to `f_k`. The loop stops when the largest membership change drops below
//! `eps` or after `max_iter` iterations.

use ndarray::Array2;
use serde::Serialize;

use crate::context::ContextVector;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fcm::{
    check_m, constrained_memberships, init_partition, update_centers, Centers, ClusteringResult,
    FcmParams, PartitionMatrix,
};
use crate::geo::WeightMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CfgwcConfig {
    pub c: usize,
    pub m: f64,
    /// Weight on a point's own membership in the spatial blend.
    pub alpha: f64,
    /// Weight on the neighbour average; `alpha + beta = 1`.
    pub beta: f64,
    /// Distance exponent of the gravity weights.
    pub a: f64,
    /// Population exponent of the gravity weights.
    pub b: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for CfgwcConfig {
    fn default() -> Self {
        CfgwcConfig {
            c: 3,
            m: 2.0,
            alpha: 0.7,
            beta: 0.3,
            a: 1.0,
            b: 1.0,
            eps: 1e-5,
            max_iter: 300,
            seed: 0,
        }
    }
}

impl CfgwcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.c < 2 {
            return Err(Error::param("need c >= 2"));
        }
        check_m(self.m)?;
        check_mix(self.alpha, self.beta)?;
        if !(self.eps > 0.0) {
            return Err(Error::param("eps must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter must be at least 1"));
        }
        Ok(())
    }

    fn fcm_params(&self) -> FcmParams {
        FcmParams {
            c: self.c,
            m: self.m,
            eps: self.eps,
            max_iter: self.max_iter,
            seed: self.seed,
        }
    }
}

fn check_mix(alpha: f64, beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) {
        return Err(Error::param("alpha and beta must lie in [0, 1]"));
    }
    if (alpha + beta - 1.0).abs() > 1e-12 {
        return Err(Error::param(format!(
            "alpha + beta must equal 1, got {}",
            alpha + beta
        )));
    }
    Ok(())
}

/// Stage of an iteration at which a partition matrix was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Init,
    Memberships,
    SpatialAdjust,
}

pub fn cfgwc_memberships(
    dataset: &Dataset,
    centers: &Centers,
    f: &ContextVector,
    m: f64,
) -> Result<PartitionMatrix> {
    constrained_memberships(dataset, centers, f.values(), m)
}

/// Spatial blend of the partition matrix.
///
/// For area `k`, the neighbour term is the `w[k][i]`-weighted average of the
/// rows of every other area `i`. The blended row `α·u_k + β·avg` is then
/// rescaled so it sums to `f_k`. With `beta = 0` the input is returned
/// unchanged. Isolated areas (no positive weight to any other area) keep
/// their row; see [`isolated_areas`].
pub fn simpf_adjust(
    partition: &PartitionMatrix,
    weights: &WeightMatrix,
    f: &ContextVector,
    alpha: f64,
    beta: f64,
) -> Result<PartitionMatrix> {
    check_mix(alpha, beta)?;
    let n = partition.n();
    if weights.len() != n || f.len() != n {
        return Err(Error::Shape(format!(
            "partition has {n} rows, weights {}, context {}",
            weights.len(),
            f.len()
        )));
    }
    if beta == 0.0 {
        return Ok(partition.clone());
    }
    Ok(blend(partition, weights, f.values(), alpha, beta))
}

fn blend(
    partition: &PartitionMatrix,
    weights: &WeightMatrix,
    f: &[f64],
    alpha: f64,
    beta: f64,
) -> PartitionMatrix {
    let (n, c) = (partition.n(), partition.c());
    let u = partition.memberships();
    let w = weights.as_array();
    let mut out = Array2::zeros((n, c));
    let mut neigh = vec![0.0; c];
    for k in 0..n {
        neigh.iter_mut().for_each(|s| *s = 0.0);
        let mut total = 0.0;
        for i in 0..n {
            let wki = w[[k, i]];
            if i == k || wki == 0.0 {
                continue;
            }
            total += wki;
            for j in 0..c {
                neigh[j] += wki * u[[i, j]];
            }
        }
        let mut row: Vec<f64> = (0..c).map(|j| u[[k, j]]).collect();
        if total > 0.0 {
            let blended: Vec<f64> = (0..c)
                .map(|j| alpha * u[[k, j]] + beta * neigh[j] / total)
                .collect();
            let sum: f64 = blended.iter().sum();
            if sum > 0.0 {
                row = blended.into_iter().map(|b| b * (f[k] / sum)).collect();
            }
        }
        for j in 0..c {
            out[[k, j]] = row[j];
        }
    }
    PartitionMatrix::from_parts(out, f.to_vec())
}

/// Areas whose total weight to every other area is zero.
pub fn isolated_areas(weights: &WeightMatrix) -> Vec<usize> {
    let w = weights.as_array();
    (0..weights.len())
        .filter(|&k| (0..weights.len()).all(|i| i == k || w[[k, i]] == 0.0))
        .collect()
}

/// `J = Σ_k Σ_j u_kj^m ‖X_k − V_j‖²`.
pub fn objective(dataset: &Dataset, partition: &PartitionMatrix, centers: &Centers, m: f64) -> f64 {
    let x = dataset.features();
    let u = partition.memberships();
    let v = centers.as_array();
    let mut j_total = 0.0;
    for k in 0..partition.n() {
        for j in 0..partition.c() {
            let d2: f64 = x
                .row(k)
                .iter()
                .zip(v.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            j_total += u[[k, j]].powf(m) * d2;
        }
    }
    j_total
}

/// Largest absolute entrywise difference.
pub fn convergence_delta(u_new: &PartitionMatrix, u_old: &PartitionMatrix) -> Result<f64> {
    if u_new.memberships().dim() != u_old.memberships().dim() {
        return Err(Error::Shape(format!(
            "{:?} vs {:?}",
            u_new.memberships().dim(),
            u_old.memberships().dim()
        )));
    }
    Ok(u_new
        .memberships()
        .iter()
        .zip(u_old.memberships())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

pub fn cfgwc_run(
    dataset: &Dataset,
    f: &ContextVector,
    weights: &WeightMatrix,
    config: &CfgwcConfig,
) -> Result<ClusteringResult> {
    cfgwc_run_observed(dataset, f, weights, config, |_, _, _| {})
}

/// [`cfgwc_run`] that reports every partition matrix it produces, tagged
/// with the iteration number (0 for the initial matrix) and phase.
pub fn cfgwc_run_observed(
    dataset: &Dataset,
    f: &ContextVector,
    weights: &WeightMatrix,
    config: &CfgwcConfig,
    mut observer: impl FnMut(usize, Phase, &PartitionMatrix),
) -> Result<ClusteringResult> {
    config.validate()?;
    if weights.len() != dataset.len() {
        return Err(Error::Shape(format!(
            "dataset has {} points, weight matrix is {}x{}",
            dataset.len(),
            weights.len(),
            weights.len()
        )));
    }
    let spatial = (config.beta > 0.0).then_some(Spatial {
        weights,
        alpha: config.alpha,
        beta: config.beta,
    });
    let mut result = iterate(
        dataset,
        f.values(),
        spatial,
        &config.fcm_params(),
        &mut observer,
    )?;
    if config.beta > 0.0 {
        result.isolated_areas = isolated_areas(weights);
    }
    Ok(result)
}

pub(crate) struct Spatial<'a> {
    weights: &'a WeightMatrix,
    alpha: f64,
    beta: f64,
}

pub(crate) fn iterate(
    dataset: &Dataset,
    f: &[f64],
    spatial: Option<Spatial<'_>>,
    params: &FcmParams,
    observer: &mut dyn FnMut(usize, Phase, &PartitionMatrix),
) -> Result<ClusteringResult> {
    check_m(params.m)?;
    if !(params.eps > 0.0) || params.max_iter == 0 {
        return Err(Error::param("need eps > 0 and max_iter >= 1"));
    }
    if f.len() != dataset.len() {
        return Err(Error::Shape(format!(
            "{} points but {} context values",
            dataset.len(),
            f.len()
        )));
    }

    let mut u = init_partition(dataset.len(), params.c, f, params.seed)?;
    observer(0, Phase::Init, &u);

    let mut trace = Vec::new();
    let mut centers = None;
    let mut converged = false;
    for t in 1..=params.max_iter {
        let v = update_centers(dataset, &u, params.m)?;
        let mut next = constrained_memberships(dataset, &v, f, params.m)?;
        observer(t, Phase::Memberships, &next);
        if let Some(sp) = &spatial {
            next = blend(&next, sp.weights, f, sp.alpha, sp.beta);
            observer(t, Phase::SpatialAdjust, &next);
        }
        trace.push(objective(dataset, &next, &v, params.m));
        let delta = convergence_delta(&next, &u)?;
        u = next;
        centers = Some(v);
        if delta < params.eps {
            converged = true;
            break;
        }
    }

    Ok(ClusteringResult {
        partition: u,
        centers: centers.expect("max_iter >= 1"),
        iterations: trace.len(),
        objective_trace: trace,
        converged,
        isolated_areas: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::ContextVector;
    use ndarray::array;

    fn line(points: &[f64]) -> Dataset {
        let n = points.len();
        Dataset::new(
            (0..n).map(|k| k.to_string()).collect(),
            vec!["x".into()],
            Array2::from_shape_vec((n, 1), points.to_vec()).unwrap(),
            None,
            None,
        )
        .unwrap()
    }

    fn centers(v: &[f64]) -> Centers {
        Centers::new(Array2::from_shape_vec((v.len(), 1), v.to_vec()).unwrap()).unwrap()
    }

    fn ctx(values: &[f64]) -> ContextVector {
        ContextVector::from_values(values.to_vec()).unwrap()
    }

    #[test]
    fn equidistant_point_scales_by_context() {
        let ds = Dataset::new(
            vec!["p".into(), "q".into()],
            vec!["x".into(), "y".into()],
            array![[0.0, 0.0], [5.0, 5.0]],
            None,
            None,
        )
        .unwrap();
        let s = 3f64.sqrt() / 2.0;
        let v = Centers::new(array![[1.0, 0.0], [-0.5, s], [-0.5, -s]]).unwrap();
        let u = cfgwc_memberships(&ds, &v, &ctx(&[0.9, 1.0]), 2.0).unwrap();
        for j in 0..3 {
            assert!((u.row(0)[j] - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn coincident_center_takes_whole_context() {
        let u = cfgwc_memberships(
            &line(&[2.0, 9.0]),
            &centers(&[0.0, 2.0, 5.0]),
            &ctx(&[0.6, 1.0]),
            2.0,
        )
        .unwrap();
        assert_eq!(u.row(0).to_vec(), vec![0.0, 0.6, 0.0]);
    }

    #[test]
    fn context_times_fcm_row() {
        let u = cfgwc_memberships(
            &line(&[1.0, 2.0]),
            &centers(&[0.0, 3.0]),
            &ctx(&[0.5, 1.0]),
            2.0,
        )
        .unwrap();
        assert!((u.row(0)[0] - 0.4).abs() < 1e-15);
        assert!((u.row(0)[1] - 0.1).abs() < 1e-15);
        assert!(u.max_row_sum_error() < 1e-12);
    }

    fn two_area_weights() -> WeightMatrix {
        WeightMatrix::from_array(array![[0.0, 2.0], [2.0, 0.0]]).unwrap()
    }

    #[test]
    fn zero_beta_is_identity() {
        let p = PartitionMatrix::new(array![[0.2, 0.3], [0.7, 0.1]], vec![0.5, 0.8]).unwrap();
        let out = simpf_adjust(&p, &two_area_weights(), &ctx(&[0.5, 0.8]), 1.0, 0.0).unwrap();
        assert_eq!(out, p);
    }

    #[test]
    fn zero_alpha_swaps_rows_rescaled() {
        let p = PartitionMatrix::new(array![[0.2, 0.4], [0.5, 0.1]], vec![0.6, 0.6]).unwrap();
        let out = simpf_adjust(&p, &two_area_weights(), &ctx(&[0.6, 0.6]), 0.0, 1.0).unwrap();
        assert!((out.row(0)[0] - 0.5).abs() < 1e-15);
        assert!((out.row(0)[1] - 0.1).abs() < 1e-15);
        assert!((out.row(1)[0] - 0.2).abs() < 1e-15);
        assert!((out.row(1)[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn isolated_area_keeps_row() {
        let w = WeightMatrix::from_array(array![[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
            .unwrap();
        assert_eq!(isolated_areas(&w), vec![2]);
        let p = PartitionMatrix::new(
            array![[0.5, 0.5], [0.1, 0.9], [0.3, 0.4]],
            vec![1.0, 1.0, 0.7],
        )
        .unwrap();
        let out = simpf_adjust(&p, &w, &ctx(&[1.0, 1.0, 0.7]), 0.7, 0.3).unwrap();
        assert_eq!(out.row(2), p.row(2));
        assert!(out.max_row_sum_error() < 1e-12);
    }

    #[test]
    fn rejects_unbalanced_mix() {
        let p = PartitionMatrix::new(array![[0.5, 0.5], [0.5, 0.5]], vec![1.0, 1.0]).unwrap();
        assert!(simpf_adjust(&p, &two_area_weights(), &ctx(&[1.0, 1.0]), 0.7, 0.2).is_err());
    }

    #[test]
    fn objective_hand_values() {
        let ds = line(&[0.0, 5.0]);
        let p = PartitionMatrix::new(array![[1.0, 0.0], [0.0, 1.0]], vec![1.0, 1.0]).unwrap();
        assert_eq!(objective(&ds, &p, &centers(&[0.0, 5.0]), 2.0), 0.0);
        assert_eq!(objective(&ds, &p, &centers(&[2.0, 5.0]), 2.0), 4.0);
    }

    #[test]
    fn delta_values() {
        let a = PartitionMatrix::new(array![[0.5, 0.5], [0.2, 0.8]], vec![1.0, 1.0]).unwrap();
        assert_eq!(convergence_delta(&a, &a).unwrap(), 0.0);
        let b = PartitionMatrix::from_parts(array![[0.5, 0.5], [0.5, 0.8]], vec![1.0, 1.0]);
        assert!((convergence_delta(&a, &b).unwrap() - 0.3).abs() < 1e-15);
        let c = PartitionMatrix::from_parts(array![[0.5, 0.5]], vec![1.0]);
        assert!(convergence_delta(&a, &c).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(CfgwcConfig::default().validate().is_ok());
        assert!(CfgwcConfig {
            alpha: 0.5,
            ..CfgwcConfig::default()
        }
        .validate()
        .is_err());
        assert!(CfgwcConfig {
            m: 1.0,
            ..CfgwcConfig::default()
        }
        .validate()
        .is_err());
        assert!(CfgwcConfig {
            c: 1,
            ..CfgwcConfig::default()
        }
        .validate()
        .is_err());
        assert!(CfgwcConfig {
            eps: 0.0,
            ..CfgwcConfig::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn run_records_trace_per_iteration() {
        let ds = line(&[0.0, 0.1, 0.2, 5.0, 5.1, 5.2]);
        let w = WeightMatrix::from_array(Array2::from_shape_fn((6, 6), |(i, j)| {
            if i == j {
                0.0
            } else {
                1.0
            }
        }))
        .unwrap();
        let f = ctx(&[0.9, 0.8, 0.7, 0.6, 0.5, 0.4]);
        let cfg = CfgwcConfig {
            c: 2,
            ..CfgwcConfig::default()
        };
        let res = cfgwc_run(&ds, &f, &w, &cfg).unwrap();
        assert!(res.converged);
        assert_eq!(res.objective_trace.len(), res.iterations);
        assert!(res.iterations <= cfg.max_iter);
        assert!(res.partition.max_row_sum_error() < 1e-9);
        assert!(res.isolated_areas.is_empty());
    }
}
