//! Fuzzy c-means and the partition types shared with the constrained scheme.
//!
//! Plain FCM is the `f ≡ 1` special case of the context-constrained
//! iteration, so [`fcm_run`] drives the same loop as
//! [`cfgwc_run`](crate::cfgwc::cfgwc_run) without the spatial step.

use ndarray::{Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cfgwc::iterate;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Row-sum tolerance for the constraint `Σ_j u_kj = target_k`.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// N×C membership matrix whose row `k` sums to `row_target[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionMatrix {
    u: Array2<f64>,
    row_target: Vec<f64>,
}

impl PartitionMatrix {
    /// Checks shape, the `[0, 1]` range and the row sums.
    pub fn new(u: Array2<f64>, row_target: Vec<f64>) -> Result<Self> {
        if u.nrows() != row_target.len() {
            return Err(Error::Shape(format!(
                "{} rows but {} row targets",
                u.nrows(),
                row_target.len()
            )));
        }
        if u.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::param("memberships must lie in [0, 1]"));
        }
        let p = PartitionMatrix { u, row_target };
        let err = p.max_row_sum_error();
        if !(err <= ROW_SUM_TOLERANCE) {
            return Err(Error::param(format!(
                "row sums deviate from their targets by {err:e}"
            )));
        }
        Ok(p)
    }

    pub(crate) fn from_parts(u: Array2<f64>, row_target: Vec<f64>) -> Self {
        PartitionMatrix { u, row_target }
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn c(&self) -> usize {
        self.u.ncols()
    }

    pub fn memberships(&self) -> &Array2<f64> {
        &self.u
    }

    pub fn row(&self, k: usize) -> ArrayView1<'_, f64> {
        self.u.row(k)
    }

    pub fn row_target(&self) -> &[f64] {
        &self.row_target
    }

    /// `max_k |Σ_j u_kj − target_k|`.
    pub fn max_row_sum_error(&self) -> f64 {
        self.u
            .rows()
            .into_iter()
            .zip(&self.row_target)
            .map(|(row, &t)| (row.sum() - t).abs())
            .fold(0.0, f64::max)
    }

    /// `0 < Σ_k u_kj < N` for every cluster.
    pub fn column_masses_valid(&self) -> bool {
        let n = self.n() as f64;
        self.u.columns().into_iter().all(|col| {
            let s = col.sum();
            s > 0.0 && s < n
        })
    }

    /// Hard assignment; ties go to the lowest index.
    pub fn argmax(&self, k: usize) -> usize {
        let row = self.u.row(k);
        let mut best = 0;
        for j in 1..row.len() {
            if row[j] > row[best] {
                best = j;
            }
        }
        best
    }

    pub fn hard_labels(&self) -> Vec<usize> {
        (0..self.n()).map(|k| self.argmax(k)).collect()
    }

    /// Reorders columns: new column `j` is old column `perm[j]`.
    pub fn permute_clusters(&self, perm: &[usize]) -> PartitionMatrix {
        let u = Array2::from_shape_fn(self.u.dim(), |(k, j)| self.u[[k, perm[j]]]);
        PartitionMatrix::from_parts(u, self.row_target.clone())
    }
}

/// C×r cluster prototypes.
#[derive(Clone, Debug, PartialEq)]
pub struct Centers {
    v: Array2<f64>,
}

impl Centers {
    pub fn new(v: Array2<f64>) -> Result<Self> {
        if v.nrows() < 2 {
            return Err(Error::param("need at least 2 centers"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("centers"));
        }
        Ok(Centers { v })
    }

    pub fn c(&self) -> usize {
        self.v.nrows()
    }

    pub fn dim(&self) -> usize {
        self.v.ncols()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.v
    }

    pub fn center(&self, j: usize) -> ArrayView1<'_, f64> {
        self.v.row(j)
    }

    pub fn permute(&self, perm: &[usize]) -> Centers {
        Centers {
            v: Array2::from_shape_fn(self.v.dim(), |(j, d)| self.v[[perm[j], d]]),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClusteringResult {
    pub partition: PartitionMatrix,
    pub centers: Centers,
    /// Objective `J(U(t+1), V(t))` after each iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Areas with no spatial neighbours (zero total weight); empty without a
    /// spatial step.
    pub isolated_areas: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FcmParams {
    pub c: usize,
    pub m: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for FcmParams {
    fn default() -> Self {
        FcmParams {
            c: 3,
            m: 2.0,
            eps: 1e-5,
            max_iter: 300,
            seed: 0,
        }
    }
}

/// Random initial partition: each row is `c` draws from `(0, 1]` rescaled to
/// sum to its target. All draws come from one stream seeded by `seed`.
pub fn init_partition(
    n: usize,
    c: usize,
    row_target: &[f64],
    seed: u64,
) -> Result<PartitionMatrix> {
    if c < 2 {
        return Err(Error::param("need c >= 2"));
    }
    if n < c {
        return Err(Error::param(format!("need n >= c, got n={n}, c={c}")));
    }
    if row_target.len() != n {
        return Err(Error::Shape(format!(
            "{n} rows but {} row targets",
            row_target.len()
        )));
    }
    if let Some(&bad) = row_target.iter().find(|&&t| !(t > 0.0 && t <= 1.0)) {
        return Err(Error::param(format!("row target {bad} outside (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = Array2::zeros((n, c));
    for (k, mut row) in u.rows_mut().into_iter().enumerate() {
        for v in row.iter_mut() {
            *v = 1.0 - rng.random::<f64>();
        }
        let scale = row_target[k] / row.sum();
        row.mapv_inplace(|v| v * scale);
    }
    Ok(PartitionMatrix::from_parts(u, row_target.to_vec()))
}

/// `V_j = Σ_k u_kj^m X_k / Σ_k u_kj^m`.
pub fn update_centers(dataset: &Dataset, partition: &PartitionMatrix, m: f64) -> Result<Centers> {
    check_m(m)?;
    if partition.n() != dataset.len() {
        return Err(Error::Shape(format!(
            "partition has {} rows, dataset {} points",
            partition.n(),
            dataset.len()
        )));
    }
    let x = dataset.features();
    let (c, r) = (partition.c(), dataset.dim());
    let mut num = Array2::<f64>::zeros((c, r));
    let mut den = vec![0.0; c];
    for (k, row) in partition.memberships().rows().into_iter().enumerate() {
        for j in 0..c {
            let w = row[j].powf(m);
            den[j] += w;
            for d in 0..r {
                num[[j, d]] += w * x[[k, d]];
            }
        }
    }
    for (j, &s) in den.iter().enumerate() {
        if !(s > 0.0) {
            return Err(Error::DegenerateCluster(j));
        }
        num.row_mut(j).mapv_inplace(|v| v / s);
    }
    Centers::new(num)
}

/// Plain FCM membership update (every row sums to 1).
pub fn update_memberships(dataset: &Dataset, centers: &Centers, m: f64) -> Result<PartitionMatrix> {
    constrained_memberships(dataset, centers, &vec![1.0; dataset.len()], m)
}

/// `u_kj = f_k / Σ_i (‖X_k − V_j‖ / ‖X_k − V_i‖)^(2/(m−1))`.
///
/// A point sitting exactly on one or more centers splits `f_k` equally among
/// those centers and gets 0 elsewhere.
pub(crate) fn constrained_memberships(
    dataset: &Dataset,
    centers: &Centers,
    f: &[f64],
    m: f64,
) -> Result<PartitionMatrix> {
    check_m(m)?;
    if centers.dim() != dataset.dim() {
        return Err(Error::Shape(format!(
            "centers have dimension {}, dataset {}",
            centers.dim(),
            dataset.dim()
        )));
    }
    if f.len() != dataset.len() {
        return Err(Error::Shape(format!(
            "{} points but {} context values",
            dataset.len(),
            f.len()
        )));
    }
    let c = centers.c();
    let exponent = 1.0 / (m - 1.0);
    let x = dataset.features();
    let v = centers.as_array();
    let mut u = Array2::zeros((dataset.len(), c));
    let mut d2 = vec![0.0; c];
    for k in 0..dataset.len() {
        let xk = x.row(k);
        for (j, dj) in d2.iter_mut().enumerate() {
            *dj = xk
                .iter()
                .zip(v.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
        }
        let coincident = d2.iter().filter(|&&d| d == 0.0).count();
        if coincident > 0 {
            let share = f[k] / coincident as f64;
            for j in 0..c {
                u[[k, j]] = if d2[j] == 0.0 { share } else { 0.0 };
            }
            continue;
        }
        for j in 0..c {
            // squared distances, so the exponent is 1/(m-1)
            let denom: f64 = d2.iter().map(|&di| (d2[j] / di).powf(exponent)).sum();
            u[[k, j]] = f[k] * (1.0 / denom);
        }
    }
    Ok(PartitionMatrix::from_parts(u, f.to_vec()))
}

pub fn fcm_run(dataset: &Dataset, params: &FcmParams) -> Result<ClusteringResult> {
    let ones = vec![1.0; dataset.len()];
    iterate(dataset, &ones, None, params, &mut |_, _, _| {})
}

/// Permutation `perm` such that `found` cluster `perm[j]` matches
/// `reference` cluster `j`, minimising the total center distance. Exhaustive
/// over permutations, so limited to C ≤ 8.
pub fn align_labels(reference: &Centers, found: &Centers) -> Result<Vec<usize>> {
    let c = reference.c();
    if found.c() != c || found.dim() != reference.dim() {
        return Err(Error::Shape("center sets differ in shape".into()));
    }
    if c > 8 {
        return Err(Error::param("label alignment supports at most 8 clusters"));
    }
    let cost = Array2::from_shape_fn((c, c), |(i, j)| {
        reference
            .center(i)
            .iter()
            .zip(found.center(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    });
    let mut perm: Vec<usize> = (0..c).collect();
    let mut best = (f64::INFINITY, perm.clone());
    permutations(&mut perm, 0, &mut |p| {
        let total: f64 = p.iter().enumerate().map(|(i, &j)| cost[[i, j]]).sum();
        if total < best.0 {
            best = (total, p.to_vec());
        }
    });
    Ok(best.1)
}

fn permutations(p: &mut [usize], start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == p.len() {
        visit(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permutations(p, start + 1, visit);
        p.swap(start, i);
    }
}

pub(crate) fn check_m(m: f64) -> Result<()> {
    if m > 1.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("fuzzifier m must be > 1, got {m}")))
    }
}
