#![allow(dead_code)]
// The oracles are plain index loops on purpose.
#![allow(clippy::needless_range_loop)]

use std::path::{Path, PathBuf};

use cfgwc_core::{
    generate_synthetic, gravity_weights, load_csv, pairwise_distances, Dataset, FeatureSpec,
    GeoSpec, Metric, Schema, WeightMatrix,
};
use ndarray::Array2;

pub const TABLE1_CSV: &str = "\
Name,Occupation,Income,Age,Gender,Raise
Marry,Student,28000,15,Female,4
Tom,Doctor,40000,32,Male,2
David,Doctor,35100,27,Male,6
Kim,Singer,65000,19,Female,1
Jenny,Student,20000,18,Female,3
Julia,Singer,52520,23,Male,6
Xiao,Student,21000,31,Male,3
Luka,Doctor,75000,42,Female,2
";

pub const INCOME: [f64; 8] = [
    28000.0, 40000.0, 35100.0, 65000.0, 20000.0, 52520.0, 21000.0, 75000.0,
];

/// Published three-cluster memberships of the income series; columns are
/// low, high and medium income.
pub const INCOME_MEMBERSHIPS: [[f64; 3]; 8] = [
    [0.830213, 0.013943, 0.155844],
    [0.000256, 0.000091, 0.999653],
    [0.145173, 0.019431, 0.835396],
    [0.008823, 0.965323, 0.025853],
    [0.979944, 0.002928, 0.017128],
    [0.098034, 0.319610, 0.582355],
    [0.991251, 0.001213, 0.007536],
    [0.012425, 0.959367, 0.028209],
];

pub const INCOME_MEAN: f64 = 42077.5;
pub const INCOME_STD: f64 = 19043.47;
pub const INCOME_F2: [f64; 8] = [0.64, 0.73, 0.70, 0.56, 0.56, 0.68, 0.57, 0.51];

pub fn write_table1(dir: &Path) -> PathBuf {
    let path = dir.join("table1.csv");
    std::fs::write(&path, TABLE1_CSV).unwrap();
    path
}

pub fn load_table1(dir: &Path) -> Dataset {
    load_csv(write_table1(dir), &Schema::with_id("Name")).unwrap()
}

pub fn income_dataset() -> Dataset {
    Dataset::new(
        (0..8).map(|k| k.to_string()).collect(),
        vec!["Income".into()],
        Array2::from_shape_vec((8, 1), INCOME.to_vec()).unwrap(),
        None,
        None,
    )
    .unwrap()
}

/// Reference centers implied by the published memberships at m = 2, rows
/// renormalised to 1 first.
pub fn income_reference_centers() -> Vec<f64> {
    (0..3)
        .map(|j| {
            let (mut num, mut den) = (0.0, 0.0);
            for (k, row) in INCOME_MEMBERSHIPS.iter().enumerate() {
                let s: f64 = row.iter().sum();
                let w = (row[j] / s).powi(2);
                num += w * INCOME[k];
                den += w;
            }
            num / den
        })
        .collect()
}

/// The benchmark used by the method comparison: 60 areas, 3 blobs, seed 1.
pub fn benchmark() -> (Dataset, WeightMatrix) {
    let spec = FeatureSpec::well_separated(3, 3, 10.0, 1.0);
    let s = generate_synthetic(60, 3, &spec, &GeoSpec::default(), 1).unwrap();
    let w = weights_for(&s.dataset);
    (s.dataset, w)
}

pub fn weights_for(ds: &Dataset) -> WeightMatrix {
    let d = pairwise_distances(ds.coords(), Metric::Euclidean).unwrap();
    gravity_weights(ds.populations(), &d, 1.0, 1.0).unwrap()
}

pub fn to_rows(a: &Array2<f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

// Scalar-loop oracles over plain nested vectors.

pub mod oracle {
    fn sq(a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for d in 0..a.len() {
            s += (a[d] - b[d]) * (a[d] - b[d]);
        }
        s
    }

    pub fn objective(x: &[Vec<f64>], u: &[Vec<f64>], v: &[Vec<f64>], m: f64) -> f64 {
        let mut total = 0.0;
        for k in 0..x.len() {
            for j in 0..v.len() {
                total += u[k][j].powf(m) * sq(&x[k], &v[j]);
            }
        }
        total
    }

    pub fn simpf(
        u: &[Vec<f64>],
        w: &[Vec<f64>],
        f: &[f64],
        alpha: f64,
        beta: f64,
    ) -> Vec<Vec<f64>> {
        let n = u.len();
        let c = u[0].len();
        let mut out = u.to_vec();
        for k in 0..n {
            let mut s_k = 0.0;
            for i in 0..n {
                if i != k {
                    s_k += w[k][i];
                }
            }
            if s_k == 0.0 {
                continue;
            }
            let mut row = vec![0.0; c];
            for j in 0..c {
                let mut s = 0.0;
                for i in 0..n {
                    if i != k {
                        s += w[k][i] * u[i][j];
                    }
                }
                row[j] = alpha * u[k][j] + beta * s / s_k;
            }
            let total: f64 = row.iter().sum();
            for j in 0..c {
                out[k][j] = f[k] * row[j] / total;
            }
        }
        out
    }

    pub fn sd_max(v: &[Vec<f64>]) -> f64 {
        let mut best = 0.0;
        for i in 0..v.len() {
            for j in 0..v.len() {
                if i != j && sq(&v[i], &v[j]) > best {
                    best = sq(&v[i], &v[j]);
                }
            }
        }
        best
    }

    pub fn sigma_bar(x: &[Vec<f64>], v: &[Vec<f64>]) -> f64 {
        let mut total = 0.0;
        for vj in v {
            let mut s = 0.0;
            for xk in x {
                s += sq(xk, vj);
            }
            total += s / x.len() as f64;
        }
        total / v.len() as f64
    }

    pub fn ifv(x: &[Vec<f64>], u: &[Vec<f64>], v: &[Vec<f64>]) -> f64 {
        let n = u.len() as f64;
        let c = v.len();
        let mut acc = 0.0;
        for j in 0..c {
            let mut sq_sum = 0.0;
            let mut log_sum = 0.0;
            for row in u {
                let val = if row[j] < 1e-12 { 1e-12 } else { row[j] };
                sq_sum += val * val;
                log_sum += val.ln() / 2f64.ln();
            }
            let e = (c as f64).ln() / 2f64.ln() - log_sum / n;
            acc += sq_sum / n * e * e;
        }
        acc / c as f64 * sd_max(v) / sigma_bar(x, v)
    }

    pub fn gravity(pop: &[f64], d: &[Vec<f64>], a: f64, b: f64) -> Vec<Vec<f64>> {
        let n = pop.len();
        let mut w = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    w[i][j] = (pop[i] * pop[j]).powf(b) / d[i][j].powf(a);
                }
            }
        }
        w
    }
}
