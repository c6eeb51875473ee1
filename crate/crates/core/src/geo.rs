//! Inter-area distances and gravity-model spatial weights,
//! `w_ij = (pop_i * pop_j)^b / d_ij^a`.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};

/// Mean Earth radius used by the haversine metric, in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    /// Great-circle distance in km; coordinates are (lon, lat) in degrees.
    Haversine,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "haversine" => Ok(Metric::Haversine),
            other => Err(Error::param(format!("unknown metric `{other}`"))),
        }
    }
}

pub fn pairwise_distances(coords: &Array2<f64>, metric: Metric) -> Result<Array2<f64>> {
    let n = coords.nrows();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if coords.ncols() != 2 {
        return Err(Error::Shape(format!(
            "coordinates need 2 columns, got {}",
            coords.ncols()
        )));
    }
    if coords.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("coordinates"));
    }
    let mut d = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let (p, q) = (
                (coords[[i, 0]], coords[[i, 1]]),
                (coords[[j, 0]], coords[[j, 1]]),
            );
            let v = match metric {
                Metric::Euclidean => (p.0 - q.0).hypot(p.1 - q.1),
                Metric::Haversine => haversine_km(p, q),
            };
            d[[i, j]] = v;
            d[[j, i]] = v;
        }
    }
    Ok(d)
}

fn haversine_km((lon1, lat1): (f64, f64), (lon2, lat2): (f64, f64)) -> f64 {
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (lon2 - lon1).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Symmetric, zero-diagonal, finite, non-negative N×N spatial weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    w: Array2<f64>,
}

impl WeightMatrix {
    /// Wraps a precomputed matrix after checking the invariants.
    pub fn from_array(w: Array2<f64>) -> Result<Self> {
        check_square_symmetric(&w, "weight matrix")?;
        Ok(WeightMatrix { w })
    }

    pub fn len(&self) -> usize {
        self.w.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.w.nrows() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[[i, j]]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.w
    }

    /// Header-less, row-major CSV.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_matrix_csv(&self.w, path)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_array(read_matrix_csv(path)?)
    }
}

pub fn gravity_weights(
    populations: &[f64],
    distances: &Array2<f64>,
    a: f64,
    b: f64,
) -> Result<WeightMatrix> {
    let n = populations.len();
    if distances.dim() != (n, n) {
        return Err(Error::Shape(format!(
            "{n} populations but distance matrix is {:?}",
            distances.dim()
        )));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::param("gravity exponents must be finite"));
    }
    if populations.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
        return Err(Error::param(
            "populations must be finite and strictly positive",
        ));
    }
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let d = distances[[i, j]];
            if !d.is_finite() || d < 0.0 {
                return Err(Error::NonFinite("distance matrix"));
            }
            if d == 0.0 {
                return Err(Error::CoincidentAreas { i, j });
            }
            let v = (populations[i] * populations[j]).powf(b) / d.powf(a);
            if !v.is_finite() {
                return Err(Error::NonFinite("gravity weight"));
            }
            w[[i, j]] = v;
            w[[j, i]] = v;
        }
    }
    Ok(WeightMatrix { w })
}

/// Reads an externally computed distance matrix (header-less CSV).
pub fn read_distance_csv(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    let d = read_matrix_csv(path)?;
    check_square_symmetric(&d, "distance matrix")?;
    Ok(d)
}

fn check_square_symmetric(m: &Array2<f64>, what: &'static str) -> Result<()> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::Shape(format!("{what} must be square, got {r}x{c}")));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(what));
    }
    for i in 0..r {
        if m[[i, i]] != 0.0 {
            return Err(Error::Shape(format!("{what} has non-zero diagonal at {i}")));
        }
        for j in 0..i {
            let (x, y) = (m[[i, j]], m[[j, i]]);
            if x < 0.0 {
                return Err(Error::Shape(format!(
                    "{what} has a negative entry at ({i}, {j})"
                )));
            }
            if (x - y).abs() > 1e-9 * x.abs().max(y.abs()).max(1.0) {
                return Err(Error::Shape(format!(
                    "{what} is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

fn write_matrix_csv(m: &Array2<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    for row in m.rows() {
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_matrix_csv(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut n = None;
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec?;
        if *n.get_or_insert(rec.len()) != rec.len() {
            return Err(Error::Shape(format!("ragged matrix at row {}", rows + 1)));
        }
        for (c, cell) in rec.iter().enumerate() {
            let v = cell.parse::<f64>().map_err(|_| Error::Unparseable {
                row: rows + 1,
                column: (c + 1).to_string(),
                value: cell.to_string(),
            })?;
            values.push(v);
        }
        rows += 1;
    }
    Array2::from_shape_vec((rows, n.unwrap_or(0)), values).map_err(|e| Error::Shape(e.to_string()))
}
