//! Geo-demographic datasets: feature matrix, area geography and populations.
//!
//! A [`Dataset`] is immutable once built. Coordinates and populations are
//! optional at construction; when absent they are filled with unit-grid
//! positions and unit populations, and the dataset remembers that so the
//! run summary can flag the geography as synthetic.

mod io;
mod synthetic;

use std::collections::HashSet;

use ndarray::{Array2, ArrayView1, Axis};
use serde::Serialize;

use crate::error::{Error, Result};

pub use io::{encode_categoricals, load_csv, write_csv, Schema};
pub use synthetic::{generate_synthetic, FeatureSpec, GeoSpec, SyntheticDataset};

/// Level table of one categorical column, in first-appearance order.
/// Level `i` is coded as `i + 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CategoricalEncoding {
    pub column: String,
    pub levels: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GeographyDefaults {
    pub coords: bool,
    pub populations: bool,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    ids: Vec<String>,
    feature_names: Vec<String>,
    features: Array2<f64>,
    coords: Array2<f64>,
    populations: Vec<f64>,
    encodings: Vec<CategoricalEncoding>,
    defaults: GeographyDefaults,
}

impl Dataset {
    /// Builds a dataset, checking every invariant. Missing coordinates become
    /// unit-grid positions by row index, missing populations become 1.0.
    pub fn new(
        ids: Vec<String>,
        feature_names: Vec<String>,
        features: Array2<f64>,
        coords: Option<Array2<f64>>,
        populations: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = ids.len();
        if n < 2 {
            return Err(Error::TooFewPoints(n));
        }
        if features.nrows() != n {
            return Err(Error::Shape(format!(
                "{} ids but {} feature rows",
                n,
                features.nrows()
            )));
        }
        if features.ncols() != feature_names.len() || features.ncols() == 0 {
            return Err(Error::Shape(format!(
                "{} feature names for {} feature columns",
                feature_names.len(),
                features.ncols()
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        let mut seen = HashSet::with_capacity(n);
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }

        let mut defaults = GeographyDefaults::default();
        let coords = match coords {
            Some(c) => {
                if c.dim() != (n, 2) {
                    return Err(Error::Shape(format!(
                        "coordinates must be {n}x2, got {:?}",
                        c.dim()
                    )));
                }
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite("coordinates"));
                }
                c
            }
            None => {
                defaults.coords = true;
                grid_coords(n)
            }
        };
        let populations = match populations {
            Some(p) => {
                if p.len() != n {
                    return Err(Error::Shape(format!(
                        "{n} points but {} populations",
                        p.len()
                    )));
                }
                for (id, &value) in ids.iter().zip(&p) {
                    if !(value > 0.0) || !value.is_finite() {
                        return Err(Error::NonPositivePopulation {
                            id: id.clone(),
                            value,
                        });
                    }
                }
                p
            }
            None => {
                defaults.populations = true;
                vec![1.0; n]
            }
        };

        Ok(Dataset {
            ids,
            feature_names,
            features,
            coords,
            populations,
            encodings: Vec::new(),
            defaults,
        })
    }

    pub(crate) fn with_encodings(mut self, encodings: Vec<CategoricalEncoding>) -> Self {
        self.encodings = encodings;
        self
    }

    /// Number of points, N.
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Feature dimension, r.
    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn point(&self, k: usize) -> ArrayView1<'_, f64> {
        self.features.row(k)
    }

    pub fn coords(&self) -> &Array2<f64> {
        &self.coords
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn encodings(&self) -> &[CategoricalEncoding] {
        &self.encodings
    }

    pub fn geography_defaults(&self) -> GeographyDefaults {
        self.defaults
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// The raw (pre-normalisation) values of one feature column.
    pub fn extract_context(&self, column: &str) -> Result<ContextSeries> {
        let j = self
            .feature_index(column)
            .ok_or_else(|| Error::UnknownColumn(column.to_string()))?;
        Ok(ContextSeries {
            name: column.to_string(),
            values: self.features.column(j).to_vec(),
        })
    }

    /// Rescales every feature column to [0, 1]. Constant columns map to 0.
    pub fn min_max_normalized(&self) -> Dataset {
        let mut features = self.features.clone();
        for mut col in features.axis_iter_mut(Axis(1)) {
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let span = hi - lo;
            col.mapv_inplace(|v| if span > 0.0 { (v - lo) / span } else { 0.0 });
        }
        Dataset {
            features,
            ..self.clone()
        }
    }

    /// Same geography and ids with a different feature matrix. Used to run
    /// FCM on a single column while keeping the dataset contract.
    pub fn with_features(&self, names: Vec<String>, features: Array2<f64>) -> Result<Dataset> {
        let mut ds = Dataset::new(
            self.ids.clone(),
            names,
            features,
            Some(self.coords.clone()),
            Some(self.populations.clone()),
        )?;
        ds.defaults = self.defaults;
        Ok(ds)
    }
}

/// The raw context attribute y_k, one value per point.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextSeries {
    pub name: String,
    pub values: Vec<f64>,
}

impl ContextSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("context series"));
        }
        Ok(ContextSeries {
            name: name.into(),
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The series as an N×1 dataset with default geography, for clustering
    /// the context attribute on its own.
    pub fn to_dataset(&self) -> Result<Dataset> {
        let n = self.values.len();
        let features = Array2::from_shape_vec((n, 1), self.values.clone())
            .map_err(|e| Error::Shape(e.to_string()))?;
        Dataset::new(
            (0..n).map(|k| k.to_string()).collect(),
            vec![self.name.clone()],
            features,
            None,
            None,
        )
    }
}

/// Row-major unit grid, `ceil(sqrt(n))` columns wide.
fn grid_coords(n: usize) -> Array2<f64> {
    let width = (n as f64).sqrt().ceil().max(1.0) as usize;
    Array2::from_shape_fn((n, 2), |(k, axis)| {
        if axis == 0 {
            (k % width) as f64
        } else {
            (k / width) as f64
        }
    })
}
