use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;

use super::{CategoricalEncoding, Dataset};
use crate::error::{Error, Result};

/// Maps CSV columns to dataset roles.
///
/// The textual form is a comma-separated list of `key=value` pairs where a
/// bare token continues the previous key's value list:
/// `id=Name, context=Income, population=Pop, coords=X,Y`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schema {
    pub id: String,
    /// Explicit feature columns. `None` takes every column not used by
    /// another role.
    pub features: Option<Vec<String>>,
    pub population: Option<String>,
    pub coords: Option<(String, String)>,
    /// Context column name; not used by the loader itself.
    pub context: Option<String>,
}

impl Schema {
    pub fn with_id(id: impl Into<String>) -> Self {
        Schema {
            id: id.into(),
            ..Schema::default()
        }
    }
}

impl FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut entries: Vec<(String, Vec<String>)> = Vec::new();
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match token.split_once('=') {
                Some((k, v)) => entries.push((k.trim().to_string(), vec![v.trim().to_string()])),
                None => match entries.last_mut() {
                    Some((_, values)) => values.push(token.to_string()),
                    None => return Err(Error::param(format!("schema token `{token}` has no key"))),
                },
            }
        }
        let mut schema = Schema::default();
        for (key, mut values) in entries {
            match key.as_str() {
                "id" => schema.id = single(&key, values)?,
                "population" => schema.population = Some(single(&key, values)?),
                "context" => schema.context = Some(single(&key, values)?),
                "coords" => {
                    if values.len() != 2 {
                        return Err(Error::param("coords needs exactly two columns"));
                    }
                    let y = values.pop().unwrap();
                    let x = values.pop().unwrap();
                    schema.coords = Some((x, y));
                }
                "features" => schema.features = Some(values),
                other => return Err(Error::param(format!("unknown schema key `{other}`"))),
            }
        }
        if schema.id.is_empty() {
            return Err(Error::param("schema needs an id column"));
        }
        Ok(schema)
    }
}

fn single(key: &str, mut values: Vec<String>) -> Result<String> {
    if values.len() != 1 {
        return Err(Error::param(format!("schema key `{key}` takes one column")));
    }
    Ok(values.pop().unwrap())
}

/// First-appearance ordinal coding: the first distinct string becomes 1.0,
/// the next new one 2.0, and so on.
pub fn encode_categoricals<S: AsRef<str>>(column: &[S]) -> (Vec<f64>, Vec<String>) {
    let mut levels: Vec<String> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    let codes = column
        .iter()
        .map(|s| {
            let s = s.as_ref();
            let next = index.len();
            let code = *index.entry(s).or_insert_with(|| {
                levels.push(s.to_string());
                next
            });
            (code + 1) as f64
        })
        .collect();
    (codes, levels)
}

/// Loads a header-first UTF-8 CSV.
///
/// A feature column whose first cell does not parse as a number is treated
/// as categorical and coded with [`encode_categoricals`]. Once a column is
/// numeric, a later unparseable cell is an error. Blank cells are rejected.
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    };

    let id_col = col(&schema.id)?;
    let pop_col = schema.population.as_deref().map(col).transpose()?;
    let coord_cols = match &schema.coords {
        Some((x, y)) => Some((col(x)?, col(y)?)),
        None => None,
    };
    let feature_cols: Vec<usize> = match &schema.features {
        Some(names) => names.iter().map(|n| col(n)).collect::<Result<_>>()?,
        None => (0..headers.len())
            .filter(|&c| {
                c != id_col
                    && Some(c) != pop_col
                    && coord_cols.is_none_or(|(x, y)| c != x && c != y)
            })
            .collect(),
    };
    if feature_cols.is_empty() {
        return Err(Error::param("schema selects no feature columns"));
    }

    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for record in reader.records() {
        rows.push(record?);
    }
    let n = rows.len();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }

    // Rows are reported 1-based, counting data rows after the header.
    let cell = |row: usize, c: usize| -> Result<&str> {
        let v = rows[row].get(c).unwrap_or("");
        if v.is_empty() {
            Err(Error::MissingValue {
                row: row + 1,
                column: headers[c].clone(),
            })
        } else {
            Ok(v)
        }
    };
    let numeric = |row: usize, c: usize| -> Result<f64> {
        let raw = cell(row, c)?;
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Unparseable {
                row: row + 1,
                column: headers[c].clone(),
                value: raw.to_string(),
            })
    };

    let ids = (0..n)
        .map(|k| cell(k, id_col).map(str::to_string))
        .collect::<Result<Vec<_>>>()?;

    let mut features = Array2::zeros((n, feature_cols.len()));
    let mut encodings = Vec::new();
    for (j, &c) in feature_cols.iter().enumerate() {
        let categorical = cell(0, c)?.parse::<f64>().is_err();
        if categorical {
            let raw = (0..n).map(|k| cell(k, c)).collect::<Result<Vec<_>>>()?;
            let (codes, levels) = encode_categoricals(&raw);
            for (k, v) in codes.into_iter().enumerate() {
                features[[k, j]] = v;
            }
            encodings.push(CategoricalEncoding {
                column: headers[c].clone(),
                levels,
            });
        } else {
            for k in 0..n {
                features[[k, j]] = numeric(k, c)?;
            }
        }
    }

    let populations = pop_col
        .map(|c| (0..n).map(|k| numeric(k, c)).collect::<Result<Vec<_>>>())
        .transpose()?;
    let coords = match coord_cols {
        Some((cx, cy)) => {
            let mut m = Array2::zeros((n, 2));
            for k in 0..n {
                m[[k, 0]] = numeric(k, cx)?;
                m[[k, 1]] = numeric(k, cy)?;
            }
            Some(m)
        }
        None => None,
    };

    let names = feature_cols.iter().map(|&c| headers[c].clone()).collect();
    Ok(Dataset::new(ids, names, features, coords, populations)?.with_encodings(encodings))
}

/// Writes `id, <features...>, x, y, population` with every number at six
/// decimal places. Categorical features are written as their codes.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let mut header = vec!["id".to_string()];
        header.extend(dataset.feature_names().iter().cloned());
        header.extend(["x".to_string(), "y".to_string(), "population".to_string()]);
        w.write_record(&header)?;
        for k in 0..dataset.len() {
            let mut rec = vec![dataset.ids()[k].clone()];
            rec.extend(dataset.point(k).iter().map(|v| format!("{v:.6}")));
            rec.push(format!("{:.6}", dataset.coords()[[k, 0]]));
            rec.push(format!("{:.6}", dataset.coords()[[k, 1]]));
            rec.push(format!("{:.6}", dataset.populations()[k]));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&out).map_err(|e| Error::io(path, e))
}
