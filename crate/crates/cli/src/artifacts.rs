//! Rendering of run artifacts and their all-or-nothing placement.

use std::fs;
use std::path::Path;

use anyhow::{Context as _, Result};
use cfgwc_core::{Centers, ContextVector, Dataset, PartitionMatrix};
use serde_json::{json, Map, Value};

/// `id, u_1..u_C, f, cluster` at six decimals; `cluster` is the 1-based
/// argmax.
pub fn memberships_csv(
    dataset: &Dataset,
    partition: &PartitionMatrix,
    f: &ContextVector,
) -> Result<Vec<u8>> {
    let c = partition.c();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string()];
    header.extend((1..=c).map(|j| format!("u_{j}")));
    header.extend(["f".to_string(), "cluster".to_string()]);
    w.write_record(&header)?;
    for k in 0..partition.n() {
        let mut rec = vec![dataset.ids()[k].clone()];
        rec.extend(partition.row(k).iter().map(|u| format!("{u:.6}")));
        rec.push(format!("{:.6}", f.values()[k]));
        rec.push((partition.argmax(k) + 1).to_string());
        w.write_record(&rec)?;
    }
    Ok(w.into_inner()?)
}

/// `cluster, <feature...>` at six decimals.
pub fn centers_csv(dataset: &Dataset, centers: &Centers) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["cluster".to_string()];
    header.extend(dataset.feature_names().iter().cloned());
    w.write_record(&header)?;
    for j in 0..centers.c() {
        let mut rec = vec![(j + 1).to_string()];
        rec.extend(centers.center(j).iter().map(|v| format!("{v:.6}")));
        w.write_record(&rec)?;
    }
    Ok(w.into_inner()?)
}

/// FeatureCollection with one Point per area. Defaulted grid coordinates are
/// flagged with `synthetic_geometry: true` on every feature.
pub fn geojson(dataset: &Dataset, partition: &PartitionMatrix, f: &ContextVector) -> Value {
    let synthetic = dataset.geography_defaults().coords;
    let features: Vec<Value> = (0..dataset.len())
        .map(|k| {
            let mut props = Map::new();
            props.insert("id".into(), json!(dataset.ids()[k]));
            props.insert("cluster".into(), json!(partition.argmax(k) + 1));
            for (j, u) in partition.row(k).iter().enumerate() {
                props.insert(format!("membership_{}", j + 1), json!(u));
            }
            props.insert("f".into(), json!(f.values()[k]));
            if synthetic {
                props.insert("synthetic_geometry".into(), json!(true));
            }
            json!({
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [dataset.coords()[[k, 0]], dataset.coords()[[k, 1]]],
                },
                "properties": props,
            })
        })
        .collect();
    json!({ "type": "FeatureCollection", "features": features })
}

pub fn to_json(value: &impl serde::Serialize) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes every file into a staging directory inside `dir`, then renames
/// them into place. Nothing is touched until all content is rendered, and a
/// failed write leaves no staged files behind.
pub fn commit(dir: &Path, files: &[(&str, Vec<u8>)]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let staging = dir.join(format!(".staging-{}", std::process::id()));
    fs::create_dir_all(&staging).with_context(|| format!("creating {}", staging.display()))?;
    let staged = (|| -> Result<()> {
        for (name, bytes) in files {
            let p = staging.join(name);
            fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))?;
        }
        for (name, _) in files {
            fs::rename(staging.join(name), dir.join(name))
                .with_context(|| format!("moving {name} into place"))?;
        }
        Ok(())
    })();
    let _ = fs::remove_dir_all(&staging);
    staged
}
