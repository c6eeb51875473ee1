use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context as _, Result};
use cfgwc_core::experiment::{
    compare as compare_methods, run_method, ComparisonReport, ContextSpec,
};
use cfgwc_core::geo::read_distance_csv;
use cfgwc_core::validity::MEMBERSHIP_FLOOR;
use cfgwc_core::{
    gravity_weights, load_csv, pairwise_distances, CategoricalEncoding, ContextMetadata,
    ContextMethod, Dataset, IfvReport, WeightMatrix,
};
use serde::Serialize;

use crate::artifacts;
use crate::config::Config;

pub const MEMBERSHIPS_FILE: &str = "memberships.csv";
pub const CENTERS_FILE: &str = "centers.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMING_FILE: &str = "timing.json";
pub const GEOJSON_FILE: &str = "points.geojson";
pub const COMPARISON_FILE: &str = "comparison.json";

#[derive(Debug, Serialize)]
pub struct DatasetInfo {
    pub n: usize,
    pub features: Vec<String>,
    pub encodings: Vec<CategoricalEncoding>,
    pub normalized: bool,
    pub synthetic_coords: bool,
    pub synthetic_populations: bool,
}

#[derive(Debug, Serialize)]
pub struct ContextInfo {
    pub method: ContextMethod,
    pub metadata: ContextMetadata,
}

/// Machine-readable record of one run. Wall-clock time lives in
/// `timing.json` so that this file is reproducible byte for byte.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub config: Config,
    pub dataset: DatasetInfo,
    pub context: ContextInfo,
    pub iterations: usize,
    pub converged: bool,
    pub objective: f64,
    pub ifv: IfvReport,
    pub isolated_areas: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Timing {
    wall_clock_ms: f64,
}

pub struct Prepared {
    pub config: Config,
    pub dataset: Dataset,
    pub weights: WeightMatrix,
}

pub fn prepare(config_path: &Path) -> Result<Prepared> {
    let config = Config::load(config_path)?;
    let mut dataset = load_csv(&config.data.path, &config.schema())
        .with_context(|| format!("loading {}", config.data.path.display()))?;
    if config.data.normalize {
        dataset = dataset.min_max_normalized();
    }
    let distances = match &config.geo.distances {
        Some(p) => {
            read_distance_csv(p).with_context(|| format!("loading distances {}", p.display()))?
        }
        None => pairwise_distances(dataset.coords(), config.metric()?)?,
    };
    let weights = gravity_weights(
        dataset.populations(),
        &distances,
        config.geo.a,
        config.geo.b,
    )?;
    Ok(Prepared {
        config,
        dataset,
        weights,
    })
}

fn context_spec(config: &Config, method: ContextMethod) -> Result<ContextSpec> {
    Ok(ContextSpec {
        method,
        column: config.context.column.clone(),
        target: config.target()?,
        file: config.context.file.clone(),
    })
}

/// Full pipeline; artifacts land in the configured output directory only if
/// every stage succeeds.
pub fn run(config_path: &Path) -> Result<RunSummary> {
    let start = Instant::now();
    let Prepared {
        config,
        dataset,
        weights,
    } = prepare(config_path)?;
    let spec = context_spec(&config, config.method()?)?;
    let out = run_method(
        &dataset,
        &weights,
        &config.clustering(),
        &spec,
        |_, _, _| {},
    )?;

    let geo = dataset.geography_defaults();
    let mut warnings = Vec::new();
    if geo.coords {
        warnings.push(
            "synthetic geography: no coordinates given, areas placed on a unit grid".to_string(),
        );
    }
    if geo.populations {
        warnings.push(
            "synthetic geography: no populations given, every area has population 1".to_string(),
        );
    }
    if let ContextMetadata::F1 { clamped, .. } = out.context.metadata() {
        if *clamped > 0 {
            warnings.push(format!(
                "context clamp: {clamped} f1 values raised to the 1e-6 floor"
            ));
        }
    }
    if out.ifv.clamped_entries > 0 {
        warnings.push(format!(
            "ifv clamp: {} memberships raised to {MEMBERSHIP_FLOOR:e} before taking logs",
            out.ifv.clamped_entries
        ));
    }
    if out.ifv.degenerate {
        warnings
            .push("ifv degenerate: centers coincide or scatter is zero, reported as 0".to_string());
    }
    let isolated: Vec<String> = out
        .result
        .isolated_areas
        .iter()
        .map(|&k| dataset.ids()[k].clone())
        .collect();
    if !isolated.is_empty() {
        warnings.push(format!(
            "isolated areas: {} have no spatial neighbours and skip the spatial step",
            isolated.join(", ")
        ));
    }
    if !out.result.converged {
        warnings.push(format!(
            "not converged after {} iterations",
            out.result.iterations
        ));
    }

    let summary = RunSummary {
        dataset: DatasetInfo {
            n: dataset.len(),
            features: dataset.feature_names().to_vec(),
            encodings: dataset.encodings().to_vec(),
            normalized: config.data.normalize,
            synthetic_coords: geo.coords,
            synthetic_populations: geo.populations,
        },
        context: ContextInfo {
            method: out.context.method(),
            metadata: out.context.metadata().clone(),
        },
        iterations: out.result.iterations,
        converged: out.result.converged,
        objective: out
            .result
            .objective_trace
            .last()
            .copied()
            .unwrap_or(f64::NAN),
        ifv: out.ifv.clone(),
        isolated_areas: isolated,
        warnings,
        config,
    };

    let mut files = vec![
        (
            MEMBERSHIPS_FILE,
            artifacts::memberships_csv(&dataset, &out.result.partition, &out.context)?,
        ),
        (
            CENTERS_FILE,
            artifacts::centers_csv(&dataset, &out.result.centers)?,
        ),
        (SUMMARY_FILE, artifacts::to_json(&summary)?),
    ];
    if summary.config.output.geojson {
        let gj = artifacts::geojson(&dataset, &out.result.partition, &out.context);
        files.push((GEOJSON_FILE, artifacts::to_json(&gj)?));
    }
    let timing = Timing {
        wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    files.push((TIMING_FILE, artifacts::to_json(&timing)?));
    artifacts::commit(&summary.config.output.dir, &files)?;
    Ok(summary)
}

/// Paired multi-seed comparison of the configured methods; the report is
/// written to `comparison.json` in the output directory.
pub fn compare(config_path: &Path, seeds: usize) -> Result<(ComparisonReport, PathBuf)> {
    let Prepared {
        config,
        dataset,
        weights,
    } = prepare(config_path)?;
    let specs = config
        .compare_methods()?
        .into_iter()
        .map(|m| context_spec(&config, m))
        .collect::<Result<Vec<_>>>()?;
    let report = compare_methods(
        &dataset,
        &weights,
        &config.clustering(),
        &specs,
        seeds,
        config.compare.seed_base,
    )?;
    artifacts::commit(
        &config.output.dir,
        &[(COMPARISON_FILE, artifacts::to_json(&report)?)],
    )?;
    Ok((report, config.output.dir.join(COMPARISON_FILE)))
}

/// Plain-text table of a comparison report.
pub fn render_report(report: &ComparisonReport) -> String {
    let name = |m: ContextMethod| {
        serde_json::to_value(m)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
    };
    let mut s = format!("{} seeds from {}\n", report.seeds, report.seed_base);
    s.push_str(&format!(
        "{:<8} {:>12} {:>12} {:>12} {:>10}\n",
        "method", "median", "min", "max", "converged"
    ));
    for m in &report.methods {
        s.push_str(&format!(
            "{:<8} {:>12.6} {:>12.6} {:>12.6} {:>7}/{}\n",
            name(m.method).unwrap_or_default(),
            m.median,
            m.min,
            m.max,
            m.converged_runs,
            report.seeds
        ));
    }
    for p in &report.pairwise {
        s.push_str(&format!(
            "{} vs {}: {}-{} ({} ties)\n",
            name(p.a).unwrap_or_default(),
            name(p.b).unwrap_or_default(),
            p.a_wins,
            p.b_wins,
            p.ties
        ));
    }
    s
}
