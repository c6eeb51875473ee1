//! TOML run configuration. Relative paths resolve against the directory
//! holding the config file.
//!
//! ```toml
//! [data]
//! path = "areas.csv"
//! id = "Name"
//! # features = ["Income", "Age"]   # default: every other column
//! # population = "Pop"
//! # coords = ["X", "Y"]
//! # normalize = false              # min-max scale features to [0, 1]
//!
//! [context]
//! method = "f2"                    # f1 | f2 | random | file
//! column = "Income"
//! # target = "highest"             # f1: highest | lowest | rowmax | index:N
//! # file = "context.txt"           # method = "file"
//!
//! [geo]
//! # metric = "euclidean"           # or "haversine" (coords as lon, lat)
//! # distances = "dist.csv"         # header-less N×N matrix, overrides coords
//! # a = 1.0
//! # b = 1.0
//!
//! [clustering]
//! # c = 3, m = 2.0, alpha = 0.7, beta = 0.3, eps = 1e-5, max_iter = 300, seed = 0
//!
//! [output]
//! dir = "out"
//! # geojson = true
//!
//! [compare]
//! # methods = ["f1", "f2", "random"]
//! # seed_base = 0
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use cfgwc_core::{CfgwcConfig, ContextMethod, F1Target, Metric, Schema};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub data: DataSection,
    pub context: ContextSection,
    #[serde(default)]
    pub geo: GeoSection,
    #[serde(default)]
    pub clustering: ClusteringSection,
    pub output: OutputSection,
    #[serde(default)]
    pub compare: CompareSection,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub path: PathBuf,
    pub id: String,
    pub features: Option<Vec<String>>,
    pub population: Option<String>,
    pub coords: Option<[String; 2]>,
    #[serde(default)]
    pub normalize: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSection {
    pub method: String,
    pub column: Option<String>,
    #[serde(default = "default_target")]
    pub target: String,
    pub file: Option<PathBuf>,
}

fn default_target() -> String {
    "highest".into()
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeoSection {
    pub metric: String,
    pub distances: Option<PathBuf>,
    pub a: f64,
    pub b: f64,
}

impl Default for GeoSection {
    fn default() -> Self {
        GeoSection {
            metric: "euclidean".into(),
            distances: None,
            a: 1.0,
            b: 1.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusteringSection {
    pub c: usize,
    pub m: f64,
    pub alpha: f64,
    pub beta: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for ClusteringSection {
    fn default() -> Self {
        let d = CfgwcConfig::default();
        ClusteringSection {
            c: d.c,
            m: d.m,
            alpha: d.alpha,
            beta: d.beta,
            eps: d.eps,
            max_iter: d.max_iter,
            seed: d.seed,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    #[serde(default = "yes")]
    pub geojson: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    pub methods: Vec<String>,
    pub seed_base: u64,
}

impl Default for CompareSection {
    fn default() -> Self {
        CompareSection {
            methods: vec!["f1".into(), "f2".into(), "random".into()],
            seed_base: 0,
        }
    }
}

impl Config {
    /// Reads the file and resolves every relative path against its
    /// directory.
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut config: Config =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut config.data.path);
        resolve(&mut config.output.dir);
        if let Some(p) = config.context.file.as_mut() {
            resolve(p);
        }
        if let Some(p) = config.geo.distances.as_mut() {
            resolve(p);
        }
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        self.method()?;
        self.target()?;
        self.metric()?;
        self.clustering().validate()?;
        self.compare_methods()?;
        Ok(())
    }

    pub fn schema(&self) -> Schema {
        Schema {
            id: self.data.id.clone(),
            features: self.data.features.clone(),
            population: self.data.population.clone(),
            coords: self.data.coords.clone().map(|[x, y]| (x, y)),
            context: self.context.column.clone(),
        }
    }

    pub fn method(&self) -> Result<ContextMethod> {
        Ok(self.context.method.parse()?)
    }

    pub fn target(&self) -> Result<F1Target> {
        Ok(self.context.target.parse()?)
    }

    pub fn metric(&self) -> Result<Metric> {
        Ok(self.geo.metric.parse()?)
    }

    pub fn clustering(&self) -> CfgwcConfig {
        let c = &self.clustering;
        CfgwcConfig {
            c: c.c,
            m: c.m,
            alpha: c.alpha,
            beta: c.beta,
            a: self.geo.a,
            b: self.geo.b,
            eps: c.eps,
            max_iter: c.max_iter,
            seed: c.seed,
        }
    }

    pub fn compare_methods(&self) -> Result<Vec<ContextMethod>> {
        let methods = self
            .compare
            .methods
            .iter()
            .map(|m| m.parse::<ContextMethod>())
            .collect::<cfgwc_core::Result<Vec<_>>>()?;
        if methods.is_empty() {
            bail!("[compare] methods must not be empty");
        }
        if methods.contains(&ContextMethod::File) {
            bail!("[compare] methods must be drawn from f1, f2, random");
        }
        Ok(methods)
    }
}
