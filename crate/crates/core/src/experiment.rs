//! Seed fan-out, context dispatch and the multi-seed method comparison.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::cfgwc::{cfgwc_run_observed, CfgwcConfig, Phase};
use crate::context::{
    context_f1, context_f2, context_from_file, context_random, ContextMethod, ContextVector,
    F1Target,
};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fcm::{ClusteringResult, FcmParams, PartitionMatrix};
use crate::geo::WeightMatrix;
use crate::validity::{ifv, IfvReport};

/// Component-specific seed: FNV-1a of the component name mixed into the
/// base seed with a splitmix64 finaliser. Stable across platforms and
/// releases.
pub fn derive_seed(base: u64, component: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in component.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = base.wrapping_add(h).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub const SEED_INIT: &str = "clustering.init";
pub const SEED_CONTEXT_F1: &str = "context.f1";
pub const SEED_CONTEXT_RANDOM: &str = "context.random";

/// How to obtain the context vector for a run.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextSpec {
    pub method: ContextMethod,
    /// Context attribute; required for f1 and f2.
    pub column: Option<String>,
    pub target: F1Target,
    /// Required for `file`.
    pub file: Option<PathBuf>,
}

impl ContextSpec {
    pub fn new(method: ContextMethod, column: Option<String>) -> Self {
        ContextSpec {
            method,
            column,
            target: F1Target::default(),
            file: None,
        }
    }
}

/// Builds the context vector. The f1 FCM shares `c`, `m`, `eps` and
/// `max_iter` with the main run and draws its own derived seed.
pub fn build_context(
    dataset: &Dataset,
    spec: &ContextSpec,
    config: &CfgwcConfig,
) -> Result<ContextVector> {
    let series = || {
        let col = spec
            .column
            .as_deref()
            .ok_or_else(|| Error::param("context method needs a context column"))?;
        dataset.extract_context(col)
    };
    let f = match spec.method {
        ContextMethod::F1 => {
            let params = FcmParams {
                c: config.c,
                m: config.m,
                eps: config.eps,
                max_iter: config.max_iter,
                seed: derive_seed(config.seed, SEED_CONTEXT_F1),
            };
            context_f1(&series()?, spec.target, &params)?
        }
        ContextMethod::F2 => context_f2(&series()?)?,
        ContextMethod::Random => {
            context_random(dataset.len(), derive_seed(config.seed, SEED_CONTEXT_RANDOM))?
        }
        ContextMethod::File => {
            let path = spec
                .file
                .as_ref()
                .ok_or_else(|| Error::param("context method `file` needs a path"))?;
            context_from_file(path)?
        }
    };
    if f.len() != dataset.len() {
        return Err(Error::Shape(format!(
            "context has {} values for {} points",
            f.len(),
            dataset.len()
        )));
    }
    Ok(f)
}

#[derive(Clone, Debug)]
pub struct MethodRun {
    pub context: ContextVector,
    pub result: ClusteringResult,
    pub ifv: IfvReport,
}

/// One paired run: `config.seed` is the run seed from which the init and
/// context seeds are derived.
pub fn run_method(
    dataset: &Dataset,
    weights: &WeightMatrix,
    config: &CfgwcConfig,
    spec: &ContextSpec,
    observer: impl FnMut(usize, Phase, &PartitionMatrix),
) -> Result<MethodRun> {
    let context = build_context(dataset, spec, config)?;
    let run_config = CfgwcConfig {
        seed: derive_seed(config.seed, SEED_INIT),
        ..*config
    };
    let result = cfgwc_run_observed(dataset, &context, weights, &run_config, observer)?;
    let ifv = ifv(dataset, &result.partition, &result.centers)?;
    Ok(MethodRun {
        context,
        result,
        ifv,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MethodSummary {
    pub method: ContextMethod,
    /// IFV per seed, in seed order.
    pub ifv: Vec<f64>,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub converged_runs: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairwiseWins {
    pub a: ContextMethod,
    pub b: ContextMethod,
    pub a_wins: usize,
    pub b_wins: usize,
    pub ties: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub seed_base: u64,
    pub seeds: usize,
    pub methods: Vec<MethodSummary>,
    /// Empty when only one method is compared.
    pub pairwise: Vec<PairwiseWins>,
}

impl ComparisonReport {
    pub fn method(&self, method: ContextMethod) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == method)
    }
}

/// Runs every method for run seeds `seed_base .. seed_base + seeds`. For a
/// given run seed all methods share the same initial partition seed, so
/// the comparison is paired. Seeds run in parallel; results are ordered.
pub fn compare(
    dataset: &Dataset,
    weights: &WeightMatrix,
    config: &CfgwcConfig,
    specs: &[ContextSpec],
    seeds: usize,
    seed_base: u64,
) -> Result<ComparisonReport> {
    if seeds == 0 {
        return Err(Error::param("compare needs at least one seed"));
    }
    if specs.is_empty() {
        return Err(Error::param("compare needs at least one method"));
    }
    config.validate()?;

    let per_seed: Vec<Vec<(f64, bool)>> = (0..seeds as u64)
        .into_par_iter()
        .map(|s| {
            let cfg = CfgwcConfig {
                seed: seed_base.wrapping_add(s),
                ..*config
            };
            specs
                .iter()
                .map(|spec| {
                    run_method(dataset, weights, &cfg, spec, |_, _, _| {})
                        .map(|r| (r.ifv.ifv, r.result.converged))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let methods: Vec<MethodSummary> = specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let ifv: Vec<f64> = per_seed.iter().map(|row| row[i].0).collect();
            let converged_runs = per_seed.iter().filter(|row| row[i].1).count();
            MethodSummary {
                method: spec.method,
                median: median(&ifv),
                min: ifv.iter().copied().fold(f64::INFINITY, f64::min),
                max: ifv.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                ifv,
                converged_runs,
            }
        })
        .collect();

    let mut pairwise = Vec::new();
    for i in 0..methods.len() {
        for j in (i + 1)..methods.len() {
            let (mut a_wins, mut b_wins, mut ties) = (0, 0, 0);
            for (x, y) in methods[i].ifv.iter().zip(&methods[j].ifv) {
                match x.total_cmp(y) {
                    std::cmp::Ordering::Greater => a_wins += 1,
                    std::cmp::Ordering::Less => b_wins += 1,
                    std::cmp::Ordering::Equal => ties += 1,
                }
            }
            pairwise.push(PairwiseWins {
                a: methods[i].method,
                b: methods[j].method,
                a_wins,
                b_wins,
                ties,
            });
        }
    }

    Ok(ComparisonReport {
        seed_base,
        seeds,
        methods,
        pairwise,
    })
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic, FeatureSpec, GeoSpec};
    use crate::geo::{gravity_weights, pairwise_distances, Metric};

    #[test]
    fn derived_seeds_differ_by_component_and_are_stable() {
        let a = derive_seed(7, SEED_INIT);
        assert_eq!(a, derive_seed(7, SEED_INIT));
        assert_ne!(a, derive_seed(7, SEED_CONTEXT_RANDOM));
        assert_ne!(a, derive_seed(8, SEED_INIT));
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    fn fixture() -> (Dataset, WeightMatrix) {
        let spec = FeatureSpec::well_separated(3, 2, 10.0, 1.0);
        let s = generate_synthetic(24, 3, &spec, &GeoSpec::default(), 2).unwrap();
        let d = pairwise_distances(s.dataset.coords(), Metric::Euclidean).unwrap();
        let w = gravity_weights(s.dataset.populations(), &d, 1.0, 1.0).unwrap();
        (s.dataset, w)
    }

    #[test]
    fn single_method_single_seed_has_no_pairwise() {
        let (ds, w) = fixture();
        let spec = ContextSpec::new(ContextMethod::F2, Some("feature_0".into()));
        let r = compare(&ds, &w, &CfgwcConfig::default(), &[spec], 1, 0).unwrap();
        assert_eq!(r.methods.len(), 1);
        assert_eq!(r.methods[0].ifv.len(), 1);
        assert!(r.pairwise.is_empty());
    }

    #[test]
    fn zero_seeds_is_an_error() {
        let (ds, w) = fixture();
        let spec = ContextSpec::new(ContextMethod::Random, None);
        assert!(compare(&ds, &w, &CfgwcConfig::default(), &[spec], 0, 0).is_err());
    }

    #[test]
    fn compare_is_deterministic() {
        let (ds, w) = fixture();
        let specs = [
            ContextSpec::new(ContextMethod::F1, Some("feature_0".into())),
            ContextSpec::new(ContextMethod::Random, None),
        ];
        let a = compare(&ds, &w, &CfgwcConfig::default(), &specs, 4, 10).unwrap();
        let b = compare(&ds, &w, &CfgwcConfig::default(), &specs, 4, 10).unwrap();
        assert_eq!(a.methods[0].ifv, b.methods[0].ifv);
        assert_eq!(a.methods[1].ifv, b.methods[1].ifv);
        let p = &a.pairwise[0];
        assert_eq!(p.a_wins + p.b_wins + p.ties, 4);
    }

    #[test]
    fn f1_without_column_is_an_error() {
        let (ds, _) = fixture();
        let spec = ContextSpec::new(ContextMethod::F1, None);
        assert!(build_context(&ds, &spec, &CfgwcConfig::default()).is_err());
    }
}
