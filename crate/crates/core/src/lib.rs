//! Context-constrained fuzzy geographically weighted clustering.
//!
//! The pipeline is: load a [`Dataset`], derive a [`ContextVector`] from one
//! attribute, build gravity [`WeightMatrix`] weights from the area
//! geography, run [`cfgwc_run`], and score the result with [`ifv`].

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cfgwc;
pub mod context;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod fcm;
pub mod geo;
pub mod validity;

pub use cfgwc::{
    cfgwc_memberships, cfgwc_run, cfgwc_run_observed, convergence_delta, isolated_areas, objective,
    simpf_adjust, CfgwcConfig, Phase,
};
pub use context::{
    context_f1, context_f1_detailed, context_f2, context_from_file, context_random,
    ContextMetadata, ContextMethod, ContextVector, F1Target,
};
pub use dataset::{
    encode_categoricals, generate_synthetic, load_csv, write_csv, CategoricalEncoding,
    ContextSeries, Dataset, FeatureSpec, GeoSpec, GeographyDefaults, Schema, SyntheticDataset,
};
pub use error::{Error, Result};
pub use experiment::{build_context, compare, derive_seed, ComparisonReport, ContextSpec};
pub use fcm::{
    align_labels, fcm_run, init_partition, update_centers, update_memberships, Centers,
    ClusteringResult, FcmParams, PartitionMatrix,
};
pub use geo::{gravity_weights, pairwise_distances, Metric, WeightMatrix};
pub use validity::{ifv, sd_max, sigma_bar, IfvReport};
