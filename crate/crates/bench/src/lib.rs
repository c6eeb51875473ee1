//! Shared fixtures for the criterion benches.

use cfgwc_core::{
    generate_synthetic, gravity_weights, pairwise_distances, ContextSeries, Dataset, FeatureSpec,
    GeoSpec, Metric, WeightMatrix,
};

/// `n` areas in three well-separated 3-D blobs with gravity weights.
pub fn fixture(n: usize, seed: u64) -> (Dataset, WeightMatrix) {
    let spec = FeatureSpec::well_separated(3, 3, 10.0, 1.0);
    let s = generate_synthetic(n, 3, &spec, &GeoSpec::default(), seed)
        .expect("valid generator parameters");
    let d = pairwise_distances(s.dataset.coords(), Metric::Euclidean).expect("finite coordinates");
    let w =
        gravity_weights(s.dataset.populations(), &d, 1.0, 1.0).expect("distinct synthetic areas");
    (s.dataset, w)
}

pub fn context_series(dataset: &Dataset) -> ContextSeries {
    dataset
        .extract_context("feature_0")
        .expect("generator names features feature_<d>")
}
