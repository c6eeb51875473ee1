mod common;

use cfgwc_core::{
    generate_synthetic, load_csv, write_csv, Dataset, Error, FeatureSpec, GeoSpec, Schema,
};
use common::*;
use ndarray::Array2;
use proptest::prelude::*;

#[test]
fn table1_loads_with_categorical_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ds = load_table1(dir.path());
    assert_eq!(ds.len(), 8);
    assert_eq!(ds.dim(), 5);
    assert_eq!(
        ds.feature_names(),
        ["Occupation", "Income", "Age", "Gender", "Raise"]
    );

    let income = ds.extract_context("Income").unwrap();
    assert_eq!(income.values, INCOME);

    let occupation: Vec<f64> = ds.features().column(0).to_vec();
    assert_eq!(occupation, [1.0, 2.0, 2.0, 3.0, 1.0, 3.0, 1.0, 2.0]);
    let enc = &ds.encodings()[0];
    assert_eq!(enc.column, "Occupation");
    assert_eq!(enc.levels, ["Student", "Doctor", "Singer"]);
    assert_eq!(ds.encodings()[1].levels, ["Female", "Male"]);

    let age = ds.extract_context("Age").unwrap();
    assert_eq!(age.values, [15.0, 32.0, 27.0, 19.0, 18.0, 23.0, 31.0, 42.0]);

    let geo = ds.geography_defaults();
    assert!(geo.coords && geo.populations);
    assert!(ds.populations().iter().all(|&p| p == 1.0));
}

#[test]
fn single_row_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    std::fs::write(&path, "Name,Income\nMarry,28000\n").unwrap();
    assert!(matches!(
        load_csv(&path, &Schema::with_id("Name")),
        Err(Error::TooFewPoints(1))
    ));
}

#[test]
fn blank_cell_reports_row_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("blank.csv");
    let text = TABLE1_CSV.replace("David,Doctor,35100,", "David,Doctor,,");
    std::fs::write(&path, text).unwrap();
    match load_csv(&path, &Schema::with_id("Name")) {
        Err(Error::MissingValue { row, column }) => {
            assert_eq!(row, 3);
            assert_eq!(column, "Income");
        }
        other => panic!("expected a missing-value error, got {other:?}"),
    }
}

#[test]
fn unknown_context_column() {
    let dir = tempfile::tempdir().unwrap();
    let ds = load_table1(dir.path());
    assert!(matches!(
        ds.extract_context("Salary"),
        Err(Error::UnknownColumn(_))
    ));
}

#[test]
fn schema_roles_are_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("geo.csv");
    std::fs::write(
        &path,
        "code,pop,x,y,a,b\nA,10,0,0,1,2\nB,20,3,4,2,3\nC,30,6,8,3,4\n",
    )
    .unwrap();
    let schema: Schema = "id=code, population=pop, coords=x,y".parse().unwrap();
    let ds = load_csv(&path, &schema).unwrap();
    assert_eq!(ds.feature_names(), ["a", "b"]);
    assert_eq!(ds.populations(), [10.0, 20.0, 30.0]);
    assert_eq!(ds.coords()[[2, 1]], 8.0);
    let geo = ds.geography_defaults();
    assert!(!geo.coords && !geo.populations);
}

#[test]
fn synthetic_invariants_over_many_seeds() {
    let spec = FeatureSpec::well_separated(3, 2, 5.0, 1.0);
    let geo = GeoSpec::default();
    for seed in 0..100 {
        let s = generate_synthetic(30, 3, &spec, &geo, seed).unwrap();
        let ds = &s.dataset;
        assert_eq!(ds.len(), 30);
        assert_eq!(ds.dim(), 2);
        assert_eq!(s.labels.len(), 30);
        assert!(s.labels.iter().all(|&l| l < 3));
        assert!(ds.features().iter().all(|v| v.is_finite()));
        assert!(ds
            .populations()
            .iter()
            .all(|&p| (100.0..=1000.0).contains(&p)));
        assert!(ds.coords().iter().all(|&c| (0.0..=100.0).contains(&c)));
        let again = generate_synthetic(30, 3, &spec, &geo, seed).unwrap();
        assert_eq!(ds.features(), again.dataset.features());
        assert_eq!(ds.coords(), again.dataset.coords());
    }
}

#[test]
fn benchmark_blobs_are_recoverable_by_nearest_mean() {
    let spec = FeatureSpec::well_separated(3, 3, 10.0, 1.0);
    let s = generate_synthetic(60, 3, &spec, &GeoSpec::default(), 1).unwrap();
    for k in 0..60 {
        let x = s.dataset.point(k);
        let nearest = (0..3)
            .min_by(|&a, &b| {
                let da: f64 = x
                    .iter()
                    .zip(&spec.means[a])
                    .map(|(p, m)| (p - m).powi(2))
                    .sum();
                let db: f64 = x
                    .iter()
                    .zip(&spec.means[b])
                    .map(|(p, m)| (p - m).powi(2))
                    .sum();
                da.total_cmp(&db)
            })
            .unwrap();
        assert_eq!(nearest, s.labels[k], "point {k}");
    }
}

fn arb_dataset() -> impl Strategy<Value = Dataset> {
    // Values on a 1e-3 grid survive six-decimal output exactly.
    (2usize..12, 1usize..4).prop_flat_map(|(n, r)| {
        (
            proptest::collection::vec(-1_000_000i64..1_000_000, n * r),
            proptest::collection::vec(-100_000i64..100_000, n * 2),
            proptest::collection::vec(1i64..1_000_000, n),
        )
            .prop_map(move |(x, xy, pop)| {
                let milli = |v: &i64| *v as f64 / 1000.0;
                Dataset::new(
                    (0..n).map(|k| format!("a{k}")).collect(),
                    (0..r).map(|d| format!("f{d}")).collect(),
                    Array2::from_shape_vec((n, r), x.iter().map(milli).collect()).unwrap(),
                    Some(Array2::from_shape_vec((n, 2), xy.iter().map(milli).collect()).unwrap()),
                    Some(pop.iter().map(milli).collect()),
                )
                .unwrap()
            })
    })
}

proptest! {
    #[test]
    fn write_then_load_round_trips(ds in arb_dataset()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        write_csv(&ds, &path).unwrap();
        let schema: Schema = "id=id, population=population, coords=x,y".parse().unwrap();
        let back = load_csv(&path, &schema).unwrap();
        prop_assert_eq!(back.ids(), ds.ids());
        prop_assert_eq!(back.feature_names(), ds.feature_names());
        for (a, b) in back.features().iter().zip(ds.features()) {
            prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
        for (a, b) in back.coords().iter().zip(ds.coords()) {
            prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
        for (a, b) in back.populations().iter().zip(ds.populations()) {
            prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
    }
}
