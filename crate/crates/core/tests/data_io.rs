mod common;

use std::io::Write;

use sarl::data::*;
use sarl::SarlError;

const SPEC: &str = r#"standardize = false

[columns]
a = { role = "feature" }
b = { role = "feature", encoding = "categorical-onehot" }
y = { role = "target", encoding = "categorical-onehot" }
s = { role = "sensitive", encoding = "categorical-onehot" }
"#;

fn write_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let spec = DatasetSpec::from_toml_str(SPEC).unwrap();
    let f = write_file("a,b,y,s\n0.1,u,no,m\n-3.25e-7,v,yes,f\n1234567.891,u,yes,m\n");
    let first = load_csv(f.path(), &spec).unwrap();
    let out = tempfile::NamedTempFile::new().unwrap();
    write_csv(&first, out.path()).unwrap();
    let second = load_csv(out.path(), &first.schema.written_spec()).unwrap();
    assert_eq!(first.x, second.x);
    assert_eq!(first.y, second.y);
    assert_eq!(first.s, second.s);
    assert_eq!(first.schema.feature_names(), ["a", "b=u", "b=v"]);
}

#[test]
fn mixture_round_trip_and_determinism() {
    let d = gen_gaussian_mixture(400, 12).unwrap();
    let out = tempfile::NamedTempFile::new().unwrap();
    write_csv(&d, out.path()).unwrap();
    let back = load_csv(out.path(), &d.schema.written_spec()).unwrap();
    assert_eq!(back.x, d.x);
    assert_eq!(back.y, d.y);
    assert_eq!(gen_gaussian_mixture(400, 12).unwrap().x, d.x);
}

#[test]
fn mixture_component_means() {
    let n = 100_000;
    let d = gen_gaussian_mixture(n, 5).unwrap();
    let per = (n / 4) as f64;
    // mean of 25000 draws has standard error 0.3 / sqrt(25000) ~ 0.0019
    for (c, mu) in MIXTURE_MEANS.iter().enumerate() {
        for (i, m) in mu.iter().enumerate() {
            let mean = (c..n).step_by(4).map(|j| d.x[(i, j)]).sum::<f64>() / per;
            assert!((mean - m).abs() < 0.01, "component {c} coord {i}: {mean}");
        }
    }
    let labels = d.target_labels().unwrap();
    assert_eq!(labels.iter().filter(|&&l| l == 0).count(), n / 2);
}

#[test]
fn one_hot_columns_sum_to_one() {
    let m = one_hot(&[2, 0, 1, 2], 3).unwrap();
    for j in 0..4 {
        assert_eq!((0..3).map(|i| m[(i, j)]).sum::<f64>(), 1.0);
    }
    assert_eq!(argmax_columns(&m), vec![2, 0, 1, 2]);
    assert!(matches!(one_hot(&[3], 3), Err(SarlError::LabelOutOfRange { .. })));
}

#[test]
fn split_sizes_and_disjointness() {
    let (tr, te) = split_indices(1000, SplitSpec { train_fraction: 0.7, seed: 0 }).unwrap();
    assert_eq!((tr.len(), te.len()), (700, 300));
    let mut all: Vec<usize> = tr.iter().chain(&te).copied().collect();
    all.sort_unstable();
    assert_eq!(all, (0..1000).collect::<Vec<_>>());
    assert_eq!(split_indices(1000, SplitSpec { train_fraction: 0.7, seed: 0 }).unwrap().0, tr);
    for f in [0.0, 1.0, 1.5] {
        assert!(matches!(split_indices(10, SplitSpec { train_fraction: f, seed: 0 }), Err(SarlError::InvalidConfig(_))));
    }
}

#[test]
fn loader_errors() {
    let spec = DatasetSpec::from_toml_str(SPEC).unwrap();
    let missing = write_file("a,b,y,s\n1,u,no,m\n?,v,yes,f\n");
    assert!(matches!(load_csv(missing.path(), &spec), Err(SarlError::MissingValue { row: 2, .. })));
    let bad = write_file("a,b,y,s\nfoo,u,no,m\n");
    assert!(matches!(load_csv(bad.path(), &spec), Err(SarlError::Parse { row: 1, .. })));
    let header_only = write_file("a,b,y,s\n");
    assert!(matches!(load_csv(header_only.path(), &spec), Err(SarlError::EmptyInput(_))));
    let no_col = write_file("a,b,y\n1,u,no\n");
    assert!(matches!(load_csv(no_col.path(), &spec), Err(SarlError::Schema(_))));
    assert!(matches!(load_csv("/nonexistent/x.csv", &spec), Err(SarlError::Io { .. })));
}

#[test]
fn standardization_uses_training_statistics() {
    let spec = DatasetSpec::from_toml_str(&SPEC.replace("standardize = false", "standardize = true")).unwrap();
    let train = load_csv(write_file("a,b,y,s\n1,u,no,m\n3,v,yes,f\n").path(), &spec).unwrap();
    assert_eq!(train.x[(0, 0)], -1.0);
    assert_eq!(train.x[(0, 1)], 1.0);
    let test = load_csv_with_schema(write_file("a,b,y,s\n5,w,no,f\n").path(), &train.schema).unwrap();
    assert_eq!(test.x[(0, 0)], 3.0);
    let unseen = load_csv_with_schema(write_file("a,b,y,s\n5,u,maybe,f\n").path(), &train.schema);
    assert!(matches!(unseen, Err(SarlError::Schema(_))));
}
