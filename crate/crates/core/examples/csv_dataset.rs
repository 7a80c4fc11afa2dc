//! Loading a headed CSV through a column spec, splitting it and writing the
//! encoded halves back out.
//!
//!     cargo run --release --example csv_dataset

use sarl::data::{load_csv, split, write_csv, DatasetSpec, SplitSpec};
use sarl::SarlError;

const SPEC: &str = r#"standardize = true

[columns]
height = { role = "feature" }
city = { role = "feature", encoding = "categorical-onehot" }
label = { role = "target", encoding = "categorical-onehot" }
group = { role = "sensitive", encoding = "categorical-onehot" }
"#;

const ROWS: &str = "height,city,label,group
1.71,paris,yes,a
1.62,oslo,no,b
1.80,paris,yes,b
1.55,lima,no,a
1.90,oslo,yes,a
1.66,lima,no,b
";

fn main() -> sarl::Result<()> {
    let dir = std::env::temp_dir().join("sarl-csv-example");
    std::fs::create_dir_all(&dir).map_err(|e| SarlError::Io { path: dir.clone(), source: e })?;
    let path = dir.join("people.csv");
    std::fs::write(&path, ROWS).map_err(|e| SarlError::Io { path: path.clone(), source: e })?;

    let data = load_csv(&path, &DatasetSpec::from_toml_str(SPEC)?)?;
    println!("features {:?}", data.schema.feature_names());
    println!("x is {} x {}, targets {:?}", data.x.nrows(), data.x.ncols(), data.target_labels());

    let (train, test) = split(&data, SplitSpec { train_fraction: 0.5, seed: 4 })?;
    write_csv(&train, dir.join("train.csv"))?;
    write_csv(&test, dir.join("test.csv"))?;
    std::fs::write(dir.join("spec.toml"), train.schema.written_spec().to_toml_string()?)
        .map_err(|e| SarlError::Io { path: dir.join("spec.toml"), source: e })?;

    // written files hold the encoded columns, described by the written spec
    let reread = load_csv(dir.join("test.csv"), &train.schema.written_spec())?;
    println!("test half re-read identically: {}", reread.x == test.x && reread.y == test.y);
    println!("files in {}", dir.display());
    Ok(())
}
