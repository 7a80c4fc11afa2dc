//! Converters from the raw UCI Adult and German Credit files to headed CSV,
//! plus column specs for the converted files.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Result, SarlError};

pub const ADULT_COLUMNS: [&str; 15] = [
    "age",
    "workclass",
    "fnlwgt",
    "education",
    "education-num",
    "marital-status",
    "occupation",
    "relationship",
    "race",
    "sex",
    "capital-gain",
    "capital-loss",
    "hours-per-week",
    "native-country",
    "income",
];

pub const GERMAN_COLUMNS: [&str; 21] = [
    "status",
    "duration",
    "credit_history",
    "purpose",
    "credit_amount",
    "savings",
    "present_employment",
    "installment_rate",
    "status_sex",
    "other_debtors",
    "present_residence_since",
    "property",
    "age",
    "installment_plans",
    "housing",
    "number_of_existing_credits",
    "job",
    "number_of_people_liable_for",
    "telephone",
    "foreign_worker",
    "credit",
];

/// Age threshold separating the two German Credit sensitive groups.
pub const GERMAN_AGE_THRESHOLD: f64 = 25.0;

pub const ADULT_SPEC: &str = r#"standardize = true

[columns]
age = { role = "feature" }
workclass = { role = "feature", encoding = "categorical-onehot" }
fnlwgt = { role = "ignore" }
education = { role = "ignore" }
education-num = { role = "feature" }
marital-status = { role = "feature", encoding = "categorical-onehot" }
occupation = { role = "feature", encoding = "categorical-onehot" }
relationship = { role = "feature", encoding = "categorical-onehot" }
race = { role = "feature", encoding = "categorical-onehot" }
sex = { role = "sensitive", encoding = "categorical-onehot" }
capital-gain = { role = "feature" }
capital-loss = { role = "feature" }
hours-per-week = { role = "feature" }
native-country = { role = "feature", encoding = "categorical-onehot" }
income = { role = "target", encoding = "categorical-onehot" }
"#;

pub const GERMAN_SPEC: &str = r#"standardize = true

[columns]
status = { role = "feature", encoding = "categorical-onehot" }
duration = { role = "feature" }
credit_history = { role = "feature", encoding = "categorical-onehot" }
purpose = { role = "feature", encoding = "categorical-onehot" }
credit_amount = { role = "feature" }
savings = { role = "feature", encoding = "categorical-onehot" }
present_employment = { role = "feature", encoding = "categorical-onehot" }
installment_rate = { role = "feature" }
status_sex = { role = "feature", encoding = "categorical-onehot" }
other_debtors = { role = "feature", encoding = "categorical-onehot" }
present_residence_since = { role = "feature" }
property = { role = "feature", encoding = "categorical-onehot" }
age = { role = "ignore" }
installment_plans = { role = "feature", encoding = "categorical-onehot" }
housing = { role = "feature", encoding = "categorical-onehot" }
number_of_existing_credits = { role = "feature" }
job = { role = "feature", encoding = "categorical-onehot" }
number_of_people_liable_for = { role = "feature" }
telephone = { role = "feature", encoding = "categorical-onehot" }
foreign_worker = { role = "feature", encoding = "categorical-onehot" }
credit = { role = "target", encoding = "categorical-onehot" }
age_group = { role = "sensitive", encoding = "categorical-onehot" }
"#;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Conversion {
    pub kept: usize,
    pub dropped_incomplete: usize,
}

fn open_lines(path: &Path) -> Result<impl Iterator<Item = Result<String>> + '_> {
    let file = fs::File::open(path).map_err(|e| SarlError::io(path, e))?;
    Ok(BufReader::new(file)
        .lines()
        .map(move |l| l.map_err(|e| SarlError::io(path, e))))
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| SarlError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

/// Converts `adult.data` or `adult.test`: skips blank and comment lines,
/// drops rows with any unknown (`?`) field, and strips the trailing period
/// the test file puts on income labels.
pub fn adult_to_csv(raw: impl AsRef<Path>, out: impl AsRef<Path>) -> Result<Conversion> {
    let (raw, out) = (raw.as_ref(), out.as_ref());
    let mut w = writer(out)?;
    w.write_record(ADULT_COLUMNS)?;
    let mut summary = Conversion {
        kept: 0,
        dropped_incomplete: 0,
    };
    for (lineno, line) in open_lines(raw)?.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('|') {
            continue;
        }
        let mut fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != ADULT_COLUMNS.len() {
            return Err(SarlError::Schema(format!(
                "{} line {}: expected {} fields, found {}",
                raw.display(),
                lineno + 1,
                ADULT_COLUMNS.len(),
                fields.len()
            )));
        }
        if fields.contains(&"?") {
            summary.dropped_incomplete += 1;
            continue;
        }
        let last = fields.len() - 1;
        fields[last] = fields[last].trim_end_matches('.');
        w.write_record(&fields)?;
        summary.kept += 1;
    }
    w.flush().map_err(|e| SarlError::io(out, e))?;
    Ok(summary)
}

/// Converts the whitespace-separated `german.data`, naming the credit label
/// (`good`/`bad`) and adding an `age_group` column (`ge25`/`lt25`).
pub fn german_to_csv(raw: impl AsRef<Path>, out: impl AsRef<Path>) -> Result<Conversion> {
    let (raw, out) = (raw.as_ref(), out.as_ref());
    let mut w = writer(out)?;
    let mut header: Vec<&str> = GERMAN_COLUMNS.to_vec();
    header.push("age_group");
    w.write_record(&header)?;
    let age_col = GERMAN_COLUMNS.iter().position(|c| *c == "age").unwrap();
    let mut kept = 0;
    for (lineno, line) in open_lines(raw)?.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if fields.len() != GERMAN_COLUMNS.len() {
            return Err(SarlError::Schema(format!(
                "{} line {}: expected {} fields, found {}",
                raw.display(),
                lineno + 1,
                GERMAN_COLUMNS.len(),
                fields.len()
            )));
        }
        let age: f64 = fields[age_col].parse().map_err(|_| SarlError::Parse {
            row: lineno + 1,
            column: "age".into(),
            value: fields[age_col].clone(),
        })?;
        let last = fields.len() - 1;
        fields[last] = match fields[last].as_str() {
            "1" => "good".into(),
            "2" => "bad".into(),
            other => {
                return Err(SarlError::Parse {
                    row: lineno + 1,
                    column: "credit".into(),
                    value: other.into(),
                })
            }
        };
        fields.push(if age >= GERMAN_AGE_THRESHOLD { "ge25" } else { "lt25" }.into());
        w.write_record(&fields)?;
        kept += 1;
    }
    w.flush().map_err(|e| SarlError::io(out, e))?;
    Ok(Conversion {
        kept,
        dropped_incomplete: 0,
    })
}
