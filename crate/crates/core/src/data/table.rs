use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SarlError};
use crate::numerics::Matrix;

use super::Dataset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Feature,
    Target,
    Sensitive,
    Ignore,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    #[default]
    Numeric,
    #[serde(alias = "categorical")]
    CategoricalOnehot,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub role: Role,
    pub encoding: Encoding,
    /// Fixed category order; fitted from the data (sorted) when absent.
    pub levels: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ColumnEntry {
    role: Role,
    #[serde(default)]
    encoding: Encoding,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    levels: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpecFile {
    #[serde(default)]
    standardize: bool,
    columns: BTreeMap<String, ColumnEntry>,
}

/// Column roles and encodings for a CSV file.
///
/// As TOML:
///
/// ```toml
/// standardize = true
///
/// [columns]
/// age = { role = "feature" }
/// workclass = { role = "feature", encoding = "categorical-onehot" }
/// income = { role = "target", encoding = "categorical-onehot" }
/// sex = { role = "sensitive", encoding = "categorical-onehot" }
/// ```
///
/// CSV columns not listed are ignored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DatasetSpec {
    pub standardize: bool,
    pub columns: Vec<ColumnSpec>,
}

impl DatasetSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: SpecFile = toml::from_str(text)?;
        Ok(Self {
            standardize: file.standardize,
            columns: file
                .columns
                .into_iter()
                .map(|(name, e)| ColumnSpec {
                    name,
                    role: e.role,
                    encoding: e.encoding,
                    levels: e.levels,
                })
                .collect(),
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| SarlError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        let file = SpecFile {
            standardize: self.standardize,
            columns: self
                .columns
                .iter()
                .map(|c| {
                    (
                        c.name.clone(),
                        ColumnEntry {
                            role: c.role,
                            encoding: c.encoding,
                            levels: c.levels.clone(),
                        },
                    )
                })
                .collect(),
        };
        toml::to_string(&file).map_err(|e| SarlError::Schema(format!("cannot serialize spec: {e}")))
    }

    fn validate(&self) -> Result<()> {
        for role in [Role::Feature, Role::Target, Role::Sensitive] {
            if !self.columns.iter().any(|c| c.role == role) {
                return Err(SarlError::Schema(format!("spec has no {role:?} column").to_lowercase()));
            }
        }
        Ok(())
    }
}

/// A fitted input column. Numeric values map to `(v - mean) / scale`;
/// categorical values map to one indicator row per level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub name: String,
    pub levels: Option<Vec<String>>,
    pub mean: f64,
    pub scale: f64,
}

impl FeatureColumn {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            levels: None,
            mean: 0.0,
            scale: 1.0,
        }
    }

    pub fn width(&self) -> usize {
        self.levels.as_ref().map_or(1, Vec::len)
    }

    pub fn row_names(&self) -> Vec<String> {
        match &self.levels {
            None => vec![self.name.clone()],
            Some(levels) => levels.iter().map(|l| format!("{}={l}", self.name)).collect(),
        }
    }
}

/// A fitted target or sensitive column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeColumn {
    pub name: String,
    pub levels: Option<Vec<String>>,
}

impl AttributeColumn {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            levels: None,
        }
    }

    pub fn categorical(name: impl Into<String>, levels: Vec<String>) -> Self {
        Self {
            name: name.into(),
            levels: Some(levels),
        }
    }

    pub fn width(&self) -> usize {
        self.levels.as_ref().map_or(1, Vec::len)
    }
}

/// Encoding fitted on a training file, reusable for test files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub standardize: bool,
    pub features: Vec<FeatureColumn>,
    pub target: Vec<AttributeColumn>,
    pub sensitive: Vec<AttributeColumn>,
}

impl DatasetSchema {
    /// Names of the rows of `X`.
    pub fn feature_names(&self) -> Vec<String> {
        self.features.iter().flat_map(FeatureColumn::row_names).collect()
    }

    pub fn input_dim(&self) -> usize {
        self.features.iter().map(FeatureColumn::width).sum()
    }

    /// Spec that reads back a file produced by [`write_csv`] unchanged.
    pub fn written_spec(&self) -> DatasetSpec {
        let mut columns: Vec<ColumnSpec> = self
            .feature_names()
            .into_iter()
            .map(|name| ColumnSpec {
                name,
                role: Role::Feature,
                encoding: Encoding::Numeric,
                levels: None,
            })
            .collect();
        for (role, attrs) in [(Role::Target, &self.target), (Role::Sensitive, &self.sensitive)] {
            for a in attrs {
                columns.push(ColumnSpec {
                    name: a.name.clone(),
                    role,
                    encoding: if a.levels.is_some() {
                        Encoding::CategoricalOnehot
                    } else {
                        Encoding::Numeric
                    },
                    levels: a.levels.clone(),
                });
            }
        }
        DatasetSpec {
            standardize: false,
            columns,
        }
    }
}

struct RawTable {
    header: Vec<String>,
    rows: Vec<csv::StringRecord>,
}

fn read_table(path: &Path) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => SarlError::io(path, io),
            other => SarlError::Schema(format!("{}: {other:?}", path.display())),
        })?;
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let rows = reader.records().collect::<std::result::Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err(SarlError::EmptyInput(format!("{} has no data rows", path.display())));
    }
    Ok(RawTable { header, rows })
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "?"
}

impl RawTable {
    fn index_of(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| SarlError::Schema(format!("column '{name}' not found in header")))
    }

    fn cell(&self, row: usize, col: usize, name: &str) -> Result<&str> {
        let value = self.rows[row].get(col).unwrap_or("");
        if is_missing(value) {
            return Err(SarlError::MissingValue {
                row: row + 1,
                column: name.to_string(),
            });
        }
        Ok(value)
    }

    fn number(&self, row: usize, col: usize, name: &str) -> Result<f64> {
        let cell = self.cell(row, col, name)?;
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(SarlError::Parse {
                row: row + 1,
                column: name.to_string(),
                value: cell.to_string(),
            }),
        }
    }

    fn levels(&self, col: usize, name: &str) -> Result<Vec<String>> {
        let mut set = BTreeSet::new();
        for r in 0..self.rows.len() {
            set.insert(self.cell(r, col, name)?.to_string());
        }
        Ok(set.into_iter().collect())
    }
}

fn fit_schema(table: &RawTable, spec: &DatasetSpec) -> Result<DatasetSchema> {
    spec.validate()?;
    let mut ordered: Vec<(usize, &ColumnSpec)> = spec
        .columns
        .iter()
        .filter(|c| c.role != Role::Ignore)
        .map(|c| Ok((table.index_of(&c.name)?, c)))
        .collect::<Result<_>>()?;
    ordered.sort_by_key(|(i, _)| *i);

    let mut schema = DatasetSchema {
        standardize: spec.standardize,
        features: Vec::new(),
        target: Vec::new(),
        sensitive: Vec::new(),
    };
    let n = table.rows.len() as f64;
    for (col, c) in ordered {
        let levels = match c.encoding {
            Encoding::Numeric => None,
            Encoding::CategoricalOnehot => match &c.levels {
                Some(l) => Some(l.clone()),
                None => Some(table.levels(col, &c.name)?),
            },
        };
        match c.role {
            Role::Feature => {
                let mut f = FeatureColumn {
                    name: c.name.clone(),
                    levels,
                    mean: 0.0,
                    scale: 1.0,
                };
                if f.levels.is_none() && spec.standardize {
                    let values: Vec<f64> = (0..table.rows.len())
                        .map(|r| table.number(r, col, &c.name))
                        .collect::<Result<_>>()?;
                    let mean = values.iter().sum::<f64>() / n;
                    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                    f.mean = mean;
                    f.scale = if var > 0.0 { var.sqrt() } else { 1.0 };
                }
                schema.features.push(f);
            }
            Role::Target => schema.target.push(AttributeColumn {
                name: c.name.clone(),
                levels,
            }),
            Role::Sensitive => schema.sensitive.push(AttributeColumn {
                name: c.name.clone(),
                levels,
            }),
            Role::Ignore => unreachable!(),
        }
    }
    Ok(schema)
}

fn encode(table: &RawTable, schema: &DatasetSchema) -> Result<Dataset> {
    let n = table.rows.len();
    let mut x = Matrix::zeros(schema.input_dim(), n);
    let mut offset = 0;
    for f in &schema.features {
        let col = table.index_of(&f.name)?;
        match &f.levels {
            None => {
                for r in 0..n {
                    x[(offset, r)] = (table.number(r, col, &f.name)? - f.mean) / f.scale;
                }
            }
            Some(levels) => {
                let mut unknown = 0usize;
                for r in 0..n {
                    let cell = table.cell(r, col, &f.name)?;
                    match levels.iter().position(|l| l == cell) {
                        Some(k) => x[(offset + k, r)] = 1.0,
                        None => unknown += 1,
                    }
                }
                if unknown > 0 {
                    log::warn!(
                        "{unknown} value(s) of '{}' not seen in training; encoded as all zeros",
                        f.name
                    );
                }
            }
        }
        offset += f.width();
    }
    let y = encode_attributes(table, &schema.target)?;
    let s = encode_attributes(table, &schema.sensitive)?;
    Ok(Dataset {
        x,
        y,
        s,
        schema: schema.clone(),
    })
}

fn encode_attributes(table: &RawTable, attrs: &[AttributeColumn]) -> Result<Matrix> {
    let n = table.rows.len();
    let width = attrs.iter().map(AttributeColumn::width).sum();
    let mut m = Matrix::zeros(width, n);
    let mut offset = 0;
    for a in attrs {
        let col = table.index_of(&a.name)?;
        for r in 0..n {
            match &a.levels {
                None => m[(offset, r)] = table.number(r, col, &a.name)?,
                Some(levels) => {
                    let cell = table.cell(r, col, &a.name)?;
                    let k = levels.iter().position(|l| l == cell).ok_or_else(|| {
                        SarlError::Schema(format!(
                            "row {}: '{}' has unknown level {cell:?} (known: {levels:?})",
                            r + 1,
                            a.name
                        ))
                    })?;
                    m[(offset + k, r)] = 1.0;
                }
            }
        }
        offset += a.width();
    }
    Ok(m)
}

/// Reads a CSV file and fits the encoding (category levels and, when
/// requested, standardization statistics) on it.
pub fn load_csv(path: impl AsRef<Path>, spec: &DatasetSpec) -> Result<Dataset> {
    let table = read_table(path.as_ref())?;
    let schema = fit_schema(&table, spec)?;
    encode(&table, &schema)
}

/// Reads a CSV file using an encoding fitted elsewhere.
pub fn load_csv_with_schema(path: impl AsRef<Path>, schema: &DatasetSchema) -> Result<Dataset> {
    let table = read_table(path.as_ref())?;
    encode(&table, schema)
}

/// Writes encoded features as numeric columns and targets/sensitive
/// attributes as their level names. [`DatasetSchema::written_spec`] reads
/// the file back.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => SarlError::io(path, io),
        other => SarlError::Schema(format!("{}: {other:?}", path.display())),
    })?;
    let schema = &dataset.schema;
    let mut header = schema.feature_names();
    header.extend(schema.target.iter().map(|a| a.name.clone()));
    header.extend(schema.sensitive.iter().map(|a| a.name.clone()));
    writer.write_record(&header)?;
    for j in 0..dataset.n_samples() {
        let mut record: Vec<String> = (0..dataset.x.nrows()).map(|i| dataset.x[(i, j)].to_string()).collect();
        push_attributes(&mut record, &dataset.y, &schema.target, j);
        push_attributes(&mut record, &dataset.s, &schema.sensitive, j);
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| SarlError::io(path, e))?;
    Ok(())
}

fn push_attributes(record: &mut Vec<String>, m: &Matrix, attrs: &[AttributeColumn], j: usize) {
    let mut offset = 0;
    for a in attrs {
        match &a.levels {
            None => record.push(m[(offset, j)].to_string()),
            Some(levels) => {
                let mut best = 0;
                for c in 1..levels.len() {
                    if m[(offset + c, j)] > m[(offset + best, j)] {
                        best = c;
                    }
                }
                record.push(levels[best].clone());
            }
        }
        offset += a.width();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn spec() -> DatasetSpec {
        DatasetSpec::from_toml_str(
            r#"
            [columns]
            h = { role = "feature" }
            label = { role = "target", encoding = "categorical-onehot" }
            group = { role = "sensitive", encoding = "categorical" }
            "#,
        )
        .unwrap()
    }

    #[test]
    fn three_rows() {
        let f = file("h,label,group,junk\n1.5,yes,a,x\n2,no,b,y\n-1,yes,a,z\n");
        let d = load_csv(f.path(), &spec()).unwrap();
        assert_eq!((d.x.nrows(), d.x.ncols()), (1, 3));
        assert_eq!((d.y.nrows(), d.y.ncols()), (2, 3));
        assert_eq!(d.target_labels().unwrap(), vec![1, 0, 1]);
        assert_eq!(d.x[(0, 2)], -1.0);
    }

    #[test]
    fn header_only_is_empty() {
        let f = file("h,label,group\n");
        assert!(matches!(load_csv(f.path(), &spec()), Err(SarlError::EmptyInput(_))));
    }

    #[test]
    fn schema_parse_and_missing_errors() {
        let f = file("h,label\n1,yes\n");
        assert!(matches!(load_csv(f.path(), &spec()), Err(SarlError::Schema(_))));
        let f = file("h,label,group\n1,yes,a\nabc,no,b\n");
        match load_csv(f.path(), &spec()) {
            Err(SarlError::Parse { row, column, .. }) => assert_eq!((row, column.as_str()), (2, "h")),
            other => panic!("unexpected {other:?}"),
        }
        let f = file("h,label,group\n1,yes,a\n2,,b\n");
        assert!(matches!(load_csv(f.path(), &spec()), Err(SarlError::MissingValue { row: 2, .. })));
    }

    #[test]
    fn unknown_feature_level_encodes_as_zeros() {
        let spec = DatasetSpec::from_toml_str(
            r#"
            [columns]
            c = { role = "feature", encoding = "categorical" }
            label = { role = "target", encoding = "categorical" }
            group = { role = "sensitive", encoding = "categorical" }
            "#,
        )
        .unwrap();
        let train = file("c,label,group\nu,yes,a\nv,no,b\n");
        let d = load_csv(train.path(), &spec).unwrap();
        let test = file("c,label,group\nw,yes,a\n");
        let t = load_csv_with_schema(test.path(), &d.schema).unwrap();
        assert_eq!(t.x.norm_l2(), 0.0);
    }

    #[test]
    fn standardization_uses_training_statistics() {
        let mut s = spec();
        s.standardize = true;
        let f = file("h,label,group\n1,yes,a\n3,no,b\n");
        let d = load_csv(f.path(), &s).unwrap();
        assert_eq!((d.x[(0, 0)], d.x[(0, 1)]), (-1.0, 1.0));
        let g = file("h,label,group\n5,yes,a\n");
        let t = load_csv_with_schema(g.path(), &d.schema).unwrap();
        assert_eq!(t.x[(0, 0)], 3.0);
    }

    #[test]
    fn spec_toml_round_trip() {
        let s = spec();
        assert_eq!(DatasetSpec::from_toml_str(&s.to_toml_string().unwrap()).unwrap(), s);
    }
}
