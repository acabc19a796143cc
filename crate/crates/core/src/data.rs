//! Raw tabular data: CSV ingestion, the pool of candidate conditions a
//! learner may split on, and binarization of whole tables.
//!
//! A dataset file has a header row, one column per primitive attribute and
//! a `label` column holding 0/1.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::space::{binarize, ConditionKind, ConditionSet, Instance};

pub const LABEL_COLUMN: &str = "label";

/// Rows of attribute values with their Boolean labels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawTable {
    /// Attribute columns in file order, without the label.
    pub attributes: Vec<String>,
    pub rows: Vec<BTreeMap<String, String>>,
    pub labels: Vec<bool>,
}

impl RawTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn from_path(path: &Path) -> Result<RawTable> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file, &path.display().to_string())
    }

    /// Parses CSV text; `source` names the input in error messages.
    pub fn from_reader<R: Read>(reader: R, source: &str) -> Result<RawTable> {
        let csv_err = |e: csv::Error| Error::Csv {
            path: source.into(),
            source: e,
        };
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let label_at = header
            .iter()
            .position(|h| h == LABEL_COLUMN)
            .ok_or_else(|| Error::Dataset(format!("{source}: no `{LABEL_COLUMN}` column")))?;
        let attributes: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != label_at)
            .map(|(_, h)| h.clone())
            .collect();
        let mut table = RawTable {
            attributes,
            ..RawTable::default()
        };
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let label = match &rec[label_at] {
                "0" | "false" => false,
                "1" | "true" => true,
                other => {
                    return Err(Error::Dataset(format!(
                        "{source}: row {}: label must be 0 or 1, found `{other}`",
                        line + 1
                    )))
                }
            };
            let row = header
                .iter()
                .zip(rec.iter())
                .enumerate()
                .filter(|&(i, _)| i != label_at)
                .map(|(_, (h, v))| (h.clone(), v.to_string()))
                .collect();
            table.rows.push(row);
            table.labels.push(label);
        }
        Ok(table)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<&str> = self.attributes.iter().map(String::as_str).collect();
        header.push(LABEL_COLUMN);
        w.write_record(&header).expect("in-memory write");
        for (row, &label) in self.rows.iter().zip(&self.labels) {
            let mut rec: Vec<&str> = self
                .attributes
                .iter()
                .map(|a| row.get(a).map_or("", String::as_str))
                .collect();
            rec.push(if label { "1" } else { "0" });
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    /// The rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> RawTable {
        RawTable {
            attributes: self.attributes.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// How raw columns become candidate conditions.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PoolConfig {
    /// Numeric columns get at most this many thresholds, placed at evenly
    /// spaced quantiles of the midpoints between distinct values.
    pub max_thresholds: usize,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig { max_thresholds: 2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnType {
    Boolean,
    Numeric,
    Categorical,
}

fn strict_bool(v: &str) -> bool {
    matches!(v, "0" | "1" | "true" | "false" | "True" | "False" | "TRUE" | "FALSE")
}

pub fn column_type(table: &RawTable, attribute: &str) -> ColumnType {
    let values = || table.rows.iter().filter_map(|r| r.get(attribute)).map(String::as_str);
    if values().all(strict_bool) {
        ColumnType::Boolean
    } else if values().all(|v| v.parse::<f64>().is_ok_and(f64::is_finite)) {
        ColumnType::Numeric
    } else {
        ColumnType::Categorical
    }
}

/// Every condition a learner may split on: one per Boolean column, one per
/// categorical value, and up to `max_thresholds` cut points per numeric
/// column.
pub fn candidate_conditions(table: &RawTable, cfg: &PoolConfig) -> ConditionSet {
    let mut items = Vec::new();
    for a in &table.attributes {
        let values = table.rows.iter().filter_map(|r| r.get(a));
        match column_type(table, a) {
            ColumnType::Boolean => items.push((a.clone(), ConditionKind::Boolean)),
            ColumnType::Categorical => {
                let distinct: std::collections::BTreeSet<&String> = values.collect();
                items.extend(
                    distinct
                        .into_iter()
                        .map(|v| (a.clone(), ConditionKind::CategoricalEqual { value: v.clone() })),
                );
            }
            ColumnType::Numeric => {
                let mut xs: Vec<f64> = values.map(|v| v.parse().expect("typed numeric")).collect();
                xs.sort_by(f64::total_cmp);
                xs.dedup();
                let mids: Vec<f64> = xs.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0).collect();
                for t in pick_quantiles(&mids, cfg.max_thresholds) {
                    items.push((a.clone(), ConditionKind::NumericGreater { threshold: t }));
                }
            }
        }
    }
    ConditionSet::from_unordered(items)
}

fn pick_quantiles(sorted: &[f64], k: usize) -> Vec<f64> {
    if sorted.len() <= k {
        return sorted.to_vec();
    }
    let mut out: Vec<f64> = (1..=k).map(|j| sorted[j * (sorted.len() + 1) / (k + 1) - 1]).collect();
    out.dedup();
    out
}

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Binarizes every row; errors name the offending row.
pub fn binarize_table(table: &RawTable, cs: &ConditionSet) -> Result<Vec<Instance>> {
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            binarize(row, cs).map_err(|e| match e {
                Error::Ingest { attribute, message } => Error::Ingest {
                    attribute,
                    message: format!("row {}: {message}", i + 1),
                },
                other => other,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{loan, LOAN_STREAM_CSV};

    #[test]
    fn loan_stream_binarizes_to_the_running_example() {
        let ex = loan();
        let table = RawTable::from_reader(LOAN_STREAM_CSV.as_bytes(), "stream.csv").unwrap();
        assert_eq!(table.attributes, ["S", "R", "PP"]);
        assert_eq!(table.labels, [false, false, false]);
        let xs = binarize_table(&table, &ex.cs).unwrap();
        let want: Vec<Instance> = [[0, 1, 1, 1], [0, 1, 0, 1], [1, 1, 1, 0]]
            .iter()
            .map(|b| Instance::from_01(b))
            .collect();
        assert_eq!(xs, want);
    }

    #[test]
    fn csv_round_trip() {
        let table = RawTable::from_reader(LOAN_STREAM_CSV.as_bytes(), "stream.csv").unwrap();
        let again = RawTable::from_reader(table.to_csv().as_bytes(), "again").unwrap();
        assert_eq!(table, again);
    }

    #[test]
    fn bad_inputs_are_reported() {
        let e = RawTable::from_reader("a,b\n1,2\n".as_bytes(), "x.csv").unwrap_err();
        assert!(e.to_string().contains("x.csv"));
        let e = RawTable::from_reader("a,label\n1,2\n".as_bytes(), "y.csv").unwrap_err();
        assert!(e.to_string().contains("label must be 0 or 1"));
        let e = RawTable::from_path(Path::new("/nonexistent/data.csv")).unwrap_err();
        assert!(matches!(e, Error::Io { .. }));
        assert!(e.to_string().contains("/nonexistent/data.csv"));
        let ex = loan();
        let t = RawTable::from_reader("S,R,label\n25,1,0\n".as_bytes(), "z.csv").unwrap();
        let e = binarize_table(&t, &ex.cs).unwrap_err();
        assert!(matches!(e, Error::Ingest { ref attribute, .. } if attribute == "PP"));
    }

    #[test]
    fn atomic_writes_replace_whole_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"first").unwrap();
        write_atomic(&p, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!(write_atomic(&dir.path().join("missing/out.txt"), b"x").is_err());
    }

    #[test]
    fn pool_types_columns() {
        let text = "flag,size,color,label\n1,0.5,red,1\n0,1.5,blue,0\n1,2.5,red,1\n0,3.5,green,0\n";
        let table = RawTable::from_reader(text.as_bytes(), "t").unwrap();
        assert_eq!(column_type(&table, "flag"), ColumnType::Boolean);
        assert_eq!(column_type(&table, "size"), ColumnType::Numeric);
        assert_eq!(column_type(&table, "color"), ColumnType::Categorical);
        let cs = candidate_conditions(&table, &PoolConfig { max_thresholds: 2 });
        let names: Vec<String> = cs.iter().map(|c| c.name()).collect();
        assert_eq!(
            names,
            ["color=blue", "color=green", "color=red", "flag", "size>2", "size>1"]
        );
        let xs = binarize_table(&table, &cs).unwrap();
        let th = crate::space::derive_theory(&cs);
        assert!(xs.iter().all(|x| th.satisfied_by(x.bits())));
    }
}
