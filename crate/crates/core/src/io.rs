//! Dataset ingestion and export.
//!
//! Generic survival CSVs are mapped through a [`CsvSchema`]. The
//! `preprocess_*` recipes turn the raw `bladder1`, `lung` and `ovarian`
//! tables of the R `survival` package (exported with their original column
//! names) into analysis datasets.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::SurvivalRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub records: Vec<SurvivalRecord>,
    pub covariate_names: Vec<String>,
    pub source: String,
}

impl Dataset {
    pub fn new(records: Vec<SurvivalRecord>, covariate_names: Vec<String>, source: impl Into<String>) -> Result<Self> {
        let m = covariate_names.len();
        for (i, r) in records.iter().enumerate() {
            if r.covariates.len() != m {
                return Err(Error::data(
                    Some(i + 1),
                    format!("record has {} covariates, expected {m}", r.covariates.len()),
                ));
            }
            if !(r.time > 0.0 && r.time.is_finite()) {
                return Err(Error::data(Some(i + 1), format!("non-positive time {}", r.time)));
            }
        }
        Ok(Dataset {
            records,
            covariate_names,
            source: source.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn num_events(&self) -> usize {
        self.records.iter().filter(|r| r.event).count()
    }

    /// Canonical CSV: `time,status,<covariates>` with shortest round-trip
    /// number formatting.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["time".to_string(), "status".to_string()];
        header.extend(self.covariate_names.iter().cloned());
        out.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![r.time.to_string(), u8::from(r.event).to_string()];
            row.extend(r.covariates.iter().map(f64::to_string));
            out.write_record(&row)?;
        }
        out.flush().map_err(|e| Error::io("dataset csv", e))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(f)
    }
}

/// Column mapping for a generic survival CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CsvSchema {
    pub time: String,
    pub status: String,
    pub covariates: Vec<String>,
    /// Status cell values meaning an observed event.
    pub event_codes: Vec<String>,
    /// Status cell values meaning right censoring.
    pub censored_codes: Vec<String>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            time: "time".into(),
            status: "status".into(),
            covariates: Vec::new(),
            event_codes: vec!["1".into()],
            censored_codes: vec!["0".into()],
        }
    }
}

/// Row bookkeeping of an ingestion.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_kept: usize,
    /// `(1-based row, reason)` for every dropped row.
    pub dropped: Vec<(usize, String)>,
}

/// A CSV table held as strings, before any interpretation.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn from_reader<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers = rdr.headers()?.iter().map(str::to_string).collect();
        let rows = rdr
            .records()
            .map(|rec| Ok(rec?.iter().map(str::to_string).collect()))
            .collect::<Result<Vec<Vec<String>>>>()?;
        Ok(RawTable { headers, rows })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(f)
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::data(None, format!("missing column {name:?}")))
    }
}

fn parse_number(cell: &str, row: usize, col: &str) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::data(Some(row), format!("cannot parse {col} value {cell:?} as a number")))
}

fn code_matches(cell: &str, code: &str) -> bool {
    cell == code
        || matches!((cell.parse::<f64>(), code.parse::<f64>()), (Ok(a), Ok(b)) if a == b)
}

pub fn read_csv_from<R: Read>(r: R, schema: &CsvSchema, source: &str) -> Result<(Dataset, IngestReport)> {
    let raw = RawTable::from_reader(r)?;
    let t = raw.column(&schema.time)?;
    let s = raw.column(&schema.status)?;
    let cols = schema
        .covariates
        .iter()
        .map(|c| raw.column(c))
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::with_capacity(raw.rows.len());
    for (i, row) in raw.rows.iter().enumerate() {
        let n = i + 1;
        let time = parse_number(&row[t], n, &schema.time)?;
        if time <= 0.0 {
            return Err(Error::data(Some(n), format!("time must be positive, got {time}")));
        }
        let status = &row[s];
        let event = if schema.event_codes.iter().any(|c| code_matches(status, c)) {
            true
        } else if schema.censored_codes.iter().any(|c| code_matches(status, c)) {
            false
        } else {
            return Err(Error::data(Some(n), format!("unrecognized status {status:?}")));
        };
        let covariates = cols
            .iter()
            .zip(&schema.covariates)
            .map(|(&j, name)| parse_number(&row[j], n, name))
            .collect::<Result<Vec<_>>>()?;
        records.push(SurvivalRecord {
            time,
            event,
            covariates,
        });
    }
    let report = IngestReport {
        rows_read: raw.rows.len(),
        rows_kept: records.len(),
        dropped: Vec::new(),
    };
    Ok((Dataset::new(records, schema.covariates.clone(), source)?, report))
}

pub fn read_csv(path: &Path, schema: &CsvSchema) -> Result<(Dataset, IngestReport)> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from(f, schema, &path.display().to_string())
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "NaN" | "." | "na")
}

/// Shared loop of the recipes: `build` turns one raw row into a record or a
/// reason to drop it, or fails on a malformed cell.
fn apply_recipe(
    raw: &RawTable,
    names: &[&str],
    source: &str,
    mut build: impl FnMut(&[String], usize) -> Result<std::result::Result<SurvivalRecord, String>>,
) -> Result<(Dataset, IngestReport)> {
    let mut report = IngestReport {
        rows_read: raw.rows.len(),
        ..IngestReport::default()
    };
    let mut records = Vec::new();
    for (i, row) in raw.rows.iter().enumerate() {
        if row.len() != raw.headers.len() {
            return Err(Error::data(Some(i + 1), "row length differs from header"));
        }
        match build(row, i + 1)? {
            Ok(r) => records.push(r),
            Err(reason) => report.dropped.push((i + 1, reason)),
        }
    }
    report.rows_kept = records.len();
    let names = names.iter().map(|s| s.to_string()).collect();
    Ok((Dataset::new(records, names, source)?, report))
}

/// Bladder-cancer recurrence data (`bladder1`).
///
/// * rows with status code 2 are removed
/// * time = stop - start; zero-length intervals become [`ZERO_INTERVAL_TIME`]
/// * status 1 is an event, codes 0 and 3 are censored
/// * covariates: pyridoxine indicator, thiotepa indicator, initial tumour
///   count, largest initial tumour size, recurrence count
pub fn preprocess_bladder(raw: &RawTable) -> Result<(Dataset, IngestReport)> {
    let [start, stop, status, treatment, number, size, recur] =
        ["start", "stop", "status", "treatment", "number", "size", "recur"].map(|c| raw.column(c));
    let (start, stop, status, treatment, number, size, recur) =
        (start?, stop?, status?, treatment?, number?, size?, recur?);
    apply_recipe(
        raw,
        &["pyridoxine", "thiotepa", "number", "size", "recur"],
        "bladder1",
        |row, n| {
            let event = match row[status].as_str() {
                "1" => true,
                "0" | "3" => false,
                "2" => return Ok(Err("status 2 removed".into())),
                other => return Err(Error::data(Some(n), format!("unexpected bladder status {other:?}"))),
            };
            let (pyridoxine, thiotepa) = match row[treatment].to_ascii_lowercase().as_str() {
                "placebo" | "1" => (0.0, 0.0),
                "pyridoxine" | "2" => (1.0, 0.0),
                "thiotepa" | "3" => (0.0, 1.0),
                other => return Err(Error::data(Some(n), format!("unexpected treatment {other:?}"))),
            };
            let mut time = parse_number(&row[stop], n, "stop")? - parse_number(&row[start], n, "start")?;
            if time < 0.0 {
                return Err(Error::data(Some(n), "stop precedes start"));
            }
            if time == 0.0 {
                time = ZERO_INTERVAL_TIME;
            }
            Ok(Ok(SurvivalRecord {
                time,
                event,
                covariates: vec![
                    pyridoxine,
                    thiotepa,
                    parse_number(&row[number], n, "number")?,
                    parse_number(&row[size], n, "size")?,
                    parse_number(&row[recur], n, "recur")?,
                ],
            }))
        },
    )
}

/// Time assigned to bladder intervals that start and stop in the same
/// month: half the recording resolution.
pub const ZERO_INTERVAL_TIME: f64 = 0.5;

/// NCCTG lung-cancer data (`lung`). Status 2 (dead) is an event and 1
/// censored. Covariates: age, female indicator (`sex == 2`), ECOG score,
/// physician Karnofsky score. Rows missing any of these are dropped.
pub fn preprocess_lung(raw: &RawTable) -> Result<(Dataset, IngestReport)> {
    let [time, status, age, sex, ecog, karno] =
        ["time", "status", "age", "sex", "ph.ecog", "ph.karno"].map(|c| raw.column(c));
    let (time, status, age, sex, ecog, karno) = (time?, status?, age?, sex?, ecog?, karno?);
    apply_recipe(raw, &["age", "female", "ecog", "karnofsky"], "lung", |row, n| {
        if let Some(&j) = [time, age, sex, ecog, karno].iter().find(|&&j| is_missing(&row[j])) {
            return Ok(Err(format!("missing {}", raw.headers[j])));
        }
        let event = match parse_number(&row[status], n, "status")? as i64 {
            2 => true,
            1 => false,
            other => return Err(Error::data(Some(n), format!("unexpected lung status {other}"))),
        };
        let t = parse_number(&row[time], n, "time")?;
        if t <= 0.0 {
            return Err(Error::data(Some(n), format!("time must be positive, got {t}")));
        }
        Ok(Ok(SurvivalRecord {
            time: t,
            event,
            covariates: vec![
                parse_number(&row[age], n, "age")?,
                f64::from(parse_number(&row[sex], n, "sex")? == 2.0),
                parse_number(&row[ecog], n, "ph.ecog")?,
                parse_number(&row[karno], n, "ph.karno")?,
            ],
        }))
    })
}

/// Ovarian-cancer data (`ovarian`). `fustat` 1 is an event. Covariates:
/// age, treatment-2 indicator, residual-disease indicator
/// (`resid.ds == 2`), ECOG indicator (`ecog.ps == 2`).
pub fn preprocess_ovarian(raw: &RawTable) -> Result<(Dataset, IngestReport)> {
    let [time, status, age, rx, resid, ecog] =
        ["futime", "fustat", "age", "rx", "resid.ds", "ecog.ps"].map(|c| raw.column(c));
    let (time, status, age, rx, resid, ecog) = (time?, status?, age?, rx?, resid?, ecog?);
    apply_recipe(raw, &["age", "treatment2", "residual", "ecog"], "ovarian", |row, n| {
        if let Some(&j) = [time, age, rx, resid, ecog].iter().find(|&&j| is_missing(&row[j])) {
            return Ok(Err(format!("missing {}", raw.headers[j])));
        }
        let event = match parse_number(&row[status], n, "fustat")? as i64 {
            1 => true,
            0 => false,
            other => return Err(Error::data(Some(n), format!("unexpected fustat {other}"))),
        };
        let t = parse_number(&row[time], n, "futime")?;
        if t <= 0.0 {
            return Err(Error::data(Some(n), format!("time must be positive, got {t}")));
        }
        let indicator = |j: usize, name: &str| -> Result<f64> {
            Ok(f64::from(parse_number(&row[j], n, name)? == 2.0))
        };
        Ok(Ok(SurvivalRecord {
            time: t,
            event,
            covariates: vec![
                parse_number(&row[age], n, "age")?,
                indicator(rx, "rx")?,
                indicator(resid, "resid.ds")?,
                indicator(ecog, "ecog.ps")?,
            ],
        }))
    })
}

/// How a dataset file is interpreted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFormat {
    Generic,
    Bladder1,
    Lung,
    Ovarian,
}

pub fn load_dataset(path: &Path, format: &DataFormat, schema: &CsvSchema) -> Result<(Dataset, IngestReport)> {
    let (mut ds, report) = match format {
        DataFormat::Generic => return read_csv(path, schema),
        DataFormat::Bladder1 => preprocess_bladder(&RawTable::from_path(path)?)?,
        DataFormat::Lung => preprocess_lung(&RawTable::from_path(path)?)?,
        DataFormat::Ovarian => preprocess_ovarian(&RawTable::from_path(path)?)?,
    };
    ds.source = format!("{} ({})", path.display(), ds.source);
    Ok((ds, report))
}
