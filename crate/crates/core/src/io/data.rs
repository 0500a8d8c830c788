//! Trial data as CSV: a header row, an outcome column, a 0/1 arm column and
//! optional numeric covariate columns.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::model::{Arm, Record, TrialData};

#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    pub outcome: String,
    pub arm: String,
    pub covariates: Vec<String>,
    pub atom: f64,
    pub atom_eps: f64,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            outcome: "y".into(),
            arm: "r".into(),
            covariates: Vec::new(),
            atom: 0.0,
            atom_eps: 0.0,
        }
    }
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::Input(format!("missing column `{name}`")))
}

fn parse_cell(record: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<f64> {
    let cell = record.get(idx).unwrap_or("").trim();
    if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
        return Err(Error::Input(format!(
            "line {line}: missing value in column `{name}`"
        )));
    }
    let v: f64 = cell.parse().map_err(|_| {
        Error::Input(format!(
            "line {line}: `{cell}` in column `{name}` is not a number"
        ))
    })?;
    if !v.is_finite() {
        return Err(Error::Input(format!(
            "line {line}: non-finite value in column `{name}`"
        )));
    }
    Ok(v)
}

pub fn read_trial_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<TrialData<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Input(e.to_string()))?
        .clone();
    let y_idx = column(&headers, &options.outcome)?;
    let r_idx = column(&headers, &options.arm)?;
    let x_idx = options
        .covariates
        .iter()
        .map(|c| column(&headers, c))
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| Error::Input(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let y = parse_cell(&row, y_idx, &options.outcome, line)?;
        let r = parse_cell(&row, r_idx, &options.arm, line)?;
        let arm = if r == 0.0 {
            Arm::Control
        } else if r == 1.0 {
            Arm::Treatment
        } else {
            return Err(Error::Input(format!(
                "line {line}: column `{}` must be 0 or 1, got {r}",
                options.arm
            )));
        };
        let covariates = x_idx
            .iter()
            .zip(&options.covariates)
            .map(|(&i, name)| parse_cell(&row, i, name, line))
            .collect::<Result<Vec<_>>>()?;
        records.push(Record::with_covariates(y, arm, covariates));
    }
    if records.is_empty() {
        return Err(Error::Input("no data rows".into()));
    }
    TrialData::new(records, options.atom)?.with_atom_eps(options.atom_eps)
}

/// Writes `y,r[,x1,...]`. Values use the shortest representation that parses
/// back to the same `f64`.
pub fn write_trial_csv<W: Write>(data: &TrialData<f64>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["y".to_string(), "r".to_string()];
    header.extend((1..=data.n_covariates()).map(|j| format!("x{j}")));
    w.write_record(&header)
        .map_err(|e| Error::Io(e.to_string()))?;
    for rec in data.records() {
        let mut row = vec![rec.y.to_string(), rec.arm.index().to_string()];
        row.extend(rec.covariates.iter().map(f64::to_string));
        w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
