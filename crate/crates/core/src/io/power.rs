use std::io::Write;

use crate::error::{Error, Result};
use crate::simulate::PowerTable;

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "NA".into()
    } else {
        x.to_string()
    }
}

/// Full power table, one row per `(scenario, n, method)`.
pub fn write_power_csv<W: Write>(table: &PowerTable, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "scenario",
        "method",
        "n",
        "reps",
        "degenerate",
        "rejections",
        "power",
        "mc_se",
        "alpha",
        "seed",
    ])
    .map_err(csv_err)?;
    for r in &table.rows {
        w.write_record([
            r.scenario_id.clone(),
            r.method.to_string(),
            r.n_per_group.to_string(),
            r.reps.to_string(),
            r.degenerate.to_string(),
            r.rejections.to_string(),
            num(r.power),
            num(r.mc_se),
            table.alpha.to_string(),
            table.seed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Plot-ready long format: `scenario,method,n,power,mc_se`.
pub fn write_power_long<W: Write>(table: &PowerTable, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["scenario", "method", "n", "power", "mc_se"])
        .map_err(csv_err)?;
    for r in &table.rows {
        w.write_record([
            r.scenario_id.clone(),
            r.method.to_string(),
            r.n_per_group.to_string(),
            num(r.power),
            num(r.mc_se),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
