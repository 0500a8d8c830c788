use std::io::Write;

use crate::error::{Error, Result};
use crate::inference::ConfidenceRegion;

/// One row per grid point: `m,b,W,member`, with `m` varying slowest.
pub fn write_region_csv<W: Write>(region: &ConfidenceRegion<f64>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["m", "b", "W", "member"])
        .map_err(|e| Error::Io(e.to_string()))?;
    for (i, &m) in region.m_grid.iter().enumerate() {
        for (j, &b) in region.b_grid.iter().enumerate() {
            let wv = region.w_values[i][j];
            let wtext = if wv.is_infinite() {
                "Inf".to_string()
            } else {
                wv.to_string()
            };
            let member = if region.membership[i][j] { "1" } else { "0" };
            w.write_record([m.to_string(), b.to_string(), wtext, member.to_string()])
                .map_err(|e| Error::Io(e.to_string()))?;
        }
    }
    w.flush()?;
    Ok(())
}
