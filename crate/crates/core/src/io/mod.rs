//! File formats: trial CSV, the test report, region grids, power tables,
//! scenario configuration and SVG plots. Everything here works on `f64`.

mod config;
mod data;
mod format;
mod power;
mod region;
mod report;
mod svg;

pub use config::{parse_scenarios, read_scenarios};
pub use data::{read_trial_csv, write_trial_csv, CsvOptions};
pub use format::{format_column, format_number, round_sig, SIGNIFICANT_DIGITS};
pub use power::{write_power_csv, write_power_long};
pub use region::write_region_csv;
pub use report::{ContrastRow, ReportDocument, REPORT_SCHEMA_VERSION};
pub use svg::region_svg;
