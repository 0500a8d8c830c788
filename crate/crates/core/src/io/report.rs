//! The analysis report: method, confidence level, the two treatment contrasts
//! with interval bounds, and the joint statistic with its p-value.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::format::{format_column, format_number, round_sig, SIGNIFICANT_DIGITS};
use crate::empirical_likelihood::semiparametric_lrt;
use crate::error::Result;
use crate::inference::{marginal_intervals, ConfidenceInterval, IntervalFlag};
use crate::model::{split_by_atom, TrialData};
use crate::parametric::{parametric_lrt, Method, TestFlag, TestResult};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

const MU_LABEL: &str = "Difference in means among the observed:";
const OR_LABEL: &str = "Odds ratio of being observed:";

/// Non-finite numbers travel through JSON as the strings `Inf`, `-Inf`, `NA`.
mod json_num {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("NA")
        } else if *x > 0.0 {
            s.serialize_str("Inf")
        } else {
            s.serialize_str("-Inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "Inf" => Ok(f64::INFINITY),
                "-Inf" => Ok(f64::NEG_INFINITY),
                "NA" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!(
                    "unexpected number `{other}`"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContrastRow {
    pub label: String,
    #[serde(with = "json_num")]
    pub estimate: f64,
    #[serde(with = "json_num")]
    pub ci_lower: f64,
    #[serde(with = "json_num")]
    pub ci_upper: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub method: String,
    #[serde(with = "json_num")]
    pub confidence_level: f64,
    pub contrasts: Vec<ContrastRow>,
    #[serde(with = "json_num")]
    pub w: f64,
    #[serde(with = "json_num")]
    pub w1: f64,
    #[serde(with = "json_num")]
    pub w2: f64,
    pub df: u32,
    #[serde(with = "json_num")]
    pub p_value: f64,
    pub n_total: [usize; 2],
    pub n_observed: [usize; 2],
    pub n_covariates: usize,
    pub notes: Vec<String>,
}

/// Equality that treats two `NA`s as equal, so JSON round-trips compare cleanly.
fn same(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

impl PartialEq for ContrastRow {
    fn eq(&self, o: &Self) -> bool {
        self.label == o.label
            && same(self.estimate, o.estimate)
            && same(self.ci_lower, o.ci_lower)
            && same(self.ci_upper, o.ci_upper)
    }
}

impl PartialEq for ReportDocument {
    fn eq(&self, o: &Self) -> bool {
        self.schema_version == o.schema_version
            && self.method == o.method
            && same(self.confidence_level, o.confidence_level)
            && self.contrasts == o.contrasts
            && same(self.w, o.w)
            && same(self.w1, o.w1)
            && same(self.w2, o.w2)
            && self.df == o.df
            && same(self.p_value, o.p_value)
            && self.n_total == o.n_total
            && self.n_observed == o.n_observed
            && self.n_covariates == o.n_covariates
            && self.notes == o.notes
    }
}

fn r7(x: f64) -> f64 {
    round_sig(x, SIGNIFICANT_DIGITS)
}

fn test_note(flag: TestFlag) -> &'static str {
    match flag {
        TestFlag::BinaryPartBoundary => {
            "observation indicator is constant; W2 = 0 on the parameter boundary"
        }
        TestFlag::NoAtomsFound => "no atoms found; continuous-part test only is NOT substituted",
        TestFlag::ContinuousPartInfeasible => {
            "zero difference lies outside the empirical-likelihood hull; W1 is infinite"
        }
    }
}

fn interval_note(name: &str, flag: IntervalFlag) -> String {
    let what = match flag {
        IntervalFlag::OpenLower => "has no finite lower bound",
        IntervalFlag::OpenUpper => "has no finite upper bound",
        IntervalFlag::HullExhausted => "reaches the edge of the empirical-likelihood hull",
        IntervalFlag::BinaryBoundary => "is on the boundary (a proportion observed is 0 or 1)",
        IntervalFlag::DegenerateVariance => "uses a degenerate variance",
    };
    format!("interval for the {name} {what}")
}

impl ReportDocument {
    pub fn new(
        test: &TestResult<f64>,
        mu_ci: &ConfidenceInterval<f64>,
        or_ci: &ConfidenceInterval<f64>,
        data: &TrialData<f64>,
    ) -> Self {
        let split = split_by_atom(data);
        let mut notes: Vec<String> = test
            .flags
            .iter()
            .map(|&f| test_note(f).to_string())
            .collect();
        for (name, ci) in [("difference in means", mu_ci), ("odds ratio", or_ci)] {
            notes.extend(ci.flags.iter().map(|&f| interval_note(name, f)));
        }
        let row = |label: &str, ci: &ConfidenceInterval<f64>| ContrastRow {
            label: label.into(),
            estimate: r7(ci.estimate),
            ci_lower: r7(ci.lower),
            ci_upper: r7(ci.upper),
        };
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            method: test.method.label().into(),
            confidence_level: r7(mu_ci.level),
            contrasts: vec![row(MU_LABEL, mu_ci), row(OR_LABEL, or_ci)],
            w: r7(test.w),
            w1: r7(test.w1),
            w2: r7(test.w2),
            df: test.df,
            p_value: r7(test.p_value),
            n_total: split.n_total,
            n_observed: split.n_obs,
            n_covariates: data.n_covariates(),
            notes,
        }
    }

    /// Runs the joint test and both marginal intervals at `level`.
    pub fn analyze(data: &TrialData<f64>, method: Method, level: f64) -> Result<Self> {
        let test = match method {
            Method::Parametric => parametric_lrt(data)?,
            Method::Semiparametric => semiparametric_lrt(data)?,
        };
        let (mu_ci, or_ci) = marginal_intervals(data, 1.0 - level, method)?;
        Ok(Self::new(&test, &mu_ci, &or_ci, data))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| crate::Error::Input(format!("invalid report JSON: {e}")))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Estimation method: {}", self.method);
        let _ = writeln!(
            out,
            "Confidence level = {}%",
            format_number(r7(self.confidence_level * 100.0))
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "Treatment contrasts");

        let headers = ["Estimate", "CI Lower", "CI Upper"];
        let columns: Vec<Vec<String>> = [
            self.contrasts
                .iter()
                .map(|c| c.estimate)
                .collect::<Vec<_>>(),
            self.contrasts.iter().map(|c| c.ci_lower).collect(),
            self.contrasts.iter().map(|c| c.ci_upper).collect(),
        ]
        .iter()
        .map(|v| format_column(v))
        .collect();
        let label_width = self
            .contrasts
            .iter()
            .map(|c| c.label.len())
            .max()
            .unwrap_or(0);
        let widths: Vec<usize> = headers
            .iter()
            .zip(&columns)
            .map(|(h, col)| {
                col.iter()
                    .map(String::len)
                    .chain([h.len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let _ = write!(out, "{:label_width$}", "");
        for (h, w) in headers.iter().zip(&widths) {
            let _ = write!(out, " {h:>w$}");
        }
        let _ = writeln!(out);
        for (i, c) in self.contrasts.iter().enumerate() {
            let _ = write!(out, "{:<label_width$}", c.label);
            for (col, w) in columns.iter().zip(&widths) {
                let _ = write!(out, " {:>w$}", col[i]);
            }
            let _ = writeln!(out);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "Joint test statistic: W = {}", format_number(self.w));
        let _ = writeln!(out, "p-value: p = {}", format_number(self.p_value));
        if !self.notes.is_empty() {
            let _ = writeln!(out);
            for note in &self.notes {
                let _ = writeln!(out, "Note: {note}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReportDocument {
        ReportDocument {
            schema_version: REPORT_SCHEMA_VERSION,
            method: Method::Semiparametric.label().into(),
            confidence_level: 0.95,
            contrasts: vec![
                ContrastRow {
                    label: MU_LABEL.into(),
                    estimate: 1.8564296,
                    ci_lower: 1.1638863,
                    ci_upper: 2.480132,
                },
                ContrastRow {
                    label: OR_LABEL.into(),
                    estimate: 0.5238095,
                    ci_lower: 0.1660407,
                    ci_upper: 1.59682,
                },
            ],
            w: 31.09545,
            w1: 30.0,
            w2: 1.09545,
            df: 2,
            p_value: 1.768924e-07,
            n_total: [25, 25],
            n_observed: [20, 18],
            n_covariates: 0,
            notes: vec![],
        }
    }

    #[test]
    fn text_layout() {
        let expected = "\
Estimation method: Semi-empirical Likelihood Ratio Test
Confidence level = 95%

Treatment contrasts
                                         Estimate  CI Lower CI Upper
Difference in means among the observed: 1.8564296 1.1638863 2.480132
Odds ratio of being observed:           0.5238095 0.1660407 1.596820

Joint test statistic: W = 31.09545
p-value: p = 1.768924e-07
";
        assert_eq!(sample().to_text(), expected);
    }

    #[test]
    fn json_round_trip_with_infinities() {
        let mut doc = sample();
        doc.contrasts[1].ci_upper = f64::INFINITY;
        doc.contrasts[1].estimate = f64::NAN;
        doc.notes.push("something".into());
        let back = ReportDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert!(doc.to_json().contains("\"schema_version\": 1"));
    }
}
