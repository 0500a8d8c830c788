//! Decimal formatting at a fixed number of significant digits, laid out the
//! way R prints numeric columns: one shared number of decimals per column,
//! switching to scientific notation when that is narrower.

pub const SIGNIFICANT_DIGITS: usize = 7;

/// Rounds `x` to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

fn special(x: f64) -> Option<String> {
    if x.is_nan() {
        Some("NA".into())
    } else if x.is_infinite() {
        Some(if x > 0.0 { "Inf" } else { "-Inf" }.into())
    } else {
        None
    }
}

/// Mantissa digits (after the point) and decimal exponent needed to show `x`
/// at `digits` significant digits without trailing zeros.
fn sig_layout(x: f64, digits: usize) -> (usize, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let s = format!("{:.*e}", digits - 1, x.abs());
    let (mantissa, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let frac = mantissa
        .split_once('.')
        .map_or("", |(_, f)| f)
        .trim_end_matches('0');
    (frac.len(), exp)
}

fn scientific(x: f64, mantissa_digits: usize) -> String {
    let s = format!("{:.*e}", mantissa_digits, x);
    let (m, e) = s.split_once('e').expect("exponent");
    let e: i32 = e.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{m}e{sign}{:02}", e.abs())
}

/// Formats a column of numbers with a common layout.
pub fn format_column(values: &[f64]) -> Vec<String> {
    let finite: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    let layouts: Vec<(usize, i32)> = finite
        .iter()
        .map(|&x| sig_layout(x, SIGNIFICANT_DIGITS))
        .collect();
    let decimals = layouts
        .iter()
        .map(|&(frac, exp)| (frac as i32 - exp).max(0) as usize)
        .max()
        .unwrap_or(0)
        .min(15);
    let mantissa = layouts.iter().map(|&(frac, _)| frac).max().unwrap_or(0);
    let fixed: Vec<String> = finite
        .iter()
        .map(|&x| format!("{:.*}", decimals, x))
        .collect();
    let sci: Vec<String> = finite.iter().map(|&x| scientific(x, mantissa)).collect();
    let width = |v: &[String]| v.iter().map(String::len).max().unwrap_or(0);
    let use_fixed = width(&fixed) <= width(&sci);
    let mut chosen = if use_fixed { fixed } else { sci }.into_iter();
    values
        .iter()
        .map(|&x| special(x).unwrap_or_else(|| chosen.next().expect("one per finite value")))
        .collect()
}

/// Formats a single number at [`SIGNIFICANT_DIGITS`] significant digits.
pub fn format_number(x: f64) -> String {
    format_column(&[x]).remove(0)
}
