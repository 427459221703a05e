//! Machine-readable rows: one per run or sweep point.
//!
//! Reals are written with 12 significant digits; `context` is `AB` since every
//! row combines both contexts, and `n_D1..n_D8` are the context-A tallies.
//! The trailing `lhs_exact` column carries the analytic prediction.

use std::io;

use super::{ExperimentError, ExperimentRow};

pub const HEADER: [&str; 24] = [
    "theory",
    "context",
    "param",
    "value",
    "trials",
    "seed",
    "n_D1",
    "n_D2",
    "n_D3",
    "n_D4",
    "n_D5",
    "n_D6",
    "n_D7",
    "n_D8",
    "avg_z1z2",
    "se_z1z2",
    "avg_x1x2",
    "se_x1x2",
    "avg_prod",
    "se_prod",
    "lhs",
    "lhs_se",
    "violation_sigma",
    "lhs_exact",
];

/// Column index of the first real-valued estimate.
pub const FIRST_REAL: usize = 14;

/// Shortest decimal form of `x` rounded to 12 significant digits.
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    rounded.to_string()
}

pub fn record(row: &ExperimentRow) -> Vec<String> {
    let (param, value) = match &row.param {
        Some((p, v)) => (p.clone(), format_real(*v)),
        None => (String::new(), String::new()),
    };
    let mut out =
        vec![row.theory.to_string(), "AB".to_string(), param, value, row.trials.to_string(), row.seed.to_string()];
    out.extend(row.counts_a.context_a.iter().map(u64::to_string));
    let r = &row.report;
    out.extend(
        [
            r.avg_z1z2,
            r.se_z1z2,
            r.avg_x1x2,
            r.se_x1x2,
            r.avg_product,
            r.se_product,
            r.lhs,
            r.lhs_se,
            r.violation_sigma,
            row.exact.lhs,
        ]
        .map(format_real),
    );
    out
}

pub fn write_rows<W: io::Write>(rows: &[ExperimentRow], out: W) -> Result<(), ExperimentError> {
    let mut w = ::csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush().map_err(::csv::Error::from)?;
    Ok(())
}

pub fn to_string(rows: &[ExperimentRow]) -> Result<String, ExperimentError> {
    let mut buf = Vec::new();
    write_rows(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| ExperimentError::Internal(e.to_string()))
}
