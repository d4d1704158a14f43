//! CSV iteration traces.

use std::io::Write;

use nfix_core::solver::TraceRow;

pub const HEADER: [&str; 5] = ["k", "residual", "apriori", "aposteriori", "certified"];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trace<W: Write>(out: W, rows: &[TraceRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            format_real(r.residual),
            format_real(r.apriori),
            format_real(r.aposteriori),
            format_real(r.certified),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a trace written by [`write_trace`].
pub fn read_trace<R: std::io::Read>(input: R) -> csv::Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let real = |i: usize| rec[i].parse::<f64>().unwrap_or(f64::NAN);
        rows.push(TraceRow {
            k: rec[0].parse().unwrap_or(usize::MAX),
            residual: real(1),
            apriori: real(2),
            aposteriori: real(3),
            certified: real(4),
        });
    }
    Ok(rows)
}
