//! CSV writers for trial records and summaries.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::HarnessError;
use crate::runner::{SummaryRow, TrialRecord};

pub const RECORD_HEADER: [&str; 9] = [
    "preset",
    "method",
    "n",
    "d",
    "aspect_ratio",
    "s",
    "trial",
    "dist",
    "elapsed_seconds",
];
pub const SUMMARY_HEADER: [&str; 7] = [
    "preset",
    "method",
    "aspect_ratio",
    "mean_dist",
    "sd_dist",
    "trials",
    "failed",
];

/// At most six significant digits, trailing zeros dropped; `nan` for NaN.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&exp) {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').unwrap_or((&s, "0"));
        return format!("{}e{e}", trim_zeros(mantissa));
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fixed3(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.3}")
    }
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_records<W: Write>(records: &[TrialRecord], out: W) -> Result<(), HarnessError> {
    let mut w = writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.preset.clone(),
            r.method.clone(),
            r.n.to_string(),
            r.d.to_string(),
            format_sig(r.aspect_ratio),
            r.s.map(|s| s.to_string()).unwrap_or_default(),
            r.trial.to_string(),
            format_sig(r.dist),
            format_sig(r.elapsed_seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Means and standard deviations use three decimals.
pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<(), HarnessError> {
    let mut w = writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.preset.clone(),
            r.method.clone(),
            format_sig(r.aspect_ratio),
            fixed3(r.mean_dist),
            fixed3(r.sd_dist),
            r.trials.to_string(),
            r.failed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[TrialRecord], path: impl AsRef<Path>) -> Result<(), HarnessError> {
    write_records(records, BufWriter::new(File::create(path)?))
}

pub fn emit_summary(rows: &[SummaryRow], path: impl AsRef<Path>) -> Result<(), HarnessError> {
    write_summary(rows, BufWriter::new(File::create(path)?))
}
