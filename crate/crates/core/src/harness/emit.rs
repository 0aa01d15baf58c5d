//! Result serialization: CSV with a fixed schema, or per-method plot-data
//! series files. Floating-point values carry 9 significant digits.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::config::Method;
use super::sweep::SweepRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    PlotData,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "plotdata" => Ok(OutputFormat::PlotData),
            other => Err(Error::invalid_argument(format!(
                "unknown output format `{other}`"
            ))),
        }
    }
}

pub(crate) const CSV_HEADER: &str = "axis,value,method,mean_ber,ber_std_err,trials,sync_failures,\
mean_omega_err_hz,n_antennas,k_jammers,l_order,preamble_bits,frame_bits,snr_db,sjr_db,cfo_hz,seed";

/// 9 significant digits; infinities serialize as `inf`.
pub(crate) fn fmt_g9(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.8e}")
}

fn row_line(row: &SweepRow) -> String {
    let mut line = String::new();
    let omega = row.mean_omega_err_hz.map(fmt_g9).unwrap_or_default();
    let _ = write!(
        line,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        row.axis,
        fmt_g9(row.value),
        row.method,
        fmt_g9(row.mean_ber),
        fmt_g9(row.ber_std_err),
        row.trials,
        row.sync_failures,
        omega,
        row.n_antennas,
        row.k_jammers,
        row.l_order,
        row.preamble_bits,
        row.frame_bits,
        fmt_g9(row.snr_db),
        fmt_g9(row.sjr_db),
        fmt_g9(row.cfo_hz),
        row.seed,
    );
    line
}

/// Writes the CSV (header plus one line per row) to any sink.
pub fn write_csv(rows: &[SweepRow], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row_line(row))?;
    }
    Ok(())
}

fn write_plotdata(rows: &[SweepRow], path: &Path) -> Result<()> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("series");
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut methods: Vec<Method> = Vec::new();
    for row in rows {
        if !methods.contains(&row.method) {
            methods.push(row.method);
        }
    }
    for method in methods {
        let file = dir.join(format!("{stem}_{method}.dat"));
        let mut body = String::new();
        let axis = rows.iter().find(|r| r.method == method).map(|r| r.axis);
        if let Some(axis) = axis {
            let _ = writeln!(body, "# {axis} mean_ber ber_std_err");
        }
        for row in rows.iter().filter(|r| r.method == method) {
            let _ = writeln!(
                body,
                "{} {} {}",
                fmt_g9(row.value),
                fmt_g9(row.mean_ber),
                fmt_g9(row.ber_std_err)
            );
        }
        std::fs::write(&file, body).map_err(|e| Error::io(file.clone(), e))?;
    }
    Ok(())
}

/// Writes sweep rows to `path` in the requested format. CSV produces a
/// single file; plot data produces one `<stem>_<method>.dat` series file
/// per method next to `path`.
pub fn emit_results(rows: &[SweepRow], path: &Path, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            write_csv(rows, &mut buf).map_err(|e| Error::io(path, e))?;
            std::fs::write(path, buf).map_err(|e| Error::io(path, e))
        }
        OutputFormat::PlotData => write_plotdata(rows, path),
    }
}
