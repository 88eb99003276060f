//! CSV and JSON writers. Every float is printed with 17 significant digits.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use super::RunOutcome;
use crate::error::{Error, Result};
use crate::monitor::SeriesRow;

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON with floats in 17-significant-digit scientific notation.
struct Sig17<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(format_float(v).as_bytes())
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(io::Error::other(format!("{other:?}"))),
    }
}

fn write_csv(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| format_float(v))).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `series.csv`, `profile.csv` and `report.json` into `dir`.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let series = dir.join("series.csv");
    let header: Vec<String> = SeriesRow::CSV_HEADER.iter().map(|s| s.to_string()).collect();
    write_csv(
        &series,
        &header,
        outcome.report.result.series.iter().map(|r| r.csv_values().to_vec()),
    )?;

    let profile = dir.join("profile.csv");
    let dim = outcome.profile_coords.first().map_or(0, Vec::len);
    let mut header: Vec<String> = (1..=dim).map(|a| format!("x{a}")).collect();
    header.push("u_tilde".into());
    write_csv(
        &profile,
        &header,
        outcome
            .profile_coords
            .iter()
            .zip(&outcome.report.result.profile)
            .map(|(x, &v)| {
                let mut row = x.clone();
                row.push(v);
                row
            }),
    )?;

    let report = dir.join("report.json");
    fs::write(&report, to_json_string(&outcome.report)?)?;
    Ok(vec![series, profile, report])
}

pub fn write_oracle_series(series: &[(f64, f64)], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("oracle.csv");
    write_csv(
        &path,
        &["t".to_string(), "max_error".to_string()],
        series.iter().map(|&(t, e)| vec![t, e]),
    )?;
    Ok(path)
}
