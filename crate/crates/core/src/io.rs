//! Drive CSV and trace JSON formats used by the command-line tool.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::LoewnerError;
use crate::forward::Trace;
use crate::halfplane::{HalfPlanePoint, Speed};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Domain(#[from] LoewnerError),
}

pub const DRIVE_HEADER: [&str; 2] = ["t", "lambda"];

/// Reads `(t, lambda)` rows from a CSV with header `t,lambda`.
pub fn read_drive_csv<R: Read>(reader: R) -> Result<Vec<(f64, f64)>, FormatError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != DRIVE_HEADER {
        return Err(FormatError::Invalid(format!(
            "expected header `t,lambda`, found `{}`",
            header.join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64, FormatError> {
            let field = rec.get(i).unwrap_or("");
            field.parse::<f64>().map_err(|_| {
                FormatError::Invalid(format!(
                    "line {}: `{field}` is not a number",
                    rec.position().map_or(0, |p| p.line())
                ))
            })
        };
        rows.push((parse(0)?, parse(1)?));
    }
    Ok(rows)
}

pub fn write_drive_csv<W: Write>(
    writer: W,
    samples: impl IntoIterator<Item = (f64, f64)>,
) -> Result<(), FormatError> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    wtr.write_record(DRIVE_HEADER)?;
    for (t, l) in samples {
        wtr.write_record([t.to_string(), l.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub re: f64,
    pub im: f64,
}

/// On-disk trace document: `{"T": .., "speed": .., "points": [{t, re, im}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    #[serde(rename = "T")]
    pub total_time: f64,
    pub speed: u8,
    pub points: Vec<TracePoint>,
}

impl TraceFile {
    pub fn from_trace(trace: &Trace) -> Self {
        TraceFile {
            total_time: trace.total_time(),
            speed: trace.speed.factor() as u8,
            points: trace
                .samples
                .iter()
                .map(|(t, p)| TracePoint {
                    t: *t,
                    re: p.re,
                    im: p.im,
                })
                .collect(),
        }
    }

    pub fn speed(&self) -> Result<Speed, FormatError> {
        Ok(Speed::from_factor(f64::from(self.speed))?)
    }

    /// Replaces every time `t` by `T - t` and reverses the point order.
    pub fn reverse_time(&mut self) {
        let total = self.total_time;
        self.points.reverse();
        for p in &mut self.points {
            p.t = total - p.t;
        }
    }

    pub fn half_plane_points(&self) -> Vec<HalfPlanePoint> {
        self.points
            .iter()
            .map(|p| HalfPlanePoint { re: p.re, im: p.im })
            .collect()
    }
}

pub fn read_trace_json<R: Read>(reader: R) -> Result<TraceFile, FormatError> {
    Ok(serde_json::from_reader(reader)?)
}

pub fn write_trace_json<W: Write>(mut writer: W, trace: &TraceFile) -> Result<(), FormatError> {
    serde_json::to_writer_pretty(&mut writer, trace)?;
    writer.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drive_csv_roundtrip() {
        let rows = vec![(0.0, 0.25), (0.5, -1.0), (1.0, 1e-7)];
        let mut buf = Vec::new();
        write_drive_csv(&mut buf, rows.clone()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,lambda\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_drive_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn bad_header_and_values() {
        assert!(read_drive_csv("time,lambda\n0,0\n".as_bytes()).is_err());
        assert!(read_drive_csv("t,lambda\n0,abc\n".as_bytes()).is_err());
        assert!(read_drive_csv("t,lambda\n0,1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn trace_json_fields() {
        let tf = TraceFile {
            total_time: 0.5,
            speed: 1,
            points: vec![
                TracePoint { t: 0.0, re: 0.0, im: 1.0 },
                TracePoint { t: 0.5, re: 0.0, im: 0.0 },
            ],
        };
        let mut buf = Vec::new();
        write_trace_json(&mut buf, &tf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["T"], 0.5);
        assert_eq!(v["points"][0]["im"], 1.0);
        assert_eq!(read_trace_json(buf.as_slice()).unwrap(), tf);
    }

    #[test]
    fn reverse_time_reindexes() {
        let mut tf = TraceFile {
            total_time: 0.5,
            speed: 1,
            points: vec![
                TracePoint { t: 0.0, re: 0.0, im: 1.0 },
                TracePoint { t: 0.5, re: 0.0, im: 0.0 },
            ],
        };
        tf.reverse_time();
        assert_eq!(tf.points[0], TracePoint { t: 0.0, re: 0.0, im: 0.0 });
        assert_eq!(tf.points[1], TracePoint { t: 0.5, re: 0.0, im: 1.0 });
    }
}
