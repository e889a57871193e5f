use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::CurvePoint;
use crate::selector::{BoundingBox, Proposal};

pub const PROPOSAL_HEADER: &str = "x0,y0,x1,y1,score";
pub const CURVE_HEADER: &str = "nwin,value";

pub fn format_proposals(proposals: &[Proposal]) -> String {
    let mut out = String::with_capacity(32 * (proposals.len() + 1));
    out.push_str(PROPOSAL_HEADER);
    out.push('\n');
    for p in proposals {
        let b = p.bbox;
        writeln!(out, "{},{},{},{},{:.6}", b.x0, b.y0, b.x1, b.y1, p.score).unwrap();
    }
    out
}

pub fn format_curve(points: &[CurvePoint]) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for p in points {
        writeln!(out, "{},{:.6}", p.nwin, p.value).unwrap();
    }
    out
}

pub fn write_proposals(proposals: &[Proposal], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_proposals(proposals)).map_err(|e| Error::io(path, e))
}

pub fn write_curve(points: &[CurvePoint], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_curve(points)).map_err(|e| Error::io(path, e))
}

fn data_rows<'a>(text: &'a str, header: &str) -> impl Iterator<Item = (usize, &'a str)> {
    let header = header.to_string();
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(move |(i, l)| !l.is_empty() && !(*i == 1 && *l == header))
}

fn field<T: std::str::FromStr>(text: &str, line: usize) -> Result<T> {
    text.parse()
        .map_err(|_| Error::InvalidArgument(format!("line {line}: cannot parse field {text:?}")))
}

/// Reads a proposal CSV back as `(box, score)` rows. Scale provenance is not stored in the file.
pub fn parse_proposals(text: &str) -> Result<Vec<(BoundingBox, f64)>> {
    data_rows(text, PROPOSAL_HEADER)
        .map(|(line, row)| {
            let f: Vec<&str> = row.split(',').collect();
            if f.len() != 5 {
                return Err(Error::InvalidArgument(format!(
                    "line {line}: expected 5 fields, found {}",
                    f.len()
                )));
            }
            let b = BoundingBox::new(
                field(f[0], line)?,
                field(f[1], line)?,
                field(f[2], line)?,
                field(f[3], line)?,
            );
            Ok((b, field(f[4], line)?))
        })
        .collect()
}

pub fn parse_curve(text: &str) -> Result<Vec<CurvePoint>> {
    data_rows(text, CURVE_HEADER)
        .map(|(line, row)| {
            let (n, v) = row
                .split_once(',')
                .ok_or_else(|| Error::InvalidArgument(format!("line {line}: expected 2 fields")))?;
            Ok(CurvePoint {
                nwin: field(n, line)?,
                value: field(v, line)?,
            })
        })
        .collect()
}
