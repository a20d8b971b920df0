//! Spectrum tables as CSV.

use std::fmt::Write as _;

use thiserror::Error;

use super::format::g9;
use crate::spectra::{SpectrumTable, TransitionLine};

pub const SPECTRUM_HEADER: &str =
    "n_g,state_index,freq_ghz,cpb_fraction,tls1_flip,tls2_flip,visibility";

/// One CSV row, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub n_g: f64,
    pub state_index: usize,
    pub freq: f64,
    pub cpb_fraction: f64,
    pub tls_flip: [f64; 2],
    pub visibility: f64,
}

impl From<&TransitionLine> for SpectrumRow {
    fn from(l: &TransitionLine) -> Self {
        Self {
            n_g: l.n_g,
            state_index: l.state_index,
            freq: l.freq,
            cpb_fraction: l.cpb_fraction,
            tls_flip: l.tls_flip_fractions,
            visibility: l.visibility,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumCsvError {
    #[error("bad header: expected `{SPECTRUM_HEADER}`")]
    Header,
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
}

pub fn rows_to_csv(rows: &[SpectrumRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            g9(r.n_g),
            r.state_index,
            g9(r.freq),
            g9(r.cpb_fraction),
            g9(r.tls_flip[0]),
            g9(r.tls_flip[1]),
            g9(r.visibility)
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Rows in table order, which is (grid point, state index).
pub fn write_spectrum_csv(table: &SpectrumTable) -> String {
    let rows: Vec<SpectrumRow> = table.lines.iter().map(SpectrumRow::from).collect();
    rows_to_csv(&rows)
}

pub fn read_spectrum_csv(text: &str) -> Result<Vec<SpectrumRow>, SpectrumCsvError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == SPECTRUM_HEADER => {}
        _ => return Err(SpectrumCsvError::Header),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| SpectrumCsvError::Row {
            line: line_no,
            reason,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(err(format!("expected 7 fields, found {}", fields.len())));
        }
        let num = |i: usize| -> Result<f64, SpectrumCsvError> {
            fields[i]
                .parse::<f64>()
                .map_err(|_| err(format!("field {}: not a number: `{}`", i + 1, fields[i])))
        };
        let state_index = fields[1]
            .parse::<usize>()
            .map_err(|_| err(format!("state_index: not an integer: `{}`", fields[1])))?;
        rows.push(SpectrumRow {
            n_g: num(0)?,
            state_index,
            freq: num(2)?,
            cpb_fraction: num(3)?,
            tls_flip: [num(4)?, num(5)?],
            visibility: num(6)?,
        });
    }
    Ok(rows)
}
