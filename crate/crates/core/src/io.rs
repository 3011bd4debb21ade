//! CSV tables for measured inputs and simulated outputs.
//!
//! Inputs need a header row; column names are matched case-insensitively
//! and lines starting with `#` are ignored. Malformed rows are reported with
//! their line number.

use std::io::{Read, Write};

use crate::eseem::{CancellationScan, EseemTrace, NuclearFrequencies};
use crate::inference::{MeasuredPeak, ObservedFrequency};
use crate::sigproc::{EchoDecay, FtSpectrum, PeakList};
use crate::spectra::{BroadenedSpectrum, ResonanceLine};
use crate::{Error, Result};

/// Which part of a complex echo becomes the decay amplitude.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Quadrature {
    #[default]
    Real,
    Magnitude,
}

impl std::str::FromStr for Quadrature {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "real" => Ok(Quadrature::Real),
            "magnitude" | "abs" => Ok(Quadrature::Magnitude),
            other => Err(Error::invalid(format!(
                "unknown quadrature {other:?}, expected real or magnitude"
            ))),
        }
    }
}

struct Table {
    columns: Vec<Option<usize>>,
    rows: Vec<(usize, csv::StringRecord)>,
}

impl Table {
    fn text<'a>(&self, row: &'a (usize, csv::StringRecord), col: usize) -> Result<Option<&'a str>> {
        let Some(idx) = self.columns[col] else {
            return Ok(None);
        };
        match row.1.get(idx) {
            Some(v) if !v.trim().is_empty() => Ok(Some(v.trim())),
            _ => Err(Error::DataFormat {
                line: row.0,
                message: format!("missing value in column {}", idx + 1),
            }),
        }
    }

    fn number(&self, row: &(usize, csv::StringRecord), col: usize) -> Result<Option<f64>> {
        match self.text(row, col)? {
            None => Ok(None),
            Some(t) => t
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Some)
                .ok_or_else(|| Error::DataFormat {
                    line: row.0,
                    message: format!("{t:?} is not a finite number"),
                }),
        }
    }

    fn required_number(&self, row: &(usize, csv::StringRecord), col: usize) -> Result<f64> {
        Ok(self.number(row, col)?.expect("required column is present"))
    }

    fn required_text<'a>(
        &self,
        row: &'a (usize, csv::StringRecord),
        col: usize,
    ) -> Result<&'a str> {
        Ok(self.text(row, col)?.expect("required column is present"))
    }
}

fn line_of(pos: Option<&csv::Position>) -> usize {
    pos.map(|p| p.line() as usize).unwrap_or(0)
}

fn csv_error(e: csv::Error) -> Error {
    let line = line_of(e.position());
    Error::DataFormat {
        line,
        message: e.to_string(),
    }
}

/// Reads a table whose header must contain every `required` column; the
/// `optional` columns may be absent.
fn read_table<R: Read>(reader: R, required: &[&str], optional: &[&str]) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    let header_line = 1;
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
    };
    let mut columns = Vec::new();
    let mut missing = Vec::new();
    for name in required {
        match find(name) {
            Some(i) => columns.push(Some(i)),
            None => {
                missing.push(*name);
                columns.push(None);
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::DataFormat {
            line: header_line,
            message: format!("header lacks required column(s): {}", missing.join(", ")),
        });
    }
    columns.extend(optional.iter().map(|n| find(n)));
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push((line_of(rec.position()), rec));
    }
    Ok(Table { columns, rows })
}

/// Echo decay table: `two_tau_us, amplitude[, amplitude_imag]`.
pub fn read_decay<R: Read>(reader: R, quadrature: Quadrature) -> Result<EchoDecay> {
    let table = read_table(reader, &["two_tau_us", "amplitude"], &["amplitude_imag"])?;
    let mut t = Vec::with_capacity(table.rows.len());
    let mut a = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        t.push(table.required_number(row, 0)?);
        let re = table.required_number(row, 1)?;
        let im = table.number(row, 2)?.unwrap_or(0.0);
        a.push(match quadrature {
            Quadrature::Real => re,
            Quadrature::Magnitude => re.hypot(im),
        });
    }
    EchoDecay::new(t, a)
}

/// ESEEM trace table: `tau_us, v`.
pub fn read_eseem<R: Read>(reader: R) -> Result<EseemTrace> {
    let table = read_table(reader, &["tau_us", "v"], &[])?;
    let mut tau = Vec::new();
    let mut v = Vec::new();
    for row in &table.rows {
        tau.push(table.required_number(row, 0)?);
        v.push(table.required_number(row, 1)?);
    }
    EseemTrace::from_samples(tau, v)
}

/// Assigned resonance lines: `label, field_mT` with labels like `S2+`.
pub fn read_measured_peaks<R: Read>(reader: R) -> Result<Vec<MeasuredPeak>> {
    let table = read_table(reader, &["label", "field_mT"], &[])?;
    table
        .rows
        .iter()
        .map(|row| {
            let text = table.required_text(row, 0)?;
            let label = text.parse().map_err(|e: Error| Error::DataFormat {
                line: row.0,
                message: e.to_string(),
            })?;
            Ok(MeasuredPeak {
                label,
                field_mt: table.required_number(row, 1)?,
            })
        })
        .collect()
}

/// Assigned nuclear frequencies: `manifold, index, freq_MHz`.
pub fn read_frequencies<R: Read>(reader: R) -> Result<Vec<ObservedFrequency>> {
    let table = read_table(reader, &["manifold", "index", "freq_MHz"], &[])?;
    table
        .rows
        .iter()
        .map(|row| {
            let manifold =
                table
                    .required_text(row, 0)?
                    .parse()
                    .map_err(|e: Error| Error::DataFormat {
                        line: row.0,
                        message: e.to_string(),
                    })?;
            let index_text = table.required_text(row, 1)?;
            let index = index_text.parse::<usize>().map_err(|_| Error::DataFormat {
                line: row.0,
                message: format!("{index_text:?} is not a non-negative integer"),
            })?;
            Ok(ObservedFrequency {
                manifold,
                index,
                freq_mhz: table.required_number(row, 2)?,
            })
        })
        .collect()
}

/// T₂ versus temperature: `temperature_K, t2_ms`.
pub fn read_t2_table<R: Read>(reader: R) -> Result<Vec<(f64, f64)>> {
    let table = read_table(reader, &["temperature_K", "t2_ms"], &[])?;
    table
        .rows
        .iter()
        .map(|row| {
            Ok((
                table.required_number(row, 0)?,
                table.required_number(row, 1)?,
            ))
        })
        .collect()
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(w)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush()?;
    Ok(())
}

fn write_rows<W: Write>(
    w: W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let mut out = writer(w);
    out.write_record(header).map_err(csv_error)?;
    for r in rows {
        out.write_record(&r).map_err(csv_error)?;
    }
    finish(out)
}

/// Stick spectrum: `field_mT, amplitude, site, branch, intensity`.
pub fn write_sticks<W: Write>(w: W, lines: &[ResonanceLine]) -> Result<()> {
    write_rows(
        w,
        &["field_mT", "amplitude", "site", "branch", "intensity"],
        lines.iter().map(|l| {
            vec![
                l.field_mt.to_string(),
                l.signed_amplitude.to_string(),
                l.label.site().to_string(),
                l.label.branch().sign().to_string(),
                l.intensity.to_string(),
            ]
        }),
    )
}

/// Broadened spectrum: `field_mT, amplitude`.
pub fn write_broadened<W: Write>(w: W, spectrum: &BroadenedSpectrum) -> Result<()> {
    write_rows(
        w,
        &["field_mT", "amplitude"],
        spectrum
            .field_mt
            .iter()
            .zip(&spectrum.amplitude)
            .map(|(b, a)| vec![b.to_string(), a.to_string()]),
    )
}

/// ESEEM trace: `tau_us, v`.
pub fn write_trace<W: Write>(w: W, trace: &EseemTrace) -> Result<()> {
    write_rows(
        w,
        &["tau_us", "v"],
        trace
            .tau_us
            .iter()
            .zip(&trace.v)
            .map(|(t, v)| vec![t.to_string(), v.to_string()]),
    )
}

/// FT spectrum: `freq_MHz, amplitude`.
pub fn write_spectrum<W: Write>(w: W, spectrum: &FtSpectrum) -> Result<()> {
    write_rows(
        w,
        &["freq_MHz", "amplitude"],
        spectrum
            .freq_mhz
            .iter()
            .zip(&spectrum.amplitude)
            .map(|(f, a)| vec![f.to_string(), a.to_string()]),
    )
}

/// Peak list: `freq_MHz, amplitude, width_MHz`.
pub fn write_peaks<W: Write>(w: W, peaks: &PeakList) -> Result<()> {
    write_rows(
        w,
        &["freq_MHz", "amplitude", "width_MHz"],
        peaks.peaks.iter().map(|p| {
            vec![
                p.freq_mhz.to_string(),
                p.amplitude.to_string(),
                p.width_mhz.to_string(),
            ]
        }),
    )
}

/// Nuclear frequency lists: `manifold, index, freq_MHz`.
pub fn write_frequencies<W: Write>(w: W, freqs: &NuclearFrequencies) -> Result<()> {
    write_rows(
        w,
        &["manifold", "index", "freq_MHz"],
        freqs.by_manifold.iter().flat_map(|(m, list)| {
            list.iter()
                .enumerate()
                .map(move |(i, f)| vec![m.to_string(), i.to_string(), f.to_string()])
        }),
    )
}

/// Echo decay: `two_tau_us, amplitude`.
pub fn write_decay<W: Write>(w: W, decay: &EchoDecay) -> Result<()> {
    write_rows(
        w,
        &["two_tau_us", "amplitude"],
        decay
            .two_tau_us
            .iter()
            .zip(&decay.amplitude)
            .map(|(t, a)| vec![t.to_string(), a.to_string()]),
    )
}

/// Depth versus field: `field_mT, depth`.
pub fn write_scan<W: Write>(w: W, scan: &CancellationScan) -> Result<()> {
    write_rows(
        w,
        &["field_mT", "depth"],
        scan.points
            .iter()
            .map(|(b, d)| vec![b.to_string(), d.to_string()]),
    )
}
