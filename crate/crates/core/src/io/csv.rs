//! CSV tables with a header row. Floats are written in shortest
//! round-trip form, so a write followed by a read is bit-exact.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::apps::SparseSpectrum;
use crate::error::{parse_err, Error, Result};
use crate::masks::SpectrumMask;
use crate::recon::ReconReport;
use crate::sampling::{Position, SampleSet};
use crate::spectrum::SparsityReport;

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!("checked io kind"),
        }
    } else {
        parse_err(format!("csv: {e}"))
    }
}

fn writer<W: Write>(out: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    Ok(w)
}

fn row<W: Write>(w: &mut csv::Writer<W>, fields: &[String]) -> Result<()> {
    w.write_record(fields).map_err(csv_err)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(Error::Io)
}

/// Reads all records after checking the header names.
fn records(input: impl Read, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let found = r.headers().map_err(csv_err)?.clone();
    if found.len() != header.len() || found.iter().zip(header).any(|(a, b)| a != *b) {
        return Err(parse_err(format!("expected header '{}'", header.join(","))));
    }
    r.records().map(|rec| rec.map_err(csv_err)).collect()
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<T> {
    let line = rec.position().map_or(0, |p| p.line());
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(format!("line {line}: bad {name} field")))
}

fn position(rec: &csv::StringRecord) -> Result<Position> {
    Ok((field(rec, 0, "row")?, field(rec, 1, "col")?))
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(format!("non-finite {what}")))
    }
}

/// `row,col,value` rows.
pub fn write_samples(out: impl Write, samples: &SampleSet) -> Result<()> {
    let mut w = writer(out, &["row", "col", "value"])?;
    for (&(r, c), v) in samples.positions().iter().zip(samples.values()) {
        row(&mut w, &[r.to_string(), c.to_string(), v.to_string()])?;
    }
    finish(w)
}

/// Sample tables carry no grid size, so the caller supplies it.
pub fn read_samples(input: impl Read, height: usize, width: usize) -> Result<SampleSet> {
    let mut positions = Vec::new();
    let mut values = Vec::new();
    for rec in records(input, &["row", "col", "value"])? {
        positions.push(position(&rec)?);
        values.push(finite(field(&rec, 2, "value")?, "sample value")?);
    }
    SampleSet::new(height, width, positions, values).map_err(|e| parse_err(e.to_string()))
}

/// `row,col` rows.
pub fn write_positions(out: impl Write, positions: &[Position]) -> Result<()> {
    let mut w = writer(out, &["row", "col"])?;
    for &(r, c) in positions {
        row(&mut w, &[r.to_string(), c.to_string()])?;
    }
    finish(w)
}

pub fn read_positions(input: impl Read) -> Result<Vec<Position>> {
    records(input, &["row", "col"])?.iter().map(position).collect()
}

/// Mask as a `row,col` index list of its true cells.
pub fn write_mask_indices(out: impl Write, mask: &SpectrumMask) -> Result<()> {
    write_positions(out, &mask.indices())
}

pub fn read_mask_indices(input: impl Read, height: usize, width: usize) -> Result<SpectrumMask> {
    SpectrumMask::from_indices(height, width, &read_positions(input)?).map_err(|e| parse_err(e.to_string()))
}

/// One projection value per row; the angle is in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinogramCell {
    pub angle: f64,
    pub bin: usize,
    pub value: f64,
}

/// `angle,bin,value` rows in angle-major order.
pub fn write_sinogram(out: impl Write, angles: &[f64], values: &ndarray::Array2<f64>) -> Result<()> {
    let mut w = writer(out, &["angle", "bin", "value"])?;
    for (a, angle) in angles.iter().enumerate() {
        for (b, v) in values.row(a).iter().enumerate() {
            row(&mut w, &[angle.to_string(), b.to_string(), v.to_string()])?;
        }
    }
    finish(w)
}

/// Reads sinogram cells, which need not cover the whole angle-bin grid.
pub fn read_sinogram_cells(input: impl Read) -> Result<Vec<SinogramCell>> {
    records(input, &["angle", "bin", "value"])?
        .iter()
        .map(|rec| {
            Ok(SinogramCell {
                angle: finite(field(rec, 0, "angle")?, "angle")?,
                bin: field(rec, 1, "bin")?,
                value: finite(field(rec, 2, "value")?, "projection value")?,
            })
        })
        .collect()
}

/// `k,n,sparsity,achieved_rmse`.
pub fn write_sparsity_report(out: impl Write, report: &SparsityReport) -> Result<()> {
    let mut w = writer(out, &["k", "n", "sparsity", "achieved_rmse"])?;
    row(
        &mut w,
        &[
            report.k.to_string(),
            report.n.to_string(),
            report.sparsity.to_string(),
            report.achieved_rmse.to_string(),
        ],
    )?;
    finish(w)
}

/// `iteration,rmse_all,rmse_90,residual`, 1-based. Error columns are empty
/// when the run had no reference.
pub fn write_trace(out: impl Write, report: &ReconReport) -> Result<()> {
    let mut w = writer(out, &["iteration", "rmse_all", "rmse_90", "residual"])?;
    let cell = |t: &[f64], i: usize| t.get(i).map_or_else(String::new, f64::to_string);
    for i in 0..report.iterations_run {
        row(
            &mut w,
            &[
                (i + 1).to_string(),
                cell(&report.rmse_all_trace, i),
                cell(&report.rmse_90_trace, i),
                cell(&report.residual_trace, i),
            ],
        )?;
    }
    finish(w)
}

/// `sparsity,min_redundancy`.
pub fn write_redundancy_curve(out: impl Write, curve: &[(f64, f64)]) -> Result<()> {
    let mut w = writer(out, &["sparsity", "min_redundancy"])?;
    for (s, r) in curve {
        row(&mut w, &[s.to_string(), r.to_string()])?;
    }
    finish(w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McRow {
    pub n: usize,
    pub k: usize,
    pub rate: f64,
    pub probability: f64,
}

/// `n,k,rate,probability`.
pub fn write_mc_table(out: impl Write, rows: &[McRow]) -> Result<()> {
    let mut w = writer(out, &["n", "k", "rate", "probability"])?;
    for r in rows {
        row(&mut w, &[r.n.to_string(), r.k.to_string(), r.rate.to_string(), r.probability.to_string()])?;
    }
    finish(w)
}

/// `row,col,re,im` rows of known DFT coefficients.
pub fn write_sparse_spectrum(out: impl Write, spectrum: &SparseSpectrum) -> Result<()> {
    let mut w = writer(out, &["row", "col", "re", "im"])?;
    for (&(r, c), v) in spectrum.positions().iter().zip(spectrum.values()) {
        row(&mut w, &[r.to_string(), c.to_string(), v.re.to_string(), v.im.to_string()])?;
    }
    finish(w)
}

pub fn read_sparse_spectrum(input: impl Read, height: usize, width: usize) -> Result<SparseSpectrum> {
    let mut positions = Vec::new();
    let mut values = Vec::new();
    for rec in records(input, &["row", "col", "re", "im"])? {
        positions.push(position(&rec)?);
        let re = finite(field(&rec, 2, "re")?, "coefficient")?;
        let im = finite(field(&rec, 3, "im")?, "coefficient")?;
        values.push(Complex64::new(re, im));
    }
    SparseSpectrum::new(height, width, positions, values).map_err(|e| parse_err(e.to_string()))
}
