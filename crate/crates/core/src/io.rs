//! CSV formats for grid fields, spectra and iteration traces.
//!
//! Grid: header `x1[,x2[,x3]],u_1,...,u_N`, one row per grid point in
//! lattice order. Spectrum: header `component,m1[,m2[,..]],re,im`, one block
//! of rows per component. Trace: header `iter,increment,ratio`.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Geometry, GridField, SpectralField, StateVector};
use crate::solver::IterationTrace;

/// Allowed mismatch between stored and expected grid coordinates.
pub const COORDINATE_TOLERANCE: f64 = 1e-9;

fn csv_error(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

fn parse(field: &str, row: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Csv(format!("row {row}: '{field}' is not a number")))
}

pub fn write_grid_csv<W: Write>(geometry: &Geometry, field: &GridField, writer: W) -> Result<()> {
    let dim = geometry.total_dim();
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<String> = (1..=dim)
        .map(|i| format!("x{i}"))
        .chain((1..=field.components.len()).map(|k| format!("u_{k}")))
        .collect();
    w.write_record(&header).map_err(csv_error)?;
    for j in 0..geometry.grid_len() {
        let row: Vec<String> = geometry
            .grid_point(j)
            .into_iter()
            .chain(field.components.iter().map(|c| c[j]))
            .map(fmt)
            .collect();
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid_csv<R: Read>(geometry: &Geometry, reader: R) -> Result<GridField> {
    let dim = geometry.total_dim();
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers().map_err(csv_error)?.clone();
    let components = header.len().saturating_sub(dim);
    let expected: Vec<String> = (1..=dim)
        .map(|i| format!("x{i}"))
        .chain((1..=components).map(|k| format!("u_{k}")))
        .collect();
    if components == 0 || header.iter().map(str::trim).ne(expected.iter().map(String::as_str)) {
        return Err(Error::Csv(format!(
            "grid header must be x1..x{dim} followed by u_1..u_N, got '{}'",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut values = vec![Vec::with_capacity(geometry.grid_len()); components];
    for (j, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let row = j + 2;
        if j >= geometry.grid_len() {
            return Err(Error::SizeMismatch {
                expected: geometry.grid_len(),
                found: j + 1,
            });
        }
        for (i, x) in geometry.grid_point(j).into_iter().enumerate() {
            let stored = parse(&record[i], row)?;
            if (stored - x).abs() > COORDINATE_TOLERANCE * x.abs().max(1.0) {
                return Err(Error::Csv(format!(
                    "row {row}: coordinate x{} = {stored} does not match the grid value {x}",
                    i + 1
                )));
            }
        }
        for (k, slot) in values.iter_mut().enumerate() {
            slot.push(parse(&record[dim + k], row)?);
        }
    }
    let found = values[0].len();
    if found != geometry.grid_len() {
        return Err(Error::SizeMismatch {
            expected: geometry.grid_len(),
            found,
        });
    }
    GridField::new(geometry, values)
}

pub fn write_spectral_csv<W: Write>(geometry: &Geometry, state: &StateVector, writer: W) -> Result<()> {
    let lattice = geometry.lattice();
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<String> = std::iter::once("component".to_string())
        .chain((1..=lattice.axes().len()).map(|i| format!("m{i}")))
        .chain(["re".to_string(), "im".to_string()])
        .collect();
    w.write_record(&header).map_err(csv_error)?;
    for (k, component) in state.components.iter().enumerate() {
        for (i, c) in component.coefficients.iter().enumerate() {
            let row: Vec<String> = std::iter::once((k + 1).to_string())
                .chain(lattice.modes(i).iter().map(i64::to_string))
                .chain([fmt(c.re), fmt(c.im)])
                .collect();
            w.write_record(&row).map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectral_csv<R: Read>(geometry: &Geometry, reader: R) -> Result<StateVector> {
    let lattice = geometry.lattice();
    let axes = lattice.axes().len();
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers().map_err(csv_error)?.clone();
    if header.len() != axes + 3 || header.get(0).map(str::trim) != Some("component") {
        return Err(Error::Csv(format!(
            "spectral header must be component,m1..m{axes},re,im"
        )));
    }
    let mut fields: Vec<Vec<Option<Complex64>>> = Vec::new();
    for (j, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let row = j + 2;
        let k: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| Error::Csv(format!("row {row}: bad component index '{}'", &record[0])))?;
        if k == 0 {
            return Err(Error::Csv(format!("row {row}: components are numbered from 1")));
        }
        let modes = (1..=axes)
            .map(|i| {
                record[i]
                    .trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Csv(format!("row {row}: bad mode index '{}'", &record[i])))
            })
            .collect::<Result<Vec<_>>>()?;
        let index = lattice
            .index_of_modes(&modes)
            .ok_or_else(|| Error::Csv(format!("row {row}: modes {modes:?} are not on the lattice")))?;
        while fields.len() < k {
            fields.push(vec![None; lattice.len()]);
        }
        let value = Complex64::new(parse(&record[axes + 1], row)?, parse(&record[axes + 2], row)?);
        if fields[k - 1][index].replace(value).is_some() {
            return Err(Error::Csv(format!("row {row}: duplicate entry for modes {modes:?}")));
        }
    }
    if fields.is_empty() {
        return Err(Error::Csv("spectral file has no rows".into()));
    }
    let components = fields
        .into_iter()
        .enumerate()
        .map(|(k, values)| {
            let coefficients = values
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Csv(format!("component {} is missing lattice entries", k + 1)))?;
            SpectralField::from_coefficients(geometry, coefficients)
        })
        .collect::<Result<Vec<_>>>()?;
    StateVector::new(components)
}

pub fn write_trace_csv<W: Write>(trace: &IterationTrace, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["iter", "increment", "ratio"]).map_err(csv_error)?;
    for (j, (inc, ratio)) in trace.increments.iter().zip(&trace.ratios).enumerate() {
        let ratio = ratio.map(fmt).unwrap_or_default();
        w.write_record([(j + 1).to_string(), fmt(*inc), ratio])
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trace written by [`write_trace_csv`].
pub fn read_trace_csv<R: Read>(reader: R) -> Result<IterationTrace> {
    let mut r = csv::Reader::from_reader(reader);
    let mut trace = IterationTrace::default();
    for (j, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        if record.len() != 3 {
            return Err(Error::Csv(format!("row {}: expected 3 fields", j + 2)));
        }
        trace.increments.push(parse(&record[1], j + 2)?);
        trace.ratios.push(match record[2].trim() {
            "" => None,
            s => Some(parse(s, j + 2)?),
        });
    }
    Ok(trace)
}
