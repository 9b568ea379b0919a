//! Plot-ready CSV and JSON renderings of a [`FieldGrid`], and their readers.
//!
//! CSV: `# key=value` comment lines carrying the metadata, the header
//! `x,y,value`, then one row per cell in row-major order with 17 significant
//! digits. JSON: `{"meta": {...}, "grid": {...}, "cells": [{x, y, value}]}`
//! with non-finite values written as the strings `"inf"`, `"-inf"`, `"NaN"`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{format_err, Result};
use crate::grid::{FieldGrid, GridSpec};

pub const CSV_HEADER: &str = "x,y,value";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn check_meta(meta: &BTreeMap<String, String>) -> Result<()> {
    for (k, v) in meta {
        if k.is_empty() || k.contains(['=', '\n', '\r']) || v.contains(['\n', '\r']) {
            return Err(format_err(format!("metadata entry `{k}` cannot be exported")));
        }
    }
    Ok(())
}

pub fn write_csv<W: Write>(grid: &FieldGrid, mut out: W) -> Result<()> {
    check_meta(&grid.meta)?;
    for (k, v) in &grid.meta {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "{CSV_HEADER}")?;
    for (loc, v) in grid.cells() {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", loc.x, loc.y, v)?;
    }
    out.flush()?;
    Ok(())
}

fn parse_float(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| format_err(format!("not a number: `{s}`")))
}

fn spec_from_meta(meta: &BTreeMap<String, String>) -> Result<GridSpec> {
    let get = |k: &str| {
        meta.get(k)
            .ok_or_else(|| format_err(format!("missing grid key `{k}`")))
            .and_then(|v| parse_float(v))
    };
    GridSpec::new(get("x_min")?, get("x_max")?, get("y_min")?, get("y_max")?, get("step")?)
}

pub fn read_csv<R: BufRead>(input: R) -> Result<FieldGrid> {
    let mut meta = BTreeMap::new();
    let mut values = Vec::new();
    let mut header_seen = false;
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if !header_seen {
            if let Some(entry) = line.strip_prefix("# ") {
                let (k, v) = entry
                    .split_once('=')
                    .ok_or_else(|| format_err(format!("line {}: metadata without `=`", n + 1)))?;
                meta.insert(k.to_string(), v.to_string());
                continue;
            }
            if line.trim() != CSV_HEADER {
                return Err(format_err(format!("line {}: expected header `{CSV_HEADER}`", n + 1)));
            }
            header_seen = true;
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(format_err(format!("line {}: expected 3 fields", n + 1)));
        }
        values.push(parse_float(fields[2])?);
    }
    if !header_seen {
        return Err(format_err("missing header"));
    }
    let spec = spec_from_meta(&meta)?;
    if values.len() != spec.len() {
        return Err(format_err(format!("{} rows for {} cells", values.len(), spec.len())));
    }
    FieldGrid::new(spec, values, meta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum JsonFloat {
    Number(f64),
    Text(String),
}

impl From<f64> for JsonFloat {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            JsonFloat::Number(v)
        } else {
            JsonFloat::Text(format!("{v}"))
        }
    }
}

impl JsonFloat {
    fn value(&self) -> Result<f64> {
        match self {
            JsonFloat::Number(v) => Ok(*v),
            JsonFloat::Text(s) => parse_float(s),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonSpec {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    step: f64,
    nx: usize,
    ny: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonCell {
    x: f64,
    y: f64,
    value: JsonFloat,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonGrid {
    meta: BTreeMap<String, String>,
    grid: JsonSpec,
    cells: Vec<JsonCell>,
}

pub fn write_json<W: Write>(grid: &FieldGrid, mut out: W) -> Result<()> {
    let s = grid.spec;
    let doc = JsonGrid {
        meta: grid.meta.clone(),
        grid: JsonSpec {
            x_min: s.x_min,
            x_max: s.x_max,
            y_min: s.y_min,
            y_max: s.y_max,
            step: s.step,
            nx: s.nx(),
            ny: s.ny(),
        },
        cells: grid
            .cells()
            .map(|(loc, v)| JsonCell {
                x: loc.x,
                y: loc.y,
                value: v.into(),
            })
            .collect(),
    };
    serde_json::to_writer(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn read_json<R: BufRead>(input: R) -> Result<FieldGrid> {
    let doc: JsonGrid = serde_json::from_reader(input)?;
    let g = doc.grid;
    let spec = GridSpec::new(g.x_min, g.x_max, g.y_min, g.y_max, g.step)?;
    if (spec.nx(), spec.ny()) != (g.nx, g.ny) {
        return Err(format_err("grid shape does not match its bounds"));
    }
    if doc.cells.len() != spec.len() {
        return Err(format_err(format!("{} cells for a {}x{} grid", doc.cells.len(), g.nx, g.ny)));
    }
    let values = doc.cells.iter().map(|c| c.value.value()).collect::<Result<Vec<f64>>>()?;
    FieldGrid::new(spec, values, doc.meta)
}

pub fn write<W: Write>(grid: &FieldGrid, format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(grid, out),
        Format::Json => write_json(grid, out),
    }
}

pub fn read<R: BufRead>(format: Format, input: R) -> Result<FieldGrid> {
    match format {
        Format::Csv => read_csv(input),
        Format::Json => read_json(input),
    }
}
