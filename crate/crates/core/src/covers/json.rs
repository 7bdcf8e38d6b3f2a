//! Cover files:
//! `{"L": int, "regions": [{"center": [x, xi], "cells": [[x, xi], ...], "values": [v, ...]}]}`.

use serde::{Deserialize, Serialize};

use super::{Cover, Symbol};
use crate::error::{Error, Result};
use crate::grid::GridPoint;
use crate::lattice::Lattice;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoverFile {
    #[serde(rename = "L")]
    len: usize,
    regions: Vec<RegionFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionFile {
    center: GridPoint,
    cells: Vec<GridPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
}

fn parse_file(text: &str) -> Result<CoverFile> {
    let file: CoverFile =
        serde_json::from_str(text).map_err(|e| Error::parse("cover file", e.to_string()))?;
    if file.len == 0 || file.len > u32::MAX as usize {
        return Err(Error::parse(
            "cover file",
            format!("L = {} out of range", file.len),
        ));
    }
    Ok(file)
}

fn build(file: CoverFile) -> Result<Cover> {
    let len = file.len;
    let mut regions = Vec::with_capacity(file.regions.len());
    for (i, r) in file.regions.into_iter().enumerate() {
        let values = match r.values {
            Some(v) if v.len() != r.cells.len() => {
                return Err(Error::parse(
                    "cover file",
                    format!("region {i}: {} values for {} cells", v.len(), r.cells.len()),
                ))
            }
            Some(v) => v,
            None => vec![1.0; r.cells.len()],
        };
        let cells = r.cells.into_iter().zip(values).collect();
        let symbol = Symbol::new(len, r.center, cells).map_err(|e| match e {
            Error::InvalidArgument(m) => Error::parse("cover file", format!("region {i}: {m}")),
            other => other,
        })?;
        regions.push(symbol);
    }
    Cover::new(len, regions).map_err(|e| Error::parse("cover file", e.to_string()))
}

pub fn cover_from_json(text: &str) -> Result<Cover> {
    build(parse_file(text)?)
}

/// Like [`cover_from_json`], but every cell and center must be a point of
/// `lattice`; the first offending cell is reported by region and index.
pub fn cover_from_json_on_lattice(text: &str, lattice: &Lattice) -> Result<Cover> {
    let file = parse_file(text)?;
    if file.len != lattice.len() {
        return Err(Error::parse(
            "lattice cover file",
            format!("L = {} but lattice is on Z_{}", file.len, lattice.len()),
        ));
    }
    for (i, r) in file.regions.iter().enumerate() {
        if !lattice.contains(r.center) {
            return Err(Error::parse(
                "lattice cover file",
                format!("region {i}: center {} is not a lattice point", r.center),
            ));
        }
        if let Some(j) = r.cells.iter().position(|&p| !lattice.contains(p)) {
            return Err(Error::parse(
                "lattice cover file",
                format!(
                    "region {i}: cell {j} at {} is not a lattice point",
                    r.cells[j]
                ),
            ));
        }
    }
    build(file)
}

/// Writes keys in the order `L`, `regions`; per region `center`, `cells`,
/// `values`. `values` is omitted for indicators.
pub fn cover_to_json(cover: &Cover) -> String {
    let file = CoverFile {
        len: cover.len(),
        regions: cover
            .regions()
            .iter()
            .map(|s| RegionFile {
                center: s.center(),
                cells: s.support().collect(),
                values: (!s.is_indicator()).then(|| s.cells().iter().map(|&(_, v)| v).collect()),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("cover serialization is infallible")
}
