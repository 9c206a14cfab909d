//! Serialization: field dumps (JSON header + CSV nodes) and diagnostic
//! records.
//!
//! The field dump format, version 1, is a pair of files:
//!
//! * `<stem>.field.json` — header: format version, grid parameters, the
//!   even-symmetry flag and the data file name;
//! * `<stem>.field.csv` — one node per row: `index,x0,...,value`, ascending
//!   flat index, full round-trip precision.

use crate::error::{Error, Result};
use crate::grid::{ScalarField, SlitGrid};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

pub const FIELD_FORMAT_VERSION: u32 = 1;

/// Header of a field dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldHeader {
    pub format_version: u32,
    pub n: usize,
    pub h: f64,
    pub halfwidth: f64,
    pub even: bool,
    pub nodes: usize,
    pub data_file: String,
}

/// Writes `<stem>.field.json` and `<stem>.field.csv`; returns both paths.
pub fn dump_field<F: Real>(field: &ScalarField<F>, stem: &Path) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
    let g = field.grid();
    let json_path = stem.with_extension("field.json");
    let csv_path = stem.with_extension("field.csv");
    let header = FieldHeader {
        format_version: FIELD_FORMAT_VERSION,
        n: g.n(),
        h: g.spacing().as_f64(),
        halfwidth: g.halfwidth().as_f64(),
        even: field.is_even(),
        nodes: g.num_nodes(),
        data_file: csv_path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
    };
    let io_err = |e: std::io::Error| Error::Config(format!("field dump failed: {e}"));
    std::fs::write(&json_path, serde_json::to_string_pretty(&header).expect("header serializes"))
        .map_err(io_err)?;

    let mut out = std::io::BufWriter::new(std::fs::File::create(&csv_path).map_err(io_err)?);
    let d = g.dim();
    let cols: Vec<&str> = ["x0", "x1", "x2"][..d].to_vec();
    writeln!(out, "index,{},value", cols.join(",")).map_err(io_err)?;
    for i in g.nodes() {
        let p = g.coord(i);
        write!(out, "{i}").map_err(io_err)?;
        for a in 0..d {
            write!(out, ",{}", fmt_full(p[a].as_f64())).map_err(io_err)?;
        }
        writeln!(out, ",{}", fmt_full(field.value(i).as_f64())).map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok((json_path, csv_path))
}

/// Reads a dump written by [`dump_field`].
pub fn load_field(stem: &Path) -> Result<ScalarField<f64>> {
    let io_err = |e: std::io::Error| Error::Config(format!("field load failed: {e}"));
    let json_path = stem.with_extension("field.json");
    let header: FieldHeader = serde_json::from_str(
        &std::fs::read_to_string(&json_path).map_err(io_err)?,
    )
    .map_err(|e| Error::Config(format!("bad field header: {e}")))?;
    if header.format_version != FIELD_FORMAT_VERSION {
        return Err(Error::Config(format!(
            "unsupported field format version {}",
            header.format_version
        )));
    }
    let grid: Arc<SlitGrid<f64>> = SlitGrid::new(header.n, header.h, header.halfwidth)?;
    if grid.num_nodes() != header.nodes {
        return Err(Error::Config("node count mismatch in field header".into()));
    }
    let csv_path = json_path.with_file_name(&header.data_file);
    let body = std::fs::read_to_string(&csv_path).map_err(io_err)?;
    let mut values = vec![f64::NAN; header.nodes];
    for (lineno, line) in body.lines().enumerate().skip(1) {
        let mut parts = line.split(',');
        let idx: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Config(format!("bad index on line {}", lineno + 1)))?;
        let value: f64 = parts
            .last()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Config(format!("bad value on line {}", lineno + 1)))?;
        if idx >= values.len() {
            return Err(Error::Config(format!("index {idx} out of range")));
        }
        values[idx] = value;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Config("field dump is missing nodes".into()));
    }
    Ok(ScalarField::from_values(grid, values, header.even))
}

/// Full-precision decimal formatting that round-trips `f64`.
pub fn fmt_full(x: f64) -> String {
    let mut s = format!("{x:?}");
    // `{:?}` prints the shortest round-trip representation; normalize -0.0
    if s == "-0.0" {
        s = "0.0".to_string();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::sample_u;

    #[test]
    fn field_dump_round_trips() {
        let dir = std::env::temp_dir().join(format!("thinfb-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let g = SlitGrid::new(1, 0.25, 1.0).unwrap();
        let u = sample_u(&g);
        let stem = dir.join("cone");
        dump_field(&u, &stem).unwrap();
        let back = load_field(&stem).unwrap();
        assert_eq!(back.values(), u.values());
        assert_eq!(back.is_even(), u.is_even());
        std::fs::remove_dir_all(&dir).ok();
    }
}
