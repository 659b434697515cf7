//! Byte-stable CSV and JSON writers.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use cohgrav_core::curvature::Field3D;
use serde_json::{Map, Value};

use crate::config::RunConfig;

/// Flat JSON object; keys come out sorted.
pub type Summary = Map<String, Value>;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn json_line(summary: &Summary) -> String {
    let mut s = serde_json::to_string(summary).expect("a map of plain values always serializes");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, summary: &Summary) -> io::Result<()> {
    fs::write(path, json_line(summary))
}

/// Writes a table preceded by a `# config_sha256=...` comment line.
pub fn write_csv<'a, R>(path: &Path, hash: &str, header: &[&str], rows: R) -> io::Result<()>
where
    R: IntoIterator<Item = &'a [f64]>,
{
    let mut w = io::BufWriter::new(fs::File::create(path)?);
    writeln!(w, "# config_sha256={hash}")?;
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()
}

/// `x,y,z,value` rows in grid order.
pub fn write_field_csv(path: &Path, hash: &str, field: &Field3D) -> io::Result<()> {
    let grid = field.grid();
    let rows: Vec<[f64; 4]> = (0..grid.len())
        .map(|p| {
            let x = grid.point(p);
            [x[0], x[1], x[2], field.data()[p]]
        })
        .collect();
    write_csv(path, hash, &["x", "y", "z", "value"], rows.iter().map(|r| r.as_slice()))
}

/// Grid metadata, label, state and quadrature settings for a field file.
pub fn field_sidecar(field: &Field3D, config: &RunConfig, hash: &str) -> Summary {
    let grid = field.grid();
    let mut m = Summary::new();
    m.insert("label".into(), field.label().into());
    m.insert("config_sha256".into(), hash.into());
    m.insert("grid_min".into(), grid.lo()[0].into());
    m.insert("grid_max".into(), grid.hi()[0].into());
    m.insert("grid_n".into(), grid.points_per_axis().into());
    m.insert("grid_spacing".into(), grid.spacing()[0].into());
    m.insert("index_order".into(), "x slowest, z fastest".into());
    for key in [
        "state.alpha",
        "state.beta",
        "state.beta_im",
        "profile.kind",
        "profile.k0",
        "pair.m_tilde",
        "pair.l_tilde",
        "time.t",
        "quad.rel_tol",
        "quad.abs_tol",
        "quad.max_subdiv",
        "quad.rule",
    ] {
        let raw = config.get(key).unwrap_or_default();
        let value = raw.parse::<f64>().map_or_else(|_| Value::from(raw), Value::from);
        m.insert(key.replace('.', "_"), value);
    }
    m.insert("max_abs".into(), field.max_abs().into());
    m
}

pub fn write_field(dir: &Path, field: &Field3D, config: &RunConfig, hash: &str) -> io::Result<()> {
    let label = field.label();
    write_field_csv(&dir.join(format!("{label}.csv")), hash, field)?;
    write_json(&dir.join(format!("{label}.json")), &field_sidecar(field, config, hash))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn json_keys_are_sorted() {
        let mut m = Summary::new();
        m.insert("zeta".into(), 1.into());
        m.insert("alpha".into(), 0.5.into());
        assert_eq!(json_line(&m), "{\"alpha\":0.5,\"zeta\":1}\n");
    }
}
