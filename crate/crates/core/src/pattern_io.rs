//! Pattern-grid CSV files.
//!
//! One file per port, header `freq_hz,theta_deg,phi_deg,re_etheta,im_etheta,
//! re_ephi,im_ephi`, rows in row-major theta-then-phi order, grouped by
//! frequency. Files produced here always live on the standard quadrature
//! grid; the reader regenerates that grid from the observed (n_theta, n_phi)
//! counts and validates the node angles against it, since quadrature weights
//! are not part of the interchange format.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{make_grid, SphericalGrid};
use crate::pattern::VectorPattern;

pub const HEADER: &str = "freq_hz,theta_deg,phi_deg,re_etheta,im_etheta,re_ephi,im_ephi";

pub fn render(patterns: &[VectorPattern]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    for p in patterns {
        let grid = p.grid();
        let f = p.frequency();
        for it in 0..grid.n_theta() {
            let t_deg = grid.theta(it).to_degrees();
            for ip in 0..grid.n_phi() {
                let idx = grid.node_index(it, ip);
                let (et, ep) = p.sample(idx);
                let _ = writeln!(
                    out,
                    "{f},{t_deg},{},{},{},{},{}",
                    grid.phi(ip).to_degrees(),
                    et.re,
                    et.im,
                    ep.re,
                    ep.im
                );
            }
        }
    }
    out
}

/// Write one pattern per frequency to a single per-port file.
pub fn write(path: &Path, patterns: &[VectorPattern]) -> Result<()> {
    std::fs::write(path, render(patterns))?;
    Ok(())
}

struct Row {
    freq: f64,
    theta_deg: f64,
    phi_deg: f64,
    e_theta: Complex64,
    e_phi: Complex64,
}

fn parse_row(path: &str, row_no: usize, line: &str) -> Result<Row> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 7 {
        return Err(Error::PatternFile {
            path: path.into(),
            row: row_no,
            msg: format!("expected 7 fields, got {}", fields.len()),
        });
    }
    let mut vals = [0.0f64; 7];
    for (k, s) in fields.iter().enumerate() {
        vals[k] = s.trim().parse().map_err(|_| Error::PatternFile {
            path: path.into(),
            row: row_no,
            msg: format!("bad number '{s}'"),
        })?;
    }
    Ok(Row {
        freq: vals[0],
        theta_deg: vals[1],
        phi_deg: vals[2],
        e_theta: Complex64::new(vals[3], vals[4]),
        e_phi: Complex64::new(vals[5], vals[6]),
    })
}

/// Read a per-port pattern file; returns one pattern per frequency group.
pub fn read(path: &Path) -> Result<Vec<VectorPattern>> {
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    read_str(&text, &name)
}

pub fn read_str(text: &str, name: &str) -> Result<Vec<VectorPattern>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        Some((_, h)) => {
            return Err(Error::PatternFile {
                path: name.into(),
                row: 1,
                msg: format!("bad header '{h}'"),
            })
        }
        None => {
            return Err(Error::PatternFile {
                path: name.into(),
                row: 1,
                msg: "empty file".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        rows.push((idx + 1, parse_row(name, idx + 1, line)?));
    }
    if rows.is_empty() {
        return Err(Error::PatternFile {
            path: name.into(),
            row: 1,
            msg: "no data rows".into(),
        });
    }

    // split into frequency groups, preserving order
    let mut groups: Vec<(f64, Vec<(usize, Row)>)> = Vec::new();
    for (row_no, row) in rows {
        match groups.last_mut() {
            Some((f, g)) if *f == row.freq => g.push((row_no, row)),
            _ => groups.push((row.freq, vec![(row_no, row)])),
        }
    }

    // infer grid dimensions from the first group's phi run length
    let first = &groups[0].1;
    let n_phi = first
        .iter()
        .take_while(|(_, r)| r.theta_deg == first[0].1.theta_deg)
        .count();
    if n_phi == 0 || first.len() % n_phi != 0 {
        return Err(Error::PatternFile {
            path: name.into(),
            row: first[0].0,
            msg: format!(
                "rows per frequency ({}) is not a multiple of the phi count ({n_phi}); \
                 a phi row is missing or duplicated",
                first.len()
            ),
        });
    }
    let n_theta = first.len() / n_phi;
    let grid = make_grid(n_theta, n_phi).map_err(|e| Error::PatternFile {
        path: name.into(),
        row: first[0].0,
        msg: format!("cannot rebuild a {n_theta}x{n_phi} quadrature grid: {e}"),
    })?;

    let mut patterns = Vec::new();
    for (freq, group) in &groups {
        if group.len() != grid.len() {
            return Err(Error::PatternFile {
                path: name.into(),
                row: group[0].0,
                msg: format!(
                    "frequency group at {freq} Hz has {} rows, expected {}",
                    group.len(),
                    grid.len()
                ),
            });
        }
        let mut e_theta = Vec::with_capacity(grid.len());
        let mut e_phi = Vec::with_capacity(grid.len());
        for (k, (row_no, row)) in group.iter().enumerate() {
            let it = k / n_phi;
            let ip = k % n_phi;
            let want_t = grid.theta(it).to_degrees();
            let want_p = grid.phi(ip).to_degrees();
            if (row.theta_deg - want_t).abs() > 1e-6 || (row.phi_deg - want_p).abs() > 1e-6 {
                return Err(Error::PatternFile {
                    path: name.into(),
                    row: *row_no,
                    msg: format!(
                        "node ({}, {}) deg does not lie on the standard {n_theta}x{n_phi} \
                         quadrature grid (expected ({want_t:.9}, {want_p:.9}))",
                        row.theta_deg, row.phi_deg
                    ),
                });
            }
            e_theta.push(row.e_theta);
            e_phi.push(row.e_phi);
        }
        patterns.push(
            VectorPattern::new(Arc::clone(&grid), *freq, e_theta, e_phi).map_err(|e| {
                Error::PatternFile {
                    path: name.into(),
                    row: group[0].0,
                    msg: e.to_string(),
                }
            })?,
        );
    }
    Ok(patterns)
}

/// Shared grid of a set of per-port pattern lists, with congruence checks.
pub fn common_grid(per_port: &[Vec<VectorPattern>]) -> Result<Arc<SphericalGrid>> {
    let first = per_port
        .first()
        .and_then(|v| v.first())
        .ok_or(Error::EmptyInput("no patterns"))?;
    for port in per_port {
        for p in port {
            if !(Arc::ptr_eq(p.grid(), first.grid()) || p.grid() == first.grid()) {
                return Err(Error::ImportInconsistent(
                    "pattern files use different grids".into(),
                ));
            }
        }
    }
    Ok(Arc::clone(first.grid()))
}
