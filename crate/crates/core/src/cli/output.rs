//! Legacy VTK snapshots and the diagnostics CSV.
//!
//! Every number is written as `{:.16e}`, i.e. 17 significant digits, which
//! reads back to the identical `f64`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::constitutive::{self as law, MaterialParams};
use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::solver::State;

/// Column order of the diagnostics CSV.
pub const CSV_HEADER: &str = "step,t,total_mass,c_min,c_max,kinetic_energy,internal_energy,free_energy,lyapunov,entropy_production,constraint_residual,assumption_violation_fraction";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV row (no trailing newline). Absent entries are empty cells.
pub fn format_diagnostics_row(step: u64, r: &DiagnosticsRecord) -> String {
    let sigma = r.entropy_production.map(num).unwrap_or_default();
    format!(
        "{step},{},{},{},{},{},{},{},{},{sigma},{},{}",
        num(r.t),
        num(r.total_mass),
        num(r.c_min),
        num(r.c_max),
        num(r.kinetic_energy),
        num(r.internal_energy),
        num(r.free_energy),
        num(r.lyapunov),
        num(r.constraint_residual),
        num(r.assumption_violation_fraction),
    )
}

/// Writes one diagnostics row followed by a newline.
pub fn emit_diagnostics_row(step: u64, record: &DiagnosticsRecord, stream: &mut dyn Write) -> std::io::Result<()> {
    writeln!(stream, "{}", format_diagnostics_row(step, record))
}

/// Renders a state as legacy VTK ASCII structured points.
///
/// Points sit at cell centers. Scalars `c`, `theta` and the constitutive
/// pressure `p`, then vectors `v` and `q` padded with a zero third component.
pub fn snapshot_text(state: &State, params: &MaterialParams) -> String {
    let g = state.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let hx = g.h(0);
    let hy = if g.dim() == 2 { g.h(1) } else { hx };
    let oy = if g.dim() == 2 { 0.5 * hy } else { 0.0 };
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(out, "quasisep snapshot t = {}", num(state.t));
    out.push_str("ASCII\nDATASET STRUCTURED_POINTS\n");
    let _ = writeln!(out, "DIMENSIONS {nx} {ny} 1");
    let _ = writeln!(out, "SPACING {} {} {}", num(hx), num(hy), num(hx));
    let _ = writeln!(out, "ORIGIN {} {} {}", num(0.5 * hx), num(oy), num(0.0));
    let _ = writeln!(out, "POINT_DATA {}", g.cell_count());
    let pressure: Vec<f64> = state.c.values().iter().map(|&c| law::pressure(c, params)).collect();
    let scalars: [(&str, &[f64]); 3] = [("c", state.c.values()), ("theta", state.theta.values()), ("p", &pressure)];
    for (name, values) in scalars {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for &v in values {
            out.push_str(&num(v));
            out.push('\n');
        }
    }
    for (name, field) in [("v", &state.v), ("q", &state.q)] {
        let _ = writeln!(out, "VECTORS {name} double");
        for idx in 0..g.cell_count() {
            let [a, b, c] = field.at(idx);
            let _ = writeln!(out, "{} {} {}", num(a), num(b), num(c));
        }
    }
    out
}

pub fn emit_snapshot(state: &State, params: &MaterialParams, path: &Path) -> Result<()> {
    fs::write(path, snapshot_text(state, params)).map_err(|e| Error::io(path, e))
}

/// Contents of a snapshot file as read back.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub dimensions: [usize; 3],
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
    pub scalars: Vec<(String, Vec<f64>)>,
    pub vectors: Vec<(String, Vec<[f64; 3]>)>,
}

impl Snapshot {
    pub fn scalar(&self, name: &str) -> Option<&[f64]> {
        self.scalars.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn vector(&self, name: &str) -> Option<&[[f64; 3]]> {
        self.vectors.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

/// Reads a snapshot written by [`emit_snapshot`].
pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_snapshot(&text)
}

pub fn parse_snapshot(text: &str) -> Result<Snapshot> {
    let mut lines = text.lines().enumerate().peekable();
    let bad = |line: usize, msg: &str| Error::Parse {
        line: line + 1,
        msg: msg.to_string(),
    };
    let float = |line: usize, s: &str| s.parse::<f64>().map_err(|_| bad(line, "malformed number"));
    let triple_f = |line: usize, rest: &[&str]| -> Result<[f64; 3]> {
        if rest.len() != 3 {
            return Err(bad(line, "expected three numbers"));
        }
        Ok([float(line, rest[0])?, float(line, rest[1])?, float(line, rest[2])?])
    };

    let mut snap = Snapshot {
        t: f64::NAN,
        dimensions: [0; 3],
        spacing: [0.0; 3],
        origin: [0.0; 3],
        scalars: Vec::new(),
        vectors: Vec::new(),
    };
    let mut count = 0usize;
    while let Some((i, line)) = lines.next() {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.first().copied() {
            None => {}
            Some("quasisep") => {
                if let Some(t) = words.last() {
                    snap.t = float(i, t)?;
                }
            }
            Some("DIMENSIONS") => {
                if words.len() != 4 {
                    return Err(bad(i, "expected three dimensions"));
                }
                for k in 0..3 {
                    snap.dimensions[k] = words[k + 1].parse().map_err(|_| bad(i, "malformed dimension"))?;
                }
            }
            Some("SPACING") => snap.spacing = triple_f(i, &words[1..])?,
            Some("ORIGIN") => snap.origin = triple_f(i, &words[1..])?,
            Some("POINT_DATA") => {
                count = words
                    .get(1)
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| bad(i, "malformed POINT_DATA"))?;
            }
            Some("SCALARS") => {
                let name = words.get(1).ok_or_else(|| bad(i, "unnamed scalar"))?.to_string();
                match lines.next() {
                    Some((_, l)) if l.starts_with("LOOKUP_TABLE") => {}
                    _ => return Err(bad(i + 1, "expected LOOKUP_TABLE")),
                }
                let mut values = Vec::with_capacity(count);
                for _ in 0..count {
                    let (j, l) = lines.next().ok_or_else(|| bad(i, "truncated scalar block"))?;
                    values.push(float(j, l.trim())?);
                }
                snap.scalars.push((name, values));
            }
            Some("VECTORS") => {
                let name = words.get(1).ok_or_else(|| bad(i, "unnamed vector"))?.to_string();
                let mut values = Vec::with_capacity(count);
                for _ in 0..count {
                    let (j, l) = lines.next().ok_or_else(|| bad(i, "truncated vector block"))?;
                    let w: Vec<&str> = l.split_whitespace().collect();
                    values.push(triple_f(j, &w)?);
                }
                snap.vectors.push((name, values));
            }
            Some(_) => {}
        }
    }
    Ok(snap)
}
