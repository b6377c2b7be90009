//! CSV, JSON and OBJ writers and atomic file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// Scientific notation with 17 significant digits; every double round-trips.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a header row; every cell printed with [`num`].
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| num(*x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Triangulated structured grid of `m1 x m2` vertices (row-major, second
/// index fastest). `wrap` closes both directions, giving a torus.
pub fn obj(vertices: &[[f64; 3]], m1: usize, m2: usize, wrap: bool) -> String {
    let mut out = String::new();
    for v in vertices {
        let _ = writeln!(out, "v {} {} {}", num(v[0]), num(v[1]), num(v[2]));
    }
    let id = |i: usize, j: usize| (i % m1) * m2 + (j % m2) + 1;
    let (n1, n2) = if wrap { (m1, m2) } else { (m1.saturating_sub(1), m2.saturating_sub(1)) };
    for i in 0..n1 {
        for j in 0..n2 {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            let _ = writeln!(out, "f {a} {b} {c}");
            let _ = writeln!(out, "f {a} {c} {d}");
        }
    }
    out
}

/// Writes `content` to `path` through a temporary file in the same
/// directory, so that a failed run leaves no partial file.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(content.as_bytes()).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
