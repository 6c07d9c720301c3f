//! CSV, snapshot and metadata output. Every file is written to a temporary
//! sibling and renamed into place, so readers never see partial output.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use tempfile::NamedTempFile;

use crate::grid::{Grid, WaveField};

/// Formats a float with 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `contents` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// In-memory CSV with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    columns: Vec<String>,
    body: String,
}

impl Csv {
    pub fn new(columns: &[&str]) -> Self {
        Csv {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            body: String::new(),
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        self.push_cells(&cells);
    }

    /// Row of preformatted cells; caller keeps numbers in [`fmt_f64`] form.
    pub fn push_cells(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns.len(), "row width does not match header");
        self.body.push_str(&cells.join(","));
        self.body.push('\n');
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.columns.join(","), self.body)
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

/// Snapshot text: a grid line, a time line, then `x,re_psi,im_psi` rows.
pub fn snapshot_string(field: &WaveField) -> String {
    let g = field.grid;
    let mut s = format!(
        "# grid x_min={} x_max={} n={}\n# t={}\n",
        fmt_f64(g.x_min()),
        fmt_f64(g.x_max()),
        g.n(),
        fmt_f64(field.t)
    );
    for (j, v) in field.values.iter().enumerate() {
        s.push_str(&format!("{},{},{}\n", fmt_f64(g.x(j)), fmt_f64(v.re), fmt_f64(v.im)));
    }
    s
}

pub fn write_snapshot(path: &Path, field: &WaveField) -> io::Result<()> {
    write_atomic(path, snapshot_string(field).as_bytes())
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

pub fn parse_snapshot(text: &str) -> io::Result<WaveField> {
    let mut lines = text.lines();
    let grid_line = lines.next().ok_or_else(|| invalid("missing grid line"))?;
    let time_line = lines.next().ok_or_else(|| invalid("missing time line"))?;
    let field_of = |line: &str, key: &str| -> io::Result<String> {
        line.split_whitespace()
            .find_map(|tok| tok.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
            .map(str::to_string)
            .ok_or_else(|| invalid(format!("header lacks `{key}=`: {line}")))
    };
    let num = |s: String| s.parse::<f64>().map_err(|e| invalid(format!("{s}: {e}")));
    if !grid_line.starts_with("# grid") || !time_line.starts_with("# t=") {
        return Err(invalid("not a snapshot file"));
    }
    let x_min = num(field_of(grid_line, "x_min")?)?;
    let x_max = num(field_of(grid_line, "x_max")?)?;
    let n: usize = field_of(grid_line, "n")?
        .parse()
        .map_err(|e| invalid(format!("n: {e}")))?;
    let t = num(time_line["# t=".len()..].trim().to_string())?;
    let grid = Grid::new(x_min, x_max, n).map_err(|e| invalid(e.to_string()))?;
    let mut values = Vec::with_capacity(n);
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(invalid(format!("expected 3 columns: {line}")));
        }
        values.push(Complex64::new(num(cols[1].into())?, num(cols[2].into())?));
    }
    if values.len() != n {
        return Err(invalid(format!("expected {n} rows, found {}", values.len())));
    }
    WaveField::new(grid, values, t).map_err(|e| invalid(e.to_string()))
}

pub fn read_snapshot(path: &Path) -> io::Result<WaveField> {
    parse_snapshot(&fs::read_to_string(path)?)
}

/// Writes `metadata.json` beside a run's CSV output.
pub fn write_metadata(dir: &Path, meta: &serde_json::Value) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(meta).map_err(io::Error::other)?;
    text.push('\n');
    write_atomic(&dir.join("metadata.json"), text.as_bytes())
}
