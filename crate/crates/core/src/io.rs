//! CSV and JSON sidecar formats for samples, curvature fields and reports.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), which
//! round-trips exactly and makes identical inputs give identical bytes.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::homogeneous::{SeededSampler, Subspace};
use crate::pinching::CurvatureField;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A float with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

/// A header row and string cells, written as RFC 4180 CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads a CSV with a header row. Lines starting with `#` are skipped.
    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let header = rd.headers()?.iter().map(str::to_string).collect();
        let rows = rd
            .records()
            .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
        Ok(Self { header, rows })
    }
}

fn parse_num(cell: &str, row: usize, col: &str) -> Result<f64> {
    cell.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("row {row}, column {col}: '{cell}' is not a number")))
}

/// Sidecar `<prefix>.csv` and `<prefix>.manifest.json` paths.
pub fn sidecar_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let base = prefix.as_os_str().to_string_lossy();
    (
        PathBuf::from(format!("{base}.csv")),
        PathBuf::from(format!("{base}.manifest.json")),
    )
}

/// Writes a CSV and its JSON manifest next to each other. The manifest is
/// written even if it is the CSV that fails, so no artifact is orphaned.
pub fn write_with_manifest<M: Serialize>(prefix: &Path, table: &Table, manifest: &M) -> Result<()> {
    let (csv_path, manifest_path) = sidecar_paths(prefix);
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let csv_text = table.to_csv_string()?;
    let manifest_text = serde_json::to_string_pretty(manifest)? + "\n";
    std::fs::write(&manifest_path, manifest_text)?;
    std::fs::write(&csv_path, csv_text)?;
    Ok(())
}

/// Seeds and shape of a sample dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleManifest {
    pub space: String,
    pub dim: usize,
    pub ambient_dim: usize,
    pub count: usize,
    pub seed: u64,
    pub stream_id: u64,
    pub chunk_size: usize,
    pub version: String,
}

impl SampleManifest {
    pub fn new(
        space: &str,
        dim: usize,
        ambient_dim: usize,
        count: usize,
        sampler: &SeededSampler,
    ) -> Self {
        Self {
            space: space.to_string(),
            dim,
            ambient_dim,
            count,
            seed: sampler.seed,
            stream_id: sampler.stream_id,
            chunk_size: crate::homogeneous::CHUNK_SIZE,
            version: VERSION.to_string(),
        }
    }
}

/// One row per sample, columns `x0 … x{d−1}`, preceded by a
/// `# space=… dim=… ambient=… count=…` comment line.
pub fn sample_dump_table(rows: &[Vec<f64>]) -> Table {
    let width = rows.first().map_or(0, Vec::len);
    let mut t = Table::new((0..width).map(|i| format!("x{i}")));
    for r in rows {
        t.push(r.iter().map(|&x| fmt_num(x)).collect());
    }
    t
}

pub fn write_sample_dump<W: Write>(
    mut w: W,
    rows: &[Vec<f64>],
    manifest: &SampleManifest,
) -> Result<()> {
    if rows.iter().any(|r| r.len() != manifest.ambient_dim) {
        return Err(Error::DimensionMismatch(format!(
            "sample rows must have {} coordinates",
            manifest.ambient_dim
        )));
    }
    writeln!(
        w,
        "# space={} dim={} ambient={} count={}",
        manifest.space,
        manifest.dim,
        manifest.ambient_dim,
        rows.len()
    )?;
    sample_dump_table(rows).write_to(w)
}

/// Parses a sample dump back into coordinate rows.
pub fn read_sample_dump<R: Read>(r: R) -> Result<Vec<Vec<f64>>> {
    let t = Table::read_from(r)?;
    t.rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .zip(&t.header)
                .map(|(cell, col)| parse_num(cell, i + 1, col))
                .collect()
        })
        .collect()
}

/// Provenance of a curvature field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FieldManifest {
    pub n: usize,
    pub count: usize,
    pub generator: String,
    pub seed: u64,
}

/// Field rows: the two frame columns `a0 … a{n−1}`, `b0 … b{n−1}` of each
/// plane followed by `value`.
pub fn field_table(field: &CurvatureField) -> Result<Table> {
    let n = field
        .ambient_dim()
        .ok_or_else(|| Error::InvalidInput("cannot tabulate an empty field".into()))?;
    let header = (0..n)
        .map(|i| format!("a{i}"))
        .chain((0..n).map(|i| format!("b{i}")))
        .chain(std::iter::once("value".to_string()));
    let mut t = Table::new(header);
    for (plane, &v) in field.planes().iter().zip(field.values()) {
        let frame = plane.frame();
        let mut row: Vec<String> = (0..2)
            .flat_map(|j| (0..n).map(move |i| (i, j)))
            .map(|(i, j)| fmt_num(frame[(i, j)]))
            .collect();
        row.push(fmt_num(v));
        t.push(row);
    }
    Ok(t)
}

/// Reads a field CSV and checks it against its manifest.
pub fn read_field<R: Read>(r: R, manifest: &FieldManifest) -> Result<CurvatureField> {
    let t = Table::read_from(r)?;
    let n = manifest.n;
    let expected: Vec<String> = (0..n)
        .map(|i| format!("a{i}"))
        .chain((0..n).map(|i| format!("b{i}")))
        .chain(std::iter::once("value".to_string()))
        .collect();
    if t.header != expected {
        return Err(Error::DimensionMismatch(format!(
            "field header does not match n = {n}: expected a0..a{m}, b0..b{m}, value",
            m = n.saturating_sub(1)
        )));
    }
    if t.rows.len() != manifest.count {
        return invalid(format!(
            "manifest promises {} planes, CSV has {}",
            manifest.count,
            t.rows.len()
        ));
    }
    let mut planes = Vec::with_capacity(t.rows.len());
    let mut values = Vec::with_capacity(t.rows.len());
    for (i, row) in t.rows.iter().enumerate() {
        let nums = row
            .iter()
            .zip(&t.header)
            .map(|(c, h)| parse_num(c, i + 1, h))
            .collect::<Result<Vec<f64>>>()?;
        let frame = DMatrix::from_column_slice(n, 2, &nums[..2 * n]);
        planes.push(
            Subspace::from_frame(frame)
                .map_err(|e| Error::InvalidInput(format!("row {}: {e}", i + 1)))?,
        );
        values.push(nums[2 * n]);
    }
    CurvatureField::new(planes, values)
}

pub fn write_field(prefix: &Path, field: &CurvatureField, manifest: &FieldManifest) -> Result<()> {
    write_with_manifest(prefix, &field_table(field)?, manifest)
}

/// Loads `<prefix>.csv` with `<prefix>.manifest.json`.
pub fn load_field(prefix: &Path) -> Result<(CurvatureField, FieldManifest)> {
    let (csv_path, manifest_path) = sidecar_paths(prefix);
    let manifest: FieldManifest = serde_json::from_str(&std::fs::read_to_string(manifest_path)?)?;
    let field = read_field(std::fs::File::open(csv_path)?, &manifest)?;
    Ok((field, manifest))
}
