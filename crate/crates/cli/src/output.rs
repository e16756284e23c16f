use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CommandKind, Config};

/// Collects the files a command writes into its output directory and finishes
/// with a `run.json` manifest holding the resolved config.
pub struct Artifacts {
    dir: PathBuf,
    cmd: CommandKind,
    provenance: String,
    files: Vec<String>,
}

impl Artifacts {
    pub fn create(dir: &Path, cmd: CommandKind, config: &Config) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let provenance = format!(
            "torusops {} {} {}",
            env!("CARGO_PKG_VERSION"),
            cmd.name(),
            serde_json::to_string(config)?
        );
        Ok(Self {
            dir: dir.to_path_buf(),
            cmd,
            provenance,
            files: Vec::new(),
        })
    }

    /// Comment line embedded in every PGM.
    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn text(&mut self, name: &str, content: &str) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.text(name, &text)
    }

    /// Writes the field as PGM; returns whether it was constant.
    pub fn pgm(&mut self, name: &str, field: &DMatrix<f64>) -> anyhow::Result<bool> {
        let mut comments = vec![self.provenance.clone()];
        let (levels, constant) = torusops::field::gray_levels(field);
        if constant {
            comments.push("constant field".to_string());
        }
        self.text(name, &torusops::field::levels_to_pgm(&levels, &comments))?;
        Ok(constant)
    }

    pub fn finish(mut self, config: &Config, summary: Value) -> anyhow::Result<Value> {
        let mut files = self.files.clone();
        files.push("run.json".to_string());
        let manifest = json!({
            "command": self.cmd.name(),
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "outputs": files,
            "summary": summary,
        });
        self.json("run.json", &manifest)?;
        Ok(manifest)
    }
}

/// Histogram CSV: `q_index,p_index,count`.
pub fn counts_csv(field: &DMatrix<f64>) -> String {
    let mut out = String::from("q_index,p_index,count\n");
    for iq in 0..field.nrows() {
        for ip in 0..field.ncols() {
            let _ = writeln!(out, "{iq},{ip},{}", field[(iq, ip)]);
        }
    }
    out
}

/// Reads a grid CSV written by this tool: a histogram (`count` column) or a
/// Husimi field (`value` column).
pub fn read_field_csv(path: &Path) -> anyhow::Result<DMatrix<f64>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let (Some(qi), Some(pi)) = (find("q_index"), find("p_index")) else {
        bail!("{}: missing q_index/p_index columns", path.display());
    };
    let Some(vi) = find("value").or_else(|| find("count")) else {
        bail!("{}: no value or count column", path.display());
    };
    let mut cells = Vec::new();
    for record in reader.records() {
        let record = record?;
        let q: usize = record[qi].parse()?;
        let p: usize = record[pi].parse()?;
        let v: f64 = record[vi].parse()?;
        cells.push((q, p, v));
    }
    let nq = cells.iter().map(|c| c.0 + 1).max().unwrap_or(0);
    let np = cells.iter().map(|c| c.1 + 1).max().unwrap_or(0);
    if cells.len() != nq * np {
        bail!(
            "{}: {} cells do not fill a {nq}x{np} grid",
            path.display(),
            cells.len()
        );
    }
    let mut field = DMatrix::from_element(nq, np, f64::NAN);
    for (q, p, v) in cells {
        field[(q, p)] = v;
    }
    if field.iter().any(|v| v.is_nan()) {
        bail!("{}: repeated cells", path.display());
    }
    Ok(field)
}

/// Tiles fields into one image, each tile scaled on its own, separated by
/// white gutters. `tiles[row][col]`, first row at the top.
pub fn panel(tiles: &[Vec<DMatrix<f64>>], gutter: usize) -> DMatrix<u8> {
    let rows = tiles.len();
    let cols = tiles.iter().map(Vec::len).max().unwrap_or(0);
    let (nq, np) = tiles
        .first()
        .and_then(|r| r.first())
        .map(|f| f.shape())
        .unwrap_or((0, 0));
    let width = cols * nq + cols.saturating_sub(1) * gutter;
    let height = rows * np + rows.saturating_sub(1) * gutter;
    let mut out = DMatrix::from_element(width, height, 255u8);
    for (r, row) in tiles.iter().enumerate() {
        // y grows upward in the field convention
        let y0 = height - (r + 1) * np - r * gutter;
        for (c, tile) in row.iter().enumerate() {
            let x0 = c * (nq + gutter);
            let (levels, _) = torusops::field::gray_levels(tile);
            out.view_mut((x0, y0), (nq, np)).copy_from(&levels);
        }
    }
    out
}
