//! Field files, generated fields and the run directory with its manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use tfsource_core::torus::{analyze, synthesize, SpectralField, TorusGrid};
use tfsource_core::Complex64;

use crate::config::{FieldSpec, ProblemConfig};

const AXES: [&str; 3] = ["1", "2", "3"];

pub fn coefficients_csv(field: &SpectralField) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = AXES[..field.dim()].iter().map(|a| format!("n{a}")).collect();
    header.extend(["re".into(), "im".into()]);
    w.write_record(&header)?;
    for (n, h) in field.frequencies().zip(field.coeffs()) {
        let mut row: Vec<String> = n.iter().map(|k| k.to_string()).collect();
        row.push(h.re.to_string());
        row.push(h.im.to_string());
        w.write_record(&row)?;
    }
    Ok(w.into_inner()?)
}

/// Real part of the field on the `points^N` grid; the imaginary part is
/// written only when it is not negligible.
pub fn grid_csv(field: &SpectralField, points: usize) -> Result<Vec<u8>> {
    let grid = synthesize(field, points)?;
    let complex = grid.max_imag() > 1e-12 * (1.0 + field.l2_norm());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = AXES[..field.dim()].iter().map(|a| format!("x{a}")).collect();
    header.push("value".into());
    if complex {
        header.push("value_im".into());
    }
    w.write_record(&header)?;
    for (x, v) in grid.coordinates().zip(grid.values()) {
        let mut row: Vec<String> = x.iter().map(|c| c.to_string()).collect();
        row.push(v.re.to_string());
        if complex {
            row.push(v.im.to_string());
        }
        w.write_record(&row)?;
    }
    Ok(w.into_inner()?)
}

fn read_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad number {s:?} in {}", path.display())))
            .collect::<Result<Vec<f64>>>()?;
        ensure!(row.len() == header.len(), "ragged row in {}", path.display());
        rows.push(row);
    }
    Ok((header, rows))
}

/// Reads `n1,..,nN,re,im`; modes beyond `cutoff` must vanish.
pub fn read_coefficients(path: &Path, dim: usize, cutoff: usize) -> Result<SpectralField> {
    let (header, rows) = read_rows(path)?;
    ensure!(header.len() == dim + 2, "{} has {} columns, expected {}", path.display(), header.len(), dim + 2);
    let mut field = SpectralField::zeros(dim, cutoff)?;
    for row in rows {
        let n: Vec<i64> = row[..dim].iter().map(|&v| v as i64).collect();
        let value = Complex64::new(row[dim], row[dim + 1]);
        if n.iter().any(|k| k.unsigned_abs() as usize > cutoff) {
            ensure!(value.norm() == 0.0, "{} has a nonzero coefficient at {n:?} beyond cutoff {cutoff}", path.display());
            continue;
        }
        field.set(&n, value)?;
    }
    Ok(field)
}

/// Reads `x1,..,xN,value[,value_im]` on a uniform grid in row-major order.
pub fn read_grid(path: &Path, dim: usize, cutoff: usize) -> Result<SpectralField> {
    let (header, rows) = read_rows(path)?;
    ensure!(
        header.len() == dim + 1 || header.len() == dim + 2,
        "{} has {} columns for a grid on T^{dim}",
        path.display(),
        header.len()
    );
    let points = (rows.len() as f64).powf(1.0 / dim as f64).round() as usize;
    ensure!(points.pow(dim as u32) == rows.len(), "{} does not hold a full grid", path.display());
    let values: Vec<Complex64> =
        rows.iter().map(|r| Complex64::new(r[dim], if header.len() == dim + 2 { r[dim + 1] } else { 0.0 })).collect();
    Ok(analyze(&TorusGrid::new(dim, points, values)?, cutoff)?)
}

/// Real random field: `h_{-n} = conj(h_n)`, `|h_n| <= amplitude (1+|n|^2)^{-decay/2}`.
pub fn random_field(dim: usize, cutoff: usize, amplitude: f64, decay: f64, seed: u64) -> Result<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = SpectralField::zeros(dim, cutoff)?;
    let freqs: Vec<Vec<i64>> = field.frequencies().collect();
    for n in freqs {
        let neg: Vec<i64> = n.iter().map(|k| -k).collect();
        if n > neg {
            continue;
        }
        let r2: i64 = n.iter().map(|k| k * k).sum();
        let scale = amplitude * (1.0 + r2 as f64).powf(-decay / 2.0);
        let re = scale * rng.gen_range(-1.0..1.0);
        let im = if n == neg { 0.0 } else { scale * rng.gen_range(-1.0..1.0) };
        field.set(&n, Complex64::new(re, im))?;
        field.set(&neg, Complex64::new(re, -im))?;
    }
    Ok(field)
}

pub fn build_field(spec: &FieldSpec, cfg: &ProblemConfig, salt: u64) -> Result<SpectralField> {
    let (dim, cutoff) = (cfg.symbol.dim(), cfg.cutoff);
    match spec {
        FieldSpec::Zero => Ok(SpectralField::zeros(dim, cutoff)?),
        FieldSpec::Random { amplitude, decay, seed } => {
            random_field(dim, cutoff, *amplitude, *decay, cfg.field_seed(*seed, salt))
        }
        FieldSpec::Modes { values } => {
            let mut field = SpectralField::zeros(dim, cutoff)?;
            for v in values {
                ensure!(v.n.len() == dim, "mode {:?} in dimension {dim}", v.n);
                field.set(&v.n, Complex64::new(v.re, v.im)).with_context(|| format!("mode {:?}", v.n))?;
            }
            Ok(field)
        }
        FieldSpec::Coefficients { path } => read_coefficients(path, dim, cutoff),
        FieldSpec::Grid { path } => read_grid(path, dim, cutoff),
    }
}

#[derive(Debug, Serialize)]
struct Artifact {
    bytes: usize,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    core_version: &'a str,
    command: &'a str,
    schema: &'a str,
    config_sha256: String,
    seed: Option<u64>,
    artifacts: &'a BTreeMap<String, Artifact>,
}

/// A run directory; every file written through it is listed with its hash in
/// `manifest.json`.
pub struct RunDir {
    root: PathBuf,
    artifacts: BTreeMap<String, Artifact>,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self { root: root.to_path_buf(), artifacts: BTreeMap::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        if name.contains("..") || Path::new(name).is_absolute() {
            bail!("artifact name {name:?} escapes the run directory");
        }
        let path = self.root.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.artifacts
            .insert(name.to_owned(), Artifact { bytes: bytes.len(), sha256: format!("{:x}", Sha256::digest(bytes)) });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn finish(self, command: &str, cfg: &ProblemConfig) -> Result<()> {
        let manifest = Manifest {
            tool: "tfsource",
            version: env!("CARGO_PKG_VERSION"),
            core_version: tfsource_core::VERSION,
            command,
            schema: crate::config::SCHEMA,
            config_sha256: cfg.sha256()?,
            seed: cfg.seed,
            artifacts: &self.artifacts,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(self.root.join("manifest.json"), text)?;
        Ok(())
    }
}
