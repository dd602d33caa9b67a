//! Field files, CSV exports, dataset manifests and run reports.
//!
//! The `f64grid` format is a 32-byte little-endian header
//! (`b"WDSF"`, `u32` version, `u64` nx, `u64` ny, `u32` component count,
//! `u32` reserved) followed by the component planes, each row-major with
//! `x` fastest, as little-endian `f64`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::{ConservedState, GasModel};
use crate::grid::StateField;
use crate::metrics::{self, VARIABLES};
use crate::riemann::RiemannSpec;
use crate::solver::SchemeConfig;

pub const MAGIC: [u8; 4] = *b"WDSF";
pub const GRID_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFile {
    pub nx: usize,
    pub ny: usize,
    pub components: Vec<Vec<f64>>,
}

impl GridFile {
    pub fn new(nx: usize, ny: usize, components: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(c) = components.iter().find(|c| c.len() != nx * ny) {
            return Err(Error::ShapeMismatch(format!(
                "component has {} values, grid is {nx}x{ny}",
                c.len()
            )));
        }
        Ok(Self { nx, ny, components })
    }

    /// Conserved components of a state field.
    pub fn from_state_field(field: &StateField) -> Self {
        Self {
            nx: field.nx,
            ny: field.ny,
            components: (0..4).map(|c| field.component(c)).collect(),
        }
    }

    pub fn to_state_field(&self) -> Result<StateField> {
        if self.components.len() != 4 {
            return Err(Error::ShapeMismatch(format!(
                "expected 4 conserved components, found {}",
                self.components.len()
            )));
        }
        let data = (0..self.nx * self.ny)
            .map(|k| ConservedState(std::array::from_fn(|c| self.components[c][k])))
            .collect();
        Ok(StateField {
            nx: self.nx,
            ny: self.ny,
            data,
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.nx * self.ny * self.components.len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&GRID_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.nx as u64).to_le_bytes());
        out.extend_from_slice(&(self.ny as u64).to_le_bytes());
        out.extend_from_slice(&(self.components.len() as u32).to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        for plane in &self.components {
            for v in plane {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn decode(bytes: &[u8], path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::FieldFormat {
            path: path.to_path_buf(),
            reason,
        };
        if bytes.len() < HEADER_LEN {
            return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if bytes[0..4] != MAGIC {
            return Err(bad("bad magic".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let version = u32_at(4);
        if version != GRID_VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let (nx, ny, nc) = (u64_at(8) as usize, u64_at(16) as usize, u32_at(24) as usize);
        let expected = nx
            .checked_mul(ny)
            .and_then(|n| n.checked_mul(nc))
            .and_then(|n| n.checked_mul(8))
            .and_then(|n| n.checked_add(HEADER_LEN));
        if expected != Some(bytes.len()) {
            return Err(bad(format!("{} bytes does not match a {nx}x{ny}x{nc} grid", bytes.len())));
        }
        let payload = &bytes[HEADER_LEN..];
        let components = payload
            .chunks_exact(8 * nx * ny)
            .map(|plane| {
                plane
                    .chunks_exact(8)
                    .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                    .collect()
            })
            .collect();
        Ok(Self { nx, ny, components })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.encode())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::decode(&fs::read(path)?, path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldFormat {
    F64grid,
    Csv,
}

/// `x,y,value` rows at the nodes `(i / nx, j / ny)`.
pub fn write_csv(path: impl AsRef<Path>, nx: usize, ny: usize, values: &[f64]) -> Result<()> {
    if values.len() != nx * ny {
        return Err(Error::ShapeMismatch(format!("{} values for a {nx}x{ny} grid", values.len())));
    }
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(out, "x,y,value")?;
    for j in 0..ny {
        for i in 0..nx {
            writeln!(out, "{},{},{}", i as f64 / nx as f64, j as f64 / ny as f64, values[j * nx + i])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Write one scalar field.
pub fn export_field(path: impl AsRef<Path>, nx: usize, ny: usize, values: &[f64], format: FieldFormat) -> Result<()> {
    match format {
        FieldFormat::F64grid => GridFile::new(nx, ny, vec![values.to_vec()])?.write(path),
        FieldFormat::Csv => write_csv(path, nx, ny, values),
    }
}

/// Pointwise `|a - b|`.
pub fn abs_error_field(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("{} vs {} values", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect())
}

/// Write `rho.f64grid`, `u.f64grid`, `v.f64grid`, `p.f64grid` into `dir`.
pub fn write_primitive_dir(dir: impl AsRef<Path>, field: &StateField, gas: &GasModel) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let planes = metrics::primitive_planes(field, gas)?;
    let mut paths = Vec::new();
    for (name, plane) in VARIABLES.iter().zip(planes) {
        let path = dir.join(format!("{name}.f64grid"));
        GridFile::new(field.nx, field.ny, vec![plane])?.write(&path)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Read the four primitive planes written by [`write_primitive_dir`].
pub fn read_primitive_dir(dir: impl AsRef<Path>) -> Result<(usize, usize, [Vec<f64>; 4])> {
    let dir = dir.as_ref();
    let mut shape = None;
    let mut planes: [Vec<f64>; 4] = Default::default();
    for (k, name) in VARIABLES.iter().enumerate() {
        let path = dir.join(format!("{name}.f64grid"));
        let mut g = GridFile::read(&path)?;
        if g.components.len() != 1 {
            return Err(Error::FieldFormat {
                path,
                reason: format!("expected 1 component, found {}", g.components.len()),
            });
        }
        match shape {
            None => shape = Some((g.nx, g.ny)),
            Some(s) if s != (g.nx, g.ny) => {
                return Err(Error::FieldFormat {
                    path,
                    reason: format!("grid {}x{} differs from {}x{}", g.nx, g.ny, s.0, s.1),
                })
            }
            _ => {}
        }
        planes[k] = g.components.pop().unwrap();
    }
    let (nx, ny) = shape.unwrap();
    Ok((nx, ny, planes))
}

/// Rebuild a conserved field from primitive planes.
pub fn primitive_planes_to_field(nx: usize, ny: usize, planes: &[Vec<f64>; 4], gas: &GasModel) -> Result<StateField> {
    let data = (0..nx * ny)
        .map(|k| {
            let w = crate::euler::PrimitiveState::new(planes[0][k], planes[1][k], planes[2][k], planes[3][k]);
            w.check_physical().map(|_| w.to_conserved(gas))
        })
        .collect::<Result<_>>()?;
    Ok(StateField { nx, ny, data })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub step: usize,
    pub time: f64,
    /// Conserved-variable `f64grid`, relative to the manifest directory.
    pub file: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemEntry {
    pub index: usize,
    pub spec: RiemannSpec,
    pub fine_grid: usize,
    pub steps: usize,
    pub snapshots: Vec<SnapshotEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub config: u8,
    pub seed: u64,
    pub count: usize,
    pub fine_grid: usize,
    pub problems: Vec<ProblemEntry>,
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        if self.count != self.problems.len() {
            return Err(Error::Config(format!(
                "manifest declares {} problems but stores {}",
                self.count,
                self.problems.len()
            )));
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_json(path, self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let m: Self = serde_json::from_str(&fs::read_to_string(path)?)?;
        m.validate()?;
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub spec: RiemannSpec,
    pub scheme: SchemeConfig,
    pub weights: Option<PathBuf>,
    pub nx: usize,
    pub ny: usize,
    pub steps: usize,
    pub final_time: f64,
    pub wall_seconds: f64,
    pub files: Vec<PathBuf>,
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_encoding() {
        let g = GridFile::new(1, 1, vec![vec![1.0]]).unwrap();
        let bytes = g.encode();
        assert_eq!(bytes.len(), 40);
        assert_eq!(&bytes[0..4], b"WDSF");
        assert_eq!(u64::from_le_bytes(bytes[32..40].try_into().unwrap()), 0x3FF0_0000_0000_0000);
    }

    #[test]
    fn truncated_file_rejected() {
        let g = GridFile::new(2, 3, vec![vec![0.5; 6]; 2]).unwrap();
        let bytes = g.encode();
        let p = Path::new("mem");
        assert!(matches!(GridFile::decode(&bytes[..bytes.len() - 1], p), Err(Error::FieldFormat { .. })));
        let mut wrong = bytes.clone();
        wrong[0] = b'X';
        assert!(GridFile::decode(&wrong, p).is_err());
        assert_eq!(GridFile::decode(&bytes, p).unwrap(), g);
    }

    #[test]
    fn csv_line_count() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        write_csv(&path, 2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert_eq!(text.lines().next().unwrap(), "x,y,value");
        assert_eq!(text.lines().nth(2).unwrap(), "0.5,0,2");
    }
}
