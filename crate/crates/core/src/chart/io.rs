//! Field files: a JSON manifest `<base>.json` next to a raw little-endian
//! f64 blob `<base>.bin` in node-major, coefficient-minor order.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::form::FormField;
use super::grid::ChartGrid;
use super::map::MapField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Spacing {
    Uniform(f64),
    PerAxis(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DegreeTag {
    Form(usize),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub dim: usize,
    pub shape: Vec<usize>,
    pub spacing: Spacing,
    pub origin: Vec<f64>,
    /// Form degree, `"metric"`, or absent for map fields.
    pub degree: Option<DegreeTag>,
    pub target_dim: Option<usize>,
}

impl Manifest {
    pub fn for_grid(grid: &ChartGrid, degree: Option<DegreeTag>, target_dim: Option<usize>) -> Self {
        let spacing = match grid.uniform_spacing() {
            Some(h) => Spacing::Uniform(h),
            None => Spacing::PerAxis(grid.spacing().to_vec()),
        };
        Self { dim: grid.dim(), shape: grid.shape().to_vec(), spacing, origin: grid.origin().to_vec(), degree, target_dim }
    }

    pub fn grid(&self) -> Result<Arc<ChartGrid>> {
        if self.shape.len() != self.dim {
            return Err(Error::InvalidGrid("manifest shape length differs from dim".into()));
        }
        let spacing = match &self.spacing {
            Spacing::Uniform(h) => vec![*h; self.dim],
            Spacing::PerAxis(v) => v.clone(),
        };
        ChartGrid::new(self.origin.clone(), spacing, self.shape.clone())
    }
}

fn paths(base: &Path) -> (PathBuf, PathBuf) {
    (base.with_extension("json"), base.with_extension("bin"))
}

pub fn write_raw(base: &Path, manifest: &Manifest, data: &[f64]) -> Result<()> {
    let (mpath, bpath) = paths(base);
    fs::write(mpath, serde_json::to_string_pretty(manifest)?)?;
    let mut bytes = Vec::with_capacity(data.len() * 8);
    for v in data {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(bpath, bytes)?;
    Ok(())
}

pub fn read_raw(base: &Path) -> Result<(Manifest, Vec<f64>)> {
    let (mpath, bpath) = paths(base);
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(mpath)?)?;
    let bytes = fs::read(bpath)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::InvalidField("blob length is not a multiple of 8".into()));
    }
    let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((manifest, data))
}

pub fn write_form(base: &Path, f: &FormField) -> Result<()> {
    let m = Manifest::for_grid(f.grid(), Some(DegreeTag::Form(f.degree())), None);
    write_raw(base, &m, f.coeffs())
}

pub fn read_form(base: &Path) -> Result<FormField> {
    let (m, data) = read_raw(base)?;
    let degree = match m.degree {
        Some(DegreeTag::Form(k)) => k,
        _ => return Err(Error::InvalidField("manifest does not describe a form".into())),
    };
    FormField::new(&m.grid()?, degree, data)
}

pub fn write_map(base: &Path, f: &MapField) -> Result<()> {
    let m = Manifest::for_grid(f.grid(), None, Some(f.target_dim()));
    write_raw(base, &m, f.values())
}

pub fn read_map(base: &Path) -> Result<MapField> {
    let (m, data) = read_raw(base)?;
    let t = m.target_dim.ok_or_else(|| Error::InvalidField("manifest lacks target_dim".into()))?;
    MapField::new(&m.grid()?, t, data)
}
