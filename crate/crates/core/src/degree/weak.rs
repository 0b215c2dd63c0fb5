use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::brouwer::{degree_field, DegreeOptions};
use super::sphere_grid::SphereCellGrid;
use crate::chart::{CellSet, ChartGrid, MapField};
use crate::error::{Error, Result};
use crate::geometry::{gauss_map, GeometryOptions};
use crate::mollify::{mollify_field, MollifierKernel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakRow {
    pub eps: f64,
    /// ∫ φ · deg(ν_ε, region, ·) over regular targets.
    pub pairing: f64,
    pub excluded_area: f64,
    /// |pairing − pairing at the previous (larger) ε|.
    pub difference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakConvergenceTable {
    pub kernel: MollifierKernel,
    pub rows: Vec<WeakRow>,
    /// Successive differences strictly decrease as ε decreases.
    pub monotone: bool,
}

/// Sub-box of nodes lo[a] .. lo[a] + shape[a] as a chart of its own.
fn window(field: &MapField, lo: &[usize], shape: &[usize]) -> Result<MapField> {
    let g = field.grid();
    let origin: Vec<f64> = (0..g.dim()).map(|a| g.origin()[a] + lo[a] as f64 * g.spacing()[a]).collect();
    let sub = ChartGrid::new(origin, g.spacing().to_vec(), shape.to_vec())?;
    let m = field.target_dim();
    let mut values = Vec::with_capacity(sub.node_count() * m);
    for node in 0..sub.node_count() {
        let idx: Vec<usize> = (0..g.dim()).map(|a| sub.axis_index(node, a) + lo[a]).collect();
        values.extend_from_slice(field.at(g.node_index(&idx)));
    }
    MapField::new(&sub, m, values)
}

fn transfer(region: &CellSet, sub: &Arc<ChartGrid>, lo: &[usize]) -> Result<CellSet> {
    let g = region.grid();
    let mut mask = vec![false; sub.cell_count()];
    let cell_shape = sub.cell_shape();
    for c in region.cells() {
        let m = g.cell_multi(c);
        let idx: Option<Vec<usize>> = (0..g.dim())
            .map(|a| m[a].checked_sub(lo[a]).filter(|&i| i < cell_shape[a]))
            .collect();
        match idx {
            Some(idx) => mask[sub.cell_index(&idx)] = true,
            None => return Err(Error::InvalidParameter("region reaches into the mollification margin".into())),
        }
    }
    Ok(CellSet::from_mask(sub, mask))
}

/// Pairings ∫ φ · deg(ν_ε) for the Gauss maps of mollified immersions,
/// largest ε first.
pub fn weak_convergence_experiment(
    y: &MapField,
    region: &CellSet,
    eps_list: &[f64],
    kernel: MollifierKernel,
    phi: &(dyn Fn(&[f64]) -> f64 + Sync),
    cells: &SphereCellGrid,
    opts: &DegreeOptions,
) -> Result<WeakConvergenceTable> {
    let g = y.grid();
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| b.total_cmp(a));
    let eps_max = *eps_sorted.first().ok_or_else(|| Error::InvalidParameter("empty ε list".into()))?;
    // nodes valid for the largest ε, plus room for the derivative stencils
    let margin: Vec<usize> = g.spacing().iter().map(|h| (eps_max / h).floor() as usize + 1).collect();
    let lo = margin.clone();
    let shape: Vec<usize> = (0..g.dim()).map(|a| g.shape()[a].saturating_sub(2 * margin[a])).collect();
    if shape.iter().any(|&s| s < 5) {
        return Err(Error::InvalidParameter("chart too small for the largest ε".into()));
    }
    let geo = GeometryOptions::default();
    let mut rows: Vec<WeakRow> = Vec::with_capacity(eps_sorted.len());
    for &eps in &eps_sorted {
        let mollified = mollify_field(y, kernel, eps)?;
        let sub = window(&mollified.field, &lo, &shape)?;
        let sub_region = transfer(region, sub.grid(), &lo)?;
        let nu = gauss_map(&sub, &geo)?;
        let report = degree_field(&nu, &sub_region, cells, opts)?;
        let pairing = report.pair(phi);
        let difference = rows.last().map(|r| (pairing - r.pairing).abs());
        rows.push(WeakRow { eps, pairing, excluded_area: report.excluded_area, difference });
    }
    let diffs: Vec<f64> = rows.iter().filter_map(|r| r.difference).collect();
    let monotone = diffs.windows(2).all(|w| w[1] < w[0]);
    Ok(WeakConvergenceTable { kernel, rows, monotone })
}
