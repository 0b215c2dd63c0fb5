use std::sync::Arc;

use crate::error::{Error, Result};

/// Number of node layers at each chart edge excluded from `interior_mask`.
pub const STENCIL_RADIUS: usize = 2;

/// Rectangular sample lattice over a chart. Nodes are stored in C order
/// (last axis fastest).
#[derive(Debug, Clone)]
pub struct ChartGrid {
    dim: usize,
    origin: Vec<f64>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    cell_strides: Vec<usize>,
    interior_mask: Vec<bool>,
}

impl PartialEq for ChartGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.shape == other.shape
            && self.origin == other.origin
            && self.spacing == other.spacing
    }
}

fn c_strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for a in (0..shape.len().saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * shape[a + 1];
    }
    strides
}

impl ChartGrid {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>) -> Result<Arc<Self>> {
        let dim = shape.len();
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if origin.len() != dim || spacing.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "origin/spacing lengths {}/{} do not match dimension {dim}",
                origin.len(),
                spacing.len()
            )));
        }
        if let Some(&s) = shape.iter().find(|&&s| s < 5) {
            return Err(Error::InvalidGrid(format!("axis with {s} nodes (need at least 5)")));
        }
        if spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidGrid("spacing must be positive and finite".into()));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        let strides = c_strides(&shape);
        let cell_shape: Vec<usize> = shape.iter().map(|s| s - 1).collect();
        let cell_strides = c_strides(&cell_shape);
        let count: usize = shape.iter().product();
        let mut interior_mask = vec![true; count];
        for (node, m) in interior_mask.iter_mut().enumerate() {
            for a in 0..dim {
                let i = (node / strides[a]) % shape[a];
                if i < STENCIL_RADIUS || i + STENCIL_RADIUS >= shape[a] {
                    *m = false;
                    break;
                }
            }
        }
        Ok(Arc::new(Self { dim, origin, spacing, shape, strides, cell_strides, interior_mask }))
    }

    pub fn uniform(origin: Vec<f64>, h: f64, shape: Vec<usize>) -> Result<Arc<Self>> {
        let n = shape.len();
        Self::new(origin, vec![h; n], shape)
    }

    /// Grid whose cells tile `[lo, hi]` with `cells[a]` cells per axis, padded
    /// by `pad` extra nodes on every side.
    pub fn padded_box(lo: &[f64], hi: &[f64], cells: &[usize], pad: usize) -> Result<Arc<Self>> {
        if lo.len() != hi.len() || lo.len() != cells.len() {
            return Err(Error::InvalidGrid("box description has inconsistent lengths".into()));
        }
        let spacing: Vec<f64> =
            lo.iter().zip(hi).zip(cells).map(|((l, h), &c)| (h - l) / c as f64).collect();
        let origin: Vec<f64> =
            lo.iter().zip(&spacing).map(|(l, h)| l - pad as f64 * h).collect();
        let shape: Vec<usize> = cells.iter().map(|c| c + 1 + 2 * pad).collect();
        Self::new(origin, spacing, shape)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Spacing when it is the same on every axis.
    pub fn uniform_spacing(&self) -> Option<f64> {
        let h = self.spacing[0];
        self.spacing.iter().all(|&s| s == h).then_some(h)
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn node_count(&self) -> usize {
        self.interior_mask.len()
    }

    pub fn interior_mask(&self) -> &[bool] {
        &self.interior_mask
    }

    /// Nodes at least `layers` nodes away from every chart edge.
    pub fn inset_mask(&self, layers: usize) -> Vec<bool> {
        (0..self.node_count())
            .map(|node| {
                (0..self.dim).all(|a| {
                    let i = self.axis_index(node, a);
                    i >= layers && i + layers < self.shape[a]
                })
            })
            .collect()
    }

    pub fn is_interior(&self, node: usize) -> bool {
        self.interior_mask[node]
    }

    pub fn cell_shape(&self) -> Vec<usize> {
        self.shape.iter().map(|s| s - 1).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.shape.iter().map(|s| s - 1).product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn lower(&self) -> Vec<f64> {
        self.origin.clone()
    }

    pub fn upper(&self) -> Vec<f64> {
        (0..self.dim).map(|a| self.origin[a] + (self.shape[a] - 1) as f64 * self.spacing[a]).collect()
    }

    pub fn node_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn node_multi(&self, node: usize) -> Vec<usize> {
        (0..self.dim).map(|a| (node / self.strides[a]) % self.shape[a]).collect()
    }

    /// Index of `node` along `axis`.
    #[inline]
    pub fn axis_index(&self, node: usize, axis: usize) -> usize {
        (node / self.strides[axis]) % self.shape[axis]
    }

    #[inline]
    pub fn coord(&self, node: usize, axis: usize) -> f64 {
        self.origin[axis] + self.axis_index(node, axis) as f64 * self.spacing[axis]
    }

    pub fn point(&self, node: usize) -> Vec<f64> {
        (0..self.dim).map(|a| self.coord(node, a)).collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.node_count()).map(move |i| self.point(i))
    }

    pub fn cell_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.cell_strides).map(|(i, s)| i * s).sum()
    }

    pub fn cell_multi(&self, cell: usize) -> Vec<usize> {
        (0..self.dim).map(|a| (cell / self.cell_strides[a]) % (self.shape[a] - 1)).collect()
    }

    /// Node at the lower corner of `cell`.
    pub fn cell_base_node(&self, cell: usize) -> usize {
        (0..self.dim)
            .map(|a| ((cell / self.cell_strides[a]) % (self.shape[a] - 1)) * self.strides[a])
            .sum()
    }

    /// Node offsets of the 2ⁿ cell corners; bit `a` of the corner number
    /// selects the upper side along axis `a`.
    pub fn corner_offsets(&self) -> Vec<usize> {
        (0..1usize << self.dim)
            .map(|bits| (0..self.dim).filter(|a| bits >> a & 1 == 1).map(|a| self.strides[a]).sum())
            .collect()
    }

    pub fn cell_center(&self, cell: usize) -> Vec<f64> {
        self.cell_multi(cell)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.origin[a] + (i as f64 + 0.5) * self.spacing[a])
            .collect()
    }

    /// Closest node index along each axis to `x` (clamped to the grid).
    pub fn nearest_node(&self, x: &[f64]) -> usize {
        let idx: Vec<usize> = (0..self.dim)
            .map(|a| {
                let t = ((x[a] - self.origin[a]) / self.spacing[a]).round();
                t.clamp(0.0, (self.shape[a] - 1) as f64) as usize
            })
            .collect();
        self.node_index(&idx)
    }

    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}
