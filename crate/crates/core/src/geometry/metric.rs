use std::sync::Arc;

use nalgebra::DMatrix;

use super::GeometryOptions;
use crate::chart::{partial, ChartGrid, MapField, StencilOrder};
use crate::error::{Error, Result};

/// Symmetric matrix field stored as the upper triangle (row-major, i ≤ j)
/// at every node.
#[derive(Debug, Clone)]
pub struct MetricField {
    grid: Arc<ChartGrid>,
    entries: Vec<f64>,
}

#[inline]
pub(crate) fn tri_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl MetricField {
    pub fn new(grid: &Arc<ChartGrid>, entries: Vec<f64>) -> Result<Self> {
        let n = grid.dim();
        let per = n * (n + 1) / 2;
        if entries.len() != per * grid.node_count() {
            return Err(Error::InvalidField(format!("metric needs {per} entries per node")));
        }
        Ok(Self { grid: grid.clone(), entries })
    }

    /// Samples `f`, which returns the full n×n matrix (row-major); only the
    /// upper triangle is kept.
    pub fn from_fn(grid: &Arc<ChartGrid>, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let n = grid.dim();
        let mut entries = Vec::with_capacity(n * (n + 1) / 2 * grid.node_count());
        for x in grid.points() {
            let m = f(&x);
            if m.len() != n * n {
                return Err(Error::InvalidField(format!("metric sample must have {} entries", n * n)));
            }
            for i in 0..n {
                for j in i..n {
                    entries.push(m[i * n + j]);
                }
            }
        }
        Self::new(grid, entries)
    }

    pub fn grid(&self) -> &Arc<ChartGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    fn per_node(&self) -> usize {
        let n = self.dim();
        n * (n + 1) / 2
    }

    #[inline]
    pub fn get(&self, node: usize, i: usize, j: usize) -> f64 {
        self.entries[node * self.per_node() + tri_index(self.dim(), i, j)]
    }

    pub fn matrix(&self, node: usize) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.get(node, i, j))
    }

    /// ∂_axis g_ij at every node.
    pub fn partial(&self, i: usize, j: usize, axis: usize, order: StencilOrder) -> Vec<f64> {
        partial(&self.grid, &self.entries, self.per_node(), tri_index(self.dim(), i, j), axis, order)
    }

    /// Smallest eigenvalue over all nodes, with the node where it occurs.
    pub fn min_eigenvalue(&self) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for node in 0..self.grid.node_count() {
            let ev = self.matrix(node).symmetric_eigenvalues().min();
            if ev < best.0 {
                best = (ev, node);
            }
        }
        best
    }

    pub fn check_definite(&self, floor: f64) -> Result<()> {
        let (ev, node) = self.min_eigenvalue();
        if !(ev > floor) {
            return Err(Error::NotPositiveDefinite(node));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self, mask: Option<&[bool]>) -> f64 {
        let per = self.per_node();
        self.entries
            .iter()
            .zip(&other.entries)
            .enumerate()
            .filter(|(k, _)| mask.is_none_or(|m| m[k / per]))
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// g = Dyᵀ Dy.
pub fn metric_from_immersion(y: &MapField, opts: &GeometryOptions) -> Result<MetricField> {
    let grid = y.grid();
    let n = grid.dim();
    let m = y.target_dim();
    if m != n + 1 {
        return Err(Error::InvalidField(format!("immersion must take values in R^{}, got R^{m}", n + 1)));
    }
    let jac = y.jacobian(opts.immersion_stencil);
    let per = n * (n + 1) / 2;
    let mut entries = vec![0.0; per * grid.node_count()];
    for node in 0..grid.node_count() {
        let dy = DMatrix::from_fn(m, n, |c, a| jac[a][node * m + c]);
        let sv = dy.singular_values();
        if !(sv.min() >= opts.definiteness_floor) {
            return Err(Error::NotImmersion(node));
        }
        let g = dy.transpose() * &dy;
        for i in 0..n {
            for j in i..n {
                entries[node * per + tri_index(n, i, j)] = g[(i, j)];
            }
        }
    }
    MetricField::new(grid, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_layout() {
        assert_eq!(tri_index(3, 0, 0), 0);
        assert_eq!(tri_index(3, 0, 2), 2);
        assert_eq!(tri_index(3, 1, 1), 3);
        assert_eq!(tri_index(3, 2, 1), 4);
        assert_eq!(tri_index(3, 2, 2), 5);
    }

    #[test]
    fn plane_metric_is_identity() {
        let g = ChartGrid::uniform(vec![0.0, 0.0], 0.1, vec![8, 8]).unwrap();
        let y = MapField::from_fn(&g, 3, |x| vec![x[0], x[1], 0.0]).unwrap();
        let m = metric_from_immersion(&y, &GeometryOptions::default()).unwrap();
        for node in 0..g.node_count() {
            assert!((m.matrix(node) - DMatrix::identity(2, 2)).amax() < 1e-12);
        }
    }

    #[test]
    fn degenerate_map_is_rejected() {
        let g = ChartGrid::uniform(vec![0.0, 0.0], 0.1, vec![8, 8]).unwrap();
        let y = MapField::from_fn(&g, 3, |x| vec![x[0], x[0], 0.0]).unwrap();
        assert!(matches!(metric_from_immersion(&y, &GeometryOptions::default()), Err(Error::NotImmersion(_))));
    }
}
