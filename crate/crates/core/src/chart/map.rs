use std::sync::Arc;

use super::grid::ChartGrid;
use super::stencil::{partial, StencilOrder};
use crate::error::{Error, Result};

/// Vector-valued field with `target_dim` components per node.
#[derive(Debug, Clone)]
pub struct MapField {
    grid: Arc<ChartGrid>,
    target_dim: usize,
    values: Vec<f64>,
}

impl MapField {
    pub fn new(grid: &Arc<ChartGrid>, target_dim: usize, values: Vec<f64>) -> Result<Self> {
        if target_dim == 0 || values.len() != target_dim * grid.node_count() {
            return Err(Error::InvalidField(format!(
                "expected {} values, got {}",
                target_dim * grid.node_count(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite value at node {}", i / target_dim)));
        }
        Ok(Self { grid: grid.clone(), target_dim, values })
    }

    pub fn from_fn(grid: &Arc<ChartGrid>, target_dim: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(target_dim * grid.node_count());
        for x in grid.points() {
            let v = f(&x);
            if v.len() != target_dim {
                return Err(Error::InvalidField(format!("expected {target_dim} components")));
            }
            values.extend(v);
        }
        Self::new(grid, target_dim, values)
    }

    pub fn grid(&self) -> &Arc<ChartGrid> {
        &self.grid
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, node: usize) -> &[f64] {
        &self.values[node * self.target_dim..(node + 1) * self.target_dim]
    }

    pub fn component(&self, comp: usize) -> Vec<f64> {
        self.values.iter().skip(comp).step_by(self.target_dim).copied().collect()
    }

    /// ∂_axis of component `comp` at every node.
    pub fn partial(&self, comp: usize, axis: usize, order: StencilOrder) -> Vec<f64> {
        partial(&self.grid, &self.values, self.target_dim, comp, axis, order)
    }

    /// Jacobian columns: `out[a]` is the node-major field ∂_a y with
    /// `target_dim` components per node.
    pub fn jacobian(&self, order: StencilOrder) -> Vec<Vec<f64>> {
        let m = self.target_dim;
        (0..self.grid.dim())
            .map(|a| {
                let mut col = vec![0.0; self.values.len()];
                for c in 0..m {
                    for (node, v) in self.partial(c, a, order).into_iter().enumerate() {
                        col[node * m + c] = v;
                    }
                }
                col
            })
            .collect()
    }

    /// Multilinear interpolation on the containing cell.
    pub fn interpolate(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = &self.grid;
        let n = g.dim();
        if x.len() != n {
            return Err(Error::InvalidParameter(format!("query has {} coordinates, chart has {n}", x.len())));
        }
        let mut base = 0;
        let mut frac = vec![0.0; n];
        for a in 0..n {
            let t = (x[a] - g.origin()[a]) / g.spacing()[a];
            let last = (g.shape()[a] - 1) as f64;
            if !(t >= -1e-12 && t <= last + 1e-12) {
                return Err(Error::OutsideChart);
            }
            let t = t.clamp(0.0, last);
            let i = (t.floor() as usize).min(g.shape()[a] - 2);
            frac[a] = t - i as f64;
            base += i * g.strides()[a];
        }
        let m = self.target_dim;
        let mut out = vec![0.0; m];
        for (bits, off) in g.corner_offsets().into_iter().enumerate() {
            let w: f64 = (0..n).map(|a| if bits >> a & 1 == 1 { frac[a] } else { 1.0 - frac[a] }).product();
            if w == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.at(base + off)) {
                *o += w * v;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_reproduces_nodes_and_linear_maps() {
        let g = ChartGrid::uniform(vec![-1.0, 0.5], 0.25, vec![9, 7]).unwrap();
        let f = MapField::from_fn(&g, 2, |x| vec![2.0 * x[0] - x[1], x[0] + 3.0 * x[1] + 1.0]).unwrap();
        for node in [0, 10, g.node_count() - 1] {
            let v = f.interpolate(&g.point(node)).unwrap();
            assert_eq!(v, f.at(node));
        }
        let c = g.cell_center(5);
        let v = f.interpolate(&c).unwrap();
        assert!((v[0] - (2.0 * c[0] - c[1])).abs() < 1e-14);
        assert!((v[1] - (c[0] + 3.0 * c[1] + 1.0)).abs() < 1e-14);
        assert!(matches!(f.interpolate(&[5.0, 1.0]), Err(Error::OutsideChart)));
    }

    #[test]
    fn nonfinite_values_are_rejected() {
        let g = ChartGrid::uniform(vec![0.0], 1.0, vec![5]).unwrap();
        assert!(MapField::new(&g, 1, vec![0.0, 1.0, f64::NAN, 0.0, 0.0]).is_err());
    }
}
