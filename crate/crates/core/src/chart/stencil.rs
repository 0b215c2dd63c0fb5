use serde::{Deserialize, Serialize};

use super::grid::ChartGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StencilOrder {
    Second,
    #[default]
    Fourth,
}

impl StencilOrder {
    pub fn order(self) -> usize {
        match self {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
        }
    }
}

/// Partial derivative along `axis` of component `comp` of a node-major field
/// with `ncomp` components per node.
///
/// Interior nodes use the centered stencil of the requested order; nodes one
/// layer from the edge fall back to the 2nd-order centered stencil and edge
/// nodes to the 2nd-order one-sided stencil.
pub fn partial(
    grid: &ChartGrid,
    data: &[f64],
    ncomp: usize,
    comp: usize,
    axis: usize,
    order: StencilOrder,
) -> Vec<f64> {
    let n_ax = grid.shape()[axis];
    let st = grid.strides()[axis];
    let h = grid.spacing()[axis];
    let f = |node: usize| data[node * ncomp + comp];
    (0..grid.node_count())
        .map(|node| {
            let i = grid.axis_index(node, axis);
            if i == 0 {
                (-3.0 * f(node) + 4.0 * f(node + st) - f(node + 2 * st)) / (2.0 * h)
            } else if i == n_ax - 1 {
                (3.0 * f(node) - 4.0 * f(node - st) + f(node - 2 * st)) / (2.0 * h)
            } else if order == StencilOrder::Fourth && i >= 2 && i + 2 < n_ax {
                (f(node - 2 * st) - 8.0 * f(node - st) + 8.0 * f(node + st) - f(node + 2 * st))
                    / (12.0 * h)
            } else {
                (f(node + st) - f(node - st)) / (2.0 * h)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_is_exact_with_fourth_order_in_the_interior() {
        let g = ChartGrid::uniform(vec![0.0], 0.1, vec![12]).unwrap();
        let data: Vec<f64> = g.points().map(|x| x[0].powi(3)).collect();
        let d = partial(&g, &data, 1, 0, 0, StencilOrder::Fourth);
        for node in 2..10 {
            let x = g.coord(node, 0);
            assert!((d[node] - 3.0 * x * x).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_is_exact_everywhere_with_second_order() {
        let g = ChartGrid::uniform(vec![0.0], 0.1, vec![8]).unwrap();
        let data: Vec<f64> = g.points().map(|x| x[0] * x[0]).collect();
        let d = partial(&g, &data, 1, 0, 0, StencilOrder::Second);
        for (node, v) in d.iter().enumerate() {
            assert!((v - 2.0 * g.coord(node, 0)).abs() < 1e-12);
        }
    }
}
