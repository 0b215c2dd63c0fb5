use itertools::Itertools;

use super::grid::ChartGrid;
use super::multi_index::sort_sign;

/// One simplex of the Kuhn triangulation of a grid cell: node offsets from
/// the cell's base node along the monotone path given by the axis
/// permutation, and its orientation sign in the chart.
#[derive(Debug, Clone)]
pub struct KuhnSimplex {
    pub offsets: Vec<usize>,
    pub sign: f64,
}

/// The n! Kuhn simplices tiling every cell, with consistent orientation.
pub fn kuhn_simplices(grid: &ChartGrid) -> Vec<KuhnSimplex> {
    let n = grid.dim();
    (0..n)
        .permutations(n)
        .map(|perm| {
            let mut offsets = vec![0];
            let mut cur = 0;
            for &a in &perm {
                cur += grid.strides()[a];
                offsets.push(cur);
            }
            KuhnSimplex { offsets, sign: sort_sign(&perm) as f64 }
        })
        .collect()
}
