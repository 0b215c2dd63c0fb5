use serde::{Deserialize, Serialize};

use crate::chart::{ChartGrid, MapField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    /// Largest sampled quotient; a lower bound for the seminorm.
    pub value: f64,
    pub alpha: f64,
    pub pairs: usize,
}

/// max |f(x) − f(x′)| / |x − x′|^α over all nearest-neighbour pairs and
/// `budget` further pairs from a Kronecker sequence, restricted to nodes in
/// `mask`.
pub fn holder_quotient(grid: &ChartGrid, data: &[f64], ncomp: usize, mask: Option<&[bool]>, alpha: f64, budget: usize) -> HolderEstimate {
    let nodes: Vec<usize> = (0..grid.node_count()).filter(|&i| mask.is_none_or(|m| m[i])).collect();
    let mut best: f64 = 0.0;
    let mut pairs = 0;
    let mut visit = |p: usize, q: usize| {
        let dx: f64 = (0..grid.dim()).map(|a| (grid.coord(p, a) - grid.coord(q, a)).powi(2)).sum::<f64>().sqrt();
        if dx == 0.0 {
            return;
        }
        let df: f64 = (0..ncomp).map(|c| (data[p * ncomp + c] - data[q * ncomp + c]).powi(2)).sum::<f64>().sqrt();
        best = best.max(df / dx.powf(alpha));
        pairs += 1;
    };
    for &p in &nodes {
        for a in 0..grid.dim() {
            if grid.axis_index(p, a) + 1 < grid.shape()[a] {
                let q = p + grid.strides()[a];
                if mask.is_none_or(|m| m[q]) {
                    visit(p, q);
                }
            }
        }
    }
    if !nodes.is_empty() {
        // R2 sequence constants
        let (g1, g2) = (0.754_877_666_246_692_7, 0.569_840_290_998_053_3);
        for j in 1..=budget {
            let u = (0.5 + j as f64 * g1).fract();
            let v = (0.5 + j as f64 * g2).fract();
            let p = nodes[((u * nodes.len() as f64) as usize).min(nodes.len() - 1)];
            let q = nodes[((v * nodes.len() as f64) as usize).min(nodes.len() - 1)];
            visit(p, q);
        }
    }
    HolderEstimate { value: best, alpha, pairs }
}

/// Sampled Hölder seminorm [f]_α with |x − x′|^α in the denominator.
pub fn holder_seminorm_estimate(f: &MapField, alpha: f64, pair_budget: usize) -> HolderEstimate {
    holder_quotient(f.grid(), f.values(), f.target_dim(), None, alpha, pair_budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_quotients() {
        let g = ChartGrid::new(vec![-1.0, -1.0], vec![0.02, 0.02], vec![101, 101]).unwrap();
        let c = MapField::from_fn(&g, 1, |_| vec![3.0]).unwrap();
        assert_eq!(holder_seminorm_estimate(&c, 0.5, 1000).value, 0.0);
        let lin = MapField::from_fn(&g, 1, |x| vec![2.0 * x[0] - 1.5 * x[1]]).unwrap();
        let e = holder_seminorm_estimate(&lin, 1.0, 1000);
        assert!(e.value <= 2.5 + 1e-9 && e.value >= 2.0 - 1e-9);
        let cusp = MapField::from_fn(&g, 1, |x| vec![x[0].abs().powf(0.6)]).unwrap();
        assert!(holder_seminorm_estimate(&cusp, 0.6, 1000).value >= 0.95);
    }
}
