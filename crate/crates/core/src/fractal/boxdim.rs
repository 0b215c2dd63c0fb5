use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::whitney::least_squares_slope;
use crate::chart::MapField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    pub eps: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDimension {
    pub dimension: f64,
    /// False when no sub-range had local slopes within 0.05 of each other;
    /// the dimension is then the fit over all scales.
    pub stable: bool,
    /// Indices into `counts` of the fitted range (inclusive).
    pub range: (usize, usize),
    /// Largest ε first.
    pub counts: Vec<BoxCount>,
}

const STABLE_SPREAD: f64 = 0.05;

/// Slope of log N against log(1/ε) over the longest run of scales whose
/// local slopes spread by less than 0.05.
pub fn fit_box_counts(mut counts: Vec<BoxCount>) -> Result<BoxDimension> {
    counts.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    if counts.len() < 3 {
        return Err(Error::InvalidParameter("box counting needs at least 3 scales".into()));
    }
    let pts: Vec<(f64, f64)> = counts.iter().map(|c| (-c.eps.ln(), (c.count.max(1) as f64).ln())).collect();
    let local: Vec<f64> = pts.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let mut best: Option<(usize, usize)> = None;
    for i in 0..local.len() {
        let (mut lo, mut hi) = (local[i], local[i]);
        for j in i..local.len() {
            lo = lo.min(local[j]);
            hi = hi.max(local[j]);
            if hi - lo >= STABLE_SPREAD {
                break;
            }
            // slopes i..=j span points i..=j+1; ties go to finer scales
            if j > i && best.is_none_or(|(a, b)| j - i >= b - a) {
                best = Some((i, j));
            }
        }
    }
    let (range, stable) = match best {
        Some((i, j)) => ((i, j + 1), true),
        None => ((0, pts.len() - 1), false),
    };
    let dimension = least_squares_slope(&pts[range.0..=range.1]);
    Ok(BoxDimension { dimension, stable, range, counts })
}

/// Box-counting dimension of a point sample over mesh widths `eps`
/// (spanning at least two decades); boxes are ε-cubes of the lattice εℤⁿ.
pub fn box_dimension(points: &[Vec<f64>], eps: &[f64]) -> Result<BoxDimension> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("empty point sample".into()));
    }
    let (emin, emax) = eps.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &e| (a.min(e), b.max(e)));
    if !(emin > 0.0) || emax / emin < 100.0 {
        return Err(Error::InvalidParameter("ε range must be positive and span two decades".into()));
    }
    let counts = eps
        .iter()
        .map(|&e| {
            let boxes: HashSet<Vec<i64>> = points.iter().map(|p| p.iter().map(|x| (x / e).floor() as i64).collect()).collect();
            BoxCount { eps: e, count: boxes.len() }
        })
        .collect();
    fit_box_counts(counts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: f64,
    /// None when the level set is empty.
    pub dimension: Option<BoxDimension>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetScan {
    pub alpha: f64,
    /// n − α + 0.1.
    pub bound: f64,
    pub rows: Vec<LevelRow>,
    /// Fraction of non-empty levels with dimension ≤ bound.
    pub fraction_within: f64,
    pub skipped: usize,
    /// Every level set was empty (e.g. a constant field).
    pub degenerate: bool,
}

/// Box dimensions of the level sets {f = r}, each represented by the mesh
/// cells on which f − r changes sign, counted in blocks of 2^j cells.
pub fn level_set_boxdim(f: &MapField, levels: &[f64], alpha: f64) -> Result<LevelSetScan> {
    if f.target_dim() != 1 {
        return Err(Error::InvalidField("level sets need a scalar field".into()));
    }
    let g = f.grid();
    let n = g.dim();
    let cshape = g.cell_shape();
    let min_cells = cshape.iter().copied().min().unwrap_or(0);
    let scales = (min_cells / 2).max(1).ilog2() as usize;
    if scales < 7 {
        return Err(Error::InvalidParameter("grid too coarse for two decades of box sizes".into()));
    }
    let offs = g.corner_offsets();
    let range: Vec<(f64, f64)> = (0..g.cell_count())
        .map(|c| {
            let b = g.cell_base_node(c);
            offs.iter().map(|o| f.at(b + o)[0]).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        })
        .collect();
    let h = g.max_spacing();
    let multis: Vec<Vec<usize>> = (0..g.cell_count()).map(|c| g.cell_multi(c)).collect();
    let bound = n as f64 - alpha + 0.1;
    let mut rows = Vec::with_capacity(levels.len());
    for &r in levels {
        let hit: Vec<usize> = (0..range.len()).filter(|&c| range[c].0 <= r && r <= range[c].1 && range[c].0 < range[c].1).collect();
        if hit.is_empty() {
            rows.push(LevelRow { level: r, dimension: None });
            continue;
        }
        let counts = (0..=scales)
            .map(|j| {
                let boxes: HashSet<Vec<usize>> = hit.iter().map(|&c| multis[c].iter().map(|i| i >> j).collect()).collect();
                BoxCount { eps: h * (1u64 << j) as f64, count: boxes.len() }
            })
            .collect();
        rows.push(LevelRow { level: r, dimension: Some(fit_box_counts(counts)?) });
    }
    let dims: Vec<f64> = rows.iter().filter_map(|r| r.dimension.as_ref().map(|d| d.dimension)).collect();
    let skipped = rows.len() - dims.len();
    let fraction_within = if dims.is_empty() { 0.0 } else { dims.iter().filter(|&&d| d <= bound).count() as f64 / dims.len() as f64 };
    if skipped > 0 {
        log::info!("{skipped} empty level sets skipped");
    }
    Ok(LevelSetScan { alpha, bound, rows, fraction_within, skipped, degenerate: dims.is_empty() })
}

/// `count` levels drawn as quantiles of the sampled values of f at
/// uniform random probabilities in (0.05, 0.95).
pub fn sample_levels(f: &MapField, count: usize, seed: u64) -> Vec<f64> {
    let mut vals: Vec<f64> = (0..f.grid().node_count()).map(|i| f.at(i)[0]).collect();
    vals.sort_by(f64::total_cmp);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u: f64 = rng.random_range(0.05..0.95);
            vals[((u * vals.len() as f64) as usize).min(vals.len() - 1)]
        })
        .collect()
}
