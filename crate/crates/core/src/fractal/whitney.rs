use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::region::{point_box_dist, BoxClass, Region};
use crate::error::{Error, Result};

/// Open dyadic cube 2^{−k}(l + (0,1)ⁿ).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub k: i32,
    pub l: Vec<i64>,
}

impl DyadicCube {
    pub fn side(&self) -> f64 {
        2f64.powi(-self.k)
    }

    pub fn diam(&self) -> f64 {
        self.side() * (self.l.len() as f64).sqrt()
    }

    pub fn volume(&self) -> f64 {
        self.side().powi(self.l.len() as i32)
    }

    pub fn lo(&self) -> Vec<f64> {
        let s = self.side();
        self.l.iter().map(|&l| l as f64 * s).collect()
    }

    pub fn hi(&self) -> Vec<f64> {
        let s = self.side();
        self.l.iter().map(|&l| (l + 1) as f64 * s).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        let s = self.side();
        self.l.iter().map(|&l| (l as f64 + 0.5) * s).collect()
    }

    pub fn children(&self) -> Vec<DyadicCube> {
        let n = self.l.len();
        (0..1usize << n)
            .map(|bits| DyadicCube {
                k: self.k + 1,
                l: (0..n).map(|a| 2 * self.l[a] + ((bits >> a) & 1) as i64).collect(),
            })
            .collect()
    }

    /// Ancestor of generation `k ≤ self.k`.
    pub fn ancestor(&self, k: i32) -> DyadicCube {
        let shift = self.k - k;
        DyadicCube { k, l: self.l.iter().map(|&l| l >> shift).collect() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WhitneyDecomposition {
    pub dim: usize,
    pub k_max: i32,
    /// Accepted cubes, sorted by generation and then corner.
    pub cubes: Vec<DyadicCube>,
    /// Generation → number of accepted cubes.
    pub census: BTreeMap<i32, usize>,
    /// Volume of generation-k_max cubes meeting U that were not accepted.
    pub unresolved_volume: f64,
    /// Cubes inside U whose distance bounds were too loose to certify.
    pub uncertified: usize,
}

enum Verdict {
    Accept,
    Split,
    Drop,
    Uncertified,
}

fn judge(region: &dyn Region, q: &DyadicCube) -> Verdict {
    let diam = q.diam();
    match region.classify_box(&q.lo(), &q.hi()) {
        BoxClass::Outside => Verdict::Drop,
        BoxClass::Straddles => Verdict::Split,
        BoxClass::Inside { lower, upper } => {
            if lower >= diam {
                if upper <= 4.0 * diam {
                    Verdict::Accept
                } else {
                    Verdict::Uncertified
                }
            } else {
                Verdict::Split
            }
        }
    }
}

struct Outcome {
    cubes: Vec<DyadicCube>,
    unresolved: f64,
    uncertified: usize,
}

fn descend(region: &dyn Region, q: DyadicCube, k_max: i32) -> Outcome {
    match judge(region, &q) {
        Verdict::Accept => Outcome { cubes: vec![q], unresolved: 0.0, uncertified: 0 },
        Verdict::Drop => Outcome { cubes: Vec::new(), unresolved: 0.0, uncertified: 0 },
        Verdict::Uncertified => Outcome { cubes: Vec::new(), unresolved: q.volume(), uncertified: 1 },
        Verdict::Split if q.k >= k_max => Outcome { cubes: Vec::new(), unresolved: q.volume(), uncertified: 0 },
        Verdict::Split => {
            let parts: Vec<Outcome> = q.children().into_par_iter().map(|c| descend(region, c, k_max)).collect();
            let mut out = Outcome { cubes: Vec::new(), unresolved: 0.0, uncertified: 0 };
            for p in parts {
                out.cubes.extend(p.cubes);
                out.unresolved += p.unresolved;
                out.uncertified += p.uncertified;
            }
            out
        }
    }
}

/// Maximal dyadic cubes Q ⊂ U with diam Q ≤ dist(Q, ∂U), found top-down
/// down to generation `k_max`. A cube is accepted only when its distance
/// bounds certify diam Q ≤ dist(Q, ∂U) ≤ 4 diam Q.
pub fn whitney_decompose(region: &dyn Region, k_max: i32) -> Result<WhitneyDecomposition> {
    let n = region.dim();
    let (lo, hi) = region.bounding_box();
    let extent = lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max);
    if !(extent > 0.0) {
        return Err(Error::InvalidParameter("region has an empty bounding box".into()));
    }
    // coarsest generation whose cubes are wider than the region: none of
    // them can satisfy diam ≤ dist
    let k0 = -(extent.log2().ceil() as i32);
    let side = 2f64.powi(-k0);
    let ranges: Vec<(i64, i64)> = lo.iter().zip(&hi).map(|(l, h)| ((l / side).floor() as i64, (h / side).floor() as i64)).collect();
    let mut roots = Vec::new();
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        roots.push(DyadicCube { k: k0, l: idx.clone() });
        let mut a = 0;
        while a < n {
            idx[a] += 1;
            if idx[a] <= ranges[a].1 {
                break;
            }
            idx[a] = ranges[a].0;
            a += 1;
        }
        if a == n {
            break;
        }
    }
    let parts: Vec<Outcome> = roots.into_par_iter().map(|q| descend(region, q, k_max.max(k0))).collect();
    let mut cubes = Vec::new();
    let mut unresolved_volume = 0.0;
    let mut uncertified = 0;
    for p in parts {
        cubes.extend(p.cubes);
        unresolved_volume += p.unresolved;
        uncertified += p.uncertified;
    }
    if cubes.is_empty() {
        return Err(Error::RegionTooThin);
    }
    cubes.sort();
    let mut census = BTreeMap::new();
    for q in &cubes {
        *census.entry(q.k).or_insert(0) += 1;
    }
    Ok(WhitneyDecomposition { dim: n, k_max, cubes, census, unresolved_volume, uncertified })
}

impl WhitneyDecomposition {
    pub fn volume(&self) -> f64 {
        self.cubes.iter().map(|q| q.volume()).sum()
    }

    pub fn count(&self, k: i32) -> usize {
        self.census.get(&k).copied().unwrap_or(0)
    }

    /// No cube contains another (dyadic cubes either nest or are disjoint),
    /// decided on integer corners.
    pub fn is_disjoint(&self) -> bool {
        let set: HashSet<&DyadicCube> = self.cubes.iter().collect();
        if set.len() != self.cubes.len() {
            return false;
        }
        let k_min = match self.census.keys().next() {
            Some(&k) => k,
            None => return true,
        };
        self.cubes.iter().all(|q| (k_min..q.k).all(|k| !set.contains(&q.ancestor(k))))
    }

    /// CSV with header `k,l0,l1,...`, one accepted cube per row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["k".to_string()];
        header.extend((0..self.dim).map(|a| format!("l{a}")));
        wr.write_record(&header)?;
        for q in &self.cubes {
            let mut rec = vec![q.k.to_string()];
            rec.extend(q.l.iter().map(|l| l.to_string()));
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Least-squares slope of log₂|W_k| against k over populated generations
/// in [k_lo, k_hi].
pub fn whitney_census_slope(w: &WhitneyDecomposition, k_lo: i32, k_hi: i32) -> Result<f64> {
    let pts: Vec<(f64, f64)> = w
        .census
        .range(k_lo..=k_hi)
        .filter(|(_, &c)| c > 0)
        .map(|(&k, &c)| (k as f64, (c as f64).log2()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::SparseCensus(pts.len()));
    }
    Ok(least_squares_slope(&pts))
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Uniform bucket grid over a point cloud, for box-to-nearest-point queries.
pub(crate) struct PointIndex {
    lo: Vec<f64>,
    cell: f64,
    shape: Vec<usize>,
    buckets: Vec<Vec<u32>>,
    pts: Vec<Vec<f64>>,
}

impl PointIndex {
    pub(crate) fn new(pts: Vec<Vec<f64>>, cell: f64) -> Self {
        let n = pts[0].len();
        let lo: Vec<f64> = (0..n).map(|a| pts.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min)).collect();
        let hi: Vec<f64> = (0..n).map(|a| pts.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max)).collect();
        let shape: Vec<usize> = (0..n).map(|a| ((hi[a] - lo[a]) / cell).floor() as usize + 1).collect();
        let mut buckets = vec![Vec::new(); shape.iter().product()];
        let mut idx = Self { lo, cell, shape, buckets: Vec::new(), pts: Vec::new() };
        for (i, p) in pts.iter().enumerate() {
            buckets[idx.bucket_of(p)].push(i as u32);
        }
        idx.buckets = buckets;
        idx.pts = pts;
        idx
    }

    fn coord(&self, x: f64, a: usize) -> i64 {
        ((x - self.lo[a]) / self.cell).floor() as i64
    }

    fn bucket_of(&self, p: &[f64]) -> usize {
        (0..p.len()).fold(0, |acc, a| acc * self.shape[a] + (self.coord(p[a], a).clamp(0, self.shape[a] as i64 - 1) as usize))
    }

    /// Distance from the closed box to the nearest indexed point.
    pub(crate) fn box_distance(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let n = lo.len();
        let blo: Vec<i64> = (0..n).map(|a| self.coord(lo[a], a)).collect();
        let bhi: Vec<i64> = (0..n).map(|a| self.coord(hi[a], a)).collect();
        let mut best = f64::INFINITY;
        let max_ring = self.shape.iter().max().copied().unwrap_or(1) as i64 + 1;
        for ring in 0..=max_ring {
            // every point outside the ring is at least `ring·cell` away
            if (ring - 1) as f64 * self.cell >= best {
                break;
            }
            let rlo: Vec<i64> = blo.iter().map(|v| v - ring).collect();
            let rhi: Vec<i64> = bhi.iter().map(|v| v + ring).collect();
            let mut idx = rlo.clone();
            loop {
                let on_shell = ring == 0 || (0..n).any(|a| idx[a] == rlo[a] || idx[a] == rhi[a]);
                let valid = (0..n).all(|a| idx[a] >= 0 && idx[a] < self.shape[a] as i64);
                if on_shell && valid {
                    let b = (0..n).fold(0, |acc, a| acc * self.shape[a] + idx[a] as usize);
                    for &i in &self.buckets[b] {
                        best = best.min(point_box_dist(&self.pts[i as usize], lo, hi));
                    }
                }
                let mut a = 0;
                while a < n {
                    idx[a] += 1;
                    if idx[a] <= rhi[a] {
                        break;
                    }
                    idx[a] = rlo[a];
                    a += 1;
                }
                if a == n {
                    break;
                }
            }
        }
        best
    }
}

/// Post-hoc check of a decomposition against a boundary point sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitneyAudit {
    pub checked: usize,
    /// Cubes failing diam ≤ dist ≤ 4 diam under the sampled distance.
    pub violations: usize,
    /// Cubes whose center is outside U.
    pub outside: usize,
    pub disjoint: bool,
    /// Extremes of sampled dist / diam.
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl WhitneyAudit {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.outside == 0 && self.disjoint
    }
}

/// Re-measures dist(Q, ∂U) for every accepted cube from a boundary sample
/// of spacing `gap`, which brackets the true distance in [d − gap/2, d].
pub fn verify_whitney(w: &WhitneyDecomposition, region: &dyn Region, gap: f64) -> WhitneyAudit {
    let sample = region.boundary_sample(gap);
    // one bucket grid per generation with buckets the size of its cubes, so
    // that the ring search stays a few rings deep
    let indices: BTreeMap<i32, PointIndex> =
        w.census.keys().map(|&k| (k, PointIndex::new(sample.clone(), 2f64.powi(-k).max(gap)))).collect();
    let rows: Vec<(f64, bool, bool)> = w
        .cubes
        .par_iter()
        .map(|q| {
            let d = indices[&q.k].box_distance(&q.lo(), &q.hi());
            let diam = q.diam();
            let ok = d >= diam * (1.0 - 1e-12) && d - 0.5 * gap <= 4.0 * diam;
            (d / diam, ok, region.contains(&q.center()))
        })
        .collect();
    WhitneyAudit {
        checked: rows.len(),
        violations: rows.iter().filter(|r| !r.1).count(),
        outside: rows.iter().filter(|r| !r.2).count(),
        disjoint: w.is_disjoint(),
        min_ratio: rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min),
        max_ratio: rows.iter().map(|r| r.0).fold(0.0, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ancestors_use_floor_division() {
        let q = DyadicCube { k: 3, l: vec![-1, 5] };
        assert_eq!(q.ancestor(1).l, vec![-1, 1]);
        assert_eq!(q.children().len(), 4);
        assert!(q.children().iter().all(|c| c.ancestor(3) == q));
    }
}
