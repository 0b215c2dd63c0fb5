use serde::{Deserialize, Serialize};

use super::brouwer::for_each_index;
use super::sphere_grid::{angle, SphereCellGrid};
use crate::chart::{kuhn_simplices, CellSet, MapField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageMeasure {
    /// Total area of sphere cells hit by the image.
    pub measure: f64,
    /// Area of hit cells that border a cell not hit.
    pub slack: f64,
    pub hit_cells: usize,
}

/// Separating-axis test between the triangle and the box [lo, hi], padded
/// by a rounding margin so that cell location and the test agree.
fn triangle_meets_box(tri: &[Vec<f64>], lo: &[f64], hi: &[f64]) -> bool {
    const PAD: f64 = 1e-12;
    let lo = [lo[0] - PAD, lo[1] - PAD];
    let hi = [hi[0] + PAD, hi[1] + PAD];
    for j in 0..2 {
        let tmin = tri.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min);
        let tmax = tri.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max);
        if tmax < lo[j] || tmin > hi[j] {
            return false;
        }
    }
    let corners = [[lo[0], lo[1]], [hi[0], lo[1]], [lo[0], hi[1]], [hi[0], hi[1]]];
    for e in 0..3 {
        let a = &tri[e];
        let b = &tri[(e + 1) % 3];
        let nrm = [a[1] - b[1], b[0] - a[0]];
        let proj = |p: &[f64]| nrm[0] * p[0] + nrm[1] * p[1];
        let tp: Vec<f64> = tri.iter().map(|p| proj(p)).collect();
        let (tmin, tmax) = (tp.iter().cloned().fold(f64::INFINITY, f64::min), tp.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        let bp: Vec<f64> = corners.iter().map(|c| proj(c)).collect();
        let (bmin, bmax) = (bp.iter().cloned().fold(f64::INFINITY, f64::min), bp.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        if tmax < bmin || tmin > bmax {
            return false;
        }
    }
    true
}

/// Sphere cells touched by the piecewise-linear image of E.
pub fn image_hits(u: &MapField, e: &CellSet, cells: &SphereCellGrid) -> Result<Vec<bool>> {
    let grid = u.grid();
    let n = grid.dim();
    if u.target_dim() != n + 1 || cells.n() != n {
        return Err(Error::InvalidField(format!("map must take values in S^{n}")));
    }
    if !grid.same_as(e.grid()) {
        return Err(Error::GridMismatch);
    }
    let kuhn = kuhn_simplices(grid);
    let mut hit = vec![false; cells.len()];
    for c in e.cells() {
        let base = grid.cell_base_node(c);
        for s in &kuhn {
            let verts: Vec<&[f64]> = s.offsets.iter().map(|o| u.at(base + o)).collect();
            for face in 0..cells.faces() {
                let gn: Vec<Option<Vec<f64>>> = verts.iter().map(|p| cells.to_gnomonic(face, p)).collect();
                if gn.iter().all(Option::is_none) {
                    continue;
                }
                if gn.iter().any(Option::is_none) {
                    // only a simplex wider than the gap between a face and
                    // its hemisphere boundary can reach the face from there
                    let mut diam: f64 = 0.0;
                    for i in 0..verts.len() {
                        for j in i + 1..verts.len() {
                            diam = diam.max(angle(verts[i], verts[j]));
                        }
                    }
                    if diam <= 0.5 {
                        continue;
                    }
                    let first = cells.cell_from_face_index(face, &vec![0; n]);
                    hit[first..first + cells.cells_per_face()].iter_mut().for_each(|h| *h = true);
                    continue;
                }
                let tri: Vec<Vec<f64>> = gn.into_iter().flatten().collect();
                let lo: Vec<f64> = (0..n).map(|j| tri.iter().map(|g| g[j]).fold(f64::INFINITY, f64::min)).collect();
                let hi: Vec<f64> = (0..n).map(|j| tri.iter().map(|g| g[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
                let Some((ilo, ihi)) = cells.face_index_range(&lo, &hi) else { continue };
                for_each_index(&ilo, &ihi, |idx| {
                    let cell = cells.cell_from_face_index(face, idx);
                    if !hit[cell] {
                        hit[cell] = n != 2 || {
                            let (_, blo, bhi) = cells.cell_bounds(cell);
                            triangle_meets_box(&tri, &blo, &bhi)
                        };
                    }
                });
            }
        }
    }
    Ok(hit)
}

/// Conservative upper estimate of Hⁿ(u(E)).
pub fn spherical_image_measure(u: &MapField, e: &CellSet, cells: &SphereCellGrid) -> Result<ImageMeasure> {
    let hit = image_hits(u, e, cells)?;
    let mut measure = 0.0;
    let mut slack = 0.0;
    let mut hit_cells = 0;
    for (cell, _) in hit.iter().enumerate().filter(|(_, h)| **h) {
        measure += cells.area(cell);
        hit_cells += 1;
        if cells.neighbors(cell).iter().any(|&nb| !hit[nb]) {
            slack += cells.area(cell);
        }
    }
    Ok(ImageMeasure { measure, slack, hit_cells })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrinsicBound {
    pub total: f64,
    pub slack: f64,
    pub parts: Vec<ImageMeasure>,
}

/// Σ of image measures over pairwise disjoint closed parts.
pub fn extrinsic_curvature_bound(u: &MapField, parts: &[CellSet], cells: &SphereCellGrid) -> Result<ExtrinsicBound> {
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if parts[i].shares_nodes_with(&parts[j]) {
                return Err(Error::OverlappingParts(i, j));
            }
        }
    }
    let measures = parts.iter().map(|p| spherical_image_measure(u, p, cells)).collect::<Result<Vec<_>>>()?;
    Ok(ExtrinsicBound {
        total: measures.iter().map(|m| m.measure).sum(),
        slack: measures.iter().map(|m| m.slack).sum(),
        parts: measures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separating_axes() {
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(triangle_meets_box(&tri, &[0.2, 0.2], &[0.3, 0.3]));
        assert!(!triangle_meets_box(&tri, &[0.6, 0.6], &[0.9, 0.9]));
        assert!(triangle_meets_box(&tri, &[0.4, 0.4], &[0.9, 0.9]));
        let point = vec![vec![0.5, 0.5]; 3];
        assert!(triangle_meets_box(&point, &[0.5, 0.4], &[0.6, 0.6]));
        assert!(!triangle_meets_box(&point, &[0.51, 0.4], &[0.6, 0.6]));
        assert!(triangle_meets_box(&vec![vec![0.75 - 1e-16, 0.0]; 3], &[0.75, 0.0], &[0.875, 0.125]));
    }
}
