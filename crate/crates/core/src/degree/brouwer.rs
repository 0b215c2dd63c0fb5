use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sphere_grid::{angle, SphereCellGrid};
use crate::chart::{kuhn_simplices, CellSet, KuhnSimplex, MapField};
use crate::error::{Error, Result};

/// How close a target may come to the image of the region boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClearancePolicy {
    /// Fixed angular distance.
    Absolute(f64),
    /// Multiple of the largest angular diameter of an image simplex.
    SimplexDiameterMultiple(f64),
}

impl Default for ClearancePolicy {
    fn default() -> Self {
        ClearancePolicy::Absolute(1e-9)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DegreeOptions {
    pub clearance: ClearancePolicy,
    /// Sub-targets per axis for sphere cells crossed by the boundary image.
    pub subsample: usize,
    /// Cells per cube-face axis of the bucketing grid used by single-target
    /// queries (capped at 8 above n = 2).
    pub bucket_resolution: usize,
}

impl Default for DegreeOptions {
    fn default() -> Self {
        Self { clearance: ClearancePolicy::default(), subsample: 8, bucket_resolution: 32 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeResult {
    pub degree: i64,
    pub regular: bool,
    pub clearance: f64,
}

/// Targets are nudged by this fixed generic offset so that symmetric
/// fixtures do not place them exactly on image edges.
const NUDGE: f64 = 1e-10;

const GROUP: usize = 16;

fn nudge(z: &[f64]) -> Vec<f64> {
    let dir = [0.318_309_886, -0.577_215_665, 0.271_828_183, 0.141_421_356, -0.173_205_081];
    let mut p: Vec<f64> = z.iter().enumerate().map(|(i, v)| v + NUDGE * dir[i % dir.len()]).collect();
    let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    p.iter_mut().for_each(|v| *v /= norm);
    p
}

fn unit(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}

fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn det_cols(cols: &[&[f64]]) -> f64 {
    if cols.len() == 3 {
        return dot(cols[0], &cross3(cols[1], cols[2]));
    }
    let m = cols.len();
    DMatrix::from_fn(m, m, |r, c| cols[c][r]).determinant()
}

/// Geodesic distance from z to the minor great-circle arc [a, b].
fn arc_distance(z: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let nrm = cross3(a, b);
    let nn = dot(&nrm, &nrm).sqrt();
    if nn < 1e-15 {
        return angle(z, a).min(angle(z, b));
    }
    let nhat = [nrm[0] / nn, nrm[1] / nn, nrm[2] / nn];
    let zn = dot(z, &nhat);
    let proj = [z[0] - zn * nhat[0], z[1] - zn * nhat[1], z[2] - zn * nhat[2]];
    let inside = dot(&cross3(a, &proj), &nhat) >= 0.0 && dot(&cross3(&proj, b), &nhat) >= 0.0;
    if inside && dot(&proj, &proj) > 0.0 {
        zn.abs().clamp(-1.0, 1.0).asin()
    } else {
        angle(z, a).min(angle(z, b))
    }
}

/// Outcome of testing one image simplex against a target.
enum Hit {
    Miss,
    Count(i64),
    Ambiguous,
}

/// Piecewise-linear map of a cell region into Sⁿ, with its simplices
/// bucketed by sphere cell.
pub struct DegreeEngine<'a> {
    u: &'a MapField,
    n: usize,
    kuhn: Vec<KuhnSimplex>,
    /// (base node, Kuhn index) per simplex.
    simplices: Vec<(usize, u8)>,
    buckets: Vec<Vec<u32>>,
    /// Boundary facet node lists (n nodes each).
    boundary: Vec<Vec<usize>>,
    /// Centroid direction and angular radius per boundary facet.
    boundary_balls: Vec<(Vec<f64>, f64)>,
    /// Consecutive runs of spatially sorted facets with an enclosing ball.
    groups: Vec<(std::ops::Range<usize>, Vec<f64>, f64)>,
    max_diameter: f64,
    floor: f64,
    cells: &'a SphereCellGrid,
}

impl<'a> DegreeEngine<'a> {
    pub fn new(u: &'a MapField, region: &CellSet, cells: &'a SphereCellGrid, opts: &DegreeOptions) -> Result<Self> {
        let grid = u.grid();
        let n = grid.dim();
        if u.target_dim() != n + 1 || cells.n() != n {
            return Err(Error::InvalidField(format!("map must take values in S^{n}")));
        }
        if !grid.same_as(region.grid()) {
            return Err(Error::GridMismatch);
        }
        let dev = (0..grid.node_count())
            .map(|i| (u.at(i).iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs())
            .fold(0.0, f64::max);
        if dev > 1e-6 {
            return Err(Error::NonUnitNormal(dev));
        }
        let kuhn = kuhn_simplices(grid);
        let mut simplices = Vec::with_capacity(region.len() * kuhn.len());
        for c in region.cells() {
            let base = grid.cell_base_node(c);
            for k in 0..kuhn.len() {
                simplices.push((base, k as u8));
            }
        }
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); cells.len()];
        let mut max_diameter: f64 = 0.0;
        let mut verts: Vec<&[f64]> = Vec::with_capacity(n + 1);
        for (id, &(base, k)) in simplices.iter().enumerate() {
            verts.clear();
            verts.extend(kuhn[k as usize].offsets.iter().map(|o| u.at(base + o)));
            let mut diam: f64 = 0.0;
            for i in 0..verts.len() {
                for j in i + 1..verts.len() {
                    diam = diam.max(angle(verts[i], verts[j]));
                }
            }
            max_diameter = max_diameter.max(diam);
            // face regions are convex cones, so a simplex whose vertices share
            // a face lies over that face only
            let f0 = cells.face_of(verts[0]);
            let single = verts.iter().all(|p| cells.face_of(p) == f0);
            let faces = if single { f0..f0 + 1 } else { 0..cells.faces() };
            for face in faces {
                let gn: Option<Vec<Vec<f64>>> = verts.iter().map(|p| cells.to_gnomonic(face, p)).collect();
                let range = match gn {
                    Some(gn) => {
                        let lo: Vec<f64> = (0..n).map(|j| gn.iter().map(|g| g[j]).fold(f64::INFINITY, f64::min)).collect();
                        let hi: Vec<f64> = (0..n).map(|j| gn.iter().map(|g| g[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
                        cells.face_index_range(&lo, &hi)
                    }
                    // a simplex this wide may reach the face without all its
                    // vertices lying over it: take the whole face
                    None if diam > 0.5 && verts.iter().any(|p| cells.to_gnomonic(face, p).is_some()) => {
                        Some((vec![0; n], vec![cells.k() - 1; n]))
                    }
                    None => None,
                };
                if let Some((lo, hi)) = range {
                    for_each_index(&lo, &hi, |idx| buckets[cells.cell_from_face_index(face, idx)].push(id as u32));
                }
            }
        }
        let boundary: Vec<Vec<usize>> = if n == 1 {
            region.boundary_faces().iter().map(|f| region.face_nodes(f)).collect()
        } else {
            let mut out = Vec::new();
            for f in region.boundary_faces() {
                let nodes = region.face_nodes(&f);
                // Kuhn triangulation of the (n−1)-cube face
                for perm in kuhn_face_paths(n - 1) {
                    out.push(perm.iter().map(|&b| nodes[b]).collect());
                }
            }
            out
        };
        let mut balls: Vec<(Vec<usize>, Vec<f64>, f64)> = boundary
            .into_iter()
            .map(|nodes| {
                let mut c = vec![0.0; n + 1];
                for &nd in &nodes {
                    for (ci, v) in c.iter_mut().zip(u.at(nd)) {
                        *ci += v;
                    }
                }
                let c = unit(&c);
                let r = nodes.iter().map(|&nd| angle(&c, u.at(nd))).fold(0.0, f64::max);
                (nodes, c, r)
            })
            .collect();
        let coarse = SphereCellGrid::new(n, if n <= 2 { 16 } else { 3 })?;
        balls.sort_by_cached_key(|b| coarse.locate(&b.1));
        let (boundary, boundary_balls): (Vec<_>, Vec<_>) = balls.into_iter().map(|(f, c, r)| (f, (c, r))).unzip();
        let groups = (0..boundary_balls.len())
            .step_by(GROUP)
            .map(|s| {
                let range = s..(s + GROUP).min(boundary_balls.len());
                let mut c = vec![0.0; n + 1];
                for (bc, _) in &boundary_balls[range.clone()] {
                    c.iter_mut().zip(bc).for_each(|(a, b)| *a += b);
                }
                let c = unit(&c);
                let r = boundary_balls[range.clone()].iter().map(|(bc, br)| angle(&c, bc) + br).fold(0.0, f64::max);
                (range, c, r)
            })
            .collect();
        let floor = match opts.clearance {
            ClearancePolicy::Absolute(v) => v,
            ClearancePolicy::SimplexDiameterMultiple(m) => m * max_diameter,
        };
        Ok(Self { u, n, kuhn, simplices, buckets, boundary, boundary_balls, groups, max_diameter, floor, cells })
    }

    pub fn clearance_floor(&self) -> f64 {
        self.floor
    }

    pub fn max_simplex_diameter(&self) -> f64 {
        self.max_diameter
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices.len()
    }

    fn vertices(&self, id: usize) -> Vec<&[f64]> {
        let (base, k) = self.simplices[id];
        self.kuhn[k as usize].offsets.iter().map(|o| self.u.at(base + o)).collect()
    }

    /// Angular distance from z to the image of the region boundary (exact
    /// for n = 2, a lower bound otherwise).
    pub fn clearance(&self, z: &[f64]) -> f64 {
        let mut order: Vec<(f64, usize)> = self.groups.iter().enumerate().map(|(g, (_, c, r))| (angle(z, c) - r, g)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = f64::INFINITY;
        for (lb, g) in order {
            if lb >= best {
                break;
            }
            for i in self.groups[g].0.clone() {
                let (c, r) = &self.boundary_balls[i];
                let lb = angle(z, c) - r;
                if lb >= best {
                    continue;
                }
                let facet = &self.boundary[i];
                let d = match self.n {
                    1 => angle(z, self.u.at(facet[0])),
                    2 => arc_distance(z, self.u.at(facet[0]), self.u.at(facet[1])),
                    _ => lb.max(0.0),
                };
                best = best.min(d);
            }
        }
        best
    }

    fn test(&self, verts: &[&[f64]], sign: f64, z: &[f64], depth: usize) -> Hit {
        let det = det_cols(verts);
        let mut diam: f64 = 0.0;
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                diam = diam.max(angle(verts[i], verts[j]));
            }
        }
        if det.abs() <= 1e-12 * diam.powi(self.n as i32) || det == 0.0 {
            // degenerate image: only matters when z is next to it
            let near = verts.iter().map(|p| angle(z, p)).fold(f64::INFINITY, f64::min) <= diam + 1e-12;
            return if near && diam > 0.0 || verts.iter().any(|p| angle(z, p) < 1e-12) { Hit::Ambiguous } else { Hit::Miss };
        }
        let mut centroid = vec![0.0; self.n + 1];
        for p in verts {
            for (c, v) in centroid.iter_mut().zip(p.iter()) {
                *c += v;
            }
        }
        let ch = unit(&centroid);
        if verts.iter().any(|p| dot(p, &ch) <= 0.0) {
            if depth >= 1 || self.n != 2 {
                return Hit::Ambiguous;
            }
            // one midpoint subdivision into four
            let m = |a: &[f64], b: &[f64]| unit(&a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>());
            let (m01, m02, m12) = (m(verts[0], verts[1]), m(verts[0], verts[2]), m(verts[1], verts[2]));
            let kids: [[&[f64]; 3]; 4] = [
                [verts[0], &m01, &m02],
                [&m01, verts[1], &m12],
                [&m02, &m12, verts[2]],
                [&m12, &m02, &m01],
            ];
            let mut total = 0;
            for kid in &kids {
                match self.test(kid, sign, z, depth + 1) {
                    Hit::Miss => {}
                    Hit::Count(c) => total += c,
                    Hit::Ambiguous => return Hit::Ambiguous,
                }
            }
            return if total == 0 { Hit::Miss } else { Hit::Count(total) };
        }
        let s = det.signum();
        let mut cols: Vec<&[f64]> = verts.to_vec();
        let mut on_face = false;
        for i in 0..verts.len() {
            cols[i] = z;
            let di = det_cols(&cols) * s;
            cols[i] = verts[i];
            if di < 0.0 {
                return Hit::Miss;
            }
            if di == 0.0 {
                on_face = true;
            }
        }
        if on_face {
            Hit::Ambiguous
        } else {
            Hit::Count((sign * s) as i64)
        }
    }

    /// Signed count of image simplices containing z (z used as given).
    pub fn count(&self, z: &[f64]) -> (i64, bool) {
        let cell = self.cells.locate(z);
        let mut deg = 0;
        let mut regular = true;
        for &id in &self.buckets[cell] {
            let (_, k) = self.simplices[id as usize];
            let verts = self.vertices(id as usize);
            match self.test(&verts, self.kuhn[k as usize].sign, z, 0) {
                Hit::Miss => {}
                Hit::Count(c) => deg += c,
                Hit::Ambiguous => regular = false,
            }
        }
        (deg, regular)
    }

    /// Degree at the nudged target; admissibility is left to the caller.
    pub fn evaluate(&self, z: &[f64]) -> (Vec<f64>, DegreeResult) {
        let zt = nudge(z);
        let clearance = self.clearance(&zt);
        let (degree, regular) = self.count(&zt);
        let regular = regular && clearance >= self.floor;
        (zt, DegreeResult { degree, regular, clearance })
    }
}

pub(super) fn for_each_index(lo: &[usize], hi: &[usize], mut f: impl FnMut(&[usize])) {
    let mut idx = lo.to_vec();
    loop {
        f(&idx);
        let mut j = idx.len();
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            if idx[j] < hi[j] {
                idx[j] += 1;
                for t in j + 1..idx.len() {
                    idx[t] = lo[t];
                }
                break;
            }
        }
    }
}

/// Vertex bit patterns of the Kuhn simplices of a d-cube, as indices into
/// its 2^d corners.
fn kuhn_face_paths(d: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..d)
        .permutations(d)
        .map(|perm| {
            let mut cur = 0usize;
            let mut path = vec![0];
            for a in perm {
                cur |= 1 << a;
                path.push(cur);
            }
            path
        })
        .collect()
}

/// Degree of u on the region at target z.
pub fn brouwer_degree(u: &MapField, region: &CellSet, z: &[f64], opts: &DegreeOptions) -> Result<DegreeResult> {
    let n = u.grid().dim();
    let k = if n == 2 { opts.bucket_resolution } else { opts.bucket_resolution.min(8) };
    let cells = SphereCellGrid::new(n, k)?;
    let engine = DegreeEngine::new(u, region, &cells, opts)?;
    let (_, r) = engine.evaluate(&unit(z));
    if r.clearance < engine.floor {
        return Err(Error::TargetNotAdmissible(r.clearance));
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeRow {
    pub target: Vec<f64>,
    pub cell: usize,
    /// Sphere area represented by this target.
    pub area: f64,
    pub degree: i64,
    pub regular: bool,
    pub clearance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub rows: Vec<DegreeRow>,
    /// Σ degree · area over regular targets.
    pub integral: f64,
    /// Area represented by targets that were not regular.
    pub excluded_area: f64,
    pub clearance_floor: f64,
    pub max_simplex_diameter: f64,
}

impl DegreeReport {
    pub fn targets(&self) -> impl Iterator<Item = &[f64]> {
        self.rows.iter().map(|r| r.target.as_slice())
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.rows.iter().map(|r| r.degree)
    }

    /// Σ φ(z) · degree · area over regular targets.
    pub fn pair(&self, phi: impl Fn(&[f64]) -> f64) -> f64 {
        self.rows.iter().filter(|r| r.regular).map(|r| phi(&r.target) * r.degree as f64 * r.area).sum()
    }

    /// Degree per sphere cell when every regular target in it agrees.
    pub fn cell_degree(&self, cell: usize) -> Option<i64> {
        let mut it = self.rows.iter().filter(|r| r.cell == cell && r.regular).map(|r| r.degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }
}

/// Degree at every sphere-cell center; cells crossed by the boundary image
/// are resolved into subsample^n sub-targets.
pub fn degree_field(u: &MapField, region: &CellSet, cells: &SphereCellGrid, opts: &DegreeOptions) -> Result<DegreeReport> {
    let engine = DegreeEngine::new(u, region, cells, opts)?;
    let n = cells.n();
    let rows: Vec<Vec<DegreeRow>> = (0..cells.len())
        .into_par_iter()
        .map(|cell| {
            let (zt, r) = engine.evaluate(&cells.cell_center(cell));
            if r.clearance > cells.circumradius(cell) + 2.0 * NUDGE {
                return vec![DegreeRow { target: zt, cell, area: cells.area(cell), degree: r.degree, regular: r.regular, clearance: r.clearance }];
            }
            let (face, lo, hi) = cells.cell_bounds(cell);
            let s = opts.subsample.max(1);
            let mut out = Vec::with_capacity(s.pow(n as u32));
            for flat in 0..s.pow(n as u32) {
                let mut rem = flat;
                let mut slo = vec![0.0; n];
                let mut shi = vec![0.0; n];
                for j in (0..n).rev() {
                    let i = rem % s;
                    rem /= s;
                    let w = (hi[j] - lo[j]) / s as f64;
                    slo[j] = lo[j] + i as f64 * w;
                    shi[j] = slo[j] + w;
                }
                let mid: Vec<f64> = slo.iter().zip(&shi).map(|(a, b)| 0.5 * (a + b)).collect();
                let (zt, r) = engine.evaluate(&cells.from_gnomonic(face, &mid));
                out.push(DegreeRow {
                    target: zt,
                    cell,
                    area: cells.gnomonic_area(&slo, &shi),
                    degree: r.degree,
                    regular: r.regular,
                    clearance: r.clearance,
                });
            }
            out
        })
        .collect();
    let rows: Vec<DegreeRow> = rows.into_iter().flatten().collect();
    let integral = rows.iter().filter(|r| r.regular).map(|r| r.degree as f64 * r.area).sum();
    // + 0.0 turns the empty sum's −0.0 into 0.0
    let excluded_area = rows.iter().filter(|r| !r.regular).map(|r| r.area).sum::<f64>() + 0.0;
    Ok(DegreeReport {
        rows,
        integral,
        excluded_area,
        clearance_floor: engine.clearance_floor(),
        max_simplex_diameter: engine.max_simplex_diameter(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_distance_cases() {
        let a = [1.0, 0.0, 0.0];
        let b = [0.0, 1.0, 0.0];
        let s = 0.5f64.sqrt();
        assert!((arc_distance(&[s, s * 0.6, s * 0.8], &a, &b) - (s * 0.8).asin()).abs() < 1e-14);
        assert!((arc_distance(&[0.0, 0.0, 1.0], &a, &b) - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!((arc_distance(&[-1.0, 0.0, 0.0], &a, &b) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn face_paths() {
        assert_eq!(kuhn_face_paths(1), vec![vec![0, 1]]);
        assert_eq!(kuhn_face_paths(2), vec![vec![0, 1, 3], vec![0, 2, 3]]);
    }
}
