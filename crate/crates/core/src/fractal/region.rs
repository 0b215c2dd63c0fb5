use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of a closed axis-aligned box relative to an open region U.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoxClass {
    /// The open box misses U.
    Outside,
    /// The closed box meets both U and its complement.
    Straddles,
    /// The closed box lies in U; bounds on dist(box, ∂U).
    Inside { lower: f64, upper: f64 },
}

/// Bounded open subset of ℝⁿ.
pub trait Region: Sync + Send {
    fn dim(&self) -> usize;
    fn contains(&self, x: &[f64]) -> bool;
    /// Axis-aligned box containing U.
    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>);
    fn classify_box(&self, lo: &[f64], hi: &[f64]) -> BoxClass;
    /// Points on ∂U such that every boundary point is within `gap / 2` of
    /// one of them.
    fn boundary_sample(&self, gap: f64) -> Vec<Vec<f64>>;
    /// Short identifier used in reports.
    fn label(&self) -> String;
}

pub(crate) fn point_box_dist(p: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    p.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&x, (&l, &h))| {
            let d = (l - x).max(x - h).max(0.0);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

fn farthest_corner_dist(p: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    p.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&x, (&l, &h))| {
            let d = (x - l).abs().max((h - x).abs());
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Points on the sphere |x − c| = r: radial projection of a lattice on the
/// faces of the circumscribed cube.
fn sphere_sample(c: &[f64], r: f64, gap: f64) -> Vec<Vec<f64>> {
    let n = c.len();
    if n == 1 {
        return vec![vec![c[0] - r], vec![c[0] + r]];
    }
    if n == 2 {
        let m = ((2.0 * PI * r / gap).ceil() as usize).max(8);
        return (0..m)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / m as f64;
                vec![c[0] + r * t.cos(), c[1] + r * t.sin()]
            })
            .collect();
    }
    // projection shrinks face distances by at most 1, so face spacing gap/r
    // keeps chords below gap
    let m = ((2.0 * r / gap).ceil() as usize).max(2);
    let mut out = Vec::new();
    for a in 0..n {
        for s in [-1.0, 1.0] {
            let mut idx = vec![0usize; n - 1];
            loop {
                let mut p = Vec::with_capacity(n);
                let mut it = idx.iter();
                for j in 0..n {
                    p.push(if j == a { s } else { -1.0 + 2.0 * *it.next().unwrap() as f64 / m as f64 });
                }
                let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                out.push(p.iter().zip(c).map(|(v, cj)| cj + r * v / norm).collect());
                let mut j = 0;
                while j < n - 1 {
                    idx[j] += 1;
                    if idx[j] <= m {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == n - 1 {
                    break;
                }
            }
        }
    }
    out
}

/// Open box (lo, hi).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn unit_cube(n: usize) -> Self {
        Self { lo: vec![0.0; n], hi: vec![1.0; n] }
    }
}

impl Region for AxisBox {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&v, (&l, &h))| v > l && v < h)
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        (self.lo.clone(), self.hi.clone())
    }

    fn classify_box(&self, lo: &[f64], hi: &[f64]) -> BoxClass {
        let mut dist = f64::INFINITY;
        let mut inside = true;
        for a in 0..lo.len() {
            if hi[a] <= self.lo[a] || lo[a] >= self.hi[a] {
                return BoxClass::Outside;
            }
            let d = (lo[a] - self.lo[a]).min(self.hi[a] - hi[a]);
            inside &= d > 0.0;
            dist = dist.min(d);
        }
        if inside {
            BoxClass::Inside { lower: dist, upper: dist }
        } else {
            BoxClass::Straddles
        }
    }

    fn boundary_sample(&self, gap: f64) -> Vec<Vec<f64>> {
        let n = self.dim();
        // face lattice spacing gap/√(n−1) puts every face point within gap/2
        let scale = ((n.max(2) - 1) as f64).sqrt() / gap;
        let steps: Vec<usize> = (0..n).map(|a| (((self.hi[a] - self.lo[a]) * scale).ceil() as usize).max(1)).collect();
        let mut out = Vec::new();
        for a in 0..n {
            for side in [self.lo[a], self.hi[a]] {
                let axes: Vec<usize> = (0..n).filter(|&j| j != a).collect();
                let mut idx = vec![0usize; axes.len()];
                loop {
                    let mut p = vec![0.0; n];
                    p[a] = side;
                    for (t, &j) in axes.iter().enumerate() {
                        p[j] = self.lo[j] + (self.hi[j] - self.lo[j]) * idx[t] as f64 / steps[j] as f64;
                    }
                    out.push(p);
                    let mut t = 0;
                    while t < axes.len() {
                        idx[t] += 1;
                        if idx[t] <= steps[axes[t]] {
                            break;
                        }
                        idx[t] = 0;
                        t += 1;
                    }
                    if t == axes.len() {
                        break;
                    }
                }
            }
        }
        out
    }

    fn label(&self) -> String {
        format!("box{:?}-{:?}", self.lo, self.hi)
    }
}

/// Open ball |x − center| < radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn unit_disk() -> Self {
        Self { center: vec![0.0, 0.0], radius: 1.0 }
    }
}

impl Region for Ball {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>() < self.radius * self.radius
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        (self.center.iter().map(|c| c - self.radius).collect(), self.center.iter().map(|c| c + self.radius).collect())
    }

    fn classify_box(&self, lo: &[f64], hi: &[f64]) -> BoxClass {
        let near = point_box_dist(&self.center, lo, hi);
        let far = farthest_corner_dist(&self.center, lo, hi);
        if near >= self.radius {
            BoxClass::Outside
        } else if far < self.radius {
            let d = self.radius - far;
            BoxClass::Inside { lower: d, upper: d }
        } else {
            BoxClass::Straddles
        }
    }

    fn boundary_sample(&self, gap: f64) -> Vec<Vec<f64>> {
        sphere_sample(&self.center, self.radius, gap)
    }

    fn label(&self) -> String {
        format!("ball{:?}r{}", self.center, self.radius)
    }
}

/// Open shell inner < |x − center| < outer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub center: Vec<f64>,
    pub inner: f64,
    pub outer: f64,
}

impl Region for Annulus {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        r2 > self.inner * self.inner && r2 < self.outer * self.outer
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        (self.center.iter().map(|c| c - self.outer).collect(), self.center.iter().map(|c| c + self.outer).collect())
    }

    fn classify_box(&self, lo: &[f64], hi: &[f64]) -> BoxClass {
        let near = point_box_dist(&self.center, lo, hi);
        let far = farthest_corner_dist(&self.center, lo, hi);
        if near >= self.outer || far <= self.inner {
            BoxClass::Outside
        } else if near > self.inner && far < self.outer {
            let d = (near - self.inner).min(self.outer - far);
            BoxClass::Inside { lower: d, upper: d }
        } else {
            BoxClass::Straddles
        }
    }

    fn boundary_sample(&self, gap: f64) -> Vec<Vec<f64>> {
        let mut out = sphere_sample(&self.center, self.inner, gap);
        out.extend(sphere_sample(&self.center, self.outer, gap));
        out
    }

    fn label(&self) -> String {
        format!("annulus{:?}r{}-{}", self.center, self.inner, self.outer)
    }
}

/// Bounding-box hierarchy over consecutive segments of a closed polygon.
#[derive(Debug, Clone)]
struct SegmentTree {
    /// (segment range, lo, hi) in depth-first order; children of node i
    /// are given by `kids[i]`.
    nodes: Vec<(std::ops::Range<usize>, [f64; 2], [f64; 2])>,
    kids: Vec<Option<(usize, usize)>>,
}

const LEAF: usize = 8;

impl SegmentTree {
    fn build(pts: &[[f64; 2]]) -> Self {
        let mut t = Self { nodes: Vec::new(), kids: Vec::new() };
        t.push(pts, 0..pts.len());
        t
    }

    fn push(&mut self, pts: &[[f64; 2]], range: std::ops::Range<usize>) -> usize {
        let m = pts.len();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for i in range.clone() {
            for p in [pts[i], pts[(i + 1) % m]] {
                for a in 0..2 {
                    lo[a] = lo[a].min(p[a]);
                    hi[a] = hi[a].max(p[a]);
                }
            }
        }
        let id = self.nodes.len();
        self.nodes.push((range.clone(), lo, hi));
        self.kids.push(None);
        if range.len() > LEAF {
            let mid = range.start + range.len() / 2;
            let a = self.push(pts, range.start..mid);
            let b = self.push(pts, mid..range.end);
            self.kids[id] = Some((a, b));
        }
        id
    }
}

fn seg_point_dist(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let q = [a[0] + t * d[0] - p[0], a[1] + t * d[1] - p[1]];
    (q[0] * q[0] + q[1] * q[1]).sqrt()
}

/// Liang–Barsky clip of segment ab against the closed box.
fn seg_meets_box(a: [f64; 2], b: [f64; 2], lo: &[f64], hi: &[f64]) -> bool {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for k in 0..2 {
        let d = b[k] - a[k];
        if d == 0.0 {
            if a[k] < lo[k] || a[k] > hi[k] {
                return false;
            }
            continue;
        }
        let (mut ta, mut tb) = ((lo[k] - a[k]) / d, (hi[k] - a[k]) / d);
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return false;
        }
    }
    true
}

fn seg_box_dist(a: [f64; 2], b: [f64; 2], lo: &[f64], hi: &[f64]) -> f64 {
    if seg_meets_box(a, b, lo, hi) {
        return 0.0;
    }
    let mut d = point_box_dist(&a, lo, hi).min(point_box_dist(&b, lo, hi));
    for c in [[lo[0], lo[1]], [hi[0], lo[1]], [lo[0], hi[1]], [hi[0], hi[1]]] {
        d = d.min(seg_point_dist(a, b, c));
    }
    d
}

fn box_box_dist(alo: &[f64], ahi: &[f64], blo: &[f64], bhi: &[f64]) -> f64 {
    (0..alo.len())
        .map(|k| {
            let d = (blo[k] - ahi[k]).max(alo[k] - bhi[k]).max(0.0);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Interior of a closed simple polygon in the plane.
#[derive(Debug, Clone)]
pub struct Polygon {
    pts: Vec<[f64; 2]>,
    tree: SegmentTree,
    label: String,
}

impl Polygon {
    pub fn new(pts: Vec<[f64; 2]>, label: impl Into<String>) -> Result<Self> {
        if pts.len() < 3 {
            return Err(Error::InvalidParameter("polygon needs at least 3 vertices".into()));
        }
        let tree = SegmentTree::build(&pts);
        Ok(Self { pts, tree, label: label.into() })
    }

    /// Koch snowflake polygon after `generation` refinements of the
    /// equilateral triangle with the given center and side; each edge is
    /// replaced by four edges of a third of its length, bumps outward.
    pub fn koch_snowflake(center: [f64; 2], side: f64, generation: u32) -> Result<Self> {
        let r = side / 3f64.sqrt();
        // counter-clockwise, so outward is to the right of each edge
        let mut pts: Vec<[f64; 2]> = (0..3)
            .map(|i| {
                let t = PI / 2.0 + 2.0 * PI * i as f64 / 3.0;
                [center[0] + r * t.cos(), center[1] + r * t.sin()]
            })
            .collect();
        let (s60, c60) = (PI / 3.0).sin_cos();
        for _ in 0..generation {
            let m = pts.len();
            let mut next = Vec::with_capacity(4 * m);
            for i in 0..m {
                let a = pts[i];
                let b = pts[(i + 1) % m];
                let d = [(b[0] - a[0]) / 3.0, (b[1] - a[1]) / 3.0];
                let p1 = [a[0] + d[0], a[1] + d[1]];
                let p3 = [a[0] + 2.0 * d[0], a[1] + 2.0 * d[1]];
                // rotate d by −60° (to the right, outward)
                let e = [c60 * d[0] + s60 * d[1], -s60 * d[0] + c60 * d[1]];
                let p2 = [p1[0] + e[0], p1[1] + e[1]];
                next.extend([a, p1, p2, p3]);
            }
            pts = next;
        }
        Self::new(pts, format!("koch{generation}"))
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.pts
    }

    pub fn perimeter(&self) -> f64 {
        let m = self.pts.len();
        (0..m).map(|i| seg_point_dist(self.pts[i], self.pts[i], self.pts[(i + 1) % m])).sum()
    }

    fn segment(&self, i: usize) -> ([f64; 2], [f64; 2]) {
        (self.pts[i], self.pts[(i + 1) % self.pts.len()])
    }

    /// Distance from the closed box to the polygon boundary.
    fn boundary_dist(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let (range, nlo, nhi) = &self.tree.nodes[id];
            if box_box_dist(lo, hi, nlo, nhi) >= best {
                continue;
            }
            match self.tree.kids[id] {
                Some((a, b)) => {
                    // nearer child on top of the stack
                    let da = box_box_dist(lo, hi, &self.tree.nodes[a].1, &self.tree.nodes[a].2);
                    let db = box_box_dist(lo, hi, &self.tree.nodes[b].1, &self.tree.nodes[b].2);
                    if da <= db {
                        stack.push(b);
                        stack.push(a);
                    } else {
                        stack.push(a);
                        stack.push(b);
                    }
                }
                None => {
                    for i in range.clone() {
                        let (a, b) = self.segment(i);
                        best = best.min(seg_box_dist(a, b, lo, hi));
                        if best == 0.0 {
                            return 0.0;
                        }
                    }
                }
            }
        }
        best
    }
}

impl Region for Polygon {
    fn dim(&self) -> usize {
        2
    }

    /// Crossing number along the ray to +x.
    fn contains(&self, x: &[f64]) -> bool {
        let (px, py) = (x[0], x[1]);
        let mut inside = false;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let (range, nlo, nhi) = &self.tree.nodes[id];
            if py < nlo[1] || py > nhi[1] || px > nhi[0] {
                continue;
            }
            match self.tree.kids[id] {
                Some((a, b)) => {
                    stack.push(a);
                    stack.push(b);
                }
                None => {
                    for i in range.clone() {
                        let (a, b) = self.segment(i);
                        if (a[1] > py) != (b[1] > py) {
                            let xc = a[0] + (py - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                            if xc > px {
                                inside = !inside;
                            }
                        }
                    }
                }
            }
        }
        inside
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let (_, lo, hi) = &self.tree.nodes[0];
        (lo.to_vec(), hi.to_vec())
    }

    fn classify_box(&self, lo: &[f64], hi: &[f64]) -> BoxClass {
        let d = self.boundary_dist(lo, hi);
        let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        if d > 0.0 {
            if self.contains(&center) {
                BoxClass::Inside { lower: d, upper: d }
            } else {
                BoxClass::Outside
            }
        } else {
            BoxClass::Straddles
        }
    }

    fn boundary_sample(&self, gap: f64) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for i in 0..self.pts.len() {
            let (a, b) = self.segment(i);
            let len = seg_point_dist(a, a, b);
            let m = ((len / gap).ceil() as usize).max(1);
            for j in 0..m {
                let t = j as f64 / m as f64;
                out.push(vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
        out
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Region known only through a membership predicate. Distances to the
/// boundary are bracketed by probing a lattice of spacing diam(box)/`density`
/// (never below `floor`) around the box; the bounds assume the complement
/// has no features thinner than one probe spacing.
pub struct ProbeRegion {
    dim: usize,
    pred: Box<dyn Fn(&[f64]) -> bool + Sync + Send>,
    bbox: (Vec<f64>, Vec<f64>),
    pub density: usize,
    pub floor: f64,
    label: String,
}

impl ProbeRegion {
    pub fn new(
        bbox: (Vec<f64>, Vec<f64>),
        pred: impl Fn(&[f64]) -> bool + Sync + Send + 'static,
        label: impl Into<String>,
    ) -> Self {
        Self { dim: bbox.0.len(), pred: Box::new(pred), bbox, density: 16, floor: 1e-6, label: label.into() }
    }

    fn spacing(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let diam = point_box_dist(lo, lo, hi).max(farthest_corner_dist(lo, lo, hi));
        (diam / self.density as f64).max(self.floor)
    }

    /// Visits lattice points of spacing s over [lo, hi].
    fn lattice(lo: &[f64], hi: &[f64], s: f64, mut f: impl FnMut(&[f64]) -> bool) {
        let n = lo.len();
        let m: Vec<usize> = (0..n).map(|a| ((hi[a] - lo[a]) / s).round().max(1.0) as usize).collect();
        let mut idx = vec![0usize; n];
        let mut p = vec![0.0; n];
        loop {
            for a in 0..n {
                p[a] = lo[a] + (hi[a] - lo[a]) * idx[a] as f64 / m[a] as f64;
            }
            if !f(&p) {
                return;
            }
            let mut a = 0;
            while a < n {
                idx[a] += 1;
                if idx[a] <= m[a] {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if a == n {
                return;
            }
        }
    }
}

impl Region for ProbeRegion {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64]) -> bool {
        (self.pred)(x)
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        self.bbox.clone()
    }

    fn classify_box(&self, lo: &[f64], hi: &[f64]) -> BoxClass {
        let s = self.spacing(lo, hi);
        let (mut any_in, mut any_out) = (false, false);
        Self::lattice(lo, hi, s, |p| {
            if (self.pred)(p) {
                any_in = true;
            } else {
                any_out = true;
            }
            !(any_in && any_out)
        });
        match (any_in, any_out) {
            (true, true) => return BoxClass::Straddles,
            (false, _) => return BoxClass::Outside,
            _ => {}
        }
        // probe a shell reaching 4·diam + s beyond the box
        let diam = farthest_corner_dist(lo, lo, hi);
        let reach = 4.0 * diam + 2.0 * s;
        let elo: Vec<f64> = lo.iter().map(|v| v - reach).collect();
        let ehi: Vec<f64> = hi.iter().map(|v| v + reach).collect();
        let mut nearest_out = f64::INFINITY;
        Self::lattice(&elo, &ehi, s, |p| {
            if !(self.pred)(p) {
                nearest_out = nearest_out.min(point_box_dist(p, lo, hi));
            }
            true
        });
        let slack = s * (self.dim as f64).sqrt();
        if nearest_out.is_infinite() {
            BoxClass::Inside { lower: reach - slack, upper: f64::INFINITY }
        } else {
            BoxClass::Inside { lower: (nearest_out - slack).max(0.0), upper: nearest_out }
        }
    }

    fn boundary_sample(&self, gap: f64) -> Vec<Vec<f64>> {
        // midpoints of lattice edges whose ends disagree
        let (lo, hi) = &self.bbox;
        let n = self.dim;
        let s = gap / (n as f64).sqrt();
        let elo: Vec<f64> = lo.iter().map(|v| v - s).collect();
        let ehi: Vec<f64> = hi.iter().map(|v| v + s).collect();
        let mut out = Vec::new();
        Self::lattice(&elo, &ehi, s, |p| {
            let a = (self.pred)(p);
            for k in 0..n {
                let mut q = p.to_vec();
                q[k] += s;
                if q[k] <= ehi[k] + 1e-12 && (self.pred)(&q) != a {
                    q[k] -= 0.5 * s;
                    out.push(q);
                }
            }
            true
        });
        out
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koch_vertex_count_and_perimeter() {
        let k = Polygon::koch_snowflake([0.0, 0.0], 1.0, 3).unwrap();
        assert_eq!(k.vertices().len(), 3 * 64);
        assert!((k.perimeter() - 3.0 * (4.0f64 / 3.0).powi(3)).abs() < 1e-12);
        assert!(k.contains(&[0.0, 0.0]));
        assert!(!k.contains(&[2.0, 0.0]));
    }

    #[test]
    fn disk_classification() {
        let d = Ball::unit_disk();
        assert_eq!(d.classify_box(&[2.0, 2.0], &[3.0, 3.0]), BoxClass::Outside);
        assert_eq!(d.classify_box(&[0.5, 0.5], &[1.5, 1.5]), BoxClass::Straddles);
        match d.classify_box(&[0.0, 0.0], &[0.3, 0.4]) {
            BoxClass::Inside { lower, upper } => {
                assert!((lower - 0.5).abs() < 1e-15 && lower == upper);
            }
            c => panic!("{c:?}"),
        }
    }
}
