use crate::chart::quadrature::gauss_legendre_on;
use crate::error::{Error, Result};

/// Partition of Sⁿ into cells: the 2(n+1) faces of the circumscribed cube,
/// radially projected, each split into kⁿ gnomonic squares.
///
/// Face `2a` is the cap around +e_a and face `2a+1` the cap around −e_a.
/// On a face the gnomonic coordinates are u_j = p_j / |p_a| for the axes
/// j ≠ a in increasing order.
#[derive(Debug, Clone)]
pub struct SphereCellGrid {
    n: usize,
    k: usize,
    areas: Vec<f64>,
}

pub fn sphere_volume(n: usize) -> f64 {
    // vol(Sⁿ) = 2π vol(Sⁿ⁻²), vol(S⁰) = 2, vol(S¹) = 2π
    let mut v = if n % 2 == 0 { 2.0 } else { 2.0 * std::f64::consts::PI };
    let mut d = n % 2;
    while d < n {
        d += 2;
        v *= 2.0 * std::f64::consts::PI / (d - 1) as f64;
    }
    v
}

/// ∫∫ (1+u²+v²)^{−3/2} over [u0,u1]×[v0,v1].
fn gnomonic_area_2d(lo: &[f64], hi: &[f64]) -> f64 {
    let f = |u: f64, v: f64| (u * v / (1.0 + u * u + v * v).sqrt()).atan();
    f(hi[0], hi[1]) - f(lo[0], hi[1]) - f(hi[0], lo[1]) + f(lo[0], lo[1])
}

impl SphereCellGrid {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 1 || k < 1 {
            return Err(Error::InvalidParameter("sphere grid needs n ≥ 1 and k ≥ 1".into()));
        }
        let mut g = Self { n, k, areas: Vec::new() };
        g.areas = (0..g.len()).map(|c| {
            let (_, lo, hi) = g.cell_bounds(c);
            g.gnomonic_area(&lo, &hi)
        }).collect();
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cells per face axis.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn faces(&self) -> usize {
        2 * (self.n + 1)
    }

    pub fn cells_per_face(&self) -> usize {
        self.k.pow(self.n as u32)
    }

    pub fn len(&self) -> usize {
        self.faces() * self.cells_per_face()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn area(&self, cell: usize) -> f64 {
        self.areas[cell]
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Axis and sign (+1/−1) of a face.
    pub fn face_axis(face: usize) -> (usize, f64) {
        (face / 2, if face % 2 == 0 { 1.0 } else { -1.0 })
    }

    pub fn face_of(&self, p: &[f64]) -> usize {
        let mut best = 0;
        for a in 1..=self.n {
            if p[a].abs() > p[best].abs() {
                best = a;
            }
        }
        2 * best + usize::from(p[best] < 0.0)
    }

    /// Gnomonic coordinates of p on `face`, if p lies in the open
    /// half-space of that face.
    pub fn to_gnomonic(&self, face: usize, p: &[f64]) -> Option<Vec<f64>> {
        let (a, s) = Self::face_axis(face);
        let d = s * p[a];
        if d <= 0.0 {
            return None;
        }
        Some((0..=self.n).filter(|&j| j != a).map(|j| p[j] / d).collect())
    }

    pub fn from_gnomonic(&self, face: usize, u: &[f64]) -> Vec<f64> {
        let (a, s) = Self::face_axis(face);
        let mut p = vec![0.0; self.n + 1];
        let mut it = u.iter();
        for (j, pj) in p.iter_mut().enumerate() {
            *pj = if j == a { s } else { *it.next().unwrap() };
        }
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        p.iter_mut().for_each(|v| *v /= norm);
        p
    }

    fn index_on_face(&self, u: f64) -> usize {
        (((u + 1.0) * 0.5 * self.k as f64).floor().max(0.0) as usize).min(self.k - 1)
    }

    /// Cell of `face` containing gnomonic point `u` (clamped to the face).
    pub fn cell_on_face(&self, face: usize, u: &[f64]) -> usize {
        let mut idx = 0;
        for &uj in u {
            idx = idx * self.k + self.index_on_face(uj);
        }
        face * self.cells_per_face() + idx
    }

    pub fn locate(&self, p: &[f64]) -> usize {
        let face = self.face_of(p);
        let u = self.to_gnomonic(face, p).expect("point lies in its own face half-space");
        self.cell_on_face(face, &u)
    }

    /// Face and gnomonic box [lo, hi] of a cell.
    pub fn cell_bounds(&self, cell: usize) -> (usize, Vec<f64>, Vec<f64>) {
        let face = cell / self.cells_per_face();
        let mut rem = cell % self.cells_per_face();
        let w = 2.0 / self.k as f64;
        let mut idx = vec![0; self.n];
        for j in (0..self.n).rev() {
            idx[j] = rem % self.k;
            rem /= self.k;
        }
        let lo: Vec<f64> = idx.iter().map(|&i| -1.0 + i as f64 * w).collect();
        let hi: Vec<f64> = lo.iter().map(|l| l + w).collect();
        (face, lo, hi)
    }

    /// Integer index range of cells on a face covering the gnomonic box
    /// [lo, hi] (clamped).
    pub fn face_index_range(&self, lo: &[f64], hi: &[f64]) -> Option<(Vec<usize>, Vec<usize>)> {
        if lo.iter().zip(hi).any(|(l, h)| *h < -1.0 || *l > 1.0) {
            return None;
        }
        Some((lo.iter().map(|&l| self.index_on_face(l)).collect(), hi.iter().map(|&h| self.index_on_face(h)).collect()))
    }

    pub fn cell_from_face_index(&self, face: usize, idx: &[usize]) -> usize {
        face * self.cells_per_face() + idx.iter().fold(0, |acc, &i| acc * self.k + i)
    }

    pub fn cell_center(&self, cell: usize) -> Vec<f64> {
        let (face, lo, hi) = self.cell_bounds(cell);
        let mid: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
        self.from_gnomonic(face, &mid)
    }

    /// Largest angle between the cell center and a cell corner.
    pub fn circumradius(&self, cell: usize) -> f64 {
        let (face, lo, hi) = self.cell_bounds(cell);
        let c = self.cell_center(cell);
        (0..1usize << self.n)
            .map(|bits| {
                let u: Vec<f64> = (0..self.n).map(|j| if bits >> j & 1 == 1 { hi[j] } else { lo[j] }).collect();
                angle(&c, &self.from_gnomonic(face, &u))
            })
            .fold(0.0, f64::max)
    }

    /// Hⁿ measure of the radial projection of a gnomonic box on any face.
    pub fn gnomonic_area(&self, lo: &[f64], hi: &[f64]) -> f64 {
        if self.n == 2 {
            return gnomonic_area_2d(lo, hi);
        }
        // (1+|u|²)^{−(n+1)/2} by tensor Gauss–Legendre
        let m = 8;
        let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..self.n).map(|j| gauss_legendre_on(m, lo[j], hi[j])).collect();
        let mut total = 0.0;
        for flat in 0..m.pow(self.n as u32) {
            let mut rem = flat;
            let mut r2 = 0.0;
            let mut w = 1.0;
            for rule in &rules {
                let i = rem % m;
                rem /= m;
                r2 += rule.0[i] * rule.0[i];
                w *= rule.1[i];
            }
            total += w * (1.0 + r2).powf(-0.5 * (self.n + 1) as f64);
        }
        total
    }

    /// Cells adjacent to `cell` through faces or corners, across cube
    /// edges as well (found by locating points just outside the cell).
    pub fn neighbors(&self, cell: usize) -> Vec<usize> {
        let (face, lo, hi) = self.cell_bounds(cell);
        let w = 2.0 / self.k as f64;
        let mut out = Vec::new();
        for code in 0..3usize.pow(self.n as u32) {
            let mut rem = code;
            let mut u = vec![0.0; self.n];
            let mut center = true;
            for j in 0..self.n {
                let d = rem % 3;
                rem /= 3;
                u[j] = match d {
                    0 => lo[j] - 0.25 * w,
                    1 => 0.5 * (lo[j] + hi[j]),
                    _ => hi[j] + 0.25 * w,
                };
                center &= d == 1;
            }
            if center {
                continue;
            }
            let c = self.locate(&self.from_gnomonic(face, &u));
            if c != cell && !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

/// Angle between unit vectors, accurate for small angles.
pub fn angle(a: &[f64], b: &[f64]) -> f64 {
    let diff2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let sum2: f64 = a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum();
    2.0 * diff2.sqrt().atan2(sum2.sqrt())
}
