use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::whitney::{whitney_census_slope, DyadicCube, WhitneyDecomposition};
use crate::chart::multi_index::rank;
use crate::chart::quadrature::{gauss_legendre, gauss_legendre_on};
use crate::chart::{CellSet, ChartGrid, FormField, StencilOrder};
use crate::error::{Error, Result};
use crate::mollify::MollifierKernel;

/// A family t ↦ M(t) of smooth (n−1)-forms on ℝⁿ.
pub trait ScaleFamily: Sync {
    fn dim(&self) -> usize;
    /// Coefficients of M(t) at x, one per increasing (n−1)-multi-index.
    fn eval(&self, t: f64, x: &[f64]) -> Vec<f64>;
    fn description(&self) -> String;
    /// Box on which the evaluator is defined; None for all of ℝⁿ.
    fn domain(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        None
    }

    fn sample(&self, t: f64, grid: &std::sync::Arc<ChartGrid>) -> Result<FormField> {
        FormField::from_fn(grid, self.dim() - 1, |x| self.eval(t, x))
    }
}

/// Coefficients of ι_F(dx₁∧…∧dxₙ) for a vector F, so that d of the form is
/// div F times the volume form.
pub fn flux_form(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for (j, &fj) in f.iter().enumerate() {
        let idx: Vec<usize> = (0..n).filter(|&a| a != j).collect();
        out[rank(n, &idx)] = if j % 2 == 0 { fj } else { -fj };
    }
    out
}

/// M(t) = M for every t.
pub struct ConstantFamily<F> {
    dim: usize,
    form: F,
    label: String,
}

impl<F: Fn(&[f64]) -> Vec<f64> + Sync> ConstantFamily<F> {
    pub fn new(dim: usize, form: F, label: impl Into<String>) -> Self {
        Self { dim, form, label: label.into() }
    }
}

impl<F: Fn(&[f64]) -> Vec<f64> + Sync> ScaleFamily for ConstantFamily<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, _t: f64, x: &[f64]) -> Vec<f64> {
        (self.form)(x)
    }

    fn description(&self) -> String {
        format!("constant family {}", self.label)
    }
}

/// M(t) = M * φ_t, evaluated pointwise by a fixed quadrature of the unit
/// ball renormalized to unit mass.
pub struct MollifiedFamily<F> {
    dim: usize,
    form: F,
    kernel: MollifierKernel,
    /// Quadrature nodes y in the unit ball and weights of φ(|y|).
    nodes: Vec<(Vec<f64>, f64)>,
    label: String,
}

impl<F: Fn(&[f64]) -> Vec<f64> + Sync> MollifiedFamily<F> {
    pub fn new(dim: usize, form: F, kernel: MollifierKernel, label: impl Into<String>) -> Self {
        let mut nodes = Vec::new();
        if dim == 2 {
            let (r, wr) = gauss_legendre_on(6, 0.0, 1.0);
            let m = 12;
            for (ri, wi) in r.iter().zip(&wr) {
                for j in 0..m {
                    let t = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    nodes.push((vec![ri * t.cos(), ri * t.sin()], wi * ri * kernel.profile(*ri)));
                }
            }
        } else {
            let (x, w) = gauss_legendre(8);
            let total = 8usize.pow(dim as u32);
            for flat in 0..total {
                let mut rem = flat;
                let mut y = Vec::with_capacity(dim);
                let mut wt = 1.0;
                for _ in 0..dim {
                    y.push(x[rem % 8]);
                    wt *= w[rem % 8];
                    rem /= 8;
                }
                let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                if r < 1.0 {
                    nodes.push((y, wt * kernel.profile(r)));
                }
            }
        }
        let mass: f64 = nodes.iter().map(|n| n.1).sum();
        nodes.iter_mut().for_each(|n| n.1 /= mass);
        Self { dim, form, kernel, nodes, label: label.into() }
    }

    pub fn kernel(&self) -> MollifierKernel {
        self.kernel
    }
}

impl<F: Fn(&[f64]) -> Vec<f64> + Sync> ScaleFamily for MollifiedFamily<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, x: &[f64]) -> Vec<f64> {
        if t == 0.0 {
            return (self.form)(x);
        }
        let mut acc = vec![0.0; self.dim];
        let mut p = vec![0.0; self.dim];
        for (y, w) in &self.nodes {
            for a in 0..self.dim {
                p[a] = x[a] - t * y[a];
            }
            for (s, v) in acc.iter_mut().zip((self.form)(&p)) {
                *s += w * v;
            }
        }
        acc
    }

    fn description(&self) -> String {
        format!("{} mollification of {}", self.kernel.name(), self.label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FractalIntegralOptions {
    /// Certification exponent: the tail is summable when the census slope
    /// is below n − 1 + θ.
    pub theta_est: f64,
    /// Finest scale, standing in for M(0); defaults to the smallest cube
    /// diameter.
    pub t0: Option<f64>,
    /// Nodes per axis of the per-cube grid.
    pub cube_nodes: usize,
    /// Gauss–Legendre points per axis on each cube face.
    pub face_points: usize,
    /// Number of finest generations used for the census slope.
    pub census_window: usize,
}

impl Default for FractalIntegralOptions {
    fn default() -> Self {
        Self { theta_est: 1.0, t0: None, cube_nodes: 5, face_points: 4, census_window: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationSum {
    pub k: i32,
    pub cubes: usize,
    /// Σ over the generation of ∫_Q dM(diam Q) + ∫_∂Q (M(t₀) − M(diam Q)).
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractalIntegral {
    /// partial_sum + tail.
    pub value: f64,
    pub partial_sum: f64,
    /// Geometric extrapolation of the generations below the finest one.
    pub tail: f64,
    pub census_slope: f64,
    /// n − 1 + θ.
    pub limit: f64,
    pub t0: f64,
    /// Value with t₀ halved.
    pub value_half_t0: f64,
    pub generations: Vec<GenerationSum>,
}

impl FractalIntegral {
    pub fn t0_sensitivity(&self) -> f64 {
        (self.value_half_t0 - self.value).abs()
    }
}

/// ∫_∂Q of (M(s) − M(t)) for each s in `scales`, outward orientation, by
/// tensor Gauss–Legendre on the faces.
fn face_terms(fam: &dyn ScaleFamily, q: &DyadicCube, scales: &[f64], t: f64, m: usize) -> Vec<f64> {
    let n = q.l.len();
    let (lo, hi) = (q.lo(), q.hi());
    let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..n).map(|a| gauss_legendre_on(m, lo[a], hi[a])).collect();
    let mut out = vec![0.0; scales.len()];
    for j in 0..n {
        let axes: Vec<usize> = (0..n).filter(|&a| a != j).collect();
        let c = rank(n, &axes);
        let parity = if j % 2 == 0 { 1.0 } else { -1.0 };
        for (side, orient) in [(lo[j], -1.0), (hi[j], 1.0)] {
            let mut x = vec![0.0; n];
            x[j] = side;
            for flat in 0..m.pow(axes.len() as u32) {
                let mut rem = flat;
                let mut w = orient * parity;
                for &a in &axes {
                    x[a] = rules[a].0[rem % m];
                    w *= rules[a].1[rem % m];
                    rem /= m;
                }
                let base = fam.eval(t, &x)[c];
                for (o, &s) in out.iter_mut().zip(scales) {
                    *o += w * (fam.eval(s, &x)[c] - base);
                }
            }
        }
    }
    out
}

/// Σ_Q ∫_Q dM(diam Q) + ∫_∂Q (M(t₀) − M(diam Q)) over the cubes of a
/// Whitney decomposition, plus a tail estimate for the generations below
/// k_max from the census slope.
pub fn fractal_integral(fam: &dyn ScaleFamily, w: &WhitneyDecomposition, opts: &FractalIntegralOptions) -> Result<FractalIntegral> {
    let n = w.dim;
    if fam.dim() != n {
        return Err(Error::InvalidParameter(format!("family is {}-dimensional, region {n}-dimensional", fam.dim())));
    }
    if opts.cube_nodes < 5 || opts.face_points < 1 {
        return Err(Error::InvalidParameter("cube grids need at least 5 nodes per axis".into()));
    }
    if let Some((dlo, dhi)) = fam.domain() {
        let inside = |q: &DyadicCube| {
            let (lo, hi) = (q.lo(), q.hi());
            (0..n).all(|a| lo[a] >= dlo[a] && hi[a] <= dhi[a])
        };
        if !w.cubes.iter().all(inside) {
            return Err(Error::CubeOutsideDomain);
        }
    }
    let k_fine = *w.census.keys().next_back().ok_or(Error::RegionTooThin)?;
    let k_lo = k_fine - opts.census_window as i32 + 1;
    let census_slope = whitney_census_slope(w, k_lo, k_fine)?;
    let limit = (n - 1) as f64 + opts.theta_est;
    if census_slope >= limit {
        return Err(Error::NotCertified { slope: census_slope, limit });
    }
    let t0 = opts.t0.unwrap_or_else(|| w.cubes.iter().map(|q| q.diam()).fold(f64::INFINITY, f64::min));
    let m = opts.cube_nodes;
    let parts: Vec<(f64, f64)> = w
        .cubes
        .par_iter()
        .map(|q| -> Result<(f64, f64)> {
            let t = q.diam();
            let h = q.side() / (m - 1) as f64;
            let grid = ChartGrid::uniform(q.lo(), h, vec![m; n])?;
            let dm = fam.sample(t, &grid)?.exterior_derivative(StencilOrder::Fourth)?;
            let interior = dm.integrate(&CellSet::all(&grid))?.value;
            let b = face_terms(fam, q, &[t0, 0.5 * t0], t, opts.face_points);
            Ok((interior + b[0], interior + b[1]))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut per_gen: BTreeMap<i32, (usize, f64, f64)> = BTreeMap::new();
    for (q, (a, b)) in w.cubes.iter().zip(&parts) {
        let e = per_gen.entry(q.k).or_insert((0, 0.0, 0.0));
        e.0 += 1;
        e.1 += a;
        e.2 += b;
    }
    let generations: Vec<GenerationSum> = per_gen.iter().map(|(&k, &(c, s, _))| GenerationSum { k, cubes: c, sum: s }).collect();
    let partial_sum: f64 = generations.iter().map(|g| g.sum).sum();
    let partial_half: f64 = per_gen.values().map(|v| v.2).sum();
    let r = 2f64.powf(census_slope - limit);
    let last = per_gen[&k_fine];
    let tail = last.1 * r / (1.0 - r);
    let tail_half = last.2 * r / (1.0 - r);
    Ok(FractalIntegral {
        value: partial_sum + tail,
        partial_sum,
        tail,
        census_slope,
        limit,
        t0,
        value_half_t0: partial_half + tail_half,
        generations,
    })
}
