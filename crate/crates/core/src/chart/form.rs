use std::sync::Arc;

use super::cells::CellSet;
use super::grid::ChartGrid;
use super::multi_index::{binomial, multi_indices, rank, sort_sign};
use super::stencil::{partial, StencilOrder};
use crate::error::{Error, Result};

/// Sampled differential k-form; coefficients are node-major and
/// coefficient-minor, one coefficient per increasing multi-index.
#[derive(Debug, Clone)]
pub struct FormField {
    grid: Arc<ChartGrid>,
    degree: usize,
    coeffs: Vec<f64>,
}

/// Result of a quadrature over a cell set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Set when the region had no cells.
    pub empty: bool,
}

impl FormField {
    pub fn new(grid: &Arc<ChartGrid>, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        let n = grid.dim();
        if degree > n {
            return Err(Error::InvalidField(format!("degree {degree} exceeds dimension {n}")));
        }
        let expected = binomial(n, degree) * grid.node_count();
        if coeffs.len() != expected {
            return Err(Error::InvalidField(format!(
                "expected {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { grid: grid.clone(), degree, coeffs })
    }

    pub fn zeros(grid: &Arc<ChartGrid>, degree: usize) -> Self {
        let len = binomial(grid.dim(), degree) * grid.node_count();
        Self { grid: grid.clone(), degree, coeffs: vec![0.0; len] }
    }

    /// Samples `f`, which returns the coefficients at a point in
    /// multi-index order.
    pub fn from_fn(grid: &Arc<ChartGrid>, degree: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let nc = binomial(grid.dim(), degree);
        let mut coeffs = Vec::with_capacity(nc * grid.node_count());
        for x in grid.points() {
            let c = f(&x);
            if c.len() != nc {
                return Err(Error::InvalidField(format!("expected {nc} coefficients per node")));
            }
            coeffs.extend(c);
        }
        Self::new(grid, degree, coeffs)
    }

    pub fn scalar(grid: &Arc<ChartGrid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let coeffs = grid.points().map(|x| f(&x)).collect();
        Self { grid: grid.clone(), degree: 0, coeffs }
    }

    /// The basis form dx_{i₁}∧…∧dx_{i_k} scaled by a scalar field.
    pub fn monomial(grid: &Arc<ChartGrid>, idx: &[usize], f: impl Fn(&[f64]) -> f64) -> Self {
        let n = grid.dim();
        let nc = binomial(n, idx.len());
        let sign = sort_sign(idx);
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        let r = rank(n, &sorted);
        let mut out = Self::zeros(grid, idx.len());
        if sign != 0 {
            for (node, x) in grid.points().enumerate() {
                out.coeffs[node * nc + r] = sign as f64 * f(&x);
            }
        }
        out
    }

    pub fn grid(&self) -> &Arc<ChartGrid> {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ncoeffs(&self) -> usize {
        binomial(self.grid.dim(), self.degree)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn at(&self, node: usize) -> &[f64] {
        let nc = self.ncoeffs();
        &self.coeffs[node * nc..(node + 1) * nc]
    }

    pub fn get(&self, node: usize, comp: usize) -> f64 {
        self.coeffs[node * self.ncoeffs() + comp]
    }

    /// Coefficient of the given increasing multi-index at `node`.
    pub fn coeff(&self, node: usize, idx: &[usize]) -> f64 {
        self.get(node, rank(self.grid.dim(), idx))
    }

    pub fn component(&self, comp: usize) -> Vec<f64> {
        let nc = self.ncoeffs();
        self.coeffs.iter().skip(comp).step_by(nc).copied().collect()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::InvalidField(format!(
                "degree mismatch {} vs {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    /// self + a·other
    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x + a * y).collect();
        Ok(Self { grid: self.grid.clone(), degree: self.degree, coeffs })
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { grid: self.grid.clone(), degree: self.degree, coeffs: self.coeffs.iter().map(|x| a * x).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Pointwise product with a scalar field sampled at the nodes.
    pub fn mul_scalar(&self, s: &[f64]) -> Self {
        let nc = self.ncoeffs();
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| c * s[i / nc]).collect();
        Self { grid: self.grid.clone(), degree: self.degree, coeffs }
    }

    /// Maximum absolute coefficient over the nodes selected by `mask`
    /// (all nodes when `None`).
    pub fn max_abs(&self, mask: Option<&[bool]>) -> f64 {
        let nc = self.ncoeffs().max(1);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask.is_none_or(|m| m[i / nc]))
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_interior(&self) -> f64 {
        self.max_abs(Some(self.grid.interior_mask()))
    }

    /// Whether every coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn d(&self) -> Result<Self> {
        self.exterior_derivative(StencilOrder::Fourth)
    }

    /// (df)_J = Σ_p (−1)^p ∂_{J[p]} f_{J∖J[p]}.
    pub fn exterior_derivative(&self, order: StencilOrder) -> Result<Self> {
        let n = self.grid.dim();
        if self.degree >= n {
            return Err(Error::TopDegree);
        }
        let k = self.degree;
        let src = multi_indices(n, k);
        let nc_in = src.len();
        let nc_out = binomial(n, k + 1);
        let mut out = vec![0.0; nc_out * self.grid.node_count()];
        for (ci, idx) in src.iter().enumerate() {
            for axis in (0..n).filter(|a| !idx.contains(a)) {
                let pos = idx.iter().filter(|&&i| i < axis).count();
                let mut j = idx.clone();
                j.insert(pos, axis);
                let cj = rank(n, &j);
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                let der = partial(&self.grid, &self.coeffs, nc_in, ci, axis, order);
                for (node, v) in der.iter().enumerate() {
                    out[node * nc_out + cj] += sign * v;
                }
            }
        }
        Ok(Self { grid: self.grid.clone(), degree: k + 1, coeffs: out })
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        wedge(self, other)
    }

    /// Product trapezoid rule of a top-degree form over closed cells.
    pub fn integrate(&self, region: &CellSet) -> Result<Integral> {
        integrate_top_form(self, region)
    }
}

/// One output coefficient of a wedge product: groups of terms (a-index,
/// b-index, sign), one group per unordered split of the output index.
type WedgeTable = Vec<Vec<Vec<(usize, usize, f64)>>>;

fn wedge_table(n: usize, p: usize, q: usize) -> WedgeTable {
    let out = multi_indices(n, p + q);
    out.iter()
        .map(|k| {
            // each unordered split {S, K∖S} is keyed by the part holding k[0];
            // keying independently of factor order keeps wedge(a,b) and
            // wedge(b,a) summing identical products in the same order
            let mut groups: Vec<(Vec<usize>, Vec<(usize, usize, f64)>)> = Vec::new();
            for i_sub in multi_indices(p + q, p) {
                let i: Vec<usize> = i_sub.iter().map(|&t| k[t]).collect();
                let j: Vec<usize> = (0..p + q).filter(|t| !i_sub.contains(t)).map(|t| k[t]).collect();
                let mut seq = i.clone();
                seq.extend(&j);
                let sign = sort_sign(&seq) as f64;
                let key = if i.first() == k.first() { i.clone() } else { j.clone() };
                let term = (rank(n, &i), rank(n, &j), sign);
                match groups.iter_mut().find(|(g, _)| *g == key) {
                    Some((_, terms)) => terms.push(term),
                    None => groups.push((key, vec![term])),
                }
            }
            groups.sort_by(|a, b| a.0.cmp(&b.0));
            groups.into_iter().map(|(_, t)| t).collect()
        })
        .collect()
}

pub fn wedge(a: &FormField, b: &FormField) -> Result<FormField> {
    if !a.grid.same_as(&b.grid) {
        return Err(Error::GridMismatch);
    }
    let n = a.grid.dim();
    let (p, q) = (a.degree, b.degree);
    if p + q > n {
        return Err(Error::WedgeDegree(p + q, n));
    }
    let table = wedge_table(n, p, q);
    let (na, nb, nk) = (binomial(n, p), binomial(n, q), table.len());
    let mut coeffs = vec![0.0; nk * a.grid.node_count()];
    for node in 0..a.grid.node_count() {
        let ac = &a.coeffs[node * na..(node + 1) * na];
        let bc = &b.coeffs[node * nb..(node + 1) * nb];
        for (ck, groups) in table.iter().enumerate() {
            let mut acc: Option<f64> = None;
            for g in groups {
                let v = match g.as_slice() {
                    [(i, j, s)] => s * (ac[*i] * bc[*j]),
                    [(i1, j1, s1), (i2, j2, s2)] => s1 * (ac[*i1] * bc[*j1]) + s2 * (ac[*i2] * bc[*j2]),
                    _ => unreachable!("a split yields at most two ordered terms"),
                };
                acc = Some(acc.map_or(v, |s| s + v));
            }
            coeffs[node * nk + ck] = acc.unwrap_or(0.0);
        }
    }
    Ok(FormField { grid: a.grid.clone(), degree: p + q, coeffs })
}

/// Σ over cells of the mean of the corner values times the cell volume,
/// summed in cell order.
pub fn integrate_top_form(f: &FormField, region: &CellSet) -> Result<Integral> {
    let g = &f.grid;
    if f.degree != g.dim() {
        return Err(Error::InvalidField(format!("expected a top-degree form, got degree {}", f.degree)));
    }
    if !g.same_as(region.grid()) {
        return Err(Error::GridMismatch);
    }
    if region.is_empty() {
        log::warn!("integration over an empty region");
        return Ok(Integral { value: 0.0, empty: true });
    }
    let offs = g.corner_offsets();
    let w = g.cell_volume() / offs.len() as f64;
    let mut total = 0.0;
    for c in region.cells() {
        let b = g.cell_base_node(c);
        let s: f64 = offs.iter().map(|o| f.coeffs[b + o]).sum();
        total += s * w;
    }
    Ok(Integral { value: total, empty: false })
}
