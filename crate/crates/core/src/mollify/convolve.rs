use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::kernel::{KernelStencil, MollifierKernel};
use crate::chart::{ChartGrid, MapField};
use crate::error::Result;

/// Smallest integer ≥ m with no prime factor above 7.
fn smooth_size(m: usize) -> usize {
    (m..)
        .find(|&v| {
            let mut r = v;
            for p in [2, 3, 5, 7] {
                while r % p == 0 {
                    r /= p;
                }
            }
            r == 1
        })
        .unwrap()
}

/// Zero-extended linear convolution with a fixed kernel stencil, done by
/// FFT on a padded box.
pub struct Convolver {
    shape: Vec<usize>,
    padded: Vec<usize>,
    pstrides: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    kernel_hat: Vec<Complex64>,
}

impl Convolver {
    pub fn new(grid: &ChartGrid, stencil: &KernelStencil) -> Self {
        let n = grid.dim();
        let shape = grid.shape().to_vec();
        let padded: Vec<usize> = (0..n).map(|a| smooth_size(shape[a] + stencil.radius[a])).collect();
        let mut pstrides = vec![1; n];
        for a in (0..n.saturating_sub(1)).rev() {
            pstrides[a] = pstrides[a + 1] * padded[a + 1];
        }
        let mut planner = FftPlanner::new();
        let forward = padded.iter().map(|&l| planner.plan_fft_forward(l)).collect();
        let inverse = padded.iter().map(|&l| planner.plan_fft_inverse(l)).collect();
        let total: usize = padded.iter().product();
        let mut kern = vec![Complex64::new(0.0, 0.0); total];
        for (o, w) in stencil.offsets.iter().zip(&stencil.weights) {
            let idx: usize = (0..n).map(|a| (o[a].rem_euclid(padded[a] as isize) as usize) * pstrides[a]).sum();
            kern[idx].re += w;
        }
        let mut c = Self { shape, padded, pstrides, forward, inverse, kernel_hat: Vec::new() };
        c.transform(&mut kern, true);
        c.kernel_hat = kern;
        c
    }

    fn transform(&self, data: &mut [Complex64], forward: bool) {
        let n = self.shape.len();
        let total = data.len();
        for a in 0..n {
            let len = self.padded[a];
            let stride = self.pstrides[a];
            let fft = if forward { &self.forward[a] } else { &self.inverse[a] };
            // gather every line along axis a into one contiguous buffer
            let lines = total / len;
            let starts: Vec<usize> = (0..total).filter(|i| (i / stride) % len == 0).collect();
            debug_assert_eq!(starts.len(), lines);
            let mut buf = vec![Complex64::new(0.0, 0.0); total];
            let src: &[Complex64] = data;
            buf.par_chunks_mut(len).zip(starts.par_iter()).for_each(|(line, &s)| {
                for (j, v) in line.iter_mut().enumerate() {
                    *v = src[s + j * stride];
                }
            });
            buf.par_chunks_mut(len * 64).for_each(|chunk| {
                let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
                fft.process_with_scratch(chunk, &mut scratch);
            });
            for (line, &s) in buf.chunks(len).zip(&starts) {
                for (j, v) in line.iter().enumerate() {
                    data[s + j * stride] = *v;
                }
            }
        }
    }

    /// Convolves one component of node-major interleaved data.
    pub fn apply(&self, data: &[f64], ncomp: usize, comp: usize) -> Vec<f64> {
        let n = self.shape.len();
        let total: usize = self.padded.iter().product();
        let count: usize = self.shape.iter().product();
        let mut buf = vec![Complex64::new(0.0, 0.0); total];
        let mut sstrides = vec![1; n];
        for a in (0..n.saturating_sub(1)).rev() {
            sstrides[a] = sstrides[a + 1] * self.shape[a + 1];
        }
        let padded_index = |node: usize| -> usize { (0..n).map(|a| (node / sstrides[a]) % self.shape[a] * self.pstrides[a]).sum() };
        for node in 0..count {
            buf[padded_index(node)].re = data[node * ncomp + comp];
        }
        self.transform(&mut buf, true);
        buf.par_iter_mut().zip(&self.kernel_hat).for_each(|(b, k)| *b *= k);
        self.transform(&mut buf, false);
        let scale = 1.0 / total as f64;
        (0..count).map(|node| buf[padded_index(node)].re * scale).collect()
    }
}

/// Nodes whose kernel support lies inside the chart.
pub fn valid_mask(grid: &ChartGrid, radius: &[usize]) -> Vec<bool> {
    let n = grid.dim();
    (0..grid.node_count())
        .map(|node| {
            (0..n).all(|a| {
                let i = grid.axis_index(node, a);
                i >= radius[a] && i + radius[a] < grid.shape()[a]
            })
        })
        .collect()
}

/// Mollified field with the set of nodes unaffected by zero extension.
#[derive(Debug, Clone)]
pub struct Mollified {
    pub field: MapField,
    pub valid: Vec<bool>,
}

/// Convolves every component of node-major data with φ_ε.
pub fn mollify_components(grid: &ChartGrid, data: &[f64], ncomp: usize, kernel: MollifierKernel, eps: f64) -> Result<(Vec<f64>, Vec<bool>)> {
    let stencil = kernel.stencil(grid, eps)?;
    let conv = Convolver::new(grid, &stencil);
    let mut out = vec![0.0; data.len()];
    for c in 0..ncomp {
        for (node, v) in conv.apply(data, ncomp, c).into_iter().enumerate() {
            out[node * ncomp + c] = v;
        }
    }
    Ok((out, valid_mask(grid, &stencil.radius)))
}

/// φ_ε ∗ (f χ_U) on the chart grid.
pub fn mollify_field(f: &MapField, kernel: MollifierKernel, eps: f64) -> Result<Mollified> {
    let (values, valid) = mollify_components(f.grid(), f.values(), f.target_dim(), kernel, eps)?;
    Ok(Mollified { field: MapField::new(f.grid(), f.target_dim(), values)?, valid })
}

/// Direct evaluation of the discrete convolution at one node.
pub fn convolve_direct(grid: &ChartGrid, data: &[f64], ncomp: usize, comp: usize, stencil: &KernelStencil, node: usize) -> f64 {
    let n = grid.dim();
    let mut acc = 0.0;
    'outer: for (o, w) in stencil.offsets.iter().zip(&stencil.weights) {
        let mut idx = 0;
        for a in 0..n {
            let i = grid.axis_index(node, a) as isize + o[a];
            if i < 0 || i >= grid.shape()[a] as isize {
                continue 'outer;
            }
            idx += i as usize * grid.strides()[a];
        }
        acc += w * data[idx * ncomp + comp];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_matches_direct_sum_including_edges() {
        let g = ChartGrid::new(vec![0.0, 0.0], vec![0.05, 0.04], vec![23, 31]).unwrap();
        let data: Vec<f64> = (0..g.node_count() * 2).map(|i| ((i * 7919) % 101) as f64 / 101.0 - 0.3).collect();
        let st = MollifierKernel::Polynomial.stencil(&g, 0.17).unwrap();
        let conv = Convolver::new(&g, &st);
        for comp in 0..2 {
            let fast = conv.apply(&data, 2, comp);
            for node in 0..g.node_count() {
                assert!((fast[node] - convolve_direct(&g, &data, 2, comp, &st, node)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(smooth_size(11), 12);
        assert_eq!(smooth_size(97), 98);
        assert_eq!(smooth_size(128), 128);
    }
}
