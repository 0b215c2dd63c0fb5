use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chart::ChartGrid;
use crate::error::{Error, Result};

/// Radial bump supported in the closed unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MollifierKernel {
    /// (1 − r²)⁴
    #[default]
    Polynomial,
    /// (1 + cos πr) / 2
    Cosine,
}

impl MollifierKernel {
    pub fn profile(self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        match self {
            MollifierKernel::Polynomial => (1.0 - r * r).powi(4),
            MollifierKernel::Cosine => 0.5 * (1.0 + (PI * r).cos()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MollifierKernel::Polynomial => "polynomial",
            MollifierKernel::Cosine => "cosine",
        }
    }

    /// Discrete φ_ε on the grid lattice, renormalized to unit mass.
    pub fn stencil(self, grid: &ChartGrid, eps: f64) -> Result<KernelStencil> {
        let two_h = 2.0 * grid.max_spacing();
        if !(eps >= two_h) {
            return Err(Error::KernelUnderResolved { eps, two_h });
        }
        let n = grid.dim();
        let radius: Vec<usize> = grid.spacing().iter().map(|h| (eps / h).floor() as usize).collect();
        let mut offsets = Vec::new();
        let mut weights = Vec::new();
        let mut k: Vec<isize> = radius.iter().map(|&r| -(r as isize)).collect();
        loop {
            let r2: f64 = (0..n).map(|a| (k[a] as f64 * grid.spacing()[a] / eps).powi(2)).sum();
            let w = self.profile(r2.sqrt());
            if w > 0.0 {
                offsets.push(k.clone());
                weights.push(w);
            }
            let mut a = n;
            loop {
                if a == 0 {
                    let mass: f64 = weights.iter().sum();
                    weights.iter_mut().for_each(|w| *w /= mass);
                    return Ok(KernelStencil { radius, offsets, weights });
                }
                a -= 1;
                if k[a] < radius[a] as isize {
                    k[a] += 1;
                    break;
                }
                k[a] = -(radius[a] as isize);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct KernelStencil {
    /// Largest offset per axis, in nodes.
    pub radius: Vec<usize>,
    pub offsets: Vec<Vec<isize>>,
    pub weights: Vec<f64>,
}
