use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::quadrature::gauss_legendre_on;
use crate::chart::{ChartGrid, MapField, StencilOrder};
use crate::error::{Error, Result};
use crate::geometry::{gauss_map, metric_from_immersion, GeometryOptions};

/// Lacunary series Σ_{k=1..depth} amplitude · a^{−k·decay} sin(a^k ⟨ω_k, x⟩ + phase_k).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoughnessSpec {
    pub alpha: f64,
    pub lacunarity: u32,
    pub depth: u32,
    pub amplitude: f64,
    pub seed: u64,
}

impl RoughnessSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if self.lacunarity < 2 || self.depth < 1 || !(self.amplitude >= 0.0) {
            return Err(Error::InvalidParameter("need lacunarity ≥ 2, depth ≥ 1, amplitude ≥ 0".into()));
        }
        Ok(())
    }
}

/// Terms of a lacunary series in ℝⁿ: frequency, direction and phase.
#[derive(Debug, Clone)]
pub struct LacunarySeries {
    pub amplitude: f64,
    terms: Vec<(f64, f64, Vec<f64>, f64)>,
}

impl LacunarySeries {
    /// Coefficients a^{−k·decay}; decay = α gives a C^{0,α} sum, decay =
    /// 1 + α a C^{1,α} one.
    pub fn new(spec: &RoughnessSpec, dim: usize, decay: f64) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let a = spec.lacunarity as f64;
        let terms = (1..=spec.depth)
            .map(|k| {
                let freq = a.powi(k as i32);
                let dir: Vec<f64> = if dim == 1 {
                    vec![1.0]
                } else {
                    loop {
                        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                        if r > 0.1 && r <= 1.0 {
                            break v.iter().map(|x| x / r).collect();
                        }
                    }
                };
                let phase = rng.random_range(0.0..TAU);
                (freq, freq.powf(-decay), dir, phase)
            })
            .collect();
        Ok(Self { amplitude: spec.amplitude, terms })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.amplitude
            * self
                .terms
                .iter()
                .map(|(f, c, dir, ph)| c * (f * dir.iter().zip(x).map(|(d, v)| d * v).sum::<f64>() + ph).sin())
                .sum::<f64>()
    }
}

/// Scalar C^{0,α} lacunary field on the grid.
pub fn lacunary_field(grid: &Arc<ChartGrid>, spec: &RoughnessSpec) -> Result<MapField> {
    let series = LacunarySeries::new(spec, grid.dim(), spec.alpha)?;
    MapField::from_fn(grid, 1, |x| vec![series.eval(x)])
}

/// base + (C^{1,α} lacunary series)·ν_base.
pub fn lacunary_immersion(base: &MapField, spec: &RoughnessSpec) -> Result<MapField> {
    let grid = base.grid();
    let opts = GeometryOptions::default();
    if spec.amplitude == 0.0 {
        spec.validate()?;
        return Ok(base.clone());
    }
    let nu = gauss_map(base, &opts)?;
    let series = LacunarySeries::new(spec, grid.dim(), 1.0 + spec.alpha)?;
    let m = base.target_dim();
    let mut values = base.values().to_vec();
    for node in 0..grid.node_count() {
        let p = series.eval(&grid.point(node));
        for c in 0..m {
            values[node * m + c] += p * nu.at(node)[c];
        }
    }
    let y = MapField::new(grid, m, values)?;
    match metric_from_immersion(&y, &opts) {
        Ok(_) => {}
        Err(Error::NotImmersion(_)) | Err(Error::NotPositiveDefinite(_)) => return Err(Error::AmplitudeTooLarge),
        Err(e) => return Err(e),
    }
    // folds can fall between nodes; require every perturbed tangent vector
    // to keep a positive projection on its base vector (sym(Dbaseᵀ Dy) > 0)
    let n = grid.dim();
    let jb = base.jacobian(StencilOrder::Fourth);
    let jy = y.jacobian(StencilOrder::Fourth);
    for node in 0..grid.node_count() {
        let cols = |j: &[Vec<f64>]| DMatrix::from_fn(m, n, |c, a| j[a][node * m + c]);
        let (db, dy) = (cols(&jb), cols(&jy));
        let cross = db.transpose() * dy;
        let sym = (&cross + cross.transpose()) * 0.5 - (db.transpose() * &db) * 1e-10;
        if sym.cholesky().is_none() {
            return Err(Error::AmplitudeTooLarge);
        }
    }
    Ok(y)
}

/// Angle of the unit tangent of a corrugation, as a function of x₁.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CorrugationProfile {
    /// C^{0,α} lacunary series in x₁.
    Lacunary(RoughnessSpec),
    /// amplitude · |x₁|^α, self-similar around x₁ = 0.
    Cusp { alpha: f64, amplitude: f64 },
}

impl CorrugationProfile {
    pub fn alpha(&self) -> f64 {
        match self {
            CorrugationProfile::Lacunary(s) => s.alpha,
            CorrugationProfile::Cusp { alpha, .. } => *alpha,
        }
    }

    fn angle_fn(&self) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        match self {
            CorrugationProfile::Lacunary(spec) => {
                let series = LacunarySeries::new(spec, 1, spec.alpha)?;
                Ok(Box::new(move |x| series.eval(&[x])))
            }
            &CorrugationProfile::Cusp { alpha, amplitude } => {
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 1]")));
                }
                Ok(Box::new(move |x: f64| amplitude * x.abs().powf(alpha)))
            }
        }
    }
}

/// Developable corrugation y(x) = (γ(x₁), x₂, …, xₙ) with |γ′| = 1 and the
/// angle of γ′ given by the profile, so the induced metric is the identity
/// while Dy is only C^{0,α}.
pub fn corrugated_immersion(grid: &Arc<ChartGrid>, profile: &CorrugationProfile) -> Result<MapField> {
    let psi = profile.angle_fn()?;
    let n = grid.dim();
    let x0 = grid.origin()[0];
    let h = grid.spacing()[0];
    let shape0 = grid.shape()[0];
    // γ at the x₁ nodes by Gauss–Legendre on each interval
    let mut gamma = vec![[0.0f64; 2]; shape0];
    for i in 1..shape0 {
        let (xs, ws) = gauss_legendre_on(16, x0 + (i - 1) as f64 * h, x0 + i as f64 * h);
        let mut step = [0.0; 2];
        for (x, w) in xs.iter().zip(&ws) {
            let t = psi(*x);
            step[0] += w * t.cos();
            step[1] += w * t.sin();
        }
        gamma[i] = [gamma[i - 1][0] + step[0], gamma[i - 1][1] + step[1]];
    }
    let mut values = Vec::with_capacity(grid.node_count() * (n + 1));
    for node in 0..grid.node_count() {
        let i = grid.axis_index(node, 0);
        values.extend_from_slice(&gamma[i]);
        for a in 1..n {
            values.push(grid.coord(node, a));
        }
    }
    MapField::new(grid, n + 1, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(alpha: f64) -> RoughnessSpec {
        RoughnessSpec { alpha, lacunarity: 2, depth: 6, amplitude: 1e-3, seed: 7 }
    }

    #[test]
    fn seeded_series_is_reproducible() {
        let a = LacunarySeries::new(&spec(0.8), 2, 1.8).unwrap();
        let b = LacunarySeries::new(&spec(0.8), 2, 1.8).unwrap();
        assert_eq!(a.eval(&[0.3, 0.4]), b.eval(&[0.3, 0.4]));
        let c = LacunarySeries::new(&RoughnessSpec { seed: 8, ..spec(0.8) }, 2, 1.8).unwrap();
        assert_ne!(a.eval(&[0.3, 0.4]), c.eval(&[0.3, 0.4]));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(spec(0.0).validate().is_err());
        assert!(spec(1.2).validate().is_err());
        assert!(RoughnessSpec { depth: 0, ..spec(0.5) }.validate().is_err());
    }

    #[test]
    fn corrugation_has_unit_speed() {
        let g = ChartGrid::new(vec![0.0, 0.0], vec![1.0 / 512.0, 0.1], vec![513, 6]).unwrap();
        let y = corrugated_immersion(&g, &CorrugationProfile::Lacunary(RoughnessSpec { amplitude: 1.0, ..spec(0.7) })).unwrap();
        // chord over one interval is within O(h²) of the arc length h
        let h = g.spacing()[0];
        for i in 0..512 {
            let (p, q) = (y.at(g.node_index(&[i, 0])), y.at(g.node_index(&[i + 1, 0])));
            let chord = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
            assert!(chord <= h * (1.0 + 1e-12) && chord > h * (1.0 - 1e-3));
            assert_eq!(p[2], g.coord(g.node_index(&[i, 0]), 1));
        }
    }
}
