use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chart::{ChartGrid, MapField};
use crate::error::{Error, Result};
use crate::mollify::{lacunary_immersion, RoughnessSpec};

fn one() -> f64 {
    1.0
}

/// Parametrized hypersurfaces the audits run on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Fixture {
    /// Round sphere in polar coordinates (θ, φ).
    Sphere {
        #[serde(default = "one")]
        radius: f64,
    },
    /// (a sin θ cos φ, b sin θ sin φ, c cos θ).
    Ellipsoid { axes: [f64; 3] },
    /// (r cos x₂, r sin x₂, x₁).
    Cylinder {
        #[serde(default = "one")]
        radius: f64,
    },
    Plane,
    /// Graph of (a x₁² + b x₂²) / 2.
    Graph { a: f64, b: f64 },
    /// Unit sphere plus a C^{1,α} lacunary series times the normal.
    LacunarySphere { roughness: RoughnessSpec },
    /// Unit S⁴ ⊂ ℝ⁵ in hyperspherical coordinates.
    Sphere4,
}

impl Default for Fixture {
    fn default() -> Self {
        Fixture::Sphere { radius: 1.0 }
    }
}

fn polar(r: [f64; 3], x: &[f64]) -> Vec<f64> {
    let (st, ct) = x[0].sin_cos();
    let (sp, cp) = x[1].sin_cos();
    vec![r[0] * st * cp, r[1] * st * sp, r[2] * ct]
}

impl Fixture {
    pub fn dim(&self) -> usize {
        match self {
            Fixture::Sphere4 => 4,
            _ => 2,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Fixture::Sphere { radius } => format!("sphere(r={radius})"),
            Fixture::Ellipsoid { axes } => format!("ellipsoid({},{},{})", axes[0], axes[1], axes[2]),
            Fixture::Cylinder { radius } => format!("cylinder(r={radius})"),
            Fixture::Plane => "plane".into(),
            Fixture::Graph { a, b } => format!("graph(a={a},b={b})"),
            Fixture::LacunarySphere { roughness } => format!("lacunary sphere(alpha={})", roughness.alpha),
            Fixture::Sphere4 => "S4".into(),
        }
    }

    /// Polar-coordinate fixtures, whose θ = 0 and θ = π lines are the poles.
    pub fn is_polar(&self) -> bool {
        matches!(self, Fixture::Sphere { .. } | Fixture::Ellipsoid { .. } | Fixture::LacunarySphere { .. })
    }

    /// Pointwise positive Pfaffian.
    pub fn positive_curvature(&self) -> bool {
        match self {
            Fixture::Sphere { .. } | Fixture::Ellipsoid { .. } | Fixture::Sphere4 => true,
            Fixture::Graph { a, b } => a * b > 0.0,
            _ => false,
        }
    }

    /// Hölder exponent of the Gauss map.
    pub fn alpha(&self) -> f64 {
        match self {
            Fixture::LacunarySphere { roughness } => roughness.alpha,
            _ => 1.0,
        }
    }

    pub fn default_chart(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            f if f.is_polar() => (vec![0.3, 0.0], vec![PI - 0.3, 2.0 * PI]),
            Fixture::Cylinder { .. } => (vec![-1.0, 0.0], vec![1.0, 2.0 * PI]),
            Fixture::Plane => (vec![0.0, 0.0], vec![1.0, 1.0]),
            Fixture::Graph { .. } => (vec![-1.0, -1.0], vec![1.0, 1.0]),
            _ => (vec![1.0, 1.0, 1.0, 0.0], vec![1.4, 1.4, 1.4, 0.4]),
        }
    }

    /// Chart of the whole surface for the closed-cover runs; axis 0 is
    /// trimmed by δ at both ends.
    pub fn cover_chart(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            f if f.is_polar() => Some((vec![0.0, 0.0], vec![PI, 2.0 * PI])),
            Fixture::Cylinder { .. } => Some((vec![-1.0, 0.0], vec![1.0, 2.0 * PI])),
            _ => None,
        }
    }

    /// Open box on which the parametrization is an immersion.
    pub fn domain(&self) -> (Vec<f64>, Vec<f64>) {
        let big = f64::INFINITY;
        match self {
            f if f.is_polar() => (vec![0.0, -big], vec![PI, big]),
            Fixture::Sphere4 => (vec![0.0, 0.0, 0.0, -big], vec![PI, PI, PI, big]),
            _ => (vec![-big, -big], vec![big, big]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match self {
            Fixture::Sphere { radius } | Fixture::Cylinder { radius } if !(*radius > 0.0) => {
                bad(format!("radius {radius} must be positive"))
            }
            Fixture::Ellipsoid { axes } if axes.iter().any(|a| !(*a > 0.0)) => bad(format!("axes {axes:?} must be positive")),
            Fixture::Graph { a, b } if !(a.is_finite() && b.is_finite()) => bad("graph coefficients must be finite".into()),
            Fixture::LacunarySphere { roughness } => roughness.validate().map_err(|e| Error::Config(e.to_string())),
            _ => Ok(()),
        }
    }

    /// Grid over [lo, hi] with spacing at most h, padded by `pad` nodes; the
    /// padded grid must stay inside the domain.
    pub fn grid(&self, lo: &[f64], hi: &[f64], h: f64, pad: usize) -> Result<Arc<ChartGrid>> {
        let n = self.dim();
        if lo.len() != n || hi.len() != n {
            return Err(Error::Config(format!("chart must have {n} coordinates")));
        }
        if (0..n).any(|a| !(hi[a] > lo[a])) {
            return Err(Error::Config(format!("empty chart {lo:?}..{hi:?}")));
        }
        let cells: Vec<usize> = (0..n).map(|a| ((hi[a] - lo[a]) / h - 1e-9).ceil().max(4.0) as usize).collect();
        let grid = ChartGrid::padded_box(lo, hi, &cells, pad)?;
        let (dlo, dhi) = self.domain();
        let (glo, ghi) = (grid.lower(), grid.upper());
        if (0..n).any(|a| glo[a] <= dlo[a] || ghi[a] >= dhi[a]) {
            return Err(Error::Config(format!(
                "chart {lo:?}..{hi:?} plus {pad} ghost layers leaves the domain of {}",
                self.label()
            )));
        }
        Ok(grid)
    }

    /// The immersion sampled on the grid.
    pub fn sample(&self, grid: &Arc<ChartGrid>) -> Result<MapField> {
        if grid.dim() != self.dim() {
            return Err(Error::GridMismatch);
        }
        match self {
            &Fixture::Sphere { radius } => MapField::from_fn(grid, 3, |x| polar([radius; 3], x)),
            &Fixture::Ellipsoid { axes } => MapField::from_fn(grid, 3, |x| polar(axes, x)),
            &Fixture::Cylinder { radius } => MapField::from_fn(grid, 3, |x| vec![radius * x[1].cos(), radius * x[1].sin(), x[0]]),
            Fixture::Plane => MapField::from_fn(grid, 3, |x| vec![x[0], x[1], 0.0]),
            &Fixture::Graph { a, b } => MapField::from_fn(grid, 3, |x| vec![x[0], x[1], 0.5 * (a * x[0] * x[0] + b * x[1] * x[1])]),
            Fixture::LacunarySphere { roughness } => {
                let base = MapField::from_fn(grid, 3, |x| polar([1.0; 3], x))?;
                lacunary_immersion(&base, roughness)
            }
            Fixture::Sphere4 => MapField::from_fn(grid, 5, |a| {
                let (s1, s2, s3) = (a[0].sin(), a[1].sin(), a[2].sin());
                vec![a[0].cos(), s1 * a[1].cos(), s1 * s2 * a[2].cos(), s1 * s2 * s3 * a[3].cos(), s1 * s2 * s3 * a[3].sin()]
            }),
        }
    }
}
