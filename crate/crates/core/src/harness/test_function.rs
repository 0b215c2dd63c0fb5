use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::degree::{angle, SphereCellGrid};
use crate::error::{Error, Result};

/// A bounded function on Sⁿ.
pub type SphereFunction = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Test functions φ paired against the degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    Constant { value: f64 },
    /// Indicator of the geodesic ball B(center, radius), smoothed over a
    /// transition band of the given width centred on the rim.
    Cap {
        center: Vec<f64>,
        radius: f64,
        #[serde(default)]
        width: Option<f64>,
    },
    /// Legendre polynomial P_l(⟨z, axis⟩).
    Zonal { axis: Vec<f64>, degree: usize },
    /// Piecewise constant on the cells of a sphere cell grid of resolution k.
    Table { k: usize, values: Vec<f64> },
    /// ⟨z, axis⟩ + offset.
    Linear {
        axis: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
}

impl Default for TestFunction {
    fn default() -> Self {
        TestFunction::Constant { value: 1.0 }
    }
}

fn unit(v: &[f64], n: usize) -> Result<Vec<f64>> {
    if v.len() != n + 1 {
        return Err(Error::Config(format!("direction {v:?} must have {} components", n + 1)));
    }
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Config("direction must be nonzero".into()));
    }
    Ok(v.iter().map(|x| x / r).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn legendre(l: usize, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if l == 0 {
        return p0;
    }
    for k in 1..l {
        let p2 = ((2 * k + 1) as f64 * t * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// 1 below 0, 0 above 1, quintic smoothstep between.
fn falloff(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

impl TestFunction {
    pub fn label(&self) -> String {
        match self {
            TestFunction::Constant { value } => format!("constant {value}"),
            TestFunction::Cap { radius, .. } => format!("cap radius {radius}"),
            TestFunction::Zonal { degree, .. } => format!("zonal P{degree}"),
            TestFunction::Table { k, .. } => format!("table k={k}"),
            TestFunction::Linear { .. } => "linear".into(),
        }
    }

    pub fn is_indicator(&self) -> bool {
        matches!(self, TestFunction::Cap { .. })
    }

    /// Transition width of a cap, `default` when unset.
    pub fn width(&self, default: f64) -> Option<f64> {
        match self {
            TestFunction::Cap { width, .. } => Some(width.unwrap_or(default)),
            _ => None,
        }
    }

    /// The same cap with another transition width.
    pub fn with_width(&self, w: f64) -> Self {
        match self {
            TestFunction::Cap { center, radius, .. } => TestFunction::Cap { center: center.clone(), radius: *radius, width: Some(w) },
            other => other.clone(),
        }
    }

    /// Evaluator on Sⁿ; `default_width` is used by caps without a width.
    pub fn build(&self, n: usize, default_width: f64) -> Result<SphereFunction> {
        match self {
            &TestFunction::Constant { value } => Ok(Arc::new(move |_| value)),
            TestFunction::Cap { center, radius, width } => {
                let c = unit(center, n)?;
                let (r, w) = (*radius, width.unwrap_or(default_width));
                if !(r > 0.0) || !(w > 0.0) {
                    return Err(Error::Config("cap radius and width must be positive".into()));
                }
                Ok(Arc::new(move |z| falloff((angle(z, &c) - r) / w + 0.5)))
            }
            TestFunction::Zonal { axis, degree } => {
                let a = unit(axis, n)?;
                let l = *degree;
                Ok(Arc::new(move |z| legendre(l, dot(z, &a).clamp(-1.0, 1.0))))
            }
            TestFunction::Table { k, values } => {
                let grid = SphereCellGrid::new(n, *k).map_err(|e| Error::Config(e.to_string()))?;
                if values.len() != grid.len() {
                    return Err(Error::Config(format!("table needs {} values, got {}", grid.len(), values.len())));
                }
                let values = values.clone();
                Ok(Arc::new(move |z| values[grid.locate(z)]))
            }
            TestFunction::Linear { axis, offset } => {
                if axis.len() != n + 1 {
                    return Err(Error::Config(format!("axis must have {} components", n + 1)));
                }
                let (a, o) = (axis.clone(), *offset);
                Ok(Arc::new(move |z| dot(z, &a) + o))
            }
        }
    }
}
