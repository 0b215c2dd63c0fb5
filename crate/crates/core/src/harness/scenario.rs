use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fixture::Fixture;
use super::test_function::TestFunction;
use crate::chart::{CellSet, ChartGrid};
use crate::degree::DegreeOptions;
use crate::error::{Error, Result};
use crate::mollify::MollifierKernel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Subregion of a chart, realized as the cells whose centers it contains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    #[default]
    All,
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Disk {
        center: Vec<f64>,
        radius: f64,
    },
    /// Union of `count` disks with seeded uniform centers.
    RandomDisks {
        count: usize,
        radius: f64,
    },
}

impl RegionSpec {
    /// Cells of `nominal` selected by the region.
    pub fn cells(&self, nominal: &CellSet, seed: u64) -> Result<CellSet> {
        let grid: &Arc<ChartGrid> = nominal.grid();
        let n = grid.dim();
        let check = |v: &[f64]| {
            if v.len() == n {
                Ok(())
            } else {
                Err(Error::Config(format!("region coordinates {v:?} must have {n} components")))
            }
        };
        let picked = match self {
            RegionSpec::All => nominal.clone(),
            RegionSpec::Box { lo, hi } => {
                check(lo)?;
                check(hi)?;
                CellSet::from_predicate(grid, |x| (0..n).all(|a| x[a] >= lo[a] && x[a] <= hi[a])).intersect(nominal)
            }
            RegionSpec::Disk { center, radius } => {
                check(center)?;
                let r2 = radius * radius;
                CellSet::from_predicate(grid, |x| x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < r2)
                    .intersect(nominal)
            }
            RegionSpec::RandomDisks { count, radius } => {
                let (lo, hi) = nominal_box(nominal);
                if (0..n).any(|a| hi[a] - lo[a] <= 2.0 * radius) {
                    return Err(Error::Config(format!("disks of radius {radius} do not fit the chart")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let centers: Vec<Vec<f64>> = (0..*count)
                    .map(|_| (0..n).map(|a| rng.random_range(lo[a] + radius..hi[a] - radius)).collect())
                    .collect();
                let r2 = radius * radius;
                CellSet::from_predicate(grid, |x| {
                    centers.iter().any(|c| x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < r2)
                })
                .intersect(nominal)
            }
        };
        if picked.is_empty() {
            return Err(Error::Config(format!("region {self:?} selects no cells")));
        }
        Ok(picked)
    }
}

/// Coordinate box spanned by the cells of a set.
fn nominal_box(cells: &CellSet) -> (Vec<f64>, Vec<f64>) {
    let g = cells.grid();
    let n = g.dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for c in cells.cells() {
        let x = g.cell_center(c);
        for a in 0..n {
            lo[a] = lo[a].min(x[a] - 0.5 * g.spacing()[a]);
            hi[a] = hi[a].max(x[a] + 0.5 * g.spacing()[a]);
        }
    }
    (lo, hi)
}

/// A check passes when the error is within max(abs, rel · |reference|).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
    /// Relative agreement of the layer-cake and direct routes.
    pub layer_cake: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { abs: 0.0, rel: 0.01, layer_cake: 0.02 }
    }
}

impl Tolerances {
    pub fn allows(&self, err: f64, reference: f64) -> bool {
        err <= self.abs.max(self.rel * reference.abs())
    }
}

fn default_levels() -> usize {
    50
}

fn default_bumps() -> usize {
    8
}

fn default_fraction() -> f64 {
    0.9
}

fn default_chi() -> i32 {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AuditSpec {
    /// ∫_U φ∘ν Pf against Σ φ · deg · area, over every resolution, with the
    /// layer-cake route at the finest one.
    CovCheck {
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        region: RegionSpec,
        #[serde(default)]
        test_function: TestFunction,
    },
    /// ∫ Pf over the surface minus two polar caps of colatitude δ,
    /// extrapolated to δ = 0 and compared with 2πχ.
    GaussBonnet {
        #[serde(default)]
        name: Option<String>,
        deltas: Vec<f64>,
        #[serde(default = "default_chi")]
        euler_characteristic: i32,
    },
    DegreePositivity {
        #[serde(default)]
        name: Option<String>,
        regions: Vec<RegionSpec>,
        /// Bump test functions centred on image points, per region.
        #[serde(default = "default_bumps")]
        bumps: usize,
    },
    /// Σ image measures of disjoint parts against ∫ Pf over the chart.
    ExtrinsicBound {
        #[serde(default)]
        name: Option<String>,
        parts: Vec<RegionSpec>,
    },
    SublevelBoxdim {
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        test_function: TestFunction,
        #[serde(default = "default_levels")]
        levels: usize,
        /// Hölder exponent of the Gauss map; the fixture's when unset.
        #[serde(default)]
        alpha: Option<f64>,
        #[serde(default = "default_fraction")]
        min_fraction: f64,
    },
    /// Pairings ∫ φ · deg(ν_ε) along a mollification schedule.
    WeakDegree {
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        region: RegionSpec,
        eps: Vec<f64>,
        #[serde(default)]
        kernel: MollifierKernel,
        #[serde(default)]
        test_function: TestFunction,
    },
}

impl AuditSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            AuditSpec::CovCheck { .. } => "cov_check",
            AuditSpec::GaussBonnet { .. } => "gauss_bonnet",
            AuditSpec::DegreePositivity { .. } => "degree_positivity",
            AuditSpec::ExtrinsicBound { .. } => "extrinsic_bound",
            AuditSpec::SublevelBoxdim { .. } => "sublevel_boxdim",
            AuditSpec::WeakDegree { .. } => "weak_degree",
        }
    }

    fn given_name(&self) -> Option<&String> {
        match self {
            AuditSpec::CovCheck { name, .. }
            | AuditSpec::GaussBonnet { name, .. }
            | AuditSpec::DegreePositivity { name, .. }
            | AuditSpec::ExtrinsicBound { name, .. }
            | AuditSpec::SublevelBoxdim { name, .. }
            | AuditSpec::WeakDegree { name, .. } => name.as_ref(),
        }
    }

    /// Report name: the given one, else `<index>_<kind>`.
    pub fn name(&self, index: usize) -> String {
        match self.given_name() {
            Some(n) => n.clone(),
            None => format!("{index:02}_{}", self.kind()),
        }
    }
}

fn default_name() -> String {
    "scenario".into()
}

fn default_resolutions() -> Vec<usize> {
    vec![64]
}

fn default_sphere_cells() -> usize {
    32
}

fn default_gap_ceiling() -> f64 {
    0.05
}

fn default_pad() -> usize {
    8
}

/// A fixture, its discretization and the audits to run on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub fixture: Fixture,
    /// Defaults to the fixture's chart.
    #[serde(default)]
    pub chart: Option<ChartBox>,
    /// Cells per unit length, coarsest first; h = 1/k.
    #[serde(default = "default_resolutions")]
    pub resolutions: Vec<usize>,
    /// Ghost node layers around the chart for the derivative stencils.
    #[serde(default = "default_pad")]
    pub pad: usize,
    /// Cells per cube-face axis of the sphere cell grid.
    #[serde(default = "default_sphere_cells")]
    pub sphere_cells: usize,
    #[serde(default)]
    pub degree: DegreeOptions,
    /// Largest non-admissible sphere area before a run is inconclusive.
    #[serde(default = "default_gap_ceiling")]
    pub gap_ceiling: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub audits: Vec<AuditSpec>,
}

impl Default for Scenario {
    fn default() -> Self {
        serde_json::from_str("{}").expect("every scenario field has a default")
    }
}

impl Scenario {
    /// Parses and validates a JSON scenario.
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn chart(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.chart {
            Some(c) => (c.lo.clone(), c.hi.clone()),
            None => self.fixture.default_chart(),
        }
    }

    pub fn finest(&self) -> usize {
        *self.resolutions.iter().max().expect("validated")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.fixture.validate()?;
        if self.resolutions.is_empty() || self.resolutions.iter().any(|&k| k == 0) {
            return bad("resolutions must be a nonempty list of positive integers".into());
        }
        if self.sphere_cells == 0 || self.degree.subsample == 0 {
            return bad("sphere_cells and degree.subsample must be positive".into());
        }
        if self.pad < 4 {
            return bad(format!("pad {} is too thin for the nested stencils (need 4)", self.pad));
        }
        let (lo, hi) = self.chart();
        for &k in &self.resolutions {
            self.fixture.grid(&lo, &hi, 1.0 / k as f64, self.pad)?;
        }
        let n = self.fixture.dim();
        let mut names = std::collections::BTreeSet::new();
        for (i, a) in self.audits.iter().enumerate() {
            if !names.insert(a.name(i)) {
                return bad(format!("duplicate audit name {}", a.name(i)));
            }
            let tf = match a {
                AuditSpec::CovCheck { test_function, .. }
                | AuditSpec::SublevelBoxdim { test_function, .. }
                | AuditSpec::WeakDegree { test_function, .. } => Some(test_function),
                _ => None,
            };
            if let Some(tf) = tf {
                tf.build(n, 1.0)?;
            }
            match a {
                AuditSpec::GaussBonnet { deltas, .. } => {
                    if self.fixture.cover_chart().is_none() {
                        return bad(format!("{} has no closed cover", self.fixture.label()));
                    }
                    if deltas.is_empty() || deltas.iter().any(|d| !(*d > 0.0)) {
                        return bad("gauss_bonnet needs positive deltas".into());
                    }
                }
                AuditSpec::WeakDegree { eps, .. } if eps.len() < 2 || eps.iter().any(|e| !(*e > 0.0)) => {
                    return bad("weak_degree needs at least two positive eps".into());
                }
                AuditSpec::SublevelBoxdim { levels, .. } if *levels == 0 => return bad("levels must be positive".into()),
                _ => {}
            }
        }
        Ok(())
    }
}
