use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::report::{AuditReport, RunSummary, Status, Table};
use super::runner::{Prepared, Runner};
use super::scenario::{AuditSpec, RegionSpec, Scenario};
use crate::chart::{io, ChartGrid};
use crate::chern::{calibrate_transgression, gbc_primitive, Convention};
use crate::degree::{degree_field, SphereCellGrid};
use crate::error::{Error, Result};
use crate::fractal::{
    flux_form, fractal_integral, level_set_boxdim, sample_levels, verify_whitney, whitney_census_slope, whitney_decompose, Annulus,
    AxisBox, Ball, ConstantFamily, FractalIntegral, FractalIntegralOptions, MollifiedFamily, Polygon, Region,
};
use crate::geometry::{structural_residual, GeometryOptions, ImmersionGeometry};
use crate::mollify::{corrugated_immersion, lacunary_field, metric_defect_scan, CorrugationProfile, MollifierKernel, RoughnessSpec};

/// CLI subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Frames,
    Pfaffian,
    Chern,
    Degree,
    Whitney,
    Boxdim,
    Fractint,
    MollifyScan,
    CovCheck,
    Audit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Frames => "frames",
            Command::Pfaffian => "pfaffian",
            Command::Chern => "chern",
            Command::Degree => "degree",
            Command::Whitney => "whitney",
            Command::Boxdim => "boxdim",
            Command::Fractint => "fractint",
            Command::MollifyScan => "mollify-scan",
            Command::CovCheck => "cov-check",
            Command::Audit => "audit",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        [
            Command::Frames,
            Command::Pfaffian,
            Command::Chern,
            Command::Degree,
            Command::Whitney,
            Command::Boxdim,
            Command::Fractint,
            Command::MollifyScan,
            Command::CovCheck,
            Command::Audit,
        ]
        .into_iter()
        .find(|c| c.name() == name)
    }
}

/// Values given on the command line that take precedence over the config.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    /// Replaces the resolution list of scenario commands.
    pub resolution: Option<usize>,
}

fn parse_config<T: DeserializeOwned + Default>(text: Option<&str>) -> Result<T> {
    match text {
        None => Ok(T::default()),
        Some(t) => serde_json::from_str(t).map_err(|e| Error::Config(e.to_string())),
    }
}

/// Runs a subcommand on a JSON config (defaults when `None`) and writes its
/// reports and `result.json` to `out`.
pub fn execute(cmd: Command, config: Option<&str>, ov: Overrides, out: Option<&Path>) -> Result<(RunSummary, Vec<AuditReport>)> {
    let (name, seed, reports) = match cmd {
        Command::Whitney => {
            let c: WhitneyConfig = parse_config(config)?;
            ("whitney".to_string(), 0, vec![whitney(&c)?])
        }
        Command::Fractint => {
            let c: FractintConfig = parse_config(config)?;
            ("fractint".to_string(), 0, vec![fractint(&c)?])
        }
        Command::Boxdim => {
            let mut c: BoxdimConfig = parse_config(config)?;
            if let Some(s) = ov.seed {
                c.seed = s;
            }
            if let Some(k) = ov.resolution {
                c.resolution = k;
            }
            ("boxdim".to_string(), c.seed, vec![boxdim(&c)?])
        }
        Command::MollifyScan => {
            let mut c: MollifyConfig = parse_config(config)?;
            if let Some(k) = ov.resolution {
                c.resolution = k;
            }
            ("mollify-scan".to_string(), 0, vec![mollify_scan(&c)?])
        }
        _ => {
            let mut s: Scenario = parse_config(config)?;
            if let Some(seed) = ov.seed {
                s.seed = seed;
            }
            if let Some(k) = ov.resolution {
                s.resolutions = vec![k];
            }
            s.validate()?;
            let reports = scenario_command(cmd, &mut s)?;
            if let (Command::Frames | Command::Pfaffian, Some(dir)) = (cmd, out) {
                write_fields(&s, &dir.join("fields"))?;
            }
            (s.name.clone(), s.seed, reports)
        }
    };
    let summary = RunSummary::from_reports(&name, seed, &reports);
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        for r in &reports {
            r.write(dir)?;
        }
        summary.write(dir)?;
    }
    Ok((summary, reports))
}

fn scenario_command(cmd: Command, s: &mut Scenario) -> Result<Vec<AuditReport>> {
    match cmd {
        Command::Audit => Ok(Runner::new(s)?.run_all()),
        Command::CovCheck => {
            s.audits.retain(|a| matches!(a, AuditSpec::CovCheck { .. }));
            if s.audits.is_empty() {
                s.audits.push(AuditSpec::CovCheck { name: Some("cov_check".into()), region: RegionSpec::All, test_function: Default::default() });
            }
            Ok(Runner::new(s)?.run_all())
        }
        Command::Frames => Ok(vec![frames(s)?]),
        Command::Pfaffian => Ok(vec![pfaffian_report(s)?]),
        Command::Chern => Ok(vec![chern(s)?]),
        Command::Degree => Ok(vec![degree(s)?]),
        _ => unreachable!("not a scenario command"),
    }
}

fn prepare(s: &Scenario) -> Result<(Prepared, ImmersionGeometry)> {
    let (lo, hi) = s.chart();
    let p = Prepared::new(&s.fixture, &lo, &hi, s.finest(), s.pad)?;
    let geo = ImmersionGeometry::compute(&p.y, &GeometryOptions::default())?;
    Ok((p, geo))
}

fn frames(s: &Scenario) -> Result<AuditReport> {
    let (p, geo) = prepare(s)?;
    let mask = p.grid.inset_mask(s.pad);
    let n = s.fixture.dim();
    let mut orth: f64 = 0.0;
    for node in (0..p.grid.node_count()).filter(|&i| mask[i]) {
        let f = geo.bundle.frame_matrix(node);
        let gram = f.transpose() * geo.metric.matrix(node) * &f;
        for i in 0..n {
            for j in 0..n {
                orth = orth.max((gram[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    let mut rep = AuditReport::new("frames", "frames");
    rep.metric("resolution", p.resolution as f64);
    rep.metric("orthonormality_error", orth);
    rep.metric("structural_residual", structural_residual(&geo.bundle)?);
    rep.metric("min_metric_eigenvalue", geo.metric.min_eigenvalue().0);
    rep.notes.push(format!("fixture {}", s.fixture.label()));
    Ok(rep)
}

fn pfaffian_report(s: &Scenario) -> Result<AuditReport> {
    let (p, geo) = prepare(s)?;
    let mask = p.grid.inset_mask(s.pad);
    let nominal = &p.nominal;
    let mut rep = AuditReport::new("pfaffian", "pfaffian");
    rep.metric("resolution", p.resolution as f64);
    rep.metric("pfaffian_integral", geo.pfaffian.integrate(nominal)?.value);
    rep.metric("pullback_integral", geo.pullback.integrate(nominal)?.value);
    rep.metric("max_pfaffian_minus_pullback", geo.pfaffian.sub(&geo.pullback)?.max_abs(Some(&mask)));
    let mut t = Table::new(&["x0", "x1", "pfaffian", "pullback"]);
    if s.fixture.dim() == 2 {
        let g = &p.grid;
        let stride = (p.resolution / 32).max(1);
        for node in (0..g.node_count()).filter(|&i| mask[i]) {
            let idx = g.node_multi(node);
            if idx.iter().all(|i| (i - s.pad) % stride == 0) {
                t.push(vec![g.coord(node, 0), g.coord(node, 1), geo.pfaffian.get(node, 0), geo.pullback.get(node, 0)]);
            }
        }
        rep.table("nodes", t);
    }
    Ok(rep)
}

fn chern(s: &Scenario) -> Result<AuditReport> {
    let (p, geo) = prepare(s)?;
    let mask = p.grid.inset_mask(s.pad);
    let nominal = gbc_primitive(&geo.bundle, Convention::Nominal, None)?;
    let cal = calibrate_transgression(&geo.bundle, Some(&mask))?;
    let mut rep = AuditReport::new("chern", "chern");
    rep.metric("resolution", p.resolution as f64);
    for (i, c) in nominal.coefficients.iter().enumerate() {
        rep.metric(&format!("coefficient_{i}"), *c);
    }
    rep.metric("c_star", cal.c_star);
    rep.metric("relative_residual", cal.relative_residual);
    Ok(rep)
}

fn degree(s: &Scenario) -> Result<AuditReport> {
    let (p, geo) = prepare(s)?;
    let nominal = &p.nominal;
    let cells = SphereCellGrid::new(s.fixture.dim(), s.sphere_cells)?;
    let d = degree_field(&geo.normal, nominal, &cells, &s.degree)?;
    let lhs = geo.pfaffian.integrate(nominal)?.value;
    let mut rep = AuditReport::new("degree", "degree");
    rep.metric("resolution", p.resolution as f64);
    rep.metric("degree_integral", d.integral);
    rep.metric("pfaffian_integral", lhs);
    rep.metric("abs_diff", (lhs - d.integral).abs());
    rep.metric("excluded_area", d.excluded_area);
    rep.metric("targets", d.rows.len() as f64);
    let m = s.fixture.dim() + 1;
    let mut cols: Vec<String> = (0..m).map(|a| format!("z{a}")).collect();
    cols.extend(["cell", "area", "degree", "regular", "clearance"].map(String::from));
    let mut t = Table { columns: cols, rows: Vec::new() };
    for r in &d.rows {
        let mut row = r.target.clone();
        row.extend([r.cell as f64, r.area, r.degree as f64, if r.regular { 1.0 } else { 0.0 }, r.clearance]);
        t.push(row);
    }
    rep.table("targets", t);
    if d.excluded_area > s.gap_ceiling {
        rep.status = Status::Inconclusive;
    }
    Ok(rep)
}

/// Open sets for the Whitney and fractal-integral commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum FractalRegion {
    UnitSquare,
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Disk { center: Vec<f64>, radius: f64 },
    Annulus { center: Vec<f64>, inner: f64, outer: f64 },
    Koch { center: [f64; 2], side: f64, generation: u32 },
}

impl Default for FractalRegion {
    fn default() -> Self {
        FractalRegion::Koch { center: [0.5, 0.5], side: 0.8, generation: 6 }
    }
}

impl FractalRegion {
    pub fn build(&self) -> Result<Box<dyn Region>> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        Ok(match self {
            FractalRegion::UnitSquare => Box::new(AxisBox::unit_cube(2)),
            FractalRegion::Box { lo, hi } => {
                if lo.len() != hi.len() || lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                    return bad("box needs lo < hi componentwise");
                }
                Box::new(AxisBox { lo: lo.clone(), hi: hi.clone() })
            }
            FractalRegion::Disk { center, radius } => {
                if !(*radius > 0.0) {
                    return bad("disk radius must be positive");
                }
                Box::new(Ball { center: center.clone(), radius: *radius })
            }
            FractalRegion::Annulus { center, inner, outer } => {
                if !(*inner > 0.0 && inner < outer) {
                    return bad("annulus needs 0 < inner < outer");
                }
                Box::new(Annulus { center: center.clone(), inner: *inner, outer: *outer })
            }
            &FractalRegion::Koch { center, side, generation } => {
                Box::new(Polygon::koch_snowflake(center, side, generation).map_err(|e| Error::Config(e.to_string()))?)
            }
        })
    }
}

fn default_k_max() -> i32 {
    9
}

fn default_gap() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WhitneyConfig {
    pub region: FractalRegion,
    pub k_max: i32,
    /// Boundary sample spacing of the independent distance check.
    pub gap: f64,
    /// Generations [lo, hi] of the census fit; the six finest when unset.
    pub census: Option<[i32; 2]>,
}

impl Default for WhitneyConfig {
    fn default() -> Self {
        Self { region: FractalRegion::default(), k_max: default_k_max(), gap: default_gap(), census: None }
    }
}

fn whitney(c: &WhitneyConfig) -> Result<AuditReport> {
    if !(1..=20).contains(&c.k_max) || !(c.gap > 0.0) {
        return Err(Error::Config("need 1 ≤ k_max ≤ 20 and gap > 0".into()));
    }
    let region = c.region.build()?;
    let w = whitney_decompose(region.as_ref(), c.k_max)?;
    let audit = verify_whitney(&w, region.as_ref(), c.gap);
    let mut rep = AuditReport::new("whitney", "whitney");
    rep.metric("cubes", w.cubes.len() as f64);
    rep.metric("volume", w.volume());
    rep.metric("unresolved_volume", w.unresolved_volume);
    rep.metric("uncertified", w.uncertified as f64);
    rep.metric("checked", audit.checked as f64);
    rep.metric("violations", audit.violations as f64);
    rep.metric("outside", audit.outside as f64);
    rep.metric("min_ratio", audit.min_ratio);
    rep.metric("max_ratio", audit.max_ratio);
    let [lo, hi] = c.census.unwrap_or([c.k_max - 5, c.k_max]);
    match whitney_census_slope(&w, lo, hi) {
        Ok(s) => rep.metric("census_slope", s),
        Err(e) => rep.notes.push(format!("census slope: {e}")),
    }
    let mut t = Table::new(&["k", "cubes"]);
    for (k, m) in &w.census {
        t.push(vec![*k as f64, *m as f64]);
    }
    rep.table("census", t);
    let mut cubes = Table::new(&["k", "l0", "l1"]);
    if w.dim == 2 {
        for q in &w.cubes {
            cubes.push(vec![q.k as f64, q.l[0] as f64, q.l[1] as f64]);
        }
        rep.table("cubes", cubes);
    }
    rep.notes.push(region.label());
    if !audit.passed() {
        rep.status = Status::Fail;
    }
    Ok(rep)
}

/// Vector fields F whose flux form ⋆F is integrated, ∫ d⋆F = ∫ div F.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FluxField {
    /// F = (x₁, 0); the integral is the area.
    #[default]
    Area,
    /// F = (x₁³, sin x₂).
    CubicSine,
    /// F = (sin(3x₁ + 1) cos 2x₂, x₁² x₂ + cos x₁).
    Oscillatory,
}

impl FluxField {
    fn eval(self, x: &[f64]) -> Vec<f64> {
        match self {
            FluxField::Area => flux_form(&[x[0], 0.0]),
            FluxField::CubicSine => flux_form(&[x[0].powi(3), x[1].sin()]),
            FluxField::Oscillatory => flux_form(&[(3.0 * x[0] + 1.0).sin() * (2.0 * x[1]).cos(), x[0] * x[0] * x[1] + x[0].cos()]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FractintConfig {
    pub region: FractalRegion,
    pub k_max: i32,
    pub field: FluxField,
    /// Mollified families, one per kernel; the unmollified form when empty.
    pub kernels: Vec<MollifierKernel>,
    /// Largest allowed spread of the values across kernels.
    pub kernel_tolerance: f64,
    pub options: FractalIntegralOptions,
}

impl Default for FractintConfig {
    fn default() -> Self {
        Self {
            region: FractalRegion::default(),
            k_max: default_k_max(),
            field: FluxField::default(),
            kernels: vec![MollifierKernel::Polynomial, MollifierKernel::Cosine],
            kernel_tolerance: 1e-2,
            options: FractalIntegralOptions::default(),
        }
    }
}

fn fractint(c: &FractintConfig) -> Result<AuditReport> {
    if !(1..=20).contains(&c.k_max) {
        return Err(Error::Config("need 1 ≤ k_max ≤ 20".into()));
    }
    let region = c.region.build()?;
    if region.dim() != 2 {
        return Err(Error::Config("fractint fields are planar".into()));
    }
    let w = whitney_decompose(region.as_ref(), c.k_max)?;
    let field = c.field;
    let mut results: Vec<(String, FractalIntegral)> = Vec::new();
    if c.kernels.is_empty() {
        let fam = ConstantFamily::new(2, move |x: &[f64]| field.eval(x), "F");
        results.push(("constant".into(), fractal_integral(&fam, &w, &c.options)?));
    }
    for &k in &c.kernels {
        let fam = MollifiedFamily::new(2, move |x: &[f64]| field.eval(x), k, "F");
        results.push((k.name().to_string(), fractal_integral(&fam, &w, &c.options)?));
    }
    let mut rep = AuditReport::new("fractint", "fractint");
    let mut t = Table::new(&["family", "k", "cubes", "sum"]);
    for (j, (label, fi)) in results.iter().enumerate() {
        rep.metric(&format!("{label}_value"), fi.value);
        rep.metric(&format!("{label}_partial_sum"), fi.partial_sum);
        rep.metric(&format!("{label}_tail"), fi.tail);
        rep.metric(&format!("{label}_t0_sensitivity"), fi.t0_sensitivity());
        for g in &fi.generations {
            t.push(vec![j as f64, g.k as f64, g.cubes as f64, g.sum]);
        }
        rep.notes.push(format!("family {j}: {label}"));
    }
    rep.metric("census_slope", results[0].1.census_slope);
    rep.metric("limit", results[0].1.limit);
    let values: Vec<f64> = results.iter().map(|r| r.1.value).collect();
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - values.iter().cloned().fold(f64::INFINITY, f64::min);
    rep.metric("kernel_spread", spread);
    rep.table("generations", t);
    if spread > c.kernel_tolerance {
        rep.status = Status::Fail;
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoxdimConfig {
    /// Scalar lacunary field on the unit square.
    pub roughness: RoughnessSpec,
    /// Cells per unit length.
    pub resolution: usize,
    pub levels: usize,
    /// Seed of the level sampling.
    pub seed: u64,
    /// Exponent in the bound n − α + 0.1; the field's α when unset.
    pub alpha: Option<f64>,
    pub min_fraction: f64,
}

impl Default for BoxdimConfig {
    fn default() -> Self {
        Self {
            roughness: RoughnessSpec { alpha: 0.75, lacunarity: 2, depth: 6, amplitude: 1.0, seed: 11 },
            resolution: 1024,
            levels: 50,
            seed: 5,
            alpha: None,
            min_fraction: 0.9,
        }
    }
}

fn boxdim(c: &BoxdimConfig) -> Result<AuditReport> {
    c.roughness.validate().map_err(|e| Error::Config(e.to_string()))?;
    if c.resolution < 8 || c.levels == 0 {
        return Err(Error::Config("need resolution ≥ 8 and levels > 0".into()));
    }
    let g = ChartGrid::uniform(vec![0.0, 0.0], 1.0 / c.resolution as f64, vec![c.resolution + 1; 2])?;
    let f = lacunary_field(&g, &c.roughness)?;
    let levels = sample_levels(&f, c.levels, c.seed);
    let scan = level_set_boxdim(&f, &levels, c.alpha.unwrap_or(c.roughness.alpha))?;
    let mut rep = AuditReport::new("boxdim", "boxdim");
    rep.metric("bound", scan.bound);
    rep.metric("fraction_within", scan.fraction_within);
    rep.metric("skipped", scan.skipped as f64);
    let mut t = Table::new(&["level", "dimension", "stable"]);
    for r in &scan.rows {
        match &r.dimension {
            Some(d) => t.push(vec![r.level, d.dimension, if d.stable { 1.0 } else { 0.0 }]),
            None => t.push(vec![r.level, f64::NAN, f64::NAN]),
        }
    }
    rep.table("levels", t);
    rep.status = if scan.degenerate {
        Status::Inconclusive
    } else if scan.fraction_within >= c.min_fraction {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MollifyConfig {
    pub profiles: Vec<CorrugationProfile>,
    /// Cells per unit length along the corrugated axis x₁ ∈ [−1/2, 1/2].
    pub resolution: usize,
    pub kernels: Vec<MollifierKernel>,
    /// C^r norms of the metric defect.
    pub orders: Vec<usize>,
    /// Mollification radii; five doublings from 8h when empty.
    pub eps: Vec<f64>,
    /// Allowed distance of a fitted slope from 2α − r.
    pub slope_tolerance: f64,
    /// Allowed spread of the slopes across kernels.
    pub kernel_tolerance: f64,
}

impl Default for MollifyConfig {
    fn default() -> Self {
        Self {
            profiles: [0.7, 0.8, 0.9].map(|alpha| CorrugationProfile::Cusp { alpha, amplitude: 1.0 }).to_vec(),
            resolution: 1024,
            kernels: vec![MollifierKernel::Polynomial, MollifierKernel::Cosine],
            orders: vec![0, 1],
            eps: Vec::new(),
            slope_tolerance: 0.15,
            kernel_tolerance: 0.1,
        }
    }
}

fn mollify_scan(c: &MollifyConfig) -> Result<AuditReport> {
    if c.resolution < 64 || c.kernels.is_empty() || c.profiles.is_empty() || c.orders.iter().any(|&r| r > 1) {
        return Err(Error::Config("need resolution ≥ 64, a kernel, a profile and orders in {0, 1}".into()));
    }
    let h = 1.0 / c.resolution as f64;
    // a strip of the plane; the corrugation does not depend on x₂
    let g = ChartGrid::new(vec![-0.5, 0.0], vec![h, 2.0 * h], vec![c.resolution + 1, 160])?;
    let eps: Vec<f64> = if c.eps.is_empty() { (0..5).map(|i| 8.0 * h * 2f64.powi(i)).collect() } else { c.eps.clone() };
    let mut rep = AuditReport::new("mollify_scan", "mollify_scan");
    let mut t = Table::new(&["profile", "alpha", "kernel", "r", "eps", "defect"]);
    let mut slopes = Table::new(&["profile", "alpha", "kernel", "r", "slope", "expected"]);
    let mut ok = true;
    for (pi, profile) in c.profiles.iter().enumerate() {
        let y = corrugated_immersion(&g, profile)?;
        let alpha = profile.alpha();
        for &r in &c.orders {
            let expected = 2.0 * alpha - r as f64;
            let mut found = Vec::new();
            for (ki, &k) in c.kernels.iter().enumerate() {
                let scan = metric_defect_scan(&y, k, r, &eps)?;
                for row in scan.rows.iter().filter(|row| !row.dropped) {
                    t.push(vec![pi as f64, alpha, ki as f64, r as f64, row.eps, row.defect]);
                }
                let slope = scan.fit.map(|f| f.slope).unwrap_or(f64::NAN);
                slopes.push(vec![pi as f64, alpha, ki as f64, r as f64, slope, expected]);
                ok &= (slope - expected).abs() <= c.slope_tolerance;
                found.push(slope);
            }
            let spread = found.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - found.iter().cloned().fold(f64::INFINITY, f64::min);
            ok &= spread <= c.kernel_tolerance;
            rep.metric(&format!("p{pi}_r{r}_slope"), found[0]);
            rep.metric(&format!("p{pi}_r{r}_expected"), expected);
            rep.metric(&format!("p{pi}_r{r}_kernel_spread"), spread);
        }
    }
    for (ki, k) in c.kernels.iter().enumerate() {
        rep.notes.push(format!("kernel {ki}: {}", k.name()));
    }
    rep.table("defects", t);
    rep.table("slopes", slopes);
    if !ok {
        rep.status = Status::Fail;
    }
    Ok(rep)
}

/// Writes the raw fields behind a scenario's finest resolution: coframe,
/// Pfaffian, sphere pullback and Gauss map.
pub fn write_fields(s: &Scenario, dir: &Path) -> Result<()> {
    let (_, geo) = prepare(s)?;
    fs::create_dir_all(dir)?;
    for (i, th) in geo.bundle.coframe().iter().enumerate() {
        io::write_form(&dir.join(format!("coframe_{i}")), th)?;
    }
    io::write_form(&dir.join("pfaffian"), &geo.pfaffian)?;
    io::write_form(&dir.join("pullback"), &geo.pullback)?;
    io::write_map(&dir.join("normal"), &geo.normal)?;
    Ok(())
}
