use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use log::info;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fixture::Fixture;
use super::report::{AuditReport, RunSummary, Status, Table};
use super::scenario::{AuditSpec, RegionSpec, Scenario};
use super::test_function::{SphereFunction, TestFunction};
use crate::chart::quadrature::gauss_legendre_on;
use crate::chart::{CellSet, ChartGrid, FormField, MapField};
use crate::degree::{angle, degree_field, extrinsic_curvature_bound, image_hits, weak_convergence_experiment, SphereCellGrid};
use crate::error::{Error, Result};
use crate::fractal::{level_set_boxdim, sample_levels};
use crate::geometry::{frame_bundle, metric_from_immersion, pfaffian, GeometryOptions, ImmersionGeometry};

/// Cells of the padded grid lying in the chart proper.
pub fn nominal_cells(grid: &Arc<ChartGrid>, pad: usize) -> CellSet {
    let n = grid.dim();
    let hi: Vec<usize> = grid.shape().iter().map(|s| s - 1 - pad).collect();
    CellSet::node_box(grid, &vec![pad; n], &hi)
}

/// The chart proper of a padded field, as a field of its own.
pub fn crop(field: &MapField, pad: usize) -> Result<MapField> {
    let g = field.grid();
    let n = g.dim();
    let origin: Vec<f64> = (0..n).map(|a| g.origin()[a] + pad as f64 * g.spacing()[a]).collect();
    let shape: Vec<usize> = g.shape().iter().map(|s| s - 2 * pad).collect();
    let sub = ChartGrid::new(origin, g.spacing().to_vec(), shape)?;
    let m = field.target_dim();
    let mut values = Vec::with_capacity(sub.node_count() * m);
    for node in 0..sub.node_count() {
        let idx: Vec<usize> = sub.node_multi(node).iter().map(|i| i + pad).collect();
        values.extend_from_slice(field.at(g.node_index(&idx)));
    }
    MapField::new(&sub, m, values)
}

/// A fixture sampled on one padded chart grid.
pub struct Prepared {
    pub resolution: usize,
    pub grid: Arc<ChartGrid>,
    pub nominal: CellSet,
    pub y: MapField,
    pub geometry: Option<ImmersionGeometry>,
}

impl Prepared {
    pub fn new(fixture: &Fixture, lo: &[f64], hi: &[f64], resolution: usize, pad: usize) -> Result<Self> {
        let grid = fixture.grid(lo, hi, 1.0 / resolution as f64, pad)?;
        let y = fixture.sample(&grid)?;
        let nominal = nominal_cells(&grid, pad);
        Ok(Self { resolution, grid, nominal, y, geometry: None })
    }

    pub fn geometry(&mut self) -> Result<&ImmersionGeometry> {
        if self.geometry.is_none() {
            self.geometry = Some(ImmersionGeometry::compute(&self.y, &GeometryOptions::default())?);
        }
        Ok(self.geometry.as_ref().expect("just computed"))
    }
}

/// φ∘ν at every node.
fn compose(phi: &SphereFunction, normal: &MapField) -> Vec<f64> {
    (0..normal.grid().node_count()).map(|i| phi(normal.at(i))).collect()
}

fn integrate_weighted(pf: &FormField, w: &[f64], region: &CellSet) -> Result<f64> {
    Ok(pf.mul_scalar(w).integrate(region)?.value)
}

/// Least-squares fit of I(δ) = a + b δ² (+ c δ⁴ with three or more points);
/// returns a.
fn extrapolate_even(deltas: &[f64], values: &[f64]) -> f64 {
    let m = deltas.len();
    if m == 1 {
        return values[0];
    }
    let terms = if m >= 3 { 3 } else { 2 };
    let a = DMatrix::from_fn(m, terms, |i, j| deltas[i].powi(2 * j as i32));
    let b = DVector::from_column_slice(values);
    let svd = a.svd(true, true);
    svd.solve(&b, 1e-14).map(|x| x[0]).unwrap_or(f64::NAN)
}

fn prepared<'c>(cache: &'c mut Option<Prepared>, scenario: &Scenario, resolution: usize) -> Result<&'c mut Prepared> {
    if cache.as_ref().is_none_or(|p| p.resolution != resolution) {
        *cache = None;
        let (lo, hi) = scenario.chart();
        *cache = Some(Prepared::new(&scenario.fixture, &lo, &hi, resolution, scenario.pad)?);
    }
    Ok(cache.as_mut().expect("just filled"))
}

/// Executes the audits of one scenario, sharing fixture samples between
/// them.
pub struct Runner<'a> {
    scenario: &'a Scenario,
    cells: SphereCellGrid,
    cache: Option<Prepared>,
}

impl<'a> Runner<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<Self> {
        scenario.validate()?;
        let cells = SphereCellGrid::new(scenario.fixture.dim(), scenario.sphere_cells)?;
        Ok(Self { scenario, cells, cache: None })
    }

    pub fn sphere_cells(&self) -> &SphereCellGrid {
        &self.cells
    }

    /// Angular diameter of the largest sphere cell.
    pub fn cell_diameter(&self) -> f64 {
        let mut e0 = vec![0.0; self.cells.n() + 1];
        e0[0] = 1.0;
        2.0 * self.cells.circumradius(self.cells.locate(&e0))
    }

    /// Default transition width of smoothed indicators: four cell diameters.
    pub fn default_width(&self) -> f64 {
        4.0 * self.cell_diameter()
    }

    fn region_seed(&self, salt: u64) -> u64 {
        self.scenario.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt)
    }

    /// Runs one audit; errors become failed reports.
    pub fn run_spec(&mut self, name: &str, spec: &AuditSpec) -> AuditReport {
        let start = Instant::now();
        let out = match spec {
            AuditSpec::CovCheck { region, test_function, .. } => self.cov_check_testfunction(name, region, test_function),
            AuditSpec::GaussBonnet { deltas, euler_characteristic, .. } => self.gauss_bonnet_closed(name, deltas, *euler_characteristic),
            AuditSpec::DegreePositivity { regions, bumps, .. } => self.degree_positivity_audit(name, regions, *bumps),
            AuditSpec::ExtrinsicBound { parts, .. } => self.extrinsic_bound_audit(name, parts),
            AuditSpec::SublevelBoxdim { test_function, levels, alpha, min_fraction, .. } => {
                self.sublevel_boxdim_audit(name, test_function, *levels, *alpha, *min_fraction)
            }
            AuditSpec::WeakDegree { region, eps, kernel, test_function, .. } => {
                self.weak_degree(name, region, eps, *kernel, test_function)
            }
        };
        let report = out.unwrap_or_else(|e| {
            let mut r = AuditReport::new(name, spec.kind());
            r.status = Status::Fail;
            r.notes.push(format!("error: {e}"));
            r
        });
        info!("{name}: {} in {:.1}s", report.status.as_str(), start.elapsed().as_secs_f64());
        report
    }

    /// Runs every audit in order.
    pub fn run_all(&mut self) -> Vec<AuditReport> {
        let specs = self.scenario.audits.clone();
        specs.iter().enumerate().map(|(i, s)| self.run_spec(&s.name(i), s)).collect()
    }

    /// cov_check with φ ≡ 1.
    pub fn cov_check_indicator(&mut self, name: &str, region: &RegionSpec) -> Result<AuditReport> {
        self.cov_check_testfunction(name, region, &TestFunction::default())
    }

    /// ∫_U φ∘ν Pf (direct and layer-cake) against Σ φ · deg · area, over
    /// every resolution.
    pub fn cov_check_testfunction(&mut self, name: &str, region: &RegionSpec, tf: &TestFunction) -> Result<AuditReport> {
        let n = self.scenario.fixture.dim();
        if n % 2 == 1 {
            return Err(Error::OddDimension(n));
        }
        let width = self.default_width();
        let phi = tf.build(n, width)?;
        let mut rep = AuditReport::new(name, "cov_check");
        rep.notes.push(format!("test function: {}", tf.label()));
        let mut ks = self.scenario.resolutions.clone();
        ks.sort_unstable();
        ks.dedup();
        let mut table = Table::new(&["resolution", "h", "lhs", "rhs", "abs_diff", "gap_area", "region_cells"]);
        let seed = self.region_seed(0);
        let opts = self.scenario.degree.clone();
        let mut finest = None;
        for &k in &ks {
            let cells = &self.cells;
            let p = prepared(&mut self.cache, self.scenario, k)?;
            let h = p.grid.max_spacing();
            let u = region.cells(&p.nominal, seed)?;
            let geo = p.geometry()?;
            let psi = compose(&phi, &geo.normal);
            let lhs = integrate_weighted(&geo.pfaffian, &psi, &u)?;
            let report = degree_field(&geo.normal, &u, cells, &opts)?;
            let rhs = report.pair(|z| phi(z));
            table.push(vec![k as f64, h, lhs, rhs, (lhs - rhs).abs(), report.excluded_area, u.len() as f64]);
            finest = Some((u, psi, report));
        }
        let (u, psi, report) = finest.expect("at least one resolution");
        let diffs = table.column("abs_diff").expect("column");
        let hs = table.column("h").expect("column");
        if diffs.len() >= 2 {
            let m = diffs.len();
            let order = (diffs[m - 2] / diffs[m - 1]).ln() / (hs[m - 2] / hs[m - 1]).ln();
            rep.metric("observed_order", order);
        }
        let row = table.rows.last().expect("row").clone();
        let (lhs, rhs, gap) = (row[2], row[3], row[5]);
        rep.metric("lhs", lhs);
        rep.metric("rhs", rhs);
        rep.metric("abs_diff", (lhs - rhs).abs());
        rep.metric("rel_diff", (lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE));
        rep.metric("gap_area", gap);

        // layer cake: ∫ψ Pf = ∫₀^∞ ∫_{ψ>r} Pf dr − ∫_{−∞}^0 ∫_{ψ<r} Pf dr
        let geo = self.cache.as_mut().expect("cached").geometry()?;
        let node_mask = u.node_mask();
        let vals: Vec<f64> = psi.iter().zip(&node_mask).filter(|(_, m)| **m).map(|(v, _)| *v).collect();
        let (vmin, vmax) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let mut cake = Table::new(&["r", "side", "measure"]);
        let mut layer = 0.0;
        for (side, a, b) in [(1.0, vmin.max(0.0), vmax.max(0.0)), (-1.0, vmin.min(0.0), vmax.min(0.0))] {
            if b - a <= 1e-12 * vmax.abs().max(vmin.abs()).max(1.0) {
                continue;
            }
            let (rs, ws) = gauss_legendre_on(64, a, b);
            for (r, w) in rs.iter().zip(&ws) {
                let ind: Vec<f64> = psi
                    .iter()
                    .map(|&v| if (side > 0.0 && v > *r) || (side < 0.0 && v < *r) { 1.0 } else { 0.0 })
                    .collect();
                let mu = integrate_weighted(&geo.pfaffian, &ind, &u)?;
                cake.push(vec![*r, side, mu]);
                layer += side * w * mu;
            }
        }
        // constant stretches below or above zero contribute |v|·∫Pf directly
        let pf_total = geo.pfaffian.integrate(&u)?.value;
        if vmin > 0.0 {
            layer += vmin * pf_total;
        } else if vmax < 0.0 {
            layer += vmax * pf_total;
        }
        let cake_rel = (layer - lhs).abs() / lhs.abs().max(f64::MIN_POSITIVE);
        rep.metric("layer_cake", layer);
        rep.metric("layer_cake_rel_diff", cake_rel);

        if let Some(w) = tf.width(width) {
            let half = tf.with_width(0.5 * w).build(n, width)?;
            let psi_half = compose(&half, &geo.normal);
            let lhs_half = integrate_weighted(&geo.pfaffian, &psi_half, &u)?;
            let rhs_half = report.pair(|z| half(z));
            rep.metric("width", w);
            rep.metric("width_sensitivity", (lhs_half - lhs).abs().max((rhs_half - rhs).abs()));
        }
        rep.table("resolutions", table);
        rep.table("layer_cake", cake);

        let tol = self.scenario.tolerances;
        rep.status = if gap > self.scenario.gap_ceiling {
            rep.notes.push(format!("admissibility gap {gap:.3e} exceeds the ceiling {:.3e}", self.scenario.gap_ceiling));
            Status::Inconclusive
        } else if !tol.allows((lhs - rhs).abs(), lhs) {
            rep.notes.push("direct sides disagree beyond tolerance".into());
            Status::Fail
        } else if cake_rel > tol.layer_cake {
            rep.notes.push("layer-cake route disagrees with the direct route".into());
            Status::Fail
        } else {
            Status::Pass
        };
        Ok(rep)
    }

    /// ∫ Pf over the closed surface minus polar caps of colatitude δ,
    /// extrapolated to δ = 0 and compared with 2πχ.
    pub fn gauss_bonnet_closed(&mut self, name: &str, deltas: &[f64], chi: i32) -> Result<AuditReport> {
        let fixture = &self.scenario.fixture;
        let (clo, chi_hi) = fixture
            .cover_chart()
            .ok_or_else(|| Error::Config(format!("{} has no closed cover", fixture.label())))?;
        let k = self.scenario.finest();
        let mut ds = deltas.to_vec();
        ds.sort_by(|a, b| b.total_cmp(a));
        let mut table = Table::new(&["delta", "integral"]);
        let opts = GeometryOptions::default();
        for &d in &ds {
            let (mut lo, mut hi) = (clo.clone(), chi_hi.clone());
            lo[0] += d;
            hi[0] -= d;
            let grid = fixture.grid(&lo, &hi, 1.0 / k as f64, self.scenario.pad)?;
            let y = fixture.sample(&grid)?;
            let fb = frame_bundle(&metric_from_immersion(&y, &opts)?, &opts)?;
            let pf = pfaffian(&fb)?;
            let total = pf.integrate(&nominal_cells(&grid, self.scenario.pad))?.value;
            table.push(vec![d, total]);
        }
        let values = table.column("integral").expect("column");
        let limit = extrapolate_even(&ds, &values);
        let target = 2.0 * std::f64::consts::PI * chi as f64;
        let mut rep = AuditReport::new(name, "gauss_bonnet");
        rep.metric("extrapolated", limit);
        rep.metric("target", target);
        rep.metric("abs_err", (limit - target).abs());
        rep.metric("smallest_delta_integral", *values.last().expect("nonempty"));
        rep.table("deltas", table);
        rep.status = if self.scenario.tolerances.allows((limit - target).abs(), target) { Status::Pass } else { Status::Fail };
        Ok(rep)
    }

    /// Every admissible target in ν(V) ∖ ν(∂V) has degree ≥ 1, and bumps
    /// around image points pair positively with the degree.
    pub fn degree_positivity_audit(&mut self, name: &str, regions: &[RegionSpec], bumps: usize) -> Result<AuditReport> {
        let positive = self.scenario.fixture.positive_curvature();
        let rho = self.default_width();
        let seeds: Vec<u64> = (0..regions.len()).map(|i| self.region_seed(1 + i as u64)).collect();
        let opts = self.scenario.degree.clone();
        let k = self.scenario.finest();
        let cells = &self.cells;
        let p = prepared(&mut self.cache, self.scenario, k)?;
        let nominal = p.nominal.clone();
        let grid = p.grid.clone();
        let geo = p.geometry()?;
        let mut rep = AuditReport::new(name, "degree_positivity");
        let mut table = Table::new(&["region", "targets", "checked", "unresolved", "violations", "min_degree", "nonzero_area", "min_bump_rhs", "min_bump_lhs"]);
        let mut violations = 0usize;
        for (i, spec) in regions.iter().enumerate() {
            let u = spec.cells(&nominal, seeds[i])?;
            let report = degree_field(&geo.normal, &u, cells, &opts)?;
            let hits = image_hits(&geo.normal, &u, cells)?;
            let (mut checked, mut unresolved, mut bad) = (0usize, 0usize, 0usize);
            let mut min_degree = i64::MAX;
            let mut nonzero_area = 0.0;
            // a cell carrying a single row lies off ν(∂V) as a whole, so
            // its degree is constant and a hit puts it inside ν(V)
            let mut per_cell = vec![0u32; cells.len()];
            report.rows.iter().for_each(|r| per_cell[r.cell] += 1);
            for row in report.rows.iter().filter(|r| r.regular) {
                if row.degree != 0 {
                    nonzero_area += row.area;
                }
                let in_image = row.degree != 0 || (hits[row.cell] && per_cell[row.cell] == 1);
                if in_image {
                    checked += 1;
                    min_degree = min_degree.min(row.degree);
                    if row.degree < 1 {
                        bad += 1;
                        if positive && rep.notes.len() < 10 {
                            rep.notes.push(format!("region {i}: target {:?} has degree {}", row.target, row.degree));
                        }
                    }
                } else if hits[row.cell] {
                    unresolved += 1;
                }
            }
            // bumps around images of interior cells
            let inner = u.inset(2);
            let pool: Vec<usize> = if inner.is_empty() { u.cells().collect() } else { inner.cells().collect() };
            let mut rng = ChaCha8Rng::seed_from_u64(seeds[i] ^ 0xB0B);
            let (mut min_rhs, mut min_lhs) = (f64::INFINITY, f64::INFINITY);
            for _ in 0..bumps {
                let c = pool[rng.random_range(0..pool.len())];
                let z = geo.normal.at(grid.cell_base_node(c)).to_vec();
                let bump: SphereFunction = Arc::new(move |w: &[f64]| {
                    let t = angle(w, &z) / rho;
                    if t < 1.0 {
                        (1.0 - t * t).powi(2)
                    } else {
                        0.0
                    }
                });
                min_rhs = min_rhs.min(report.pair(|w| bump(w)));
                min_lhs = min_lhs.min(integrate_weighted(&geo.pfaffian, &compose(&bump, &geo.normal), &u)?);
            }
            if bumps > 0 && positive && !(min_rhs > 0.0 && min_lhs > 0.0) {
                bad += 1;
                rep.notes.push(format!("region {i}: bump pairing not positive ({min_rhs:.3e}, {min_lhs:.3e})"));
            }
            violations += bad;
            let min_degree = if checked == 0 { f64::NAN } else { min_degree as f64 };
            table.push(vec![
                i as f64,
                report.rows.len() as f64,
                checked as f64,
                unresolved as f64,
                bad as f64,
                min_degree,
                nonzero_area,
                min_rhs,
                min_lhs,
            ]);
        }
        let checked: f64 = table.column("checked").expect("column").iter().sum();
        rep.metric("checked", checked);
        rep.metric("violations", violations as f64);
        rep.metric("min_degree", table.column("min_degree").expect("column").iter().cloned().fold(f64::INFINITY, f64::min));
        rep.metric("bump_radius", rho);
        rep.table("regions", table);
        rep.status = if !positive {
            rep.notes.push(format!("{} has no positive Pfaffian; recorded as control", self.scenario.fixture.label()));
            Status::Control
        } else if violations > 0 || checked == 0.0 {
            Status::Fail
        } else {
            Status::Pass
        };
        Ok(rep)
    }

    /// Σ image measures of disjoint closed parts ≤ ∫ Pf + rasterization slack.
    pub fn extrinsic_bound_audit(&mut self, name: &str, parts: &[RegionSpec]) -> Result<AuditReport> {
        let positive = self.scenario.fixture.positive_curvature();
        let seeds: Vec<u64> = (0..parts.len()).map(|i| self.region_seed(100 + i as u64)).collect();
        let k = self.scenario.finest();
        let cells = &self.cells;
        let p = prepared(&mut self.cache, self.scenario, k)?;
        let nominal = p.nominal.clone();
        let geo = p.geometry()?;
        let sets = parts.iter().zip(&seeds).map(|(s, &seed)| s.cells(&nominal, seed)).collect::<Result<Vec<_>>>()?;
        let bound = extrinsic_curvature_bound(&geo.normal, &sets, cells)?;
        let total_pf = geo.pfaffian.integrate(&nominal)?.value;
        let mut table = Table::new(&["part", "measure", "slack", "hit_cells", "pfaffian"]);
        for (i, (m, u)) in bound.parts.iter().zip(&sets).enumerate() {
            table.push(vec![i as f64, m.measure, m.slack, m.hit_cells as f64, geo.pfaffian.integrate(u)?.value]);
        }
        let mut rep = AuditReport::new(name, "extrinsic_bound");
        rep.metric("total", bound.total);
        rep.metric("slack", bound.slack);
        rep.metric("pfaffian_integral", total_pf);
        rep.metric("margin", total_pf + bound.slack - bound.total);
        rep.table("parts", table);
        rep.status = if !positive {
            rep.notes.push(format!("{} has no positive Pfaffian; recorded as control", self.scenario.fixture.label()));
            Status::Control
        } else if bound.total <= total_pf + bound.slack {
            Status::Pass
        } else {
            Status::Fail
        };
        Ok(rep)
    }

    /// Box dimension of the level sets of φ∘ν against n − α + 0.1.
    pub fn sublevel_boxdim_audit(
        &mut self,
        name: &str,
        tf: &TestFunction,
        levels: usize,
        alpha: Option<f64>,
        min_fraction: f64,
    ) -> Result<AuditReport> {
        let n = self.scenario.fixture.dim();
        let alpha = alpha.unwrap_or(self.scenario.fixture.alpha());
        let phi = tf.build(n, self.default_width())?;
        let seed = self.region_seed(200);
        let pad = self.scenario.pad;
        let k = self.scenario.finest();
        let p = prepared(&mut self.cache, self.scenario, k)?;
        let geo = p.geometry()?;
        let grid = geo.normal.grid().clone();
        let field = crop(&MapField::new(&grid, 1, compose(&phi, &geo.normal))?, pad)?;
        let lv = sample_levels(&field, levels, seed);
        let scan = level_set_boxdim(&field, &lv, alpha)?;
        let mut table = Table::new(&["level", "dimension", "stable", "within"]);
        for row in &scan.rows {
            let (d, s) = match &row.dimension {
                Some(b) => (b.dimension, if b.stable { 1.0 } else { 0.0 }),
                None => (f64::NAN, f64::NAN),
            };
            table.push(vec![row.level, d, s, if d <= scan.bound { 1.0 } else { 0.0 }]);
        }
        let mut rep = AuditReport::new(name, "sublevel_boxdim");
        rep.metric("alpha", alpha);
        rep.metric("bound", scan.bound);
        rep.metric("fraction_within", scan.fraction_within);
        rep.metric("skipped", scan.skipped as f64);
        rep.table("levels", table);
        rep.status = if scan.degenerate {
            rep.notes.push("φ∘ν is constant: every level set is empty or the whole chart".into());
            Status::Inconclusive
        } else if scan.fraction_within >= min_fraction {
            Status::Pass
        } else {
            Status::Fail
        };
        Ok(rep)
    }

    /// Pairings of φ with the degrees of mollified Gauss maps; passes when
    /// the successive differences decrease.
    pub fn weak_degree(
        &mut self,
        name: &str,
        region: &RegionSpec,
        eps: &[f64],
        kernel: crate::mollify::MollifierKernel,
        tf: &TestFunction,
    ) -> Result<AuditReport> {
        let n = self.scenario.fixture.dim();
        let phi = tf.build(n, self.default_width())?;
        let seed = self.region_seed(300);
        let opts = self.scenario.degree.clone();
        let k = self.scenario.finest();
        let cells = &self.cells;
        let p = prepared(&mut self.cache, self.scenario, k)?;
        let u = region.cells(&p.nominal, seed)?;
        let tab = weak_convergence_experiment(&p.y, &u, eps, kernel, &*phi, cells, &opts)?;
        let mut table = Table::new(&["eps", "pairing", "difference", "excluded_area"]);
        for r in &tab.rows {
            table.push(vec![r.eps, r.pairing, r.difference.unwrap_or(f64::NAN), r.excluded_area]);
        }
        let mut rep = AuditReport::new(name, "weak_degree");
        let last = tab.rows.last().expect("nonempty schedule");
        rep.metric("last_pairing", last.pairing);
        rep.metric("last_difference", last.difference.unwrap_or(f64::NAN));
        rep.metric("monotone", if tab.monotone { 1.0 } else { 0.0 });
        rep.notes.push(format!("kernel {}", kernel.name()));
        rep.table("schedule", table);
        rep.status = if tab.monotone { Status::Pass } else { Status::Fail };
        Ok(rep)
    }
}

/// Runs a scenario and, given a directory, writes every report and
/// `result.json` into it.
pub fn run(scenario: &Scenario, out: Option<&Path>) -> Result<(RunSummary, Vec<AuditReport>)> {
    let mut runner = Runner::new(scenario)?;
    let reports = runner.run_all();
    let summary = RunSummary::from_reports(&scenario.name, scenario.seed, &reports);
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        for r in &reports {
            r.write(dir)?;
        }
        summary.write(dir)?;
    }
    Ok((summary, reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_extrapolation_recovers_quadratic_limit() {
        let ds = [0.4f64, 0.2, 0.1];
        let vals: Vec<f64> = ds.iter().map(|d| 3.0 - 2.0 * d * d + 0.5 * d.powi(4)).collect();
        assert!((extrapolate_even(&ds, &vals) - 3.0).abs() < 1e-10);
    }
}
