use std::f64::consts::PI;

use curvlab::chart::ChartGrid;
use curvlab::fractal::*;
use curvlab::mollify::{lacunary_field, MollifierKernel, RoughnessSpec};
use curvlab::Error;
use proptest::prelude::*;

fn koch() -> Polygon {
    Polygon::koch_snowflake([0.5, 0.5], 0.8, 6).unwrap()
}

fn koch_dim() -> f64 {
    4f64.ln() / 3f64.ln()
}

#[test]
fn unit_square_decomposition() {
    let sq = AxisBox::unit_cube(2);
    let mut last = 0.0;
    for k_max in [4, 6, 8, 10] {
        let w = whitney_decompose(&sq, k_max).unwrap();
        assert!(verify_whitney(&w, &sq, 1e-4).passed());
        let v = w.volume();
        assert!(v > last && v < 1.0);
        // uncovered strip is a few cubes of the finest generation wide
        assert!(1.0 - v < 16.0 * 2f64.powi(-k_max), "{k_max}: {v}");
        last = v;
    }
    let w = whitney_decompose(&sq, 6).unwrap();
    // the coarsest cubes meet at the center; generation 2 cubes are too
    // close to the boundary (dist 1/4 < diam √2/4)
    assert_eq!(w.census.keys().next(), Some(&3));
    for l in [[3, 3], [3, 4], [4, 3], [4, 4]] {
        assert!(w.cubes.contains(&DyadicCube { k: 3, l: l.to_vec() }));
    }
    let mut buf = Vec::new();
    w.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("k,l0,l1\n3,2,2\n"));
    assert_eq!(w.count(3), 16);
    assert_eq!(text.lines().count(), w.cubes.len() + 1);
}

#[test]
fn unit_cube_in_three_dimensions() {
    let cube = AxisBox::unit_cube(3);
    let w = whitney_decompose(&cube, 5).unwrap();
    assert!(w.is_disjoint());
    let audit = verify_whitney(&w, &cube, 1e-2);
    assert!(audit.passed(), "{audit:?}");
    // generation-3 cubes at distance ≥ 1/4 from every face: a 4×4×4 block
    assert_eq!(w.count(3), 64);
    assert_eq!(w.census.keys().next(), Some(&3));
}

#[test]
fn disk_census_grows_like_the_boundary_length() {
    let disk = Ball::unit_disk();
    let w = whitney_decompose(&disk, 10).unwrap();
    let audit = verify_whitney(&w, &disk, 1e-4);
    assert!(audit.passed(), "{audit:?}");
    assert!(audit.min_ratio >= 1.0 && audit.max_ratio <= 4.0);
    let slope = whitney_census_slope(&w, 4, 10).unwrap();
    assert!((0.8..=1.2).contains(&slope), "{slope}");
}

#[test]
fn annulus_census_slope_is_one() {
    let ring = Annulus { center: vec![0.1, -0.2], inner: 0.3, outer: 0.9 };
    let w = whitney_decompose(&ring, 10).unwrap();
    assert!(verify_whitney(&w, &ring, 1e-4).passed());
    let slope = whitney_census_slope(&w, 5, 10).unwrap();
    assert!((slope - 1.0).abs() < 0.1, "{slope}");
}

#[test]
fn koch_census_slope_is_the_similarity_dimension() {
    let k = koch();
    let w = whitney_decompose(&k, 11).unwrap();
    let audit = verify_whitney(&w, &k, 1e-4);
    assert!(audit.passed(), "{audit:?}");
    let slope = whitney_census_slope(&w, 6, 11).unwrap();
    assert!((slope - koch_dim()).abs() < 0.08, "{slope}");
}

#[test]
fn probe_region_errs_toward_rejection() {
    let disk = Ball { center: vec![0.05, 0.0], radius: 0.7 };
    let probe = {
        let d = disk.clone();
        ProbeRegion::new(d.bounding_box(), move |x| d.contains(x), "probe-disk")
    };
    let w = whitney_decompose(&probe, 6).unwrap();
    // checked against the analytic boundary, not the probes
    let audit = verify_whitney(&w, &disk, 1e-4);
    assert!(audit.passed(), "{audit:?}");
    let exact = whitney_decompose(&disk, 6).unwrap();
    assert!(w.volume() <= exact.volume() + 1e-12);
    assert!(w.volume() > 0.8 * exact.volume());
}

#[test]
fn census_errors() {
    let thin = AxisBox { lo: vec![0.0, 0.0], hi: vec![1.0, 1e-4] };
    assert!(matches!(whitney_decompose(&thin, 5), Err(Error::RegionTooThin)));
    let w = whitney_decompose(&Ball::unit_disk(), 4).unwrap();
    assert!(matches!(whitney_census_slope(&w, 3, 4), Err(Error::SparseCensus(2))));
}

#[test]
fn box_dimension_of_segment_and_koch_curve() {
    let seg: Vec<Vec<f64>> = (0..=100_000).map(|i| vec![0.1 + 0.7 * i as f64 / 1e5, 0.2 + 0.5 * i as f64 / 1e5]).collect();
    let eps: Vec<f64> = (2..=12).map(|j| 2f64.powi(-j)).collect();
    let d = box_dimension(&seg, &eps).unwrap();
    assert!((d.dimension - 1.0).abs() < 0.05, "{d:?}");
    let pts = koch().boundary_sample(5e-5);
    let eps: Vec<f64> = (2..=11).map(|j| 2f64.powi(-j)).collect();
    let d = box_dimension(&pts, &eps).unwrap();
    assert!((d.dimension - koch_dim()).abs() < 0.05, "{d:?}");
    assert!(matches!(box_dimension(&pts, &[0.1, 0.05, 0.01]), Err(Error::InvalidParameter(_))));
}

#[test]
fn box_dimension_of_a_rough_graph_respects_the_graph_bound() {
    let g = ChartGrid::uniform(vec![0.0], 1.0 / 65536.0, vec![65537]).unwrap();
    let spec = RoughnessSpec { alpha: 0.5, lacunarity: 2, depth: 14, amplitude: 1.0, seed: 3 };
    let f = lacunary_field(&g, &spec).unwrap();
    let pts: Vec<Vec<f64>> = (0..g.node_count()).map(|i| vec![g.coord(i, 0), f.at(i)[0]]).collect();
    let eps: Vec<f64> = (1..=10).map(|j| 2f64.powi(-j)).collect();
    let d = box_dimension(&pts, &eps).unwrap();
    assert!(d.dimension <= 2.0 - 0.5 + 0.05, "{d:?}");
    assert!(d.dimension > 1.0, "{d:?}");
}

#[test]
fn level_sets_of_linear_constant_and_rough_fields() {
    let g = ChartGrid::uniform(vec![0.0, 0.0], 1.0 / 512.0, vec![513, 513]).unwrap();
    let lin = curvlab::chart::MapField::from_fn(&g, 1, |x| vec![x[0] + 0.3 * x[1]]).unwrap();
    let scan = level_set_boxdim(&lin, &[0.2, 0.5, 0.9], 1.0).unwrap();
    for row in &scan.rows {
        let d = row.dimension.as_ref().unwrap().dimension;
        assert!((d - 1.0).abs() < 0.05, "{d}");
    }
    let flat = curvlab::chart::MapField::from_fn(&g, 1, |_| vec![2.0]).unwrap();
    let scan = level_set_boxdim(&flat, &[1.0, 2.0, 3.0], 1.0).unwrap();
    assert!(scan.degenerate && scan.skipped == 3);

    let g = ChartGrid::uniform(vec![0.0, 0.0], 1.0 / 1024.0, vec![1025, 1025]).unwrap();
    let spec = RoughnessSpec { alpha: 0.75, lacunarity: 2, depth: 6, amplitude: 1.0, seed: 11 };
    let f = lacunary_field(&g, &spec).unwrap();
    let levels = sample_levels(&f, 50, 5);
    let scan = level_set_boxdim(&f, &levels, 0.75).unwrap();
    assert_eq!(scan.skipped, 0);
    assert!(scan.fraction_within >= 0.9, "{}", scan.fraction_within);
}

fn x1dx2(x: &[f64]) -> Vec<f64> {
    flux_form(&[x[0], 0.0])
}

#[test]
fn constant_families_reproduce_areas() {
    let opts = FractalIntegralOptions::default();
    let w = whitney_decompose(&Ball::unit_disk(), 10).unwrap();
    let fam = ConstantFamily::new(2, x1dx2, "x1 dx2");
    let fi = fractal_integral(&fam, &w, &opts).unwrap();
    assert!((fi.value - PI).abs() < 2e-3, "{fi:?}");
    assert!(fi.tail > 0.0 && fi.t0_sensitivity() == 0.0);
    // boundary terms vanish for constant families: each generation sums
    // cube areas exactly
    for g in &fi.generations {
        let area = g.cubes as f64 * 4f64.powi(-g.k);
        assert!((g.sum - area).abs() < 1e-12 * area.max(1.0));
    }
    let sq = whitney_decompose(&AxisBox::unit_cube(2), 12).unwrap();
    let fi = fractal_integral(&fam, &sq, &opts).unwrap();
    assert!((fi.value - 1.0).abs() < 1e-4, "{fi:?}");
}

#[test]
fn integral_is_linear_for_constant_families() {
    let w = whitney_decompose(&koch(), 8).unwrap();
    let opts = FractalIntegralOptions::default();
    let m1 = |x: &[f64]| flux_form(&[x[0] * x[1], x[1].sin()]);
    let m2 = |x: &[f64]| flux_form(&[x[0].exp(), x[0] - x[1] * x[1]]);
    let (a, b) = (1.7, -0.45);
    let f1 = fractal_integral(&ConstantFamily::new(2, m1, "m1"), &w, &opts).unwrap().value;
    let f2 = fractal_integral(&ConstantFamily::new(2, m2, "m2"), &w, &opts).unwrap().value;
    let mix = ConstantFamily::new(2, move |x: &[f64]| m1(x).iter().zip(m2(x)).map(|(u, v)| a * u + b * v).collect(), "mix");
    let fm = fractal_integral(&mix, &w, &opts).unwrap().value;
    assert!((fm - (a * f1 + b * f2)).abs() < 1e-10, "{fm} {}", a * f1 + b * f2);
}

#[test]
fn mollified_family_matches_the_classical_integral_on_the_disk() {
    // ∫_disk div F for F = (x₁³, sin x₂): 3π/4 + 2π J₁(1)
    let j1 = 0.440_050_585_744_933_5;
    let exact = 0.75 * PI + 2.0 * PI * j1;
    let w = whitney_decompose(&Ball::unit_disk(), 10).unwrap();
    let f = |x: &[f64]| flux_form(&[x[0].powi(3), x[1].sin()]);
    let fam = MollifiedFamily::new(2, f, MollifierKernel::Polynomial, "F");
    let fi = fractal_integral(&fam, &w, &FractalIntegralOptions::default()).unwrap();
    assert!((fi.value - exact).abs() < 5e-3, "{} vs {exact}", fi.value);
    assert!(fi.t0_sensitivity() < 1e-4);
}

#[test]
fn koch_integral_does_not_depend_on_the_kernel() {
    let w = whitney_decompose(&koch(), 8).unwrap();
    let f = |x: &[f64]| flux_form(&[(3.0 * x[0] + 1.0).sin() * (2.0 * x[1]).cos(), x[0] * x[0] * x[1] + x[0].cos()]);
    let opts = FractalIntegralOptions::default();
    let a = fractal_integral(&MollifiedFamily::new(2, f, MollifierKernel::Polynomial, "F"), &w, &opts).unwrap();
    let b = fractal_integral(&MollifiedFamily::new(2, f, MollifierKernel::Cosine, "F"), &w, &opts).unwrap();
    assert!((a.value - b.value).abs() < 1e-2, "{} {}", a.value, b.value);
    assert!(a.census_slope < a.limit);
}

struct Boxed;

impl ScaleFamily for Boxed {
    fn dim(&self) -> usize {
        2
    }
    fn eval(&self, _t: f64, x: &[f64]) -> Vec<f64> {
        x1dx2(x)
    }
    fn description(&self) -> String {
        "boxed".into()
    }
    fn domain(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        Some((vec![-0.5, -0.5], vec![0.5, 0.5]))
    }
}

#[test]
fn integral_errors() {
    let w = whitney_decompose(&koch(), 8).unwrap();
    let fam = ConstantFamily::new(2, x1dx2, "x1 dx2");
    let strict = FractalIntegralOptions { theta_est: 0.05, ..Default::default() };
    assert!(matches!(fractal_integral(&fam, &w, &strict), Err(Error::NotCertified { .. })));
    let narrow = FractalIntegralOptions { census_window: 2, ..Default::default() };
    assert!(matches!(fractal_integral(&fam, &w, &narrow), Err(Error::SparseCensus(2))));
    let disk = whitney_decompose(&Ball::unit_disk(), 5).unwrap();
    assert!(matches!(fractal_integral(&Boxed, &disk, &FractalIntegralOptions::default()), Err(Error::CubeOutsideDomain)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_disks_satisfy_whitney_invariants(cx in -2.0f64..2.0, cy in -2.0f64..2.0, r in 0.2f64..1.5) {
        let disk = Ball { center: vec![cx, cy], radius: r };
        let w = whitney_decompose(&disk, 7).unwrap();
        let audit = verify_whitney(&w, &disk, 1e-3 * r);
        prop_assert!(audit.passed(), "{:?}", audit);
        prop_assert!(w.volume() < PI * r * r);
    }

    #[test]
    fn dyadic_children_tile_their_parent(k in -3i32..8, l0 in -50i64..50, l1 in -50i64..50) {
        let q = DyadicCube { k, l: vec![l0, l1] };
        let kids = q.children();
        let vol: f64 = kids.iter().map(|c| c.volume()).sum();
        prop_assert!((vol - q.volume()).abs() <= 1e-15 * q.volume());
        for c in &kids {
            prop_assert_eq!(&c.ancestor(k), &q);
            let (lo, hi) = (c.lo(), c.hi());
            prop_assert!((0..2).all(|a| lo[a] >= q.lo()[a] && hi[a] <= q.hi()[a]));
        }
    }
}
