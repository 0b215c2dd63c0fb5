use std::f64::consts::PI;
use std::sync::Arc;

use curvlab::chart::{CellSet, ChartGrid, MapField};
use curvlab::degree::{
    brouwer_degree, degree_field, extrinsic_curvature_bound, spherical_image_measure, weak_convergence_experiment,
    DegreeOptions, SphereCellGrid,
};
use curvlab::mollify::MollifierKernel;
use curvlab::Error;
use proptest::prelude::*;

fn chart(lo: [f64; 2], hi: [f64; 2], cells: [usize; 2]) -> Arc<ChartGrid> {
    ChartGrid::padded_box(&lo, &hi, &cells, 0).unwrap()
}

fn polar(x: &[f64]) -> Vec<f64> {
    vec![x[0].sin() * x[1].cos(), x[0].sin() * x[1].sin(), x[0].cos()]
}

fn at(theta: f64, phi: f64) -> Vec<f64> {
    polar(&[theta, phi])
}

fn band_grid(cells: [usize; 2]) -> Arc<ChartGrid> {
    chart([0.3, 0.0], [PI - 0.3, 2.0 * PI], cells)
}

#[test]
fn constant_map_has_degree_zero() {
    let g = chart([0.0, 0.0], [1.0, 1.0], [16, 16]);
    let p = vec![0.0, 0.6, 0.8];
    let u = MapField::from_fn(&g, 3, |_| p.clone()).unwrap();
    let all = CellSet::all(&g);
    let r = brouwer_degree(&u, &all, &[1.0, 0.0, 0.0], &DegreeOptions::default()).unwrap();
    assert_eq!(r.degree, 0);
    assert!(r.regular);
    match brouwer_degree(&u, &all, &p, &DegreeOptions::default()) {
        Err(Error::TargetNotAdmissible(_)) => {}
        other => panic!("expected inadmissible target, got {other:?}"),
    }
}

#[test]
fn sphere_gauss_map_has_degree_one_inside_and_zero_outside() {
    let g = chart([0.3, 0.2], [PI - 0.3, 5.0], [64, 128]);
    let u = MapField::from_fn(&g, 3, polar).unwrap();
    let all = CellSet::all(&g);
    let opts = DegreeOptions::default();
    for (t, p) in [(1.0, 1.0), (0.5, 3.0), (2.5, 4.7), (PI / 2.0, 2.0)] {
        let r = brouwer_degree(&u, &all, &at(t, p), &opts).unwrap();
        assert_eq!((r.degree, r.regular), (1, true), "target θ={t} φ={p}");
    }
    for z in [at(0.1, 1.0), at(PI - 0.1, 2.0), at(1.5, 5.6)] {
        assert_eq!(brouwer_degree(&u, &all, &z, &opts).unwrap().degree, 0);
    }
}

#[test]
fn double_wrap_has_degree_two() {
    let g = chart([0.5, 0.05], [PI - 0.5, 2.0 * PI - 0.05], [32, 256]);
    let u = MapField::from_fn(&g, 3, |x| polar(&[x[0], 2.0 * x[1]])).unwrap();
    let all = CellSet::all(&g);
    for phi in [1.0, 2.0, 4.0, 5.5] {
        let r = brouwer_degree(&u, &all, &at(PI / 2.0, phi), &DegreeOptions::default()).unwrap();
        assert_eq!((r.degree, r.regular), (2, true), "φ={phi}");
    }
}

#[test]
fn orientation_reversal_flips_sign() {
    let g = chart([0.3, 0.2], [PI - 0.3, 5.0], [32, 64]);
    let u = MapField::from_fn(&g, 3, |x| {
        let p = polar(x);
        vec![p[0], -p[1], p[2]]
    })
    .unwrap();
    let r = brouwer_degree(&u, &CellSet::all(&g), &at(1.0, -2.0), &DegreeOptions::default()).unwrap();
    assert_eq!(r.degree, -1);
}

#[test]
fn s4_chart_has_unit_degree() {
    let g = ChartGrid::padded_box(&[0.6, 0.6, 0.6, 0.6], &[1.8, 1.8, 1.8, 1.8], &[8, 8, 8, 8], 0).unwrap();
    let u = MapField::from_fn(&g, 5, |a| {
        let (s1, s2, s3) = (a[0].sin(), a[1].sin(), a[2].sin());
        vec![a[0].cos(), s1 * a[1].cos(), s1 * s2 * a[2].cos(), s1 * s2 * s3 * a[3].cos(), s1 * s2 * s3 * a[3].sin()]
    })
    .unwrap();
    let all = CellSet::all(&g);
    let target = |a: [f64; 4]| u.interpolate(&a).map(|v| v.to_vec()).unwrap();
    let d = brouwer_degree(&u, &all, &target([1.2, 1.2, 1.2, 1.2]), &DegreeOptions::default()).unwrap();
    assert_eq!(d.degree.abs(), 1);
    let d2 = brouwer_degree(&u, &all, &target([0.9, 1.5, 1.0, 1.6]), &DegreeOptions::default()).unwrap();
    assert_eq!(d2.degree, d.degree);
    let outside = brouwer_degree(&u, &all, &[1.0, 0.0, 0.0, 0.0, 0.0], &DegreeOptions::default()).unwrap();
    assert_eq!(outside.degree, 0);
}

#[test]
fn band_degree_integral_matches_band_area() {
    let g = band_grid([96, 256]);
    let u = MapField::from_fn(&g, 3, polar).unwrap();
    let cells = SphereCellGrid::new(2, 32).unwrap();
    let rep = degree_field(&u, &CellSet::all(&g), &cells, &DegreeOptions::default()).unwrap();
    let exact = 4.0 * PI * 0.3f64.cos();
    assert!((rep.integral - exact).abs() < 0.02, "{} vs {exact}", rep.integral);
    assert!(rep.excluded_area < 1e-3);
    assert!(rep.rows.iter().all(|r| r.degree == 0 || r.degree == 1));
    // cells far from the boundary image carry one constant degree
    for cell in 0..cells.len() {
        let rows: Vec<_> = rep.rows.iter().filter(|r| r.cell == cell && r.regular).collect();
        if rows.len() == 1 {
            assert!(rows[0].clearance > cells.circumradius(cell));
        }
    }
}

#[test]
fn degree_is_additive_over_split_regions() {
    let g = band_grid([48, 128]);
    let u = MapField::from_fn(&g, 3, polar).unwrap();
    let all = CellSet::all(&g);
    let a = CellSet::from_predicate(&g, |x| x[1] < 2.0 || (x[0] < 1.2 && x[1] < 4.0));
    let b = all.difference(&a);
    let opts = DegreeOptions::default();
    for (t, p) in [(1.0, 1.0), (1.0, 3.0), (2.0, 3.0), (1.1, 1.9), (2.5, 5.0), (0.1, 0.0)] {
        let z = at(t, p);
        let (da, db, dall) = match (
            brouwer_degree(&u, &a, &z, &opts),
            brouwer_degree(&u, &b, &z, &opts),
            brouwer_degree(&u, &all, &z, &opts),
        ) {
            (Ok(x), Ok(y), Ok(w)) => (x.degree, y.degree, w.degree),
            _ => continue,
        };
        assert_eq!(da + db, dall, "θ={t} φ={p}");
    }
}

#[test]
fn image_measure_of_a_point_is_one_cell() {
    let g = chart([0.0, 0.0], [1.0, 1.0], [8, 8]);
    let u = MapField::from_fn(&g, 3, |_| vec![0.6, 0.0, 0.8]).unwrap();
    let cells = SphereCellGrid::new(2, 16).unwrap();
    let e = CellSet::node_box(&g, &[2, 2], &[3, 3]);
    let m = spherical_image_measure(&u, &e, &cells).unwrap();
    assert_eq!(m.hit_cells, 1);
    assert_eq!(m.measure, cells.area(cells.locate(&[0.6, 0.0, 0.8])));
}

#[test]
fn image_measure_of_band_brackets_band_area() {
    let g = band_grid([64, 256]);
    let u = MapField::from_fn(&g, 3, polar).unwrap();
    let cells = SphereCellGrid::new(2, 64).unwrap();
    let e = CellSet::coord_box(&g, &[1.0, 0.0], &[2.0, 2.0 * PI]);
    let m = spherical_image_measure(&u, &e, &cells).unwrap();
    let lo = e.cells().map(|c| g.cell_center(c)[0]).fold(f64::INFINITY, f64::min) - 0.5 * g.spacing()[0];
    let hi = e.cells().map(|c| g.cell_center(c)[0]).fold(f64::NEG_INFINITY, f64::max) + 0.5 * g.spacing()[0];
    let exact = 2.0 * PI * (lo.cos() - hi.cos());
    assert!(m.measure >= exact);
    assert!(m.measure <= exact + m.slack, "{} vs {exact} + {}", m.measure, m.slack);
}

#[test]
fn extrinsic_bound_rejects_overlap_and_sums_caps() {
    let g = chart([0.05, 0.0], [PI - 0.05, 2.0 * PI], [96, 192]);
    let u = MapField::from_fn(&g, 3, polar).unwrap();
    let cells = SphereCellGrid::new(2, 48).unwrap();
    assert_eq!(extrinsic_curvature_bound(&u, &[], &cells).unwrap().total, 0.0);
    let north = CellSet::from_predicate(&g, |x| x[0] < 0.8);
    let south = CellSet::from_predicate(&g, |x| x[0] > 2.0);
    let wide = CellSet::from_predicate(&g, |x| x[0] < 1.0);
    match extrinsic_curvature_bound(&u, &[north.clone(), wide], &cells) {
        Err(Error::OverlappingParts(0, 1)) => {}
        other => panic!("expected overlap error, got {other:?}"),
    }
    let b = extrinsic_curvature_bound(&u, &[north.clone(), south.clone()], &cells).unwrap();
    assert!(b.total <= 4.0 * PI);
    let union = spherical_image_measure(&u, &north.union(&south), &cells).unwrap();
    assert!(b.total <= union.measure + b.slack);
}

#[test]
fn weak_pairings_of_mollified_sphere_converge_to_the_cap_integral() {
    let g = chart([0.2, 0.0], [2.2, 3.2], [128, 204]);
    let y = MapField::from_fn(&g, 3, polar).unwrap();
    let (c0, c1, rad) = (1.2, 1.6, 0.5);
    let region = CellSet::from_predicate(&g, |x| (x[0] - c0).powi(2) + (x[1] - c1).powi(2) < rad * rad);
    let cells = SphereCellGrid::new(2, 32).unwrap();
    let phi = |z: &[f64]| z[2] + 1.0;
    let tab = weak_convergence_experiment(
        &y, &region, &[0.4, 0.2, 0.1], MollifierKernel::Polynomial, &phi, &cells, &DegreeOptions::default(),
    )
    .unwrap();
    assert!(tab.monotone, "{:?}", tab.rows);
    // ∫ (cos θ + 1) sin θ over the chart disk, polar midpoint rule
    let (m, k) = (400, 400);
    let mut exact = 0.0;
    for i in 0..m {
        let r = (i as f64 + 0.5) / m as f64 * rad;
        for j in 0..k {
            let t = (j as f64 + 0.5) / k as f64 * 2.0 * PI;
            let th = c0 + r * t.cos();
            exact += (th.cos() + 1.0) * th.sin() * r * (rad / m as f64) * (2.0 * PI / k as f64);
        }
    }
    let last = tab.rows.last().unwrap().pairing;
    // the cell set only approximates the disk to within one chart cell
    assert!((last - exact).abs() < 0.02, "{last} vs {exact}");
}

fn random_subset(g: &Arc<ChartGrid>, seed: u64) -> CellSet {
    let mask = (0..g.cell_count())
        .map(|c| (c as u64).wrapping_mul(6364136223846793005).wrapping_add(seed).rotate_left(17) % 3 == 0)
        .collect();
    CellSet::from_mask(g, mask)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn image_measure_is_monotone_and_subadditive(s1 in any::<u64>(), s2 in any::<u64>()) {
        let g = chart([0.2, 0.0], [PI - 0.2, 2.0 * PI], [12, 24]);
        let u = MapField::from_fn(&g, 3, polar).unwrap();
        let cells = SphereCellGrid::new(2, 8).unwrap();
        let a = random_subset(&g, s1);
        let b = random_subset(&g, s2);
        let m = |e: &CellSet| spherical_image_measure(&u, e, &cells).unwrap().measure;
        let (ma, mb, mu, mi) = (m(&a), m(&b), m(&a.union(&b)), m(&a.intersect(&b)));
        prop_assert!(mi <= ma + 1e-12 && ma <= mu + 1e-12 && mb <= mu + 1e-12);
        prop_assert!(mu <= ma + mb + 1e-12);
    }
}
