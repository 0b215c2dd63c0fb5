use std::f64::consts::PI;
use std::sync::Arc;

use curvlab::chart::{ChartGrid, FormField, MapField};
use curvlab::geometry::{
    connection_forms, frame_bundle, gauss_map, gram_schmidt_frame, metric_from_immersion, pfaffian,
    sphere_pullback, structural_residual, GeometryOptions, ImmersionGeometry, MetricField,
};

fn chart(lo: [f64; 2], hi: [f64; 2], h: f64) -> Arc<ChartGrid> {
    let cells: Vec<usize> = (0..2).map(|a| ((hi[a] - lo[a]) / h).round() as usize).collect();
    ChartGrid::padded_box(&lo, &hi, &cells, 0).unwrap()
}

fn sphere(r: f64) -> impl Fn(&[f64]) -> Vec<f64> {
    move |x: &[f64]| vec![r * x[0].sin() * x[1].cos(), r * x[0].sin() * x[1].sin(), r * x[0].cos()]
}

fn max_err_interior(g: &ChartGrid, f: impl Fn(usize) -> f64) -> f64 {
    (0..g.node_count()).filter(|&i| g.is_interior(i)).map(f).fold(0.0, f64::max)
}

/// Nested differences spread the one-sided edge error inwards by one layer
/// per level; curvature quantities are compared on nodes of the nominal
/// chart, sampled with this many ghost layers around it.
const GHOST: usize = 8;

fn padded_chart(lo: [f64; 2], hi: [f64; 2], h: f64) -> Arc<ChartGrid> {
    let cells: Vec<usize> = (0..2).map(|a| ((hi[a] - lo[a]) / h).round() as usize).collect();
    ChartGrid::padded_box(&lo, &hi, &cells, GHOST).unwrap()
}

fn max_err_nominal(g: &ChartGrid, f: impl Fn(usize) -> f64) -> f64 {
    let mask = g.inset_mask(GHOST);
    (0..g.node_count()).filter(|&i| mask[i]).map(f).fold(0.0, f64::max)
}

#[test]
fn sphere_metric() {
    let g = chart([0.3, 0.0], [PI - 0.3, 1.0], 1.0 / 256.0);
    let y = MapField::from_fn(&g, 3, sphere(1.0)).unwrap();
    let m = metric_from_immersion(&y, &GeometryOptions::default()).unwrap();
    let err = max_err_interior(&g, |i| {
        let s = g.coord(i, 0).sin();
        (m.get(i, 0, 0) - 1.0).abs().max(m.get(i, 0, 1).abs()).max((m.get(i, 1, 1) - s * s).abs())
    });
    assert!(err < 1e-6, "{err}");
}

#[test]
fn cylinder_metric_and_normal() {
    let g = chart([0.0, 0.0], [2.0, 1.0], 1.0 / 256.0);
    let y = MapField::from_fn(&g, 3, |x| vec![x[0].cos(), x[0].sin(), x[1]]).unwrap();
    let opts = GeometryOptions::default();
    let m = metric_from_immersion(&y, &opts).unwrap();
    let err = max_err_interior(&g, |i| (m.matrix(i) - nalgebra::DMatrix::identity(2, 2)).amax());
    assert!(err < 1e-6, "{err}");
    let nu = gauss_map(&y, &opts).unwrap();
    let err = max_err_interior(&g, |i| {
        let t = g.coord(i, 0);
        let v = nu.at(i);
        (v[0] - t.cos()).abs().max((v[1] - t.sin()).abs()).max(v[2].abs())
    });
    assert!(err < 1e-8, "{err}");
}

#[test]
fn sphere_frame_connection_and_curvature() {
    let g = chart([0.3, 0.0], [PI - 0.3, 1.0], 1.0 / 256.0);
    let opts = GeometryOptions::default();
    let metric = MetricField::from_fn(&g, |x| vec![1.0, 0.0, 0.0, x[0].sin().powi(2)]).unwrap();
    let fb = gram_schmidt_frame(&metric, &opts).unwrap();
    assert!(fb.orthonormality_error(&metric) < 1e-10);
    assert!(fb.duality_error() < 1e-10);
    let e = max_err_interior(&g, |i| {
        let s = g.coord(i, 0).sin();
        let f = fb.frame_matrix(i);
        (f[(0, 0)] - 1.0).abs().max((f[(1, 1)] - 1.0 / s).abs()).max((fb.coframe()[1].get(i, 1) - s).abs())
    });
    assert!(e < 1e-12);
    let fb = frame_bundle(&metric, &opts).unwrap();
    let w = fb.omega(0, 1).unwrap();
    let e = max_err_interior(&g, |i| (w.get(i, 0)).abs().max((w.get(i, 1) + g.coord(i, 0).cos()).abs()));
    assert!(e < 2e-4, "omega {e}");
    assert_eq!(fb.omega(1, 0).unwrap().coeffs()[5], -w.coeffs()[5]);
    let omega = fb.curvature(0, 1).unwrap();
    let pf = pfaffian(&fb).unwrap();
    let e1 = max_err_interior(&g, |i| (omega.get(i, 0) - g.coord(i, 0).sin()).abs());
    let e2 = max_err_interior(&g, |i| (pf.get(i, 0) - g.coord(i, 0).sin()).abs());
    assert!(e1 < 2e-4 && e2 < 2e-4, "{e1} {e2}");
}

#[test]
fn radius_r_sphere_has_curvature_one_over_r_squared() {
    let r = 2.5;
    let g = padded_chart([0.4, 0.0], [PI - 0.4, 1.0], 1.0 / 256.0);
    let y = MapField::from_fn(&g, 3, sphere(r)).unwrap();
    let geo = ImmersionGeometry::compute(&y, &GeometryOptions::default()).unwrap();
    // area form of the radius-r sphere is r² sinθ dθ∧dφ
    let e = max_err_nominal(&g, |i| (geo.pfaffian.get(i, 0) - g.coord(i, 0).sin()).abs());
    assert!(e < 2e-4, "{e}");
    let e = max_err_nominal(&g, |i| (geo.pullback.get(i, 0) - g.coord(i, 0).sin()).abs());
    assert!(e < 1e-6, "{e}");
}

#[test]
fn pfaffian_identity_on_unit_sphere_with_refinement() {
    let mut errs = Vec::new();
    for h in [1.0 / 128.0, 1.0 / 256.0] {
        let g = padded_chart([0.3, 0.0], [PI - 0.3, 1.0], h);
        let y = MapField::from_fn(&g, 3, sphere(1.0)).unwrap();
        let geo = ImmersionGeometry::compute(&y, &GeometryOptions::default()).unwrap();
        let nu_err = max_err_nominal(&g, |i| {
            let p = sphere(1.0)(&g.point(i));
            (0..3).map(|c| (geo.normal.at(i)[c] - p[c]).abs()).fold(0.0, f64::max)
        });
        assert!(nu_err < 1e-8, "{nu_err}");
        errs.push(geo.pfaffian.sub(&geo.pullback).unwrap().max_abs(Some(&g.inset_mask(GHOST))));
    }
    assert!(errs[1] < 5e-4 && errs[0] / errs[1] >= 3.0, "{errs:?}");
}

#[test]
fn ellipsoid_pullback_matches_closed_form_curvature() {
    let g = chart([0.3, 0.0], [PI - 0.3, 1.0], 1.0 / 256.0);
    let y = MapField::from_fn(&g, 3, |x| vec![x[0].sin() * x[1].cos(), x[0].sin() * x[1].sin(), 2.0 * x[0].cos()])
        .unwrap();
    let opts = GeometryOptions::default();
    let pb = sphere_pullback(&gauss_map(&y, &opts).unwrap(), &opts).unwrap();
    let e = max_err_interior(&g, |i| {
        let t = g.coord(i, 0);
        let q = 4.0 * t.sin().powi(2) + t.cos().powi(2);
        (pb.get(i, 0) - 4.0 * t.sin() / q.powf(1.5)).abs()
    });
    assert!(e < 1e-3, "{e}");
}

#[test]
fn structural_residual_is_second_order() {
    let mut res = Vec::new();
    for h in [1.0 / 64.0, 1.0 / 128.0] {
        let g = chart([0.3, 0.0], [PI - 0.3, 1.0], h);
        let metric = MetricField::from_fn(&g, |x| vec![1.0, 0.0, 0.0, x[0].sin().powi(2)]).unwrap();
        let opts = GeometryOptions::default();
        let fb = connection_forms(&metric, &gram_schmidt_frame(&metric, &opts).unwrap()).unwrap();
        res.push(structural_residual(&fb).unwrap());
    }
    let ratio = res[0] / res[1];
    assert!(ratio > 3.5 && ratio < 4.6, "{res:?}");

    let flat = chart([0.0, 0.0], [1.0, 1.0], 1.0 / 32.0);
    let metric = MetricField::from_fn(&flat, |_| vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    let opts = GeometryOptions::default();
    let fb = connection_forms(&metric, &gram_schmidt_frame(&metric, &opts).unwrap()).unwrap();
    assert!(structural_residual(&fb).unwrap() <= 1e-12);
}

#[test]
fn random_smooth_metric_residual_decreases() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let c: Vec<f64> = (0..6).map(|_| rng.random_range(-0.3..0.3)).collect();
    let metric_at = move |x: &[f64]| {
        let a = 1.0 + c[0] * (x[0] + 2.0 * x[1]).sin() + 0.1 * c[1] * x[0] * x[0];
        let b = c[2] * (x[0] * x[1]).cos() * 0.5;
        let d = 1.5 + c[3] * (3.0 * x[1]).cos() + c[4] * x[0] * c[5];
        vec![a, b, b, d]
    };
    let mut res = Vec::new();
    for cells in [32, 64, 128] {
        let g = ChartGrid::padded_box(&[0.0, 0.0], &[1.0, 1.0], &[cells, cells], 0).unwrap();
        let metric = MetricField::from_fn(&g, &metric_at).unwrap();
        let opts = GeometryOptions::default();
        let fb = connection_forms(&metric, &gram_schmidt_frame(&metric, &opts).unwrap()).unwrap();
        res.push(structural_residual(&fb).unwrap());
    }
    assert!(res.iter().all(|r| r.is_finite()));
    assert!(res[1] < res[0] && res[2] < res[1], "{res:?}");
}

fn grid4(lo: [f64; 4], hi: [f64; 4], cells: usize) -> Arc<ChartGrid> {
    ChartGrid::padded_box(&lo, &hi, &[cells; 4], 0).unwrap()
}

#[test]
fn product_metric_with_one_curved_plane_has_zero_pfaffian() {
    let g = grid4([0.8, 0.0, 0.0, 0.0], [1.6, 0.8, 0.8, 0.8], 10);
    let metric = MetricField::from_fn(&g, |x| {
        let mut m = vec![0.0; 16];
        m[0] = 1.0;
        m[5] = x[0].sin().powi(2);
        m[10] = 1.0;
        m[15] = 1.0;
        m
    })
    .unwrap();
    let fb = frame_bundle(&metric, &GeometryOptions::default()).unwrap();
    assert!(fb.curvature(0, 1).unwrap().max_abs_interior() > 0.5);
    let pf = pfaffian(&fb).unwrap();
    assert!(pf.max_abs(None) < 1e-12, "{}", pf.max_abs(None));
}

/// Round metric of S⁴ in hyperspherical coordinates.
fn s4_metric(x: &[f64]) -> Vec<f64> {
    let s1 = x[0].sin().powi(2);
    let s2 = s1 * x[1].sin().powi(2);
    let s3 = s2 * x[2].sin().powi(2);
    let mut m = vec![0.0; 16];
    m[0] = 1.0;
    m[5] = s1;
    m[10] = s2;
    m[15] = s3;
    m
}

fn s4_pfaffian(cells: usize, axis_order: Vec<usize>) -> (Arc<ChartGrid>, FormField) {
    let g = grid4([1.0, 1.0, 1.0, 0.0], [1.4, 1.4, 1.4, 0.4], cells);
    let metric = MetricField::from_fn(&g, s4_metric).unwrap();
    let opts = GeometryOptions { axis_order, ..Default::default() };
    (g.clone(), pfaffian(&frame_bundle(&metric, &opts).unwrap()).unwrap())
}

#[test]
fn s4_pfaffian_is_frame_independent_and_proportional_to_volume() {
    let (g, pf) = s4_pfaffian(12, vec![]);
    let (_, pf_perm) = s4_pfaffian(12, vec![1, 2, 0, 3]);
    let diff = pf.sub(&pf_perm).unwrap().max_abs_interior();
    let scale = pf.max_abs_interior();
    assert!(diff < 1e-2 * scale, "{diff} vs {scale}");
    // with the 1/(n (n/2)!) prefactor, Pf = 3 · dV on the unit S⁴
    let e = max_err_interior(&g, |i| {
        let x = g.point(i);
        let vol = x[0].sin().powi(3) * x[1].sin().powi(2) * x[2].sin();
        (pf.get(i, 0) - 3.0 * vol).abs()
    });
    assert!(e < 2e-2, "{e}");
}
