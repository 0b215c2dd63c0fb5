use std::f64::consts::PI;
use std::sync::Arc;

use curvlab::chart::{ChartGrid, FormField, MapField};
use curvlab::chern::{calibrate_transgression, gbc_primitive, phi_form, Convention};
use curvlab::geometry::{frame_bundle, pfaffian, FrameBundle, GeometryOptions, ImmersionGeometry, MetricField};
use curvlab::Error;

mod common;
use common::{brute_force_phi, synthetic_bundle};

#[test]
fn phi_enumeration_matches_brute_force_on_n4() {
    for seed in [1, 2, 3] {
        let fb = synthetic_bundle(seed);
        for i in 0..2 {
            let phi = phi_form(&fb, i).unwrap();
            assert_eq!(phi.degree(), 3);
            for node in [0, 77, 311, 624] {
                let oracle = brute_force_phi(&fb, i, node);
                for (a, b) in phi.at(node).iter().zip(&oracle) {
                    assert!((a - b).abs() <= 1e-12, "seed {seed} i {i}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn phi_index_and_dimension_checks() {
    let fb = synthetic_bundle(4);
    assert!(matches!(phi_form(&fb, 2), Err(Error::IndexOutOfRange(2, 2))));
    let g = ChartGrid::uniform(vec![0.0; 6], 0.1, vec![5; 6]).unwrap();
    let pairs = 15;
    let fb6 = FrameBundle::from_parts(
        &g,
        (0..6).map(|i| FormField::monomial(&g, &[i], |_| 1.0)).collect(),
        vec![FormField::zeros(&g, 1); pairs],
        vec![FormField::zeros(&g, 2); pairs],
    )
    .unwrap();
    assert!(matches!(phi_form(&fb6, 0), Err(Error::UnsupportedDimension(6, _))));
}

fn sphere_bundle(h: f64, pad: usize) -> (Arc<ChartGrid>, FrameBundle) {
    let lo = [0.3, 0.0];
    let hi = [PI - 0.3, 1.0];
    let cells: Vec<usize> = (0..2).map(|a| ((hi[a] - lo[a]) / h).round() as usize).collect();
    let g = ChartGrid::padded_box(&lo, &hi, &cells, pad).unwrap();
    let y = MapField::from_fn(&g, 3, |x| vec![x[0].sin() * x[1].cos(), x[0].sin() * x[1].sin(), x[0].cos()]).unwrap();
    let geo = ImmersionGeometry::compute(&y, &GeometryOptions::default()).unwrap();
    (g, geo.bundle)
}

#[test]
fn surface_transgression() {
    let (g, fb) = sphere_bundle(1.0 / 128.0, 8);
    let phi = phi_form(&fb, 0).unwrap();
    assert_eq!(phi.coeffs(), fb.omega(0, 1).unwrap().coeffs());
    let nominal = gbc_primitive(&fb, Convention::Nominal, None).unwrap();
    assert!((nominal.coefficients[0] - 1.0 / (12.0 * PI * PI)).abs() < 1e-18);
    let mask = g.inset_mask(8);
    let cal = gbc_primitive(&fb, Convention::Calibrated, Some(&mask)).unwrap();
    let r = cal.residual.unwrap();
    assert!(r <= 1e-3, "{r}");
    // calibrated Π is ω¹₂ itself: c* undoes the nominal coefficient
    assert!((cal.scale * nominal.coefficients[0] - 1.0).abs() < 1e-9, "{}", cal.scale);
    let dpi = cal.pi_form.exterior_derivative(fb.stencil()).unwrap();
    let pf = pfaffian(&fb).unwrap();
    assert!(dpi.sub(&pf).unwrap().max_abs(Some(&mask)) < 5e-4);
    let c = calibrate_transgression(&fb, Some(&mask)).unwrap();
    assert!((c.c_star - cal.scale).abs() < 1e-9 * c.c_star);
    assert!(pf.max_abs(Some(&mask)) > 0.9);
}

#[test]
fn flat_metric_is_a_degenerate_calibration_fixture() {
    let g = ChartGrid::uniform(vec![0.0, 0.0], 0.05, vec![21, 21]).unwrap();
    let metric = MetricField::from_fn(&g, |_| vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    let fb = frame_bundle(&metric, &GeometryOptions::default()).unwrap();
    assert!(phi_form(&fb, 0).unwrap().is_zero());
    let nominal = gbc_primitive(&fb, Convention::Nominal, None).unwrap();
    assert!(nominal.pi_form.is_zero());
    assert!(matches!(calibrate_transgression(&fb, None), Err(Error::DegenerateCalibration)));
}

#[test]
fn phi0_is_linear_in_small_metric_perturbations() {
    let g = ChartGrid::uniform(vec![0.0, 0.0], 1.0 / 32.0, vec![33, 33]).unwrap();
    let phi_at = |lambda: f64| {
        let metric = MetricField::from_fn(&g, |x| {
            let p = lambda * (2.0 * x[0]).sin() * (3.0 * x[1]).cos();
            vec![1.0 + p, 0.5 * p, 0.5 * p, 1.0 - p]
        })
        .unwrap();
        phi_form(&frame_bundle(&metric, &GeometryOptions::default()).unwrap(), 0).unwrap()
    };
    let a = phi_at(1e-4);
    let b = phi_at(2e-4);
    let lin = b.sub(&a.scale(2.0)).unwrap().max_abs(None);
    assert!(lin < 1e-3 * b.max_abs(None), "{lin} vs {}", b.max_abs(None));
}
