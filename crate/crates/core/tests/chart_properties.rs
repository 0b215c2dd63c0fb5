use std::sync::Arc;

use curvlab::chart::{CellSet, ChartGrid, FormField, MapField, StencilOrder};
use proptest::prelude::*;

fn grid(n: usize, cells: usize) -> Arc<ChartGrid> {
    ChartGrid::padded_box(&vec![0.0; n], &vec![1.0; n], &vec![cells; n], 0).unwrap()
}

fn trig_form(g: &Arc<ChartGrid>, degree: usize, a: f64, b: f64) -> FormField {
    let nc = curvlab::chart::multi_index::binomial(g.dim(), degree);
    FormField::from_fn(g, degree, |x| {
        (0..nc)
            .map(|c| {
                let s: f64 = x.iter().enumerate().map(|(i, xi)| (i + c + 1) as f64 * xi).sum();
                (a * s + c as f64).sin() + (b * x[0] * x[x.len() - 1]).cos()
            })
            .collect()
    })
    .unwrap()
}

#[test]
fn dd_vanishes_to_roundoff() {
    for (n, k) in [(2, 0), (3, 0), (3, 1), (4, 1), (4, 2)] {
        let g = grid(n, if n == 4 { 10 } else { 24 });
        let f = trig_form(&g, k, 1.3, 0.7);
        let dd = f.d().unwrap().d().unwrap();
        assert!(dd.max_abs(None) < 1e-9, "n={n} k={k}: {}", dd.max_abs(None));
    }
}

#[test]
fn leibniz_rule_converges() {
    let mut errs = Vec::new();
    for cells in [32, 64] {
        let g = grid(3, cells);
        let a = trig_form(&g, 1, 1.1, 0.4);
        let b = trig_form(&g, 1, 0.6, 1.2);
        let lhs = a.wedge(&b).unwrap().d().unwrap();
        let rhs = a.d().unwrap().wedge(&b).unwrap().sub(&a.wedge(&b.d().unwrap()).unwrap()).unwrap();
        errs.push(lhs.sub(&rhs).unwrap().max_abs_interior());
    }
    assert!(errs[0] < 1e-3, "{errs:?}");
    assert!(errs[1] < errs[0] / 8.0, "{errs:?}");
}

#[test]
fn second_order_stencil_converges_at_second_order() {
    let mut errs = Vec::new();
    for cells in [64, 128] {
        let g = grid(2, cells);
        let f = FormField::scalar(&g, |x| (2.0 * x[0]).sin() * x[1].exp());
        let df = f.exterior_derivative(StencilOrder::Second).unwrap();
        let mut e: f64 = 0.0;
        for node in 0..g.node_count() {
            let x = g.point(node);
            e = e.max((df.get(node, 0) - 2.0 * (2.0 * x[0]).cos() * x[1].exp()).abs());
        }
        errs.push(e);
    }
    let ratio = errs[0] / errs[1];
    assert!(ratio > 3.5 && ratio < 4.5, "{errs:?}");
}

#[test]
fn stokes_for_compactly_supported_forms() {
    let bump = |x: &[f64]| -> f64 {
        let r2: f64 = x.iter().map(|v| (v - 0.5) * (v - 0.5)).sum::<f64>() / 0.16;
        if r2 < 1.0 {
            (1.0 - r2).powi(4)
        } else {
            0.0
        }
    };
    let mut vals = Vec::new();
    for cells in [32, 64, 128] {
        let g = grid(2, cells);
        let f = FormField::from_fn(&g, 1, |x| vec![bump(x) * x[1].sin(), bump(x) * (3.0 * x[0]).cos()]).unwrap();
        vals.push(f.d().unwrap().integrate(&CellSet::all(&g)).unwrap().value.abs());
    }
    assert!(vals.iter().all(|v| *v < 1e-12), "{vals:?}");
}

#[test]
fn interpolation_error_is_second_order() {
    let mut errs = Vec::new();
    for cells in [64, 128] {
        let g = grid(2, cells);
        let f = MapField::from_fn(&g, 1, |x| vec![(3.0 * x[0]).sin() * (2.0 * x[1]).cos()]).unwrap();
        let mut e: f64 = 0.0;
        for i in 0..500 {
            let p = [(i as f64 * 0.618_033_988_7).fract(), (i as f64 * 0.754_877_666_2).fract()];
            let v = f.interpolate(&p).unwrap()[0];
            e = e.max((v - (3.0 * p[0]).sin() * (2.0 * p[1]).cos()).abs());
        }
        errs.push(e);
    }
    let c = errs[1] * 128.0f64.powi(2);
    assert!(errs[0] <= c / 64.0f64.powi(2) * 5.0 && errs[1] < 1e-3, "{errs:?}");
    assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
}

proptest! {
    #[test]
    fn wedge_is_graded_commutative_bitwise(seed in 0u64..1000, p in 0usize..3, q in 0usize..3) {
        let n = 4;
        prop_assume!(p + q <= n);
        let g = grid(n, 4);
        let a = trig_form(&g, p, 0.3 + seed as f64 * 1e-3, 1.7);
        let b = trig_form(&g, q, 2.1, 0.2 + seed as f64 * 2e-3);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let s = if p * q % 2 == 0 { 1.0 } else { -1.0 };
        for (x, y) in ab.coeffs().iter().zip(ba.coeffs()) {
            prop_assert!(*x == s * y);
        }
    }

    #[test]
    fn wedge_is_bilinear(l in -3.0f64..3.0) {
        let g = grid(3, 4);
        let a1 = trig_form(&g, 1, 0.4, 0.9);
        let a2 = trig_form(&g, 1, 1.4, 0.1);
        let b = trig_form(&g, 2, 0.8, 0.3);
        let lhs = a1.axpy(l, &a2).unwrap().wedge(&b).unwrap();
        let rhs = a1.wedge(&b).unwrap().axpy(l, &a2.wedge(&b).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs(None) < 1e-12);
    }
}
