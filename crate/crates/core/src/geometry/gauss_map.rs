use nalgebra::DMatrix;

use super::GeometryOptions;
use crate::chart::{FormField, MapField};
use crate::error::{Error, Result};

/// Unit normal ν with det(Dy | ν) > 0: the generalized cross product of the
/// columns of Dy, normalized.
pub fn gauss_map(y: &MapField, opts: &GeometryOptions) -> Result<MapField> {
    let grid = y.grid();
    let n = grid.dim();
    let m = y.target_dim();
    if m != n + 1 {
        return Err(Error::InvalidField(format!("immersion must take values in R^{}, got R^{m}", n + 1)));
    }
    let jac = y.jacobian(opts.immersion_stencil);
    let mut values = vec![0.0; m * grid.node_count()];
    for node in 0..grid.node_count() {
        let dy = DMatrix::from_fn(m, n, |c, a| jac[a][node * m + c]);
        let nu = cross(&dy);
        let norm = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm >= opts.definiteness_floor) {
            return Err(Error::NotImmersion(node));
        }
        for c in 0..m {
            values[node * m + c] = nu[c] / norm;
        }
    }
    MapField::new(grid, m, values)
}

/// ν_k = (−1)^{n+k} det(Dy without row k), so that det(Dy | ν) = |ν|².
fn cross(dy: &DMatrix<f64>) -> Vec<f64> {
    let m = dy.nrows();
    let n = dy.ncols();
    if n == 2 {
        let (a, b) = (dy.column(0), dy.column(1));
        return vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    }
    (0..m)
        .map(|k| {
            let minor = dy.clone().remove_row(k);
            let s = if (n + k) % 2 == 0 { 1.0 } else { -1.0 };
            s * minor.determinant()
        })
        .collect()
}

/// ν*σ_{Sⁿ}: coefficient det(∂₁ν, …, ∂ₙν, ν) of dx₁∧…∧dxₙ.
pub fn sphere_pullback(nu: &MapField, opts: &GeometryOptions) -> Result<FormField> {
    let grid = nu.grid();
    let n = grid.dim();
    let m = nu.target_dim();
    if m != n + 1 {
        return Err(Error::InvalidField(format!("normal must take values in R^{}, got R^{m}", n + 1)));
    }
    let dev = (0..grid.node_count())
        .map(|node| (nu.at(node).iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    if dev > 1e-6 {
        return Err(Error::NonUnitNormal(dev));
    }
    let jac = nu.jacobian(opts.immersion_stencil);
    let coeffs = (0..grid.node_count())
        .map(|node| {
            DMatrix::from_fn(m, m, |c, a| if a < n { jac[a][node * m + c] } else { nu.at(node)[c] }).determinant()
        })
        .collect();
    FormField::new(grid, n, coeffs)
}
