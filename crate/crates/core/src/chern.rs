//! Gauss–Bonnet–Chern transgression: the forms Φ_i, the primitive Π(ω) and
//! the calibration of its scale against the Pfaffian.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::chart::multi_index::sort_sign;
use crate::chart::FormField;
use crate::error::{Error, Result};
use crate::geometry::{pfaffian, FrameBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Nominal,
    Calibrated,
}

#[derive(Debug, Clone)]
pub struct TransgressionSet {
    pub phis: Vec<FormField>,
    pub pi_form: FormField,
    /// Raw coefficients c_i multiplying Φ_i.
    pub coefficients: Vec<f64>,
    pub convention: Convention,
    /// Overall scale applied on top of `coefficients` (1 for the nominal
    /// convention).
    pub scale: f64,
    /// Relative L² residual of dΠ against Pf after scaling (calibrated only).
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c_star: f64,
    pub relative_residual: f64,
}

fn check_dim(n: usize) -> Result<()> {
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    if n >= 6 {
        return Err(Error::UnsupportedDimension(n, "transgression forms are evaluated for n = 2, 4 only"));
    }
    Ok(())
}

/// Φ_i = Σ_{ζ(1)=1} sgn ζ ω¹_{ζ(2)} ∧ … ∧ ω¹_{ζ(n−2i)} ∧ Ω^{ζ(n−2i+1)}_{ζ(n−2i+2)} ∧ … ∧ Ω^{ζ(n−1)}_{ζ(n)}
/// (indices from 0 in code).
pub fn phi_form(fb: &FrameBundle, i: usize) -> Result<FormField> {
    let n = fb.dim();
    check_dim(n)?;
    if i >= n / 2 {
        return Err(Error::IndexOutOfRange(i, n / 2));
    }
    let n_omega = n - 2 * i - 1;
    let mut total = FormField::zeros(fb.grid(), n - 1);
    for rest in (1..n).permutations(n - 1) {
        let mut zeta = vec![0];
        zeta.extend(&rest);
        let sign = sort_sign(&zeta) as f64;
        let mut factors = Vec::with_capacity(n_omega + i);
        for &j in &zeta[1..=n_omega] {
            factors.push(fb.omega(0, j)?);
        }
        for pair in zeta[n_omega + 1..].chunks(2) {
            factors.push(fb.curvature(pair[0], pair[1])?);
        }
        if factors.iter().any(FormField::is_zero) {
            continue;
        }
        let mut term = factors[0].clone();
        for f in &factors[1..] {
            term = term.wedge(f)?;
        }
        total = total.axpy(sign, &term)?;
    }
    Ok(total)
}

fn double_factorial(k: usize) -> f64 {
    (1..=k).rev().step_by(2).map(|v| v as f64).product()
}

/// c_i = π^{−n} (−1)^i / ((2n−2i−1)!! · i! · 2^{n+i}) for i = 0, …, n/2−1.
pub fn nominal_coefficients(n: usize) -> Vec<f64> {
    (0..n / 2)
        .map(|i| {
            let fact: f64 = (1..=i).map(|v| v as f64).product();
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign / (std::f64::consts::PI.powi(n as i32)
                * double_factorial(2 * n - 2 * i - 1)
                * fact
                * 2f64.powi((n + i) as i32))
        })
        .collect()
}

fn combine(phis: &[FormField], coeffs: &[f64]) -> Result<FormField> {
    let mut pi = FormField::zeros(phis[0].grid(), phis[0].degree());
    for (phi, c) in phis.iter().zip(coeffs) {
        pi = pi.axpy(*c, phi)?;
    }
    Ok(pi)
}

/// Least-squares c* minimizing ‖c·dΠ_nominal − Pf‖₂ over the nodes in `mask`
/// (interior nodes when `None`).
pub fn calibrate_transgression(fb: &FrameBundle, mask: Option<&[bool]>) -> Result<Calibration> {
    let n = fb.dim();
    check_dim(n)?;
    let phis = (0..n / 2).map(|i| phi_form(fb, i)).collect::<Result<Vec<_>>>()?;
    let pi = combine(&phis, &nominal_coefficients(n))?;
    calibrate_against(fb, &pi, mask)
}

fn calibrate_against(fb: &FrameBundle, pi: &FormField, mask: Option<&[bool]>) -> Result<Calibration> {
    let dpi = pi.exterior_derivative(fb.stencil())?;
    let pf = pfaffian(fb)?;
    let mask = mask.unwrap_or(fb.grid().interior_mask());
    let (mut dd, mut dp, mut pp) = (0.0, 0.0, 0.0);
    for node in (0..fb.grid().node_count()).filter(|&i| mask[i]) {
        let (a, b) = (dpi.get(node, 0), pf.get(node, 0));
        dd += a * a;
        dp += a * b;
        pp += b * b;
    }
    let scale_pf = pf.max_abs(Some(mask));
    if !(scale_pf > 1e-12) || !(dd > 0.0) {
        return Err(Error::DegenerateCalibration);
    }
    let c_star = dp / dd;
    // summed directly; the expanded form cancels catastrophically when the
    // fit is exact
    let mut direct = 0.0;
    for node in (0..fb.grid().node_count()).filter(|&i| mask[i]) {
        let r = c_star * dpi.get(node, 0) - pf.get(node, 0);
        direct += r * r;
    }
    Ok(Calibration { c_star, relative_residual: (direct / pp).sqrt() })
}

pub fn gbc_primitive(fb: &FrameBundle, convention: Convention, mask: Option<&[bool]>) -> Result<TransgressionSet> {
    let n = fb.dim();
    check_dim(n)?;
    let phis = (0..n / 2).map(|i| phi_form(fb, i)).collect::<Result<Vec<_>>>()?;
    let coefficients = nominal_coefficients(n);
    let raw = combine(&phis, &coefficients)?;
    let (scale, residual) = match convention {
        Convention::Nominal => (1.0, None),
        Convention::Calibrated => {
            let cal = calibrate_against(fb, &raw, mask)?;
            (cal.c_star, Some(cal.relative_residual))
        }
    };
    Ok(TransgressionSet { pi_form: raw.scale(scale), phis, coefficients, convention, scale, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nominal_coefficient_for_surfaces() {
        let c = nominal_coefficients(2);
        assert_eq!(c.len(), 1);
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((c[0] - 1.0 / (12.0 * pi2)).abs() < 1e-18);
        let c4 = nominal_coefficients(4);
        // 7!!·2⁴ and −5!!·1!·2⁵ over π⁴
        let pi4 = std::f64::consts::PI.powi(4);
        assert!((c4[0] - 1.0 / (105.0 * 16.0 * pi4)).abs() < 1e-18);
        assert!((c4[1] + 1.0 / (15.0 * 32.0 * pi4)).abs() < 1e-18);
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(1), 1.0);
        assert_eq!(double_factorial(3), 3.0);
        assert_eq!(double_factorial(7), 105.0);
    }
}
