use itertools::Itertools;

use super::frame::FrameBundle;
use crate::chart::multi_index::sort_sign;
use crate::chart::FormField;
use crate::error::{Error, Result};

/// Pf(Ω) = 1/(n·(n/2)!) Σ_ζ sgn ζ Ω^{ζ1}_{ζ2} ∧ … ∧ Ω^{ζ(n−1)}_{ζn}.
pub fn pfaffian(fb: &FrameBundle) -> Result<FormField> {
    let n = fb.dim();
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    if !fb.has_curvature() {
        return Err(Error::MissingStage("curvature"));
    }
    let half = n / 2;
    let factorial: f64 = (1..=half).map(|v| v as f64).product();
    let prefactor = 1.0 / (n as f64 * factorial);
    let mut total = FormField::zeros(fb.grid(), n);
    for perm in (0..n).permutations(n) {
        let sign = sort_sign(&perm) as f64;
        let factors: Vec<FormField> =
            perm.chunks(2).map(|p| fb.curvature(p[0], p[1])).collect::<Result<_>>()?;
        if factors.iter().any(FormField::is_zero) {
            continue;
        }
        let mut term = factors[0].clone();
        for f in &factors[1..] {
            term = term.wedge(f)?;
        }
        total = total.axpy(sign, &term)?;
    }
    Ok(total.scale(prefactor))
}
