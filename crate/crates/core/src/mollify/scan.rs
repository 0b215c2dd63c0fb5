use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::convolve::mollify_components;
use super::holder::holder_quotient;
use super::kernel::MollifierKernel;
use crate::chart::{ChartGrid, MapField, StencilOrder};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Least-squares standard error of the slope.
    pub stderr: f64,
}

/// Least-squares line through (ln x, ln y).
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<LogLogFit> {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len();
    if m < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if m > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (rss / (m - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Some(LogLogFit { slope, intercept, stderr })
}

/// Metric entries (upper triangle) from node-major packed Dy, laid out as
/// data[node·n·m + a·m + c] = ∂_a y^c.
fn metric_entries(dy: &[f64], n: usize, m: usize) -> Vec<f64> {
    let ntri = n * (n + 1) / 2;
    let nodes = dy.len() / (n * m);
    let mut g = vec![0.0; nodes * ntri];
    for node in 0..nodes {
        let d = &dy[node * n * m..(node + 1) * n * m];
        let mut t = 0;
        for i in 0..n {
            for j in i..n {
                g[node * ntri + t] = (0..m).map(|c| d[i * m + c] * d[j * m + c]).sum();
                t += 1;
            }
        }
    }
    g
}

fn definite(entries: &[f64], n: usize) -> bool {
    if n == 2 {
        return entries[0] > 1e-10 && entries[0] * entries[2] - entries[1] * entries[1] > 1e-20;
    }
    let mut t = 0;
    let mut mat = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            mat[(i, j)] = entries[t];
            mat[(j, i)] = entries[t];
            t += 1;
        }
    }
    mat.cholesky().is_some()
}

/// Defect fields g_ε − g for each ε on the common valid set.
struct Defects {
    ntri: usize,
    mask: Vec<bool>,
    fields: Vec<Option<Vec<f64>>>,
}

fn defects(y: &MapField, kernel: MollifierKernel, eps_list: &[f64]) -> Result<Defects> {
    let grid = y.grid();
    let n = grid.dim();
    let m = y.target_dim();
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("empty ε list".into()));
    }
    let jac = y.jacobian(StencilOrder::Fourth);
    let mut dy = vec![0.0; grid.node_count() * n * m];
    for node in 0..grid.node_count() {
        for a in 0..n {
            for c in 0..m {
                dy[node * n * m + a * m + c] = jac[a][node * m + c];
            }
        }
    }
    let ntri = n * (n + 1) / 2;
    let g = metric_entries(&dy, n, m);
    let eps_max = eps_list.iter().cloned().fold(0.0, f64::max);
    let (_, mask) = mollify_components(grid, &vec![0.0; grid.node_count()], 1, kernel, eps_max)?;
    let mut fields = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let (dy_eps, _) = mollify_components(grid, &dy, n * m, kernel, eps)?;
        let g_eps = metric_entries(&dy_eps, n, m);
        let immersed = (0..grid.node_count()).filter(|&i| mask[i]).all(|i| definite(&g_eps[i * ntri..(i + 1) * ntri], n));
        if immersed {
            fields.push(Some(g_eps.iter().zip(&g).map(|(a, b)| a - b).collect()));
        } else {
            warn!("mollified map is not an immersion at ε = {eps}; dropped");
            fields.push(None);
        }
    }
    Ok(Defects { ntri, mask, fields })
}

/// Mask nodes whose axis neighbours are all in the mask.
fn inner(grid: &ChartGrid, mask: &[bool]) -> Vec<bool> {
    (0..grid.node_count())
        .map(|p| {
            mask[p]
                && (0..grid.dim()).all(|a| {
                    let i = grid.axis_index(p, a);
                    let st = grid.strides()[a];
                    i > 0 && i + 1 < grid.shape()[a] && mask[p - st] && mask[p + st]
                })
        })
        .collect()
}

/// Centred-difference gradient, layout [node·ncomp·n + c·n + a].
fn gradient(grid: &ChartGrid, f: &[f64], ncomp: usize, at: &[bool]) -> Vec<f64> {
    let n = grid.dim();
    let mut out = vec![0.0; grid.node_count() * ncomp * n];
    for p in (0..grid.node_count()).filter(|&p| at[p]) {
        for a in 0..n {
            let st = grid.strides()[a];
            let h = grid.spacing()[a];
            for c in 0..ncomp {
                out[p * ncomp * n + c * n + a] = (f[(p + st) * ncomp + c] - f[(p - st) * ncomp + c]) / (2.0 * h);
            }
        }
    }
    out
}

fn masked_max(values: &[f64], stride: usize, mask: &[bool]) -> f64 {
    mask.iter()
        .enumerate()
        .filter(|(_, m)| **m)
        .flat_map(|(p, _)| values[p * stride..(p + 1) * stride].iter())
        .fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectRow {
    pub eps: f64,
    pub defect: f64,
    pub dropped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectScan {
    pub kernel: MollifierKernel,
    pub r: usize,
    pub rows: Vec<DefectRow>,
    pub fit: Option<LogLogFit>,
    pub valid_nodes: usize,
}

/// ‖Dy_εᵀDy_ε − DyᵀDy‖_{C^r} per ε on the nodes valid for the largest ε,
/// with the fitted log–log slope.
pub fn metric_defect_scan(y: &MapField, kernel: MollifierKernel, r: usize, eps_list: &[f64]) -> Result<DefectScan> {
    if r > 1 {
        return Err(Error::InvalidParameter(format!("C^{r} defect norm not supported")));
    }
    let grid = y.grid();
    let d = defects(y, kernel, eps_list)?;
    let at = if r == 0 { d.mask.clone() } else { inner(grid, &d.mask) };
    let valid_nodes = at.iter().filter(|m| **m).count();
    let rows: Vec<DefectRow> = eps_list
        .iter()
        .zip(&d.fields)
        .map(|(&eps, f)| match f {
            None => DefectRow { eps, defect: f64::NAN, dropped: true },
            Some(f) => {
                let mut defect = masked_max(f, d.ntri, &at);
                if r == 1 {
                    defect = defect.max(masked_max(&gradient(grid, f, d.ntri, &at), d.ntri * grid.dim(), &at));
                }
                DefectRow { eps, defect, dropped: false }
            }
        })
        .collect();
    let kept: Vec<&DefectRow> = rows.iter().filter(|r| !r.dropped).collect();
    let fit = fit_loglog(&kept.iter().map(|r| r.eps).collect::<Vec<_>>(), &kept.iter().map(|r| r.defect).collect::<Vec<_>>());
    Ok(DefectScan { kernel, r, rows, fit, valid_nodes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C1BetaRow {
    pub eps: f64,
    pub value: f64,
    pub gradient: f64,
    /// Sampled β-Hölder quotient of the gradient.
    pub holder: f64,
    pub total: f64,
    pub dropped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C1BetaTable {
    pub beta: f64,
    /// β < 2α − 1 when α is known.
    pub in_range: Option<bool>,
    pub rows: Vec<C1BetaRow>,
    /// Totals strictly decrease as ε decreases.
    pub monotone: bool,
}

/// Discrete C^{1,β} distance between g_ε and g per ε.
pub fn metric_c1beta_convergence(
    y: &MapField,
    kernel: MollifierKernel,
    beta: f64,
    eps_list: &[f64],
    alpha: Option<f64>,
    pair_budget: usize,
) -> Result<C1BetaTable> {
    let in_range = alpha.map(|a| beta < 2.0 * a - 1.0);
    if in_range == Some(false) {
        warn!("β = {beta} is outside the range β < 2α − 1");
    }
    let grid = y.grid();
    let n = grid.dim();
    let d = defects(y, kernel, eps_list)?;
    let at = inner(grid, &d.mask);
    let mut rows: Vec<C1BetaRow> = eps_list
        .iter()
        .zip(&d.fields)
        .map(|(&eps, f)| match f {
            None => C1BetaRow { eps, value: f64::NAN, gradient: f64::NAN, holder: f64::NAN, total: f64::NAN, dropped: true },
            Some(f) => {
                let value = masked_max(f, d.ntri, &at);
                let grad = gradient(grid, f, d.ntri, &at);
                let gradient = masked_max(&grad, d.ntri * n, &at);
                let holder = holder_quotient(grid, &grad, d.ntri * n, Some(&at), beta, pair_budget).value;
                C1BetaRow { eps, value, gradient, holder, total: value + gradient + holder, dropped: false }
            }
        })
        .collect();
    rows.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let totals: Vec<f64> = rows.iter().filter(|r| !r.dropped).map(|r| r.total).collect();
    let monotone = totals.windows(2).all(|w| w[1] < w[0]);
    Ok(C1BetaTable { beta, in_range, rows, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_fit_recovers_power() {
        let xs = [0.01, 0.02, 0.04, 0.08];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.6)).collect();
        let f = fit_loglog(&xs, &ys).unwrap();
        assert!((f.slope - 1.6).abs() < 1e-12);
        assert!(f.stderr < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
    }
}
