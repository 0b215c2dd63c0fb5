use std::sync::Arc;

use nalgebra::DMatrix;

use super::metric::MetricField;
use super::GeometryOptions;
use crate::chart::multi_index::rank;
use crate::chart::{partial, ChartGrid, FormField, StencilOrder};
use crate::error::{Error, Result};

/// Orthonormal frame with coframe, connection and curvature forms. Later
/// stages are `None` until populated.
#[derive(Debug, Clone)]
pub struct FrameBundle {
    grid: Arc<ChartGrid>,
    stencil: StencilOrder,
    /// X_i^a at `node * n * n + a * n + i`.
    frame: Vec<f64>,
    coframe: Vec<FormField>,
    /// ω^i_j for i < j, in multi-index order of (i, j).
    connection: Option<Vec<FormField>>,
    curvature: Option<Vec<FormField>>,
}

impl FrameBundle {
    pub fn grid(&self) -> &Arc<ChartGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn stencil(&self) -> StencilOrder {
        self.stencil
    }

    /// Component `a` of X_i at `node`.
    #[inline]
    pub fn frame_component(&self, node: usize, i: usize, a: usize) -> f64 {
        let n = self.dim();
        self.frame[node * n * n + a * n + i]
    }

    pub fn frame_matrix(&self, node: usize) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |a, i| self.frame_component(node, i, a))
    }

    pub fn coframe(&self) -> &[FormField] {
        &self.coframe
    }

    pub fn has_connection(&self) -> bool {
        self.connection.is_some()
    }

    pub fn has_curvature(&self) -> bool {
        self.curvature.is_some()
    }

    fn pair(&self, stored: &Option<Vec<FormField>>, i: usize, j: usize, degree: usize, what: &'static str) -> Result<FormField> {
        let forms = stored.as_ref().ok_or(Error::MissingStage(what))?;
        let n = self.dim();
        if i >= n || j >= n {
            return Err(Error::IndexOutOfRange(i.max(j), n));
        }
        Ok(match i.cmp(&j) {
            std::cmp::Ordering::Equal => FormField::zeros(&self.grid, degree),
            std::cmp::Ordering::Less => forms[rank(n, &[i, j])].clone(),
            std::cmp::Ordering::Greater => forms[rank(n, &[j, i])].neg(),
        })
    }

    /// ω^i_j (antisymmetric in i, j).
    pub fn omega(&self, i: usize, j: usize) -> Result<FormField> {
        self.pair(&self.connection, i, j, 1, "connection")
    }

    /// Ω^i_j (antisymmetric in i, j).
    pub fn curvature(&self, i: usize, j: usize) -> Result<FormField> {
        self.pair(&self.curvature, i, j, 2, "curvature")
    }

    /// Stored upper-triangle connection forms, for inspection.
    pub fn connection_upper(&self) -> Option<&[FormField]> {
        self.connection.as_deref()
    }

    pub fn curvature_upper(&self) -> Option<&[FormField]> {
        self.curvature.as_deref()
    }

    /// Builds a bundle directly from prescribed forms; used for algebraic
    /// checks that bypass differentiation.
    pub fn from_parts(
        grid: &Arc<ChartGrid>,
        coframe: Vec<FormField>,
        connection_upper: Vec<FormField>,
        curvature_upper: Vec<FormField>,
    ) -> Result<Self> {
        let n = grid.dim();
        let pairs = n * (n - 1) / 2;
        if coframe.len() != n || connection_upper.len() != pairs || curvature_upper.len() != pairs {
            return Err(Error::InvalidField("wrong number of frame forms".into()));
        }
        let ok = coframe.iter().chain(&connection_upper).all(|f| f.degree() == 1 && f.grid().same_as(grid))
            && curvature_upper.iter().all(|f| f.degree() == 2 && f.grid().same_as(grid));
        if !ok {
            return Err(Error::InvalidField("frame forms have the wrong degree or grid".into()));
        }
        let mut frame = vec![0.0; n * n * grid.node_count()];
        for node in 0..grid.node_count() {
            let t = DMatrix::from_fn(n, n, |i, a| coframe[i].get(node, a));
            let f = t.try_inverse().unwrap_or_else(|| DMatrix::zeros(n, n));
            for a in 0..n {
                for i in 0..n {
                    frame[node * n * n + a * n + i] = f[(a, i)];
                }
            }
        }
        Ok(Self {
            grid: grid.clone(),
            stencil: StencilOrder::Second,
            frame,
            coframe,
            connection: Some(connection_upper),
            curvature: Some(curvature_upper),
        })
    }

    /// max |g(X_i, X_j) − δ_ij| over all nodes.
    pub fn orthonormality_error(&self, g: &MetricField) -> f64 {
        let n = self.dim();
        let mut err: f64 = 0.0;
        for node in 0..self.grid.node_count() {
            let f = self.frame_matrix(node);
            let gram = f.transpose() * g.matrix(node) * f;
            err = err.max((gram - DMatrix::identity(n, n)).amax());
        }
        err
    }

    /// max |θ^i(X_j) − δ^i_j| over all nodes.
    pub fn duality_error(&self) -> f64 {
        let n = self.dim();
        let mut err: f64 = 0.0;
        for node in 0..self.grid.node_count() {
            for i in 0..n {
                for j in 0..n {
                    let v: f64 = (0..n).map(|a| self.coframe[i].get(node, a) * self.frame_component(node, j, a)).sum();
                    let d = if i == j { 1.0 } else { 0.0 };
                    err = err.max((v - d).abs());
                }
            }
        }
        err
    }
}

/// Gram–Schmidt of (∂_{σ(1)}, …, ∂_{σ(n)}) with respect to g, σ =
/// `opts.axis_order` (identity when empty); coframe = inverse of the frame
/// matrix.
pub fn gram_schmidt_frame(g: &MetricField, opts: &GeometryOptions) -> Result<FrameBundle> {
    let grid = g.grid().clone();
    let n = grid.dim();
    let order = opts.axis_order_for(n)?;
    let mut frame = vec![0.0; n * n * grid.node_count()];
    let mut coframe: Vec<Vec<f64>> = vec![vec![0.0; n * grid.node_count()]; n];
    for node in 0..grid.node_count() {
        let gm = g.matrix(node);
        let ip = |u: &[f64], v: &[f64]| -> f64 {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += u[a] * gm[(a, b)] * v[b];
                }
            }
            s
        };
        let mut xs: Vec<Vec<f64>> = Vec::with_capacity(n);
        for &axis in &order {
            let mut v = vec![0.0; n];
            v[axis] = 1.0;
            let coeffs: Vec<f64> = xs.iter().map(|x| ip(&v, x)).collect();
            for (x, c) in xs.iter().zip(&coeffs) {
                for a in 0..n {
                    v[a] -= c * x[a];
                }
            }
            let norm2 = ip(&v, &v);
            if !(norm2 > opts.definiteness_floor) {
                return Err(Error::NotPositiveDefinite(node));
            }
            let inv = 1.0 / norm2.sqrt();
            v.iter_mut().for_each(|c| *c *= inv);
            xs.push(v);
        }
        let f = DMatrix::from_fn(n, n, |a, i| xs[i][a]);
        let t = f.clone().try_inverse().ok_or(Error::NotPositiveDefinite(node))?;
        for a in 0..n {
            for i in 0..n {
                frame[node * n * n + a * n + i] = f[(a, i)];
                coframe[i][node * n + a] = t[(i, a)];
            }
        }
    }
    let coframe = coframe
        .into_iter()
        .map(|c| FormField::new(&grid, 1, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameBundle { grid, stencil: opts.stencil, frame, coframe, connection: None, curvature: None })
}

/// ω^i_j(∂_k) = θ^i(∂_k X_j + Γ^·_{k b} X_j^b) with Levi-Civita Christoffel
/// symbols of the finite-differenced metric, stored as (ω^i_j − ω^j_i)/2.
pub fn connection_forms(g: &MetricField, fb: &FrameBundle) -> Result<FrameBundle> {
    let grid = fb.grid.clone();
    if !grid.same_as(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let n = grid.dim();
    let nn = n * n;
    let order = fb.stencil;
    // dg[k][i][j] = ∂_k g_ij
    let mut dg: Vec<Vec<Vec<Vec<f64>>>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut per_k = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in i..n {
                let d = g.partial(i, j, k, order);
                if i != j {
                    per_k[j][i] = d.clone();
                }
                per_k[i][j] = d;
            }
        }
        dg.push(per_k);
    }
    let pairs = n * (n - 1) / 2;
    let mut conn = vec![vec![0.0; n * grid.node_count()]; pairs];
    for k in 0..n {
        // ∂_k X_j^a for all (a, j)
        let dframe: Vec<Vec<f64>> =
            (0..nn).map(|c| partial(&grid, &fb.frame, nn, c, k, order)).collect();
        for node in 0..grid.node_count() {
            let ginv = g.matrix(node).try_inverse().ok_or(Error::NotPositiveDefinite(node))?;
            // gamma[a][b] = Γ^a_{k b}
            let mut gamma = vec![vec![0.0; n]; n];
            for a in 0..n {
                for b in 0..n {
                    let mut s = 0.0;
                    for r in 0..n {
                        s += ginv[(a, r)] * (dg[k][r][b][node] + dg[b][r][k][node] - dg[r][k][b][node]);
                    }
                    gamma[a][b] = 0.5 * s;
                }
            }
            // full[i][j] = θ^i(∇_{∂_k} X_j)
            let mut nabla = vec![vec![0.0; n]; n];
            for j in 0..n {
                for a in 0..n {
                    let mut v = dframe[a * n + j][node];
                    for b in 0..n {
                        v += gamma[a][b] * fb.frame_component(node, j, b);
                    }
                    nabla[j][a] = v;
                }
            }
            let full = |i: usize, j: usize| -> f64 {
                (0..n).map(|a| fb.coframe[i].get(node, a) * nabla[j][a]).sum()
            };
            for i in 0..n {
                for j in i + 1..n {
                    let p = rank(n, &[i, j]);
                    conn[p][node * n + k] = 0.5 * (full(i, j) - full(j, i));
                }
            }
        }
    }
    let connection = conn
        .into_iter()
        .map(|c| FormField::new(&grid, 1, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameBundle { connection: Some(connection), curvature: None, ..fb.clone() })
}

/// max over i and interior nodes of |dθ^i + Σ_j ω^i_j ∧ θ^j|.
pub fn structural_residual(fb: &FrameBundle) -> Result<f64> {
    let n = fb.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut r = fb.coframe[i].exterior_derivative(fb.stencil)?;
        for j in 0..n {
            if i != j {
                r = r.add(&fb.omega(i, j)?.wedge(&fb.coframe[j])?)?;
            }
        }
        worst = worst.max(r.max_abs_interior());
    }
    Ok(worst)
}

/// Ω^i_j = dω^i_j + Σ_k ω^i_k ∧ ω^k_j, antisymmetrized in (i, j).
pub fn curvature_forms(fb: &FrameBundle) -> Result<FrameBundle> {
    let n = fb.dim();
    let raw = |i: usize, j: usize| -> Result<FormField> {
        let mut o = fb.omega(i, j)?.exterior_derivative(fb.stencil)?;
        for k in 0..n {
            if k != i && k != j {
                o = o.add(&fb.omega(i, k)?.wedge(&fb.omega(k, j)?)?)?;
            }
        }
        Ok(o)
    };
    let mut curv = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            curv.push(raw(i, j)?.sub(&raw(j, i)?)?.scale(0.5));
        }
    }
    Ok(FrameBundle { curvature: Some(curv), ..fb.clone() })
}
