//! Induced metrics, Gram–Schmidt frames, connection and curvature forms,
//! the Pfaffian, the Gauss map and the sphere-volume pullback.

mod frame;
mod gauss_map;
mod metric;
mod pfaffian;

use serde::{Deserialize, Serialize};

pub use frame::{connection_forms, curvature_forms, gram_schmidt_frame, structural_residual, FrameBundle};
pub use gauss_map::{gauss_map, sphere_pullback};
pub use metric::{metric_from_immersion, MetricField};
pub use pfaffian::pfaffian;

use crate::chart::{FormField, MapField, StencilOrder};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryOptions {
    /// Stencil for first derivatives of the immersion (metric, Gauss map,
    /// sphere pullback).
    pub immersion_stencil: StencilOrder,
    /// Stencil for the nested derivatives of the metric, frame and
    /// connection.
    pub stencil: StencilOrder,
    pub definiteness_floor: f64,
    /// Gram–Schmidt axis order; empty means 0, 1, …, n−1.
    pub axis_order: Vec<usize>,
}

impl Default for GeometryOptions {
    fn default() -> Self {
        Self {
            immersion_stencil: StencilOrder::Fourth,
            stencil: StencilOrder::Second,
            definiteness_floor: 1e-10,
            axis_order: Vec::new(),
        }
    }
}

impl GeometryOptions {
    pub(crate) fn axis_order_for(&self, n: usize) -> Result<Vec<usize>> {
        if self.axis_order.is_empty() {
            return Ok((0..n).collect());
        }
        let mut sorted = self.axis_order.clone();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidParameter(format!("axis order {:?} is not a permutation", self.axis_order)));
        }
        Ok(self.axis_order.clone())
    }
}

/// Frame, connection and curvature of a metric in one call.
pub fn frame_bundle(g: &MetricField, opts: &GeometryOptions) -> Result<FrameBundle> {
    g.check_definite(opts.definiteness_floor)?;
    let fb = gram_schmidt_frame(g, opts)?;
    let fb = connection_forms(g, &fb)?;
    curvature_forms(&fb)
}

/// Everything derived from an immersion, computed once.
#[derive(Debug, Clone)]
pub struct ImmersionGeometry {
    pub metric: MetricField,
    pub bundle: FrameBundle,
    pub pfaffian: FormField,
    pub normal: MapField,
    pub pullback: FormField,
}

impl ImmersionGeometry {
    pub fn compute(y: &MapField, opts: &GeometryOptions) -> Result<Self> {
        let metric = metric_from_immersion(y, opts)?;
        let bundle = frame_bundle(&metric, opts)?;
        let pfaffian = pfaffian(&bundle)?;
        let normal = gauss_map(y, opts)?;
        let pullback = sphere_pullback(&normal, opts)?;
        Ok(Self { metric, bundle, pfaffian, normal, pullback })
    }
}
