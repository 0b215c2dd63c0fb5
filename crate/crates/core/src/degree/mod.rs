//! Brouwer degree of piecewise-linear sphere-valued maps, and measures of
//! spherical images.

mod brouwer;
mod image_measure;
mod sphere_grid;
mod weak;

pub use brouwer::{brouwer_degree, degree_field, ClearancePolicy, DegreeEngine, DegreeOptions, DegreeReport, DegreeResult, DegreeRow};
pub use image_measure::{extrinsic_curvature_bound, image_hits, spherical_image_measure, ExtrinsicBound, ImageMeasure};
pub use sphere_grid::{angle, sphere_volume, SphereCellGrid};
pub use weak::{weak_convergence_experiment, WeakConvergenceTable, WeakRow};
