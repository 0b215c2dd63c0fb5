//! Whitney decompositions, box dimension and integrals over domains with
//! fractal boundary.

mod boxdim;
mod integral;
mod region;
mod whitney;

pub use boxdim::{box_dimension, fit_box_counts, level_set_boxdim, sample_levels, BoxCount, BoxDimension, LevelRow, LevelSetScan};
pub use integral::{
    flux_form, fractal_integral, ConstantFamily, FractalIntegral, FractalIntegralOptions, GenerationSum, MollifiedFamily,
    ScaleFamily,
};
pub use region::{Annulus, AxisBox, Ball, BoxClass, Polygon, ProbeRegion, Region};
pub use whitney::{verify_whitney, whitney_census_slope, whitney_decompose, DyadicCube, WhitneyAudit, WhitneyDecomposition};
