//! Mollification, the quadratic metric-defect law, Hölder seminorms and
//! lacunary roughness fixtures.

mod convolve;
mod holder;
mod kernel;
mod roughness;
mod scan;

pub use convolve::{convolve_direct, mollify_components, mollify_field, valid_mask, Convolver, Mollified};
pub use holder::{holder_quotient, holder_seminorm_estimate, HolderEstimate};
pub use kernel::{KernelStencil, MollifierKernel};
pub use roughness::{corrugated_immersion, CorrugationProfile, lacunary_field, lacunary_immersion, LacunarySeries, RoughnessSpec};
pub use scan::{fit_loglog, metric_c1beta_convergence, metric_defect_scan, C1BetaRow, C1BetaTable, DefectRow, DefectScan, LogLogFit};
