//! Sample lattices, sampled forms and maps, finite-difference exterior
//! calculus and box quadrature.

mod cells;
mod form;
mod grid;
pub mod io;
mod map;
pub mod multi_index;
pub mod quadrature;
mod simplex;
mod stencil;

pub use cells::{CellSet, Face};
pub use form::{integrate_top_form, wedge, FormField, Integral};
pub use grid::{ChartGrid, STENCIL_RADIUS};
pub use map::MapField;
pub use simplex::{kuhn_simplices, KuhnSimplex};
pub use stencil::{partial, StencilOrder};
