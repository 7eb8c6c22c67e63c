//! Separable surfaces `f(x) + g(y) + h(z) = 0` with constant Gaussian
//! curvature: construction, sampling, curvature evaluation and
//! classification into the known families.

// comparisons are written to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod expr;
pub mod families;
pub mod geometry;
pub mod sampler;
pub mod surface;
pub mod verify;

pub use expr::{Func1D, Interval, Jet3};
pub use families::{build_surface, FamilySpec, FamilyTag};
pub use surface::{Axis, Box3, SeparableSurface, SurfacePoint};
