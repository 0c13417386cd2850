//! Polygonal curves in constant-curvature spaces: total curvature bounds,
//! cone densities, Möbius-invariant lengths and knot determinants.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone;
pub mod error;
pub mod h2xr;
pub mod hyp_density;
pub mod knot;
pub mod mobius;
pub mod optimize;
pub mod polycurve;
pub mod quadrature;
pub mod random;
mod serde_vec;
pub mod spaceform;
pub mod spherical_bounds;

pub use error::{GeomError, Result};
pub use polycurve::{PolygonalCurve, SphericalPolygon};
pub use spaceform::{Kind, Model, Point, SpaceForm};
