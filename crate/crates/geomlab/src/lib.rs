//! A numerical laboratory for discrete curves and surfaces-with-boundary:
//! geometric functionals (total curvature, vision number, Gaussian area,
//! boundary entropy), curvature flows (curve shortening, mean curvature with
//! fixed boundary, and the renormalized variant), the pushed-in-boundary
//! link invariant λ, and a certified total-curvature-reducing deformation of
//! space curves to planar convex ones.
//!
//! Everything operates at "desk scale": polygonal curves with hundreds of
//! vertices and meshes with a few thousand faces, with tolerances chosen so
//! the classical smooth statements are checkable numerically.

pub mod deform;
pub mod error;
pub mod flows;
pub mod functionals;
pub mod geom;
pub mod linking;
pub mod shapes;

pub use error::{GeomError, Result};
pub use geom::{Curve, Point, TriMesh, P2, P3};
