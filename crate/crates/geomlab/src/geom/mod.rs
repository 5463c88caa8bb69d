//! Discrete representations: points, polygonal curves, triangle meshes with
//! boundary, and their basic differential-geometric quantities.

pub mod curvature;
pub mod curve;
pub mod io;
pub mod mesh;
pub mod point;

pub use curve::Curve;
pub use mesh::TriMesh;
pub use point::{Point, P2, P3};
