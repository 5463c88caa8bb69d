//! Geometric functionals: cone density, vision number, Gaussian-weighted
//! areas, boundary entropy, and the shrinker residual.

pub mod cone;
pub mod entropy;
pub mod gaussian;
pub mod report;
pub mod search;
pub mod shrinker;

pub use cone::{cone_density, vision_number, ConeOverCurve, ConeRange, VisionOptions};
pub use entropy::{entropy, entropy_at, EntropyOptions};
pub use gaussian::{exterior_cone_gaussian, gaussian_area, GaussianKernel, Quadrature};
pub use report::FunctionalReport;
pub use shrinker::{shrinker_residual, ShrinkerResidual};
