//! Small numerical kernels: composite Gauss-Legendre quadrature, bracketed
//! root finding and golden-section minimization.

pub mod optimize;
pub mod quadrature;
pub mod roots;

pub use optimize::{golden_section, Minimum};
pub use quadrature::GaussLegendre;
pub use roots::bisect;
