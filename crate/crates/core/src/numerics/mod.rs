//! Shared numerical kernels.

mod normal;
mod quadrature;
mod root;

pub use normal::{norm_cdf, norm_pdf, std_normal_cdf, std_normal_quantile};
pub use quadrature::{integrate_range, integrate_unit, QuadratureRule};
pub use root::{find_root, Bracket, DEFAULT_TOL};
