//! Shared numeric kernels: normal distribution functions, truncated
//! Poisson weights, adaptive quadrature, and oscillatory transforms.

pub mod filon;
pub mod normal;
pub mod poisson;
pub mod quad;

pub use filon::{cis_minus_one, OscProfile};
pub use normal::{normal_cdf, normal_inv_cdf, normal_pdf};
pub use poisson::poisson_weights;
pub use quad::{
    integrate_finite, integrate_finite_real, integrate_semi_infinite, QuadResult, Tail,
};
