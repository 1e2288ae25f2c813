//! Pricing library for monthly-sum-cap cliquet options on a stock driven by
//! a drifted jump-diffusion Levy process with compound Poisson jumps.
//!
//! The contract pays `K (1 + g + max{0, sum_k min(c, R_k) - g})` at maturity,
//! a globally-floored, locally-capped sum of per-period returns. Two
//! semi-analytic price representations are implemented and cross-validated:
//! one through the distribution function of the driving process and one
//! through Fourier transforms of the capped-return basket, alongside
//! analytic Greeks (Rho, Delta, Gamma, Vega in two forms) and an
//! independent Monte Carlo oracle.
//!
//! Start with the `examples/` directory: each example exercises one
//! capability end to end. The `cliquet` binary exposes the same
//! functionality behind a JSON-configured command line.

// `!(x > 0.0)`-style guards are deliberate: they reject NaN along with the
// out-of-range values, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// transcribed coefficient tables keep their published digits
#![allow(clippy::excessive_precision)]

pub mod cli;
pub mod error;
pub mod greeks;
pub mod levy;
pub mod mc;
pub mod numerics;
pub mod pricing;

pub use error::{Error, Result};
pub use greeks::{BumpParam, GreekMethod, GreeksReport};
pub use levy::{JumpSpec, ModelParams, SeriesPolicy};
pub use mc::{McConfig, McEstimate};
pub use pricing::{ContractTerms, PriceMethod, PriceResult};
