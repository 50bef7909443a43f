//! Real roots of Gaussian random polynomials `P_n(x) = sum_k a_k x^k` with
//! independent coefficients of variance `<a_k^2> = exp(-k^alpha)`.
//!
//! The crate computes the mean density of real roots exactly (Kac–Rice),
//! integrates it to the mean number of real roots, counts roots of sampled
//! polynomials, and runs the Monte Carlo and quadrature experiments that
//! expose the three growth regimes of `<N_n>` and the localization of roots
//! for steep profiles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlator;
pub mod density;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod lognum;
pub mod quadrature;
pub mod rootcount;

pub use ensemble::{CoefficientDraw, EnsembleSpec, Profile};
pub use error::{Error, Result};
pub use lognum::{Sign, SignedLogValue};
