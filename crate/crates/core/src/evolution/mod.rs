//! How distribution functions evolve under `T_p`.
//!
//! Starting from a distribution function `phi_0` of `x_0`, the law of
//! `T_p^n(x_0)` has distribution function `phi_n`, with
//! `phi_{n+1}(x) = sum_{k>=p} phi_n(p/k) - phi_n(p/(k+x))`. The error
//! `Delta_n = phi_n - Phi_p` behaves like `(-lambda_p)^n Theta` with
//! `Theta = L(g_0') Psi_p`. This module computes both sides of that statement,
//! the interpolation bound that controls the remainder, and a Monte Carlo
//! oracle for `phi_n`.

mod cdf;
mod montecarlo;
mod wirsing;

pub use cdf::{delta, evolve_cdf, evolve_cdf_with, EvolutionTrace, CDF_TOL};
pub use montecarlo::{binomial_std_error, montecarlo_cdf, McEstimate, MIN_SAMPLES};
pub use wirsing::{
    build_psi, cdf_coordinates, error_shape, estimate_theta, interpolation_check, u_infinity,
    ErrorShape, InterpolationReport, ShapeCheck, WirsingProfile, ENDPOINT_EXCLUSION,
    THETA_RESIDUAL_LIMIT,
};
