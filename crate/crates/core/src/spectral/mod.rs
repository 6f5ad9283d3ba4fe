//! The second eigenvalue `lambda_p` and everything attached to it.
//!
//! * [`aux`] — the explicit test function `xi` and the closed-form bounds
//!   `v_p <= lambda_p <= w_p`.
//! * [`eigen`] — two independent estimators of `lambda_p`: endpoint ratios of
//!   `U`-iterates, and power iteration on `V`.
//! * [`functionals`] — the positive functional `F`, the resulting bound on the
//!   second-order rate `tau_p`, and the limit functional `L`.
//! * [`spectrum`] — eigenvalues of a collocation matrix of `G_p`.

pub mod aux;
pub mod eigen;
pub mod functionals;
pub mod spectrum;

pub use aux::{
    alpha_root, alpha_root_extended, aux_analysis, aux_functions, bounds, min_max_ratio,
    ratio_extrema_numeric, rho, rho_expanded, rho_extended, sandwich_from_image, verify_sandwich,
    xi, AuxAnalysis, AuxClosedForms, AuxFunctions, MinMaxRatio, NumericExtrema, SandwichReport,
    ALPHA_BRACKET_HI, ALPHA_BRACKET_LO, SANDWICH_SLACK,
};
pub use eigen::{
    lambda_by_power, lambda_by_power_with, lambda_by_ratio, lambda_by_ratio_with, EigenResult,
    DEFAULT_MAX_ITER,
};
pub use functionals::{
    functional_f, functional_l, functional_l_with, tau_bound, wirsing_condition, LEstimate,
    WirsingCondition, TAU_RATIO_LIMIT,
};
pub use spectrum::{spectrum_collocation, SpectrumResult};
