//! Numerics for the generalized Gauss maps `T_p(x) = {p/x}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`gauss`] — the map itself, digit expansions, the invariant measure and
//!   the closed-form scalar constants (Hurwitz zeta values, the Kuzmin-type
//!   rate `Q_p`).
//! * [`funcspace`] — [`FuncRep`], a Chebyshev representation of functions on
//!   `[0, 1]`, with evaluation, calculus and quadrature.
//! * [`ops`] — the transfer operator `G_p` and the conjugated operators `U`
//!   and `V`, discretized as matrices acting on [`FuncRep`] coefficients.
//! * [`spectral`] — bounds and estimators for the second eigenvalue
//!   `lambda_p`, its eigenfunction, the auxiliary construction that certifies
//!   the bounds, and a collocation spectrum.
//! * [`evolution`] — evolution of distribution functions under `T_p`, the
//!   limit error profile and a Monte Carlo oracle.

pub mod error;
pub mod evolution;
pub mod funcspace;
pub mod gauss;
pub mod ops;
pub mod spectral;

pub use error::{GkwError, Result};
pub use evolution::{EvolutionTrace, WirsingProfile};
pub use funcspace::FuncRep;
pub use gauss::{DigitSeq, MapParam};
pub use ops::{Applied, OperatorKind, OperatorMatrix, TruncationPolicy};
pub use spectral::{AuxAnalysis, EigenResult, SpectrumResult};
