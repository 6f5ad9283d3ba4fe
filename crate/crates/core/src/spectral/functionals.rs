//! Linear functionals attached to `V`.
//!
//! `F` is a positive functional with `F(f) <= V f` pointwise for positive `f`;
//! it bounds the second-order rate through `tau <= lambda - F(psi)/|psi|`.
//! `L` is the functional in `V^n f ~ lambda^n L(f) psi`.

use crate::error::{GkwError, Result};
use crate::funcspace::{clenshaw_curtis, uniform_grid, FuncRep, DEFAULT_GRID};
use crate::gauss::MapParam;
use crate::ops::{OperatorKind, OperatorMatrix, TruncationPolicy};

use super::aux::{bounds, xi};
use super::eigen::EigenResult;

/// Ceiling on `tau_bound / lambda` for `p >= 2`.
pub const TAU_RATIO_LIMIT: f64 = 189.0 / 198.0;

const PIECE_DEGREE: usize = 64;

/// `L` iterates until the transient is below this.
const L_TRANSIENT: f64 = 1e-8;
/// Ratio spread above which an `L` estimate is flagged.
const L_SPREAD_LIMIT: f64 = 1e-4;
const L_MAX_STEPS: usize = 5000;

fn require_p_at_least_two(param: &MapParam, what: &'static str) -> Result<()> {
    if param.p() < 2 {
        return Err(GkwError::Domain {
            what,
            value: param.pf(),
            domain: "p >= 2",
        });
    }
    Ok(())
}

/// The three-piece functional
///
/// ```text
/// F(f) = int_0^{p/(2p+1)}   p y (1-y)/(p+y)^2 f
///      + int_{p/(2p+1)}^{1/2} p/(2p+1)^2     f
///      + int_{1/2}^{p/(p+1)}  y (p-(p+1)y)/p^2 f
/// ```
pub fn functional_f(param: &MapParam, f: &FuncRep) -> Result<f64> {
    require_p_at_least_two(param, "functional_f")?;
    let p = param.pf();
    let b1 = p / (2.0 * p + 1.0);
    let b2 = p / (p + 1.0);
    let w2 = p / ((2.0 * p + 1.0) * (2.0 * p + 1.0));
    let i1 = clenshaw_curtis(
        |y| p * y * (1.0 - y) / ((p + y) * (p + y)) * f.at(y),
        0.0,
        b1,
        PIECE_DEGREE,
    )?;
    let i2 = clenshaw_curtis(|y| w2 * f.at(y), b1, 0.5, PIECE_DEGREE)?;
    let i3 = clenshaw_curtis(
        |y| y * (p - (p + 1.0) * y) / (p * p) * f.at(y),
        0.5,
        b2,
        PIECE_DEGREE,
    )?;
    Ok(i1 + i2 + i3)
}

/// Upper bound `lambda - F(psi)/|psi|` on the second-order rate `tau_p`.
pub fn tau_bound(param: &MapParam, eig: &EigenResult) -> Result<f64> {
    let norm = eig.psi.sup_norm(DEFAULT_GRID);
    Ok(eig.lambda - functional_f(param, &eig.psi)? / norm)
}

/// The condition `w F(xi)/|V xi| > w - v` that makes the `F` argument work.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirsingCondition {
    pub p: u32,
    pub f_xi: f64,
    pub v_xi_norm: f64,
    /// `w F(xi) / |V xi|`.
    pub lhs: f64,
    /// `w - v`.
    pub rhs: f64,
    pub pass: bool,
}

pub fn wirsing_condition(
    param: &MapParam,
    degree: usize,
    policy: &TruncationPolicy,
) -> Result<WirsingCondition> {
    let xi_rep = FuncRep::fit(|x| xi(param, x), degree)?;
    let v_xi = crate::ops::apply_v(param, &xi_rep, policy)?.rep;
    let f_xi = functional_f(param, &xi_rep)?;
    let v_xi_norm = v_xi.sup_norm(DEFAULT_GRID);
    let (v, w) = bounds(param);
    let lhs = w * f_xi / v_xi_norm;
    let rhs = w - v;
    Ok(WirsingCondition {
        p: param.p(),
        f_xi,
        v_xi_norm,
        lhs,
        rhs,
        pass: lhs > rhs,
    })
}

/// Estimate of `L(f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LEstimate {
    /// Grid median of `V^n f / V^n psi`.
    pub value: f64,
    /// `max - min` of that ratio over the grid.
    pub spread: f64,
    pub n: usize,
    /// `spread` is within the under-convergence threshold.
    pub converged: bool,
}

/// Number of steps making `ratio^n < 1e-8`.
fn steps_for(ratio: f64) -> usize {
    if !(ratio > 0.0 && ratio < 1.0) {
        return L_MAX_STEPS;
    }
    ((L_TRANSIENT.ln() / ratio.ln()).ceil() as usize).clamp(1, L_MAX_STEPS)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `L(f)` with a caller-supplied `V` matrix and step count.
///
/// `f` and `psi` are iterated together and rescaled by the same factor, so
/// the ratio never sees `lambda^n` directly.
pub fn functional_l_with(
    v: &OperatorMatrix,
    f: &FuncRep,
    eig: &EigenResult,
    n: usize,
) -> Result<LEstimate> {
    if v.kind() != OperatorKind::V {
        return Err(GkwError::InvalidInput("L needs the V operator".into()));
    }
    let mut a = f.with_degree(v.in_degree());
    let mut b = eig.psi.with_degree(v.in_degree());
    let s0 = b.sup_norm(DEFAULT_GRID);
    a = a.scale(1.0 / s0);
    b = b.scale(1.0 / s0);
    for _ in 0..n {
        a = v.apply(&a)?.rep;
        b = v.apply(&b)?.rep;
        let s = b.sup_norm(DEFAULT_GRID);
        a = a.scale(1.0 / s);
        b = b.scale(1.0 / s);
    }
    let ratios: Vec<f64> = uniform_grid(DEFAULT_GRID)
        .into_iter()
        .map(|x| a.at(x) / b.at(x))
        .collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
            (lo.min(r), hi.max(r))
        });
    let spread = hi - lo;
    Ok(LEstimate {
        value: median(ratios),
        spread,
        n,
        converged: spread <= L_SPREAD_LIMIT,
    })
}

/// `L(f)`. With `n = None` the step count is chosen from `tau_bound` (for
/// `p >= 2`) or from the eigen solver's measured contraction.
pub fn functional_l(
    param: &MapParam,
    f: &FuncRep,
    eig: &EigenResult,
    n: Option<usize>,
    policy: &TruncationPolicy,
) -> Result<LEstimate> {
    let n = match n {
        Some(n) => n,
        None => {
            let ratio = if param.p() >= 2 {
                tau_bound(param, eig)? / eig.lambda
            } else {
                eig.contraction_ratio
            };
            steps_for(ratio)
        }
    };
    let v = OperatorMatrix::square(OperatorKind::V, param, eig.psi.degree(), policy)?;
    functional_l_with(&v, f, eig, n)
}
