//! The limit profile `Theta` of `Delta_n / (-lambda)^n`, the primitive `Psi_p`
//! it is proportional to, and the bound on what is left over.

use crate::error::{GkwError, Result};
use crate::funcspace::{uniform_grid, FuncRep, DEFAULT_GRID};
use crate::gauss::{cdf_unchecked, MapParam};
use crate::ops::{OperatorKind, OperatorMatrix, TruncationPolicy};
use crate::spectral::{tau_bound, EigenResult};

use super::cdf::EvolutionTrace;

/// Ratio estimates ignore `x` within this distance of either endpoint.
pub const ENDPOINT_EXCLUSION: f64 = 0.05;
/// `sup |Theta - L Psi|` above this marks the profile as not converged.
pub const THETA_RESIDUAL_LIMIT: f64 = 1e-3;

const FLAT_TOL: f64 = 1e-10;
const FLAT_MAX_STEPS: usize = 200;

/// The constant `U^inf g`: iterate `U` until the image is flat, then average.
pub fn u_infinity(u: &OperatorMatrix, g: &FuncRep) -> Result<f64> {
    if u.kind() != OperatorKind::U {
        return Err(GkwError::InvalidInput("U^inf needs the U operator".into()));
    }
    let grid = uniform_grid(DEFAULT_GRID);
    let mut cur = g.with_degree(u.in_degree());
    for _ in 0..=FLAT_MAX_STEPS {
        let v = cur.values_on(&grid);
        let (lo, hi) = v
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        if hi - lo < FLAT_TOL {
            return Ok(v.iter().sum::<f64>() / v.len() as f64);
        }
        cur = u.apply(&cur)?.rep;
    }
    Err(GkwError::NotConverged {
        what: "U iteration to a constant",
        iterations: FLAT_MAX_STEPS,
    })
}

/// `Psi_p(x) = int_0^x (psi~(t) - U^inf psi~)/(p+t) dt` with `psi~ = int_0^x psi`.
pub fn build_psi(
    param: &MapParam,
    eig: &EigenResult,
    policy: &TruncationPolicy,
) -> Result<FuncRep> {
    let tilde = eig.psi.antiderivative();
    let u = OperatorMatrix::square(OperatorKind::U, param, tilde.degree(), policy)?;
    let c = u_infinity(&u, &tilde)?;
    let p = param.pf();
    let integrand = FuncRep::fit(|t| (tilde.at(t) - c) / (p + t), tilde.degree())?;
    Ok(integrand.antiderivative())
}

/// `Theta`, `Psi_p` and the scalar linking them.
#[derive(Debug, Clone)]
pub struct WirsingProfile {
    pub p: u32,
    /// Step the profile was read off.
    pub n: usize,
    pub psi: FuncRep,
    /// `Delta_n (-lambda)^{-n}`.
    pub theta: FuncRep,
    /// Grid median of `Theta / Psi` away from the endpoints; estimates `L(g_0')`.
    pub l_g0: f64,
    /// `sup |Theta - l_g0 Psi|`.
    pub residual: f64,
    /// Analytic size of the transient, `(tau/lambda)^n`.
    pub transient_bound: f64,
    /// `residual <= THETA_RESIDUAL_LIMIT`.
    pub converged: bool,
}

fn interior_median(num: &FuncRep, den: &FuncRep) -> f64 {
    let mut r: Vec<f64> = uniform_grid(DEFAULT_GRID)
        .into_iter()
        .filter(|&x| x >= ENDPOINT_EXCLUSION && x <= 1.0 - ENDPOINT_EXCLUSION)
        .map(|x| num.at(x) / den.at(x))
        .collect();
    r.sort_by(f64::total_cmp);
    let n = r.len();
    if n % 2 == 1 {
        r[n / 2]
    } else {
        0.5 * (r[n / 2 - 1] + r[n / 2])
    }
}

/// Read `Theta` off step `n` of a trace.
///
/// `transient_bound` uses `tau_bound` for `p >= 2` and the eigen solver's
/// measured contraction for `p = 1`; it is reported, not enforced, because
/// the analytic bound is far more pessimistic than the observed decay.
pub fn estimate_theta(
    trace: &EvolutionTrace,
    eig: &EigenResult,
    n: usize,
    policy: &TruncationPolicy,
) -> Result<WirsingProfile> {
    let param = MapParam::new(trace.p)?;
    let d = trace.delta(n)?;
    let psi = build_psi(&param, eig, policy)?;
    let theta = d.scale((-eig.lambda).powi(-(n as i32)));
    let l_g0 = interior_median(&theta, &psi);
    let residual = theta.lin_comb(1.0, &psi, -l_g0).sup_norm(DEFAULT_GRID);
    let ratio = if trace.p >= 2 {
        tau_bound(&param, eig)? / eig.lambda
    } else {
        eig.contraction_ratio
    };
    Ok(WirsingProfile {
        p: trace.p,
        n,
        psi,
        theta,
        l_g0,
        residual,
        transient_bound: ratio.powi(n as i32),
        converged: residual <= THETA_RESIDUAL_LIMIT,
    })
}

/// `f(x(y))` with `x(y) = Phi_p^{-1}(y)`, i.e. `f` in distribution coordinates.
pub fn cdf_coordinates(param: &MapParam, f: &FuncRep, degree: usize) -> Result<FuncRep> {
    let p = param.pf();
    let ln = param.log_norm();
    FuncRep::fit(|y| f.at((p * (y * ln).exp_m1()).clamp(0.0, 1.0)), degree)
}

/// Outcome of the interpolation bound `|f(y)| <= y(1-y)/2 sup|f''|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationReport {
    pub pass: bool,
    /// `min_y (y(1-y)/2 sup|f''| - |f(y)|)`; negative means violated.
    pub worst_margin: f64,
    pub sup_second_derivative: f64,
}

/// Check the interpolation bound for `f` with `f(0) = f(1) = 0` on a uniform grid.
pub fn interpolation_check(f: &FuncRep, grid_size: usize) -> Result<InterpolationReport> {
    if f.at(0.0).abs() > 1e-10 || f.at(1.0).abs() > 1e-10 {
        return Err(GkwError::InvalidInput(
            "interpolation bound needs f(0) = f(1) = 0".into(),
        ));
    }
    let f2 = f.derivative().derivative();
    let sup_second_derivative = f2.sup_norm(grid_size);
    let grid = uniform_grid(grid_size);
    let mut worst_margin = f64::INFINITY;
    let mut sup_f = 0.0f64;
    for &y in &grid {
        let v = f.at(y).abs();
        sup_f = sup_f.max(v);
        worst_margin = worst_margin.min(0.5 * y * (1.0 - y) * sup_second_derivative - v);
    }
    // the equality case x(1-x) must not fail on rounding
    let slack = 64.0 * f64::EPSILON * (sup_f + sup_second_derivative);
    Ok(InterpolationReport {
        pass: worst_margin >= -slack,
        worst_margin,
        sup_second_derivative,
    })
}

/// One verification of the remainder envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeCheck {
    pub n: usize,
    /// `max_x |Delta_n - (-lambda)^n Theta| / (tau^n Phi (1 - Phi))`.
    pub constant: f64,
    pub pass: bool,
}

/// `|Delta_n - (-lambda)^n Theta| <= C tau^n Phi (1 - Phi)` with `C` fitted
/// at `fit_n` and checked at each of `check_ns`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorShape {
    pub tau: f64,
    pub fit_n: usize,
    pub c: f64,
    pub checks: Vec<ShapeCheck>,
}

impl ErrorShape {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn error_shape(
    trace: &EvolutionTrace,
    theta: &FuncRep,
    lambda: f64,
    tau: f64,
    fit_n: usize,
    check_ns: &[usize],
) -> Result<ErrorShape> {
    let param = MapParam::new(trace.p)?;
    let interior: Vec<f64> = trace
        .grid
        .iter()
        .copied()
        .filter(|&x| x > 0.0 && x < 1.0)
        .collect();
    let constant = |n: usize| -> Result<f64> {
        let d = trace.delta(n)?;
        let scale = (-lambda).powi(n as i32);
        let tn = tau.powi(n as i32);
        Ok(interior
            .iter()
            .map(|&x| {
                let phi = cdf_unchecked(&param, x);
                (d.at(x) - scale * theta.at(x)).abs() / (tn * phi * (1.0 - phi))
            })
            .fold(0.0, f64::max))
    };
    let c = constant(fit_n)?;
    let checks = check_ns
        .iter()
        .map(|&n| {
            let k = constant(n)?;
            Ok(ShapeCheck {
                n,
                constant: k,
                pass: k <= c,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorShape {
        tau,
        fit_n,
        c,
        checks,
    })
}
