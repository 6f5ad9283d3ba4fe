//! The auxiliary construction behind the bounds `v_p <= lambda_p <= w_p`.
//!
//! For `a` in `[0, 1]`, `H_a(x) = 1/(p+a+x)` has the explicit `U`-preimage
//! `g_a(x) = (p+x)/(p+ax) - p/(p+(1+a)x)`, so `xi_a = g_a'` satisfies
//! `V xi_a = 1/(p+a+x)^2`. The ratio `xi_a / V xi_a` has closed-form extrema;
//! choosing `a = 1/3` gives the test function `xi = 1/(p+1/3+x)^2` with
//! `v_p xi <= V xi <= w_p xi`.

use twofloat::TwoFloat;

use crate::error::{GkwError, Result};
use crate::funcspace::{uniform_grid, FuncRep};
use crate::gauss::MapParam;
use crate::ops::{apply_v, TruncationPolicy};

/// Lower end of the bracket known to contain `alpha_p` for `p >= 2`.
pub const ALPHA_BRACKET_LO: f64 = 0.32;
/// Upper end of the bracket known to contain `alpha_p`.
pub const ALPHA_BRACKET_HI: f64 = 1.0 / 3.0;

const BISECTION_MAX_ITER: usize = 200;

/// Slack allowed on both sides of the sandwich check.
pub const SANDWICH_SLACK: f64 = 1e-9;

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

/// `rho(a) = 2(p+a)^4 - (2p^3+p^2)(p+a) - p^2(p+1)`.
pub fn rho(param: &MapParam, a: f64) -> f64 {
    let p = param.pf();
    let u = p + a;
    2.0 * u.powi(4) - (2.0 * p.powi(3) + p * p) * u - p * p * (p + 1.0)
}

/// The same quartic expanded in powers of `p`.
pub fn rho_expanded(param: &MapParam, a: f64) -> f64 {
    let p = param.pf();
    (6.0 * a - 2.0) * p.powi(3)
        + (12.0 * a * a - a - 1.0) * p * p
        + 8.0 * a.powi(3) * p
        + 2.0 * a.powi(4)
}

/// `rho(a)` in double-double arithmetic.
pub fn rho_extended(param: &MapParam, a: TwoFloat) -> TwoFloat {
    let p = TwoFloat::from(param.pf());
    let u = p + a;
    let u2 = u * u;
    let lin = p * p * (p * 2.0 + 1.0);
    u2 * u2 * 2.0 - lin * u - p * p * (p + 1.0)
}

/// `alpha_p` carried to double-double precision: the f64 bisection root
/// followed by Newton steps on [`rho_extended`].
///
/// `rho' ~ 6 p^3` near the root, so the nearest f64 to `alpha_p` leaves a
/// residual of order `p^3 * 1e-17`; the extended root brings it to rounding
/// level of the double-double evaluation.
pub fn alpha_root_extended(param: &MapParam) -> Result<TwoFloat> {
    let start = bisect_alpha(param)?;
    let p = param.pf();
    let mut a = TwoFloat::from(start);
    for _ in 0..3 {
        let slope = 8.0 * (p + a.hi()).powi(3) - (2.0 * p.powi(3) + p * p);
        let r = rho_extended(param, a);
        a -= r / slope;
    }
    Ok(a)
}

/// The unique positive root `alpha_p` of `rho`: bisection on `[0.32, 1/3]`,
/// rounded from [`alpha_root_extended`] to the nearest f64.
pub fn alpha_root(param: &MapParam) -> Result<f64> {
    Ok(alpha_root_extended(param)?.hi())
}

fn bisect_alpha(param: &MapParam) -> Result<f64> {
    require_p_at_least_two(param, "alpha_root")?;
    let (mut lo, mut hi) = (ALPHA_BRACKET_LO, ALPHA_BRACKET_HI);
    let (f_lo, f_hi) = (rho(param, lo), rho(param, hi));
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(GkwError::Bracket { lo, hi });
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rho(param, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = if rho(param, lo).abs() <= rho(param, hi).abs() {
        lo
    } else {
        hi
    };
    Ok(r)
}

/// `1 / (p + 1/3 + x)^2`, the test function of the sandwich.
pub fn xi(param: &MapParam, x: f64) -> f64 {
    let d = param.pf() + 1.0 / 3.0 + x;
    1.0 / (d * d)
}

/// Closed forms of `g_a`, `H_a` and `xi_a = g_a'`.
#[derive(Debug, Clone, Copy)]
pub struct AuxClosedForms {
    p: f64,
    a: f64,
}

impl AuxClosedForms {
    pub fn new(param: &MapParam, a: f64) -> Self {
        Self { p: param.pf(), a }
    }

    pub fn g(&self, x: f64) -> f64 {
        let (p, a) = (self.p, self.a);
        (p + x) / (p + a * x) - p / (p + (1.0 + a) * x)
    }

    pub fn h(&self, x: f64) -> f64 {
        1.0 / (self.p + self.a + x)
    }

    pub fn xi(&self, x: f64) -> f64 {
        let (p, a) = (self.p, self.a);
        let d1 = p + a * x;
        let d2 = p + (1.0 + a) * x;
        p * (1.0 - a) / (d1 * d1) + p * (1.0 + a) / (d2 * d2)
    }

    /// `V xi_a = 1/(p+a+x)^2`.
    pub fn v_xi(&self, x: f64) -> f64 {
        let d = self.p + self.a + x;
        1.0 / (d * d)
    }

    /// `xi_a / V xi_a`.
    pub fn ratio(&self, x: f64) -> f64 {
        self.xi(x) / self.v_xi(x)
    }
}

/// The auxiliary functions fitted as representations.
#[derive(Debug, Clone)]
pub struct AuxFunctions {
    pub g: FuncRep,
    pub h: FuncRep,
    pub xi: FuncRep,
}

pub fn aux_functions(param: &MapParam, a: f64, degree: usize) -> Result<AuxFunctions> {
    if !(0.0..=1.0).contains(&a) {
        return Err(GkwError::Domain {
            what: "aux_functions",
            value: a,
            domain: "[0, 1]",
        });
    }
    let cf = AuxClosedForms::new(param, a);
    Ok(AuxFunctions {
        g: FuncRep::fit(|x| cf.g(x), degree)?,
        h: FuncRep::fit(|x| cf.h(x), degree)?,
        xi: FuncRep::fit(|x| cf.xi(x), degree)?,
    })
}

/// Extrema of `xi_a / V xi_a` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinMaxRatio {
    /// Minimum value `m(a)`.
    pub m: f64,
    /// Maximum value `M(a)`, attained at `x = 0`.
    pub big_m: f64,
    /// Location of the minimum.
    pub x0: f64,
    /// `gamma_a = (p + (1+a) x0) / (p + a x0)`.
    pub gamma: f64,
}

/// `gamma_a^3` from its defining quotient.
pub fn gamma_cubed(param: &MapParam, a: f64) -> f64 {
    let p = param.pf();
    let big_a = p - p * a - a * a;
    let big_b = p * a + a + a * a;
    (1.0 + a) * big_b / ((1.0 - a) * big_a)
}

/// `gamma_a^3` in the form `1 + (3a^2 + (3p+1)a - p) / ((1-a)(p-pa-a^2))`.
pub fn gamma_cubed_alt(param: &MapParam, a: f64) -> f64 {
    let p = param.pf();
    1.0 + (3.0 * a * a + (3.0 * p + 1.0) * a - p) / ((1.0 - a) * (p - p * a - a * a))
}

/// Closed-form `m(a)`, `M(a)`, `x0` and `gamma_a` for `a` in `[alpha_p, 1/3]`.
pub fn min_max_ratio(param: &MapParam, a: f64) -> Result<MinMaxRatio> {
    let alpha = alpha_root(param)?;
    let eps = 1e-12;
    if !(a >= alpha - eps && a <= ALPHA_BRACKET_HI + eps) {
        return Err(GkwError::Domain {
            what: "min_max_ratio",
            value: a,
            domain: "[alpha_p, 1/3]",
        });
    }
    let p = param.pf();
    let big_a = p - p * a - a * a;
    let big_b = p * a + a + a * a;
    let gamma = gamma_cubed(param, a).cbrt();
    let x0 = (gamma - 1.0) * p / (1.0 + a - a * gamma);
    let m = ((1.0 - a) * p * p
        + a * a * (1.0 + a)
        + 3.0 * big_a * big_b * ((1.0 - a) * gamma + (1.0 + a) / gamma))
        / p;
    let big_m = 2.0 / p * (p + a) * (p + a);
    Ok(MinMaxRatio {
        m,
        big_m,
        x0,
        gamma,
    })
}

/// Grid extrema of `xi_a / V xi_a` with `V xi_a` computed numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericExtrema {
    pub min: f64,
    pub argmin: f64,
    pub max: f64,
    pub argmax: f64,
}

/// Brute-force counterpart of [`min_max_ratio`].
pub fn ratio_extrema_numeric(
    param: &MapParam,
    a: f64,
    grid_size: usize,
    degree: usize,
    policy: &TruncationPolicy,
) -> Result<NumericExtrema> {
    let xi_a = aux_functions(param, a, degree)?.xi;
    let v = apply_v(param, &xi_a, policy)?.rep;
    let mut out = NumericExtrema {
        min: f64::INFINITY,
        argmin: 0.0,
        max: f64::NEG_INFINITY,
        argmax: 0.0,
    };
    for x in uniform_grid(grid_size) {
        let r = xi_a.at(x) / v.at(x);
        if r < out.min {
            out.min = r;
            out.argmin = x;
        }
        if r > out.max {
            out.max = r;
            out.argmax = x;
        }
    }
    Ok(out)
}

/// The closed-form bounds `(v_p, w_p)`.
pub fn bounds(param: &MapParam) -> (f64, f64) {
    let p = param.pf();
    let v = p / (2.0 * (p * p + 2.0 * p / 3.0 + 1.0 / 9.0));
    let w = p / (2.0 * (p * p + 2.0 * p / 3.0 - 2.0 / 9.0));
    (v, w)
}

/// Everything the auxiliary construction produces for one `(p, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxAnalysis {
    pub p: u32,
    pub a: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub x0: f64,
    pub m_a: f64,
    pub big_m_a: f64,
    pub v_p: f64,
    pub w_p: f64,
}

pub fn aux_analysis(param: &MapParam, a: f64) -> Result<AuxAnalysis> {
    let alpha = alpha_root(param)?;
    let mm = min_max_ratio(param, a)?;
    let (v_p, w_p) = bounds(param);
    Ok(AuxAnalysis {
        p: param.p(),
        a,
        alpha,
        gamma: mm.gamma,
        x0: mm.x0,
        m_a: mm.m,
        big_m_a: mm.big_m,
        v_p,
        w_p,
    })
}

/// Outcome of checking `v_p xi <= V xi <= w_p xi` on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    pub p: u32,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub v_p: f64,
    pub w_p: f64,
    pub pass: bool,
}

/// Evaluate `(V xi)/xi` on a uniform grid, with `V xi` computed numerically.
pub fn verify_sandwich(
    param: &MapParam,
    grid_size: usize,
    degree: usize,
    policy: &TruncationPolicy,
) -> Result<SandwichReport> {
    require_p_at_least_two(param, "verify_sandwich")?;
    let xi_rep = FuncRep::fit(|x| xi(param, x), degree)?;
    let v_xi = apply_v(param, &xi_rep, policy)?.rep;
    Ok(sandwich_from_image(param, &v_xi, grid_size))
}

/// Sandwich report from a precomputed `V xi` (avoids re-assembling `V`).
pub fn sandwich_from_image(param: &MapParam, v_xi: &FuncRep, grid_size: usize) -> SandwichReport {
    let (lo, hi) = uniform_grid(grid_size)
        .into_iter()
        .map(|x| v_xi.at(x) / xi(param, x))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r), hi.max(r))
        });
    let (v_p, w_p) = bounds(param);
    SandwichReport {
        p: param.p(),
        min_ratio: lo,
        max_ratio: hi,
        v_p,
        w_p,
        pass: lo >= v_p - SANDWICH_SLACK && hi <= w_p + SANDWICH_SLACK,
    }
}
