//! Verification suites. Every check becomes a row carrying its measured value
//! and a `pass` flag; a check that cannot be computed is a failed row.

use gkw_core::evolution::{error_shape, estimate_theta, evolve_cdf, EvolutionTrace};
use gkw_core::funcspace::DEFAULT_GRID;
use gkw_core::gauss::{kuzmin_rate, kuzmin_rate_bound};
use gkw_core::spectral::{
    alpha_root_extended, bounds, rho_extended, spectrum_collocation, tau_bound, verify_sandwich,
    wirsing_condition, xi, EigenResult, SANDWICH_SLACK, TAU_RATIO_LIMIT,
};
use gkw_core::{FuncRep, OperatorKind, OperatorMatrix, TruncationPolicy};

use crate::commands::{Job, SANDWICH_GRID};
use crate::config::Suite;
use crate::output::Row;
use crate::CliError;

/// `|lambda_ratio - lambda_power|` allowed.
pub const ESTIMATOR_AGREEMENT: f64 = 1e-8;
/// Residual allowed on the power eigenpair.
pub const EIGEN_RESIDUAL: f64 = 1e-9;
/// `|rho(alpha)|` allowed.
pub const ALPHA_RESIDUAL: f64 = 1e-12;
/// Kuzmin envelope steps: fit at the first, check the rest.
pub const KUZMIN_FIT: usize = 2;
pub const KUZMIN_LAST: usize = 12;
/// Envelope values below this are rounding noise and are not checked.
pub const KUZMIN_NOISE: f64 = 1e-12;
/// Step at which the limit profile is read off.
pub const THETA_STEP: usize = 20;
/// Latest error-shape step, used when the remainder is resolvable that far.
pub const SHAPE_LAST: usize = 18;
/// Smallest remainder, relative to `Delta_n`, that double precision resolves.
pub const SHAPE_RESOLUTION: f64 = 1e-10;
/// `Theta(0)`, `Theta(1)` allowed.
pub const THETA_ENDPOINT: f64 = 1e-8;
/// `Lambda(1) = 1` and `Lambda(2) = -lambda` tolerances.
pub const SPECTRUM_HEAD1: f64 = 1e-10;
pub const SPECTRUM_HEAD2: f64 = 1e-8;
/// Classical constant and its allowed deviation.
pub const ANCHOR_VALUE: f64 = 0.303663;
pub const ANCHOR_TOL: f64 = 1e-5;

pub const ALL_SUITES: [Suite; 8] = [
    Suite::Sandwich,
    Suite::Estimators,
    Suite::Bounds,
    Suite::Kuzmin,
    Suite::Tail,
    Suite::Wirsing,
    Suite::Spectrum,
    Suite::Anchor,
];

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Sandwich => "sandwich",
        Suite::Estimators => "estimators",
        Suite::Bounds => "bounds",
        Suite::Kuzmin => "kuzmin",
        Suite::Tail => "tail",
        Suite::Wirsing => "wirsing",
        Suite::Spectrum => "spectrum",
        Suite::Anchor => "anchor",
        Suite::All => "all",
    }
}

/// Matrices and eigenpairs for one `p`, built on first use.
struct Cache<'a> {
    job: &'a Job<'a>,
    u: Option<OperatorMatrix>,
    v: Option<OperatorMatrix>,
    ratio: Option<EigenResult>,
    power: Option<EigenResult>,
    trace: Option<EvolutionTrace>,
}

impl<'a> Cache<'a> {
    fn v(&mut self) -> Result<&OperatorMatrix, CliError> {
        if self.v.is_none() {
            self.v = Some(self.job.matrix(OperatorKind::V)?);
        }
        Ok(self.v.as_ref().expect("just built"))
    }

    fn ratio(&mut self) -> Result<EigenResult, CliError> {
        if self.ratio.is_none() {
            if self.u.is_none() {
                self.u = Some(self.job.matrix(OperatorKind::U)?);
            }
            self.ratio = Some(self.job.ratio(self.u.as_ref().expect("just built"))?);
        }
        Ok(self.ratio.clone().expect("just built"))
    }

    fn power(&mut self) -> Result<EigenResult, CliError> {
        if self.power.is_none() {
            let job = self.job;
            self.power = Some(job.power(self.v()?)?);
        }
        Ok(self.power.clone().expect("just built"))
    }

    fn trace(&mut self, steps: usize) -> Result<&EvolutionTrace, CliError> {
        if self.trace.as_ref().map_or(true, |t| t.steps < steps) {
            let job = self.job;
            let phi0 = FuncRep::fit(|x| x, job.cfg.degree)?;
            self.trace = Some(evolve_cdf(
                &job.param,
                &phi0,
                steps,
                job.cfg.degree,
                &job.policy,
            )?);
        }
        Ok(self.trace.as_ref().expect("just built"))
    }
}

fn check(job: &Job, quantity: String, value: f64, n: Option<u64>, pass: bool) -> Row {
    Row {
        pass: Some(pass),
        ..job.row(quantity, value, n)
    }
}

/// Run `suite` (or every suite) for one `p`.
pub fn verify_p(job: &Job, suite: Suite) -> Vec<Row> {
    let mut cache = Cache {
        job,
        u: None,
        v: None,
        ratio: None,
        power: None,
        trace: None,
    };
    let suites: Vec<Suite> = if suite == Suite::All {
        ALL_SUITES.to_vec()
    } else {
        vec![suite]
    };
    let mut rows = Vec::new();
    for s in suites {
        let name = suite_name(s);
        let mut out = Vec::new();
        let res = match s {
            Suite::Sandwich => sandwich(job, &mut cache, &mut out),
            Suite::Estimators => estimators(job, &mut cache, &mut out),
            Suite::Bounds => bounds_suite(job, &mut cache, &mut out),
            Suite::Kuzmin => kuzmin(job, &mut cache, &mut out),
            Suite::Tail => tail(job, &mut out),
            Suite::Wirsing => wirsing(job, &mut cache, &mut out),
            Suite::Spectrum => spectrum(job, &mut cache, &mut out),
            Suite::Anchor => anchor(job, &mut cache, &mut out),
            Suite::All => unreachable!("expanded above"),
        };
        for r in &mut out {
            r.quantity = format!("{name}.{}", r.quantity);
        }
        rows.extend(out);
        if let Err(e) = res {
            eprintln!("gkw: p = {}: {name} suite failed to run: {e}", job.p());
            rows.push(check(job, format!("{name}.error"), f64::NAN, None, false));
        }
    }
    rows
}

fn sandwich(job: &Job, _: &mut Cache, out: &mut Vec<Row>) -> Result<(), CliError> {
    if job.p() < 2 {
        return Ok(());
    }
    let r = verify_sandwich(&job.param, SANDWICH_GRID, job.cfg.degree, &job.policy)?;
    let n = Some(SANDWICH_GRID as u64);
    out.push(check(
        job,
        "min_ratio".into(),
        r.min_ratio,
        n,
        r.min_ratio >= r.v_p - SANDWICH_SLACK,
    ));
    out.push(check(
        job,
        "max_ratio".into(),
        r.max_ratio,
        n,
        r.max_ratio <= r.w_p + SANDWICH_SLACK,
    ));
    Ok(())
}

fn estimators(job: &Job, cache: &mut Cache, out: &mut Vec<Row>) -> Result<(), CliError> {
    let ratio = cache.ratio()?;
    let power = cache.power()?;
    out.push(check(
        job,
        "lambda_ratio".into(),
        ratio.lambda,
        Some(ratio.iterations as u64),
        ratio.converged,
    ));
    out.push(check(
        job,
        "residual_power".into(),
        power.residual,
        Some(power.iterations as u64),
        power.residual <= EIGEN_RESIDUAL,
    ));
    let gap = (ratio.lambda - power.lambda).abs();
    out.push(check(
        job,
        "agreement".into(),
        gap,
        None,
        gap <= ESTIMATOR_AGREEMENT,
    ));
    Ok(())
}

fn bounds_suite(job: &Job, cache: &mut Cache, out: &mut Vec<Row>) -> Result<(), CliError> {
    let (v, w) = bounds(&job.param);
    let lambda = cache.ratio()?.lambda;
    out.push(check(job, "gap".into(), w - v, None, w > v));
    out.push(check(
        job,
        "lambda_in_bounds".into(),
        lambda,
        None,
        v <= lambda && lambda <= w,
    ));
    let p = job.param.pf();
    let scaled = p.powi(3) * (lambda - (1.0 / (2.0 * p) - 1.0 / (3.0 * p * p))).abs();
    out.push(check(
        job,
        "asymptotic_p3".into(),
        scaled,
        None,
        scaled.is_finite(),
    ));
    if job.p() >= 2 {
        let a = alpha_root_extended(&job.param)?;
        let res = rho_extended(&job.param, a).hi().abs();
        let a = a.hi();
        let ok = a > 0.32 && a < 1.0 / 3.0 && res <= ALPHA_RESIDUAL;
        out.push(check(job, "alpha".into(), a, None, ok));
    }
    Ok(())
}

fn kuzmin(job: &Job, cache: &mut Cache, out: &mut Vec<Row>) -> Result<(), CliError> {
    let q = kuzmin_rate(&job.param);
    let q_ok = job.p() < 2 || q < kuzmin_rate_bound(&job.param);
    out.push(check(job, "q_p".into(), q, None, q_ok && q < 1.0));
    let s = cache.trace(KUZMIN_LAST)?.sup_deltas();
    let c = s[KUZMIN_FIT] / q.powi(KUZMIN_FIT as i32);
    let mut worst = 0.0f64;
    let mut last = KUZMIN_FIT;
    for n in KUZMIN_FIT + 1..=KUZMIN_LAST {
        let env = c * q.powi(n as i32);
        if env < KUZMIN_NOISE {
            break;
        }
        worst = worst.max(s[n] / env);
        last = n;
    }
    out.push(check(
        job,
        "envelope".into(),
        worst,
        Some(last as u64),
        last > KUZMIN_FIT && worst <= 1.0,
    ));
    Ok(())
}

fn tail(job: &Job, out: &mut Vec<Row>) -> Result<(), CliError> {
    // the same operator at K and 2K must agree to the target tolerance
    let doubled = TruncationPolicy {
        cutoff: 2 * job.policy.cutoff,
        ..job.policy
    };
    let f = FuncRep::fit(|x| xi(&job.param, x), job.cfg.degree)?;
    for (name, kind) in [
        ("gkw", OperatorKind::Gkw),
        ("u", OperatorKind::U),
        ("v", OperatorKind::V),
    ] {
        let a = OperatorMatrix::square(kind, &job.param, job.cfg.degree, &job.policy)?
            .apply(&f)?
            .rep;
        let b = OperatorMatrix::square(kind, &job.param, job.cfg.degree, &doubled)?
            .apply(&f)?
            .rep;
        let diff = a.sub(&b).sup_norm(DEFAULT_GRID);
        out.push(check(
            job,
            format!("{name}_k_vs_2k"),
            diff,
            None,
            diff <= job.cfg.tol,
        ));
    }
    Ok(())
}

fn wirsing(job: &Job, cache: &mut Cache, out: &mut Vec<Row>) -> Result<(), CliError> {
    if job.p() < 2 {
        return Ok(());
    }
    let cond = wirsing_condition(&job.param, job.cfg.degree, &job.policy)?;
    out.push(check(
        job,
        "condition_margin".into(),
        cond.lhs - cond.rhs,
        None,
        cond.pass,
    ));
    let eig = cache.power()?;
    let tau = tau_bound(&job.param, &eig)?;
    let r = tau / eig.lambda;
    out.push(check(job, "tau_ratio".into(), r, None, r < TAU_RATIO_LIMIT));

    let trace = cache.trace(THETA_STEP)?.clone();
    let prof = estimate_theta(&trace, &eig, THETA_STEP, &job.policy)?;
    let n = Some(THETA_STEP as u64);
    out.push(check(
        job,
        "decomposition".into(),
        prof.residual,
        n,
        prof.converged,
    ));
    let ends = prof.theta.at(0.0).abs().max(prof.theta.at(1.0).abs());
    out.push(check(
        job,
        "theta_endpoints".into(),
        ends,
        n,
        ends <= THETA_ENDPOINT,
    ));
    let (fit, checks) = shape_steps(eig.contraction_ratio);
    let shape = error_shape(&trace, &prof.theta, eig.lambda, tau, fit, &checks)?;
    let worst = shape
        .checks
        .iter()
        .map(|c| c.constant / shape.c)
        .fold(0.0, f64::max);
    out.push(check(
        job,
        "error_shape".into(),
        worst,
        Some(checks[1] as u64),
        shape.pass(),
    ));
    Ok(())
}

/// Fit step and check steps for the error shape. The remainder decays
/// relative to `Delta_n` at the measured contraction rate; past the step where
/// it drops below `SHAPE_RESOLUTION` only rounding noise would be compared.
pub fn shape_steps(contraction: f64) -> (usize, [usize; 2]) {
    let last = if contraction > 0.0 && contraction < 1.0 {
        (SHAPE_RESOLUTION.ln() / contraction.ln()).floor() as usize
    } else {
        SHAPE_LAST
    };
    let last = last.clamp(9, SHAPE_LAST);
    (last - 8, [last - 4, last])
}

fn spectrum(job: &Job, cache: &mut Cache, out: &mut Vec<Row>) -> Result<(), CliError> {
    let dim = job.cfg.degree.max(8);
    let s = spectrum_collocation(&job.param, dim, &job.policy)?;
    let lambda = cache.ratio()?.lambda;
    let l1 = s.nth(1).unwrap_or(f64::NAN);
    let l2 = s.nth(2).unwrap_or(f64::NAN);
    let d = Some(dim as u64);
    out.push(check(
        job,
        "head1".into(),
        (l1 - 1.0).abs(),
        d,
        (l1 - 1.0).abs() <= SPECTRUM_HEAD1,
    ));
    out.push(check(
        job,
        "head2".into(),
        (l2 + lambda).abs(),
        d,
        (l2 + lambda).abs() <= SPECTRUM_HEAD2,
    ));
    Ok(())
}

fn anchor(job: &Job, cache: &mut Cache, out: &mut Vec<Row>) -> Result<(), CliError> {
    if job.p() != 1 {
        return Ok(());
    }
    let lambda = cache.ratio()?.lambda;
    out.push(check(
        job,
        "lambda1".into(),
        lambda,
        None,
        (lambda - ANCHOR_VALUE).abs() <= ANCHOR_TOL,
    ));
    Ok(())
}
