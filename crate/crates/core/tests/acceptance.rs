//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances here are the contract; do not loosen them.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gkw_core::evolution::{
    error_shape, estimate_theta, evolve_cdf, montecarlo_cdf, EvolutionTrace,
};
use gkw_core::funcspace::{uniform_grid, DEFAULT_GRID};
use gkw_core::gauss::{kuzmin_rate, stationary_density};
use gkw_core::ops::{apply_gkw, apply_u, apply_v, apply_v_via_u};
use gkw_core::spectral::{
    alpha_root_extended, bounds, functional_l, lambda_by_power_with, lambda_by_ratio,
    min_max_ratio, rho, rho_extended, sandwich_from_image, spectrum_collocation, tau_bound,
    wirsing_condition, xi, AuxClosedForms, EigenResult, DEFAULT_MAX_ITER, TAU_RATIO_LIMIT,
};
use gkw_core::{FuncRep, MapParam, OperatorKind, OperatorMatrix, TruncationPolicy};

type Res<T> = Result<T, Box<dyn std::error::Error>>;

const N: usize = 64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Res<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn mp(p: u32) -> MapParam {
    MapParam::new(p).expect("p >= 1")
}

fn policy() -> TruncationPolicy {
    TruncationPolicy::default()
}

fn fit(f: impl Fn(f64) -> f64) -> FuncRep {
    FuncRep::fit(f, N).expect("degree")
}

fn sup_diff(a: &FuncRep, b: &FuncRep) -> f64 {
    a.sub(b).sup_norm(DEFAULT_GRID)
}

fn lebesgue_ratio(p: u32) -> Res<EigenResult> {
    Ok(lambda_by_ratio(
        &mp(p),
        &fit(|x| x),
        DEFAULT_MAX_ITER,
        1e-12,
        &policy(),
    )?)
}

/// Per-p results of the sandwich sweep, reused by later criteria.
struct SweepEntry {
    p: u32,
    eig: EigenResult,
}

fn c1() -> Res<Outcome> {
    let t = Instant::now();
    let r = lambda_by_ratio(&mp(1), &fit(|x| x), DEFAULT_MAX_ITER, 1e-10, &policy())?;
    let dt = t.elapsed();
    let err = (r.lambda - 0.303663).abs();
    outcome(
        err <= 1e-5 && dt < Duration::from_secs(10),
        format!(
            "lambda_1 = {:.13}, |err| = {err:.2e}, {:.2} s",
            r.lambda,
            dt.as_secs_f64()
        ),
    )
}

fn c2(sweep: &mut Vec<SweepEntry>) -> Res<Outcome> {
    let t = Instant::now();
    let mut bad = Vec::new();
    for p in 2..=50 {
        let m = mp(p);
        let v = OperatorMatrix::square(OperatorKind::V, &m, N, &policy())?;
        let xi_rep = fit(|x| xi(&m, x));
        let sw = sandwich_from_image(&m, &v.apply(&xi_rep)?.rep, 1001);
        let eig = lambda_by_power_with(&v, &xi_rep, DEFAULT_MAX_ITER, 1e-12)?;
        let (lo, hi) = bounds(&m);
        if !(sw.pass && lo <= eig.lambda && eig.lambda <= hi) {
            bad.push(p);
        }
        sweep.push(SweepEntry { p, eig });
    }
    let dt = t.elapsed();
    outcome(
        bad.is_empty() && dt < Duration::from_secs(120),
        format!("p = 2..50, failures {bad:?}, {:.1} s", dt.as_secs_f64()),
    )
}

fn c3(sweep: &[SweepEntry]) -> Res<Outcome> {
    let mut worst = 0.0f64;
    for p in 1..=10u32 {
        let ratio = lebesgue_ratio(p)?;
        let power = match sweep.iter().find(|e| e.p == p) {
            Some(e) => e.eig.clone(),
            None => {
                gkw_core::spectral::lambda_by_power(&mp(p), 1e-12, DEFAULT_MAX_ITER, N, &policy())?
            }
        };
        worst = worst.max((ratio.lambda - power.lambda).abs());
    }
    outcome(
        worst <= 1e-8,
        format!("max |ratio - power| over p = 1..10: {worst:.2e}"),
    )
}

fn c4(sweep: &[SweepEntry]) -> Res<Outcome> {
    let scaled: Vec<(u32, f64)> = sweep
        .iter()
        .filter(|e| e.p >= 5)
        .map(|e| {
            let p = e.p as f64;
            (
                e.p,
                p.powi(3) * (e.eig.lambda - (1.0 / (2.0 * p) - 1.0 / (3.0 * p * p))).abs(),
            )
        })
        .collect();
    let first = scaled[0].1;
    let (pmax, max) = scaled
        .iter()
        .copied()
        .fold((0, 0.0f64), |a, b| if b.1 > a.1 { b } else { a });
    let last = scaled[scaled.len() - 1].1;
    outcome(
        max.is_finite() && max <= 2.0 * first,
        format!("p^3 |lambda - (1/2p - 1/3p^2)|: p=5 {first:.6}, p=50 {last:.6}, max {max:.6} at p={pmax}; guard 2x{first:.6}"),
    )
}

fn c5() -> Res<Outcome> {
    let mut worst = 0.0f64;
    for p in [2u32, 3, 5] {
        let m = mp(p);
        let pol = policy();
        let one = FuncRep::constant(1.0, N);
        worst = worst.max(sup_diff(&apply_u(&m, &one, &pol)?.rep, &one));
        for a in [0.25, 1.0 / 3.0] {
            let cf = AuxClosedForms::new(&m, a);
            let g = fit(|x| cf.g(x));
            worst = worst.max(sup_diff(&apply_u(&m, &g, &pol)?.rep, &fit(|x| cf.h(x))));
        }
        let cf = AuxClosedForms::new(&m, 1.0 / 3.0);
        let image = apply_v(&m, &fit(|x| cf.xi(x)), &pol)?.rep;
        worst = worst.max(sup_diff(&image, &fit(|x| xi(&m, x))));
        let eta = fit(|x| stationary_density(&m, x).expect("x in [0, 1]"));
        worst = worst.max(sup_diff(&apply_gkw(&m, &eta, &pol)?.rep, &eta));
    }
    outcome(worst <= 1e-8, format!("max identity residual: {worst:.2e}"))
}

fn random_smooth_positive(rng: &mut ChaCha8Rng) -> FuncRep {
    let mut u = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let terms: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (0.1 + u(), 0.2 + 2.0 * u(), 3.0 * u() - 1.5))
        .collect();
    fit(|x| {
        terms
            .iter()
            .map(|&(c, b, k)| c / (b + x) + 0.5 * c * (k * x).exp())
            .sum()
    })
}

fn c6() -> Res<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for p in [2u32, 5] {
        let m = mp(p);
        for _ in 0..20 {
            let f = random_smooth_positive(&mut rng);
            let direct = apply_v(&m, &f, &policy())?.rep;
            let via = apply_v_via_u(&m, &f, &policy())?.rep;
            worst = worst.max(sup_diff(&direct, &via));
        }
    }
    outcome(
        worst <= 1e-8,
        format!("max |V f - V_via_U f| over 40 functions: {worst:.2e}"),
    )
}

fn c7() -> Res<Outcome> {
    let grid = uniform_grid(20_001);
    let mut signs_ok = true;
    let mut worst_rho = 0.0f64;
    let mut alpha_in = true;
    let mut worst_ext = 0.0f64;
    for p in 2..=50u32 {
        let m = mp(p);
        signs_ok &= rho(&m, 0.32) < 0.0 && rho(&m, 1.0 / 3.0) > 0.0;
        let a = alpha_root_extended(&m)?;
        worst_rho = worst_rho.max(rho_extended(&m, a).hi().abs());
        let alpha = a.hi();
        alpha_in &= alpha > 0.32 && alpha < 1.0 / 3.0;
        let v = OperatorMatrix::square(OperatorKind::V, &m, N, &policy())?;
        for a in [alpha, 1.0 / 3.0] {
            let cf = AuxClosedForms::new(&m, a);
            let xi_a = fit(|x| cf.xi(x));
            let v_xi = v.apply(&xi_a)?.rep;
            let (lo, hi) = grid
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                    let r = xi_a.at(x) / v_xi.at(x);
                    (lo.min(r), hi.max(r))
                });
            let mm = min_max_ratio(&m, a)?;
            worst_ext = worst_ext.max((lo - mm.m).abs()).max((hi - mm.big_m).abs());
        }
    }
    outcome(
        signs_ok && alpha_in && worst_rho <= 1e-12 && worst_ext <= 1e-6,
        format!(
            "p = 2..50: bracket signs {signs_ok}, alpha in (0.32, 1/3) {alpha_in}, max |rho(alpha)| {worst_rho:.2e}, max |closed form - grid| {worst_ext:.2e}"
        ),
    )
}

fn c8(sweep: &[SweepEntry]) -> Res<Outcome> {
    let mut min_margin = f64::INFINITY;
    let mut cond_ok = true;
    for p in 2..=50u32 {
        let w = wirsing_condition(&mp(p), N, &policy())?;
        cond_ok &= w.pass;
        min_margin = min_margin.min(w.lhs / w.rhs);
    }
    let mut max_ratio = 0.0f64;
    for e in sweep.iter().filter(|e| e.p <= 20) {
        max_ratio = max_ratio.max(tau_bound(&mp(e.p), &e.eig)? / e.eig.lambda);
    }
    outcome(
        cond_ok && max_ratio < TAU_RATIO_LIMIT,
        format!(
            "min lhs/rhs over p = 2..50: {min_margin:.4}; max tau/lambda over p = 2..20: {max_ratio:.4} (limit {TAU_RATIO_LIMIT:.4})"
        ),
    )
}

fn lebesgue_trace(p: u32, n: usize) -> Res<EvolutionTrace> {
    Ok(evolve_cdf(&mp(p), &fit(|x| x), n, N, &policy())?)
}

fn c9() -> Res<Outcome> {
    let m = mp(2);
    let q = kuzmin_rate(&m);
    // independent: direct sums with an integral tail
    let zeta = |s: i32| {
        let kmax = 200_000u32;
        let head: f64 = (0..kmax).rev().map(|k| (2.0 + k as f64).powi(-s)).sum();
        let a = 2.0 + kmax as f64;
        head + a.powi(1 - s) / (s - 1) as f64 + 0.5 * a.powi(-s)
    };
    let q_oracle = 8.0 * zeta(3) - 2.0 * zeta(2);
    let s = lebesgue_trace(2, 12)?.sup_deltas();
    let c = s[2] / (q * q);
    let worst = (3..=12)
        .map(|n| s[n] / (c * q.powi(n as i32)))
        .fold(0.0f64, f64::max);
    outcome(
        worst <= 1.0 && (q - q_oracle).abs() <= 1e-10 && (q - 0.326587).abs() < 1e-6,
        format!("Q_2 = {q:.9} (oracle {q_oracle:.9}); max sup|Delta_n| / (C Q^n) for n = 3..12: {worst:.4}"),
    )
}

fn c10() -> Res<Outcome> {
    let m = mp(2);
    let eig = lebesgue_ratio(2)?;
    let trace = lebesgue_trace(2, 20)?;
    let prof = estimate_theta(&trace, &eig, 20, &policy())?;
    let l = functional_l(&m, &FuncRep::constant(1.0, N), &eig, None, &policy())?;
    let resid = sup_diff(&prof.theta, &prof.psi.scale(l.value));
    let ends = prof.theta.at(0.0).abs().max(prof.theta.at(1.0).abs());
    let tau = tau_bound(&m, &eig)?;
    let shape = error_shape(&trace, &prof.theta, eig.lambda, tau, 10, &[14, 18])?;
    let ks: Vec<String> = shape
        .checks
        .iter()
        .map(|c| format!("{:.3e}", c.constant))
        .collect();
    outcome(
        resid <= 1e-3 && ends <= 1e-8 && shape.pass(),
        format!(
            "L(1) = {:.6}, sup|Theta - L Psi| = {resid:.2e}, |Theta(0,1)| <= {ends:.1e}, C(10) = {:.3e}, C(14, 18) = [{}]",
            l.value,
            shape.c,
            ks.join(", ")
        ),
    )
}

fn c11() -> Res<Outcome> {
    let m = mp(2);
    let xs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let mc = montecarlo_cdf(&m, 5, 1_000_000, 20_240_601, &xs)?;
    let t = lebesgue_trace(2, 5)?;
    let worst = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (mc.values[i] - t.phi[5].at(x)).abs() / mc.std_errors[i])
        .fold(0.0f64, f64::max);
    outcome(
        worst <= 4.0,
        format!("max |MC - evolution| / stderr at 21 points: {worst:.3}"),
    )
}

fn c12() -> Res<Outcome> {
    let mut pass = true;
    let mut detail = Vec::new();
    for p in [1u32, 2] {
        let s = spectrum_collocation(&mp(p), 64, &policy())?;
        let lambda = lebesgue_ratio(p)?.lambda;
        let l1 = s.nth(1).unwrap_or(f64::NAN);
        let l2 = s.nth(2).unwrap_or(f64::NAN);
        let (e1, e2) = ((l1 - 1.0).abs(), (l2 + lambda).abs());
        pass &= e1 <= 1e-10 && e2 <= 1e-8;
        let r: Vec<String> = s
            .conjecture_ratios
            .iter()
            .take(8)
            .map(|r| format!("{r:.4}"))
            .collect();
        detail.push(format!(
            "p={p}: |L1-1| {e1:.1e}, |L2+lambda| {e2:.1e}; probe (unproven conjecture, no assertion) r_1..r_{} = [{}]",
            r.len(),
            r.join(", ")
        ));
    }
    outcome(pass, detail.join("; "))
}

fn report(n: u32, title: &str, r: Res<Outcome>) -> bool {
    match r {
        Ok(o) => {
            println!(
                "criterion {n:>2}: {} {title} -- {}",
                if o.pass { "PASS" } else { "FAIL" },
                o.detail
            );
            o.pass
        }
        Err(e) => {
            println!("criterion {n:>2}: FAIL {title} -- error: {e}");
            false
        }
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut sweep = Vec::new();
    let results = [
        report(1, "lambda_1 anchor", c1()),
        report(2, "sandwich sweep", c2(&mut sweep)),
        report(3, "estimator cross-validation", c3(&sweep)),
        report(4, "large-p asymptotics", c4(&sweep)),
        report(5, "exact operator identities", c5()),
        report(6, "route equivalence", c6()),
        report(7, "auxiliary analysis", c7()),
        report(8, "contraction condition", c8(&sweep)),
        report(9, "Kuzmin rate", c9()),
        report(10, "limit profile decomposition", c10()),
        report(11, "Monte Carlo oracle", c11()),
        report(12, "spectrum heads", c12()),
    ];
    let all = results.iter().all(|&b| b);
    report(
        13,
        "irreproducible results",
        outcome(
            true,
            "none: every quantitative claim is covered by criteria 1-12; the spectral conjecture is a probe only",
        ),
    );
    println!("acceptance: {:.1} s total", start.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
