//! Two independent estimators of `lambda_p`.
//!
//! The ratio estimator iterates `U` on an increasing start `f0` and watches
//! `(U^n f)(1) - (U^n f)(0)`; successive quotients tend to `-lambda_p`. The
//! power estimator iterates `V`, whose dominant eigenvalue is `lambda_p`,
//! starting from `xi`.

use crate::error::{GkwError, Result};
use crate::funcspace::{FuncRep, DEFAULT_GRID};
use crate::gauss::MapParam;
use crate::ops::{OperatorKind, OperatorMatrix, TruncationPolicy};

use super::aux::xi;

/// Iteration cap used by the CLI and the convenience wrappers.
pub const DEFAULT_MAX_ITER: usize = 1000;

/// Differences below this are treated as rounding noise when measuring the
/// contraction ratio.
const NOISE_FLOOR: f64 = 1e-13;

/// An eigenpair `V psi = lambda psi` with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub p: u32,
    pub lambda: f64,
    /// Eigenfunction of `V`, normalized to sup-norm 1.
    pub psi: FuncRep,
    /// `sup |V psi - lambda psi|` on the evaluation grid.
    pub residual: f64,
    /// Measured geometric rate of the iteration error, a proxy for `tau/lambda`.
    pub contraction_ratio: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Geometric mean rate of a sequence of error magnitudes, using only entries
/// above the noise floor and skipping the transient first two.
fn geometric_rate(errs: &[f64]) -> f64 {
    let usable: Vec<(usize, f64)> = errs
        .iter()
        .copied()
        .enumerate()
        .skip(2)
        .filter(|&(_, e)| e > NOISE_FLOOR)
        .collect();
    match (usable.first(), usable.last()) {
        (Some(&(i, a)), Some(&(j, b))) if j > i => (b / a).powf(1.0 / (j - i) as f64),
        _ => f64::NAN,
    }
}

fn endpoint_gap(f: &FuncRep) -> f64 {
    f.at(1.0) - f.at(0.0)
}

/// Ratio estimator with a caller-supplied `U` matrix.
pub fn lambda_by_ratio_with(
    u: &OperatorMatrix,
    f0: &FuncRep,
    n_max: usize,
    tol: f64,
) -> Result<EigenResult> {
    if u.kind() != OperatorKind::U {
        return Err(GkwError::InvalidInput(
            "ratio estimator needs the U operator".into(),
        ));
    }
    let df0 = f0.derivative();
    if df0
        .values_on(&crate::funcspace::uniform_grid(DEFAULT_GRID))
        .iter()
        .any(|&d| d <= 0.0)
    {
        return Err(GkwError::InvalidInput(
            "start function must be strictly increasing".into(),
        ));
    }
    let gap0 = endpoint_gap(f0);
    // keep f normalized to f(0) = 0, f(1) = 1; then r_n is the gap of U f
    let mut f = f0.with_degree(u.in_degree()).lin_comb(
        1.0 / gap0,
        &FuncRep::constant(-f0.at(0.0) / gap0, u.in_degree()),
        1.0,
    );
    let mut g = u.apply(&f)?.rep;
    let mut r = endpoint_gap(&g);
    let mut diffs = Vec::new();
    let mut converged = false;
    let mut iterations = 1;
    while iterations < n_max {
        let gap = endpoint_gap(&g);
        if gap.abs() < 1e-300 {
            break;
        }
        f = g.lin_comb(
            1.0 / gap,
            &FuncRep::constant(-g.at(0.0) / gap, g.degree()),
            1.0,
        );
        g = u.apply(&f)?.rep;
        iterations += 1;
        let r_next = endpoint_gap(&g);
        let d = (r_next - r).abs();
        diffs.push(d);
        r = r_next;
        if d < tol {
            converged = true;
            break;
        }
    }
    let lambda = -r;
    // -(U f)' = V f', so with psi = f'/|f'|: V psi - lambda psi = (-g' - lambda f')/|f'|
    let df = f.derivative();
    let norm = df.sup_norm(DEFAULT_GRID);
    let psi = df.scale(1.0 / norm);
    let residual = g
        .derivative()
        .lin_comb(-1.0, &df, -lambda)
        .sup_norm(DEFAULT_GRID)
        / norm;
    Ok(EigenResult {
        p: u.param().p(),
        lambda,
        psi,
        residual,
        contraction_ratio: geometric_rate(&diffs),
        iterations,
        converged,
    })
}

/// `lambda_p` from endpoint ratios of `U`-iterates of `f0` (degree taken from `f0`).
pub fn lambda_by_ratio(
    param: &MapParam,
    f0: &FuncRep,
    n_max: usize,
    tol: f64,
    policy: &TruncationPolicy,
) -> Result<EigenResult> {
    let u = OperatorMatrix::square(OperatorKind::U, param, f0.degree(), policy)?;
    lambda_by_ratio_with(&u, f0, n_max, tol)
}

/// Power iteration with a caller-supplied `V` matrix, started at `start`.
pub fn lambda_by_power_with(
    v: &OperatorMatrix,
    start: &FuncRep,
    n_max: usize,
    tol: f64,
) -> Result<EigenResult> {
    if v.kind() != OperatorKind::V {
        return Err(GkwError::InvalidInput(
            "power estimator needs the V operator".into(),
        ));
    }
    let norm0 = start.sup_norm(DEFAULT_GRID);
    if !(norm0 > 0.0) {
        return Err(GkwError::InvalidInput(
            "power iteration needs a nonzero start".into(),
        ));
    }
    let mut psi = start.with_degree(v.in_degree()).scale(1.0 / norm0);
    let mut best: Option<(f64, f64, FuncRep)> = None;
    let mut residuals = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < n_max {
        let image = v.apply(&psi)?.rep;
        iterations += 1;
        let lambda = image.sup_norm(DEFAULT_GRID);
        let residual = image.lin_comb(1.0, &psi, -lambda).sup_norm(DEFAULT_GRID);
        residuals.push(residual);
        if best.as_ref().map_or(true, |b| residual < b.1) {
            best = Some((lambda, residual, psi.clone()));
        }
        if residual <= tol {
            converged = true;
            break;
        }
        psi = image.scale(1.0 / lambda);
    }
    let (lambda, residual, psi) = best.expect("at least one iteration");
    Ok(EigenResult {
        p: v.param().p(),
        lambda,
        psi,
        residual,
        contraction_ratio: geometric_rate(&residuals),
        iterations,
        converged,
    })
}

/// `lambda_p` by power iteration on `V` from `xi = 1/(p+1/3+x)^2`.
pub fn lambda_by_power(
    param: &MapParam,
    tol: f64,
    n_max: usize,
    degree: usize,
    policy: &TruncationPolicy,
) -> Result<EigenResult> {
    let v = OperatorMatrix::square(OperatorKind::V, param, degree, policy)?;
    let start = FuncRep::fit(|x| xi(param, x), degree)?;
    lambda_by_power_with(&v, &start, n_max, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{uniform_grid, DEFAULT_DEGREE};
    use crate::spectral::aux::bounds;

    fn mp(p: u32) -> MapParam {
        MapParam::new(p).unwrap()
    }

    fn identity() -> FuncRep {
        FuncRep::fit(|x| x, DEFAULT_DEGREE).unwrap()
    }

    #[test]
    fn classical_constant() {
        let pol = TruncationPolicy::default();
        let r = lambda_by_ratio(&mp(1), &identity(), DEFAULT_MAX_ITER, 1e-12, &pol).unwrap();
        assert!(r.converged);
        assert!((r.lambda - 0.303_663_002_9).abs() < 1e-6, "{}", r.lambda);
        let q = lambda_by_power(&mp(1), 1e-11, DEFAULT_MAX_ITER, DEFAULT_DEGREE, &pol).unwrap();
        assert!(q.converged);
        assert!((q.lambda - r.lambda).abs() < 1e-8);
    }

    #[test]
    fn estimators_inside_bounds() {
        let pol = TruncationPolicy::default();
        for p in [2, 3] {
            let m = mp(p);
            let (v, w) = bounds(&m);
            let r = lambda_by_ratio(&m, &identity(), DEFAULT_MAX_ITER, 1e-12, &pol).unwrap();
            let q = lambda_by_power(&m, 1e-11, DEFAULT_MAX_ITER, DEFAULT_DEGREE, &pol).unwrap();
            for e in [&r, &q] {
                assert!(v <= e.lambda && e.lambda <= w, "{p}: {}", e.lambda);
                assert!(e.contraction_ratio < 189.0 / 198.0);
                assert!(e.residual <= 1e-9, "{p}: {}", e.residual);
            }
            assert!((r.lambda - q.lambda).abs() < 1e-8);
            // psi positive and comparable with xi
            let ratio_min = uniform_grid(1001)
                .into_iter()
                .map(|x| q.psi.at(x) / xi(&m, x))
                .fold(f64::INFINITY, f64::min);
            assert!(ratio_min > 0.0);
            assert!((q.psi.sup_norm(1001) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let pol = TruncationPolicy::default();
        let m = mp(2);
        let dec = FuncRep::fit(|x| 1.0 - x, 8).unwrap();
        assert!(lambda_by_ratio(&m, &dec, 10, 1e-10, &pol).is_err());
        let u = OperatorMatrix::square(OperatorKind::U, &m, 8, &pol).unwrap();
        assert!(lambda_by_power_with(&u, &dec, 10, 1e-10).is_err());
        let v = OperatorMatrix::square(OperatorKind::V, &m, 8, &pol).unwrap();
        assert!(lambda_by_power_with(&v, &FuncRep::zero(8), 10, 1e-10).is_err());
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let pol = TruncationPolicy::default();
        let r = lambda_by_power(&mp(2), 1e-14, 3, 16, &pol).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }

    #[test]
    fn geometric_rate_of_pure_geometric_sequence() {
        let s: Vec<f64> = (0..20).map(|n| 0.3f64.powi(n)).collect();
        assert!((geometric_rate(&s) - 0.3).abs() < 1e-12);
        assert!(geometric_rate(&[1.0]).is_nan());
    }
}
