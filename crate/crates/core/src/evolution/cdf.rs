use crate::error::{GkwError, Result};
use crate::funcspace::{uniform_grid, FuncRep, DEFAULT_GRID};
use crate::gauss::{cdf_unchecked, MapParam};
use crate::ops::{OperatorKind, OperatorMatrix, TruncationPolicy};

/// Slack on `phi(0) = 0`, `phi(1) = 1` and monotonicity when validating a
/// distribution function.
pub const CDF_TOL: f64 = 1e-12;

/// `phi_k` and `Delta_k = phi_k - Phi_p` for `k = 0..=steps`.
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub p: u32,
    pub steps: usize,
    /// Abscissae used for the grid diagnostics.
    pub grid: Vec<f64>,
    pub phi: Vec<FuncRep>,
    pub delta: Vec<FuncRep>,
    /// `Delta_k(1)` as produced by the recursion, before the mass correction
    /// (`k = 1..=steps`; entry `k - 1`).
    pub mass_defects: Vec<f64>,
}

impl EvolutionTrace {
    pub fn delta(&self, k: usize) -> Result<&FuncRep> {
        self.delta.get(k).ok_or(GkwError::InvalidInput(format!(
            "step {k} beyond trace of {} steps",
            self.steps
        )))
    }

    /// `sup |Delta_k|` on the trace grid, for every step.
    pub fn sup_deltas(&self) -> Vec<f64> {
        self.delta
            .iter()
            .map(|d| {
                d.values_on(&self.grid)
                    .into_iter()
                    .fold(0.0f64, |m, v| m.max(v.abs()))
            })
            .collect()
    }
}

/// `Delta_k` of a trace.
pub fn delta(trace: &EvolutionTrace, k: usize) -> Result<FuncRep> {
    trace.delta(k).cloned()
}

fn check_cdf(phi0: &FuncRep) -> Result<()> {
    let grid = uniform_grid(DEFAULT_GRID);
    let v = phi0.values_on(&grid);
    let ends_ok = v[0].abs() <= CDF_TOL && (v[v.len() - 1] - 1.0).abs() <= CDF_TOL;
    let monotone = v.windows(2).all(|w| w[1] - w[0] >= -CDF_TOL);
    if ends_ok && monotone {
        Ok(())
    } else {
        Err(GkwError::InvalidInput(
            "initial function is not a distribution function on [0, 1]".into(),
        ))
    }
}

/// Evolve with a caller-supplied recursion matrix.
///
/// The recursion fixes `Phi_p` and annihilates constants, so it is applied to
/// `Delta_k` directly: `phi_k` itself would lose every digit of `Delta_k` to
/// cancellation once `Delta_k` is far below 1. Each step's mass defect
/// `Delta_k(1)` (truncation noise) is recorded and then removed along `Phi_p`.
pub fn evolve_cdf_with(r: &OperatorMatrix, phi0: &FuncRep, n: usize) -> Result<EvolutionTrace> {
    if r.kind() != OperatorKind::CdfRecursion {
        return Err(GkwError::InvalidInput(
            "evolution needs the CDF recursion operator".into(),
        ));
    }
    check_cdf(phi0)?;
    let param = *r.param();
    let degree = r.in_degree();
    let stationary = FuncRep::fit(|x| cdf_unchecked(&param, x), degree)?;
    let mut d = phi0.with_degree(degree).sub(&stationary);
    let mut phi = vec![stationary.lin_comb(1.0, &d, 1.0)];
    let mut deltas = vec![d.clone()];
    let mut mass_defects = Vec::with_capacity(n);
    for _ in 0..n {
        d = r.apply(&d)?.rep;
        let defect = d.at(1.0);
        mass_defects.push(defect);
        d = d.lin_comb(1.0, &stationary, -defect);
        phi.push(stationary.lin_comb(1.0, &d, 1.0));
        deltas.push(d.clone());
    }
    Ok(EvolutionTrace {
        p: param.p(),
        steps: n,
        grid: uniform_grid(DEFAULT_GRID),
        phi,
        delta: deltas,
        mass_defects,
    })
}

/// `phi_0, ..., phi_n` from `phi0`, represented at the given degree.
pub fn evolve_cdf(
    param: &MapParam,
    phi0: &FuncRep,
    n: usize,
    degree: usize,
    policy: &TruncationPolicy,
) -> Result<EvolutionTrace> {
    let r = OperatorMatrix::square(OperatorKind::CdfRecursion, param, degree, policy)?;
    evolve_cdf_with(&r, phi0, n)
}
