//! Eigenvalues of the collocation matrix of `G_p`.
//!
//! The leading two are `1` and `-lambda_p`. Further down the list the values
//! are compared with `(-1)^{n-1} p^{-n} phi_p^{2n}`; that comparison is a
//! probe, not a check.

use nalgebra::linalg::Schur;

use crate::error::{GkwError, Result};
use crate::gauss::MapParam;
use crate::ops::{OperatorKind, OperatorMatrix, TruncationPolicy};

const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub p: u32,
    pub dim: usize,
    /// Real parts, ordered by decreasing modulus.
    pub eigenvalues: Vec<f64>,
    /// Imaginary parts, same order.
    pub imag: Vec<f64>,
    /// `false` for eigenvalues below `10 eps |M|`.
    pub reliable: Vec<bool>,
    /// `Lambda(n) / ((-1)^{n-1} p^{-n} phi_p^{2n})` for `n <= dim/4`, reliable only.
    pub conjecture_ratios: Vec<f64>,
}

impl SpectrumResult {
    /// `Lambda(n)` with 1-based `n`.
    pub fn nth(&self, n: usize) -> Option<f64> {
        self.eigenvalues.get(n.checked_sub(1)?).copied()
    }
}

pub fn spectrum_collocation(
    param: &MapParam,
    dim: usize,
    policy: &TruncationPolicy,
) -> Result<SpectrumResult> {
    if dim < 8 {
        return Err(GkwError::InvalidDegree {
            degree: dim,
            reason: "collocation spectrum needs dim >= 8",
        });
    }
    let op = OperatorMatrix::square(OperatorKind::Gkw, param, dim - 1, policy)?;
    let m = op.matrix().clone();
    let norm = m.norm();
    let schur = Schur::try_new(m, f64::EPSILON, SCHUR_MAX_ITER).ok_or(GkwError::NotConverged {
        what: "Schur decomposition",
        iterations: SCHUR_MAX_ITER,
    })?;
    let mut eig: Vec<(f64, f64)> = schur
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect();
    eig.sort_by(|a, b| b.0.hypot(b.1).total_cmp(&a.0.hypot(a.1)));

    let cutoff = 10.0 * f64::EPSILON * norm;
    let reliable: Vec<bool> = eig.iter().map(|e| e.0.hypot(e.1) >= cutoff).collect();
    let p = param.pf();
    let phi2 = param.fixed_point().powi(2);
    let conjecture_ratios = (1..=dim / 4)
        .take_while(|&n| reliable[n - 1])
        .map(|n| {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            let model = sign * (phi2 / p).powi(n as i32);
            eig[n - 1].0 / model
        })
        .collect();
    Ok(SpectrumResult {
        p: param.p(),
        dim,
        eigenvalues: eig.iter().map(|e| e.0).collect(),
        imag: eig.iter().map(|e| e.1).collect(),
        reliable,
        conjecture_ratios,
    })
}
