//! The transfer operator `G_p` and the conjugated operators `U` and `V`.
//!
//! ```text
//! (G f)(x) = sum_{k>=p} p/(k+x)^2 f(p/(k+x))
//! (U g)(x) = g(0) + sum_{k>=p} (k+1-p)/(k+1+x) (g(p/(k+x)) - g(p/(k+1+x)))
//! (V f)(x) = sum_{k>=p} (k+1-p)/(k+1+x)^2 int_{p/(k+1+x)}^{p/(k+x)} f
//!                      + p h_k(x)/(k+x)^2 f(p/(k+x)),
//!            h_k(x) = (p+x)/((k+x)(k+1+x))
//! ```
//!
//! `U` acts on `g = (p+x) phi'` and `V` on derivatives; `(U g)' = -V g'`.
//! The distribution-function recursion
//! `(R phi)(x) = sum_{k>=p} phi(p/k) - phi(p/(k+x))` is discretized by the same
//! machinery.
//!
//! Each operator is assembled once into an [`OperatorMatrix`] acting on
//! Chebyshev coefficients; images are re-fitted at the Lobatto nodes of the
//! output degree.

mod kernel;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{GkwError, Result};
use crate::funcspace::{lobatto_nodes, values_to_coeffs_matrix, FuncRep};
use crate::gauss::MapParam;

use kernel::{RowAccum, TailRule};

/// Default series cutoff `K`.
pub const DEFAULT_CUTOFF: usize = 10_000;

/// Default tolerance for resolution and tail diagnostics.
pub const DEFAULT_TARGET_TOL: f64 = 1e-10;

/// How the infinite series are cut off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Last explicitly summed index `K`.
    pub cutoff: usize,
    /// Add the integral estimate of the remainder `k > K`.
    pub tail_correction: bool,
    /// Threshold for the under-resolution and tail-control diagnostics.
    pub target_tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
            tail_correction: true,
            target_tol: DEFAULT_TARGET_TOL,
        }
    }
}

impl TruncationPolicy {
    pub fn with_cutoff(cutoff: usize) -> Self {
        Self {
            cutoff,
            ..Self::default()
        }
    }

    pub fn validate(&self, param: &MapParam) -> Result<()> {
        let min = param.p() as usize + 1;
        if self.cutoff < min {
            return Err(GkwError::InvalidCutoff {
                cutoff: self.cutoff,
                min,
            });
        }
        if !(self.target_tol > 0.0 && self.target_tol.is_finite()) {
            return Err(GkwError::InvalidInput(format!(
                "target tolerance must be positive, got {}",
                self.target_tol
            )));
        }
        Ok(())
    }
}

/// Which series an [`OperatorMatrix`] discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// The transfer operator `G_p`.
    Gkw,
    /// `U`, in the telescoped form.
    U,
    /// `V`, with inner integrals taken from the spectral antiderivative.
    V,
    /// The distribution-function recursion `phi_n -> phi_{n+1}`.
    CdfRecursion,
}

/// An operator image together with its resolution diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub rep: FuncRep,
    /// [`FuncRep::tail_ratio`] of the image.
    pub tail_ratio: f64,
    /// `tail_ratio` exceeded the policy's target tolerance.
    pub under_resolved: bool,
}

impl Applied {
    pub fn into_rep(self) -> FuncRep {
        self.rep
    }
}

/// A discretized operator: Chebyshev coefficients of degree `in_degree` to
/// Chebyshev coefficients of degree `out_degree`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    kind: OperatorKind,
    param: MapParam,
    policy: TruncationPolicy,
    in_degree: usize,
    out_degree: usize,
    matrix: DMatrix<f64>,
}

/// Coefficient map `f -> F` (antiderivative vanishing at 0), `(N+2) x (N+1)`.
fn antiderivative_matrix(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n + 2, n + 1);
    for j in 0..=n {
        let mut e = vec![0.0; n + 1];
        e[j] = 1.0;
        let a = FuncRep::from_coeffs(e)
            .expect("unit vector")
            .antiderivative();
        for (i, v) in a.coeffs().iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    m
}

impl OperatorMatrix {
    pub fn assemble(
        kind: OperatorKind,
        param: &MapParam,
        in_degree: usize,
        out_degree: usize,
        policy: &TruncationPolicy,
    ) -> Result<Self> {
        policy.validate(param)?;
        if out_degree == 0 {
            return Err(GkwError::InvalidDegree {
                degree: out_degree,
                reason: "operator images need degree >= 1",
            });
        }
        let tail = policy.tail_correction.then(|| TailRule::new(policy.cutoff));
        let nodes = lobatto_nodes(out_degree);
        let p = param.p();

        let rows: Vec<RowAccum> = nodes
            .par_iter()
            .map(|&x| {
                let mut acc = RowAccum::new(in_degree);
                kind.accumulate(p, x, policy.cutoff, tail.as_ref(), &mut acc);
                acc
            })
            .collect();

        // node values as a function of input coefficients
        let mut values = DMatrix::zeros(out_degree + 1, in_degree + 1);
        let int = kind
            .uses_antiderivative()
            .then(|| antiderivative_matrix(in_degree));
        for (i, acc) in rows.iter().enumerate() {
            let mut row = DVector::from_column_slice(&acc.point);
            if let Some(int) = &int {
                row += int.tr_mul(&DVector::from_column_slice(&acc.anti));
            }
            values.set_row(i, &row.transpose());
        }
        let matrix = values_to_coeffs_matrix(out_degree) * values;
        Ok(Self {
            kind,
            param: *param,
            policy: *policy,
            in_degree,
            out_degree,
            matrix,
        })
    }

    /// Square operator on representations of the given degree.
    pub fn square(
        kind: OperatorKind,
        param: &MapParam,
        degree: usize,
        policy: &TruncationPolicy,
    ) -> Result<Self> {
        Self::assemble(kind, param, degree, degree, policy)
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn param(&self) -> &MapParam {
        &self.param
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    pub fn in_degree(&self) -> usize {
        self.in_degree
    }

    pub fn out_degree(&self) -> usize {
        self.out_degree
    }

    /// The coefficient-space matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Apply to a raw coefficient vector of length `in_degree + 1`.
    pub fn apply_coeffs(&self, coeffs: &[f64]) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.in_degree + 1);
        let v = DVector::from_column_slice(coeffs);
        (&self.matrix * v).as_slice().to_vec()
    }

    /// Apply to `f`; inputs of lower degree are zero-padded.
    pub fn apply(&self, f: &FuncRep) -> Result<Applied> {
        if f.degree() > self.in_degree {
            return Err(GkwError::DegreeMismatch {
                expected: self.in_degree,
                got: f.degree(),
            });
        }
        let padded = f.with_degree(self.in_degree);
        let rep = FuncRep::from_coeffs(self.apply_coeffs(padded.coeffs()))?;
        let tail_ratio = rep.tail_ratio();
        Ok(Applied {
            under_resolved: tail_ratio > self.policy.target_tol,
            tail_ratio,
            rep,
        })
    }
}

fn apply_once(
    kind: OperatorKind,
    param: &MapParam,
    f: &FuncRep,
    policy: &TruncationPolicy,
) -> Result<Applied> {
    OperatorMatrix::square(kind, param, f.degree(), policy)?.apply(f)
}

/// `G_p f`, fitted at the input's degree.
pub fn apply_gkw(param: &MapParam, f: &FuncRep, policy: &TruncationPolicy) -> Result<Applied> {
    apply_once(OperatorKind::Gkw, param, f, policy)
}

/// `U g`, fitted at the input's degree.
pub fn apply_u(param: &MapParam, g: &FuncRep, policy: &TruncationPolicy) -> Result<Applied> {
    apply_once(OperatorKind::U, param, g, policy)
}

/// `V f` by direct summation of its series, fitted at the input's degree.
pub fn apply_v(param: &MapParam, f: &FuncRep, policy: &TruncationPolicy) -> Result<Applied> {
    apply_once(OperatorKind::V, param, f, policy)
}

/// `V f` computed as `-(U F)'` with `F` the antiderivative of `f`.
pub fn apply_v_via_u(param: &MapParam, f: &FuncRep, policy: &TruncationPolicy) -> Result<Applied> {
    let big = f.antiderivative();
    let ug = apply_u(param, &big, policy)?;
    let rep = ug.rep.derivative().scale(-1.0);
    let tail_ratio = rep.tail_ratio();
    Ok(Applied {
        under_resolved: ug.under_resolved || tail_ratio > policy.target_tol,
        tail_ratio,
        rep,
    })
}
