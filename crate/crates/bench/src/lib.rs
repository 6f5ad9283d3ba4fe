//! Shared fixtures for the criterion benches.

use gkw_core::spectral::xi;
use gkw_core::{FuncRep, MapParam, OperatorKind, OperatorMatrix, TruncationPolicy};

pub fn param(p: u32) -> MapParam {
    MapParam::new(p).expect("p >= 1")
}

/// `xi = 1/(p+1/3+x)^2` at the given degree, a typical smooth positive input.
pub fn smooth_input(param: &MapParam, degree: usize) -> FuncRep {
    FuncRep::fit(|x| xi(param, x), degree).expect("degree >= 2")
}

pub fn operator(
    kind: OperatorKind,
    param: &MapParam,
    degree: usize,
    cutoff: usize,
) -> OperatorMatrix {
    OperatorMatrix::square(kind, param, degree, &TruncationPolicy::with_cutoff(cutoff))
        .expect("valid policy")
}
