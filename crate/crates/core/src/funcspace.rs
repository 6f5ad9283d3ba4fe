//! Chebyshev representations of functions on `[0, 1]`.
//!
//! A [`FuncRep`] of degree `N` stores the coefficients of
//! `f(x) = sum_k c_k T_k(2x - 1)`, `k = 0..=N`. Fitting interpolates at the
//! `N + 1` Chebyshev–Lobatto points, which on `[0, 1]` are
//! `x_j = (1 - cos(pi j / N)) / 2`, listed in increasing order.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{GkwError, Result};

/// Default polynomial degree for fitted functions.
pub const DEFAULT_DEGREE: usize = 64;

/// Default size of the uniform grid used for sup-norms and oscillations.
pub const DEFAULT_GRID: usize = 1001;

/// The `n + 1` Chebyshev–Lobatto points on `[0, 1]`, increasing, with exact
/// endpoints.
pub fn lobatto_nodes(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![0.5];
    }
    let nf = n as f64;
    (0..=n)
        .map(|j| {
            // sin^2 form keeps full relative accuracy near both endpoints
            if 2 * j <= n {
                let s = (PI * j as f64 / (2.0 * nf)).sin();
                s * s
            } else {
                let s = (PI * (n - j) as f64 / (2.0 * nf)).sin();
                1.0 - s * s
            }
        })
        .collect()
}

/// Uniform grid of `n >= 2` points on `[0, 1]` including both endpoints.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least two points");
    let h = (n - 1) as f64;
    (0..n).map(|i| i as f64 / h).collect()
}

/// Matrix mapping values at the `n + 1` Lobatto nodes to Chebyshev
/// coefficients (a type-I discrete cosine transform).
pub fn values_to_coeffs_matrix(n: usize) -> DMatrix<f64> {
    if n == 0 {
        return DMatrix::from_element(1, 1, 1.0);
    }
    let nf = n as f64;
    DMatrix::from_fn(n + 1, n + 1, |k, j| {
        let mut w = 2.0 / nf;
        if j == 0 || j == n {
            w *= 0.5;
        }
        if k == 0 || k == n {
            w *= 0.5;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        // cos(pi k j / n) with the argument reduced modulo 2n
        let m = (k * j) % (2 * n);
        sign * w * (PI * m as f64 / nf).cos()
    })
}

/// Fill `out` with `T_0(s), ..., T_{len-1}(s)`.
#[inline]
pub(crate) fn chebyshev_row(s: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n == 1 {
        return;
    }
    out[1] = s;
    let two_s = 2.0 * s;
    for k in 2..n {
        out[k] = two_s * out[k - 1] - out[k - 2];
    }
}

#[inline]
fn clenshaw(coeffs: &[f64], s: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    let two_s = 2.0 * s;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + two_s * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + s * b1 - b2
}

/// A polynomial on `[0, 1]` in the Chebyshev basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FuncRep {
    coeffs: Vec<f64>,
}

impl FuncRep {
    /// Interpolate `f` at the `degree + 1` Lobatto nodes.
    pub fn fit<F: Fn(f64) -> f64>(f: F, degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(GkwError::InvalidDegree {
                degree,
                reason: "fitting needs at least degree 2",
            });
        }
        let values: Vec<f64> = lobatto_nodes(degree).into_iter().map(f).collect();
        Self::from_node_values(&values)
    }

    /// Build the interpolant from values at the Lobatto nodes of degree
    /// `values.len() - 1`.
    pub fn from_node_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(GkwError::InvalidDegree {
                degree: 0,
                reason: "no sample values",
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GkwError::NonFinite { what: "fit" });
        }
        let n = values.len() - 1;
        let t = values_to_coeffs_matrix(n);
        let v = nalgebra::DVector::from_column_slice(values);
        Ok(Self {
            coeffs: (t * v).as_slice().to_vec(),
        })
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(GkwError::InvalidDegree {
                degree: 0,
                reason: "empty coefficient vector",
            });
        }
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(GkwError::NonFinite {
                what: "from_coeffs",
            });
        }
        Ok(Self { coeffs })
    }

    pub fn constant(value: f64, degree: usize) -> Self {
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        Self::constant(0.0, degree)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Evaluate at `x` in `[0, 1]`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(GkwError::NonFinite { what: "eval" });
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(GkwError::Domain {
                what: "eval",
                value: x,
                domain: "[0, 1]",
            });
        }
        Ok(self.at(x))
    }

    /// Evaluate without a domain check.
    #[inline]
    pub fn at(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs, 2.0 * x - 1.0)
    }

    /// Values at the Lobatto nodes of this representation's degree.
    pub fn node_values(&self) -> Vec<f64> {
        lobatto_nodes(self.degree())
            .into_iter()
            .map(|x| self.at(x))
            .collect()
    }

    /// Values on an arbitrary set of abscissae (unchecked).
    pub fn values_on(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.at(x)).collect()
    }

    /// `f'` as a representation of degree `N - 1`; a constant differentiates
    /// to the zero function.
    pub fn derivative(&self) -> Self {
        let n = self.degree();
        if n == 0 {
            return Self::zero(0);
        }
        let c = &self.coeffs;
        let mut d = vec![0.0; n + 2];
        for k in (1..=n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * c[k];
        }
        d[0] *= 0.5;
        d.truncate(n);
        // d/dx = 2 d/ds
        d.iter_mut().for_each(|v| *v *= 2.0);
        Self { coeffs: d }
    }

    /// The antiderivative vanishing at `x = 0`, of degree `N + 1`.
    pub fn antiderivative(&self) -> Self {
        let n = self.degree();
        let c = |j: usize| self.coeffs.get(j).copied().unwrap_or(0.0);
        let mut a = vec![0.0; n + 2];
        a[1] = c(0) - 0.5 * c(2);
        for k in 2..=n + 1 {
            a[k] = (c(k - 1) - c(k + 1)) / (2.0 * k as f64);
        }
        // dx = ds / 2
        a.iter_mut().skip(1).for_each(|v| *v *= 0.5);
        let at_zero: f64 = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, v)| if k % 2 == 0 { *v } else { -*v })
            .sum();
        a[0] = -at_zero;
        Self { coeffs: a }
    }

    /// `int_0^1 f`, the Clenshaw–Curtis value for the interpolant.
    pub fn integral(&self) -> f64 {
        // int_{-1}^{1} T_k = 2/(1-k^2) for even k, 0 for odd k; halve for [0, 1]
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .map(|(k, c)| c / (1.0 - (k * k) as f64))
            .sum()
    }

    /// `max - min` over a uniform grid of `grid_size` points.
    pub fn osc(&self, grid_size: usize) -> f64 {
        let (lo, hi) = uniform_grid(grid_size)
            .into_iter()
            .map(|x| self.at(x))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        hi - lo
    }

    /// `max |f|` over a uniform grid of `grid_size` points.
    pub fn sup_norm(&self, grid_size: usize) -> f64 {
        uniform_grid(grid_size)
            .into_iter()
            .map(|x| self.at(x).abs())
            .fold(0.0, f64::max)
    }

    /// Largest of the last three coefficients relative to the largest
    /// coefficient; small values mean the function is resolved.
    pub fn tail_ratio(&self) -> f64 {
        let max = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if max == 0.0 {
            return 0.0;
        }
        let n = self.coeffs.len();
        let tail = self.coeffs[n.saturating_sub(3)..]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()));
        tail / max
    }

    /// Pad with zeros or truncate to the given degree.
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(degree + 1, 0.0);
        Self { coeffs }
    }

    /// `alpha * self + beta * other`, at the larger of the two degrees.
    pub fn lin_comb(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                alpha * self.coeffs.get(k).copied().unwrap_or(0.0)
                    + beta * other.coeffs.get(k).copied().unwrap_or(0.0)
            })
            .collect();
        Self { coeffs }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| alpha * c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lin_comb(1.0, other, -1.0)
    }
}

/// Clenshaw–Curtis quadrature of `f` over `[a, b]` with `degree + 1` points.
pub fn clenshaw_curtis<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, degree: usize) -> Result<f64> {
    if b == a {
        return Ok(0.0);
    }
    let w = b - a;
    let rep = FuncRep::fit(|t| f(a + w * t), degree)?;
    Ok(w * rep.integral())
}
