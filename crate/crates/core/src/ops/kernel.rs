//! Summands of the operator series, written as linear combinations of point
//! evaluations of `f` (and of its antiderivative `F`) at the preimage points
//! `p / (t + x)`.
//!
//! Every series here has the shape `sum_{k >= p} S(k)` where `S(t)` is
//! analytic in `u = 1/t` near `u = 0`. The explicit part sums `k = p..=K` in
//! ascending order. The remainder uses the midpoint Euler–Maclaurin form
//!
//! ```text
//! sum_{k>K} S(k) = int_{K+1/2}^inf S(t) dt + S'(K+1/2)/24 + O(S'''(K))
//! ```
//!
//! with the integral computed by Gauss–Legendre in `u` on `(0, 1/(K + 1/2)]`
//! and `S'(K+1/2)` replaced by the central difference `S(K+1) - S(K)`.
//!
//! Differences `f(y1) - f(y2)` of nearby preimages are never formed by
//! subtraction: with `y1 - y2 ~ p/k^2`, adding `T_j(y1)` and `-T_j(y2)` to the
//! same row would leave `K * eps` of rounding in every entry. Instead the
//! difference row `T_j(s1) - T_j(s2)` is propagated by its own recurrence from
//! the exactly computed gap `y1 - y2`.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::funcspace::chebyshev_row;

/// `out[j] = T_j(s1) - T_j(s2)` given `ds = s1 - s2`, without cancellation:
/// `d_{j+1} = 2 ds T_j(s1) + 2 s2 d_j - d_{j-1}`.
fn chebyshev_diff_row(s1: f64, s2: f64, ds: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = 0.0;
    if n == 1 {
        return;
    }
    out[1] = ds;
    let (mut t_prev, mut t) = (1.0, s1);
    for j in 1..n - 1 {
        out[j + 1] = 2.0 * ds * t + 2.0 * s2 * out[j] - out[j - 1];
        let t_next = 2.0 * s1 * t - t_prev;
        t_prev = t;
        t = t_next;
    }
}

use super::OperatorKind;

const TAIL_NODES: usize = 12;

/// Accumulates, for one output abscissa, the Chebyshev rows of all point
/// functionals hit by the series.
pub(crate) struct RowAccum {
    /// Weights on `T_j(2y - 1)` for evaluations of `f` (length `N + 1`).
    pub point: Vec<f64>,
    /// Weights on `T_j(2y - 1)` for evaluations of `F` (length `N + 2`).
    pub anti: Vec<f64>,
    scratch: Vec<f64>,
}

impl RowAccum {
    pub fn new(in_degree: usize) -> Self {
        Self {
            point: vec![0.0; in_degree + 1],
            anti: vec![0.0; in_degree + 2],
            scratch: vec![0.0; in_degree + 2],
        }
    }

    #[inline]
    fn point(&mut self, y: f64, w: f64) {
        let n = self.point.len();
        chebyshev_row(2.0 * y - 1.0, &mut self.scratch[..n]);
        for (a, r) in self.point.iter_mut().zip(&self.scratch[..n]) {
            *a += w * r;
        }
    }

    /// `w (f(y1) - f(y2))` with `dy = y1 - y2` supplied by the caller.
    #[inline]
    fn point_diff(&mut self, y1: f64, y2: f64, dy: f64, w: f64) {
        let n = self.point.len();
        chebyshev_diff_row(
            2.0 * y1 - 1.0,
            2.0 * y2 - 1.0,
            2.0 * dy,
            &mut self.scratch[..n],
        );
        for (a, r) in self.point.iter_mut().zip(&self.scratch[..n]) {
            *a += w * r;
        }
    }

    /// `w (F(y1) - F(y2))` for the antiderivative `F`.
    #[inline]
    fn anti_diff(&mut self, y1: f64, y2: f64, dy: f64, w: f64) {
        chebyshev_diff_row(2.0 * y1 - 1.0, 2.0 * y2 - 1.0, 2.0 * dy, &mut self.scratch);
        for (a, r) in self.anti.iter_mut().zip(&self.scratch) {
            *a += w * r;
        }
    }
}

impl OperatorKind {
    pub(crate) fn uses_antiderivative(self) -> bool {
        matches!(self, OperatorKind::V)
    }

    /// Contributions outside the series.
    fn head(self, _x: f64, acc: &mut RowAccum) {
        if let OperatorKind::U = self {
            acc.point(0.0, 1.0);
        }
    }

    /// `scale * S(t)` for output abscissa `x`.
    #[inline]
    fn term(self, p: f64, x: f64, t: f64, scale: f64, acc: &mut RowAccum) {
        match self {
            OperatorKind::Gkw => {
                let tx = t + x;
                acc.point(p / tx, scale * p / (tx * tx));
            }
            OperatorKind::U => {
                // (t+1-p)/(t+1+x) * (g(p/(t+x)) - g(p/(t+1+x)))
                let tx = t + x;
                let tx1 = t + 1.0 + x;
                let w = scale * (t + 1.0 - p) / tx1;
                acc.point_diff(p / tx, p / tx1, p / (tx * tx1), w);
            }
            OperatorKind::V => {
                let tx = t + x;
                let tx1 = t + 1.0 + x;
                let a = scale * (t + 1.0 - p) / (tx1 * tx1);
                let h = (p + x) / (tx * tx1);
                let b = scale * p * h / (tx * tx);
                acc.point(p / tx, b);
                acc.anti_diff(p / tx, p / tx1, p / (tx * tx1), a);
            }
            OperatorKind::CdfRecursion => {
                // phi(p/t) - phi(p/(t+x)); identically zero at x = 0
                if x != 0.0 {
                    acc.point_diff(p / t, p / (t + x), p * x / (t * (t + x)), scale);
                }
            }
        }
    }

    /// Accumulate the full (truncated, optionally tail-corrected) series at `x`.
    pub(crate) fn accumulate(
        self,
        p: u32,
        x: f64,
        cutoff: usize,
        tail: Option<&TailRule>,
        acc: &mut RowAccum,
    ) {
        let pf = f64::from(p);
        self.head(x, acc);
        for k in (p as usize)..=cutoff {
            self.term(pf, x, k as f64, 1.0, acc);
        }
        if let Some(rule) = tail {
            for &(t, w) in &rule.points {
                self.term(pf, x, t, w, acc);
            }
        }
    }
}

/// Points `(t_i, w_i)` with `sum_i w_i S(t_i) ~ sum_{k>K} S(k)`.
pub(crate) struct TailRule {
    points: Vec<(f64, f64)>,
}

impl TailRule {
    pub fn new(cutoff: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(TAIL_NODES).expect("nonzero"));
        let u_max = 1.0 / (cutoff as f64 + 0.5);
        let half = 0.5 * u_max;
        let points = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(xi, wi)| {
                let u = half * (xi + 1.0);
                (1.0 / u, wi * half / (u * u))
            })
            .chain([
                (cutoff as f64 + 1.0, 1.0 / 24.0),
                (cutoff as f64, -1.0 / 24.0),
            ])
            .collect();
        Self { points }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_rows_match_direct_rows() {
        let (s1, s2) = (0.3, -0.45);
        let mut d = vec![0.0; 20];
        let mut r1 = vec![0.0; 20];
        let mut r2 = vec![0.0; 20];
        chebyshev_diff_row(s1, s2, s1 - s2, &mut d);
        chebyshev_row(s1, &mut r1);
        chebyshev_row(s2, &mut r2);
        for j in 0..20 {
            assert!((d[j] - (r1[j] - r2[j])).abs() < 1e-13);
        }
    }

    #[test]
    fn difference_rows_keep_relative_accuracy() {
        // T_j(cos a) - T_j(cos b) = -2 sin(j(a+b)/2) sin(j(a-b)/2)
        let (a, b): (f64, f64) = (3.0, 3.0 + 1e-9);
        let mut d = vec![0.0; 40];
        chebyshev_diff_row(
            a.cos(),
            b.cos(),
            -2.0 * ((a + b) / 2.0).sin() * ((a - b) / 2.0).sin(),
            &mut d,
        );
        for (j, dj) in d.iter().enumerate().skip(1) {
            let jf = j as f64;
            let exact = -2.0 * (jf * (a + b) / 2.0).sin() * (jf * (a - b) / 2.0).sin();
            assert!(
                (dj - exact).abs() <= 1e-12 * exact.abs() * jf,
                "{j}: {dj} vs {exact}"
            );
        }
    }

    #[test]
    fn tail_quadrature_integrates_inverse_powers() {
        // int_{K+1/2}^inf t^-2 dt = 1/(K+1/2); t^-3 -> 1/(2 (K+1/2)^2)
        for k in [3usize, 50, 10_000] {
            let r = TailRule::new(k);
            let a = k as f64 + 0.5;
            let quad = &r.points[..TAIL_NODES];
            let s2: f64 = quad.iter().map(|(t, w)| w / (t * t)).sum();
            let s3: f64 = quad.iter().map(|(t, w)| w / (t * t * t)).sum();
            assert!((s2 * a - 1.0).abs() < 1e-14);
            assert!((s3 * 2.0 * a * a - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn tail_of_inverse_squares() {
        for k in [100usize, 10_000] {
            let r = TailRule::new(k);
            let approx: f64 = r.points.iter().map(|(t, w)| w / (t * t)).sum();
            let m = crate::gauss::MapParam::new(k as u32 + 1).unwrap();
            let exact = crate::gauss::hurwitz_zeta(2, &m).unwrap();
            // leftover error is O(S'''(K)) = O(K^-5), down to rounding
            let bound = (10.0 / (k as f64).powi(5)).max(1e-14 * exact);
            assert!((approx - exact).abs() < bound, "{k}: {}", approx - exact);
        }
    }
}
