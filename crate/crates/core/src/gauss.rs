//! The map `T_p(x) = {p/x}`, its digit expansion and invariant measure, and
//! the scalar constants that depend only on `p`.

use crate::error::{GkwError, Result};

/// Arguments below this are rejected by [`apply_map`]: `p/x` would leave the
/// range where the fractional part carries any information.
pub const MIN_MAP_ARGUMENT: f64 = 1e-300;

/// Number of explicitly summed terms in [`hurwitz_zeta`].
const ZETA_EXPLICIT_TERMS: u64 = 10_000;

/// The integer parameter `p >= 1` together with the constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParam {
    p: u32,
    log_norm: f64,
    fixed_point: f64,
}

impl MapParam {
    pub fn new(p: u32) -> Result<Self> {
        if p == 0 {
            return Err(GkwError::InvalidParam(p));
        }
        let pf = f64::from(p);
        // ln(p+1) - ln(p) without cancellation for large p.
        let log_norm = (1.0 / pf).ln_1p();
        // (sqrt(p^2 + 4p) - p) / 2, rewritten to avoid cancellation.
        let fixed_point = 2.0 * pf / ((pf * pf + 4.0 * pf).sqrt() + pf);
        Ok(Self {
            p,
            log_norm,
            fixed_point,
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// `p` as a float, for formulas.
    #[inline]
    pub fn pf(&self) -> f64 {
        f64::from(self.p)
    }

    /// `ln(p+1) - ln(p)`, the normalizer of the invariant density.
    #[inline]
    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// The fixed point of `T_p` in `(0, 1)`: the positive root of `x = p/(p+x)`.
    #[inline]
    pub fn fixed_point(&self) -> f64 {
        self.fixed_point
    }
}

/// Digits `a_i = floor(p / x_{i-1})` of a `T_p` orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitSeq {
    pub p: u32,
    pub digits: Vec<u64>,
}

impl DigitSeq {
    /// Value of the finite continued fraction `p/(a_1 + p/(a_2 + ... p/a_n))`.
    pub fn value(&self) -> f64 {
        let p = f64::from(self.p);
        self.digits
            .iter()
            .rev()
            .fold(0.0, |tail, &a| p / (a as f64 + tail))
    }
}

fn check_unit(what: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(GkwError::NonFinite { what });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(GkwError::Domain {
            what,
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(())
}

/// `T_p(x)`: zero at zero, otherwise the fractional part of `p/x`.
pub fn apply_map(param: &MapParam, x: f64) -> Result<f64> {
    check_unit("apply_map", x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < MIN_MAP_ARGUMENT {
        return Err(GkwError::Domain {
            what: "apply_map",
            value: x,
            domain: "{0} or [1e-300, 1]",
        });
    }
    Ok(map_unchecked(param.pf(), x))
}

/// `T_p` without argument validation; used in the sampling hot loop.
#[inline]
pub(crate) fn map_unchecked(p: f64, x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        let q = p / x;
        q - q.floor()
    }
}

/// The first `n` digits of the orbit of `x`. The sequence is shorter than `n`
/// if the orbit lands exactly on zero.
pub fn digits(param: &MapParam, x: f64, n: usize) -> Result<DigitSeq> {
    check_unit("digits", x)?;
    if x == 0.0 {
        return Err(GkwError::Domain {
            what: "digits",
            value: x,
            domain: "(0, 1]",
        });
    }
    let p = param.pf();
    let mut out = Vec::with_capacity(n);
    let mut cur = x;
    for _ in 0..n {
        if cur == 0.0 {
            break;
        }
        let q = p / cur;
        let a = q.floor();
        out.push(a as u64);
        cur = q - a;
    }
    Ok(DigitSeq {
        p: param.p(),
        digits: out,
    })
}

/// Distribution function of the invariant measure, `Phi_p(x) = mu_p([0, x])`.
pub fn stationary_cdf(param: &MapParam, x: f64) -> Result<f64> {
    check_unit("stationary_cdf", x)?;
    Ok(cdf_unchecked(param, x))
}

#[inline]
pub(crate) fn cdf_unchecked(param: &MapParam, x: f64) -> f64 {
    (x / param.pf()).ln_1p() / param.log_norm()
}

/// Density of the invariant measure, `eta_p(x) = 1 / ((ln(p+1) - ln p)(p + x))`.
pub fn stationary_density(param: &MapParam, x: f64) -> Result<f64> {
    check_unit("stationary_density", x)?;
    Ok(density_unchecked(param, x))
}

#[inline]
pub(crate) fn density_unchecked(param: &MapParam, x: f64) -> f64 {
    1.0 / (param.log_norm() * (param.pf() + x))
}

/// Hurwitz zeta `zeta(s, p) = sum_{k >= p} k^{-s}` for `s` in `{2, 3}`.
///
/// The first 10^4 terms are summed explicitly (smallest first); the rest is an
/// Euler–Maclaurin tail carrying the `B_2` and `B_4` corrections, which leaves
/// an error far below `1e-14`.
pub fn hurwitz_zeta(s: u32, param: &MapParam) -> Result<f64> {
    if s != 2 && s != 3 {
        return Err(GkwError::UnsupportedOrder(s));
    }
    let si = s as i32;
    let start = u64::from(param.p());
    let end = start + ZETA_EXPLICIT_TERMS;

    let a = end as f64;
    let sf = f64::from(s);
    let tail = a.powi(1 - si) / (sf - 1.0) + 0.5 * a.powi(-si) + sf / 12.0 * a.powi(-si - 1)
        - sf * (sf + 1.0) * (sf + 2.0) / 720.0 * a.powi(-si - 3);

    let head: f64 = (start..end).rev().map(|k| (k as f64).powi(-si)).sum();
    Ok(tail + head)
}

/// The Kuzmin–Lévy type rate `Q_p = 2 p^2 zeta(3, p) - p zeta(2, p)`.
pub fn kuzmin_rate(param: &MapParam) -> f64 {
    let p = param.pf();
    let z3 = hurwitz_zeta(3, param).expect("order 3 supported");
    let z2 = hurwitz_zeta(2, param).expect("order 2 supported");
    2.0 * p * p * z3 - p * z2
}

/// The closed-form upper bound `1/(2p) + 3/(8p^2)` on `Q_p`, valid for `p >= 2`.
pub fn kuzmin_rate_bound(param: &MapParam) -> f64 {
    let p = param.pf();
    1.0 / (2.0 * p) + 3.0 / (8.0 * p * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn mp(p: u32) -> MapParam {
        MapParam::new(p).unwrap()
    }

    #[test]
    fn param_invariants() {
        assert!(MapParam::new(0).is_err());
        for p in 1..200 {
            let m = mp(p);
            let phi = m.fixed_point();
            assert!(phi > 0.0 && phi < 1.0);
            assert_abs_diff_eq!(phi, m.pf() / (m.pf() + phi), epsilon = 4.0 * f64::EPSILON);
            assert!(m.log_norm() > 0.0);
        }
    }

    #[test]
    fn map_examples() {
        let m = mp(2);
        assert_eq!(apply_map(&m, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(apply_map(&m, 0.8).unwrap(), 0.5, epsilon = 1e-15);
        let fp = 3f64.sqrt() - 1.0;
        assert!((apply_map(&m, fp).unwrap() - fp).abs() < 1e-14);
    }

    #[test]
    fn map_domain_errors() {
        let m = mp(2);
        assert!(apply_map(&m, -0.1).is_err());
        assert!(apply_map(&m, 1.5).is_err());
        assert!(apply_map(&m, f64::NAN).is_err());
        assert!(apply_map(&m, f64::INFINITY).is_err());
        assert!(apply_map(&m, 1e-301).is_err());
        assert!(apply_map(&m, 1e-300).is_ok());
    }

    #[test]
    fn digit_examples() {
        assert_eq!(
            digits(&mp(2), 3f64.sqrt() - 1.0, 3).unwrap().digits,
            vec![2, 2, 2]
        );
        assert_eq!(
            digits(&mp(1), (5f64.sqrt() - 1.0) / 2.0, 3).unwrap().digits,
            vec![1, 1, 1]
        );
        assert_eq!(digits(&mp(3), 1.0, 1).unwrap().digits, vec![3]);
        // orbit hits zero after one step
        assert_eq!(digits(&mp(3), 1.0, 5).unwrap().digits, vec![3]);
        assert!(digits(&mp(3), 0.0, 1).is_err());
    }

    #[test]
    fn cdf_and_density_examples() {
        let m2 = mp(2);
        assert_eq!(stationary_cdf(&m2, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(stationary_cdf(&m2, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        let oracle = 1.25f64.ln() / 1.5f64.ln();
        assert_abs_diff_eq!(stationary_cdf(&m2, 0.5).unwrap(), oracle, epsilon = 1e-15);
        assert_abs_diff_eq!(oracle, 0.5503397, epsilon = 1e-7);

        assert_abs_diff_eq!(
            stationary_density(&mp(1), 0.0).unwrap(),
            1.0 / 2f64.ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            stationary_density(&m2, 1.0).unwrap(),
            1.0 / (3.0 * 1.5f64.ln()),
            epsilon = 1e-15
        );
        assert!(stationary_cdf(&m2, 1.01).is_err());
        assert!(stationary_density(&m2, -0.01).is_err());
    }

    #[test]
    fn density_is_derivative_of_cdf() {
        let h = 1e-6;
        for p in [1, 2, 7, 40] {
            let m = mp(p);
            for i in 0..=1000 {
                let x = f64::from(i) / 1000.0;
                let (lo, hi) = ((x - h).max(0.0), (x + h).min(1.0));
                let fd = (cdf_unchecked(&m, hi) - cdf_unchecked(&m, lo)) / (hi - lo);
                assert!((fd - density_unchecked(&m, x)).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn density_integrates_to_one() {
        for p in [1, 2, 5] {
            let m = mp(p);
            // composite Simpson as an independent check
            let n = 2000;
            let h = 1.0 / n as f64;
            let s: f64 = (0..=n)
                .map(|i| {
                    let w = if i == 0 || i == n {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    w * density_unchecked(&m, i as f64 * h)
                })
                .sum();
            assert_abs_diff_eq!(s * h / 3.0, 1.0, epsilon = 1e-12);
        }
    }

    /// Brute-force partial sum up to `m` plus the midpoint of the integral
    /// tail bracket `[1/((s-1)(m+1)^(s-1)), 1/((s-1) m^(s-1))]`.
    fn zeta_oracle(s: i32, p: u64, m: u64) -> f64 {
        let head: f64 = (p..=m).rev().map(|k| (k as f64).powi(-s)).sum();
        let sf = f64::from(s);
        let lo = (m as f64 + 1.0).powi(1 - s) / (sf - 1.0);
        let hi = (m as f64).powi(1 - s) / (sf - 1.0);
        head + 0.5 * (lo + hi)
    }

    #[test]
    fn zeta_examples() {
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        let apery = 1.202_056_903_159_594_3;
        assert_abs_diff_eq!(hurwitz_zeta(2, &mp(1)).unwrap(), pi2_6, epsilon = 1e-14);
        assert_abs_diff_eq!(hurwitz_zeta(3, &mp(1)).unwrap(), apery, epsilon = 1e-14);
        assert_abs_diff_eq!(
            hurwitz_zeta(2, &mp(2)).unwrap(),
            pi2_6 - 1.0,
            epsilon = 1e-14
        );
        assert!(hurwitz_zeta(4, &mp(1)).is_err());
    }

    #[test]
    fn zeta_matches_brute_force() {
        // Oracle bracket width is 1/m^2 for s = 2; m = 10^8 pins it below 1e-16.
        let m = 100_000_000;
        for p in [1u64, 3] {
            let z = hurwitz_zeta(2, &mp(p as u32)).unwrap();
            assert_abs_diff_eq!(z, zeta_oracle(2, p, m), epsilon = 1e-14);
        }
        let m3 = 1_000_000;
        for p in [1u64, 2, 17] {
            let z = hurwitz_zeta(3, &mp(p as u32)).unwrap();
            assert_abs_diff_eq!(z, zeta_oracle(3, p, m3), epsilon = 1e-14);
        }
    }

    #[test]
    fn kuzmin_rate_examples() {
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        let apery = 1.202_056_903_159_594_3;
        let q1 = kuzmin_rate(&mp(1));
        assert_abs_diff_eq!(q1, 2.0 * apery - pi2_6, epsilon = 1e-13);
        assert_abs_diff_eq!(q1, 0.759179, epsilon = 1e-6);
        let q2 = kuzmin_rate(&mp(2));
        assert_abs_diff_eq!(
            q2,
            8.0 * (apery - 1.0) - 2.0 * (pi2_6 - 1.0),
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(q2, 0.326587, epsilon = 1e-6);
        assert_abs_diff_eq!(kuzmin_rate_bound(&mp(2)), 0.34375, epsilon = 1e-15);
        assert!(q2 < kuzmin_rate_bound(&mp(2)));
    }

    #[test]
    fn kuzmin_rate_below_bound() {
        for p in 2..=50 {
            let m = mp(p);
            assert!(kuzmin_rate(&m) < kuzmin_rate_bound(&m), "p = {p}");
        }
    }

    proptest! {
        #[test]
        fn map_is_fractional_part(p in 1u32..100, x in 1e-6f64..=1.0) {
            let m = mp(p);
            let t = apply_map(&m, x).unwrap();
            let q = f64::from(p) / x;
            let a = q.floor();
            prop_assert!((0.0..1.0).contains(&t));
            prop_assert!((q - a - t).abs() <= 4.0 * f64::EPSILON * q.max(1.0));
        }

        #[test]
        fn digits_are_at_least_p(p in 1u32..30, x in 1e-3f64..=1.0) {
            let d = digits(&mp(p), x, 12).unwrap();
            prop_assert!(d.digits.iter().all(|&a| a >= u64::from(p)));
        }

        #[test]
        fn digit_reconstruction_improves_with_length(p in 1u32..10, x in 0.01f64..0.99) {
            let m = mp(p);
            let err = |n: usize| (digits(&m, x, n).unwrap().value() - x).abs();
            let (e2, e6, e12) = (err(2), err(6), err(12));
            prop_assert!(e6 <= e2 + 1e-15);
            prop_assert!(e12 <= e6 + 1e-15);
            prop_assert!(e12 <= 1e-3);
        }
    }
}
