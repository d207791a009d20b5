//! Bounded solution of the normal Stein equation
//! `f'(w) − w f(w) = 1(w ≤ z) − Φ(z)` and the derivative of `w f_z(w)`.
//!
//! Every branch is written so that exponentials of large squares only ever
//! appear as ratios `exp((w² − z²)/2) ≤ 1` or inside the scaled tail.

use serde::Serialize;

use crate::error::{domain, ensure_finite, Result};
use crate::special_fn::{cdf, scaled_tail_raw, sf, SQRT_2PI};

/// Uniform bound `√(2π)/4` on the Stein solution.
pub const F_SUP: f64 = SQRT_2PI / 4.0;

/// Pointwise values of the Stein solution at a fixed evaluation point `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteinEval {
    pub z: f64,
    pub w: f64,
    pub f: f64,
    /// Left limit at the jump `w = z`.
    pub fprime: f64,
    pub g: f64,
    /// Set when `w == z`, where `f'` jumps by `−1`.
    pub at_jump: bool,
}

/// `f_z'(w)` together with the jump flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FPrime {
    pub value: f64,
    pub at_jump: bool,
}

/// `exp((w² − z²)/2)`; only called with |w| ≤ |z| on the same side of zero.
#[inline]
fn exp_ratio(w: f64, z: f64) -> f64 {
    (0.5 * (w - z) * (w + z)).exp()
}

pub(crate) fn f_raw(z: f64, w: f64) -> f64 {
    if w <= z {
        if w <= 0.0 {
            SQRT_2PI * scaled_tail_raw(-w) * sf(z)
        } else {
            SQRT_2PI * cdf(w) * scaled_tail_raw(z) * exp_ratio(w, z)
        }
    } else if w >= 0.0 {
        SQRT_2PI * cdf(z) * scaled_tail_raw(w)
    } else {
        SQRT_2PI * sf(w) * scaled_tail_raw(-z) * exp_ratio(w, z)
    }
}

/// Closed form of `f'`; the lower branch (`w ≤ z`) is used at `w = z`.
pub(crate) fn fprime_left_raw(z: f64, w: f64) -> f64 {
    if w <= z {
        lower_fprime(z, w)
    } else {
        upper_fprime(z, w)
    }
}

pub(crate) fn fprime_right_raw(z: f64, w: f64) -> f64 {
    if w < z {
        lower_fprime(z, w)
    } else {
        upper_fprime(z, w)
    }
}

fn lower_fprime(z: f64, w: f64) -> f64 {
    if w <= 0.0 {
        (SQRT_2PI * w * scaled_tail_raw(-w) + 1.0) * sf(z)
    } else {
        SQRT_2PI * w * cdf(w) * scaled_tail_raw(z) * exp_ratio(w, z) + sf(z)
    }
}

fn upper_fprime(z: f64, w: f64) -> f64 {
    if w >= 0.0 {
        (SQRT_2PI * w * scaled_tail_raw(w) - 1.0) * cdf(z)
    } else {
        SQRT_2PI * w * sf(w) * scaled_tail_raw(-z) * exp_ratio(w, z) - cdf(z)
    }
}

pub(crate) fn g_raw(z: f64, w: f64) -> f64 {
    let q = 1.0 + w * w;
    if w <= z {
        if w <= 0.0 {
            sf(z) * chen_shao_lhs(w)
        } else {
            SQRT_2PI * q * cdf(w) * scaled_tail_raw(z) * exp_ratio(w, z) + w * sf(z)
        }
    } else if w >= 0.0 {
        cdf(z) * chen_shao_reflected_lhs(w)
    } else {
        SQRT_2PI * q * sf(w) * scaled_tail_raw(-z) * exp_ratio(w, z) - w * cdf(z)
    }
}

/// `√(2π)(1+w²)e^{w²/2}Φ(w) + w` for `w ≤ 0`, which is at most `2/(1+|w|³)`.
pub fn chen_shao_lhs(w: f64) -> f64 {
    SQRT_2PI * (1.0 + w * w) * scaled_tail_raw(-w) + w
}

/// Mirror image of [`chen_shao_lhs`]: `√(2π)(1+w²)e^{w²/2}(1−Φ(w)) − w` for `w ≥ 0`.
pub fn chen_shao_reflected_lhs(w: f64) -> f64 {
    SQRT_2PI * (1.0 + w * w) * scaled_tail_raw(w) - w
}

pub(crate) fn g_case_bound_raw(z: f64, w: f64) -> f64 {
    let z2 = 1.0 + z * z;
    if w <= 0.5 * z {
        // e^{z²/8}(1−Φ(z)) = scaled_tail(z)·e^{−3z²/8}
        4.0 * z2 * (1.0 + z * z * z) / (1.0 + w.abs().powi(3))
            * scaled_tail_raw(z)
            * (-0.375 * z * z).exp()
    } else {
        8.0 * z2 * scaled_tail_raw(z)
    }
}

fn check_args(z: f64, w: f64) -> Result<()> {
    ensure_finite("z", z)?;
    ensure_finite("w", w)
}

/// The unique bounded solution `f_z(w)` of the Stein equation.
pub fn f_z(z: f64, w: f64) -> Result<f64> {
    check_args(z, w)?;
    Ok(f_raw(z, w))
}

/// `f_z'(w)`. At `w = z` the left limit is returned and `at_jump` is set.
pub fn f_z_prime(z: f64, w: f64) -> Result<FPrime> {
    check_args(z, w)?;
    Ok(FPrime {
        value: fprime_left_raw(z, w),
        at_jump: w == z,
    })
}

/// Right limit of `f_z'` at `w` (differs from the left limit only at `w = z`).
pub fn f_z_prime_right(z: f64, w: f64) -> Result<f64> {
    check_args(z, w)?;
    Ok(fprime_right_raw(z, w))
}

/// `g(w) = (w f_z(w))'`.
pub fn g(z: f64, w: f64) -> Result<f64> {
    check_args(z, w)?;
    Ok(g_raw(z, w))
}

/// Piecewise upper envelope of `g` valid for `z > 2`:
/// `4(1+z²)(1+z³)/(1+|w|³)·e^{z²/8}(1−Φ(z))` for `w ≤ z/2` and
/// `8(1+z²)e^{z²/2}(1−Φ(z))` otherwise.
pub fn g_case_bound(z: f64, w: f64) -> Result<f64> {
    check_args(z, w)?;
    if z <= 2.0 {
        return domain(format!("g envelope holds for z > 2, got z = {z}"));
    }
    Ok(g_case_bound_raw(z, w))
}

pub fn eval(z: f64, w: f64) -> Result<SteinEval> {
    check_args(z, w)?;
    Ok(SteinEval {
        z,
        w,
        f: f_raw(z, w),
        fprime: fprime_left_raw(z, w),
        g: g_raw(z, w),
        at_jump: w == z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wf(z: f64, w: f64) -> f64 {
        w * f_z(z, w).unwrap()
    }

    fn central(h: f64, f: impl Fn(f64) -> f64, x: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn value_at_origin() {
        assert!((f_z(0.0, 0.0).unwrap() - 0.626_657_068_657_750_1).abs() < 1e-15);
    }

    #[test]
    fn continuous_across_the_jump() {
        let z = 3.0;
        let left = f_z(z, z - 1e-13).unwrap();
        let right = f_z(z, z + 1e-13).unwrap();
        assert!((left - right).abs() < 1e-12);
    }

    #[test]
    fn reference_value() {
        // √(2π)·e^{1/2}Φ(1)·(1−Φ(2)) at 50 digits
        let v = f_z(2.0, 1.0).unwrap();
        assert!((v - 0.079_103_387_506_914_6).abs() < 1e-14);
    }

    #[test]
    fn derivative_vanishes_far_left() {
        // w f_z(w) → −(1 − Φ(z)), so f' → 0 like (1 − Φ(z))/w²
        let d = f_z_prime(0.0, -40.0).unwrap();
        // 40-digit value of (√(2π)·w·e^{w²/2}Φ(w) + 1)/2 at w = −40
        assert!((d.value - 3.119_158_855_885_770_5e-4).abs() < 1e-12);
        assert!(!d.at_jump);
    }

    #[test]
    fn derivative_is_bounded_and_matches_differences() {
        let d = f_z_prime(1.0, 0.5).unwrap().value;
        assert!((-1.0..=1.0).contains(&d));
        let fd = central(1e-6, |w| f_z(2.0, w).unwrap(), 1.0);
        assert!((f_z_prime(2.0, 1.0).unwrap().value - fd).abs() < 1e-5);
    }

    #[test]
    fn jump_is_flagged_with_left_limit() {
        let z = 0.7;
        let left = f_z_prime(z, z).unwrap();
        assert!(left.at_jump);
        let right = f_z_prime_right(z, z).unwrap();
        assert!((left.value - right - 1.0).abs() < 1e-12);
        let just_below = f_z_prime(z, z - 1e-12).unwrap().value;
        assert!((left.value - just_below).abs() < 1e-9);
    }

    #[test]
    fn g_examples() {
        let (z, w) = (2.5, -1.0);
        assert!(g(z, w).unwrap() <= 2.0 / (1.0 + w.abs().powi(3)) * sf(z) + 1e-15);

        let g0 = g(3.0, 0.0).unwrap();
        assert!(g0 > 0.0);
        assert!((g0 - SQRT_2PI * sf(3.0) * 0.5).abs() < 1e-15);
        assert!((g0 - central(1e-6, |w| wf(3.0, w), 0.0)).abs() < 1e-6);

        assert!(g(2.2, 5.0).unwrap() <= 2.0);
    }

    #[test]
    fn case_bound_branches() {
        assert!(g(3.0, 1.0).unwrap() <= g_case_bound(3.0, 1.0).unwrap());
        assert!(g(3.0, 2.0).unwrap() <= g_case_bound(3.0, 2.0).unwrap());
        // w ≤ z/2 branch uses e^{z²/8}, fine in scaled form
        let b = g_case_bound(10.0, -5.0).unwrap();
        assert!(b.is_finite() && b > 0.0);
        let direct = 4.0 * 101.0 * 1001.0 / 126.0 * (12.5_f64).exp() * sf(10.0);
        assert!(((b - direct) / direct).abs() < 1e-12);
        assert!(g_case_bound(2.0, 0.0).is_err());
        assert!(g_case_bound(1.0, 0.0).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(f_z(f64::NAN, 0.0).is_err());
        assert!(g(0.0, f64::INFINITY).is_err());
        assert!(eval(0.0, f64::NAN).is_err());
    }

    #[test]
    fn mirror_symmetry() {
        // f_z(w) = f_{−z}(−w)
        for &(z, w) in &[(1.3, -0.4), (-2.0, 3.5), (4.0, -6.0), (0.2, 0.1)] {
            let a = f_z(z, w).unwrap();
            let b = f_z(-z, -w).unwrap();
            assert!(((a - b) / a).abs() < 1e-13, "{z} {w}");
        }
    }

    proptest! {
        #[test]
        fn stein_equation_residual(z in -5.0f64..5.0, w in -8.0f64..8.0) {
            prop_assume!((w - z).abs() > 1e-6);
            let e = eval(z, w).unwrap();
            let ind = if w <= z { 1.0 } else { 0.0 };
            prop_assert!((e.fprime - w * e.f - (ind - cdf(z))).abs() <= 1e-10);
        }

        #[test]
        fn magnitude_bounds(z in -5.0f64..5.0, w in -8.0f64..8.0) {
            let e = eval(z, w).unwrap();
            let cap = if z == 0.0 { F_SUP } else { F_SUP.min(1.0 / z.abs()) };
            prop_assert!(e.f > 0.0 && e.f <= cap + 1e-9);
            prop_assert!(e.fprime.abs() <= 1.0 + 1e-9);
        }

        #[test]
        fn w_times_f_is_nondecreasing(z in -5.0f64..5.0, w in -8.0f64..8.0, dw in 1e-3f64..0.5) {
            prop_assert!(wf(z, w + dw) >= wf(z, w) - 1e-9);
        }
    }
}
