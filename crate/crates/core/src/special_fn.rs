//! Standard normal primitives.
//!
//! Everything is built on a scaled complementary error function
//! `erfcx(x) = exp(x²)·erfc(x)` using W. J. Cody's rational Chebyshev
//! approximations (ACM TOMS 715, `CALERF`). Products of the form
//! `exp(w²/2)·(1 − Φ(w))` never multiply a huge exponential by a tiny tail:
//! they go through [`scaled_tail`].

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{domain, ensure_finite, Result};

/// `1/√(2π)`
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// `√(2π)`
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const CODY_THRESHOLD: f64 = 0.46875;
/// Beyond this |w| the scaled tail is replaced by its Mills-ratio asymptote.
const MILLS_SATURATION: f64 = 1.0e7;

const A: [f64; 5] = [
    3.161_123_743_870_565_6,
    113.864_154_151_050_16,
    377.485_237_685_302,
    3_209.377_589_138_469_5,
    0.185_777_706_184_603_15,
];
const B: [f64; 4] = [
    23.601_290_952_344_122,
    244.024_637_934_444_17,
    1_282.616_526_077_372_3,
    2_844.236_833_439_171,
];
const C: [f64; 9] = [
    0.564_188_496_988_670_1,
    8.883_149_794_388_376,
    66.119_190_637_141_63,
    298.635_138_197_400_1,
    881.952_221_241_769,
    1_712.047_612_634_070_6,
    2_051.078_377_826_071_6,
    1_230.339_354_797_997_2,
    2.153_115_354_744_038_3e-8,
];
const D: [f64; 8] = [
    15.744_926_110_709_835,
    117.693_950_891_312_5,
    537.181_101_862_009_9,
    1_621.389_574_566_690_3,
    3_290.799_235_733_459_7,
    4_362.619_090_143_247,
    3_439.367_674_143_721_6,
    1_230.339_354_803_749_5,
];
const P: [f64; 6] = [
    0.305_326_634_961_232_36,
    0.360_344_899_949_804_45,
    0.125_781_726_111_229_26,
    0.016_083_785_148_742_275,
    6.587_491_615_298_378e-4,
    0.016_315_387_137_302_097,
];
const Q: [f64; 5] = [
    2.568_520_192_289_822,
    1.872_952_849_923_460_4,
    0.527_905_102_951_428_5,
    0.060_518_341_312_441_32,
    0.002_335_204_976_268_691_8,
];

#[inline]
fn erf_small(y: f64) -> f64 {
    let z = y * y;
    let num = (((A[4] * z + A[0]) * z + A[1]) * z + A[2]) * z + A[3];
    let den = (((z + B[0]) * z + B[1]) * z + B[2]) * z + B[3];
    y * num / den
}

/// `erfcx(y)` for `y ≥ 0`.
fn erfcx_nonneg(y: f64) -> f64 {
    debug_assert!(y >= 0.0);
    if y <= CODY_THRESHOLD {
        (y * y).exp() * (1.0 - erf_small(y))
    } else if y <= 4.0 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        (num + C[7]) / (den + D[7])
    } else {
        let z = 1.0 / (y * y);
        let mut num = P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + P[i]) * z;
            den = (den + Q[i]) * z;
        }
        let r = z * (num + P[4]) / (den + Q[4]);
        (INV_SQRT_PI - r) / y
    }
}

/// `exp(s·w²/2)` with `s = ±1`, splitting `w` so the square is formed exactly.
#[inline]
fn exp_half_square(w: f64, sign: f64) -> f64 {
    let hi = (w * 16.0).trunc() / 16.0;
    let lo = (w - hi) * (w + hi);
    (sign * 0.5 * hi * hi).exp() * (sign * 0.5 * lo).exp()
}

/// `exp(w²/2)`, evaluated without losing relative accuracy for large |w|.
pub fn exp_half_sq(w: f64) -> f64 {
    exp_half_square(w, 1.0)
}

/// `exp(−w²/2)`, evaluated without losing relative accuracy for large |w|.
pub fn exp_neg_half_sq(w: f64) -> f64 {
    exp_half_square(w, -1.0)
}

/// `e^{w²/2}(1 − Φ(w))` without range checks.
pub(crate) fn scaled_tail_raw(w: f64) -> f64 {
    if w > MILLS_SATURATION {
        return INV_SQRT_2PI / w;
    }
    if w >= 0.0 {
        0.5 * erfcx_nonneg(w * FRAC_1_SQRT_2)
    } else {
        // e^{w²/2}Φ(w) = erfcx(|w|/√2)/2 for w < 0
        exp_half_sq(w) - 0.5 * erfcx_nonneg(-w * FRAC_1_SQRT_2)
    }
}

/// Φ(w) without range checks.
pub(crate) fn cdf(w: f64) -> f64 {
    if w < 0.0 {
        lower_tail(w)
    } else {
        1.0 - lower_tail(-w)
    }
}

/// 1 − Φ(w) without range checks.
pub(crate) fn sf(w: f64) -> f64 {
    if w > 0.0 {
        lower_tail(-w)
    } else {
        1.0 - lower_tail(w)
    }
}

/// Φ(w) for w ≤ 0.
#[inline]
fn lower_tail(w: f64) -> f64 {
    debug_assert!(w <= 0.0);
    if w < -40.0 {
        return 0.0;
    }
    0.5 * erfcx_nonneg(-w * FRAC_1_SQRT_2) * exp_neg_half_sq(w)
}

#[inline]
pub(crate) fn pdf(w: f64) -> f64 {
    INV_SQRT_2PI * exp_neg_half_sq(w)
}

/// Standard normal density.
pub fn phi_pdf(w: f64) -> Result<f64> {
    ensure_finite("w", w)?;
    Ok(pdf(w))
}

/// Standard normal distribution function Φ.
///
/// Relative accuracy is close to machine precision on both tails; below
/// w ≈ −38.5 the result underflows to subnormals and then to zero.
pub fn phi_cdf(w: f64) -> Result<f64> {
    ensure_finite("w", w)?;
    Ok(cdf(w))
}

/// Upper tail 1 − Φ(w), accurate where Φ(w) is close to one.
pub fn phi_sf(w: f64) -> Result<f64> {
    ensure_finite("w", w)?;
    Ok(sf(w))
}

/// `e^{w²/2}(1 − Φ(w))`.
///
/// For w > 10⁷ the Mills-ratio asymptote `1/(w√(2π))` is returned. For
/// w below about −37.7 the true value exceeds `f64::MAX` and `+∞` is
/// returned.
pub fn scaled_tail(w: f64) -> Result<f64> {
    ensure_finite("w", w)?;
    Ok(scaled_tail_raw(w))
}

/// Φ(a) − Φ(b), computed on whichever tail keeps the difference accurate.
pub fn phi_cdf_diff(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        sf(b) - sf(a)
    } else {
        cdf(a) - cdf(b)
    }
}

/// Whether the two-sided normal tail envelope
/// `e^{−w²/2}/(4(1+w²)) ≤ 1 − Φ(w) ≤ min(1/2, 1/(w√(2π)))·e^{−w²/2}`
/// holds at `w > 0`. Compared after scaling by `e^{w²/2}`.
pub fn check_normal_tail(w: f64) -> Result<bool> {
    ensure_finite("w", w)?;
    if w <= 0.0 {
        return domain(format!("normal tail envelope needs w > 0, got {w}"));
    }
    let (lower, value, upper) = normal_tail_envelope(w);
    Ok(lower <= value && value <= upper)
}

/// (lower, scaled_tail(w), upper) of the scaled tail envelope.
pub(crate) fn normal_tail_envelope(w: f64) -> (f64, f64, f64) {
    let lower = 0.25 / (1.0 + w * w);
    let upper = 0.5_f64.min(1.0 / (w * (2.0 * PI).sqrt()));
    (lower, scaled_tail_raw(w), upper)
}
