//! Non-uniform Berry–Esseen bound for sums of independent standardized
//! summands, the uniform bound it relies on, and the concentration
//! inequalities used along the way.

use serde::Serialize;

use crate::constants::Constants;
use crate::distributions::SummandProfile;
use crate::error::{domain, ensure_finite, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// β₂ + β₃ ≥ 1
    BetaLarge,
    /// β₂ + β₃ < 1 and |z| ≤ 2
    BetaSmallZSmall,
    /// β₂ + β₃ < 1 and |z| > 2
    BetaSmallZLarge,
}

impl Regime {
    pub fn select(beta_sum: f64, z: f64) -> Regime {
        if beta_sum >= 1.0 {
            Regime::BetaLarge
        } else if z.abs() <= 2.0 {
            Regime::BetaSmallZSmall
        } else {
            Regime::BetaSmallZLarge
        }
    }

    pub fn c2(self, c: &Constants) -> f64 {
        match self {
            Regime::BetaLarge => c.c2_beta_large,
            Regime::BetaSmallZSmall => c.c2_z_small,
            Regime::BetaSmallZLarge => c.c2_z_large,
        }
    }
}

/// `2Σᵢ P(|ξᵢ| > (1∨|z|)/4) + C₂(1+|z|)^{−2}(β₂+β₃)`, term by term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundBreakdown {
    pub z: f64,
    pub regime: Regime,
    pub c2: f64,
    pub tail_term: f64,
    pub main_term: f64,
    /// Not clamped; see [`BoundBreakdown::clamped`].
    pub total: f64,
}

impl BoundBreakdown {
    /// `min(1, total)`, for presentation: a Kolmogorov distance never exceeds one.
    pub fn clamped(&self) -> f64 {
        self.total.min(1.0)
    }
}

pub fn besseen_bound(profile: &SummandProfile, z: f64) -> BoundBreakdown {
    besseen_bound_with(&Constants::default(), profile, z)
}

pub fn besseen_bound_with(c: &Constants, profile: &SummandProfile, z: f64) -> BoundBreakdown {
    let s = profile.beta_sum();
    let regime = Regime::select(s, z);
    let c2 = regime.c2(c);
    let az = z.abs();
    let tail_term = 2.0 * profile.tail_sum(az.max(1.0) / 4.0);
    let main_term = c2 * s / ((1.0 + az) * (1.0 + az));
    BoundBreakdown {
        z,
        regime,
        c2,
        tail_term,
        main_term,
        total: tail_term + main_term,
    }
}

/// `sup_z |P(W ≤ z) − Φ(z)| ≤ 4.1(β₂+β₃)`.
pub fn uniform_bound(profile: &SummandProfile) -> f64 {
    uniform_bound_with(&Constants::default(), profile)
}

pub fn uniform_bound_with(c: &Constants, profile: &SummandProfile) -> f64 {
    c.uniform * profile.beta_sum()
}

/// Right side of
/// `P(S_n ≥ x) ≤ P(max ηᵢ > (x∨B)/p) + e^p(1 + x²/(pB²))^{−p}`
/// for i.i.d. summands `ηᵢ` described by `profile`, with `E ηᵢ ≤ 0` and
/// `Σ E ηᵢ² ≤ B²`. The max term is evaluated exactly as
/// `1 − (1 − P(η > y))ⁿ`.
pub fn concentration_tail(profile: &SummandProfile, b: f64, x: f64, p: f64) -> Result<f64> {
    let (max_term, exp_term) = concentration_parts(profile, b, x, p)?;
    Ok(-max_term.exp_m1() + exp_term)
}

/// Same inequality with the max term replaced by the union bound
/// `Σᵢ P(ηᵢ > (x∨B)/p)`.
pub fn concentration_tail_union(profile: &SummandProfile, b: f64, x: f64, p: f64) -> Result<f64> {
    check_concentration_args(b, x, p)?;
    let y = x.max(b) / p;
    Ok(profile.upper_tail_sum(y) + concentration_exp_term(b, x, p))
}

/// `(n·ln(1 − q), exponential term)`; the max term is `1 − e^{first}`.
fn concentration_parts(profile: &SummandProfile, b: f64, x: f64, p: f64) -> Result<(f64, f64)> {
    check_concentration_args(b, x, p)?;
    let n = profile.n as f64;
    let y = x.max(b) / p;
    let q = (profile.upper_tail_sum(y) / n).clamp(0.0, 1.0);
    Ok((n * (-q).ln_1p(), concentration_exp_term(b, x, p)))
}

fn concentration_exp_term(b: f64, x: f64, p: f64) -> f64 {
    (p - p * (x * x / (p * b * b)).ln_1p()).exp()
}

fn check_concentration_args(b: f64, x: f64, p: f64) -> Result<()> {
    ensure_finite("x", x)?;
    ensure_finite("p", p)?;
    ensure_finite("B", b)?;
    if !(x > 0.0 && p >= 1.0 && b > 0.0) {
        return domain(format!(
            "need x > 0, p >= 1, B > 0; got x = {x}, p = {p}, B = {b}"
        ));
    }
    Ok(())
}

/// `exp(α^{−2}(e^{tα} − 1 − tα)B²)`, an upper bound on `E e^{tS_n}` when
/// every summand is at most `α`.
pub fn mgf_bound(alpha: f64, b: f64, t: f64) -> Result<f64> {
    for (name, v) in [("alpha", alpha), ("B", b), ("t", t)] {
        ensure_finite(name, v)?;
        if v <= 0.0 {
            return domain(format!("{name} must be positive, got {v}"));
        }
    }
    let ta = t * alpha;
    Ok(((ta.exp_m1() - ta) * b * b / (alpha * alpha)).exp())
}

/// Right side of
/// `P(W ≥ z, max ξᵢ > 1) ≤ 2Σᵢ P(|ξᵢ| > z/(2p)) + e^p(1 + z²/(4p))^{−p}β₂`.
pub fn truncated_max_tail(profile: &SummandProfile, z: f64, p: f64) -> Result<f64> {
    ensure_finite("z", z)?;
    ensure_finite("p", p)?;
    if z < 2.0 || p < 2.0 {
        return domain(format!("need z >= 2 and p >= 2, got z = {z}, p = {p}"));
    }
    let tails = 2.0 * profile.tail_sum(z / (2.0 * p));
    let decay = (p - p * (z * z / (4.0 * p)).ln_1p()).exp();
    Ok(tails + decay * profile.beta2)
}

/// `6(min(1, b−a) + β₂ + β₃)e^{−a/2}`, bounding `P(a ≤ W̄⁽ⁱ⁾ ≤ b)` for the
/// leave-one-out truncated sum.
pub fn smoothing_concentration(a: f64, b: f64, profile: &SummandProfile) -> Result<f64> {
    smoothing_concentration_with(&Constants::default(), a, b, profile)
}

pub fn smoothing_concentration_with(
    c: &Constants,
    a: f64,
    b: f64,
    profile: &SummandProfile,
) -> Result<f64> {
    ensure_finite("a", a)?;
    ensure_finite("b", b)?;
    if a >= b {
        return domain(format!("need a < b, got a = {a}, b = {b}"));
    }
    Ok(c.smoothing * ((b - a).min(1.0) + profile.beta_sum()) * (-0.5 * a).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{summand_profile, DistributionSpec};
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn two_point() -> SummandProfile {
        let spec = DistributionSpec::discrete(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        summand_profile(&spec, 4).unwrap()
    }

    #[test]
    fn regime_table() {
        let p = SummandProfile::from_moments(10, 0.7, 0.5);
        let b = besseen_bound(&p, 0.0);
        assert_eq!((b.regime, b.c2), (Regime::BetaLarge, 15.0));
        assert_eq!(Regime::select(1.0, 5.0), Regime::BetaLarge);
        assert_eq!(Regime::select(0.999, 2.0), Regime::BetaSmallZSmall);
        assert_eq!(Regime::select(0.999, -2.0), Regime::BetaSmallZSmall);
        assert_eq!(Regime::select(0.999, 2.000_000_1), Regime::BetaSmallZLarge);
    }

    #[test]
    fn two_point_example() {
        let p = two_point();
        let b = besseen_bound(&p, 0.0);
        assert_eq!(b.regime, Regime::BetaSmallZSmall);
        assert_eq!(b.c2, 37.0);
        assert!((b.tail_term - 8.0).abs() < 1e-14);
        assert!((b.main_term - 18.5).abs() < 1e-13);
        assert!((b.total - 26.5).abs() < 1e-13);
        assert_eq!(b.clamped(), 1.0);
        let b3 = besseen_bound(&p, 3.0);
        assert_eq!(b3.c2, 25431.0);
        assert_eq!(b3.regime, Regime::BetaSmallZLarge);
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(
            uniform_bound(&SummandProfile::from_moments(3, 0.0, 0.0)),
            0.0
        );
        assert!((uniform_bound(&two_point()) - 2.05).abs() < 1e-14);
        assert!((uniform_bound(&SummandProfile::from_moments(3, 0.4, 0.6)) - 4.1).abs() < 1e-14);
    }

    #[test]
    fn concentration_examples() {
        let zero = SummandProfile::from_summand_atoms(&[(0.0, 1.0)], 5).unwrap();
        let v = concentration_tail(&zero, 1.0, 2.0, 2.0).unwrap();
        assert!((v - E * E / 9.0).abs() < 1e-15);
        // max term: P(max ξ > 1) for ξ = ±1/2 is 0; for the two-point law at n = 4
        let v = concentration_tail(&two_point(), 1.0, 2.0, 2.0).unwrap();
        assert!((v - E * E / 9.0).abs() < 1e-15);
        let v = concentration_tail(&two_point(), 1.0, 0.8, 2.0).unwrap();
        // threshold (0.8 ∨ 1)/2 = 0.5, P(ξ > 0.5) = 0
        assert!((v - (2.0 - 2.0 * (1.0f64 + 0.32).ln()).exp()).abs() < 1e-15);
        let v = concentration_tail(&two_point(), 1.0, 0.8, 3.0).unwrap();
        let union = concentration_tail_union(&two_point(), 1.0, 0.8, 3.0).unwrap();
        // threshold 1/3: every summand exceeds it w.p. 1/2
        let exp_term = (3.0 - 3.0 * (1.0 + 0.64f64 / 3.0).ln()).exp();
        assert!((v - (1.0 - 0.5f64.powi(4) + exp_term)).abs() < 1e-14);
        assert!((union - (2.0 + exp_term)).abs() < 1e-14);
        assert!(concentration_tail(&zero, 1.0, 0.0, 2.0).is_err());
        assert!(concentration_tail(&zero, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn mgf_examples() {
        assert!((mgf_bound(1.0, 1.0, 1.0).unwrap() - (E - 2.0).exp()).abs() < 1e-15);
        assert!((mgf_bound(1.0, 1.0, 2.0).unwrap() - (E * E - 3.0).exp()).abs() < 1e-13);
        assert!((mgf_bound(1.0, 1.0, 1e-8).unwrap() - 1.0).abs() < 1e-7);
        assert!(mgf_bound(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn truncated_max_tail_examples() {
        let p = SummandProfile::from_moments(5, 0.1, 0.2);
        // e²(1 + 4/8)^{−2}·0.1
        let v = truncated_max_tail(&p, 2.0, 2.0).unwrap();
        assert!((v - E * E / 2.25 * 0.1).abs() < 1e-15);
        let v = truncated_max_tail(&two_point(), 2.0, 2.0).unwrap();
        // β₂ = 0; threshold 0.5 is not exceeded by |ξ| = 1/2
        assert_eq!(v, 0.0);
        let v = truncated_max_tail(&two_point(), 3.0, 4.0).unwrap();
        // threshold 3/8 < 1/2: every summand exceeds it
        assert!((v - 8.0).abs() < 1e-14);
        assert!(truncated_max_tail(&p, 1.9, 2.0).is_err());
        assert!(truncated_max_tail(&p, 2.0, 1.5).is_err());
    }

    #[test]
    fn smoothing_examples() {
        let p = SummandProfile::from_moments(5, 0.2, 0.3);
        assert!((smoothing_concentration(0.0, 1.0, &p).unwrap() - 9.0).abs() < 1e-14);
        let a = 0.7;
        let v = smoothing_concentration(a, a + 1e-12, &p).unwrap();
        assert!((v - 6.0 * 0.5 * (-a / 2.0f64).exp()).abs() < 1e-11);
        assert!(smoothing_concentration(1.0, 1.0, &p).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_in_z(z in -50.0f64..50.0, n in 1u64..200) {
            let spec = DistributionSpec::uniform(0.0, 2.0).unwrap();
            let p = summand_profile(&spec, n).unwrap();
            let a = besseen_bound(&p, z);
            let b = besseen_bound(&p, -z);
            prop_assert_eq!(a.total, b.total);
            prop_assert!(a.total >= 0.0);
            prop_assert_eq!(a.total, a.tail_term + a.main_term);
        }

        #[test]
        fn regime_matches_table(s in 0.0f64..2.0, z in -10.0f64..10.0) {
            let p = SummandProfile::from_moments(4, s * 0.25, s * 0.75);
            let b = besseen_bound(&p, z);
            let want = if p.beta_sum() >= 1.0 { 15.0 } else if z.abs() <= 2.0 { 37.0 } else { 25431.0 };
            prop_assert_eq!(b.c2, want);
        }
    }
}
