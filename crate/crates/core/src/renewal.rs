//! Bounds on the normal approximation of renewal counts `P(X_t ≤ n)`.
//!
//! With `X_t = max{n : Z₁ + … + Z_n ≤ t}` the comparison is against
//! `Φ((nμ − t)√μ/(σ√t))`.

use serde::Serialize;

use crate::constants::Constants;
use crate::distributions::{summand_profile, DistributionSpec};
use crate::error::{domain, ensure_finite, Result};
use crate::special_fn::{cdf, phi_cdf_diff, sf};

/// An evaluation point `(t, n)` for a given arrival law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenewalPoint {
    pub spec: DistributionSpec,
    pub t: f64,
    pub n: u64,
    /// `(t − nμ)/(σ√n)`, the standardized distance of `T_n` from `t`.
    pub z: f64,
    /// `(nμ − t)√μ/(σ√t)`, the normal CDF argument.
    pub z_phi: f64,
}

impl RenewalPoint {
    pub fn new(spec: &DistributionSpec, t: f64, n: u64) -> Result<Self> {
        ensure_finite("t", t)?;
        if t <= 0.0 {
            return domain(format!("t must be positive, got {t}"));
        }
        let sigma = spec.require_spread()?;
        let mu = spec.mu();
        let nmu = n as f64 * mu;
        let z = if n == 0 {
            f64::INFINITY
        } else {
            (t - nmu) / (sigma * (n as f64).sqrt())
        };
        let z_phi = (nmu - t) * mu.sqrt() / (sigma * t.sqrt());
        Ok(RenewalPoint {
            spec: spec.clone(),
            t,
            n,
            z,
            z_phi,
        })
    }

    pub fn regime(&self) -> Side {
        if self.t <= self.n as f64 * self.spec.mu() {
            Side::TleNMu
        } else {
            Side::TgtNMu
        }
    }
}

/// Which side of `nμ` the horizon `t` lies on; `t = nμ` counts as `TleNMu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    TleNMu,
    TgtNMu,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RenewalBound {
    pub term_smooth: f64,
    pub term_nonuniform: f64,
    /// Not clamped; see [`RenewalBound::clamped`].
    pub total: f64,
    pub regime: Side,
}

impl RenewalBound {
    pub fn clamped(&self) -> f64 {
        self.total.min(1.0)
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    ensure_finite(name, x)?;
    if x <= 0.0 {
        return domain(format!("{name} must be positive, got {x}"));
    }
    Ok(())
}

/// Upper bound on `|Φ((nμ−t)/(σ√n)) − Φ((nμ−t)√μ/(σ√t))|`.
pub fn cdf_shift_bound(mu: f64, sigma: f64, n: u64, t: f64) -> Result<f64> {
    cdf_shift_bound_with(&Constants::default(), mu, sigma, n, t)
}

pub fn cdf_shift_bound_with(c: &Constants, mu: f64, sigma: f64, n: u64, t: f64) -> Result<f64> {
    check_positive("mu", mu)?;
    check_positive("sigma", sigma)?;
    check_positive("t", t)?;
    if n == 0 {
        return domain("n must be >= 1");
    }
    let nf = n as f64;
    let nmu = nf * mu;
    if t <= nmu {
        Ok(c.cdf_shift_near * sigma / (t * mu).sqrt())
    } else {
        let gap = t - nmu;
        Ok(c.cdf_shift_far * t * t * sigma.powi(3)
            / (nf.sqrt() * mu * mu * gap * gap * ((nmu * t).sqrt() + t)))
    }
}

/// The quantity bounded by [`cdf_shift_bound`], evaluated directly.
pub fn cdf_shift(mu: f64, sigma: f64, n: u64, t: f64) -> f64 {
    let nf = n as f64;
    let a = (nf * mu - t) / (sigma * nf.sqrt());
    let b = (nf * mu - t) * mu.sqrt() / (sigma * t.sqrt());
    phi_cdf_diff(a, b).abs()
}

/// Smooth part of the renewal bound.
fn smooth_term(c: &Constants, mu: f64, sigma: f64, t: f64, side: Side) -> f64 {
    match side {
        Side::TleNMu => c.cdf_shift_near * sigma / (t.sqrt() * mu),
        Side::TgtNMu => c.renewal_far * far_bracket(c, mu, sigma, t) / t.sqrt(),
    }
}

/// `σ³/(μ²√t) + σ/(224²√μ)`.
fn far_bracket(c: &Constants, mu: f64, sigma: f64, t: f64) -> f64 {
    sigma.powi(3) / (mu * mu * t.sqrt()) + sigma / (c.renewal_threshold.powi(2) * mu.sqrt())
}

pub fn renewal_clt_bound(point: &RenewalPoint) -> Result<RenewalBound> {
    renewal_clt_bound_with(&Constants::default(), point)
}

pub fn renewal_clt_bound_with(c: &Constants, point: &RenewalPoint) -> Result<RenewalBound> {
    if point.n == 0 {
        return domain("the renewal bound is stated for n >= 1");
    }
    let side = point.regime();
    let term_smooth = smooth_term(c, point.spec.mu(), point.spec.sigma(), point.t, side);
    let az = point.z.abs();
    let term_nonuniform = c.renewal / ((1.0 + az) * (1.0 + az));
    Ok(RenewalBound {
        term_smooth,
        term_nonuniform,
        total: term_smooth + term_nonuniform,
        regime: side,
    })
}

/// `4(γ/σ)³(√μ/√t)^{1/2}`; `None` when the third absolute moment diverges.
pub fn englund_bound(spec: &DistributionSpec, t: f64) -> Result<Option<f64>> {
    check_positive("t", t)?;
    let m = spec.moments()?;
    if !m.gamma.is_finite() {
        return Ok(None);
    }
    let sigma = spec.require_spread()?;
    Ok(Some(
        4.0 * (m.gamma / sigma).powi(3) * (m.mu / t).powf(0.25),
    ))
}

/// `(1/√t)·max{√2/(e√π)·σ/μ, 32/(e²√(2π))·(σ³/(μ²√t) + σ/(224²√μ))} + 4(4β₂ + 3β₃)`
/// with β₂, β₃ taken from `n` standardized arrivals.
pub fn alternate_bound(spec: &DistributionSpec, n: u64, t: f64) -> Result<f64> {
    alternate_bound_with(&Constants::default(), spec, n, t)
}

pub fn alternate_bound_with(c: &Constants, spec: &DistributionSpec, n: u64, t: f64) -> Result<f64> {
    check_positive("t", t)?;
    let profile = summand_profile(spec, n)?;
    let (mu, sigma) = (spec.mu(), spec.sigma());
    let near = c.cdf_shift_near * sigma / mu;
    let far = c.renewal_far * far_bracket(c, mu, sigma, t);
    Ok(near.max(far) / t.sqrt() + 4.0 * (4.0 * profile.beta2 + 3.0 * profile.beta3))
}

/// The two pieces of the deviation `P(T_n ≥ t) − Φ(z_phi)`:
/// `P(T_n ≥ t) − (1 − Φ(z))` and `Φ(−z) − Φ(z_phi)`.
pub fn decomposition_terms(point: &RenewalPoint, p_tn_ge_t: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&p_tn_ge_t) {
        return domain(format!("probability must lie in [0, 1], got {p_tn_ge_t}"));
    }
    if point.n == 0 {
        return domain("n must be >= 1");
    }
    let term1 = p_tn_ge_t - sf(point.z);
    let term2 = phi_cdf_diff(-point.z, point.z_phi);
    Ok((term1, term2))
}

/// `Φ(z_phi)` at a point, for callers assembling deviations.
pub fn normal_approximation(point: &RenewalPoint) -> f64 {
    cdf(point.z_phi)
}
