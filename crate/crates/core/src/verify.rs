//! Numerical checks of every inequality the bounds rest on: analytic
//! inequalities on dense grids, and distributional claims by exact
//! enumeration of small discrete sums.
//!
//! A check passes when no grid point has `rhs − lhs < −slack`.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::besseen::{
    besseen_bound_with, concentration_tail, concentration_tail_union, mgf_bound,
    smoothing_concentration_with, truncated_max_tail,
};
use crate::constants::Constants;
use crate::distributions::SummandProfile;
use crate::enumeration::{expect, probability, Outcome, SummandFamily};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::quadrature::{integrate, Tolerance};
use crate::renewal::{cdf_shift, cdf_shift_bound_with};
use crate::special_fn::{cdf, normal_tail_envelope, SQRT_2PI};
use crate::stein::{
    chen_shao_lhs, chen_shao_reflected_lhs, f_raw, fprime_left_raw, fprime_right_raw,
    g_case_bound_raw, g_raw, F_SUP,
};

/// Absolute slack on analytic inequalities.
pub const SLACK: f64 = 1e-9;
/// Tolerance on identities (both sides computed exactly).
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub claim: String,
    pub grid_size: u64,
    pub violations: u64,
    /// Smallest `rhs − lhs` seen on the grid.
    pub worst_margin: f64,
    pub slack_used: f64,
    pub worst_point: BTreeMap<String, f64>,
    /// First grid point that violated the claim, if any.
    pub offending_point: Option<BTreeMap<String, f64>>,
    pub passed: bool,
}

struct Tally {
    name: &'static str,
    claim: &'static str,
    slack: f64,
    grid: u64,
    violations: u64,
    worst: f64,
    worst_point: BTreeMap<String, f64>,
    offending: Option<BTreeMap<String, f64>>,
}

fn point(p: &[(&str, f64)]) -> BTreeMap<String, f64> {
    p.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

impl Tally {
    fn new(name: &'static str, claim: &'static str, slack: f64) -> Self {
        Tally {
            name,
            claim,
            slack,
            grid: 0,
            violations: 0,
            worst: f64::INFINITY,
            worst_point: BTreeMap::new(),
            offending: None,
        }
    }

    /// Record the claim `lhs ≤ rhs` at one grid point.
    fn le(&mut self, lhs: f64, rhs: f64, at: &[(&str, f64)]) {
        let margin = rhs - lhs;
        self.grid += 1;
        // NaN margins count as violations
        if !(margin >= -self.slack) {
            self.violations += 1;
            if self.offending.is_none() {
                let mut p = point(at);
                p.insert("lhs".into(), lhs);
                p.insert("rhs".into(), rhs);
                self.offending = Some(p);
            }
        }
        if !(margin >= self.worst) {
            self.worst = margin;
            self.worst_point = point(at);
        }
    }

    /// Record `|residual| ≤ tol`.
    fn near_zero(&mut self, residual: f64, tol: f64, at: &[(&str, f64)]) {
        self.le(residual.abs(), tol, at);
    }

    fn finish(self) -> InequalityCheck {
        InequalityCheck {
            name: self.name.to_string(),
            claim: self.claim.to_string(),
            grid_size: self.grid,
            violations: self.violations,
            worst_margin: self.worst,
            slack_used: self.slack,
            worst_point: self.worst_point,
            offending_point: self.offending,
            passed: self.violations == 0 && self.grid > 0,
        }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

fn logspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let (la, lb) = (a.log10(), b.log10());
    linspace(la, lb, n).map(|e| 10f64.powf(e))
}

/// Radical-inverse (van der Corput) sequence in `base`.
fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

// ---------------------------------------------------------------------------
// analytic checks

fn check_normal_tail(_: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "normal_tail",
        "e^{-w^2/2}/(4(1+w^2)) <= 1 - Phi(w) <= min(1/2, 1/(w sqrt(2 pi))) e^{-w^2/2} for w > 0",
        SLACK,
    );
    for w in logspace(1e-6, 1e4, 10_000) {
        // compared after scaling by e^{w²/2}
        let (lower, value, upper) = normal_tail_envelope(w);
        t.le(lower, value, &[("w", w), ("side", 0.0)]);
        t.le(value, upper, &[("w", w), ("side", 1.0)]);
    }
    Ok(t.finish())
}

/// 10⁴ points: 10 values each of μ, σ, n and t/(nμ), which includes t = nμ.
fn check_cdf_shift(c: &Constants) -> Result<InequalityCheck> {
    let mut tally = Tally::new(
        "cdf_shift",
        "|Phi((n mu - t)/(sigma sqrt n)) - Phi((n mu - t) sqrt(mu)/(sigma sqrt t))| <= \
         sqrt2/(e sqrt pi) sigma/sqrt(t mu) if t <= n mu, \
         16/(e^2 sqrt(2pi)) t^2 sigma^3/(sqrt(n) mu^2 (t - n mu)^2 (sqrt(n mu t) + t)) otherwise",
        SLACK,
    );
    let ns = [1u64, 2, 5, 10, 50, 100, 1_000, 10_000, 100_000, 1_000_000];
    let ratios = [1e-3, 0.1, 0.5, 0.9, 1.0, 1.1, 2.0, 10.0, 100.0, 1e3];
    for mu in logspace(1e-2, 1e2, 10) {
        for sigma in logspace(1e-2, 1e2, 10) {
            for &n in &ns {
                for &r in &ratios {
                    let t = r * n as f64 * mu;
                    let lhs = cdf_shift(mu, sigma, n, t);
                    let rhs = cdf_shift_bound_with(c, mu, sigma, n, t)?;
                    tally.le(
                        lhs,
                        rhs,
                        &[("mu", mu), ("sigma", sigma), ("n", n as f64), ("t", t)],
                    );
                }
            }
        }
    }
    Ok(tally.finish())
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn check_sup_identities(_: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "sup_identities",
        "sup_{x>=0} x^2 e^{-x^2/2} = 2/e at x = sqrt2; sup_{x>=0} x^4 e^{-x^2/2} = 16/e^2 at x = 2",
        SLACK,
    );
    let cases: [(f64, f64, f64); 2] = [(2.0, 2.0 / E, 2f64.sqrt()), (4.0, 16.0 / (E * E), 2.0)];
    for (k, (power, sup, at)) in cases.into_iter().enumerate() {
        let f = |x: f64| x.powf(power) * (-0.5 * x * x).exp();
        let (x, v) = golden_max(f, 0.0, 10.0);
        t.near_zero(v - sup, IDENTITY_TOL, &[("power", power), ("x", x)]);
        t.near_zero(x - at, 1e-6, &[("power", power), ("x", x)]);
        for x in linspace(0.0, 40.0, 10_000) {
            t.le(f(x), sup, &[("power", power), ("x", x), ("case", k as f64)]);
        }
    }
    Ok(t.finish())
}

fn check_tail_envelopes(c: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "tail_envelopes",
        "for z >= 0: min(1/2, 1/(z sqrt(2pi))) e^{-z^2/2} <= 1.176 (1+z)^-2, \
         (1+z^2/2)^-2 <= 1.867 (1+z)^-2, (1+z^2/8)^-2 <= 4 (1+z)^-2; \
         for z > 2: e^{-z/2} <= 16 e^{-1.5} (1+z)^-2, and the exponential envelopes \
         used to collect the truncated-deviation constant",
        SLACK,
    );
    let sqrt_2pi = (2.0 * PI).sqrt();
    for z in linspace(0.0, 100.0, 10_000) {
        let q = (1.0 + z) * (1.0 + z);
        let mills = 0.5f64.min(1.0 / (z * sqrt_2pi)) * (-0.5 * z * z).exp();
        t.le(
            mills,
            c.envelope_normal_tail / q,
            &[("z", z), ("envelope", 0.0)],
        );
        t.le(
            (1.0 + 0.5 * z * z).powi(-2),
            c.envelope_half_square / q,
            &[("z", z), ("envelope", 1.0)],
        );
        t.le(
            (1.0 + z * z / 8.0).powi(-2),
            c.envelope_eighth_square / q,
            &[("z", z), ("envelope", 2.0)],
        );
    }
    let gamma2 = (E * E - 2.0).exp();
    for z in linspace(2.0, 100.0, 10_001).skip(1) {
        let q = (1.0 + z) * (1.0 + z);
        let ez = (-0.5 * z).exp();
        t.le(ez, c.envelope_exp / q, &[("z", z), ("envelope", 3.0)]);
        // pieces of the smoothness constant 25.8 + 20e^{e²−2}/√(2π)
        let a = 4.0 * (1.0 + z * z) * (1.0 + z.powi(3)) * (-0.375 * z * z).exp() / (z * sqrt_2pi);
        t.le(a, 25.8 * ez, &[("z", z), ("envelope", 4.0)]);
        let b = 8.0 * (1.0 + z * z) * E * E * (-z).exp() * (E * E - 3.0).exp() / (z * sqrt_2pi);
        t.le(
            b,
            20.0 * gamma2 / sqrt_2pi * ez,
            &[("z", z), ("envelope", 5.0)],
        );
        // pieces of the truncated-deviation constant
        t.le(
            0.5 * (-0.375 * z * z).exp(),
            0.5 * (-0.5f64).exp() * ez,
            &[("z", z), ("envelope", 6.0)],
        );
        t.le(
            (-0.5 * z * z).exp() / (z * sqrt_2pi),
            (-1.0f64).exp() / (2.0 * sqrt_2pi) * ez,
            &[("z", z), ("envelope", 7.0)],
        );
        t.le(
            (-0.375 * z * z).exp() / z,
            0.5 * (-0.5f64).exp() * ez,
            &[("z", z), ("envelope", 8.0)],
        );
    }
    Ok(t.finish())
}

fn check_chen_shao(_: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "chen_shao",
        "sqrt(2pi)(1+w^2) e^{w^2/2} Phi(w) + w <= 2/(1+|w|^3) for w <= 0, and its mirror \
         sqrt(2pi)(1+w^2) e^{w^2/2}(1-Phi(w)) - w <= 2/(1+w^3) for w >= 0",
        SLACK,
    );
    for w in linspace(-50.0, 0.0, 10_000) {
        t.le(chen_shao_lhs(w), 2.0 / (1.0 + w.abs().powi(3)), &[("w", w)]);
        t.le(
            chen_shao_reflected_lhs(-w),
            2.0 / (1.0 + w.abs().powi(3)),
            &[("w", -w)],
        );
    }
    Ok(t.finish())
}

fn stein_z_grid() -> Vec<f64> {
    let mut zs: Vec<f64> = linspace(-10.0, 10.0, 81).collect();
    zs.extend([-30.0, -20.0, 20.0, 30.0]);
    zs
}

fn check_stein_solution(_: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "stein_solution",
        "f_z solves f' - w f = 1(w <= z) - Phi(z) (residual <= 1e-10 off the jump), \
         |f_z'| <= 1, 0 < f_z <= min(sqrt(2pi)/4, 1/|z|), and w f_z(w) is nondecreasing",
        SLACK,
    );
    let ws: Vec<f64> = linspace(-30.0, 30.0, 1201).collect();
    for z in stein_z_grid() {
        let cap = F_SUP.min(if z == 0.0 {
            f64::INFINITY
        } else {
            1.0 / z.abs()
        });
        let phi = cdf(z);
        let mut prev = f64::NEG_INFINITY;
        for &w in &ws {
            let f = f_raw(z, w);
            let fl = fprime_left_raw(z, w);
            let fr = fprime_right_raw(z, w);
            let at = [("z", z), ("w", w)];
            let ind = if w <= z { 1.0 } else { 0.0 };
            t.near_zero(fl - w * f - (ind - phi), IDENTITY_TOL, &at);
            if w != z {
                t.near_zero(fr - w * f - (ind - phi), IDENTITY_TOL, &at);
            }
            t.le(fl.abs(), 1.0, &at);
            t.le(fr.abs(), 1.0, &at);
            t.le(f, cap, &at);
            t.le(0.0, f, &at);
            let wf = w * f;
            t.le(prev, wf, &at);
            prev = wf;
        }
    }
    Ok(t.finish())
}

fn check_g_derivative(_: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "g_derivative",
        "g(w) = (w f_z(w))' matches central finite differences (step 1e-6) within 1e-6 away from w = z",
        SLACK,
    );
    let h = 1e-6;
    for z in linspace(-3.0, 10.0, 27) {
        for w in linspace(-10.0, 12.0, 2201) {
            if (w - z).abs() < 4.0 * h {
                continue;
            }
            let fd = ((w + h) * f_raw(z, w + h) - (w - h) * f_raw(z, w - h)) / (2.0 * h);
            t.near_zero(g_raw(z, w) - fd, 1e-6, &[("z", z), ("w", w)]);
        }
    }
    Ok(t.finish())
}

pub const G_CASE_Z: [f64; 6] = [2.1, 2.5, 3.0, 5.0, 10.0, 30.0];

fn check_g_case_bounds(_: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "g_case_bounds",
        "for z > 2: g(w) <= 4(1+z^2)(1+z^3) e^{z^2/8}(1-Phi(z))/(1+|w|^3) if w <= z/2, \
         and g(w) <= 8(1+z^2) e^{z^2/2}(1-Phi(z)) if w > z/2",
        SLACK,
    );
    for z in G_CASE_Z {
        for w in linspace(-50.0, 50.0, 10_001) {
            t.le(g_raw(z, w), g_case_bound_raw(z, w), &[("z", z), ("w", w)]);
        }
    }
    Ok(t.finish())
}

// ---------------------------------------------------------------------------
// enumeration checks

struct Enumerated {
    family: SummandFamily,
    profile: SummandProfile,
    /// sum of all `n` summands
    full: Vec<Outcome>,
    /// sum of `n − 1` summands (law of the leave-one-out sum)
    loo: Vec<Outcome>,
}

fn enumerated_families() -> Result<Vec<Enumerated>> {
    SummandFamily::defaults()
        .into_iter()
        .map(|family| {
            Ok(Enumerated {
                profile: family.profile()?,
                full: family.enumerate(family.n)?,
                loo: family.enumerate(family.n - 1)?,
                family,
            })
        })
        .collect()
}

fn fam_id(i: usize) -> (&'static str, f64) {
    ("family", i as f64)
}

fn check_nonuniform_enumeration(c: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "nonuniform_enumeration",
        "|P(W <= z) - Phi(z)| <= 2 sum_i P(|xi_i| > (1 v |z|)/4) + C2 (1+|z|)^-2 (beta2 + beta3) \
         with C2 in {15, 37, 25431}, exact law of W",
        SLACK,
    );
    for (i, e) in enumerated_families()?.iter().enumerate() {
        for z in linspace(-6.0, 6.0, 241) {
            let lhs = (probability(&e.full, |o| o.w <= z) - cdf(z)).abs();
            let rhs = besseen_bound_with(c, &e.profile, z).total;
            t.le(lhs, rhs, &[fam_id(i), ("z", z)]);
        }
    }
    Ok(t.finish())
}

const IDENTITY_Z: [f64; 10] = [-2.0, -1.0, 0.0, 0.3, 1.0, 2.0, 2.5, 3.0, 4.0, 6.0];

/// `E ξ² 1(ξ > 1)` and `E ξ 1(ξ > 1)` for one summand.
fn upper_excess(family: &SummandFamily) -> (f64, f64) {
    family
        .atoms
        .iter()
        .filter(|a| a.0 > 1.0)
        .fold((0.0, 0.0), |(s2, s1), &(v, p)| (s2 + p * v * v, s1 + p * v))
}

fn check_stein_identity(_: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "stein_identity",
        "P(Wbar <= z) - Phi(z) = E f_z'(Wbar) - E Wbar f_z(Wbar) = R1 + R2 + R3 exactly \
         (residual <= 1e-10), Wbar the sum of one-sided truncations xi 1(xi <= 1)",
        0.0,
    );
    for (i, e) in enumerated_families()?.iter().enumerate() {
        let n = e.family.n as f64;
        let trunc = e.family.truncated_atoms();
        let (ex2_big, ex1_big) = upper_excess(&e.family);
        let ex2_bar: f64 = trunc.iter().map(|&(v, p)| p * v * v).sum();
        for z in IDENTITY_Z {
            let lhs = probability(&e.full, |o| o.w_bar <= z) - cdf(z);
            let fprime = expect(&e.full, |o| fprime_left_raw(z, o.w_bar));
            let wf = expect(&e.full, |o| o.w_bar * f_raw(z, o.w_bar));
            t.near_zero(
                lhs - (fprime - wf),
                IDENTITY_TOL,
                &[fam_id(i), ("z", z), ("form", 0.0)],
            );

            // Σᵢ ∫ E f'(W̄⁽ⁱ⁾ + u) K̄ᵢ(u) du = n Σ_x p x E[f(L + x) − f(L)]
            let kernel: f64 = n * trunc
                .iter()
                .map(|&(x, p)| {
                    p * x * expect(&e.loo, |o| f_raw(z, o.w_bar + x) - f_raw(z, o.w_bar))
                })
                .sum::<f64>();
            let r1 = n * ex2_big * fprime;
            let r2 = fprime * n * ex2_bar - kernel;
            let r3 = n * ex1_big * expect(&e.loo, |o| f_raw(z, o.w_bar));
            t.near_zero(
                lhs - (r1 + r2 + r3),
                IDENTITY_TOL,
                &[fam_id(i), ("z", z), ("form", 1.0)],
            );
        }
    }
    Ok(t.finish())
}

fn check_k_function_identity(_: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "k_function_identity",
        "sum_i int_{-inf}^1 Kbar_i(u) du = sum_i E xbar_i^2 = 1 - sum_i E xi_i^2 1(xi_i > 1), \
         Kbar_i(u) = E[xbar_i (1(0 <= u <= xbar_i) - 1(xbar_i <= u < 0))]",
        0.0,
    );
    for (i, e) in enumerated_families()?.iter().enumerate() {
        let n = e.family.n as f64;
        let trunc = e.family.truncated_atoms();
        let kbar = |u: f64| -> f64 {
            trunc
                .iter()
                .map(|&(x, p)| {
                    let up = (0.0 <= u && u <= x) as u8 as f64;
                    let down = (x <= u && u < 0.0) as u8 as f64;
                    p * x * (up - down)
                })
                .sum()
        };
        let mut pts: Vec<f64> = trunc.iter().map(|a| a.0).chain([0.0, 1.0]).collect();
        let lo = pts.iter().cloned().fold(0.0, f64::min) - 1.0;
        pts.push(lo);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let integral = n * integrate(kbar, &pts, 1.0, Tolerance::default())?;
        let second: f64 = n * trunc.iter().map(|&(v, p)| p * v * v).sum::<f64>();
        let (ex2_big, _) = upper_excess(&e.family);
        t.near_zero(integral - second, IDENTITY_TOL, &[fam_id(i), ("form", 0.0)]);
        t.near_zero(
            second - (1.0 - n * ex2_big),
            IDENTITY_TOL,
            &[fam_id(i), ("form", 1.0)],
        );
    }
    Ok(t.finish())
}

fn check_truncated_deviation(c: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "truncated_deviation",
        "|P(Wbar <= z) - Phi(z)| <= 7115 e^{-z/2} (beta2 + beta3) for z > 2, exact law of Wbar",
        SLACK,
    );
    for (i, e) in enumerated_families()?.iter().enumerate() {
        for z in linspace(2.0, 8.0, 241).skip(1) {
            let lhs = (probability(&e.full, |o| o.w_bar <= z) - cdf(z)).abs();
            let rhs = c.truncated_deviation * (-0.5 * z).exp() * e.profile.beta_sum();
            t.le(lhs, rhs, &[fam_id(i), ("z", z)]);
        }
    }
    Ok(t.finish())
}

pub const SMOOTHNESS_Z: [f64; 5] = [2.1, 2.5, 3.0, 4.0, 6.0];

fn check_truncated_smoothness(c: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "truncated_smoothness",
        "for z > 2 and s <= t <= 1: E[(L+t) f_z(L+t) - (L+s) f_z(L+s)] <= \
         (25.8 + 20 e^{e^2-2}/sqrt(2pi)) e^{-z/2} min(1, |s|+|t|), L the leave-one-out truncated sum",
        SLACK,
    );
    let mut pairs: Vec<(f64, f64)> = (1..=50u64)
        .map(|k| {
            let (u, v) = (halton(k, 2), halton(k, 3));
            (-3.0 + 4.0 * u.min(v), -3.0 + 4.0 * u.max(v))
        })
        .collect();
    pairs.extend([(0.5, 0.5), (-0.5, 0.5), (-3.0, 1.0)]);
    for (i, e) in enumerated_families()?.iter().enumerate() {
        for z in SMOOTHNESS_Z {
            for &(s, u) in &pairs {
                let lhs = expect(&e.loo, |o| {
                    (o.w_bar + u) * f_raw(z, o.w_bar + u) - (o.w_bar + s) * f_raw(z, o.w_bar + s)
                });
                let rhs = c.smoothness * (-0.5 * z).exp() * (s.abs() + u.abs()).min(1.0);
                t.le(lhs, rhs, &[fam_id(i), ("z", z), ("s", s), ("t", u)]);
            }
        }
    }
    Ok(t.finish())
}

fn check_concentration_bounds(c: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "concentration_bounds",
        "exact left sides of: P(S_n >= x) <= P(max eta_i > (x v B)/p) + e^p (1 + x^2/(p B^2))^-p; \
         E e^{t Wbar} <= exp((e^t - 1 - t) B^2); \
         P(W >= z, max xi_i > 1) <= 2 sum_i P(|xi_i| > z/(2p)) + e^p (1 + z^2/(4p))^-p beta2; \
         P(a <= Wbar^(i) <= b) <= 6 (min(1, b-a) + beta2 + beta3) e^{-a/2}",
        SLACK,
    );
    let xs: Vec<f64> = linspace(0.25, 6.0, 24).collect();
    let ps = [1.0, 1.5, 2.0, 3.0, 4.0];
    for (i, e) in enumerated_families()?.iter().enumerate() {
        let n = e.family.n;
        let trunc = e.family.truncated_atoms();
        let trunc_profile = SummandProfile::from_summand_atoms(&trunc, n as u64)?;
        let b_bar = (n as f64 * trunc.iter().map(|&(v, p)| p * v * v).sum::<f64>()).sqrt();
        for &x in &xs {
            let p_full = probability(&e.full, |o| o.w >= x);
            let p_bar = probability(&e.full, |o| o.w_bar >= x);
            for &p in &ps {
                let at = [fam_id(i), ("x", x), ("p", p), ("bound", 0.0)];
                t.le(p_full, concentration_tail(&e.profile, 1.0, x, p)?, &at);
                t.le(
                    p_full,
                    concentration_tail_union(&e.profile, 1.0, x, p)?,
                    &at,
                );
                t.le(p_bar, concentration_tail(&trunc_profile, 1.0, x, p)?, &at);
                t.le(p_bar, concentration_tail(&trunc_profile, b_bar, x, p)?, &at);
            }
        }
        for tt in [0.25, 0.5, 1.0, 2.0, 3.0] {
            let mgf = expect(&e.full, |o| (tt * o.w_bar).exp());
            let at = [fam_id(i), ("t", tt), ("bound", 1.0)];
            t.le(mgf, mgf_bound(1.0, 1.0, tt)?, &at);
            t.le(mgf, mgf_bound(1.0, b_bar, tt)?, &at);
        }
        for z in linspace(2.0, 6.0, 41) {
            let lhs = probability(&e.full, |o| o.w >= z && o.max > 1.0);
            for p in [2.0, 3.0, 4.0] {
                let at = [fam_id(i), ("z", z), ("p", p), ("bound", 2.0)];
                t.le(lhs, truncated_max_tail(&e.profile, z, p)?, &at);
            }
        }
        for a in linspace(-3.0, 4.0, 29) {
            for width in [0.01, 0.1, 0.5, 1.0, 2.0] {
                let b = a + width;
                let lhs = probability(&e.loo, |o| a <= o.w_bar && o.w_bar <= b);
                let at = [fam_id(i), ("a", a), ("b", b), ("bound", 3.0)];
                t.le(lhs, smoothing_concentration_with(c, a, b, &e.profile)?, &at);
            }
        }
    }
    // point masses at zero: the maximum term vanishes
    let zero = SummandProfile::from_summand_atoms(&[(0.0, 1.0)], 6)?;
    for &x in &xs {
        for &p in &ps {
            let rhs = concentration_tail(&zero, 1.0, x, p)?;
            let exp_term = (p - p * (x * x / p).ln_1p()).exp();
            t.near_zero(
                rhs - exp_term,
                IDENTITY_TOL,
                &[("x", x), ("p", p), ("bound", 4.0)],
            );
            t.le(0.0, rhs, &[("x", x), ("p", p), ("bound", 4.0)]);
        }
    }
    Ok(t.finish())
}

fn check_constants(c: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "constants",
        "1.867 e^2 + 1.176 <= 15; 4.1 (1+2)^2 <= 37; 4 e^2 + (16/e^1.5) 7115 <= 25431; \
         128 + 2 * 25431 = 50990; 50990/(1+224)^2 > 1; smoothness constant 4x = 103.2 + 80 e^{e^2-2}/sqrt(2pi)",
        SLACK,
    );
    t.le(
        c.envelope_half_square * E * E + c.envelope_normal_tail,
        c.c2_beta_large,
        &[("item", 0.0)],
    );
    t.le(c.uniform * 9.0, c.c2_z_small, &[("item", 1.0)]);
    t.le(
        4.0 * E * E + c.envelope_exp * c.truncated_deviation,
        c.c2_z_large,
        &[("item", 2.0)],
    );
    t.near_zero(
        c.tail_markov + 2.0 * c.c2_z_large - c.renewal,
        0.0,
        &[("item", 3.0)],
    );
    t.le(
        1.0,
        c.renewal / (1.0 + c.renewal_threshold).powi(2),
        &[("item", 4.0)],
    );
    let four_x = 103.2 + 80.0 * (E * E - 2.0).exp() / SQRT_2PI;
    t.near_zero(4.0 * c.smoothness - four_x, 1e-9, &[("item", 5.0)]);
    t.near_zero(2.0 * 64.0 - c.tail_markov, 0.0, &[("item", 6.0)]);
    Ok(t.finish())
}

/// Sum of the three bounds derived for the remainder terms of the truncated
/// deviation, taken term by term.
pub fn truncated_deviation_terms() -> [f64; 3] {
    let s = SQRT_2PI;
    let r1 = 0.5 * (-0.5f64).exp() + (-1.0f64).exp() / (2.0 * s) + (E - 2.0).exp();
    let r2 = 30.0 * 0.5f64.exp() + 103.2 + 80.0 * (E * E - 2.0).exp() / s;
    let r3 = 0.5 * ((-0.5f64).exp() + (E - 2.0).exp());
    [r1, r2, r3]
}

/// Not part of `all`: audits the arithmetic that collects the remainder
/// bounds into the constant 7115.
fn check_constant_assembly(c: &Constants) -> Result<InequalityCheck> {
    let mut t = Tally::new(
        "constant_assembly",
        "term-by-term sum of the R1, R2, R3 bounds <= 7115, and the implied C2 = 4e^2 + 16 e^-1.5 K <= 25431",
        SLACK,
    );
    let k: f64 = truncated_deviation_terms().iter().sum();
    t.le(k, c.truncated_deviation, &[("item", 0.0), ("sum", k)]);
    t.le(
        4.0 * E * E + c.envelope_exp * k,
        c.c2_z_large,
        &[("item", 1.0), ("sum", k)],
    );
    Ok(t.finish())
}

// ---------------------------------------------------------------------------
// registry

type CheckFn = fn(&Constants) -> Result<InequalityCheck>;

pub struct CheckSpec {
    pub id: &'static str,
    /// What the check establishes, in words.
    pub covers: &'static str,
    /// Included when `all` is requested.
    pub default: bool,
    run: CheckFn,
}

pub const CHECKS: &[CheckSpec] = &[
    CheckSpec {
        id: "constants",
        covers: "constant arithmetic of the bound regimes",
        default: true,
        run: check_constants,
    },
    CheckSpec {
        id: "normal_tail",
        covers: "two-sided normal tail bound",
        default: true,
        run: check_normal_tail,
    },
    CheckSpec {
        id: "cdf_shift",
        covers: "normal CDF shift bound",
        default: true,
        run: check_cdf_shift,
    },
    CheckSpec {
        id: "sup_identities",
        covers: "suprema of x^2 e^{-x^2/2} and x^4 e^{-x^2/2}",
        default: true,
        run: check_sup_identities,
    },
    CheckSpec {
        id: "tail_envelopes",
        covers: "polynomial and exponential envelopes",
        default: true,
        run: check_tail_envelopes,
    },
    CheckSpec {
        id: "chen_shao",
        covers: "Chen-Shao inequality and its mirror",
        default: true,
        run: check_chen_shao,
    },
    CheckSpec {
        id: "stein_solution",
        covers: "Stein equation, |f'| <= 1, range of f, monotone w f",
        default: true,
        run: check_stein_solution,
    },
    CheckSpec {
        id: "g_derivative",
        covers: "closed form of (w f)' vs finite differences",
        default: true,
        run: check_g_derivative,
    },
    CheckSpec {
        id: "g_case_bounds",
        covers: "case bounds on (w f)'",
        default: true,
        run: check_g_case_bounds,
    },
    CheckSpec {
        id: "nonuniform_enumeration",
        covers: "non-uniform Berry-Esseen bound vs exact laws",
        default: true,
        run: check_nonuniform_enumeration,
    },
    CheckSpec {
        id: "stein_identity",
        covers: "Stein identity and R1+R2+R3 decomposition",
        default: true,
        run: check_stein_identity,
    },
    CheckSpec {
        id: "k_function_identity",
        covers: "integral of the K function",
        default: true,
        run: check_k_function_identity,
    },
    CheckSpec {
        id: "truncated_deviation",
        covers: "7115 e^{-z/2} bound for the truncated sum",
        default: true,
        run: check_truncated_deviation,
    },
    CheckSpec {
        id: "truncated_smoothness",
        covers: "smoothness of E[(L+u) f(L+u)] in u",
        default: true,
        run: check_truncated_smoothness,
    },
    CheckSpec {
        id: "concentration_bounds",
        covers: "tail, mgf, truncated-max and smoothing concentration",
        default: true,
        run: check_concentration_bounds,
    },
    CheckSpec {
        id: "constant_assembly",
        covers: "audit of how the remainder bounds sum to 7115",
        default: false,
        run: check_constant_assembly,
    },
];

/// Every claim the verifier must cover, paired with the check that does.
pub const COVERAGE: &[(&str, &str)] = &[
    ("normal tail bounds", "normal_tail"),
    ("normal CDF shift bound", "cdf_shift"),
    (
        "Stein solution bounds |f'| <= 1, 0 < f <= min(sqrt(2pi)/4, 1/|z|)",
        "stein_solution",
    ),
    (
        "closed form of (w f_z)' vs finite differences",
        "g_derivative",
    ),
    ("Chen-Shao inequality", "chen_shao"),
    ("case bounds on g", "g_case_bounds"),
    (
        "smoothness of the truncated leave-one-out sum",
        "truncated_smoothness",
    ),
    ("K function integral identity", "k_function_identity"),
    (
        "Stein identity and remainder decomposition",
        "stein_identity",
    ),
    ("7115 e^{-z/2} truncated deviation", "truncated_deviation"),
    ("polynomial and exponential envelopes", "tail_envelopes"),
    (
        "suprema of x^2 e^{-x^2/2}, x^4 e^{-x^2/2}",
        "sup_identities",
    ),
    (
        "concentration, mgf, truncated-max and smoothing bounds",
        "concentration_bounds",
    ),
    (
        "non-uniform Berry-Esseen bound on exact laws",
        "nonuniform_enumeration",
    ),
    ("regime constants and their arithmetic", "constants"),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub passed: bool,
    pub checks: Vec<InequalityCheck>,
    pub constants: Constants,
}

/// Resolve a selection (`all`, or check ids) into registry entries.
pub fn select(names: &[String]) -> Result<Vec<&'static CheckSpec>> {
    if names.is_empty() || names.iter().any(|n| n == "all") {
        return Ok(CHECKS.iter().filter(|c| c.default).collect());
    }
    names
        .iter()
        .map(|n| {
            CHECKS.iter().find(|c| c.id == n).ok_or_else(|| {
                let known: Vec<&str> = CHECKS.iter().map(|c| c.id).collect();
                Error::Config(format!(
                    "unknown check `{n}`; known: all, {}",
                    known.join(", ")
                ))
            })
        })
        .collect()
}

pub fn run_check(id: &str, c: &Constants) -> Result<InequalityCheck> {
    let spec = select(&[id.to_string()])?;
    (spec[0].run)(c)
}

/// Run the selected checks (concurrently under `exec`); report order follows
/// the selection order.
pub fn run(names: &[String], c: &Constants, exec: Execution) -> Result<Report> {
    let specs = select(names)?;
    let checks = exec.try_map_indexed(specs.len(), |i| (specs[i].run)(c))?;
    Ok(Report {
        schema_version: crate::cli::SCHEMA_VERSION,
        passed: checks.iter().all(|c| c.passed),
        checks,
        constants: c.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coverage_manifest_is_complete() {
        for (claim, id) in COVERAGE {
            let spec = CHECKS.iter().find(|c| c.id == *id);
            assert!(
                spec.is_some_and(|s| s.default),
                "{claim} -> {id} not registered"
            );
        }
        for spec in CHECKS.iter().filter(|c| c.default) {
            assert!(
                COVERAGE.iter().any(|(_, id)| *id == spec.id),
                "{} runs but is not in the manifest",
                spec.id
            );
        }
        let mut ids: Vec<&str> = CHECKS.iter().map(|c| c.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), CHECKS.len());
    }

    #[test]
    fn halton_points() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 2), 0.25);
        assert!((halton(1, 3) - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn tally_flags_violations() {
        let mut t = Tally::new("x", "y", SLACK);
        t.le(1.0, 2.0, &[("a", 1.0)]);
        t.le(2.0, 1.0, &[("a", 2.0)]);
        t.le(f64::NAN, 1.0, &[("a", 3.0)]);
        let r = t.finish();
        assert_eq!(r.violations, 2);
        assert!(!r.passed);
        assert_eq!(r.worst_point["a"], 3.0);
        assert_eq!(r.offending_point.unwrap()["a"], 2.0);
    }

    #[test]
    fn unknown_check_is_config_error() {
        assert!(matches!(select(&["nope".into()]), Err(Error::Config(_))));
        assert_eq!(select(&["all".into()]).unwrap().len(), COVERAGE.len());
    }

    #[test]
    fn quick_checks_pass() {
        let c = Constants::default();
        for id in [
            "constants",
            "sup_identities",
            "chen_shao",
            "k_function_identity",
            "stein_identity",
        ] {
            let r = run_check(id, &c).unwrap();
            assert!(r.passed, "{id}: {r:?}");
        }
    }

    #[test]
    fn corrupted_constant_is_caught() {
        let mut c = Constants::default();
        c.set("cdf_shift_near", 0.01).unwrap();
        let r = run_check("cdf_shift", &c).unwrap();
        assert!(!r.passed);
        assert!(r.offending_point.is_some());
    }

    #[test]
    fn remainder_terms_exceed_printed_constant() {
        let k: f64 = truncated_deviation_terms().iter().sum();
        assert!((k - 7_145.777_411_570_059).abs() < 1e-9);
        let r = run_check("constant_assembly", &Constants::default()).unwrap();
        assert!(!r.passed);
    }
}
