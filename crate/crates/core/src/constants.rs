//! Numerical constants of the bounds, gathered in one overridable table so
//! the verifier can be run against deliberately corrupted values.

use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constants {
    /// C₂ when β₂ + β₃ ≥ 1.
    pub c2_beta_large: f64,
    /// C₂ when β₂ + β₃ < 1 and |z| ≤ 2.
    pub c2_z_small: f64,
    /// C₂ when β₂ + β₃ < 1 and |z| > 2.
    pub c2_z_large: f64,
    /// Markov bound on the summand tail sum, `2·8²`.
    pub tail_markov: f64,
    /// Coefficient of `(1+|z|)^{−2}` in the renewal bound.
    pub renewal: f64,
    /// Standardized distance beyond which the renewal bound drops below one.
    pub renewal_threshold: f64,
    /// Uniform Berry–Esseen constant.
    pub uniform: f64,
    /// `|P(W̄ ≤ z) − Φ(z)| ≤ K e^{−z/2}(β₂+β₃)` for z > 2.
    pub truncated_deviation: f64,
    /// `25.8 + 20e^{e²−2}/√(2π)`.
    pub smoothness: f64,
    /// `√2/(e√π)`, normal CDF shift bound for t ≤ nμ.
    pub cdf_shift_near: f64,
    /// `16/(e²√(2π))`, normal CDF shift bound for t > nμ.
    pub cdf_shift_far: f64,
    /// `32/(e²√(2π))`, renewal bound smooth term for t > nμ.
    pub renewal_far: f64,
    /// Leading factor of the smoothing concentration inequality.
    pub smoothing: f64,
    /// `min(1/2, 1/(z√(2π)))e^{−z²/2} ≤ K(1+z)^{−2}`.
    pub envelope_normal_tail: f64,
    /// `(1+z²/2)^{−2} ≤ K(1+z)^{−2}`.
    pub envelope_half_square: f64,
    /// `(1+z²/8)^{−2} ≤ K(1+z)^{−2}` for z ≥ 2.
    pub envelope_eighth_square: f64,
    /// `e^{−z/2} ≤ K(1+z)^{−2}` for z > 2.
    pub envelope_exp: f64,
}

impl Default for Constants {
    fn default() -> Self {
        let sqrt_2pi = (2.0 * PI).sqrt();
        Constants {
            c2_beta_large: 15.0,
            c2_z_small: 37.0,
            c2_z_large: 25431.0,
            tail_markov: 128.0,
            renewal: 50990.0,
            renewal_threshold: 224.0,
            uniform: 4.1,
            truncated_deviation: 7115.0,
            smoothness: 25.8 + 20.0 * (E * E - 2.0).exp() / sqrt_2pi,
            cdf_shift_near: 2.0_f64.sqrt() / (E * PI.sqrt()),
            cdf_shift_far: 16.0 / (E * E * sqrt_2pi),
            renewal_far: 32.0 / (E * E * sqrt_2pi),
            smoothing: 6.0,
            envelope_normal_tail: 1.176,
            envelope_half_square: 1.867,
            envelope_eighth_square: 4.0,
            envelope_exp: 16.0 / E.powf(1.5),
        }
    }
}

impl Constants {
    pub const NAMES: [&'static str; 17] = [
        "c2_beta_large",
        "c2_z_small",
        "c2_z_large",
        "tail_markov",
        "renewal",
        "renewal_threshold",
        "uniform",
        "truncated_deviation",
        "smoothness",
        "cdf_shift_near",
        "cdf_shift_far",
        "renewal_far",
        "smoothing",
        "envelope_normal_tail",
        "envelope_half_square",
        "envelope_eighth_square",
        "envelope_exp",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "c2_beta_large" => &mut self.c2_beta_large,
            "c2_z_small" => &mut self.c2_z_small,
            "c2_z_large" => &mut self.c2_z_large,
            "tail_markov" => &mut self.tail_markov,
            "renewal" => &mut self.renewal,
            "renewal_threshold" => &mut self.renewal_threshold,
            "uniform" => &mut self.uniform,
            "truncated_deviation" => &mut self.truncated_deviation,
            "smoothness" => &mut self.smoothness,
            "cdf_shift_near" => &mut self.cdf_shift_near,
            "cdf_shift_far" => &mut self.cdf_shift_far,
            "renewal_far" => &mut self.renewal_far,
            "smoothing" => &mut self.smoothing,
            "envelope_normal_tail" => &mut self.envelope_normal_tail,
            "envelope_half_square" => &mut self.envelope_half_square,
            "envelope_eighth_square" => &mut self.envelope_eighth_square,
            "envelope_exp" => &mut self.envelope_exp,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.clone().slot(name).map(|v| *v)
    }

    /// Replace one constant by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::Config(format!("constant {name} must be finite")));
        }
        match self.slot(name) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(Error::Config(format!(
                "unknown constant `{name}`; known: {}",
                Self::NAMES.join(", ")
            ))),
        }
    }

    /// Apply a `name=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{spec}` is not name=value")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("override `{spec}` has a non-numeric value")))?;
        self.set(name.trim(), value)
    }
}
