//! Inter-arrival laws: moments, truncated moments, tail probabilities and
//! reproducible sampling.
//!
//! Pareto is parameterized by `scale` (the left edge of the support) and
//! shape `alpha`, with density `α·scale^α / x^{α+1}` on `[scale, ∞)`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, Gamma, LogNormal, Pareto};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::special_fn;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Exponential {
        rate: f64,
    },
    Pareto {
        scale: f64,
        alpha: f64,
    },
    Gamma {
        shape: f64,
        rate: f64,
    },
    #[serde(rename = "lognormal")]
    LogNormal {
        mu_log: f64,
        sigma_log: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    /// `(value, probability)` pairs.
    Discrete {
        atoms: Vec<(f64, f64)>,
    },
}

/// A validated inter-arrival law with its mean and variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Family", into = "Family")]
pub struct DistributionSpec {
    family: Family,
    mu: f64,
    sigma2: f64,
}

/// Mean, variance and third absolute central moment (`∞` when it diverges).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mu: f64,
    pub sigma2: f64,
    pub gamma: f64,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidDistribution(msg.into()))
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        invalid(format!("{name} must be positive and finite, got {x}"))
    }
}

impl TryFrom<Family> for DistributionSpec {
    type Error = Error;

    fn try_from(family: Family) -> Result<Self> {
        DistributionSpec::new(family)
    }
}

impl From<DistributionSpec> for Family {
    fn from(spec: DistributionSpec) -> Family {
        spec.family
    }
}

impl DistributionSpec {
    pub fn new(family: Family) -> Result<Self> {
        let (mu, sigma2) = match &family {
            Family::Exponential { rate } => {
                positive("rate", *rate)?;
                (1.0 / rate, 1.0 / (rate * rate))
            }
            Family::Pareto { scale, alpha } => {
                positive("scale", *scale)?;
                positive("alpha", *alpha)?;
                if *alpha <= 2.0 {
                    return Err(Error::Unsupported(format!(
                        "pareto with alpha = {alpha} has infinite variance"
                    )));
                }
                let mu = alpha * scale / (alpha - 1.0);
                let var = scale * scale * alpha / ((alpha - 1.0).powi(2) * (alpha - 2.0));
                (mu, var)
            }
            Family::Gamma { shape, rate } => {
                positive("shape", *shape)?;
                positive("rate", *rate)?;
                (shape / rate, shape / (rate * rate))
            }
            Family::LogNormal { mu_log, sigma_log } => {
                if !mu_log.is_finite() {
                    return invalid("mu_log must be finite");
                }
                positive("sigma_log", *sigma_log)?;
                let s2 = sigma_log * sigma_log;
                let mu = (mu_log + 0.5 * s2).exp();
                (mu, s2.exp_m1() * mu * mu)
            }
            Family::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && *a >= 0.0 && a < b) {
                    return invalid(format!("uniform needs 0 <= a < b, got a = {a}, b = {b}"));
                }
                (0.5 * (a + b), (b - a).powi(2) / 12.0)
            }
            Family::Discrete { atoms } => {
                if atoms.is_empty() {
                    return invalid("discrete law needs at least one atom");
                }
                let mut total = 0.0;
                for &(v, p) in atoms {
                    if !(v.is_finite() && v >= 0.0) {
                        return invalid(format!("atom value {v} must be finite and >= 0"));
                    }
                    if !(p.is_finite() && p >= 0.0) {
                        return invalid(format!("atom probability {p} must be in [0, 1]"));
                    }
                    total += p;
                }
                if (total - 1.0).abs() > 1e-12 {
                    return invalid(format!("atom probabilities sum to {total}, not 1"));
                }
                let mu: f64 = atoms.iter().map(|&(v, p)| v * p).sum();
                let var: f64 = atoms.iter().map(|&(v, p)| p * (v - mu).powi(2)).sum();
                (mu, var)
            }
        };
        if !(mu > 0.0) {
            return invalid(format!("mean must be positive, got {mu}"));
        }
        Ok(DistributionSpec { family, mu, sigma2 })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(Family::Exponential { rate })
    }

    pub fn pareto(scale: f64, alpha: f64) -> Result<Self> {
        Self::new(Family::Pareto { scale, alpha })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Self::new(Family::Gamma { shape, rate })
    }

    pub fn lognormal(mu_log: f64, sigma_log: f64) -> Result<Self> {
        Self::new(Family::LogNormal { mu_log, sigma_log })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::new(Family::Uniform { a, b })
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(Family::Discrete { atoms })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// Point masses are accepted for simulation but carry no CLT scaling.
    pub fn is_degenerate(&self) -> bool {
        self.sigma2 == 0.0
    }

    /// Pareto with `alpha < 3` has a finite variance but no third moment.
    pub fn lacks_third_moment(&self) -> bool {
        matches!(self.family, Family::Pareto { alpha, .. } if alpha <= 3.0)
    }

    pub(crate) fn require_spread(&self) -> Result<f64> {
        if self.is_degenerate() {
            Err(Error::Unsupported(
                "point-mass arrivals have zero variance; normal scaling is undefined".into(),
            ))
        } else {
            Ok(self.sigma())
        }
    }

    pub fn short_name(&self) -> String {
        match &self.family {
            Family::Exponential { rate } => format!("exponential({rate})"),
            Family::Pareto { scale, alpha } => format!("pareto({scale},{alpha})"),
            Family::Gamma { shape, rate } => format!("gamma({shape},{rate})"),
            Family::LogNormal { mu_log, sigma_log } => format!("lognormal({mu_log},{sigma_log})"),
            Family::Uniform { a, b } => format!("uniform({a},{b})"),
            Family::Discrete { atoms } => format!("discrete({} atoms)", atoms.len()),
        }
    }

    pub fn moments(&self) -> Result<Moments> {
        let gamma = match &self.family {
            Family::Exponential { rate } => (12.0 / std::f64::consts::E - 2.0) / rate.powi(3),
            Family::Uniform { a, b } => (b - a).powi(3) / 32.0,
            Family::Discrete { atoms } => atoms
                .iter()
                .map(|&(v, p)| p * (v - self.mu).abs().powi(3))
                .sum(),
            Family::Pareto { alpha, .. } if *alpha <= 3.0 => f64::INFINITY,
            _ => self.abs_central_moment_on(3, f64::NEG_INFINITY, f64::INFINITY)?,
        };
        Ok(Moments {
            mu: self.mu,
            sigma2: self.sigma2,
            gamma,
        })
    }

    /// Lower edge of the support.
    fn support_min(&self) -> f64 {
        match &self.family {
            Family::Pareto { scale, .. } => *scale,
            Family::Uniform { a, .. } => *a,
            Family::Discrete { atoms } => atoms
                .iter()
                .filter(|a| a.1 > 0.0)
                .map(|a| a.0)
                .fold(f64::INFINITY, f64::min),
            _ => 0.0,
        }
    }

    /// Density for continuous families.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        let v = match &self.family {
            Family::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            Family::Pareto { scale, alpha } => {
                if x < *scale {
                    0.0
                } else {
                    alpha / scale * (scale / x).powf(alpha + 1.0)
                }
            }
            Family::Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    ((shape - 1.0) * x.ln() - rate * x + shape * rate.ln() - ln_gamma(*shape)).exp()
                }
            }
            Family::LogNormal { mu_log, sigma_log } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let u = (x.ln() - mu_log) / sigma_log;
                    special_fn::pdf(u) / (x * sigma_log)
                }
            }
            Family::Uniform { a, b } => {
                if x < *a || x > *b {
                    0.0
                } else {
                    1.0 / (b - a)
                }
            }
            Family::Discrete { .. } => return None,
        };
        Some(v)
    }

    /// `P(Z > x)`.
    pub fn survival(&self, x: f64) -> f64 {
        match &self.family {
            Family::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Family::Pareto { scale, alpha } => {
                if x <= *scale {
                    1.0
                } else {
                    (scale / x).powf(*alpha)
                }
            }
            Family::Gamma { shape, rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    gamma_ur(*shape, rate * x)
                }
            }
            Family::LogNormal { mu_log, sigma_log } => {
                if x <= 0.0 {
                    1.0
                } else {
                    special_fn::sf((x.ln() - mu_log) / sigma_log)
                }
            }
            Family::Uniform { a, b } => ((b - x) / (b - a)).clamp(0.0, 1.0),
            Family::Discrete { atoms } => atoms.iter().filter(|a| a.0 > x).map(|a| a.1).sum(),
        }
    }

    /// `P(Z < x)` (strict, which matters for discrete laws).
    pub fn cdf_below(&self, x: f64) -> f64 {
        match &self.family {
            Family::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Family::Pareto { scale, alpha } => {
                if x <= *scale {
                    0.0
                } else {
                    -(alpha * (scale / x).ln()).exp_m1()
                }
            }
            Family::Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma_lr(*shape, rate * x)
                }
            }
            Family::LogNormal { mu_log, sigma_log } => {
                if x <= 0.0 {
                    0.0
                } else {
                    special_fn::cdf((x.ln() - mu_log) / sigma_log)
                }
            }
            Family::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Family::Discrete { atoms } => atoms.iter().filter(|a| a.0 < x).map(|a| a.1).sum(),
        }
    }

    /// `P(|Z − μ| > d)`.
    pub fn abs_deviation_tail(&self, d: f64) -> f64 {
        if d < 0.0 {
            return 1.0;
        }
        (self.survival(self.mu + d) + self.cdf_below(self.mu - d)).min(1.0)
    }

    /// `E[(Z−μ)^k; lo < Z−μ < hi]` for continuous families, via closed forms
    /// where available and adaptive quadrature otherwise.
    pub fn central_moment_on(&self, k: u32, lo: f64, hi: f64) -> Result<f64> {
        let lo = lo.max(self.support_min() - self.mu);
        if !(hi > lo) {
            return Ok(0.0);
        }
        match &self.family {
            Family::Exponential { rate } => Ok(exponential_moment(*rate, k, lo, hi)),
            Family::Pareto { scale, alpha } => {
                Ok(pareto_moment(*scale, *alpha, self.mu, k, lo, hi))
            }
            Family::Uniform { a, b } => {
                let hi = hi.min(b - self.mu);
                if hi <= lo {
                    return Ok(0.0);
                }
                let kp = k as i32 + 1;
                Ok((hi.powi(kp) - lo.powi(kp)) / (kp as f64 * (b - a)))
            }
            Family::Discrete { .. } => Err(Error::Unsupported(
                "truncated moments of discrete laws are summed over atoms".into(),
            )),
            _ => self.central_moment_on_quadrature(k, lo, hi),
        }
    }

    /// Quadrature route for [`Self::central_moment_on`]; available for every
    /// continuous family and used to cross-check the closed forms.
    pub fn central_moment_on_quadrature(&self, k: u32, lo: f64, hi: f64) -> Result<f64> {
        if self.pdf(0.5 * self.mu).is_none() {
            return Err(Error::Unsupported("quadrature needs a density".into()));
        }
        let lo = lo.max(self.support_min() - self.mu);
        let hi = match &self.family {
            Family::Uniform { b, .. } => hi.min(b - self.mu),
            _ => hi,
        };
        if !(hi > lo) {
            return Ok(0.0);
        }
        let mut points = vec![lo];
        if lo < 0.0 && hi > 0.0 {
            points.push(0.0);
        }
        points.push(hi);
        let mu = self.mu;
        let integrand = |d: f64| d.powi(k as i32) * self.pdf(mu + d).unwrap_or(0.0);
        let scale = self.sigma().max(f64::MIN_POSITIVE);
        let v = integrate(
            integrand,
            &points,
            scale,
            Tolerance {
                abs: 1e-14 * scale.powi(k as i32),
                rel: 1e-12,
            },
        )?;
        Ok(v)
    }

    /// `E[|Z−μ|^k; lo < Z−μ < hi]`.
    pub fn abs_central_moment_on(&self, k: u32, lo: f64, hi: f64) -> Result<f64> {
        let mut total = 0.0;
        if lo < 0.0 {
            let part = self.central_moment_on(k, lo, hi.min(0.0))?;
            total += if k % 2 == 1 { -part } else { part };
        }
        if hi > 0.0 {
            total += self.central_moment_on(k, lo.max(0.0), hi)?;
        }
        Ok(total)
    }
}

/// `∫_{lo}^{hi} d^k λe^{−λ(μ+d)} dd` with `μ = 1/λ`, written in `y = λd`.
fn exponential_moment(rate: f64, k: u32, lo: f64, hi: f64) -> f64 {
    // ∫ y^k e^{−y} dy = −e^{−y} Σ_j k!/j! y^j
    let antiderivative = |y: f64| -> f64 {
        if y.is_infinite() {
            return 0.0;
        }
        let mut sum = 0.0;
        let mut coeff = 1.0; // k!/j! for j = k, k−1, …
        for j in (0..=k).rev() {
            sum += coeff * y.powi(j as i32);
            coeff *= j as f64;
        }
        -(-y).exp() * sum
    };
    let (ylo, yhi) = ((rate * lo).max(-1.0), rate * hi);
    (-1.0_f64).exp() * (antiderivative(yhi) - antiderivative(ylo)) / rate.powi(k as i32)
}

/// `∫ (x−μ)^k α s^α x^{−α−1} dx` over `x − μ ∈ (lo, hi)`, expanded binomially
/// in `u = x/s`.
fn pareto_moment(scale: f64, alpha: f64, mu: f64, k: u32, lo: f64, hi: f64) -> f64 {
    let m = mu / scale;
    let ulo = (m + lo / scale).max(1.0);
    let uhi = m + hi / scale;
    if uhi <= ulo {
        return 0.0;
    }
    let prim = |j: u32, u: f64| -> f64 {
        let e = j as f64 - alpha;
        if e == 0.0 {
            u.ln()
        } else if u.is_infinite() {
            if e < 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            u.powf(e) / e
        }
    };
    let mut total = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        let term = binom * (-m).powi((k - j) as i32) * (prim(j, uhi) - prim(j, ulo));
        total += term;
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    alpha * total * scale.powi(k as i32)
}

/// Standardized summands `ξᵢ = (Zᵢ − μ)/(σ√n)` summarized by their
/// truncated moment functionals.
#[derive(Debug, Clone, PartialEq)]
pub struct SummandProfile {
    pub n: u64,
    /// `Σᵢ E ξᵢ² 1(|ξᵢ| > 1)`
    pub beta2: f64,
    /// `Σᵢ E |ξᵢ|³ 1(|ξᵢ| ≤ 1)`
    pub beta3: f64,
    /// `Σᵢ E ξᵢ² 1(|ξᵢ| ≤ 1)`; equals `1 − beta2` for standardized summands.
    pub inner_second: f64,
    tail: TailModel,
}

#[derive(Debug, Clone, PartialEq)]
enum TailModel {
    Spec {
        spec: DistributionSpec,
        sd: f64,
    },
    /// Law of a single summand as `(value, prob)` atoms.
    Atoms(Vec<(f64, f64)>),
    Zero,
}

impl SummandProfile {
    /// Profile of `n` i.i.d. summands with the given finite law.
    pub fn from_summand_atoms(atoms: &[(f64, f64)], n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("summand count must be >= 1".into()));
        }
        let nf = n as f64;
        let mut beta2 = 0.0;
        let mut beta3 = 0.0;
        let mut inner = 0.0;
        for &(v, p) in atoms {
            if v.abs() > 1.0 {
                beta2 += p * v * v;
            } else {
                beta3 += p * v.abs().powi(3);
                inner += p * v * v;
            }
        }
        Ok(SummandProfile {
            n,
            beta2: nf * beta2,
            beta3: nf * beta3,
            inner_second: nf * inner,
            tail: TailModel::Atoms(atoms.to_vec()),
        })
    }

    /// Profile known only through its moment functionals; tail sums are zero.
    pub fn from_moments(n: u64, beta2: f64, beta3: f64) -> Self {
        SummandProfile {
            n,
            beta2,
            beta3,
            inner_second: 1.0 - beta2,
            tail: TailModel::Zero,
        }
    }

    pub fn beta_sum(&self) -> f64 {
        self.beta2 + self.beta3
    }

    /// `Σᵢ P(|ξᵢ| > x)`.
    pub fn tail_sum(&self, x: f64) -> f64 {
        let nf = self.n as f64;
        match &self.tail {
            TailModel::Spec { spec, sd } => nf * spec.abs_deviation_tail(x * sd * nf.sqrt()),
            TailModel::Atoms(atoms) => {
                nf * atoms
                    .iter()
                    .filter(|a| a.0.abs() > x)
                    .map(|a| a.1)
                    .sum::<f64>()
            }
            TailModel::Zero => 0.0,
        }
    }

    /// `Σᵢ P(ξᵢ > x)` (one-sided).
    pub fn upper_tail_sum(&self, x: f64) -> f64 {
        let nf = self.n as f64;
        match &self.tail {
            TailModel::Spec { spec, sd } => nf * spec.survival(spec.mu() + x * sd * nf.sqrt()),
            TailModel::Atoms(atoms) => {
                nf * atoms.iter().filter(|a| a.0 > x).map(|a| a.1).sum::<f64>()
            }
            TailModel::Zero => 0.0,
        }
    }
}

/// Truncated moment functionals of `ξ = (Z − μ)/(σ√n)`.
pub fn summand_profile(spec: &DistributionSpec, n: u64) -> Result<SummandProfile> {
    if n == 0 {
        return Err(Error::Domain("summand count must be >= 1".into()));
    }
    let sigma = spec.require_spread()?;
    let nf = n as f64;
    if let Family::Discrete { atoms } = spec.family() {
        let scale = sigma * nf.sqrt();
        let xi: Vec<(f64, f64)> = atoms
            .iter()
            .filter(|a| a.1 > 0.0)
            .map(|&(v, p)| ((v - spec.mu()) / scale, p))
            .collect();
        let mut profile = SummandProfile::from_summand_atoms(&xi, n)?;
        profile.tail = TailModel::Spec {
            spec: spec.clone(),
            sd: sigma,
        };
        return Ok(profile);
    }
    let c = sigma * nf.sqrt();
    let sigma2 = spec.sigma2();
    let outer = spec.central_moment_on(2, c, f64::INFINITY)?
        + spec.central_moment_on(2, f64::NEG_INFINITY, -c)?;
    let inner2 = spec.central_moment_on(2, -c, c)?;
    let inner3 = spec.abs_central_moment_on(3, -c, c)?;
    let beta2 = outer / sigma2;
    let beta3 = inner3 / (sigma2 * sigma * nf.sqrt());
    if !(beta2.is_finite() && beta3.is_finite()) {
        return Err(Error::Unsupported(format!(
            "truncated moments of {} diverge",
            spec.short_name()
        )));
    }
    Ok(SummandProfile {
        n,
        beta2,
        beta3,
        inner_second: inner2 / sigma2,
        tail: TailModel::Spec {
            spec: spec.clone(),
            sd: sigma,
        },
    })
}

/// Random stream `stream` of the generator seeded with `seed`.
///
/// ChaCha8 is a counter-based generator with a 64-bit stream selector, so
/// stream `i` depends only on `(seed, i)`; this is what makes simulation
/// results independent of how replicates are scheduled.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A ready-to-draw sampler for a [`DistributionSpec`].
#[derive(Debug, Clone)]
pub struct Sampler(SamplerKind);

#[derive(Debug, Clone)]
enum SamplerKind {
    Exp(Exp<f64>),
    Pareto(Pareto<f64>),
    Gamma(Gamma<f64>),
    LogNormal(LogNormal<f64>),
    Uniform(Uniform<f64>),
    Constant(f64),
    Discrete {
        values: Vec<f64>,
        index: WeightedIndex<f64>,
    },
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl Sampler {
    pub fn new(spec: &DistributionSpec) -> Result<Self> {
        let kind = match spec.family() {
            Family::Exponential { rate } => SamplerKind::Exp(Exp::new(*rate).map_err(config_err)?),
            Family::Pareto { scale, alpha } => {
                SamplerKind::Pareto(Pareto::new(*scale, *alpha).map_err(config_err)?)
            }
            Family::Gamma { shape, rate } => {
                SamplerKind::Gamma(Gamma::new(*shape, 1.0 / rate).map_err(config_err)?)
            }
            Family::LogNormal { mu_log, sigma_log } => {
                SamplerKind::LogNormal(LogNormal::new(*mu_log, *sigma_log).map_err(config_err)?)
            }
            Family::Uniform { a, b } => {
                SamplerKind::Uniform(Uniform::new(*a, *b).map_err(config_err)?)
            }
            Family::Discrete { atoms } => {
                let live: Vec<(f64, f64)> = atoms.iter().copied().filter(|a| a.1 > 0.0).collect();
                if live.len() == 1 {
                    SamplerKind::Constant(live[0].0)
                } else {
                    SamplerKind::Discrete {
                        values: live.iter().map(|a| a.0).collect(),
                        index: WeightedIndex::new(live.iter().map(|a| a.1)).map_err(config_err)?,
                    }
                }
            }
        };
        Ok(Sampler(kind))
    }

    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.0 {
            SamplerKind::Exp(d) => d.sample(rng),
            SamplerKind::Pareto(d) => d.sample(rng),
            SamplerKind::Gamma(d) => d.sample(rng),
            SamplerKind::LogNormal(d) => d.sample(rng),
            SamplerKind::Uniform(d) => d.sample(rng),
            SamplerKind::Constant(v) => *v,
            SamplerKind::Discrete { values, index } => values[index.sample(rng)],
        }
    }
}

/// `count` i.i.d. variates drawn from stream 0 of `seed`.
pub fn sample(spec: &DistributionSpec, seed: u64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Config("sample count must be >= 1".into()));
    }
    let sampler = Sampler::new(spec)?;
    let mut rng = stream_rng(seed, 0);
    Ok((0..count).map(|_| sampler.draw(&mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn construction_rejects_bad_laws() {
        assert!(DistributionSpec::exponential(0.0).is_err());
        assert!(matches!(
            DistributionSpec::pareto(1.0, 2.0),
            Err(Error::Unsupported(_))
        ));
        assert!(DistributionSpec::uniform(-1.0, 1.0).is_err());
        assert!(DistributionSpec::discrete(vec![(1.0, 0.5)]).is_err());
        assert!(DistributionSpec::discrete(vec![(-1.0, 0.5), (3.0, 0.5)]).is_err());
        assert!(DistributionSpec::discrete(vec![(0.0, 1.0)]).is_err());
    }

    #[test]
    fn moments_examples() {
        let m = DistributionSpec::exponential(1.0)
            .unwrap()
            .moments()
            .unwrap();
        assert_eq!((m.mu, m.sigma2), (1.0, 1.0));
        assert!(close(m.gamma, 2.414_553_294_057_308, 1e-14));

        let m = DistributionSpec::pareto(1.0, 2.5)
            .unwrap()
            .moments()
            .unwrap();
        assert!(close(m.mu, 5.0 / 3.0, 1e-15));
        assert!(close(m.sigma2, 20.0 / 9.0, 1e-14));
        assert!(m.gamma.is_infinite());

        let m = DistributionSpec::discrete(vec![(0.0, 0.5), (2.0, 0.5)])
            .unwrap()
            .moments()
            .unwrap();
        assert_eq!((m.mu, m.sigma2, m.gamma), (1.0, 1.0, 1.0));
    }

    #[test]
    fn third_moment_by_quadrature() {
        // 50-digit reference values
        let g = DistributionSpec::gamma(2.0, 1.0)
            .unwrap()
            .moments()
            .unwrap()
            .gamma;
        assert!(close(g, 5.744_140_393_036_114, 1e-9));
        let g = DistributionSpec::lognormal(0.0, 0.5)
            .unwrap()
            .moments()
            .unwrap()
            .gamma;
        assert!(close(g, 0.513_939_211_782_523_2, 1e-10));
        let g = DistributionSpec::pareto(1.0, 3.5)
            .unwrap()
            .moments()
            .unwrap()
            .gamma;
        assert!(close(g, 2.720_987_230_262_506, 1e-8));
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        let specs = [
            DistributionSpec::exponential(1.7).unwrap(),
            DistributionSpec::pareto(1.0, 2.5).unwrap(),
            DistributionSpec::pareto(0.3, 4.2).unwrap(),
            DistributionSpec::uniform(0.5, 2.0).unwrap(),
        ];
        for spec in &specs {
            let s = spec.sigma();
            for &(lo, hi) in &[(-0.5 * s, 0.7 * s), (-3.0 * s, 0.0), (0.2 * s, 4.0 * s)] {
                for k in [1, 2, 3] {
                    let a = spec.central_moment_on(k, lo, hi).unwrap();
                    let b = spec.central_moment_on_quadrature(k, lo, hi).unwrap();
                    assert!(
                        close(a, b, 1e-11 * s.powi(k as i32).max(1.0)),
                        "{} k={k} ({lo},{hi}): {a} vs {b}",
                        spec.short_name()
                    );
                }
            }
        }
    }

    #[test]
    fn discrete_profile_example() {
        let spec = DistributionSpec::discrete(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        let p = summand_profile(&spec, 4).unwrap();
        assert_eq!(p.beta2, 0.0);
        assert!(close(p.beta3, 0.5, 1e-15));
        assert!(close(p.tail_sum(0.25), 4.0, 1e-15));
        assert_eq!(p.tail_sum(0.5), 0.0);
    }

    #[test]
    fn profile_reference_values() {
        // (family, n, beta2, beta3) from 50-digit quadrature
        let cases: Vec<(DistributionSpec, u64, f64, f64)> = vec![
            (
                DistributionSpec::exponential(1.0).unwrap(),
                1,
                0.676_676_416_183_063_5,
                0.249_188_762_271_504_8,
            ),
            (
                DistributionSpec::exponential(1.0).unwrap(),
                10,
                0.285_350_885_449_511,
                0.337_120_678_396_384_1,
            ),
            (
                DistributionSpec::exponential(1.0).unwrap(),
                100,
                0.002_037_607_496_409_970_4,
                0.239_173_877_077_783_23,
            ),
            (
                DistributionSpec::exponential(1.0).unwrap(),
                1000,
                7.236_988_249_409_037e-12,
                0.076_354_879_403_353_67,
            ),
            (
                DistributionSpec::gamma(2.0, 1.0).unwrap(),
                1,
                0.765_012_513_761_865_3,
                0.173_664_395_064_227_87,
            ),
            (
                DistributionSpec::gamma(2.0, 1.0).unwrap(),
                10,
                0.188_729_089_182_495_85,
                0.384_052_696_294_935_94,
            ),
            (
                DistributionSpec::gamma(2.0, 1.0).unwrap(),
                100,
                1.942_656_944_556_581e-4,
                0.202_875_087_177_036_07,
            ),
            (
                DistributionSpec::pareto(1.0, 2.5).unwrap(),
                1,
                0.891_209_899_639_685_5,
                0.050_904_873_489_708_07,
            ),
            (
                DistributionSpec::pareto(1.0, 2.5).unwrap(),
                10,
                0.747_779_586_882_080_5,
                0.108_756_712_485_846_88,
            ),
            (
                DistributionSpec::pareto(1.0, 2.5).unwrap(),
                100,
                0.516_743_467_713_190_7,
                0.172_775_815_703_92,
            ),
            (
                DistributionSpec::lognormal(0.0, 0.5).unwrap(),
                1,
                0.767_001_598_863_568_2,
                0.169_900_845_733_732_2,
            ),
            (
                DistributionSpec::lognormal(0.0, 0.5).unwrap(),
                10,
                0.246_700_320_714_991_36,
                0.352_118_937_330_859_3,
            ),
        ];
        for (spec, n, b2, b3) in cases {
            let p = summand_profile(&spec, n).unwrap();
            assert!(
                close(p.beta2, b2, 1e-9),
                "{} n={n}: beta2 {} vs {b2}",
                spec.short_name(),
                p.beta2
            );
            assert!(
                close(p.beta3, b3, 1e-9),
                "{} n={n}: beta3 {} vs {b3}",
                spec.short_name(),
                p.beta3
            );
            assert!(close(p.beta2 + p.inner_second, 1.0, 1e-9));
        }
    }

    #[test]
    fn degenerate_spec_has_no_profile() {
        let spec = DistributionSpec::discrete(vec![(1.0, 1.0)]).unwrap();
        assert!(spec.is_degenerate());
        assert!(summand_profile(&spec, 3).is_err());
    }

    #[test]
    fn tails_match_survival_functions() {
        let spec = DistributionSpec::exponential(1.0).unwrap();
        let p = summand_profile(&spec, 4).unwrap();
        // |ξ| > 0.5 ⇔ |Z − 1| > 1 ⇔ Z > 2
        assert!(close(p.tail_sum(0.5), 4.0 * (-2.0f64).exp(), 1e-15));
        // |ξ| > 0.25 ⇔ Z > 1.5 or Z < 0.5
        let want = 4.0 * ((-1.5f64).exp() + 1.0 - (-0.5f64).exp());
        assert!(close(p.tail_sum(0.25), want, 1e-14));
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = DistributionSpec::gamma(2.0, 1.0).unwrap();
        let a = sample(&spec, 7, 100).unwrap();
        let b = sample(&spec, 7, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample(&spec, 8, 100).unwrap());
        assert!(sample(&spec, 7, 0).is_err());
    }

    #[test]
    fn point_mass_samples_constant() {
        let spec = DistributionSpec::discrete(vec![(1.0, 1.0)]).unwrap();
        assert!(sample(&spec, 3, 50).unwrap().iter().all(|&x| x == 1.0));
    }

    #[test]
    fn config_round_trip() {
        let spec: DistributionSpec =
            toml::from_str("family = \"pareto\"\nscale = 1.0\nalpha = 2.5\n").unwrap();
        assert!(close(spec.mu(), 5.0 / 3.0, 1e-15));
        let bad: std::result::Result<DistributionSpec, _> =
            toml::from_str("family = \"pareto\"\nscale = 1.0\nalpha = 1.5\n");
        assert!(bad.is_err());
    }
}
