//! Monte Carlo simulation of renewal counts, empirical CDFs with DKW bands,
//! and exact count laws where a closed form exists.

use std::io::Write;

use serde::Serialize;
use statrs::function::gamma::gamma_ur;

use crate::distributions::{stream_rng, DistributionSpec, Family, Sampler};
use crate::error::{domain, ensure_finite, Error, Result};
use crate::exec::Execution;
use crate::special_fn::{cdf, phi_cdf_diff};

/// Hard cap on arrivals drawn in one replicate.
pub const MAX_EVENTS: u64 = 1_000_000_000;
/// Largest histogram the simulator will allocate.
pub const MAX_LATTICE: u64 = 50_000_000;
/// Replicates per scheduling unit; fixed so output never depends on workers.
const CHUNK: u64 = 4096;
/// Stream offset separating arrival-time draws from count draws.
const ARRIVAL_STREAM_BASE: u64 = 1 << 62;

pub const DEFAULT_DELTA: f64 = 1e-3;

/// Half-width `√(ln(2/δ)/(2N))` of the simultaneous DKW band.
pub fn dkw_slack(replicates: u64, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * replicates as f64)).sqrt()
}

/// `ceil(t/μ + 12σ√t μ^{−3/2}) + 16`.
pub fn default_n_max(spec: &DistributionSpec, t: f64) -> u64 {
    let mu = spec.mu();
    let v = t / mu + 12.0 * spec.sigma() * t.sqrt() * mu.powf(-1.5);
    v.ceil() as u64 + 16
}

#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub exec: Execution,
    pub delta: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            exec: Execution::Auto,
            delta: DEFAULT_DELTA,
        }
    }
}

/// Histogram of simulated `X_t` over `{0, …, n_max}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalCdf {
    pub spec: DistributionSpec,
    pub t: f64,
    pub replicates: u64,
    pub seed: u64,
    pub n_max: u64,
    /// `counts[n]` replicates ended with `X_t = n`.
    pub counts: Vec<u64>,
    /// Whether some replicate exceeded the initial `n_max`, which was then
    /// enlarged to cover it.
    pub enlarged: bool,
    pub delta: f64,
    pub dkw_slack: f64,
}

impl EmpiricalCdf {
    /// `F̂(n) = #{X_t ≤ n}/N`.
    pub fn ecdf(&self, n: u64) -> f64 {
        if n >= self.n_max {
            return 1.0;
        }
        let below: u64 = self.counts[..=n as usize].iter().sum();
        below as f64 / self.replicates as f64
    }

    /// `F̂(0), …, F̂(n_max)`.
    pub fn ecdf_values(&self) -> Vec<f64> {
        let mut acc = 0u64;
        self.counts
            .iter()
            .map(|&c| {
                acc += c;
                acc as f64 / self.replicates as f64
            })
            .collect()
    }

    pub fn mean_count(&self) -> f64 {
        let s: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(n, &c)| n as f64 * c as f64)
            .sum();
        s / self.replicates as f64
    }

    pub fn var_count(&self) -> f64 {
        let m = self.mean_count();
        let s: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(n, &c)| (n as f64 - m).powi(2) * c as f64)
            .sum();
        s / self.replicates as f64
    }

    /// `z_phi(n) = (nμ − t)√μ/(σ√t)`; `None` for point-mass arrivals.
    pub fn phi_arg(&self, n: u64) -> Option<f64> {
        phi_arg(&self.spec, self.t, n)
    }

    /// CSV with columns `n,count,ecdf,phi_arg,phi_value,abs_dev`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,count,ecdf,phi_arg,phi_value,abs_dev")?;
        for (n, (count, f)) in self.counts.iter().zip(self.ecdf_values()).enumerate() {
            match self.phi_arg(n as u64) {
                Some(z) => {
                    let p = cdf(z);
                    writeln!(w, "{n},{count},{f},{z},{p},{}", (f - p).abs())?;
                }
                None => writeln!(w, "{n},{count},{f},NA,NA,NA")?,
            }
        }
        Ok(())
    }
}

fn phi_arg(spec: &DistributionSpec, t: f64, n: u64) -> Option<f64> {
    if spec.is_degenerate() {
        return None;
    }
    let mu = spec.mu();
    Some((n as f64 * mu - t) * mu.sqrt() / (spec.sigma() * t.sqrt()))
}

fn check_horizon(t: f64) -> Result<()> {
    ensure_finite("t", t)?;
    if t <= 0.0 {
        return domain(format!("t must be positive, got {t}"));
    }
    Ok(())
}

/// One replicate: arrivals are drawn until their running sum exceeds `t`.
fn count_arrivals(sampler: &Sampler, seed: u64, replicate: u64, t: f64) -> Result<u64> {
    let mut rng = stream_rng(seed, replicate);
    let mut sum = 0.0;
    let mut k = 0u64;
    loop {
        sum += sampler.draw(&mut rng);
        if sum > t {
            return Ok(k);
        }
        k += 1;
        if k >= MAX_EVENTS {
            return Err(Error::Simulation(format!(
                "replicate {replicate} exceeded {MAX_EVENTS} arrivals before t = {t}"
            )));
        }
    }
}

pub fn simulate_counts(
    spec: &DistributionSpec,
    t: f64,
    replicates: u64,
    seed: u64,
) -> Result<EmpiricalCdf> {
    simulate_counts_with(spec, t, replicates, seed, SimOptions::default())
}

/// Simulate `replicates` independent copies of `X_t`. Replicate `r` draws
/// from stream `r` of `seed`, so the histogram is identical for any
/// execution strategy.
pub fn simulate_counts_with(
    spec: &DistributionSpec,
    t: f64,
    replicates: u64,
    seed: u64,
    opts: SimOptions,
) -> Result<EmpiricalCdf> {
    check_horizon(t)?;
    if replicates == 0 {
        return Err(Error::Config("replicates must be >= 1".into()));
    }
    if !(opts.delta > 0.0 && opts.delta < 1.0) {
        return Err(Error::Config(format!(
            "delta must lie in (0, 1), got {}",
            opts.delta
        )));
    }
    let n_max0 = default_n_max(spec, t);
    if n_max0 > MAX_LATTICE {
        return Err(Error::Simulation(format!(
            "expected count lattice of {n_max0} exceeds {MAX_LATTICE}"
        )));
    }
    let sampler = Sampler::new(spec)?;
    let chunks = replicates.div_ceil(CHUNK);
    let per_chunk = opts.exec.try_map_indexed(chunks as usize, |c| {
        let lo = c as u64 * CHUNK;
        let hi = (lo + CHUNK).min(replicates);
        (lo..hi)
            .map(|r| count_arrivals(&sampler, seed, r, t))
            .collect::<Result<Vec<u64>>>()
    })?;
    let observed_max = per_chunk.iter().flatten().copied().max().unwrap_or(0);
    let enlarged = observed_max > n_max0;
    let n_max = n_max0.max(observed_max);
    let mut counts = vec![0u64; n_max as usize + 1];
    for x in per_chunk.iter().flatten() {
        counts[*x as usize] += 1;
    }
    Ok(EmpiricalCdf {
        spec: spec.clone(),
        t,
        replicates,
        seed,
        n_max,
        counts,
        enlarged,
        delta: opts.delta,
        dkw_slack: dkw_slack(replicates, opts.delta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KolmogorovResult {
    pub distance_to_phi: f64,
    pub argmax_n: u64,
    pub dkw_slack: f64,
}

/// `sup_{1 ≤ n ≤ n_max} |F̂(n) − Φ(z_phi(n))|`.
pub fn kolmogorov_distance(ecdf: &EmpiricalCdf) -> Result<KolmogorovResult> {
    ecdf.spec.require_spread()?;
    let values = ecdf.ecdf_values();
    let top = ecdf.n_max.max(1);
    let (mut best, mut arg) = (-1.0, 1);
    for n in 1..=top {
        let f = values.get(n as usize).copied().unwrap_or(1.0);
        let d = (f - cdf(ecdf.phi_arg(n).unwrap())).abs();
        if d > best {
            best = d;
            arg = n;
        }
    }
    Ok(KolmogorovResult {
        distance_to_phi: best.clamp(0.0, 1.0),
        argmax_n: arg,
        dkw_slack: ecdf.dkw_slack,
    })
}

/// Exact `sup_{1 ≤ n ≤ n_max} |P(X_t ≤ n) − Φ(z_phi(n))|`, when available.
pub fn exact_kolmogorov(spec: &DistributionSpec, t: f64, n_max: u64) -> Result<Option<(f64, u64)>> {
    spec.require_spread()?;
    let Some(exact) = exact_count_cdf_all(spec, t, n_max)? else {
        return Ok(None);
    };
    let mut best = (-1.0, 1);
    for n in 1..=n_max.max(1) {
        let f = exact.get(n as usize).copied().unwrap_or(1.0);
        let d = (f - cdf(phi_arg(spec, t, n).unwrap())).abs();
        if d > best.0 {
            best = (d, n);
        }
    }
    Ok(Some(best))
}

/// Exact `P(X_t ≤ n) = P(T_{n+1} > t)` where a closed form exists:
/// exponential and gamma arrivals through the regularized incomplete gamma
/// function, lattice-valued discrete arrivals by convolution.
pub fn exact_count_cdf(spec: &DistributionSpec, t: f64, n: u64) -> Result<Option<f64>> {
    check_horizon(t)?;
    let v = match spec.family() {
        Family::Exponential { rate } => Some(gamma_ur((n + 1) as f64, rate * t)),
        Family::Gamma { shape, rate } => Some(gamma_ur((n + 1) as f64 * shape, rate * t)),
        Family::Discrete { atoms } => {
            lattice_sum_cdf(atoms, t, n + 1, false).map(|below| 1.0 - below[n as usize])
        }
        _ => None,
    };
    Ok(v.map(|p| p.clamp(0.0, 1.0)))
}

/// `P(X_t ≤ n)` for `n = 0, …, n_max`.
pub fn exact_count_cdf_all(
    spec: &DistributionSpec,
    t: f64,
    n_max: u64,
) -> Result<Option<Vec<f64>>> {
    check_horizon(t)?;
    let v = match spec.family() {
        Family::Exponential { .. } | Family::Gamma { .. } => Some(
            (0..=n_max)
                .map(|n| exact_count_cdf(spec, t, n).map(|p| p.unwrap()))
                .collect::<Result<Vec<f64>>>()?,
        ),
        Family::Discrete { atoms } => lattice_sum_cdf(atoms, t, n_max + 1, false)
            .map(|below| below.iter().map(|b| (1.0 - b).clamp(0.0, 1.0)).collect()),
        _ => None,
    };
    Ok(v)
}

/// Exact `P(T_n ≥ t)` where a closed form exists.
pub fn exact_arrival_survival(spec: &DistributionSpec, t: f64, n: u64) -> Result<Option<f64>> {
    check_horizon(t)?;
    if n == 0 {
        return domain("n must be >= 1");
    }
    let v = match spec.family() {
        Family::Exponential { rate } => Some(gamma_ur(n as f64, rate * t)),
        Family::Gamma { shape, rate } => Some(gamma_ur(n as f64 * shape, rate * t)),
        Family::Discrete { atoms } => {
            lattice_sum_cdf(atoms, t, n, true).map(|below| 1.0 - below[n as usize - 1])
        }
        _ => None,
    };
    Ok(v.map(|p| p.clamp(0.0, 1.0)))
}

const LATTICE_TOL: f64 = 1e-9;
const LATTICE_WORK: f64 = 2e9;

/// Common spacing `h` with every atom an integer multiple of it.
fn lattice_spacing(values: &[f64]) -> Option<f64> {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut h = 0.0f64;
    for &v in values {
        let (mut a, mut b) = (h.max(v), h.min(v));
        while b > LATTICE_TOL * scale {
            let r = a % b;
            a = b;
            b = if r > b - LATTICE_TOL * scale { 0.0 } else { r };
        }
        h = a;
    }
    if h <= 1e-6 * scale {
        return None;
    }
    values
        .iter()
        .all(|v| ((v / h) - (v / h).round()).abs() < 1e-7)
        .then_some(h)
}

/// For `m = 1, …, m_max`, `P(T_m ≤ t)` (or `P(T_m < t)` when `strict`),
/// entry `m − 1` of the result. `None` when the atoms do not share a lattice
/// or the convolution would be too large.
fn lattice_sum_cdf(atoms: &[(f64, f64)], t: f64, m_max: u64, strict: bool) -> Option<Vec<f64>> {
    let live: Vec<(f64, f64)> = atoms.iter().copied().filter(|a| a.1 > 0.0).collect();
    let values: Vec<f64> = live.iter().map(|a| a.0).collect();
    let h = lattice_spacing(&values)?;
    let steps: Vec<(usize, f64)> = live
        .iter()
        .map(|&(v, p)| ((v / h).round() as usize, p))
        .collect();
    let ratio = t / h;
    let top = if strict {
        (ratio - LATTICE_TOL).ceil() - 1.0
    } else {
        (ratio + LATTICE_TOL).floor()
    };
    if top < 0.0 {
        return Some(vec![0.0; m_max as usize]);
    }
    if (top + 1.0) * m_max as f64 * steps.len() as f64 > LATTICE_WORK {
        return None;
    }
    let top = top as usize;
    let mut dist = vec![0.0; top + 1];
    dist[0] = 1.0;
    let mut out = Vec::with_capacity(m_max as usize);
    let mut next = vec![0.0; top + 1];
    for _ in 0..m_max {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (k, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for &(s, p) in &steps {
                if k + s <= top {
                    next[k + s] += mass * p;
                }
            }
        }
        std::mem::swap(&mut dist, &mut next);
        out.push(dist.iter().sum::<f64>().min(1.0));
    }
    Some(out)
}

/// Empirical `P(T_n ≥ t)` from `replicates` draws of `T_n`, using streams
/// disjoint from those of [`simulate_counts`].
pub fn simulate_arrival_survival(
    spec: &DistributionSpec,
    n: u64,
    t: f64,
    replicates: u64,
    seed: u64,
    exec: Execution,
) -> Result<f64> {
    check_horizon(t)?;
    if n == 0 || replicates == 0 {
        return domain("n and replicates must be >= 1");
    }
    let sampler = Sampler::new(spec)?;
    let chunks = replicates.div_ceil(CHUNK);
    let hits: Vec<u64> = exec.map_indexed(chunks as usize, |c| {
        let lo = c as u64 * CHUNK;
        let hi = (lo + CHUNK).min(replicates);
        (lo..hi)
            .filter(|&r| {
                let mut rng = stream_rng(seed, ARRIVAL_STREAM_BASE + r);
                let s: f64 = (0..n).map(|_| sampler.draw(&mut rng)).sum();
                s >= t
            })
            .count() as u64
    });
    Ok(hits.iter().sum::<u64>() as f64 / replicates as f64)
}

/// `|Φ(a) − Φ(b)|` helper re-exported for table writers.
pub fn normal_gap(a: f64, b: f64) -> f64 {
    phi_cdf_diff(a, b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1() -> DistributionSpec {
        DistributionSpec::exponential(1.0).unwrap()
    }

    #[test]
    fn deterministic_arrivals() {
        let spec = DistributionSpec::discrete(vec![(1.0, 1.0)]).unwrap();
        let e = simulate_counts(&spec, 5.5, 100, 1).unwrap();
        assert_eq!(e.counts[5], 100);
        assert_eq!(e.ecdf(4), 0.0);
        assert_eq!(e.ecdf(5), 1.0);
        assert!(kolmogorov_distance(&e).is_err());
        assert_eq!(exact_count_cdf(&spec, 5.5, 5).unwrap(), Some(1.0));
        assert_eq!(exact_count_cdf(&spec, 5.5, 4).unwrap(), Some(0.0));
        // arrival exactly at t still counts
        assert_eq!(exact_count_cdf(&spec, 5.0, 4).unwrap(), Some(0.0));
        assert_eq!(exact_count_cdf(&spec, 5.0, 5).unwrap(), Some(1.0));
    }

    #[test]
    fn exact_reference_values() {
        let v = exact_count_cdf(&exp1(), 100.0, 100).unwrap().unwrap();
        assert!((v - 0.526_562_198_529_998_5).abs() < 1e-12);
        let v = exact_count_cdf(&exp1(), 10.0, 10).unwrap().unwrap();
        assert!((v - 0.583_039_750_192_985_5).abs() < 1e-13);
        let g = DistributionSpec::gamma(2.0, 1.0).unwrap();
        let v = exact_count_cdf(&g, 10.0, 5).unwrap().unwrap();
        assert!((v - 0.696_776_146_303_106_7).abs() < 1e-12);
        let v = exact_arrival_survival(&exp1(), 100.0, 100)
            .unwrap()
            .unwrap();
        assert!((v - 0.486_701_201_720_851_34).abs() < 1e-12);
        let pareto = DistributionSpec::pareto(1.0, 2.5).unwrap();
        assert_eq!(exact_count_cdf(&pareto, 10.0, 5).unwrap(), None);
    }

    #[test]
    fn lattice_convolution_matches_binomial() {
        // Z ∈ {1, 2} equally likely; T_3 ≤ 4 needs at most one 2: (1 + 3)/8
        let spec = DistributionSpec::discrete(vec![(1.0, 0.5), (2.0, 0.5)]).unwrap();
        let p = exact_count_cdf(&spec, 4.0, 2).unwrap().unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let s = exact_arrival_survival(&spec, 4.0, 3).unwrap().unwrap();
        // T_3 ≥ 4 unless all three are 1
        assert!((s - 7.0 / 8.0).abs() < 1e-15);
        let spec = DistributionSpec::discrete(vec![(0.3, 0.5), (0.5, 0.5)]).unwrap();
        assert!(exact_count_cdf(&spec, 3.0, 4).unwrap().is_some());
        let spec = DistributionSpec::discrete(vec![(1.0, 0.5), (2f64.sqrt(), 0.5)]).unwrap();
        assert_eq!(exact_count_cdf(&spec, 3.0, 4).unwrap(), None);
    }

    #[test]
    fn exact_all_matches_pointwise() {
        let spec = DistributionSpec::discrete(vec![(0.5, 0.2), (1.0, 0.5), (2.5, 0.3)]).unwrap();
        let all = exact_count_cdf_all(&spec, 7.0, 20).unwrap().unwrap();
        for n in 0..=20u64 {
            let p = exact_count_cdf(&spec, 7.0, n).unwrap().unwrap();
            assert!((all[n as usize] - p).abs() < 1e-14);
        }
        assert!(all.windows(2).all(|w| w[0] <= w[1] + 1e-15));
    }

    #[test]
    fn histogram_invariants() {
        let e = simulate_counts(&exp1(), 20.0, 5000, 3).unwrap();
        assert_eq!(e.counts.iter().sum::<u64>(), 5000);
        assert_eq!(e.ecdf(e.n_max), 1.0);
        let v = e.ecdf_values();
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*v.last().unwrap(), 1.0);
        let k = kolmogorov_distance(&e).unwrap();
        assert!((0.0..=1.0).contains(&k.distance_to_phi));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let spec = DistributionSpec::gamma(2.0, 1.0).unwrap();
        let base = simulate_counts_with(
            &spec,
            30.0,
            10_000,
            11,
            SimOptions {
                exec: Execution::Sequential,
                delta: 1e-3,
            },
        )
        .unwrap();
        for w in [2, 8] {
            let other = simulate_counts_with(
                &spec,
                30.0,
                10_000,
                11,
                SimOptions {
                    exec: Execution::with_workers(w),
                    delta: 1e-3,
                },
            )
            .unwrap();
            assert_eq!(base, other);
        }
    }

    #[test]
    fn dkw_value() {
        assert!((dkw_slack(100_000, 1e-3) - 0.006_165_3).abs() < 1e-6);
    }

    #[test]
    fn tiny_horizon() {
        let e = simulate_counts(&exp1(), 1e-9, 1000, 5).unwrap();
        let k = kolmogorov_distance(&e).unwrap();
        assert!(k.distance_to_phi < 1e-3);
    }

    #[test]
    fn csv_header_and_rows() {
        let e = simulate_counts(&exp1(), 2.0, 100, 9).unwrap();
        let mut buf = Vec::new();
        e.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("n,count,ecdf,phi_arg,phi_value,abs_dev"));
        assert_eq!(lines.count() as u64, e.n_max + 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(simulate_counts(&exp1(), 0.0, 10, 1).is_err());
        assert!(simulate_counts(&exp1(), 1.0, 0, 1).is_err());
        assert!(simulate_counts(&exp1(), 1e12, 10, 1).is_err());
    }
}
