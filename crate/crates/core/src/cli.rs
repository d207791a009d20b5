//! Command implementations behind the `renewal-clt` binary. Each command is a
//! pure function of its configuration and returns the file contents it
//! would write; the binary only does I/O.

use std::fmt::Write as _;

use serde::Serialize;

use crate::config::{ExperimentConfig, NPolicy};
use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mc::{self, default_n_max, EmpiricalCdf, SimOptions};
use crate::renewal::{alternate_bound_with, englund_bound, renewal_clt_bound_with, RenewalPoint};
use crate::special_fn::cdf;
use crate::verify;

/// Version of the CSV and JSON layouts below; bumped on any column change.
pub const SCHEMA_VERSION: u32 = 1;

pub const BOUND_HEADER: &str =
    "t,n,z,z_phi,cdf_shift_term,nonuniform_term,total,clamped_total,englund,alternate";
pub const ECDF_HEADER: &str = "t,n,count,ecdf,phi_arg,phi_value,abs_dev,clamped_bound,bound_ok";
pub const COMPARE_HEADER: &str = "t,n_center,renewal_smooth,renewal_nonuniform,renewal_total,\
renewal_sup,alternate,englund,empirical,empirical_source,dkw_slack";

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidDistribution(_) | Error::Unsupported(_) => 2,
        _ => 3,
    }
}

fn na(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

/// One CSV row per `(t, n)` of the configured grid.
pub fn bound_table(cfg: &ExperimentConfig, c: &Constants, exec: Execution) -> Result<String> {
    let spec = &cfg.distribution;
    let mut out = String::from(BOUND_HEADER);
    out.push('\n');
    for &t in &cfg.t_grid {
        let englund = englund_bound(spec, t)?;
        let ns = cfg.n_values(t)?;
        let rows = exec.try_map_indexed(ns.len(), |i| -> Result<String> {
            let n = ns[i];
            let p = RenewalPoint::new(spec, t, n)?;
            let b = renewal_clt_bound_with(c, &p)?;
            let alt = alternate_bound_with(c, spec, n, t)?;
            Ok(format!(
                "{t},{n},{},{},{},{},{},{},{},{alt}\n",
                p.z,
                p.z_phi,
                b.term_smooth,
                b.term_nonuniform,
                b.total,
                b.clamped(),
                na(englund)
            ))
        })?;
        rows.iter().for_each(|r| out.push_str(r));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct HorizonSummary {
    pub t: f64,
    pub replicates: u64,
    pub seed: u64,
    pub delta: f64,
    pub n_max: u64,
    pub enlarged: bool,
    pub kolmogorov: f64,
    pub argmax_n: u64,
    pub dkw_slack: f64,
    /// Exact `sup_n |P(X_t ≤ n) − Φ(z_phi)|` when an exact law is available.
    pub exact_kolmogorov: Option<f64>,
    /// `|kolmogorov − exact_kolmogorov| ≤ dkw_slack`.
    pub exact_within_slack: Option<bool>,
    pub bound_ok: bool,
    /// Smallest `min(1, bound) − (deviation − slack)` over the rows.
    pub min_bound_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub schema_version: u32,
    pub distribution: String,
    pub horizons: Vec<HorizonSummary>,
    pub bound_ok: bool,
}

fn simulated_rows(cfg: &ExperimentConfig, ecdf: &EmpiricalCdf) -> Vec<u64> {
    match &cfg.n_policy {
        NPolicy::Explicit { n } => n.clone(),
        NPolicy::Lattice { n_max } => (1..=n_max.unwrap_or(ecdf.n_max)).collect(),
    }
}

/// Empirical CDF CSV plus a JSON summary.
pub fn simulate(
    cfg: &ExperimentConfig,
    c: &Constants,
    exec: Execution,
) -> Result<(String, String)> {
    let spec = &cfg.distribution;
    spec.require_spread()?;
    let opts = SimOptions {
        exec,
        delta: cfg.delta_dkw,
    };
    let mut csv = String::from(ECDF_HEADER);
    csv.push('\n');
    let mut horizons = Vec::new();
    for &t in &cfg.t_grid {
        let ecdf = mc::simulate_counts_with(spec, t, cfg.replicates, cfg.seed, opts)?;
        let k = mc::kolmogorov_distance(&ecdf)?;
        let exact = mc::exact_kolmogorov(spec, t, ecdf.n_max)?.map(|(d, _)| d);
        let slack = ecdf.dkw_slack;
        let mut bound_ok = true;
        let mut min_margin = f64::INFINITY;
        for n in simulated_rows(cfg, &ecdf) {
            let f = ecdf.ecdf(n);
            let z = ecdf.phi_arg(n).expect("spread checked");
            let phi = cdf(z);
            let dev = (f - phi).abs();
            let b = renewal_clt_bound_with(c, &RenewalPoint::new(spec, t, n)?)?.clamped();
            let margin = b - (dev - slack);
            let ok = margin >= 0.0;
            bound_ok &= ok;
            min_margin = min_margin.min(margin);
            let count = ecdf.counts.get(n as usize).copied().unwrap_or(0);
            writeln!(csv, "{t},{n},{count},{f},{z},{phi},{dev},{b},{ok}").expect("string write");
        }
        horizons.push(HorizonSummary {
            t,
            replicates: ecdf.replicates,
            seed: ecdf.seed,
            delta: ecdf.delta,
            n_max: ecdf.n_max,
            enlarged: ecdf.enlarged,
            kolmogorov: k.distance_to_phi,
            argmax_n: k.argmax_n,
            dkw_slack: slack,
            exact_kolmogorov: exact,
            exact_within_slack: exact.map(|e| (e - k.distance_to_phi).abs() <= slack),
            bound_ok,
            min_bound_margin: min_margin,
        });
    }
    let summary = SimulationSummary {
        schema_version: SCHEMA_VERSION,
        distribution: spec.short_name(),
        bound_ok: horizons.iter().all(|h| h.bound_ok),
        horizons,
    };
    let json =
        serde_json::to_string_pretty(&summary).map_err(|e| Error::Simulation(e.to_string()))?;
    Ok((csv, json + "\n"))
}

/// Renewal, alternate and Englund bounds beside the empirical Kolmogorov
/// distance, one row per horizon. Bounds are evaluated at the central count
/// `n = ⌈t/μ⌉`; `renewal_sup` is the largest renewal bound over the lattice.
pub fn compare_table(cfg: &ExperimentConfig, c: &Constants, exec: Execution) -> Result<String> {
    let spec = &cfg.distribution;
    spec.require_spread()?;
    let mut out = String::from(COMPARE_HEADER);
    out.push('\n');
    for &t in &cfg.t_grid {
        let n_center = ((t / spec.mu()).ceil() as u64).max(1);
        let center = renewal_clt_bound_with(c, &RenewalPoint::new(spec, t, n_center)?)?;
        let n_max = default_n_max(spec, t);
        let totals = exec.try_map_indexed(n_max as usize, |i| -> Result<f64> {
            Ok(renewal_clt_bound_with(c, &RenewalPoint::new(spec, t, i as u64 + 1)?)?.total)
        })?;
        let sup = totals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let alt = alternate_bound_with(c, spec, n_center, t)?;
        let englund = englund_bound(spec, t)?;
        let (empirical, source, slack) = match mc::exact_kolmogorov(spec, t, n_max)? {
            Some((d, _)) => (d, "exact", 0.0),
            None => {
                let opts = SimOptions {
                    exec,
                    delta: cfg.delta_dkw,
                };
                let ecdf = mc::simulate_counts_with(spec, t, cfg.replicates, cfg.seed, opts)?;
                let k = mc::kolmogorov_distance(&ecdf)?;
                (k.distance_to_phi, "simulated", k.dkw_slack)
            }
        };
        writeln!(
            out,
            "{t},{n_center},{},{},{},{sup},{alt},{},{empirical},{source},{slack}",
            center.term_smooth,
            center.term_nonuniform,
            center.total,
            na(englund)
        )
        .expect("string write");
    }
    Ok(out)
}

/// Run the selected checks and render the JSON report.
pub fn verify_report(
    names: &[String],
    c: &Constants,
    exec: Execution,
) -> Result<(verify::Report, String)> {
    let report = verify::run(names, c, exec)?;
    let json =
        serde_json::to_string_pretty(&report).map_err(|e| Error::Simulation(e.to_string()))?;
    Ok((report, json + "\n"))
}
