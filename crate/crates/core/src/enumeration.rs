//! Exact laws of sums of i.i.d. finitely supported summands.
//!
//! Outcomes are enumerated over compositions (how many summands take each
//! atom) rather than over the full product space, but the product-space size
//! `k^n` is what gates feasibility so that refusals match a naive enumerator.

use serde::Serialize;

use crate::distributions::SummandProfile;
use crate::error::{Error, Result};

/// Largest product space (`atoms^n`) that enumeration accepts.
pub const MAX_OUTCOMES: u64 = 1_000_000;

/// `n` i.i.d. summands, each taking `atoms[j].0` with probability `atoms[j].1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummandFamily {
    pub name: String,
    pub atoms: Vec<(f64, f64)>,
    pub n: u32,
}

/// One composition class of the sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    /// `Σ ξᵢ`
    pub w: f64,
    /// `Σ ξᵢ 1(ξᵢ ≤ 1)`
    pub w_bar: f64,
    /// `max ξᵢ`
    pub max: f64,
    pub prob: f64,
}

impl SummandFamily {
    pub fn new(name: impl Into<String>, atoms: Vec<(f64, f64)>, n: u32) -> Result<Self> {
        if n == 0 || atoms.is_empty() {
            return Err(Error::Domain(
                "family needs n >= 1 and at least one atom".into(),
            ));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 || atoms.iter().any(|a| !(a.1 >= 0.0) || !a.0.is_finite()) {
            return Err(Error::Domain(
                "atom probabilities must be >= 0 and sum to 1".into(),
            ));
        }
        Ok(SummandFamily {
            name: name.into(),
            atoms,
            n,
        })
    }

    /// `±1/√n` with equal probability.
    pub fn symmetric(n: u32) -> Self {
        let a = 1.0 / (n as f64).sqrt();
        SummandFamily {
            name: format!("symmetric_n{n}"),
            atoms: vec![(-a, 0.5), (a, 0.5)],
            n,
        }
    }

    /// Standardized Bernoulli(p): `(B − p)/√(npq)`.
    pub fn bernoulli(n: u32, p: f64) -> Self {
        let q = 1.0 - p;
        let s = (n as f64 * p * q).sqrt();
        SummandFamily {
            name: format!("bernoulli_n{n}_p{p}"),
            atoms: vec![(-p / s, q), (q / s, p)],
            n,
        }
    }

    /// `{−c, 0, 2c}` with probabilities `(0.2, 0.7, 0.1)`, `c = 1/√(0.6n)`.
    pub fn three_atom(n: u32) -> Self {
        let c = 1.0 / (0.6 * n as f64).sqrt();
        SummandFamily {
            name: format!("three_atom_n{n}"),
            atoms: vec![(-c, 0.2), (0.0, 0.7), (2.0 * c, 0.1)],
            n,
        }
    }

    /// The default set of families used by the verifier: β₂ = 0 and β₂ > 0
    /// regimes, symmetric and skewed.
    pub fn defaults() -> Vec<SummandFamily> {
        vec![
            SummandFamily::symmetric(8),
            SummandFamily::symmetric(16),
            SummandFamily::bernoulli(10, 0.05),
            SummandFamily::bernoulli(12, 0.3),
            SummandFamily::three_atom(6),
            SummandFamily::three_atom(12),
        ]
    }

    pub fn product_space(&self) -> f64 {
        (self.atoms.len() as f64).powi(self.n as i32)
    }

    pub fn profile(&self) -> Result<SummandProfile> {
        SummandProfile::from_summand_atoms(&self.atoms, self.n as u64)
    }

    /// `E ξ` and `E ξ²` of one summand.
    pub fn summand_moments(&self) -> (f64, f64) {
        let m1 = self.atoms.iter().map(|&(v, p)| p * v).sum();
        let m2 = self.atoms.iter().map(|&(v, p)| p * v * v).sum();
        (m1, m2)
    }

    /// Law of one truncated summand `ξ 1(ξ ≤ 1)`.
    pub fn truncated_atoms(&self) -> Vec<(f64, f64)> {
        self.atoms
            .iter()
            .map(|&(v, p)| (if v <= 1.0 { v } else { 0.0 }, p))
            .collect()
    }

    /// All outcomes of the sum of the first `m` summands (`m ≤ n`).
    pub fn enumerate(&self, m: u32) -> Result<Vec<Outcome>> {
        if m > self.n {
            return Err(Error::Domain(format!("m = {m} exceeds n = {}", self.n)));
        }
        let outcomes = self.product_space();
        if outcomes > MAX_OUTCOMES as f64 {
            return Err(Error::EnumerationTooLarge {
                outcomes,
                limit: MAX_OUTCOMES,
            });
        }
        let mut out = Vec::new();
        let mut counts = vec![0u32; self.atoms.len()];
        self.compositions(0, m, &mut counts, &mut out);
        Ok(out)
    }

    fn compositions(&self, j: usize, left: u32, counts: &mut [u32], out: &mut Vec<Outcome>) {
        let k = self.atoms.len();
        if j + 1 == k {
            counts[j] = left;
            out.push(self.outcome(counts));
            return;
        }
        for c in 0..=left {
            counts[j] = c;
            self.compositions(j + 1, left - c, counts, out);
        }
    }

    fn outcome(&self, counts: &[u32]) -> Outcome {
        let mut remaining: u32 = counts.iter().sum();
        let mut prob = 1.0;
        let mut w = 0.0;
        let mut w_bar = 0.0;
        let mut max = f64::NEG_INFINITY;
        for (&(v, p), &c) in self.atoms.iter().zip(counts) {
            prob *= binomial(remaining, c) * p.powi(c as i32);
            remaining -= c;
            if c > 0 {
                w += c as f64 * v;
                if v <= 1.0 {
                    w_bar += c as f64 * v;
                }
                max = max.max(v);
            }
        }
        Outcome {
            w,
            w_bar,
            max,
            prob,
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r.round()
}

/// Exact `E h(outcome)`.
pub fn expect(outcomes: &[Outcome], h: impl Fn(&Outcome) -> f64) -> f64 {
    outcomes.iter().map(|o| o.prob * h(o)).sum()
}

/// Exact `P(pred(outcome))`.
pub fn probability(outcomes: &[Outcome], pred: impl Fn(&Outcome) -> bool) -> f64 {
    outcomes.iter().filter(|o| pred(o)).map(|o| o.prob).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_family_law() {
        let fam = SummandFamily::symmetric(4);
        let out = fam.enumerate(4).unwrap();
        assert_eq!(out.len(), 5);
        let total: f64 = out.iter().map(|o| o.prob).sum();
        assert!((total - 1.0).abs() < 1e-15);
        // W = 0 needs two of each sign: 6/16
        let p0 = probability(&out, |o| o.w.abs() < 1e-12);
        assert!((p0 - 0.375).abs() < 1e-15);
        let var = expect(&out, |o| o.w * o.w);
        assert!((var - 1.0).abs() < 1e-14);
    }

    #[test]
    fn families_are_standardized() {
        for fam in SummandFamily::defaults() {
            let (m1, m2) = fam.summand_moments();
            assert!(m1.abs() < 1e-15, "{}", fam.name);
            assert!((fam.n as f64 * m2 - 1.0).abs() < 1e-12, "{}", fam.name);
            let out = fam.enumerate(fam.n).unwrap();
            let var = expect(&out, |o| o.w * o.w);
            assert!((var - 1.0).abs() < 1e-12, "{}", fam.name);
        }
    }

    #[test]
    fn truncation_only_touches_large_atoms() {
        let fam = SummandFamily::bernoulli(10, 0.05);
        assert!(fam.atoms[1].0 > 1.0);
        let p = fam.profile().unwrap();
        assert!(p.beta2 > 0.0);
        let out = fam.enumerate(10).unwrap();
        for o in &out {
            assert!(o.w_bar <= o.w + 1e-15);
            if o.max <= 1.0 {
                assert_eq!(o.w, o.w_bar);
            }
        }
    }

    #[test]
    fn refuses_large_spaces() {
        let fam = SummandFamily::symmetric(21);
        match fam.enumerate(21) {
            Err(Error::EnumerationTooLarge { outcomes, limit }) => {
                assert_eq!(outcomes, 2f64.powi(21));
                assert_eq!(limit, MAX_OUTCOMES);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        assert!(SummandFamily::symmetric(19).enumerate(19).is_ok());
    }

    #[test]
    fn partial_sums() {
        let fam = SummandFamily::three_atom(6);
        let out = fam.enumerate(5).unwrap();
        let var = expect(&out, |o| o.w * o.w);
        assert!((var - 5.0 / 6.0).abs() < 1e-12);
    }
}
