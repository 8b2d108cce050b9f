//! Per-state risk: Monte Carlo estimates and the exact enumeration oracle.

use super::model::{DecisionRule, Model};
use super::stream::derive_stream;
use crate::error::{input, Error, Result};

/// Largest sample the exact oracle will enumerate.
pub const EXACT_LIMIT: usize = 12;

/// Replicate count used when none is configured.
pub const DEFAULT_REPLICATES: u64 = 5000;

/// Replicates, master seed, and sample size for Monte Carlo evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicationPlan {
    pub replicates: u64,
    pub master_seed: u64,
    pub n: usize,
}

impl ReplicationPlan {
    pub fn new(replicates: u64, master_seed: u64, n: usize) -> Result<Self> {
        if replicates == 0 {
            return input("replicate count must be at least 1");
        }
        if n == 0 {
            return input("sample size must be at least 1");
        }
        Ok(ReplicationPlan {
            replicates,
            master_seed,
            n,
        })
    }
}

/// Expected welfare and regret of a rule in one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    pub expected_welfare: f64,
    pub regret: f64,
    /// Standard error of `expected_welfare`; zero for exact evaluations.
    pub mc_stderr: f64,
    /// Monte Carlo replicates, or enumerated sample configurations for
    /// exact evaluations.
    pub replicates_used: u64,
}

/// Draws `plan.replicates` decisions in one sampling state.
pub(crate) fn simulate_decisions<M, R>(
    model: &M,
    rule: &R,
    state: &[f64],
    plan: &ReplicationPlan,
    state_index: u64,
) -> Result<Vec<f64>>
where
    M: Model,
    R: DecisionRule<M::Sample> + ?Sized,
{
    let mut decisions = Vec::with_capacity(plan.replicates as usize);
    for r in 0..plan.replicates {
        let mut stream = derive_stream(plan.master_seed, state_index, r);
        let sample = model.simulate(state, plan.n, &mut stream);
        let d = rule.decide(&sample, &mut stream);
        if !d.is_finite() {
            return Err(Error::RuleFailure {
                rule: rule.id(),
                replicate: r,
                reason: format!("non-finite decision {d}"),
            });
        }
        decisions.push(d);
    }
    Ok(decisions)
}

/// Averages welfare over simulated decisions.
pub(crate) fn summarize_decisions<M: Model>(model: &M, decisions: &[f64], state: &[f64]) -> RiskEstimate {
    let t = decisions.len() as f64;
    let mean = decisions.iter().map(|&d| model.welfare(d, state)).sum::<f64>() / t;
    let var = if decisions.len() > 1 {
        decisions
            .iter()
            .map(|&d| {
                let e = model.welfare(d, state) - mean;
                e * e
            })
            .sum::<f64>()
            / (t - 1.0)
    } else {
        0.0
    };
    let regret = (model.optimum(state) - mean).max(0.0);
    RiskEstimate {
        expected_welfare: mean,
        regret,
        mc_stderr: (var / t).sqrt(),
        replicates_used: decisions.len() as u64,
    }
}

/// Monte Carlo estimate of a rule's expected welfare and regret in `state`.
///
/// `state_index` selects the family of replicate streams; two calls that
/// share it see identical draws.
pub fn estimate_risk<M, R>(
    model: &M,
    rule: &R,
    state: &[f64],
    plan: &ReplicationPlan,
    state_index: u64,
) -> Result<RiskEstimate>
where
    M: Model,
    R: DecisionRule<M::Sample> + ?Sized,
{
    let decisions = simulate_decisions(model, rule, state, plan, state_index)?;
    Ok(summarize_decisions(model, &decisions, state))
}

/// Exact expected welfare and regret, by summing over every configuration of
/// unit outcomes weighted by its probability in `state`.
pub fn exact_risk_small<M, R>(model: &M, rule: &R, state: &[f64], n: usize) -> Result<RiskEstimate>
where
    M: Model,
    R: DecisionRule<M::Sample> + ?Sized,
{
    if n > EXACT_LIMIT {
        return Err(Error::EnumerationTooLarge {
            n,
            limit: EXACT_LIMIT,
        });
    }
    let dists = model.unit_distributions(state, n);
    if dists.is_empty() {
        return input("model produced no units to enumerate");
    }
    // only categories with positive probability take part
    let support: Vec<Vec<(usize, f64)>> = dists
        .iter()
        .map(|d| {
            d.iter()
                .copied()
                .enumerate()
                .filter(|&(_, p)| p > 0.0)
                .collect()
        })
        .collect();
    if support.iter().any(Vec::is_empty) {
        return input("a unit has no outcome with positive probability");
    }

    let units = support.len();
    let mut pos = vec![0usize; units];
    let mut categories = vec![0usize; units];
    let mut welfare = 0.0;
    let mut configs = 0u64;
    'outer: loop {
        let mut prob = 1.0;
        for (u, &i) in pos.iter().enumerate() {
            let (c, p) = support[u][i];
            categories[u] = c;
            prob *= p;
        }
        let sample = model.assemble(&categories);
        let w: f64 = rule
            .decision_distribution(&sample)
            .iter()
            .map(|&(d, q)| q * model.welfare(d, state))
            .sum();
        welfare += prob * w;
        configs += 1;

        let mut k = units;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            pos[k] += 1;
            if pos[k] < support[k].len() {
                break;
            }
            pos[k] = 0;
        }
    }
    Ok(RiskEstimate {
        expected_welfare: welfare,
        regret: (model.optimum(state) - welfare).max(0.0),
        mc_stderr: 0.0,
        replicates_used: configs,
    })
}
