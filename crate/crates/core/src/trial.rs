//! Treatment choice with data from an ideal two-arm randomized trial.

use std::cmp::Ordering;

use rand_distr::{Binomial, Distribution};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::engine::{
    exact_max_regret_over_grid, max_regret_over_grid, Axis, Constraint, DecisionRule, GridResult, Model,
    ReplicationPlan, Spacing, StateGrid, Stream, SweepOptions, EXACT_LIMIT,
};
use crate::error::{input, Result};
use crate::types::{TieBreak, Treatment};

pub const P_A: usize = 0;
pub const P_B: usize = 1;
pub const PARAMETER_NAMES: [&str; 2] = ["p_a", "p_b"];

/// Success probabilities of the two treatments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialState {
    pub p_a: f64,
    pub p_b: f64,
}

impl TrialState {
    pub fn new(p_a: f64, p_b: f64) -> Result<Self> {
        for (name, v) in PARAMETER_NAMES.iter().zip([p_a, p_b]) {
            if !(0.0..=1.0).contains(&v) {
                return input(format!("{name} = {v} lies outside [0, 1]"));
            }
        }
        Ok(TrialState { p_a, p_b })
    }

    pub fn from_params(params: &[f64]) -> Self {
        TrialState {
            p_a: params[P_A],
            p_b: params[P_B],
        }
    }

    pub fn best(&self) -> f64 {
        self.p_a.max(self.p_b)
    }
}

/// Per-arm sizes and success counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSample {
    pub n_a: usize,
    pub n_b: usize,
    pub k_a: usize,
    pub k_b: usize,
}

impl TrialSample {
    pub fn new(n_a: usize, n_b: usize, k_a: usize, k_b: usize) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return input("both arms need at least one subject");
        }
        if k_a > n_a || k_b > n_b {
            return input(format!("success counts ({k_a}, {k_b}) exceed arm sizes ({n_a}, {n_b})"));
        }
        Ok(TrialSample { n_a, n_b, k_a, k_b })
    }

    /// Sign of `k_b / n_b - k_a / n_a`, computed without division.
    fn rate_comparison(&self) -> Ordering {
        (self.k_b * self.n_a).cmp(&(self.k_a * self.n_b))
    }
}

pub fn simulate_trial_sample(state: &TrialState, n_a: usize, n_b: usize, stream: &mut Stream) -> TrialSample {
    let draw = |n: usize, p: f64, stream: &mut Stream| -> usize {
        // p is validated upstream, so construction cannot fail
        Binomial::new(n as u64, p).map(|b| b.sample(stream) as usize).unwrap_or(0)
    };
    let k_a = draw(n_a, state.p_a, stream);
    let k_b = draw(n_b, state.p_b, stream);
    TrialSample { n_a, n_b, k_a, k_b }
}

/// Empirical success: `b` iff its success rate is strictly higher.
pub fn rule_es_trial(sample: &TrialSample) -> Treatment {
    match sample.rate_comparison() {
        Ordering::Greater => Treatment::B,
        _ => Treatment::A,
    }
}

/// One-sided pooled two-proportion z-test of `H0: p_b <= p_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpTest {
    alpha: f64,
    critical: f64,
}

impl NpTest {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return input(format!("alpha = {alpha} must lie strictly between 0 and 1"));
        }
        let critical = Normal::standard().inverse_cdf(1.0 - alpha);
        Ok(NpTest { alpha, critical })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn critical_value(&self) -> f64 {
        self.critical
    }

    /// Pooled z-statistic; `None` when every outcome is a success or every
    /// outcome is a failure.
    pub fn statistic(sample: &TrialSample) -> Option<f64> {
        let (n_a, n_b) = (sample.n_a as f64, sample.n_b as f64);
        let pooled = (sample.k_a + sample.k_b) as f64 / (n_a + n_b);
        if pooled <= 0.0 || pooled >= 1.0 {
            return None;
        }
        let diff = sample.k_b as f64 / n_b - sample.k_a as f64 / n_a;
        Some(diff / (pooled * (1.0 - pooled) * (1.0 / n_a + 1.0 / n_b)).sqrt())
    }

    pub fn decide(&self, sample: &TrialSample) -> Treatment {
        match Self::statistic(sample) {
            Some(z) if z > self.critical => Treatment::B,
            _ => Treatment::A,
        }
    }
}

/// Chooses `b` only when the test rejects that `b` is no better than `a`.
pub fn rule_np_test(sample: &TrialSample, alpha: f64) -> Result<Treatment> {
    Ok(NpTest::new(alpha)?.decide(sample))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRegret {
    pub regret: f64,
    pub expected_welfare: f64,
}

/// Regret as the probability of choosing the inferior treatment times the
/// welfare gap.
pub fn regret_from_error_prob(state: &TrialState, prob_choose_b: f64) -> Result<TrialRegret> {
    if !(0.0..=1.0).contains(&prob_choose_b) {
        return input(format!("probability {prob_choose_b} lies outside [0, 1]"));
    }
    let regret = match state.p_a.partial_cmp(&state.p_b) {
        Some(Ordering::Greater) => prob_choose_b * (state.p_a - state.p_b),
        Some(Ordering::Less) => (1.0 - prob_choose_b) * (state.p_b - state.p_a),
        _ => 0.0,
    };
    Ok(TrialRegret {
        regret,
        expected_welfare: state.best() - regret,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrialRule {
    Es(TieBreak),
    Np(NpTest),
}

impl TrialRule {
    pub fn np(alpha: f64) -> Result<Self> {
        Ok(TrialRule::Np(NpTest::new(alpha)?))
    }
}

impl DecisionRule<TrialSample> for TrialRule {
    fn id(&self) -> String {
        match self {
            TrialRule::Es(t) => format!("es-trial(tie={})", t.as_str()),
            TrialRule::Np(t) => format!("np-test(alpha={})", t.alpha),
        }
    }

    fn decide(&self, sample: &TrialSample, stream: &mut Stream) -> f64 {
        match self {
            TrialRule::Es(tie) => match sample.rate_comparison() {
                Ordering::Greater => 1.0,
                Ordering::Less => 0.0,
                Ordering::Equal => tie.resolve(stream),
            },
            TrialRule::Np(test) => test.decide(sample).allocation(),
        }
    }

    fn decision_distribution(&self, sample: &TrialSample) -> Vec<(f64, f64)> {
        match self {
            TrialRule::Es(tie) => match sample.rate_comparison() {
                Ordering::Greater => vec![(1.0, 1.0)],
                Ordering::Less => vec![(0.0, 1.0)],
                Ordering::Equal => tie.distribution(),
            },
            TrialRule::Np(test) => vec![(test.decide(sample).allocation(), 1.0)],
        }
    }
}

/// Two-arm trial with fixed arm sizes; states are `(p_a, p_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialModel {
    pub n_a: usize,
    pub n_b: usize,
}

impl TrialModel {
    pub fn balanced(n_per_arm: usize) -> Self {
        TrialModel {
            n_a: n_per_arm,
            n_b: n_per_arm,
        }
    }

    pub fn total(&self) -> usize {
        self.n_a + self.n_b
    }
}

impl Model for TrialModel {
    type Sample = TrialSample;

    /// `n` is ignored in favour of the model's arm sizes.
    fn simulate(&self, state: &[f64], _n: usize, stream: &mut Stream) -> TrialSample {
        simulate_trial_sample(&TrialState::from_params(state), self.n_a, self.n_b, stream)
    }

    fn unit_distributions(&self, state: &[f64], _n: usize) -> Vec<Vec<f64>> {
        let s = TrialState::from_params(state);
        let mut units = vec![vec![1.0 - s.p_a, s.p_a]; self.n_a];
        units.extend(vec![vec![1.0 - s.p_b, s.p_b]; self.n_b]);
        units
    }

    fn assemble(&self, categories: &[usize]) -> TrialSample {
        let (a, b) = categories.split_at(self.n_a);
        TrialSample {
            n_a: self.n_a,
            n_b: self.n_b,
            k_a: a.iter().sum(),
            k_b: b.iter().sum(),
        }
    }

    fn welfare(&self, decision: f64, state: &[f64]) -> f64 {
        let s = TrialState::from_params(state);
        decision * s.p_b + (1.0 - decision) * s.p_a
    }

    fn optimum(&self, state: &[f64]) -> f64 {
        TrialState::from_params(state).best()
    }

    fn sampling_params(&self) -> &[usize] {
        &[P_A, P_B]
    }
}

/// Scores a decision by the allocation itself, so expected welfare becomes
/// the probability of choosing `b`.
struct ChoiceProbability(TrialModel);

impl Model for ChoiceProbability {
    type Sample = TrialSample;

    fn simulate(&self, state: &[f64], n: usize, stream: &mut Stream) -> TrialSample {
        self.0.simulate(state, n, stream)
    }

    fn unit_distributions(&self, state: &[f64], n: usize) -> Vec<Vec<f64>> {
        self.0.unit_distributions(state, n)
    }

    fn assemble(&self, categories: &[usize]) -> TrialSample {
        self.0.assemble(categories)
    }

    fn welfare(&self, decision: f64, _state: &[f64]) -> f64 {
        decision
    }

    fn optimum(&self, _state: &[f64]) -> f64 {
        1.0
    }

    fn sampling_params(&self) -> &[usize] {
        self.0.sampling_params()
    }
}

/// Risk of one rule in one trial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRisk {
    pub prob_choose_b: f64,
    pub expected_welfare: f64,
    pub regret: f64,
    pub mc_stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub state: TrialState,
    pub es: TrialRisk,
    pub np: TrialRisk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialComparison {
    pub n_per_arm: usize,
    pub alpha: f64,
    /// Whether the risks came from exact enumeration.
    pub exact: bool,
    pub max_regret_es: f64,
    pub max_regret_np: f64,
    pub argmax_es: TrialState,
    pub argmax_np: TrialState,
    pub rows: Vec<TrialRow>,
}

impl TrialComparison {
    /// Columns `p_a,p_b,regret_es,regret_np`, closed by a row of maxima.
    pub fn to_csv(&self, decimals: Option<usize>) -> String {
        let f = |v: f64| match decimals {
            Some(d) => format!("{v:.d$}"),
            None => format!("{v}"),
        };
        let mut out = String::from("p_a,p_b,regret_es,regret_np\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                f(r.state.p_a),
                f(r.state.p_b),
                f(r.es.regret),
                f(r.np.regret)
            ));
        }
        out.push_str(&format!("max,max,{},{}\n", f(self.max_regret_es), f(self.max_regret_np)));
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "n per arm {}, alpha {}: ES max regret {:.4} at ({:.2}, {:.2}); NP max regret {:.4} at ({:.2}, {:.2}){}",
            self.n_per_arm,
            self.alpha,
            self.max_regret_es,
            self.argmax_es.p_a,
            self.argmax_es.p_b,
            self.max_regret_np,
            self.argmax_np.p_a,
            self.argmax_np.p_b,
            if self.exact { " [exact]" } else { "" }
        )
    }
}

/// Square grid over `(p_a, p_b)`.
pub fn trial_grid(density: usize, spacing: Spacing) -> Result<StateGrid> {
    StateGrid::new(
        vec![
            Axis::uniform(PARAMETER_NAMES[P_A], density, spacing)?,
            Axis::uniform(PARAMETER_NAMES[P_B], density, spacing)?,
        ],
        Constraint::Unrestricted,
    )
}

fn choice_risks(
    model: TrialModel,
    rule: &TrialRule,
    grid: &StateGrid,
    plan: &ReplicationPlan,
    options: &SweepOptions,
    exact: bool,
) -> Result<Vec<TrialRisk>> {
    let wrapped = ChoiceProbability(model);
    let result: GridResult = if exact {
        exact_max_regret_over_grid(&wrapped, rule, grid, model.total())?
    } else {
        max_regret_over_grid(&wrapped, rule, grid, plan, options)?
    };
    result
        .rows
        .iter()
        .map(|row| {
            let state = TrialState::from_params(&row.state);
            let prob = row.estimate.expected_welfare.clamp(0.0, 1.0);
            let r = regret_from_error_prob(&state, prob)?;
            Ok(TrialRisk {
                prob_choose_b: prob,
                expected_welfare: r.expected_welfare,
                regret: r.regret,
                mc_stderr: row.estimate.mc_stderr * (state.p_b - state.p_a).abs(),
            })
        })
        .collect()
}

fn argmax(rows: &[TrialRow], pick: impl Fn(&TrialRow) -> f64) -> (f64, TrialState) {
    let mut best = (pick(&rows[0]), rows[0].state);
    for r in &rows[1..] {
        if pick(r) > best.0 {
            best = (pick(r), r.state);
        }
    }
    best
}

/// Maximum regret of the empirical-success rule (ties to `a`) and of the
/// z-test rule over `grid`, with `n_per_arm` subjects per arm. Uses exact
/// enumeration when the whole trial has at most 12 subjects.
pub fn compare_max_regret(
    n_per_arm: usize,
    alpha: f64,
    grid: &StateGrid,
    replicates: u64,
    seed: u64,
    options: &SweepOptions,
) -> Result<TrialComparison> {
    if n_per_arm == 0 {
        return input("n per arm must be at least 1");
    }
    if grid.axes().len() != 2 {
        return input("trial grids have exactly two axes, p_a and p_b");
    }
    let model = TrialModel::balanced(n_per_arm);
    let plan = ReplicationPlan::new(replicates, seed, model.total())?;
    let exact = model.total() <= EXACT_LIMIT;
    let es = choice_risks(model, &TrialRule::Es(TieBreak::A), grid, &plan, options, exact)?;
    let np = choice_risks(model, &TrialRule::np(alpha)?, grid, &plan, options, exact)?;
    let rows: Vec<TrialRow> = grid
        .states()
        .into_iter()
        .zip(es.into_iter().zip(np))
        .map(|(s, (es, np))| TrialRow {
            state: TrialState::from_params(&s),
            es,
            np,
        })
        .collect();
    let (max_regret_es, argmax_es) = argmax(&rows, |r| r.es.regret);
    let (max_regret_np, argmax_np) = argmax(&rows, |r| r.np.regret);
    Ok(TrialComparison {
        n_per_arm,
        alpha,
        exact,
        max_regret_es,
        max_regret_np,
        argmax_es,
        argmax_np,
        rows,
    })
}
