//! Choice between a status-quo treatment `a` and an innovation `b` using
//! observational data, when counterfactual outcomes are never observed.
//!
//! A state fixes the success probability of each treatment among those who
//! received it (`e_a1`, `e_b1`) and among those who did not (`e_a0`, `e_b0`),
//! plus the share `p` of the population that received `b`. By iterated
//! expectations the population means are
//!
//! ```text
//! E[y(a)] = e_a1 * (1 - p) + e_a0 * p
//! E[y(b)] = e_b1 * p       + e_b0 * (1 - p)
//! ```
//!
//! Decisions are allocations to `b` in `[0, 1]`; welfare of allocation `z`
//! is `z * E[y(b)] + (1 - z) * E[y(a)]`.

use std::cmp::Ordering;
use std::fmt;

use crate::engine::{
    max_regret_over_grid, Axis, Constraint, DecisionRule, Model, RegretTable, ReplicationPlan,
    StateGrid, Stream, TableCell, TableSettings,
};
use crate::error::{input, Result};
use crate::types::{Panel, TieBreak, Treatment};

pub const E_A1: usize = 0;
pub const E_A0: usize = 1;
pub const E_B1: usize = 2;
pub const E_B0: usize = 3;
pub const P: usize = 4;
pub const PARAMETER_NAMES: [&str; 5] = ["e_a1", "e_a0", "e_b1", "e_b0", "p"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreatmentState {
    pub e_a1: f64,
    pub e_a0: f64,
    pub e_b1: f64,
    pub e_b0: f64,
    pub p: f64,
}

impl TreatmentState {
    pub fn new(e_a1: f64, e_a0: f64, e_b1: f64, e_b0: f64, p: f64) -> Result<Self> {
        let s = TreatmentState {
            e_a1,
            e_a0,
            e_b1,
            e_b0,
            p,
        };
        for (name, v) in PARAMETER_NAMES.iter().zip(s.to_params()) {
            if !(0.0..=1.0).contains(&v) {
                return input(format!("{name} = {v} lies outside [0, 1]"));
            }
        }
        Ok(s)
    }

    pub fn from_params(params: &[f64]) -> Self {
        TreatmentState {
            e_a1: params[E_A1],
            e_a0: params[E_A0],
            e_b1: params[E_B1],
            e_b0: params[E_B0],
            p: params[P],
        }
    }

    pub fn to_params(self) -> Vec<f64> {
        vec![self.e_a1, self.e_a0, self.e_b1, self.e_b0, self.p]
    }

    pub fn mean_a(&self) -> f64 {
        self.e_a1 * (1.0 - self.p) + self.e_a0 * self.p
    }

    pub fn mean_b(&self) -> f64 {
        self.e_b1 * self.p + self.e_b0 * (1.0 - self.p)
    }

    /// The state seen with the treatment labels exchanged.
    pub fn relabeled(&self) -> Self {
        TreatmentState {
            e_a1: self.e_b1,
            e_a0: self.e_b0,
            e_b1: self.e_a1,
            e_b0: self.e_a0,
            p: 1.0 - self.p,
        }
    }
}

/// Realized treatments and outcomes, one pair per sampled unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationalSample {
    pub units: Vec<(Treatment, bool)>,
}

impl ObservationalSample {
    pub fn summary(&self) -> ObservationalSummary {
        let mut s = ObservationalSummary {
            n: self.units.len(),
            treated_b: 0,
            successes_a: 0,
            successes_b: 0,
        };
        for &(t, y) in &self.units {
            match t {
                Treatment::A => s.successes_a += y as usize,
                Treatment::B => {
                    s.treated_b += 1;
                    s.successes_b += y as usize;
                }
            }
        }
        s
    }
}

/// Sufficient statistics of an observational sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObservationalSummary {
    pub n: usize,
    pub treated_b: usize,
    pub successes_a: usize,
    pub successes_b: usize,
}

/// A proportion kept as numerator over denominator, so comparisons are exact.
#[derive(Debug, Clone, Copy)]
struct Ratio(u64, u64);

impl Ratio {
    fn cmp(self, other: Ratio) -> Ordering {
        (self.0 * other.1).cmp(&(other.0 * self.1))
    }

    fn value(self) -> f64 {
        self.0 as f64 / self.1 as f64
    }
}

impl ObservationalSummary {
    pub fn treated_a(&self) -> usize {
        self.n - self.treated_b
    }

    fn arm_ratio(successes: usize, size: usize) -> Ratio {
        if size == 0 {
            Ratio(1, 2)
        } else {
            Ratio(successes as u64, size as u64)
        }
    }

    /// Mean outcome of units treated with `a`; 1/2 for an empty arm.
    pub fn mean_a(&self) -> f64 {
        Self::arm_ratio(self.successes_a, self.treated_a()).value()
    }

    /// Mean outcome of units treated with `b`; 1/2 for an empty arm.
    pub fn mean_b(&self) -> f64 {
        Self::arm_ratio(self.successes_b, self.treated_b).value()
    }

    /// Share of the sample treated with `b`.
    pub fn p_n(&self) -> f64 {
        self.treated_b as f64 / self.n as f64
    }

    // z_N = (S_b - S_a + N - K) / N, free of the empty-arm fallback.
    fn z_numerator(&self) -> usize {
        self.successes_b + self.treated_a() - self.successes_a
    }

    fn z_vs_half(&self) -> Ordering {
        (2 * self.z_numerator()).cmp(&self.n)
    }

    fn es_comparison(&self, empty: EmptyArm) -> Ordering {
        if empty == EmptyArm::NoChoice && (self.treated_b == 0 || self.treated_a() == 0) {
            return Ordering::Equal;
        }
        Self::arm_ratio(self.successes_b, self.treated_b)
            .cmp(Self::arm_ratio(self.successes_a, self.treated_a()))
    }
}

fn simulate_units(state: &TreatmentState, n: usize, stream: &mut Stream) -> (Vec<bool>, usize, usize) {
    let treated_b: Vec<bool> = (0..n).map(|_| stream.bernoulli(state.p)).collect();
    let k = treated_b.iter().filter(|&&t| t).count();
    let successes_b = (0..k).filter(|_| stream.bernoulli(state.e_b1)).count();
    let successes_a = (0..n - k).filter(|_| stream.bernoulli(state.e_a1)).count();
    (treated_b, successes_a, successes_b)
}

/// Draws `N` treatment indicators, then outcomes for the `b`-treated units
/// followed by outcomes for the `a`-treated units. Counterfactual
/// parameters are never used.
pub fn simulate_observational_sample(state: &TreatmentState, n: usize, stream: &mut Stream) -> ObservationalSample {
    let treated_b: Vec<bool> = (0..n).map(|_| stream.bernoulli(state.p)).collect();
    let k = treated_b.iter().filter(|&&t| t).count();
    let mut outcomes_b = (0..k).map(|_| stream.bernoulli(state.e_b1)).collect::<Vec<_>>().into_iter();
    let mut outcomes_a = (0..n - k).map(|_| stream.bernoulli(state.e_a1)).collect::<Vec<_>>().into_iter();
    let units = treated_b
        .into_iter()
        .map(|b| {
            if b {
                (Treatment::B, outcomes_b.next().unwrap_or(false))
            } else {
                (Treatment::A, outcomes_a.next().unwrap_or(false))
            }
        })
        .collect();
    ObservationalSample { units }
}

/// Same draws as [`simulate_observational_sample`], keeping only the counts.
pub fn simulate_observational_summary(state: &TreatmentState, n: usize, stream: &mut Stream) -> ObservationalSummary {
    let (treated, successes_a, successes_b) = simulate_units(state, n, stream);
    ObservationalSummary {
        n,
        treated_b: treated.iter().filter(|&&t| t).count(),
        successes_a,
        successes_b,
    }
}

/// The minimax-regret fractional allocation to `b` when realized outcome
/// distributions are known and counterfactual ones are unrestricted.
pub fn z_mmr(e_a1: f64, e_b1: f64, p: f64) -> f64 {
    e_b1 * p + (1.0 - e_a1) * (1.0 - p)
}

/// Maximum regret of allocating `z` to `b`, over the extreme counterfactual
/// success probabilities `(e_a0, e_b0) ∈ {0, 1}²`.
pub fn fractional_max_regret(z: f64, e_a1: f64, e_b1: f64, p: f64) -> f64 {
    let mut worst = 0.0f64;
    for e_a0 in [0.0, 1.0] {
        for e_b0 in [0.0, 1.0] {
            let s = TreatmentState {
                e_a1,
                e_a0,
                e_b1,
                e_b0,
                p,
            };
            let (ma, mb) = (s.mean_a(), s.mean_b());
            worst = worst.max(ma.max(mb) - (z * mb + (1.0 - z) * ma));
        }
    }
    worst
}

/// Deterministic singleton choice minimizing maximum regret.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingletonChoice {
    pub treatment: Treatment,
    pub max_regret_a: f64,
    pub max_regret_b: f64,
    /// Both treatments have the same maximum regret.
    pub tie: bool,
}

/// `a` has maximum regret `z_MMR` and `b` has `1 - z_MMR`; `a` wins ties.
pub fn singleton_mmr_choice(e_a1: f64, e_b1: f64, p: f64) -> SingletonChoice {
    let z = z_mmr(e_a1, e_b1, p);
    let (ra, rb) = (z, 1.0 - z);
    SingletonChoice {
        treatment: if ra > rb { Treatment::B } else { Treatment::A },
        max_regret_a: ra,
        max_regret_b: rb,
        tie: ra == rb,
    }
}

/// Empirical success rule when the realized outcome distributions are known.
pub fn rule_es_known(e_a1: f64, e_b1: f64, on_tie: Treatment) -> Treatment {
    match e_b1.partial_cmp(&e_a1) {
        Some(Ordering::Greater) => Treatment::B,
        Some(Ordering::Less) => Treatment::A,
        _ => on_tie,
    }
}

/// Sample analog of `z_MMR`.
pub fn rule_z_n(sample: &ObservationalSummary) -> f64 {
    sample.z_numerator() as f64 / sample.n as f64
}

/// Randomized singleton rule: `b` iff a uniform draw is at most `z_N`.
pub fn rule_z_nu(sample: &ObservationalSummary, stream: &mut Stream) -> Treatment {
    if stream.uniform() <= rule_z_n(sample) {
        Treatment::B
    } else {
        Treatment::A
    }
}

/// `b` iff `z_N > 1/2`, `a` otherwise.
pub fn rule_ammr(sample: &ObservationalSummary) -> Treatment {
    match sample.z_vs_half() {
        Ordering::Greater => Treatment::B,
        _ => Treatment::A,
    }
}

/// `b` iff its arm mean is strictly larger, `a` otherwise.
pub fn rule_es_observational(sample: &ObservationalSummary) -> Treatment {
    match sample.es_comparison(EmptyArm::Half) {
        Ordering::Greater => Treatment::B,
        _ => Treatment::A,
    }
}

/// How the empirical success rule treats a sample in which one arm is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptyArm {
    /// The empty arm's mean is taken to be 1/2.
    #[default]
    Half,
    /// The rule yields no unique choice and the tie policy decides.
    NoChoice,
}

impl EmptyArm {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "half" => Ok(EmptyArm::Half),
            "no-choice" | "tie" | "default" => Ok(EmptyArm::NoChoice),
            other => input(format!("unknown empty-arm policy `{other}` (expected half or no-choice)")),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EmptyArm::Half => "half",
            EmptyArm::NoChoice => "no-choice",
        }
    }
}

/// Built-in treatment rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreatmentRule {
    Ammr(TieBreak),
    Es(TieBreak, EmptyArm),
    /// Fractional allocation `z_N`.
    ZN,
    /// Randomized singleton rule built from `z_N`.
    ZNu,
}

impl TreatmentRule {
    pub fn parse(s: &str, tie: TieBreak) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ammr" => Ok(TreatmentRule::Ammr(tie)),
            "es" => Ok(TreatmentRule::Es(tie, EmptyArm::default())),
            "z_n" | "zn" | "z-n" => Ok(TreatmentRule::ZN),
            "z_nu" | "znu" | "z-nu" => Ok(TreatmentRule::ZNu),
            other => input(format!("unknown treatment rule `{other}`")),
        }
    }

    /// Same rule with the treatment labels exchanged.
    pub fn mirrored(self) -> Self {
        match self {
            TreatmentRule::Ammr(t) => TreatmentRule::Ammr(t.mirrored()),
            TreatmentRule::Es(t, e) => TreatmentRule::Es(t.mirrored(), e),
            other => other,
        }
    }

    fn tie_order(ordering: Ordering, tie: TieBreak) -> Vec<(f64, f64)> {
        match ordering {
            Ordering::Greater => vec![(1.0, 1.0)],
            Ordering::Less => vec![(0.0, 1.0)],
            Ordering::Equal => tie.distribution(),
        }
    }
}

impl DecisionRule<ObservationalSummary> for TreatmentRule {
    fn id(&self) -> String {
        match self {
            TreatmentRule::Ammr(t) => format!("ammr(tie={})", t.as_str()),
            TreatmentRule::Es(t, e) => format!("es(tie={}, empty={})", t.as_str(), e.as_str()),
            TreatmentRule::ZN => "z_n".into(),
            TreatmentRule::ZNu => "z_nu".into(),
        }
    }

    fn decide(&self, sample: &ObservationalSummary, stream: &mut Stream) -> f64 {
        let pick = |ordering: Ordering, tie: TieBreak, stream: &mut Stream| match ordering {
            Ordering::Greater => 1.0,
            Ordering::Less => 0.0,
            Ordering::Equal => tie.resolve(stream),
        };
        match *self {
            TreatmentRule::Ammr(tie) => pick(sample.z_vs_half(), tie, stream),
            TreatmentRule::Es(tie, empty) => pick(sample.es_comparison(empty), tie, stream),
            TreatmentRule::ZN => rule_z_n(sample),
            TreatmentRule::ZNu => rule_z_nu(sample, stream).allocation(),
        }
    }

    fn decision_distribution(&self, sample: &ObservationalSummary) -> Vec<(f64, f64)> {
        match *self {
            TreatmentRule::Ammr(tie) => Self::tie_order(sample.z_vs_half(), tie),
            TreatmentRule::Es(tie, empty) => Self::tie_order(sample.es_comparison(empty), tie),
            TreatmentRule::ZN => vec![(rule_z_n(sample), 1.0)],
            TreatmentRule::ZNu => {
                let z = rule_z_n(sample);
                vec![(1.0, z), (0.0, 1.0 - z)]
            }
        }
    }
}

/// Observational study with binary outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TreatmentModel;

// unit categories: (a, 0), (a, 1), (b, 0), (b, 1)
const CAT_A_SUCCESS: usize = 1;
const CAT_B_FAILURE: usize = 2;
const CAT_B_SUCCESS: usize = 3;

impl Model for TreatmentModel {
    type Sample = ObservationalSummary;

    fn simulate(&self, state: &[f64], n: usize, stream: &mut Stream) -> ObservationalSummary {
        simulate_observational_summary(&TreatmentState::from_params(state), n, stream)
    }

    fn unit_distributions(&self, state: &[f64], n: usize) -> Vec<Vec<f64>> {
        let s = TreatmentState::from_params(state);
        let unit = vec![
            (1.0 - s.p) * (1.0 - s.e_a1),
            (1.0 - s.p) * s.e_a1,
            s.p * (1.0 - s.e_b1),
            s.p * s.e_b1,
        ];
        vec![unit; n]
    }

    fn assemble(&self, categories: &[usize]) -> ObservationalSummary {
        let count = |c: usize| categories.iter().filter(|&&x| x == c).count();
        let successes_b = count(CAT_B_SUCCESS);
        ObservationalSummary {
            n: categories.len(),
            treated_b: count(CAT_B_FAILURE) + successes_b,
            successes_a: count(CAT_A_SUCCESS),
            successes_b,
        }
    }

    fn welfare(&self, decision: f64, state: &[f64]) -> f64 {
        let s = TreatmentState::from_params(state);
        decision * s.mean_b() + (1.0 - decision) * s.mean_a()
    }

    fn optimum(&self, state: &[f64]) -> f64 {
        let s = TreatmentState::from_params(state);
        s.mean_a().max(s.mean_b())
    }

    fn sampling_params(&self) -> &[usize] {
        &[E_A1, E_B1, P]
    }
}

/// Grid over the four outcome probabilities with `p` fixed.
pub fn treatment_grid(panel: Panel, settings: &TableSettings, p: f64) -> Result<StateGrid> {
    let axis = |i: usize| Axis::uniform(PARAMETER_NAMES[i], settings.density, settings.spacing);
    let constraint = match panel {
        Panel::A => Constraint::Unrestricted,
        Panel::B => Constraint::Band {
            pairs: vec![(E_A1, E_A0), (E_B1, E_B0)],
            half_width: 0.5,
        },
    };
    StateGrid::new(
        vec![axis(E_A1)?, axis(E_A0)?, axis(E_B1)?, axis(E_B0)?, Axis::fixed(PARAMETER_NAMES[P], p)?],
        constraint,
    )
}

/// Maximum regret of a treatment rule for each `(N, p)` cell.
pub fn max_regret_table(
    rule: TreatmentRule,
    panel: Panel,
    n_list: &[usize],
    p_list: &[f64],
    settings: &TableSettings,
) -> Result<RegretTable> {
    if settings.density < 2 {
        return input("grid density must be at least 2");
    }
    if n_list.is_empty() || p_list.is_empty() {
        return input("table needs at least one row and one column");
    }
    let mut cells = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let plan = ReplicationPlan::new(settings.replicates, settings.seed, n)?;
        let mut row = Vec::with_capacity(p_list.len());
        for &p in p_list {
            let grid = treatment_grid(panel, settings, p)?;
            let result = max_regret_over_grid(&TreatmentModel, &rule, &grid, &plan, &settings.sweep)?;
            row.push(TableCell {
                value: result.max_regret,
                stderr: result.argmax_stderr,
                argmax: result.argmax,
            });
        }
        cells.push(row);
    }
    Ok(RegretTable {
        title: format!("Maximum regret of {} rule, panel {panel}", rule.id()),
        column_label: "p".into(),
        rows: n_list.to_vec(),
        columns: p_list.to_vec(),
        cells,
    })
}

/// Worked example: juvenile sentencing with confinement (`a`) versus
/// non-confinement (`b`), success meaning no new offense.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentencingReport {
    pub e_a1: f64,
    pub e_b1: f64,
    pub p: f64,
    pub z_mmr: f64,
    pub max_regret_a: f64,
    pub max_regret_b: f64,
    pub mmr_choice: Treatment,
    pub es_choice: Treatment,
    pub fractional_allocation: f64,
    pub fractional_max_regret: f64,
}

pub fn sentencing_example() -> SentencingReport {
    let (e_a1, e_b1, p) = (0.23, 0.41, 0.89);
    let choice = singleton_mmr_choice(e_a1, e_b1, p);
    let z = z_mmr(e_a1, e_b1, p);
    SentencingReport {
        e_a1,
        e_b1,
        p,
        z_mmr: z,
        max_regret_a: choice.max_regret_a,
        max_regret_b: choice.max_regret_b,
        mmr_choice: choice.treatment,
        es_choice: rule_es_known(e_a1, e_b1, Treatment::A),
        fractional_allocation: z,
        fractional_max_regret: fractional_max_regret(z, e_a1, e_b1, p),
    }
}

impl fmt::Display for SentencingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Sentencing and recidivism (a = confinement, b = no confinement)")?;
        writeln!(f, "  P[y(a)=1 | treated a] = {:.2}", self.e_a1)?;
        writeln!(f, "  P[y(b)=1 | treated b] = {:.2}", self.e_b1)?;
        writeln!(f, "  share treated b       = {:.2}", self.p)?;
        writeln!(f, "  z_MMR                 = {:.4}", self.z_mmr)?;
        writeln!(f, "  max regret of a       = {:.4}", self.max_regret_a)?;
        writeln!(f, "  max regret of b       = {:.4}", self.max_regret_b)?;
        writeln!(f, "  MMR singleton choice  = {}", self.mmr_choice)?;
        writeln!(
            f,
            "  fractional MMR        = allocate {:.4} to b, max regret {:.4}",
            self.fractional_allocation, self.fractional_max_regret
        )?;
        writeln!(f, "  ES choice             = {}", self.es_choice)?;
        write!(
            f,
            "  note: the ES rule picks the arm with the higher realized success rate \
             ({:.2} > {:.2}), so it selects {}; a reading in which ES selects {} here \
             conflicts with that definition. Either way ES disagrees with the MMR choice \
             only when it selects b.",
            self.e_b1.max(self.e_a1),
            self.e_b1.min(self.e_a1),
            self.es_choice,
            self.es_choice.other()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::derive_stream;

    fn summary(treated_b: usize, successes_a: usize, successes_b: usize, n: usize) -> ObservationalSummary {
        ObservationalSummary {
            n,
            treated_b,
            successes_a,
            successes_b,
        }
    }

    #[test]
    fn z_mmr_values() {
        assert!((z_mmr(0.23, 0.41, 0.89) - 0.4496).abs() < 1e-12);
        for p in [0.0, 0.3, 0.9] {
            assert!((z_mmr(0.5, 0.5, p) - 0.5).abs() < 1e-15);
        }
        assert_eq!(z_mmr(1.0, 0.0, 0.5), 0.0);
    }

    #[test]
    fn fractional_max_regret_values() {
        let z = z_mmr(0.23, 0.41, 0.89);
        assert!((fractional_max_regret(z, 0.23, 0.41, 0.89) - z * (1.0 - z)).abs() < 1e-12);
        assert!((fractional_max_regret(z, 0.23, 0.41, 0.89) - 0.24745984).abs() < 1e-8);
        assert!((fractional_max_regret(0.5, 0.5, 0.5, 0.5) - 0.25).abs() < 1e-15);
        // pure-a allocation: worst corner has e_a0 = 0, e_b0 = 1
        let s = TreatmentState::new(0.2, 0.0, 0.6, 1.0, 0.3).unwrap();
        assert!((fractional_max_regret(0.0, 0.2, 0.6, 0.3) - (s.mean_b() - s.mean_a())).abs() < 1e-15);
    }

    #[test]
    fn singleton_choice_values() {
        let c = singleton_mmr_choice(0.23, 0.41, 0.89);
        assert_eq!(c.treatment, Treatment::A);
        assert!((c.max_regret_a - 0.4496).abs() < 1e-12);
        assert!((c.max_regret_b - 0.5504).abs() < 1e-12);
        let c = singleton_mmr_choice(0.5, 0.5, 0.5);
        assert!(c.tie);
        assert_eq!(c.treatment, Treatment::A);
        assert_eq!((c.max_regret_a, c.max_regret_b), (0.5, 0.5));
        let c = singleton_mmr_choice(0.0, 1.0, 0.5);
        assert_eq!(c.treatment, Treatment::B);
        assert_eq!((c.max_regret_a, c.max_regret_b), (1.0, 0.0));
    }

    #[test]
    fn es_known_values() {
        assert_eq!(rule_es_known(0.23, 0.41, Treatment::A), Treatment::B);
        assert_eq!(rule_es_known(0.41, 0.23, Treatment::A), Treatment::A);
        assert_eq!(rule_es_known(0.3, 0.3, Treatment::A), Treatment::A);
        assert_eq!(rule_es_known(0.3, 0.3, Treatment::B), Treatment::B);
    }

    #[test]
    fn z_n_values() {
        // {(b, 1), (a, 0)}
        let s = ObservationalSample {
            units: vec![(Treatment::B, true), (Treatment::A, false)],
        }
        .summary();
        assert_eq!(rule_z_n(&s), 1.0);
        // all b with mean 1/2, arm a empty
        let s = summary(4, 0, 2, 4);
        assert_eq!(s.mean_a(), 0.5);
        assert_eq!(rule_z_n(&s), 0.5);
        assert_eq!(rule_z_n(&s), s.mean_b() * s.p_n() + (1.0 - s.mean_a()) * (1.0 - s.p_n()));
        // N = 1: only 0 or 1
        for (tb, sa, sb) in [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 0, 1)] {
            let z = rule_z_n(&summary(tb, sa, sb, 1));
            assert!(z == 0.0 || z == 1.0);
        }
    }

    #[test]
    fn z_n_matches_direct_formula() {
        for n in 1..8 {
            for tb in 0..=n {
                for sb in 0..=tb {
                    for sa in 0..=(n - tb) {
                        let s = summary(tb, sa, sb, n);
                        let direct = s.mean_b() * s.p_n() + (1.0 - s.mean_a()) * (1.0 - s.p_n());
                        assert!((rule_z_n(&s) - direct).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn z_nu_extremes_and_frequency() {
        let always_b = summary(2, 0, 2, 2); // z = 1
        let always_a = summary(0, 2, 0, 2); // z = 0
        assert_eq!(rule_z_n(&always_b), 1.0);
        assert_eq!(rule_z_n(&always_a), 0.0);
        for r in 0..1000 {
            assert_eq!(rule_z_nu(&always_b, &mut derive_stream(1, 0, r)), Treatment::B);
            assert_eq!(rule_z_nu(&always_a, &mut derive_stream(1, 0, r)), Treatment::A);
        }
        let half = summary(2, 1, 1, 4); // z = (1 + 2 - 1) / 4
        assert_eq!(rule_z_n(&half), 0.5);
        let reps = 100_000;
        let b = (0..reps)
            .filter(|&r| rule_z_nu(&half, &mut derive_stream(2, 0, r)) == Treatment::B)
            .count();
        assert!((b as f64 / reps as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn ammr_values() {
        assert_eq!(rule_ammr(&summary(2, 0, 2, 2)), Treatment::B);
        // z = (0 + 1 - 1 + ...) choose a sample with z = 0.2
        let s = summary(0, 4, 0, 5); // z = (0 + 5 - 4) / 5
        assert_eq!(rule_z_n(&s), 0.2);
        assert_eq!(rule_ammr(&s), Treatment::A);
        assert_eq!(rule_ammr(&summary(2, 1, 1, 4)), Treatment::A);
        let mut st = derive_stream(0, 0, 0);
        assert_eq!(TreatmentRule::Ammr(TieBreak::B).decide(&summary(2, 1, 1, 4), &mut st), 1.0);
    }

    #[test]
    fn es_observational_values() {
        // a: 1/5 = 0.2, b: 4/5 = 0.8
        assert_eq!(rule_es_observational(&summary(5, 1, 4, 10)), Treatment::B);
        // arm a empty, b mean 0.9
        assert_eq!(rule_es_observational(&summary(10, 0, 9, 10)), Treatment::B);
        assert_eq!(rule_es_observational(&summary(4, 3, 2, 10)), Treatment::A);
        // arm b empty, a mean 0.4 < 1/2
        assert_eq!(rule_es_observational(&summary(0, 2, 0, 5)), Treatment::B);
    }

    #[test]
    fn degenerate_simulations() {
        let all_b = TreatmentState::new(0.3, 0.2, 1.0, 0.0, 1.0).unwrap();
        for r in 0..200 {
            let s = simulate_observational_sample(&all_b, 9, &mut derive_stream(4, 0, r));
            assert!(s.units.iter().all(|&(t, y)| t == Treatment::B && y));
        }
        let st = TreatmentState::new(0.3, 0.2, 0.6, 0.0, 0.4).unwrap();
        for r in 0..300 {
            let full = simulate_observational_sample(&st, 13, &mut derive_stream(4, 1, r));
            let again = simulate_observational_sample(&st, 13, &mut derive_stream(4, 1, r));
            let fast = simulate_observational_summary(&st, 13, &mut derive_stream(4, 1, r));
            assert_eq!(full, again);
            assert_eq!(full.summary(), fast);
        }
    }

    #[test]
    fn sentencing_report() {
        let r = sentencing_example();
        assert!((r.z_mmr - 0.4496).abs() < 1e-12);
        assert_eq!(r.mmr_choice, Treatment::A);
        assert_eq!(r.es_choice, Treatment::B);
        let text = r.to_string();
        assert!(text.contains("0.4496"));
        assert!(text.contains("0.5504"));
        assert!(text.contains("0.2475"));
    }
}
