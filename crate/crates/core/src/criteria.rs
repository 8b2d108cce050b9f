//! Decision criteria over finite problems, and ranking of decision rules by
//! their state-dependent risk.
//!
//! Ties go to the first candidate in declared order; every tied candidate
//! is also reported. Scores are compared after rounding to 12 significant
//! digits so that ties do not hinge on the last bits of a float.

use std::collections::HashSet;
use std::io::Read;

use crate::engine::{GridResult, RiskEstimate};
use crate::error::{input, Error, Result};

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn check_labels(kind: &str, labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return input(format!("{kind} list is empty"));
    }
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return input(format!("duplicate {kind} label `{l}`"));
        }
    }
    Ok(())
}

/// Finite actions, finite states, and a welfare value for every pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionProblem {
    actions: Vec<String>,
    states: Vec<String>,
    /// `welfare[c][s]`
    welfare: Vec<Vec<f64>>,
}

impl DecisionProblem {
    pub fn new(actions: Vec<String>, states: Vec<String>, welfare: Vec<Vec<f64>>) -> Result<Self> {
        check_labels("action", &actions)?;
        check_labels("state", &states)?;
        if welfare.len() != actions.len() {
            return input(format!(
                "welfare table has {} rows for {} actions",
                welfare.len(),
                actions.len()
            ));
        }
        for (a, row) in actions.iter().zip(&welfare) {
            if row.len() != states.len() {
                return input(format!(
                    "action `{a}` has {} welfare values for {} states",
                    row.len(),
                    states.len()
                ));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return input(format!("action `{a}` has non-finite welfare {v}"));
            }
        }
        Ok(DecisionProblem {
            actions,
            states,
            welfare,
        })
    }

    /// Convenience constructor with `&str` labels.
    pub fn from_rows(actions: &[&str], states: &[&str], welfare: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            actions.iter().map(|s| s.to_string()).collect(),
            states.iter().map(|s| s.to_string()).collect(),
            welfare,
        )
    }

    /// Reads a table whose header holds the state labels after one leading
    /// cell, and whose rows start with an action label.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let states: Vec<String> = rdr.headers()?.iter().skip(1).map(String::from).collect();
        let mut actions = Vec::new();
        let mut welfare = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let mut cells = record.iter();
            let label = cells.next().ok_or_else(|| Error::Input("empty row".into()))?;
            let row = cells
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|_| Error::Input(format!("action `{label}`: `{c}` is not a number")))
                })
                .collect::<Result<Vec<_>>>()?;
            actions.push(label.to_string());
            welfare.push(row);
        }
        Self::new(actions, states, welfare)
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn welfare(&self, action: &str, state: &str) -> Result<f64> {
        Ok(self.welfare[self.action_index(action)?][self.state_index(state)?])
    }

    fn action_index(&self, action: &str) -> Result<usize> {
        self.actions
            .iter()
            .position(|a| a == action)
            .ok_or_else(|| Error::Input(format!("unknown action `{action}`")))
    }

    fn state_index(&self, state: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == state)
            .ok_or_else(|| Error::Input(format!("unknown state `{state}`")))
    }

    fn state_indices(&self, subset: Option<&[&str]>) -> Result<Vec<usize>> {
        match subset {
            None => Ok((0..self.states.len()).collect()),
            Some([]) => input("state subset is empty"),
            Some(labels) => labels.iter().map(|s| self.state_index(s)).collect(),
        }
    }

    fn best_welfare(&self, s: usize) -> f64 {
        self.welfare.iter().map(|row| row[s]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Applies `w -> alpha * w + beta` to every cell.
    pub fn affine(&self, alpha: f64, beta: f64) -> Result<Self> {
        let welfare = self
            .welfare
            .iter()
            .map(|row| row.iter().map(|w| alpha * w + beta).collect())
            .collect();
        Self::new(self.actions.clone(), self.states.clone(), welfare)
    }
}

/// Subjective probabilities over states, in state order.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    weights: Vec<f64>,
}

impl Prior {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return input("prior has no weights");
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return input("prior weights must be finite and nonnegative");
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return input(format!("prior weights sum to {total}, not 1"));
        }
        Ok(Prior { weights })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return input("prior has no weights");
        }
        Ok(Prior {
            weights: vec![1.0 / k as f64; k],
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// The selected candidate, its criterion value, and every candidate tied
/// with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    pub label: String,
    pub value: f64,
    pub ties: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Max,
    Min,
}

fn select(labels: &[String], scores: &[f64], direction: Direction) -> Choice {
    let rounded: Vec<f64> = scores.iter().map(|&s| round12(s)).collect();
    let mut best = 0;
    for i in 1..rounded.len() {
        let better = match direction {
            Direction::Max => rounded[i] > rounded[best],
            Direction::Min => rounded[i] < rounded[best],
        };
        if better {
            best = i;
        }
    }
    Choice {
        label: labels[best].clone(),
        value: scores[best],
        ties: labels
            .iter()
            .zip(&rounded)
            .filter(|(_, &r)| r == rounded[best])
            .map(|(l, _)| l.clone())
            .collect(),
    }
}

/// Best welfare in `state` minus the welfare of `action`.
pub fn regret_of_action(problem: &DecisionProblem, action: &str, state: &str) -> Result<f64> {
    let c = problem.action_index(action)?;
    let s = problem.state_index(state)?;
    Ok(problem.best_welfare(s) - problem.welfare[c][s])
}

fn dominated_by_any(target: usize, vectors: &[&[f64]]) -> bool {
    let t = vectors[target];
    vectors.iter().enumerate().any(|(i, v)| {
        i != target
            && v.iter().zip(t).all(|(x, y)| round12(*x) >= round12(*y))
            && v.iter().zip(t).any(|(x, y)| round12(*x) > round12(*y))
    })
}

/// True iff another action is at least as good in every state and better in
/// at least one.
pub fn weakly_dominated(problem: &DecisionProblem, target: &str) -> Result<bool> {
    if problem.actions.len() < 2 {
        return input("dominance needs at least two actions");
    }
    let c = problem.action_index(target)?;
    let rows: Vec<&[f64]> = problem.welfare.iter().map(Vec::as_slice).collect();
    Ok(dominated_by_any(c, &rows))
}

/// Subjective expected welfare maximization.
pub fn choose_bayes(problem: &DecisionProblem, prior: &Prior, subset: Option<&[&str]>) -> Result<Choice> {
    let states = problem.state_indices(subset)?;
    if prior.weights.len() != states.len() {
        return input(format!(
            "prior has {} weights for {} states",
            prior.weights.len(),
            states.len()
        ));
    }
    let scores: Vec<f64> = problem
        .welfare
        .iter()
        .map(|row| states.iter().zip(&prior.weights).map(|(&s, w)| w * row[s]).sum())
        .collect();
    Ok(select(&problem.actions, &scores, Direction::Max))
}

/// Maximizes the minimum welfare over states.
pub fn choose_maximin(problem: &DecisionProblem, subset: Option<&[&str]>) -> Result<Choice> {
    let states = problem.state_indices(subset)?;
    let scores: Vec<f64> = problem
        .welfare
        .iter()
        .map(|row| states.iter().map(|&s| row[s]).fold(f64::INFINITY, f64::min))
        .collect();
    Ok(select(&problem.actions, &scores, Direction::Max))
}

/// Minimizes maximum regret over states; `value` is the attained maximum
/// regret.
pub fn choose_mmr(problem: &DecisionProblem, subset: Option<&[&str]>) -> Result<Choice> {
    let states = problem.state_indices(subset)?;
    let best: Vec<f64> = states.iter().map(|&s| problem.best_welfare(s)).collect();
    let scores: Vec<f64> = problem
        .welfare
        .iter()
        .map(|row| {
            states
                .iter()
                .zip(&best)
                .map(|(&s, b)| b - row[s])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(select(&problem.actions, &scores, Direction::Min))
}

/// Per-state risk of one decision rule.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskProfile {
    pub rule_id: String,
    pub per_state: Vec<RiskEstimate>,
}

impl RiskProfile {
    pub fn new(rule_id: impl Into<String>, per_state: Vec<RiskEstimate>) -> Result<Self> {
        if per_state
            .iter()
            .any(|e| !(e.regret >= 0.0) || !(e.mc_stderr >= 0.0) || !e.expected_welfare.is_finite())
        {
            return input("risk profile needs finite welfare and nonnegative regret and stderr");
        }
        Ok(RiskProfile {
            rule_id: rule_id.into(),
            per_state,
        })
    }

    pub fn from_grid(rule_id: impl Into<String>, result: &GridResult) -> Result<Self> {
        Self::new(rule_id, result.rows.iter().map(|r| r.estimate).collect())
    }

    fn welfare(&self) -> Vec<f64> {
        self.per_state.iter().map(|e| e.expected_welfare).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Bayes,
    Maximin,
    Mmr,
}

impl Criterion {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bayes" => Ok(Criterion::Bayes),
            "maximin" => Ok(Criterion::Maximin),
            "mmr" | "minimax-regret" => Ok(Criterion::Mmr),
            other => input(format!("unknown criterion `{other}`")),
        }
    }
}

/// True iff another profile has at least the expected welfare of `target`
/// in every state and more in at least one.
pub fn profile_weakly_dominated(profiles: &[RiskProfile], target: &str) -> Result<bool> {
    if profiles.len() < 2 {
        return input("dominance needs at least two rules");
    }
    let t = profiles
        .iter()
        .position(|p| p.rule_id == target)
        .ok_or_else(|| Error::Input(format!("unknown rule `{target}`")))?;
    let welfare: Vec<Vec<f64>> = profiles.iter().map(RiskProfile::welfare).collect();
    let rows: Vec<&[f64]> = welfare.iter().map(Vec::as_slice).collect();
    Ok(dominated_by_any(t, &rows))
}

/// Ranks rules by a criterion applied to expected welfare.
///
/// Under `Mmr` the regret in state `s` is `optimum[s]` minus expected welfare.
pub fn rank_rules(
    profiles: &[RiskProfile],
    criterion: Criterion,
    prior: Option<&Prior>,
    optimum: &[f64],
) -> Result<Choice> {
    let first = profiles.first().ok_or_else(|| Error::Input("no rules to rank".into()))?;
    let k = first.per_state.len();
    if k == 0 {
        return input("risk profiles cover no states");
    }
    if let Some(p) = profiles.iter().find(|p| p.per_state.len() != k) {
        return input(format!("profile `{}` covers a different number of states", p.rule_id));
    }
    let ids: Vec<String> = profiles.iter().map(|p| p.rule_id.clone()).collect();
    check_labels("rule", &ids)?;
    let welfare: Vec<Vec<f64>> = profiles.iter().map(RiskProfile::welfare).collect();
    let choice = match criterion {
        Criterion::Bayes => {
            let prior = prior.ok_or_else(|| Error::Input("the Bayes criterion needs a prior".into()))?;
            if prior.weights.len() != k {
                return input(format!("prior has {} weights for {k} states", prior.weights.len()));
            }
            let scores: Vec<f64> = welfare
                .iter()
                .map(|w| w.iter().zip(&prior.weights).map(|(x, p)| x * p).sum())
                .collect();
            select(&ids, &scores, Direction::Max)
        }
        Criterion::Maximin => {
            let scores: Vec<f64> = welfare.iter().map(|w| w.iter().copied().fold(f64::INFINITY, f64::min)).collect();
            select(&ids, &scores, Direction::Max)
        }
        Criterion::Mmr => {
            if optimum.len() != k {
                return input(format!("{} optimum values for {k} states", optimum.len()));
            }
            let scores: Vec<f64> = welfare
                .iter()
                .map(|w| w.iter().zip(optimum).map(|(x, o)| o - x).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            select(&ids, &scores, Direction::Min)
        }
    };
    Ok(choice)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> DecisionProblem {
        DecisionProblem::from_rows(&["a", "b"], &["s1", "s2"], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn three() -> DecisionProblem {
        DecisionProblem::from_rows(
            &["a", "b", "c"],
            &["s1", "s2"],
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.6, 0.6]],
        )
        .unwrap()
    }

    fn profile(id: &str, welfare: &[f64]) -> RiskProfile {
        let per_state = welfare
            .iter()
            .map(|&w| RiskEstimate {
                expected_welfare: w,
                regret: 1.0 - w,
                mc_stderr: 0.0,
                replicates_used: 1,
            })
            .collect();
        RiskProfile::new(id, per_state).unwrap()
    }

    #[test]
    fn regret_examples() {
        assert_eq!(regret_of_action(&two(), "a", "s1").unwrap(), 0.0);
        assert_eq!(regret_of_action(&two(), "a", "s2").unwrap(), 1.0);
        assert!((regret_of_action(&three(), "c", "s1").unwrap() - 0.4).abs() < 1e-15);
        assert!(regret_of_action(&two(), "z", "s1").is_err());
        assert!(regret_of_action(&two(), "a", "s9").is_err());
    }

    #[test]
    fn dominance_examples() {
        let p = DecisionProblem::from_rows(&["a", "b"], &["s1", "s2"], vec![vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(weakly_dominated(&p, "b").unwrap());
        assert!(!weakly_dominated(&p, "a").unwrap());
        assert!(!weakly_dominated(&two(), "a").unwrap());
        assert!(!weakly_dominated(&three(), "c").unwrap());
    }

    #[test]
    fn bayes_examples() {
        let c = choose_bayes(&three(), &Prior::new(vec![0.9, 0.1]).unwrap(), None).unwrap();
        assert_eq!(c.label, "a");
        assert!((c.value - 0.9).abs() < 1e-15);
        let c = choose_bayes(&two(), &Prior::uniform(2).unwrap(), None).unwrap();
        assert_eq!(c.label, "a");
        assert_eq!(c.ties, vec!["a", "b"]);
        let c = choose_bayes(&three(), &Prior::uniform(1).unwrap(), Some(&["s2"])).unwrap();
        assert_eq!(c.label, "b");
        assert!(choose_bayes(&three(), &Prior::uniform(1).unwrap(), None).is_err());
    }

    #[test]
    fn maximin_examples() {
        assert_eq!(choose_maximin(&three(), None).unwrap().label, "c");
        let single = DecisionProblem::from_rows(&["only"], &["s"], vec![vec![0.3]]).unwrap();
        assert_eq!(choose_maximin(&single, None).unwrap().label, "only");
        let c = choose_maximin(&two(), None).unwrap();
        assert_eq!((c.label.as_str(), c.value), ("a", 0.0));
        assert!(choose_maximin(&two(), Some(&[])).is_err());
    }

    #[test]
    fn mmr_examples() {
        let c = choose_mmr(&three(), None).unwrap();
        assert_eq!(c.label, "c");
        assert!((c.value - 0.4).abs() < 1e-12);
        let c = choose_mmr(&two(), None).unwrap();
        assert_eq!((c.label.as_str(), c.value), ("a", 1.0));
        let c = choose_mmr(&three(), Some(&["s2"])).unwrap();
        assert_eq!((c.label.as_str(), c.value), ("b", 0.0));
    }

    #[test]
    fn rounding_makes_near_ties_exact() {
        let p = DecisionProblem::from_rows(&["a", "b"], &["s"], vec![vec![0.3], vec![0.1 + 0.2]]).unwrap();
        let c = choose_maximin(&p, None).unwrap();
        assert_eq!(c.ties.len(), 2);
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(0.0), 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let text = "action,s1,s2\na,1,0\nb,0,1\nc,0.6,0.6\n";
        assert_eq!(DecisionProblem::from_csv(text.as_bytes()).unwrap(), three());
        assert!(DecisionProblem::from_csv("x,s1\na,oops\n".as_bytes()).is_err());
        assert!(DecisionProblem::from_csv("x,s1,s2\na,1\n".as_bytes()).is_err());
        assert!(DecisionProblem::from_csv("x,s1\na,1\na,2\n".as_bytes()).is_err());
    }

    #[test]
    fn ranking_examples() {
        let a = profile("A", &[0.8, 0.2]);
        let b = profile("B", &[0.5, 0.5]);
        let c = rank_rules(&[a.clone(), b.clone()], Criterion::Mmr, None, &[1.0, 1.0]).unwrap();
        assert_eq!(c.label, "B");
        assert!((c.value - 0.5).abs() < 1e-15);

        let hi = profile("hi", &[0.9, 0.6]);
        let lo = profile("lo", &[0.5, 0.4]);
        let prior = Prior::uniform(2).unwrap();
        for crit in [Criterion::Bayes, Criterion::Maximin, Criterion::Mmr] {
            let c = rank_rules(&[lo.clone(), hi.clone()], crit, Some(&prior), &[1.0, 1.0]).unwrap();
            assert_eq!(c.label, "hi");
        }
        assert!(profile_weakly_dominated(&[lo, hi], "lo").unwrap());
        assert!(rank_rules(&[a, b], Criterion::Bayes, None, &[1.0, 1.0]).is_err());
    }
}
