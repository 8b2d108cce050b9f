use super::stream::Stream;

/// A sampling process together with the welfare it assigns to decisions.
///
/// States are parameter vectors laid out in the same order as the axes of the
/// grid being swept. Decisions are real numbers: a point prediction, or the
/// fraction of the population allocated to the innovation.
pub trait Model: Sync {
    type Sample;

    /// Draws one sample of size `n` under `state`.
    ///
    /// Must depend only on the parameters listed by [`Model::sampling_params`].
    fn simulate(&self, state: &[f64], n: usize, stream: &mut Stream) -> Self::Sample;

    /// Per-unit categorical distributions of the sample, used by the exact
    /// enumeration oracle. Entry `i` lists the probabilities of unit `i`'s
    /// outcome categories.
    fn unit_distributions(&self, state: &[f64], n: usize) -> Vec<Vec<f64>>;

    /// Builds a sample from one category per unit.
    fn assemble(&self, categories: &[usize]) -> Self::Sample;

    /// Welfare of `decision` in `state`.
    fn welfare(&self, decision: f64, state: &[f64]) -> f64;

    /// Best attainable welfare in `state`.
    fn optimum(&self, state: &[f64]) -> f64;

    /// Positions of the parameters that the sampling distribution depends on.
    /// Every other parameter enters only through welfare.
    fn sampling_params(&self) -> &[usize];
}

/// A statistical decision function acting on samples of type `S`.
pub trait DecisionRule<S>: Sync {
    fn id(&self) -> String;

    /// Applies the rule. Randomized rules draw from `stream`, after the
    /// sample has been drawn from it.
    fn decide(&self, sample: &S, stream: &mut Stream) -> f64;

    /// Distribution of the decision given the sample, as
    /// `(decision, probability)` pairs.
    fn decision_distribution(&self, sample: &S) -> Vec<(f64, f64)>;
}

/// Takes the same decision regardless of the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantRule(pub f64);

impl<S> DecisionRule<S> for ConstantRule {
    fn id(&self) -> String {
        format!("constant({})", self.0)
    }

    fn decide(&self, _sample: &S, _stream: &mut Stream) -> f64 {
        self.0
    }

    fn decision_distribution(&self, _sample: &S) -> Vec<(f64, f64)> {
        vec![(self.0, 1.0)]
    }
}
