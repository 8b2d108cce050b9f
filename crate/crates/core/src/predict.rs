//! Prediction of a bounded binary outcome under square loss when some
//! outcomes are missing.
//!
//! Regret of a predictor is its mean square error as an estimate of the
//! population mean `E(y) = q1 * P(δ=1) + q0 * P(δ=0)`, where `q1` and `q0`
//! are the success probabilities among units whose outcome is observable and
//! unobservable. Samples reveal `δ` for every unit but `y` only when `δ = 1`.

use crate::engine::{
    max_regret_over_grid, Axis, Constraint, DecisionRule, Model, RegretTable, ReplicationPlan,
    StateGrid, Stream, TableCell, TableSettings,
};
use crate::error::{input, Result};
use crate::types::Panel;

/// Axis positions of the prediction state parameters.
pub const Q1: usize = 0;
pub const Q0: usize = 1;
pub const P_OBS: usize = 2;
pub const PARAMETER_NAMES: [&str; 3] = ["q1", "q0", "p_obs"];

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        input(format!("{name} = {v} lies outside [0, 1]"))
    }
}

/// Success probabilities among observable (`q1`) and unobservable (`q0`)
/// units, and the observability rate `p_obs = P(δ=1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionState {
    pub q1: f64,
    pub q0: f64,
    pub p_obs: f64,
}

impl PredictionState {
    pub fn new(q1: f64, q0: f64, p_obs: f64) -> Result<Self> {
        check_unit("q1", q1)?;
        check_unit("q0", q0)?;
        check_unit("p_obs", p_obs)?;
        Ok(PredictionState { q1, q0, p_obs })
    }

    pub fn from_params(params: &[f64]) -> Self {
        PredictionState {
            q1: params[Q1],
            q0: params[Q0],
            p_obs: params[P_OBS],
        }
    }

    pub fn to_params(self) -> Vec<f64> {
        vec![self.q1, self.q0, self.p_obs]
    }

    /// Population mean `E(y)`.
    pub fn mean(&self) -> f64 {
        self.q1 * self.p_obs + self.q0 * (1.0 - self.p_obs)
    }

    /// Whether the state satisfies the Panel B band `|q1 - q0| <= 1/2`.
    pub fn in_band(&self) -> bool {
        Constraint::Band {
            pairs: vec![(Q1, Q0)],
            half_width: 0.5,
        }
        .admits(&self.to_params())
    }
}

/// Observability indicators for all `N` units and outcomes for the observed ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionSample {
    pub delta: Vec<bool>,
    pub y_obs: Vec<bool>,
}

impl PredictionSample {
    pub fn new(delta: Vec<bool>, y_obs: Vec<bool>) -> Result<Self> {
        if delta.is_empty() {
            return input("a sample needs at least one unit");
        }
        let k = delta.iter().filter(|&&d| d).count();
        if y_obs.len() != k {
            return input(format!(
                "{k} units are observed but {} outcomes were supplied",
                y_obs.len()
            ));
        }
        Ok(PredictionSample { delta, y_obs })
    }

    pub fn k(&self) -> usize {
        self.y_obs.len()
    }

    pub fn summary(&self) -> PredictionSummary {
        PredictionSummary {
            n: self.delta.len(),
            k: self.y_obs.len(),
            successes: self.y_obs.iter().filter(|&&y| y).count(),
        }
    }
}

/// Sufficient statistics of a prediction sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredictionSummary {
    pub n: usize,
    pub k: usize,
    pub successes: usize,
}

impl PredictionSummary {
    /// Mean observed outcome, or 1/2 when nothing was observed.
    pub fn mu_resp(&self) -> f64 {
        if self.k == 0 {
            0.5
        } else {
            self.successes as f64 / self.k as f64
        }
    }

    /// Sample observability rate `K / N`.
    pub fn p_hat(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

/// Draws `N` observability indicators, then one outcome per observed unit.
/// Outcomes of unobserved units are never drawn.
pub fn simulate_prediction_sample(state: &PredictionState, n: usize, stream: &mut Stream) -> PredictionSample {
    let delta: Vec<bool> = (0..n).map(|_| stream.bernoulli(state.p_obs)).collect();
    let k = delta.iter().filter(|&&d| d).count();
    let y_obs = (0..k).map(|_| stream.bernoulli(state.q1)).collect();
    PredictionSample { delta, y_obs }
}

/// Same draws as [`simulate_prediction_sample`], keeping only the counts.
pub fn simulate_prediction_summary(state: &PredictionState, n: usize, stream: &mut Stream) -> PredictionSummary {
    let k = (0..n).filter(|_| stream.bernoulli(state.p_obs)).count();
    let successes = (0..k).filter(|_| stream.bernoulli(state.q1)).count();
    PredictionSummary { n, k, successes }
}

/// Minimax-regret predictor for a fully observed `[0, 1]` outcome:
/// `(mu * sqrt(N) + 1/2) / (sqrt(N) + 1)`.
pub fn predict_hodges_lehmann(mu: f64, n: usize) -> Result<f64> {
    check_unit("sample mean", mu)?;
    if n == 0 {
        return input("sample size must be at least 1");
    }
    let root = (n as f64).sqrt();
    Ok((mu * root + 0.5) / (root + 1.0))
}

/// Bounds on `E(y)` given `E(y|δ=1)` and `P(δ=1)`, with no information on
/// the missing outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentificationInterval {
    pub lo: f64,
    pub hi: f64,
}

impl IdentificationInterval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

pub fn identification_interval(mean_resp: f64, p_obs: f64) -> IdentificationInterval {
    let lo = mean_resp * p_obs;
    IdentificationInterval {
        lo,
        hi: lo + (1.0 - p_obs),
    }
}

/// Midpoint of the estimated identification interval with a known
/// observability rate.
pub fn predict_midpoint_known_p(mu_resp: f64, p_obs: f64) -> f64 {
    mu_resp * p_obs + 0.5 * (1.0 - p_obs)
}

/// Maximum MSE of the known-rate midpoint predictor with `k` observed
/// outcomes: `(p_obs^2 / k + (1 - p_obs)^2) / 4`. The first term is the
/// largest variance (at `q1 = 1/2`), the second the largest squared bias
/// (at `q0` equal to 0 or 1).
pub fn midpoint_max_regret_known_p(p_obs: f64, k: usize) -> Result<f64> {
    check_unit("p_obs", p_obs)?;
    if k == 0 {
        return input("the number of observed outcomes must be at least 1");
    }
    let missing = 1.0 - p_obs;
    Ok(0.25 * (p_obs * p_obs / k as f64 + missing * missing))
}

/// Midpoint predictor with the observability rate estimated by `K / N`.
pub fn predict_midpoint(summary: &PredictionSummary) -> f64 {
    let p_hat = summary.p_hat();
    summary.mu_resp() * p_hat + 0.5 * (1.0 - p_hat)
}

/// Mean of the observed outcomes, as if data were missing at random.
pub fn predict_sample_average(summary: &PredictionSummary) -> f64 {
    summary.mu_resp()
}

/// Built-in predictors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Predictor {
    Midpoint,
    SampleAverage,
    /// Midpoint predictor using a known observability rate.
    MidpointKnownP { p_obs: f64 },
    /// Hodges-Lehmann predictor applied to the observed outcomes.
    HodgesLehmann,
}

impl Predictor {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "midpoint" => Ok(Predictor::Midpoint),
            "sample-average" | "sample_average" | "average" => Ok(Predictor::SampleAverage),
            "hodges-lehmann" | "hodges_lehmann" | "hl" => Ok(Predictor::HodgesLehmann),
            other => input(format!("unknown predictor `{other}`")),
        }
    }

    pub fn predict(&self, summary: &PredictionSummary) -> f64 {
        match *self {
            Predictor::Midpoint => predict_midpoint(summary),
            Predictor::SampleAverage => predict_sample_average(summary),
            Predictor::MidpointKnownP { p_obs } => predict_midpoint_known_p(summary.mu_resp(), p_obs),
            Predictor::HodgesLehmann => {
                if summary.k == 0 {
                    0.5
                } else {
                    let root = (summary.k as f64).sqrt();
                    (summary.mu_resp() * root + 0.5) / (root + 1.0)
                }
            }
        }
    }
}

impl DecisionRule<PredictionSummary> for Predictor {
    fn id(&self) -> String {
        match self {
            Predictor::Midpoint => "midpoint".into(),
            Predictor::SampleAverage => "sample-average".into(),
            Predictor::MidpointKnownP { p_obs } => format!("midpoint-known-p({p_obs})"),
            Predictor::HodgesLehmann => "hodges-lehmann".into(),
        }
    }

    fn decide(&self, sample: &PredictionSummary, _stream: &mut Stream) -> f64 {
        self.predict(sample)
    }

    fn decision_distribution(&self, sample: &PredictionSummary) -> Vec<(f64, f64)> {
        vec![(self.predict(sample), 1.0)]
    }
}

/// How many outcomes a survey observes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseDesign {
    /// `N` units are drawn and each is observed with probability `P(δ=1)`.
    #[default]
    RandomResponse,
    /// Exactly `N` outcomes are observed.
    FixedResponses,
}

/// Square-loss prediction problem with missing outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PredictionModel {
    pub design: ResponseDesign,
}

const CAT_MISSING: usize = 0;
const CAT_SUCCESS: usize = 2;

impl Model for PredictionModel {
    type Sample = PredictionSummary;

    fn simulate(&self, state: &[f64], n: usize, stream: &mut Stream) -> PredictionSummary {
        let state = PredictionState::from_params(state);
        match self.design {
            ResponseDesign::RandomResponse => simulate_prediction_summary(&state, n, stream),
            ResponseDesign::FixedResponses => {
                let successes = (0..n).filter(|_| stream.bernoulli(state.q1)).count();
                PredictionSummary { n, k: n, successes }
            }
        }
    }

    fn unit_distributions(&self, state: &[f64], n: usize) -> Vec<Vec<f64>> {
        let s = PredictionState::from_params(state);
        let observed = match self.design {
            ResponseDesign::RandomResponse => s.p_obs,
            ResponseDesign::FixedResponses => 1.0,
        };
        // categories: missing, observed failure, observed success
        let unit = vec![1.0 - observed, observed * (1.0 - s.q1), observed * s.q1];
        vec![unit; n]
    }

    fn assemble(&self, categories: &[usize]) -> PredictionSummary {
        let missing = categories.iter().filter(|&&c| c == CAT_MISSING).count();
        let successes = categories.iter().filter(|&&c| c == CAT_SUCCESS).count();
        PredictionSummary {
            n: categories.len(),
            k: categories.len() - missing,
            successes,
        }
    }

    fn welfare(&self, decision: f64, state: &[f64]) -> f64 {
        let err = decision - PredictionState::from_params(state).mean();
        -err * err
    }

    fn optimum(&self, _state: &[f64]) -> f64 {
        0.0
    }

    fn sampling_params(&self) -> &[usize] {
        match self.design {
            ResponseDesign::RandomResponse => &[Q1, P_OBS],
            ResponseDesign::FixedResponses => &[Q1],
        }
    }
}

/// Grid over `(q1, q0)` with the observability rate fixed.
pub fn prediction_grid(panel: Panel, settings: &TableSettings, p_obs: f64) -> Result<StateGrid> {
    let constraint = match panel {
        Panel::A => Constraint::Unrestricted,
        Panel::B => Constraint::Band {
            pairs: vec![(Q1, Q0)],
            half_width: 0.5,
        },
    };
    StateGrid::new(
        vec![
            Axis::uniform(PARAMETER_NAMES[Q1], settings.density, settings.spacing)?,
            Axis::uniform(PARAMETER_NAMES[Q0], settings.density, settings.spacing)?,
            Axis::fixed(PARAMETER_NAMES[P_OBS], p_obs)?,
        ],
        constraint,
    )
}

/// Maximum MSE of a predictor for each `(N, P(δ=1))` cell.
pub fn max_mse_table(
    predictor: Predictor,
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
    let model = PredictionModel::default();
    let mut cells = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let plan = ReplicationPlan::new(settings.replicates, settings.seed, n)?;
        let mut row = Vec::with_capacity(p_list.len());
        for &p in p_list {
            let grid = prediction_grid(panel, settings, p)?;
            let result = max_regret_over_grid(&model, &predictor, &grid, &plan, &settings.sweep)?;
            row.push(TableCell {
                value: result.max_regret,
                stderr: result.argmax_stderr,
                argmax: result.argmax,
            });
        }
        cells.push(row);
    }
    Ok(RegretTable {
        title: format!("Maximum MSE of {} predictor, panel {panel}", predictor.id()),
        column_label: "p_obs".into(),
        rows: n_list.to_vec(),
        columns: p_list.to_vec(),
        cells,
    })
}
