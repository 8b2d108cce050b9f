use std::fmt::Write as _;
use std::fs;

use mmr_core::engine::{
    estimate_risk, exact_max_regret_over_grid, exact_risk_small, max_regret_over_grid, DecisionRule,
    GridResult, Model, ReplicationPlan, RiskEstimate, Spacing, StateGrid, SweepMode, SweepOptions,
    TableSettings,
};
use mmr_core::predict::{self, PredictionModel, Predictor, ResponseDesign};
use mmr_core::reproduce::{
    compare_with_reference, max_abs_diff, reference_cells, reference_cells_from, reproduce_cells, TableId,
    SAMPLE_SIZES,
};
use mmr_core::treat::{self, EmptyArm, TreatmentModel, TreatmentRule};
use mmr_core::trial::{self, compare_max_regret, TrialModel, TrialRule};
use mmr_core::TieBreak;

use crate::config::RunConfig;
use crate::error::CliError;

/// CSV body plus a human-readable summary.
pub struct Output {
    pub csv: String,
    pub summary: String,
}

/// Writes the CSV to `--out` (summary to stdout) or, without `--out`, the
/// CSV to stdout and the summary to stderr.
pub fn emit(config: &RunConfig, output: &Output) -> Result<(), CliError> {
    match &config.out {
        Some(path) => {
            fs::write(path, &output.csv)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            println!("{}", output.summary.trim_end());
            println!("wrote {}", path.display());
        }
        None => {
            print!("{}", output.csv);
            eprintln!("{}", output.summary.trim_end());
        }
    }
    Ok(())
}

fn settings(config: &RunConfig, mut base: TableSettings) -> TableSettings {
    base.replicates = config.replicates;
    base.seed = config.seed;
    if let Some(k) = config.grid {
        base.density = k;
    }
    if let Some(s) = config.grid_spacing {
        base.spacing = s;
    }
    base.sweep = SweepOptions {
        mode: if config.brute_force {
            SweepMode::BruteForce
        } else {
            SweepMode::Separable
        },
        streams: config.streams,
        workers: config.workers,
    };
    base
}

pub fn reproduce(
    config: &RunConfig,
    table: &str,
    check: bool,
    reference: Option<&std::path::Path>,
) -> Result<Output, CliError> {
    let id = TableId::parse(table)?;
    let settings = settings(config, id.default_settings());
    let tie = config.tie.unwrap_or(id.default_tie());
    let n_list = config.n.clone().unwrap_or_else(|| SAMPLE_SIZES.to_vec());
    let columns = config.p.clone().unwrap_or_else(|| id.columns());
    let result = reproduce_cells(id, tie, &n_list, &columns, &settings)?;

    let mut summary = String::new();
    let _ = writeln!(summary, "{}", result.title);
    let _ = writeln!(
        summary,
        "replicates {}, seed {}, grid {} {}, streams {}, {}, tie {}",
        settings.replicates,
        settings.seed,
        settings.density,
        settings.spacing.as_str(),
        settings.sweep.streams.as_str(),
        if config.brute_force { "brute force" } else { "separable" },
        tie.as_str()
    );
    let _ = writeln!(summary, "largest cell stderr {:.4}", result.max_stderr());

    let refs = match reference {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            Some(reference_cells_from(&text, id)?)
        }
        None if check => Some(reference_cells(id)?),
        None => None,
    };
    if let Some(refs) = refs {
        let diffs = compare_with_reference(&result, &refs);
        match max_abs_diff(&diffs) {
            Some(d) => {
                let _ = writeln!(
                    summary,
                    "max |cell - reference| = {:.4} at N={}, {}={} ({:.4} vs {:.4}) over {} cells",
                    d.abs_diff(),
                    d.n,
                    result.column_label,
                    d.column,
                    d.computed,
                    d.reference,
                    diffs.len()
                );
            }
            None => {
                let _ = writeln!(summary, "no reference cells overlap the computed table");
            }
        }
    }
    Ok(Output {
        csv: result.to_csv(config.decimals()),
        summary,
    })
}

pub fn sentencing() -> Output {
    let report = treat::sentencing_example();
    let csv = format!(
        "e_a1,e_b1,p,z_mmr,max_regret_a,max_regret_b,mmr_choice,es_choice,fractional_max_regret\n\
         {},{},{},{:.4},{:.4},{:.4},{},{},{:.4}\n",
        report.e_a1,
        report.e_b1,
        report.p,
        report.z_mmr,
        report.max_regret_a,
        report.max_regret_b,
        report.mmr_choice,
        report.es_choice,
        report.fractional_max_regret
    );
    Output {
        csv,
        summary: report.to_string(),
    }
}

pub fn compare_trial(config: &RunConfig) -> Result<Output, CliError> {
    let sizes = config.n.clone().unwrap_or_else(|| vec![25, 50, 100]);
    let s = settings(config, TableSettings::trial_defaults());
    let grid = trial::trial_grid(s.density, s.spacing)?;
    let mut csv = String::new();
    let mut summary = String::new();
    for (i, &n) in sizes.iter().enumerate() {
        let c = compare_max_regret(n, config.alpha, &grid, s.replicates, s.seed, &s.sweep)?;
        let body = c.to_csv(config.decimals());
        if sizes.len() == 1 {
            csv.push_str(&body);
        } else {
            // one block per sample size, tagged by a leading column
            let mut lines = body.lines();
            if i == 0 {
                let _ = writeln!(csv, "n_per_arm,{}", lines.next().unwrap_or_default());
            } else {
                lines.next();
            }
            for line in lines {
                let _ = writeln!(csv, "{n},{line}");
            }
        }
        let verdict = if c.max_regret_es < c.max_regret_np {
            "ES below NP"
        } else {
            "ES not below NP"
        };
        let _ = writeln!(summary, "{} -> {verdict}", c.summary());
    }
    Ok(Output { csv, summary })
}

/// Parses `name=value` pairs into a parameter vector ordered by `names`.
fn parse_state(spec: &str, names: &[&str]) -> Result<Vec<f64>, CliError> {
    let mut values = vec![None; names.len()];
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("state entry `{part}` is not name=value")))?;
        let i = names
            .iter()
            .position(|n| *n == key.trim())
            .ok_or_else(|| CliError::Usage(format!("unknown state parameter `{key}`; expected {}", names.join(", "))))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("`{value}` is not a number")))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(CliError::Usage(format!("{key} = {v} lies outside [0, 1]")));
        }
        values[i] = Some(v);
    }
    values
        .into_iter()
        .zip(names)
        .map(|(v, n)| v.ok_or_else(|| CliError::Usage(format!("state is missing `{n}`"))))
        .collect()
}

fn single_state_csv(names: &[&str], state: &[f64], e: &RiskEstimate, decimals: Option<usize>) -> String {
    let f = |v: f64| match decimals {
        Some(d) => format!("{v:.d$}"),
        None => format!("{v}"),
    };
    let mut out = names.join(",");
    out.push_str(",expected_welfare,regret,mc_stderr\n");
    let cells: Vec<String> = state
        .iter()
        .chain([e.expected_welfare, e.regret, e.mc_stderr].iter())
        .map(|v| f(*v))
        .collect();
    out.push_str(&cells.join(","));
    out.push('\n');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Predict,
    Treat,
    Trial,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "predict" | "prediction" => Ok(Family::Predict),
            "treat" | "treatment" => Ok(Family::Treat),
            "trial" => Ok(Family::Trial),
            other => Err(CliError::Usage(format!("unknown family `{other}` (expected predict, treat or trial)"))),
        }
    }
}

pub struct EvalRequest<'a> {
    pub family: Family,
    pub rule: &'a str,
    pub state: Option<&'a str>,
    pub exact: bool,
    pub fixed_responses: bool,
}

fn single_n(config: &RunConfig) -> Result<usize, CliError> {
    match config.n.as_deref() {
        None => Ok(25),
        Some([n]) => Ok(*n),
        Some(_) => Err(CliError::Usage("eval takes a single --n".into())),
    }
}

fn single_p(config: &RunConfig, what: &str) -> Result<f64, CliError> {
    match config.p.as_deref() {
        Some([p]) => Ok(*p),
        None => Err(CliError::Usage(format!("grid evaluation needs --p for {what}"))),
        Some(_) => Err(CliError::Usage("eval takes a single --p".into())),
    }
}

#[allow(clippy::too_many_arguments)]
fn evaluate<M, R>(
    model: &M,
    rule: &R,
    names: &[&str],
    state: Option<Vec<f64>>,
    grid: impl FnOnce() -> Result<StateGrid, CliError>,
    n: usize,
    config: &RunConfig,
    sweep: &SweepOptions,
    exact: bool,
) -> Result<Output, CliError>
where
    M: Model,
    R: DecisionRule<M::Sample>,
{
    let plan = ReplicationPlan::new(config.replicates, config.seed, n)?;
    match state {
        Some(state) => {
            let e = if exact {
                exact_risk_small(model, rule, &state, n)?
            } else {
                estimate_risk(model, rule, &state, &plan, 0)?
            };
            let summary = format!(
                "{}: expected welfare {:.4}, regret {:.4} (stderr {:.4}, {} {})",
                rule.id(),
                e.expected_welfare,
                e.regret,
                e.mc_stderr,
                e.replicates_used,
                if exact { "configurations" } else { "replicates" }
            );
            Ok(Output {
                csv: single_state_csv(names, &state, &e, config.decimals()),
                summary,
            })
        }
        None => {
            let grid = grid()?;
            let result: GridResult = if exact {
                exact_max_regret_over_grid(model, rule, &grid, n)?
            } else {
                max_regret_over_grid(model, rule, &grid, &plan, sweep)?
            };
            Ok(Output {
                csv: result.to_csv(config.decimals()),
                summary: format!("{}: {}", rule.id(), result.summary()),
            })
        }
    }
}

pub fn eval(config: &RunConfig, req: &EvalRequest) -> Result<Output, CliError> {
    let n = single_n(config)?;
    match req.family {
        Family::Predict => {
            let rule = match req.rule.to_ascii_lowercase().as_str() {
                "midpoint-known-p" => Predictor::MidpointKnownP {
                    p_obs: single_p(config, "the known observability rate")?,
                },
                other => Predictor::parse(other)?,
            };
            let model = PredictionModel {
                design: if req.fixed_responses {
                    ResponseDesign::FixedResponses
                } else {
                    ResponseDesign::RandomResponse
                },
            };
            let s = settings(config, TableSettings::prediction_defaults());
            let state = req
                .state
                .map(|spec| parse_state(spec, &predict::PARAMETER_NAMES))
                .transpose()?;
            evaluate(
                &model,
                &rule,
                &predict::PARAMETER_NAMES,
                state,
                || Ok(predict::prediction_grid(config.panel, &s, single_p(config, "p_obs")?)?),
                n,
                config,
                &s.sweep,
                req.exact,
            )
        }
        Family::Treat => {
            let tie = config.tie.unwrap_or(TieBreak::A);
            let rule = match req.rule.to_ascii_lowercase().as_str() {
                "es" => TreatmentRule::Es(tie, config.empty_arm.unwrap_or(EmptyArm::Half)),
                other => TreatmentRule::parse(other, tie)?,
            };
            let s = settings(config, TableSettings::treatment_defaults());
            let state = req
                .state
                .map(|spec| parse_state(spec, &treat::PARAMETER_NAMES))
                .transpose()?;
            evaluate(
                &TreatmentModel,
                &rule,
                &treat::PARAMETER_NAMES,
                state,
                || Ok(treat::treatment_grid(config.panel, &s, single_p(config, "p")?)?),
                n,
                config,
                &s.sweep,
                req.exact,
            )
        }
        Family::Trial => {
            let rule = match req.rule.to_ascii_lowercase().as_str() {
                "es" | "es-trial" => TrialRule::Es(config.tie.unwrap_or(TieBreak::A)),
                "np" | "np-test" => TrialRule::np(config.alpha)?,
                other => return Err(CliError::Usage(format!("`{other}` is not a trial rule (es-trial, np-test)"))),
            };
            let model = TrialModel::balanced(n);
            let s = settings(config, TableSettings::trial_defaults());
            let state = req
                .state
                .map(|spec| parse_state(spec, &trial::PARAMETER_NAMES))
                .transpose()?;
            let spacing: Spacing = s.spacing;
            evaluate(
                &model,
                &rule,
                &trial::PARAMETER_NAMES,
                state,
                || Ok(trial::trial_grid(s.density, spacing)?),
                model.total(),
                config,
                &s.sweep,
                req.exact,
            )
        }
    }
}
