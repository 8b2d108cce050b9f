//! Maximum regret over a state grid.
//!
//! States are grouped by their sampling parameters. Each group shares one
//! batch of simulated decisions, and regret is then evaluated at the group's
//! member states. In separable mode only the corner states of each group are
//! evaluated: regret is convex in the non-sampling parameters, so over a box
//! its maximum sits at a corner.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::grid::StateGrid;
use super::model::{DecisionRule, Model};
use super::risk::{exact_risk_small, simulate_decisions, summarize_decisions, ReplicationPlan, RiskEstimate};
use crate::error::{input, Error, Result};

/// Which states of each sampling group get evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepMode {
    /// Every admitted state.
    BruteForce,
    /// Only corners of the non-sampling parameters. Falls back to every
    /// member when a group's admitted set is not a product of intervals.
    #[default]
    Separable,
}

/// How replicate streams are keyed across grid states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StreamScheme {
    /// Every state reuses the same replicate streams (common random numbers).
    #[default]
    Common,
    /// Each sampling state gets its own streams, keyed by its base-grid index.
    PerSamplingState,
}

impl StreamScheme {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "common" => Ok(StreamScheme::Common),
            "per-state" | "independent" => Ok(StreamScheme::PerSamplingState),
            other => input(format!("unknown stream scheme `{other}`")),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StreamScheme::Common => "common",
            StreamScheme::PerSamplingState => "per-state",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub mode: SweepMode,
    pub streams: StreamScheme,
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            mode: SweepMode::Separable,
            streams: StreamScheme::Common,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateRow {
    pub state: Vec<f64>,
    pub estimate: RiskEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub parameter_names: Vec<String>,
    pub max_regret: f64,
    pub argmax: Vec<f64>,
    /// Standard error of the regret estimate at the argmax state.
    pub argmax_stderr: f64,
    /// Evaluated states in enumeration order.
    pub rows: Vec<StateRow>,
}

impl GridResult {
    fn from_rows(grid: &StateGrid, rows: Vec<StateRow>) -> Result<Self> {
        let best = rows
            .iter()
            .enumerate()
            .fold(None::<usize>, |best, (i, r)| match best {
                Some(b) if rows[b].estimate.regret >= r.estimate.regret => Some(b),
                _ => Some(i),
            })
            .ok_or_else(|| Error::Input("no states were evaluated".into()))?;
        Ok(GridResult {
            parameter_names: grid.names().iter().map(|s| s.to_string()).collect(),
            max_regret: rows[best].estimate.regret,
            argmax: rows[best].state.clone(),
            argmax_stderr: rows[best].estimate.mc_stderr,
            rows,
        })
    }

    /// Per-state table: parameter columns, then welfare, regret, stderr.
    pub fn to_csv(&self, decimals: Option<usize>) -> String {
        let mut out = String::new();
        let mut header = self.parameter_names.clone();
        header.extend(["expected_welfare", "regret", "mc_stderr"].map(String::from));
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut cells: Vec<String> = row.state.iter().map(|v| fmt_num(*v, decimals)).collect();
            cells.push(fmt_num(row.estimate.expected_welfare, decimals));
            cells.push(fmt_num(row.estimate.regret, decimals));
            cells.push(fmt_num(row.estimate.mc_stderr, decimals));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let state: Vec<String> = self
            .parameter_names
            .iter()
            .zip(&self.argmax)
            .map(|(n, v)| format!("{n}={v:.4}"))
            .collect();
        let _ = write!(
            s,
            "max regret {:.4} (stderr {:.4}) at {} over {} states",
            self.max_regret,
            self.argmax_stderr,
            state.join(", "),
            self.rows.len()
        );
        s
    }
}

pub(crate) fn fmt_num(v: f64, decimals: Option<usize>) -> String {
    match decimals {
        Some(d) => format!("{v:.d$}"),
        None => format!("{v}"),
    }
}

struct Group {
    stream_index: u64,
    members: Vec<(u64, Vec<usize>)>,
}

fn group_states<M: Model>(model: &M, grid: &StateGrid, scheme: StreamScheme) -> Result<Vec<Group>> {
    let sampling = model.sampling_params();
    let axes = grid.axes();
    if let Some(&bad) = sampling.iter().find(|&&i| i >= axes.len()) {
        return input(format!("sampling parameter {bad} is not an axis of the grid"));
    }
    let mut groups: BTreeMap<u64, Group> = BTreeMap::new();
    for pos in grid.positions() {
        let key = sampling
            .iter()
            .fold(0u64, |acc, &i| acc * axes[i].len() as u64 + pos[i] as u64);
        let stream_index = match scheme {
            StreamScheme::Common => 0,
            StreamScheme::PerSamplingState => key,
        };
        let linear = grid.linear_index(&pos);
        groups
            .entry(key)
            .or_insert_with(|| Group {
                stream_index,
                members: Vec::new(),
            })
            .members
            .push((linear, pos));
    }
    if groups.is_empty() {
        return input(format!("no admissible states in grid {grid}"));
    }
    Ok(groups.into_values().collect())
}

/// Keeps the members whose non-sampling coordinates all sit at the extremes
/// of the group's projection, provided the group is a full product.
fn corner_members(members: &[(u64, Vec<usize>)], free: &[usize]) -> Vec<(u64, Vec<usize>)> {
    if free.is_empty() {
        return members.to_vec();
    }
    let mut lo = vec![usize::MAX; free.len()];
    let mut hi = vec![0usize; free.len()];
    let mut distinct: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); free.len()];
    for (_, pos) in members {
        for (k, &i) in free.iter().enumerate() {
            lo[k] = lo[k].min(pos[i]);
            hi[k] = hi[k].max(pos[i]);
            distinct[k].insert(pos[i]);
        }
    }
    let product: usize = distinct.iter().map(|d| d.len()).product();
    let contiguous = distinct
        .iter()
        .zip(lo.iter().zip(&hi))
        .all(|(d, (&l, &h))| d.len() == h - l + 1);
    if product != members.len() || !contiguous {
        return members.to_vec();
    }
    members
        .iter()
        .filter(|(_, pos)| {
            free.iter()
                .enumerate()
                .all(|(k, &i)| pos[i] == lo[k] || pos[i] == hi[k])
        })
        .cloned()
        .collect()
}

fn run_in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Input(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// Monte Carlo maximum regret of `rule` over `grid`.
///
/// Output is a pure function of the inputs: worker count and scheduling do
/// not change a single bit.
pub fn max_regret_over_grid<M, R>(
    model: &M,
    rule: &R,
    grid: &StateGrid,
    plan: &ReplicationPlan,
    options: &SweepOptions,
) -> Result<GridResult>
where
    M: Model,
    R: DecisionRule<M::Sample>,
{
    let groups = group_states(model, grid, options.streams)?;
    let sampling = model.sampling_params();
    let free: Vec<usize> = (0..grid.axes().len()).filter(|i| !sampling.contains(i)).collect();

    let evaluate = |group: &Group| -> Result<Vec<(u64, StateRow)>> {
        let representative = grid.values_at(&group.members[0].1);
        let decisions = simulate_decisions(model, rule, &representative, plan, group.stream_index)?;
        let members = match options.mode {
            SweepMode::BruteForce => group.members.clone(),
            SweepMode::Separable => corner_members(&group.members, &free),
        };
        Ok(members
            .into_iter()
            .map(|(linear, pos)| {
                let state = grid.values_at(&pos);
                let estimate = summarize_decisions(model, &decisions, &state);
                (linear, StateRow { state, estimate })
            })
            .collect())
    };

    let batches: Vec<Result<Vec<(u64, StateRow)>>> =
        run_in_pool(options.workers, || groups.par_iter().map(evaluate).collect())?;
    let mut rows = Vec::new();
    for batch in batches {
        rows.extend(batch?);
    }
    rows.sort_by_key(|(linear, _)| *linear);
    GridResult::from_rows(grid, rows.into_iter().map(|(_, r)| r).collect())
}

/// Exact maximum regret over `grid` using the enumeration oracle.
pub fn exact_max_regret_over_grid<M, R>(model: &M, rule: &R, grid: &StateGrid, n: usize) -> Result<GridResult>
where
    M: Model,
    R: DecisionRule<M::Sample>,
{
    let states = grid.states();
    if states.is_empty() {
        return input(format!("no admissible states in grid {grid}"));
    }
    let rows = states
        .into_iter()
        .map(|state| {
            let estimate = exact_risk_small(model, rule, &state, n)?;
            Ok(StateRow { state, estimate })
        })
        .collect::<Result<Vec<_>>>()?;
    GridResult::from_rows(grid, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corners_of_a_full_box() {
        // two free axes with positions 0..3 each, sampling axis 0 fixed
        let members: Vec<(u64, Vec<usize>)> = (0..3)
            .flat_map(|i| (0..3).map(move |j| ((i * 3 + j) as u64, vec![0, i, j])))
            .collect();
        let corners = corner_members(&members, &[1, 2]);
        let pos: Vec<Vec<usize>> = corners.into_iter().map(|(_, p)| p).collect();
        assert_eq!(pos, vec![vec![0, 0, 0], vec![0, 0, 2], vec![0, 2, 0], vec![0, 2, 2]]);
    }

    #[test]
    fn non_product_groups_are_kept_whole() {
        let members = vec![(0, vec![0, 0, 0]), (1, vec![0, 0, 1]), (3, vec![0, 1, 0])];
        assert_eq!(corner_members(&members, &[1, 2]).len(), 3);
    }
}
