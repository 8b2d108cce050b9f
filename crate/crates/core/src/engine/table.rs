//! Tables of maximum regret indexed by sample size and one state parameter.

use super::grid::Spacing;
use super::risk::DEFAULT_REPLICATES;
use super::sweep::{fmt_num, SweepOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct TableCell {
    pub value: f64,
    pub stderr: f64,
    pub argmax: Vec<f64>,
}

/// Rows are sample sizes, columns values of a fixed parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTable {
    pub title: String,
    pub column_label: String,
    pub rows: Vec<usize>,
    pub columns: Vec<f64>,
    pub cells: Vec<Vec<TableCell>>,
}

impl RegretTable {
    pub fn cell(&self, n: usize, column: f64) -> Option<&TableCell> {
        let r = self.rows.iter().position(|&x| x == n)?;
        let c = self.columns.iter().position(|&x| (x - column).abs() < 1e-9)?;
        Some(&self.cells[r][c])
    }

    /// CSV with header `N,<col>,<col>,...`; `None` prints full precision.
    pub fn to_csv(&self, decimals: Option<usize>) -> String {
        let mut out = String::from("N");
        for c in &self.columns {
            out.push(',');
            out.push_str(&format!("{c}"));
        }
        out.push('\n');
        for (n, row) in self.rows.iter().zip(&self.cells) {
            out.push_str(&n.to_string());
            for cell in row {
                out.push(',');
                out.push_str(&fmt_num(cell.value, decimals));
            }
            out.push('\n');
        }
        out
    }

    /// Largest standard error over all cells.
    pub fn max_stderr(&self) -> f64 {
        self.cells
            .iter()
            .flatten()
            .map(|c| c.stderr)
            .fold(0.0, f64::max)
    }
}

/// Seed used when none is configured.
pub const DEFAULT_SEED: u64 = 20191203;

/// Monte Carlo and grid settings shared by every cell of a table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableSettings {
    pub replicates: u64,
    pub seed: u64,
    /// Points per outcome-probability axis.
    pub density: usize,
    pub spacing: Spacing,
    pub sweep: SweepOptions,
}

impl TableSettings {
    /// 100 interior points per success probability.
    pub fn prediction_defaults() -> Self {
        TableSettings {
            replicates: DEFAULT_REPLICATES,
            seed: DEFAULT_SEED,
            density: 100,
            spacing: Spacing::Interior,
            sweep: SweepOptions::default(),
        }
    }

    /// 25 points per success probability, endpoints included.
    pub fn treatment_defaults() -> Self {
        TableSettings {
            replicates: DEFAULT_REPLICATES,
            seed: DEFAULT_SEED,
            density: 25,
            spacing: Spacing::Endpoints,
            sweep: SweepOptions::default(),
        }
    }

    /// 101 points per success probability, endpoints included.
    pub fn trial_defaults() -> Self {
        TableSettings {
            replicates: DEFAULT_REPLICATES,
            seed: DEFAULT_SEED,
            density: 101,
            spacing: Spacing::Endpoints,
            sweep: SweepOptions::default(),
        }
    }
}
