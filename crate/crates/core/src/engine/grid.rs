//! Discretized state spaces.

use std::fmt;

use crate::error::{input, Result};

/// Slack used when testing difference-band constraints, so that grid values
/// such as `0.7 - 0.2` are not rejected by representation error.
const BAND_SLACK: f64 = 1e-12;

/// How a uniform axis places its points on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    /// `k` points `i / (k - 1)`, both endpoints included.
    Endpoints,
    /// `k` points `j / (k + 1)`, `j = 1..=k`; endpoints excluded.
    Interior,
}

impl Spacing {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "endpoints" | "closed" => Ok(Spacing::Endpoints),
            "interior" | "open" => Ok(Spacing::Interior),
            other => input(format!("unknown grid spacing `{other}`")),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Spacing::Endpoints => "endpoints",
            Spacing::Interior => "interior",
        }
    }

    /// The `k` grid values on [0, 1] for this spacing.
    pub fn values(self, k: usize) -> Result<Vec<f64>> {
        match self {
            Spacing::Endpoints => {
                if k < 2 {
                    return input(format!("an endpoint grid needs at least 2 points, got {k}"));
                }
                let d = (k - 1) as f64;
                Ok((0..k).map(|i| i as f64 / d).collect())
            }
            Spacing::Interior => {
                if k < 1 {
                    return input("an interior grid needs at least 1 point");
                }
                let d = (k + 1) as f64;
                Ok((1..=k).map(|j| j as f64 / d).collect())
            }
        }
    }
}

/// One named parameter and its ordered grid values.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return input(format!("axis `{name}` has no values"));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return input(format!("axis `{name}` value {v} lies outside [0, 1]"));
        }
        Ok(Axis { name, values })
    }

    pub fn uniform(name: impl Into<String>, k: usize, spacing: Spacing) -> Result<Self> {
        Axis::new(name, spacing.values(k)?)
    }

    pub fn fixed(name: impl Into<String>, value: f64) -> Result<Self> {
        Axis::new(name, vec![value])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Cross-parameter restriction on admissible states.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Unrestricted,
    /// `|x[i] - x[j]| <= half_width` for every listed pair of axis positions.
    Band {
        pairs: Vec<(usize, usize)>,
        half_width: f64,
    },
}

impl Constraint {
    pub fn admits(&self, state: &[f64]) -> bool {
        match self {
            Constraint::Unrestricted => true,
            Constraint::Band { pairs, half_width } => pairs
                .iter()
                .all(|&(i, j)| (state[i] - state[j]).abs() <= half_width + BAND_SLACK),
        }
    }
}

/// A product grid over named parameters, filtered by a constraint.
///
/// States are enumerated row-major: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct StateGrid {
    axes: Vec<Axis>,
    constraint: Constraint,
}

impl StateGrid {
    pub fn new(axes: Vec<Axis>, constraint: Constraint) -> Result<Self> {
        if axes.is_empty() {
            return input("a state grid needs at least one axis");
        }
        if let Constraint::Band { pairs, half_width } = &constraint {
            if !(*half_width >= 0.0) {
                return input("band half-width must be non-negative");
            }
            if pairs.iter().any(|&(i, j)| i >= axes.len() || j >= axes.len()) {
                return input("band constraint refers to a missing axis");
            }
        }
        Ok(StateGrid { axes, constraint })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    pub fn names(&self) -> Vec<&str> {
        self.axes.iter().map(|a| a.name.as_str()).collect()
    }

    /// Number of points in the unconstrained product grid.
    pub fn base_len(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    pub fn admits(&self, state: &[f64]) -> bool {
        self.constraint.admits(state)
    }

    /// Parameter values at a vector of per-axis positions.
    pub fn values_at(&self, position: &[usize]) -> Vec<f64> {
        position
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.values[i])
            .collect()
    }

    /// Row-major linear index of a position in the base grid.
    pub fn linear_index(&self, position: &[usize]) -> u64 {
        position
            .iter()
            .zip(&self.axes)
            .fold(0u64, |acc, (&i, a)| acc * a.len() as u64 + i as u64)
    }

    /// Admitted positions in enumeration order.
    pub fn positions(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut pos = vec![0usize; self.axes.len()];
        loop {
            if self.admits(&self.values_at(&pos)) {
                out.push(pos.clone());
            }
            // odometer increment, last axis fastest
            let mut k = self.axes.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                pos[k] += 1;
                if pos[k] < self.axes[k].len() {
                    break;
                }
                pos[k] = 0;
            }
        }
    }

    /// Admitted states in enumeration order.
    pub fn states(&self) -> Vec<Vec<f64>> {
        self.positions()
            .iter()
            .map(|p| self.values_at(p))
            .collect()
    }

    /// Same axes, different constraint.
    pub fn with_constraint(&self, constraint: Constraint) -> Result<Self> {
        StateGrid::new(self.axes.clone(), constraint)
    }
}

impl fmt::Display for StateGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self
            .axes
            .iter()
            .map(|a| format!("{}[{}]", a.name, a.len()))
            .collect();
        write!(f, "{}", dims.join(" x "))?;
        if let Constraint::Band { half_width, .. } = self.constraint {
            write!(f, " with band {half_width}")?;
        }
        Ok(())
    }
}
