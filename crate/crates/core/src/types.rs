//! Small enums shared by the prediction, treatment, and trial modules.

use std::fmt;

use crate::engine::Stream;
use crate::error::{input, Result};

/// State-space specification for the missing-data problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Panel {
    /// Every outcome distribution is feasible.
    A,
    /// Observed and unobserved success probabilities differ by at most one half.
    B,
}

impl Panel {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Panel::A),
            "b" => Ok(Panel::B),
            other => input(format!("unknown panel `{other}` (expected a or b)")),
        }
    }
}

impl fmt::Display for Panel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Panel::A => "A",
            Panel::B => "B",
        })
    }
}

/// The two treatments: `A` is the status quo, `B` the innovation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Treatment {
    A,
    B,
}

impl Treatment {
    /// Allocation to `B` implied by choosing this treatment.
    pub fn allocation(self) -> f64 {
        match self {
            Treatment::A => 0.0,
            Treatment::B => 1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Treatment::A => Treatment::B,
            Treatment::B => Treatment::A,
        }
    }
}

impl fmt::Display for Treatment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Treatment::A => "a",
            Treatment::B => "b",
        })
    }
}

/// What a singleton rule does when its criterion does not pick a treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    A,
    B,
    /// Fair coin drawn from the replicate stream.
    Randomize,
}

impl TieBreak {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(TieBreak::A),
            "b" => Ok(TieBreak::B),
            "random" | "randomize" => Ok(TieBreak::Randomize),
            other => input(format!("unknown tie policy `{other}` (expected a, b or random)")),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TieBreak::A => "a",
            TieBreak::B => "b",
            TieBreak::Randomize => "random",
        }
    }

    /// Same policy with the treatment labels swapped.
    pub fn mirrored(self) -> Self {
        match self {
            TieBreak::A => TieBreak::B,
            TieBreak::B => TieBreak::A,
            TieBreak::Randomize => TieBreak::Randomize,
        }
    }

    pub(crate) fn resolve(self, stream: &mut Stream) -> f64 {
        match self {
            TieBreak::A => 0.0,
            TieBreak::B => 1.0,
            TieBreak::Randomize => {
                if stream.uniform() < 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub(crate) fn distribution(self) -> Vec<(f64, f64)> {
        match self {
            TieBreak::A => vec![(0.0, 1.0)],
            TieBreak::B => vec![(1.0, 1.0)],
            TieBreak::Randomize => vec![(1.0, 0.5), (0.0, 0.5)],
        }
    }
}
