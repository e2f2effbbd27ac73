//! Run profiles shared by the randomized stages.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// `Strict` applies the exact tolerances of the asymptotic argument and refuses
/// to run when its preconditions fail. `Practical` scales every tolerance by a
/// multiplier, records precondition misses instead of failing, and relies on
/// the final verifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Strict,
    #[default]
    Practical,
}

impl Mode {
    pub fn is_strict(self) -> bool {
        self == Mode::Strict
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Practical => "practical",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Mode::Strict),
            "practical" => Ok(Mode::Practical),
            other => Err(format!("unknown mode {other:?} (expected strict|practical)")),
        }
    }
}

/// Default cap on event resamples per bisection call.
pub const DEFAULT_RESAMPLE_CAP: u64 = 1_000_000;

/// Narrowing budget used by [`Caps::practical`].
pub const DEFAULT_NARROW_BUDGET: u64 = 5_000;

/// Multipliers applied to the strict tolerances in practical mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Initial bisection slack is `slack * d^(2/3)`.
    pub slack: f64,
    /// Cut-degree window is `(1 +- 2 * concentration / d'^(1/3)) * deg / 2`.
    pub concentration: f64,
    /// Goodness threshold is `floor(goodness * d / 5)`.
    pub goodness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            slack: 1.0,
            concentration: 1.0,
            goodness: 1.0,
        }
    }
}

impl Caps {
    /// Tightening, repair and narrowing enabled, default cap.
    pub fn practical() -> Self {
        Caps {
            tighten: true,
            repair: true,
            narrow_budget: DEFAULT_NARROW_BUDGET,
            narrowing: Narrowing::Larger,
            ..Caps::default()
        }
    }
}

/// What narrowing minimizes, taken as a maximum over all vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Narrowing {
    /// Distance of each concentration count from its center.
    #[default]
    Deviation,
    /// The larger of a vertex's degree in the cut and in the rest of the
    /// split graph. In the initial bisection: the degree inside its own side.
    Larger,
}

/// Per-call resampling limits and the optional tightening pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    pub max_resamples: u64,
    /// After resampling succeeds, greedily flip pair decisions that move
    /// concentration counts toward their centers without violating any event.
    pub tighten: bool,
    /// Switch from plain resampling to focused local repair once plain
    /// resampling has spent its share of the budget.
    pub repair: bool,
    /// Repair steps per level when narrowing the degree windows after a
    /// successful run (0 disables narrowing).
    pub narrow_budget: u64,
    pub narrowing: Narrowing,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_resamples: DEFAULT_RESAMPLE_CAP,
            tighten: false,
            repair: false,
            narrow_budget: 0,
            narrowing: Narrowing::Deviation,
        }
    }
}
