//! Genetic solver with a kernel-growing crossover.
//!
//! Offspring are grown from a single seed piece. At every step the phases are
//! tried in order and the first one that proposes a placement wins:
//!
//! | phase | places                                                              |
//! |-------|---------------------------------------------------------------------|
//! | 1.1   | the fitter parent's neighbor, when both pieces score >= alpha there |
//! | 1.2   | the same test against the less fit parent                           |
//! | 2     | a neighbor both parents agree on                                    |
//! | 3     | a parent's neighbor that is also a best buddy                       |
//! | 4.1   | an edge's most compatible piece, if still unplaced                  |
//! | 4.2   | an edge's second most compatible piece, if still unplaced           |
//! | 5     | a random unplaced piece at a random free cell                       |
//!
//! `alpha = max(alpha0, mean boundary score of that parent)` and a piece's
//! score within a parent is its mean score over the neighbors it has there.
//! Mutation is phase skipping: 1.1/1.2 and 2/3 are each skipped with a small
//! probability, drawn anew at every placement.

mod crossover;
mod evolve;
mod fitness;
mod kernel;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use crossover::{
    crossover, select_placement, Chromosome, CrossoverContext, Move, Ranking, Skips, StepRecord,
};
pub use evolve::{evolve, SolverReport};
pub use fitness::fitness;
pub use kernel::{FrameRule, FreeEdge, Kernel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    P1_1,
    P1_2,
    P2,
    P3,
    P4_1,
    P4_2,
    P5,
}

impl Phase {
    pub const ORDER: [Phase; 7] = [
        Phase::P1_1,
        Phase::P1_2,
        Phase::P2,
        Phase::P3,
        Phase::P4_1,
        Phase::P4_2,
        Phase::P5,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Phase::P1_1 => "1.1",
            Phase::P1_2 => "1.2",
            Phase::P2 => "2",
            Phase::P3 => "3",
            Phase::P4_1 => "4.1",
            Phase::P4_2 => "4.2",
            Phase::P5 => "5",
        }
    }

    /// Phases 4 and 5 always succeed together, so they cannot be ablated.
    pub fn is_essential(self) -> bool {
        matches!(self, Phase::P4_1 | Phase::P4_2 | Phase::P5)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Phase {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Phase::ORDER
            .into_iter()
            .find(|p| p.label() == s.trim())
            .ok_or_else(|| format!("unknown phase '{s}' (expected one of 1.1 1.2 2 3 4.1 4.2 5)"))
    }
}

impl Serialize for Phase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Placements made by each phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseCounts(pub [u64; 7]);

impl PhaseCounts {
    pub fn get(&self, p: Phase) -> u64 {
        self.0[p.index()]
    }

    pub fn bump(&mut self, p: Phase) {
        self.0[p.index()] += 1;
    }

    pub fn add(&mut self, other: &PhaseCounts) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl Serialize for PhaseCounts {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(7))?;
        for p in Phase::ORDER {
            m.serialize_entry(p.label(), &self.get(p))?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for PhaseCounts {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = std::collections::BTreeMap::<String, u64>::deserialize(d)?;
        let mut c = PhaseCounts::default();
        for (k, v) in m {
            let p: Phase = k.parse().map_err(serde::de::Error::custom)?;
            c.0[p.index()] = v;
        }
        Ok(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DimsMode {
    Known,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population: usize,
    pub elitism: usize,
    pub stall_generations: usize,
    pub alpha0: f64,
    pub skip_phase1_prob: f64,
    pub skip_phase23_prob: f64,
    pub restarts: usize,
    pub seed: u64,
    pub dims_mode: DimsMode,
    #[serde(default)]
    pub disabled_phases: BTreeSet<Phase>,
    /// Hard stop regardless of progress.
    pub max_generations: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 100,
            elitism: 1,
            stall_generations: 50,
            alpha0: 0.8,
            skip_phase1_prob: 0.10,
            skip_phase23_prob: 0.20,
            restarts: 1,
            seed: 0,
            dims_mode: DimsMode::Known,
            disabled_phases: BTreeSet::new(),
            max_generations: 10_000,
        }
    }
}

impl GaConfig {
    /// Fifty independent restarts, as used for benchmark runs.
    pub fn benchmark() -> Self {
        GaConfig {
            restarts: 50,
            ..GaConfig::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_dims(mut self, dims: DimsMode) -> Self {
        self.dims_mode = dims;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        for (name, p) in [
            ("skip_phase1_prob", self.skip_phase1_prob),
            ("skip_phase23_prob", self.skip_phase23_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(&format!("{name} must lie in [0, 1]"));
            }
        }
        if self.population < 2 {
            return bad("population must be at least 2");
        }
        if self.elitism >= self.population {
            return bad("elitism must leave room for offspring");
        }
        if !(self.alpha0 > 0.0 && self.alpha0 < 1.0) {
            return bad("alpha0 must lie in (0, 1)");
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if self.max_generations == 0 {
            return bad("max_generations must be at least 1");
        }
        if let Some(p) = self.disabled_phases.iter().find(|p| p.is_essential()) {
            return Err(Error::EssentialPhase(*p));
        }
        Ok(())
    }

    pub fn enabled(&self, p: Phase) -> bool {
        !self.disabled_phases.contains(&p)
    }
}

/// Copy of `cfg` whose crossover never runs the `disabled` phases.
pub fn ablate(cfg: &GaConfig, disabled: &BTreeSet<Phase>) -> Result<GaConfig> {
    if let Some(p) = disabled.iter().find(|p| p.is_essential()) {
        return Err(Error::EssentialPhase(*p));
    }
    let mut out = cfg.clone();
    out.disabled_phases.extend(disabled.iter().copied());
    Ok(out)
}
