//! Reliability-tiered path selection.
//!
//! Levels are tried from the strictest target down. At the first level with
//! at least one scenario meeting its target, the cheapest such scenario (by
//! total transmit power) wins; ties go to the lowest scenario id. If no level
//! is met, the reserved fallback scenario is used.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{lit, Real};
use crate::outage::ScenarioAssessment;

/// The scenario ids every decision must cover.
pub const SCENARIO_IDS: [u8; 4] = [1, 2, 3, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LevelName {
    High,
    Moderate,
    Low,
    FallbackReserved,
}

impl LevelName {
    pub fn as_str(self) -> &'static str {
        match self {
            LevelName::High => "High",
            LevelName::Moderate => "Moderate",
            LevelName::Low => "Low",
            LevelName::FallbackReserved => "FallbackReserved",
        }
    }
}

impl fmt::Display for LevelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LevelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "High" => Ok(LevelName::High),
            "Moderate" => Ok(LevelName::Moderate),
            "Low" => Ok(LevelName::Low),
            "FallbackReserved" => Ok(LevelName::FallbackReserved),
            other => Err(Error::config("level", format!("unknown reliability level `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityLevel<T> {
    pub name: LevelName,
    /// Outage target; `None` only for the fallback pseudo-level.
    pub max_outage: Option<T>,
}

impl<T: Real> ReliabilityLevel<T> {
    pub fn new(name: LevelName, max_outage: T) -> Self {
        Self {
            name,
            max_outage: Some(max_outage),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwinPolicy<T> {
    pub levels: Vec<ReliabilityLevel<T>>,
    pub fallback_scenario: u8,
}

impl<T: Real> Default for TwinPolicy<T> {
    fn default() -> Self {
        Self {
            levels: vec![
                ReliabilityLevel::new(LevelName::High, lit(1e-5)),
                ReliabilityLevel::new(LevelName::Moderate, lit(1e-3)),
                ReliabilityLevel::new(LevelName::Low, lit(1e-1)),
            ],
            fallback_scenario: 3,
        }
    }
}

impl<T: Real> TwinPolicy<T> {
    pub fn validate(&self) -> Result<()> {
        if !SCENARIO_IDS.contains(&self.fallback_scenario) {
            return Err(Error::config(
                "twin.fallback_scenario",
                format!("{} is not a scenario id (1-4)", self.fallback_scenario),
            ));
        }
        if self.levels.is_empty() {
            return Err(Error::config("twin.levels", "at least one level is required"));
        }
        let mut prev: Option<T> = None;
        for l in &self.levels {
            let target = match (l.name, l.max_outage) {
                (LevelName::FallbackReserved, _) => {
                    return Err(Error::config("twin.levels", "FallbackReserved is implicit and takes no target"))
                }
                (_, None) => return Err(Error::config("twin.levels", format!("{} needs a target", l.name))),
                (_, Some(t)) => t,
            };
            if !(target >= T::zero() && target <= T::one()) {
                return Err(Error::config("twin.levels", format!("{} target {target} outside [0, 1]", l.name)));
            }
            if let Some(p) = prev {
                if !(target > p) {
                    return Err(Error::config("twin.levels", "targets must be strictly increasing (strictest first)"));
                }
            }
            prev = Some(target);
        }
        Ok(())
    }
}

/// The parts of a scenario assessment the twin looks at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSummary<T> {
    pub scenario_id: u8,
    pub outage: T,
    pub total_power_w: T,
}

impl<T: Real> From<&ScenarioAssessment<T>> for ScenarioSummary<T> {
    fn from(a: &ScenarioAssessment<T>) -> Self {
        Self {
            scenario_id: a.scenario_id,
            outage: a.outage_probability,
            total_power_w: a.total_transmit_power_w,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwinDecision<T> {
    pub chosen_scenario: u8,
    pub achieved_level: LevelName,
    pub chosen_outage: T,
    pub chosen_total_power_w: T,
    /// Eligible scenario ids per policy level, in policy order. Levels below
    /// the achieved one are still evaluated for the audit trail.
    pub eligible_sets: Vec<(LevelName, Vec<u8>)>,
}

/// Scenario ids whose outage is at or below `target`, ascending.
pub fn eligible_set<T: Real>(summaries: &[ScenarioSummary<T>], target: T) -> Vec<u8> {
    let mut ids: Vec<u8> = summaries
        .iter()
        .filter(|s| s.outage <= target)
        .map(|s| s.scenario_id)
        .collect();
    ids.sort_unstable();
    ids
}

fn check_complete<T: Real>(summaries: &[ScenarioSummary<T>]) -> Result<()> {
    for id in SCENARIO_IDS {
        match summaries.iter().filter(|s| s.scenario_id == id).count() {
            1 => {}
            0 => return Err(Error::config("assessments", format!("missing assessment for scenario {id}"))),
            _ => return Err(Error::config("assessments", format!("duplicate assessment for scenario {id}"))),
        }
    }
    if summaries.len() != SCENARIO_IDS.len() {
        return Err(Error::config("assessments", "unexpected scenario id"));
    }
    Ok(())
}

/// Runs the tiered selection on full assessments.
pub fn decide<T: Real>(assessments: &[ScenarioAssessment<T>], policy: &TwinPolicy<T>) -> Result<TwinDecision<T>> {
    let summaries: Vec<ScenarioSummary<T>> = assessments.iter().map(ScenarioSummary::from).collect();
    decide_summaries(&summaries, policy)
}

pub fn decide_summaries<T: Real>(summaries: &[ScenarioSummary<T>], policy: &TwinPolicy<T>) -> Result<TwinDecision<T>> {
    policy.validate()?;
    check_complete(summaries)?;
    if summaries.iter().any(|s| !(s.outage >= T::zero() && s.outage <= T::one())) {
        return Err(Error::domain("decide", "scenario outage outside [0, 1]"));
    }
    let by_id = |id: u8| summaries.iter().find(|s| s.scenario_id == id).copied();

    let eligible_sets: Vec<(LevelName, Vec<u8>)> = policy
        .levels
        .iter()
        .map(|l| (l.name, eligible_set(summaries, l.max_outage.unwrap_or_else(T::zero))))
        .collect();

    for (name, ids) in &eligible_sets {
        let mut best: Option<ScenarioSummary<T>> = None;
        // ids ascend, so strict `<` keeps the lowest id on ties
        for s in ids.iter().filter_map(|&id| by_id(id)) {
            if best.is_none_or(|b| s.total_power_w < b.total_power_w) {
                best = Some(s);
            }
        }
        if let Some(b) = best {
            return Ok(TwinDecision {
                chosen_scenario: b.scenario_id,
                achieved_level: *name,
                chosen_outage: b.outage,
                chosen_total_power_w: b.total_power_w,
                eligible_sets,
            });
        }
    }
    let fb = by_id(policy.fallback_scenario).expect("completeness checked");
    Ok(TwinDecision {
        chosen_scenario: fb.scenario_id,
        achieved_level: LevelName::FallbackReserved,
        chosen_outage: fb.outage,
        chosen_total_power_w: fb.total_power_w,
        eligible_sets,
    })
}
