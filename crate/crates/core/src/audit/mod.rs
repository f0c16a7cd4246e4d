//! Strategyproofness and approximation audits.
//!
//! A deviation is an agent hiding some of their own items. The audit runs
//! the mechanism on the truthful and the reduced instance and compares the
//! value the agent gets from their packed items.

pub mod probe;
pub mod sweep;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::mechanisms::{Mechanism, MechanismError, OutcomeDistribution};
use crate::model::{AgentId, Instance, ItemId};
use crate::rational::Rational;
use crate::solver::{solve_opt_with, Limits, SolverError};

pub use probe::{lower_bound_probe, Family, ProbeError, ProbeReport};
pub use sweep::{run_sweep, MechanismSummary, SweepConfig, SweepResult, WorstViolation};

pub const DEFAULT_MAX_AGENT_ITEMS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpMode {
    /// Every non-empty subset an agent could hide.
    FullSubsets,
    /// Every single-item deletion from every instance reachable by one
    /// agent hiding items.
    SingleItemClosure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpSemantics {
    /// Each lottery branch must be strategyproof on its own.
    Universal,
    /// Only the expected value matters.
    Expectation,
}

impl SpMode {
    pub fn name(self) -> &'static str {
        match self {
            SpMode::FullSubsets => "full_subsets",
            SpMode::SingleItemClosure => "single_item_closure",
        }
    }
}

impl SpSemantics {
    pub fn name(self) -> &'static str {
        match self {
            SpSemantics::Universal => "universal",
            SpSemantics::Expectation => "expectation",
        }
    }
}

impl fmt::Display for SpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for SpSemantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unrecognised value {0:?}")]
pub struct ParseEnumError(pub String);

impl FromStr for SpMode {
    type Err = ParseEnumError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "full_subsets" | "full" => Ok(SpMode::FullSubsets),
            "single_item_closure" | "single" | "closure" => Ok(SpMode::SingleItemClosure),
            _ => Err(ParseEnumError(s.to_string())),
        }
    }
}

impl FromStr for SpSemantics {
    type Err = ParseEnumError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "universal" => Ok(SpSemantics::Universal),
            "expectation" => Ok(SpSemantics::Expectation),
            _ => Err(ParseEnumError(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditLimits {
    pub solver: Limits,
    /// Largest per-agent item count whose subsets are enumerated.
    pub max_agent_items: usize,
}

impl Default for AuditLimits {
    fn default() -> Self {
        AuditLimits {
            solver: Limits::default(),
            max_agent_items: DEFAULT_MAX_AGENT_ITEMS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AuditError {
    #[error("agent {agent} owns {items} items; deviation enumeration is limited to {limit}")]
    AgentTooLarge { agent: AgentId, items: usize, limit: usize },
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

impl AuditError {
    pub fn is_size_guard(&self) -> bool {
        matches!(
            self,
            AuditError::AgentTooLarge { .. }
                | AuditError::Solver(SolverError::TooLarge { .. })
                | AuditError::Mechanism(MechanismError::Solver(SolverError::TooLarge { .. }))
        )
    }
}

/// `agent` compares the instance without `base_hidden` (their truthful
/// report) against the instance without `hidden`. Both sets are the
/// agent's own items and `base_hidden ⊂ hidden`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Deviation {
    pub agent: AgentId,
    pub base_hidden: BTreeSet<ItemId>,
    pub hidden: BTreeSet<ItemId>,
    #[serde(skip)]
    pub resulting_instance: Instance,
}

impl Deviation {
    pub fn base_instance(&self, original: &Instance) -> Instance {
        original.without(&self.base_hidden)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpViolation {
    pub deviation: Deviation,
    /// The lottery branch, for universal audits of randomized mechanisms.
    pub branch: Option<&'static str>,
    pub truthful_value: Rational,
    pub deviant_value: Rational,
    pub gain: Rational,
}

fn check_agent_sizes(instance: &Instance, limit: usize) -> Result<(), AuditError> {
    for agent in 0..instance.agent_count() {
        let items = instance.items().iter().filter(|it| it.owner == agent).count();
        if items > limit {
            return Err(AuditError::AgentTooLarge { agent, items, limit });
        }
    }
    Ok(())
}

fn subsets(ids: &[ItemId]) -> impl Iterator<Item = BTreeSet<ItemId>> + '_ {
    (0u64..1 << ids.len()).map(move |mask| {
        ids.iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, id)| *id)
            .collect()
    })
}

/// An agent with the set hidden in the base instance and the set hidden in
/// the deviant one.
type HiddenPair = (AgentId, BTreeSet<ItemId>, BTreeSet<ItemId>);

/// Hidden-set pairs `(base, hidden)` per agent, without materialized
/// instances.
fn deviation_sets(instance: &Instance, mode: SpMode, limit: usize) -> Result<Vec<HiddenPair>, AuditError> {
    check_agent_sizes(instance, limit)?;
    let mut out = Vec::new();
    for agent in 0..instance.agent_count() {
        let own: Vec<ItemId> = instance
            .items()
            .iter()
            .filter(|it| it.owner == agent)
            .map(|it| it.id)
            .collect();
        for set in subsets(&own) {
            match mode {
                SpMode::FullSubsets => {
                    if !set.is_empty() {
                        out.push((agent, BTreeSet::new(), set));
                    }
                }
                SpMode::SingleItemClosure => {
                    for id in own.iter().filter(|id| !set.contains(id)) {
                        let mut hidden = set.clone();
                        hidden.insert(*id);
                        out.push((agent, set.clone(), hidden));
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn enumerate_deviations(
    instance: &Instance,
    mode: SpMode,
    limits: AuditLimits,
) -> Result<Vec<Deviation>, AuditError> {
    Ok(deviation_sets(instance, mode, limits.max_agent_items)?
        .into_iter()
        .map(|(agent, base_hidden, hidden)| Deviation {
            agent,
            resulting_instance: instance.without(&hidden),
            base_hidden,
            hidden,
        })
        .collect())
}

/// Memoized mechanism runs keyed by the hidden set.
struct Runs<'a> {
    mechanism: &'a Mechanism,
    instance: &'a Instance,
    limits: Limits,
    cache: HashMap<BTreeSet<ItemId>, OutcomeDistribution>,
}

impl Runs<'_> {
    fn get(&mut self, hidden: &BTreeSet<ItemId>) -> Result<&OutcomeDistribution, AuditError> {
        if !self.cache.contains_key(hidden) {
            let sub = self.instance.without(hidden);
            let dist = self.mechanism.run_with(&sub, self.limits)?;
            self.cache.insert(hidden.clone(), dist);
        }
        Ok(&self.cache[hidden])
    }
}

/// Compares agent values branch by branch (universal) or in expectation.
fn compare(
    instance: &Instance,
    agent: AgentId,
    truthful: &OutcomeDistribution,
    deviant: &OutcomeDistribution,
    semantics: SpSemantics,
) -> Vec<(Option<&'static str>, Rational, Rational)> {
    let mut found = Vec::new();
    match semantics {
        SpSemantics::Expectation => {
            let t = truthful.agent_expected_value(instance, agent);
            let d = deviant.agent_expected_value(instance, agent);
            if d > t {
                found.push((None, t, d));
            }
        }
        SpSemantics::Universal => {
            let labelled = truthful.branches.len() > 1;
            for branch in &truthful.branches {
                let Some(other) = deviant.branch(branch.label) else {
                    continue;
                };
                let t = instance.agent_value(agent, &branch.outcome.packed);
                let d = instance.agent_value(agent, &other.outcome.packed);
                if d > t {
                    found.push((labelled.then_some(branch.label), t, d));
                }
            }
        }
    }
    found
}

pub fn audit_strategyproofness(
    mechanism: &Mechanism,
    instance: &Instance,
    mode: SpMode,
    semantics: SpSemantics,
    limits: AuditLimits,
) -> Result<Vec<SpViolation>, AuditError> {
    let sets = deviation_sets(instance, mode, limits.max_agent_items)?;
    let mut runs = Runs {
        mechanism,
        instance,
        limits: limits.solver,
        cache: HashMap::new(),
    };
    let mut violations = Vec::new();
    for (agent, base, hidden) in sets {
        let truthful = runs.get(&base)?.clone();
        let deviant = runs.get(&hidden)?;
        for (branch, t, d) in compare(instance, agent, &truthful, deviant, semantics) {
            violations.push(SpViolation {
                gain: &d - &t,
                deviation: Deviation {
                    agent,
                    resulting_instance: instance.without(&hidden),
                    base_hidden: base.clone(),
                    hidden: hidden.clone(),
                },
                branch,
                truthful_value: t,
                deviant_value: d,
            });
        }
    }
    Ok(violations)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Approximation {
    pub mechanism_value: Rational,
    pub opt_value: Rational,
    pub ratio: Rational,
}

pub fn audit_approximation(
    mechanism: &Mechanism,
    instance: &Instance,
    limits: Limits,
) -> Result<Approximation, AuditError> {
    let dist = mechanism.run_with(instance, limits)?;
    approximation_of(&dist, instance, limits)
}

fn approximation_of(
    dist: &OutcomeDistribution,
    instance: &Instance,
    limits: Limits,
) -> Result<Approximation, AuditError> {
    let mechanism_value = dist.expected_value();
    let opt_value = solve_opt_with(instance.items(), instance.capacity(), limits)?.value;
    let ratio = if opt_value.is_zero() {
        Rational::one()
    } else {
        &mechanism_value / &opt_value
    };
    Ok(Approximation {
        mechanism_value,
        opt_value,
        ratio,
    })
}

/// One mechanism on one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub instance_id: String,
    pub mechanism: String,
    pub beta: Option<Rational>,
    pub sp_mode: SpMode,
    pub sp_semantics: SpSemantics,
    /// Violations on instances without value or size ties.
    pub violations: Vec<SpViolation>,
    /// Violations on tied instances by a mechanism that claims to be
    /// strategyproof. The claim only covers instances without ties.
    pub degenerate_findings: Vec<SpViolation>,
    pub mechanism_value: Rational,
    pub opt_value: Rational,
    pub ratio: Rational,
    pub floor: Rational,
    pub degenerate: bool,
    pub error: Option<String>,
    #[serde(skip)]
    pub size_guard: bool,
}

impl AuditReport {
    pub fn below_floor(&self) -> bool {
        self.error.is_none() && self.ratio < self.floor
    }

    pub fn finding_count(&self) -> usize {
        self.violations.len() + self.degenerate_findings.len()
    }

    /// Largest gain over both buckets.
    pub fn worst(&self) -> Option<&SpViolation> {
        self.violations
            .iter()
            .chain(&self.degenerate_findings)
            .max_by(|a, b| a.gain.cmp(&b.gain))
    }

    /// No clean violation, no floor breach, no error.
    pub fn is_clean(&self) -> bool {
        self.error.is_none() && self.violations.is_empty() && !self.below_floor()
    }
}

/// Full audit. Errors are recorded in the report rather than returned.
pub fn audit(
    mechanism: &Mechanism,
    instance: &Instance,
    instance_id: &str,
    mode: SpMode,
    semantics: SpSemantics,
    limits: AuditLimits,
) -> AuditReport {
    let degenerate = instance.is_degenerate();
    let mut report = AuditReport {
        instance_id: instance_id.to_string(),
        mechanism: mechanism.to_string(),
        beta: mechanism.beta().cloned(),
        sp_mode: mode,
        sp_semantics: semantics,
        violations: Vec::new(),
        degenerate_findings: Vec::new(),
        mechanism_value: Rational::zero(),
        opt_value: Rational::zero(),
        ratio: Rational::zero(),
        floor: mechanism.ratio_floor(instance.agent_count()),
        degenerate,
        error: None,
        size_guard: false,
    };
    let result = audit_approximation(mechanism, instance, limits.solver).and_then(|approx| {
        let found = audit_strategyproofness(mechanism, instance, mode, semantics, limits)?;
        Ok((approx, found))
    });
    match result {
        Ok((approx, found)) => {
            report.mechanism_value = approx.mechanism_value;
            report.opt_value = approx.opt_value;
            report.ratio = approx.ratio;
            if degenerate && mechanism.is_strategyproof() {
                report.degenerate_findings = found;
            } else {
                report.violations = found;
            }
        }
        Err(e) => {
            report.size_guard = e.is_size_guard();
            report.error = Some(e.to_string());
        }
    }
    report
}

/// Re-runs the mechanism on both sides of a violation and returns the
/// recomputed gain.
pub fn replay(
    mechanism: &Mechanism,
    instance: &Instance,
    violation: &SpViolation,
    semantics: SpSemantics,
) -> Result<Option<Rational>, AuditError> {
    let dev = &violation.deviation;
    let truthful = mechanism.run(&dev.base_instance(instance))?;
    let deviant = mechanism.run(&instance.without(&dev.hidden))?;
    Ok(compare(instance, dev.agent, &truthful, &deviant, semantics)
        .into_iter()
        .find(|(branch, _, _)| *branch == violation.branch)
        .map(|(_, t, d)| d - t))
}
