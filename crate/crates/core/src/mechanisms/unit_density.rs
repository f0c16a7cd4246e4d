//! Mechanisms for instances where every item's value equals its size.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::greedy::{fractional_greedy, sorted_items};
use crate::mechanisms::general::best_agent_opt;
use crate::mechanisms::{MechanismError, OutcomeDistribution, FIT_TWO_BRANCH, LARGE_FIT_BRANCH};
use crate::model::{AgentId, Instance, Item, ItemId, Outcome};
use crate::rational::Rational;
use crate::solver::{constrained_agent_opt_with, Limits, Metric};

/// Candidate set, pivot, and restricted set used by [`fit_two`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FitSets {
    /// Items that fit next to every less valuable item of another agent.
    pub candidates: BTreeSet<ItemId>,
    /// Most valuable candidate.
    pub pivot: ItemId,
    pub pivot_owner: AgentId,
    /// The pivot plus every item that fits next to it.
    pub restricted: BTreeSet<ItemId>,
}

/// Most valuable item, its owner, and the set built around it by
/// [`large_fit`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LargeFitSets {
    pub top: ItemId,
    pub top_owner: AgentId,
    /// The owner's items plus every other item that fits next to `top`.
    pub restricted: BTreeSet<ItemId>,
}

fn require_unit_density(instance: &Instance, who: &'static str) -> Result<(), MechanismError> {
    if instance.is_unit_density() {
        Ok(())
    } else {
        Err(MechanismError::NotUnitDensity(who))
    }
}

fn check_beta(beta: &Rational) -> Result<(), MechanismError> {
    if *beta < Rational::new(1, 2) || *beta > Rational::new(2, 3) {
        Err(MechanismError::BetaOutOfRange(beta.clone()))
    } else {
        Ok(())
    }
}

pub fn compute_fit_sets(instance: &Instance) -> Result<FitSets, MechanismError> {
    require_unit_density(instance, "fit_two")?;
    // Unit density: greedy order is value descending with id tie-break.
    let sorted = sorted_items(instance);
    let cap = instance.capacity();
    let candidates: Vec<&Item> = sorted
        .iter()
        .enumerate()
        .filter(|(p, it)| {
            sorted[p + 1..]
                .iter()
                .filter(|other| other.owner != it.owner)
                .all(|other| &it.value + &other.value <= *cap)
        })
        .map(|(_, it)| *it)
        .collect();
    let pivot = *candidates.first().ok_or(MechanismError::EmptyInstance)?;
    let mut restricted: BTreeSet<ItemId> = sorted
        .iter()
        .filter(|it| &pivot.value + &it.value <= *cap)
        .map(|it| it.id)
        .collect();
    restricted.insert(pivot.id);
    Ok(FitSets {
        candidates: candidates.iter().map(|it| it.id).collect(),
        pivot: pivot.id,
        pivot_owner: pivot.owner,
        restricted,
    })
}

pub fn compute_large_sets(instance: &Instance) -> Result<LargeFitSets, MechanismError> {
    require_unit_density(instance, "large_fit")?;
    let sorted = sorted_items(instance);
    let top = *sorted.first().ok_or(MechanismError::EmptyInstance)?;
    let cap = instance.capacity();
    let restricted = sorted
        .iter()
        .filter(|it| it.owner == top.owner || &top.value + &it.value <= *cap)
        .map(|it| it.id)
        .collect();
    Ok(LargeFitSets {
        top: top.id,
        top_owner: top.owner,
        restricted,
    })
}

/// Fractional greedy on `subset` alone fixes each agent's value quota; each
/// agent then packs the best subset of *all* their items within the quota.
pub fn restricted_greedy(
    instance: &Instance,
    subset: &BTreeSet<ItemId>,
    limits: Limits,
) -> Result<Outcome, MechanismError> {
    require_unit_density(instance, "restricted greedy")?;
    let sub = instance
        .restrict_to(subset)
        .map_err(|_| MechanismError::UnknownSubset)?;
    let sol = fractional_greedy(&sub);
    let mut parts = Vec::new();
    for agent in 0..instance.agent_count() {
        let quota = sol.agent_value(&sub, agent);
        if !quota.is_positive() {
            continue;
        }
        let own = instance.agent_items(agent);
        parts.push(constrained_agent_opt_with(&own, &quota, Metric::Value, limits)?);
    }
    Ok(Outcome::union(parts))
}

/// Individual optimum of the best agent when it reaches `threshold`.
fn individual_above(
    instance: &Instance,
    threshold: &Rational,
    limits: Limits,
) -> Result<Option<Outcome>, MechanismError> {
    let bar = threshold * instance.capacity();
    Ok(best_agent_opt(instance, limits)?
        .filter(|(_, out)| out.value >= bar)
        .map(|(_, out)| out))
}

pub(crate) fn fit_two_outcome(instance: &Instance, beta: &Rational, limits: Limits) -> Result<Outcome, MechanismError> {
    check_beta(beta)?;
    require_unit_density(instance, "fit_two")?;
    if instance.is_empty() {
        return Ok(Outcome::empty());
    }
    if let Some(out) = individual_above(instance, beta, limits)? {
        return Ok(out);
    }
    let sets = compute_fit_sets(instance)?;
    restricted_greedy(instance, &sets.restricted, limits)
}

pub(crate) fn large_fit_outcome(instance: &Instance, limits: Limits) -> Result<Outcome, MechanismError> {
    require_unit_density(instance, "large_fit")?;
    if instance.is_empty() {
        return Ok(Outcome::empty());
    }
    if let Some(out) = individual_above(instance, &Rational::new(2, 3), limits)? {
        return Ok(out);
    }
    let sets = compute_large_sets(instance)?;
    restricted_greedy(instance, &sets.restricted, limits)
}

/// An agent whose own optimum reaches `beta·C` gets it; otherwise
/// [`restricted_greedy`] runs on the restricted set of [`compute_fit_sets`].
pub fn fit_two(instance: &Instance, beta: &Rational, limits: Limits) -> Result<OutcomeDistribution, MechanismError> {
    fit_two_outcome(instance, beta, limits).map(OutcomeDistribution::certain)
}

pub fn large_fit(instance: &Instance, limits: Limits) -> Result<OutcomeDistribution, MechanismError> {
    large_fit_outcome(instance, limits).map(OutcomeDistribution::certain)
}

/// [`fit_two`] at 2/3 with probability 2/3, [`large_fit`] otherwise.
pub fn randomized_fit(instance: &Instance, limits: Limits) -> Result<OutcomeDistribution, MechanismError> {
    require_unit_density(instance, "randomized_fit")?;
    let two_thirds = Rational::new(2, 3);
    let fit = fit_two_outcome(instance, &two_thirds, limits)?;
    let large = large_fit_outcome(instance, limits)?;
    Ok(OutcomeDistribution::lottery(vec![
        (two_thirds, fit, FIT_TWO_BRANCH),
        (Rational::new(1, 3), large, LARGE_FIT_BRANCH),
    ]))
}

fn values_desc(items: impl Iterator<Item = Rational>) -> Vec<Rational> {
    let mut v: Vec<Rational> = items.collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// Whether `first` dominates `second` from `agent`'s point of view: the
/// agent's items are at least as many and lexicographically at least as
/// valuable, everyone else's at most as many and lexicographically at most
/// as valuable.
pub fn a_dominates(first: &Instance, second: &Instance, agent: AgentId) -> Result<bool, MechanismError> {
    if first.capacity() != second.capacity() || first.agent_count() != second.agent_count() {
        return Err(MechanismError::MismatchedInstances);
    }
    let split = |inst: &Instance| {
        let own = values_desc(
            inst.items()
                .iter()
                .filter(|it| it.owner == agent)
                .map(|it| it.value.clone()),
        );
        let rest = values_desc(
            inst.items()
                .iter()
                .filter(|it| it.owner != agent)
                .map(|it| it.value.clone()),
        );
        (own, rest)
    };
    let (own1, rest1) = split(first);
    let (own2, rest2) = split(second);
    if own1.len() < own2.len() || rest1.len() > rest2.len() {
        return Ok(false);
    }
    let own_ok = own2.iter().zip(&own1).all(|(b, a)| a >= b);
    let rest_ok = rest1.iter().zip(&rest2).all(|(a, b)| a <= b);
    Ok(own_ok && rest_ok)
}
