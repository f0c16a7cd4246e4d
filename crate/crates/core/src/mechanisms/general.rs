//! Mechanisms for arbitrary densities.

use crate::greedy::{compare_items, fractional_greedy, integral_greedy, sorted_items};
use crate::mechanisms::{MechanismError, OutcomeDistribution, GREEDY_BRANCH, MAX_ITEM_BRANCH};
use crate::model::{AgentId, Instance, Outcome};
use crate::rational::Rational;
use crate::solver::{constrained_agent_opt_with, solve_opt_with, Limits, Metric};

/// Packs the integral greedy solution. Not strategyproof; kept as a foil.
pub fn naive_greedy(instance: &Instance) -> OutcomeDistribution {
    OutcomeDistribution::certain(integral_greedy(instance))
}

/// Each agent receives a size quota equal to the size of their items in the
/// fractional greedy solution and packs their best subset within it.
pub fn greedy(instance: &Instance, limits: Limits) -> Result<OutcomeDistribution, MechanismError> {
    greedy_outcome(instance, limits).map(OutcomeDistribution::certain)
}

pub(crate) fn greedy_outcome(instance: &Instance, limits: Limits) -> Result<Outcome, MechanismError> {
    let sol = fractional_greedy(instance);
    let mut parts = Vec::with_capacity(instance.agent_count());
    for agent in 0..instance.agent_count() {
        let own = instance.agent_items(agent);
        if own.is_empty() {
            continue;
        }
        let quota = sol.agent_size(instance, agent);
        parts.push(constrained_agent_opt_with(&own, &quota, Metric::Size, limits)?);
    }
    Ok(Outcome::union(parts))
}

/// Returns an agent's own optimum when that agent holds at least two thirds
/// of the fractional greedy value, and [`greedy`] otherwise.
pub fn single_greedy(instance: &Instance, limits: Limits) -> Result<OutcomeDistribution, MechanismError> {
    let sol = fractional_greedy(instance);
    let total = sol.value(instance);
    if total.is_positive() {
        for agent in 0..instance.agent_count() {
            let share = sol.agent_value(instance, agent);
            if Rational::from_integer(3) * &share >= Rational::from_integer(2) * &total {
                return Ok(OutcomeDistribution::certain(agent_opt(instance, agent, limits)?));
            }
        }
    }
    greedy(instance, limits)
}

/// The most valuable individual optimum; ties go to the lowest agent index.
pub fn best_individual(instance: &Instance, limits: Limits) -> Result<OutcomeDistribution, MechanismError> {
    Ok(OutcomeDistribution::certain(
        best_agent_opt(instance, limits)?.map_or_else(Outcome::empty, |(_, out)| out),
    ))
}

/// Half the time [`greedy`], half the time the single most valuable item.
pub fn randomized_greedy(instance: &Instance, limits: Limits) -> Result<OutcomeDistribution, MechanismError> {
    let half = Rational::new(1, 2);
    let max_item = instance
        .items()
        .iter()
        .min_by(|a, b| b.value.cmp(&a.value).then_with(|| compare_items(a, b)))
        .map_or_else(Outcome::empty, |it| Outcome::from_items([it]));
    Ok(OutcomeDistribution::lottery(vec![
        (half.clone(), greedy_outcome(instance, limits)?, GREEDY_BRANCH),
        (half, max_item, MAX_ITEM_BRANCH),
    ]))
}

/// Optimum over one agent's items at full capacity.
pub fn agent_opt(instance: &Instance, agent: AgentId, limits: Limits) -> Result<Outcome, MechanismError> {
    Ok(solve_opt_with(
        &instance.agent_items(agent),
        instance.capacity(),
        limits,
    )?)
}

/// The agent with the most valuable individual optimum, lowest index on
/// ties. `None` when no agent owns an item.
pub fn best_agent_opt(instance: &Instance, limits: Limits) -> Result<Option<(AgentId, Outcome)>, MechanismError> {
    let mut best: Option<(AgentId, Outcome)> = None;
    for agent in 0..instance.agent_count() {
        if instance.items().iter().all(|it| it.owner != agent) {
            continue;
        }
        let out = agent_opt(instance, agent, limits)?;
        if best.as_ref().is_none_or(|(_, b)| out.value > b.value) {
            best = Some((agent, out));
        }
    }
    Ok(best)
}

/// Item values of `instance` in greedy order; handy for tests and reports.
pub fn ordered_values(instance: &Instance) -> Vec<Rational> {
    sorted_items(instance).into_iter().map(|it| it.value.clone()).collect()
}
