//! Exact 0/1 knapsack by branch and bound.
//!
//! Among optimal subsets the one whose sorted id list is lexicographically
//! smallest is returned, so the optimum is unique for any input.

use std::cmp::Ordering;

use crate::greedy::compare_items;
use crate::model::{Item, ItemId, Outcome};
use crate::rational::Rational;

pub const DEFAULT_MAX_ITEMS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest item collection the exact solver accepts.
    pub max_items: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_items: DEFAULT_MAX_ITEMS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("exact solver limited to {limit} items, got {items}; use a smaller instance or raise the limit")]
    TooLarge { items: usize, limit: usize },
}

/// Which quantity the budget constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Size,
    Value,
}

pub fn solve_opt(items: &[Item], capacity: &Rational) -> Result<Outcome, SolverError> {
    solve_opt_with(items, capacity, Limits::default())
}

pub fn solve_opt_with(items: &[Item], capacity: &Rational, limits: Limits) -> Result<Outcome, SolverError> {
    constrained_agent_opt_with(items, capacity, Metric::Size, limits)
}

pub fn constrained_agent_opt(items: &[Item], budget: &Rational, metric: Metric) -> Result<Outcome, SolverError> {
    constrained_agent_opt_with(items, budget, metric, Limits::default())
}

/// Max-value subset whose `metric` total stays within `budget`.
pub fn constrained_agent_opt_with(
    items: &[Item],
    budget: &Rational,
    metric: Metric,
    limits: Limits,
) -> Result<Outcome, SolverError> {
    if items.len() > limits.max_items {
        return Err(SolverError::TooLarge {
            items: items.len(),
            limit: limits.max_items,
        });
    }
    let weight = |it: &Item| match metric {
        Metric::Size => it.size.clone(),
        Metric::Value => it.value.clone(),
    };
    if budget.is_negative() || budget.is_zero() {
        return Ok(Outcome::empty());
    }
    let total: Rational = items.iter().map(weight).sum();
    if total <= *budget {
        return Ok(Outcome::from_items(items));
    }

    let mut sorted: Vec<&Item> = items.iter().filter(|it| weight(it) <= *budget).collect();
    match metric {
        Metric::Size => sorted.sort_by(|a, b| compare_items(a, b)),
        Metric::Value => sorted.sort_by(|a, b| b.value.cmp(&a.value).then(a.id.cmp(&b.id))),
    }
    let weights: Vec<Rational> = sorted.iter().map(|it| weight(it)).collect();
    let mut search = Search {
        items: &sorted,
        weights: &weights,
        best_value: Rational::zero(),
        best_ids: Vec::new(),
        chosen: Vec::new(),
    };
    search.dfs(0, budget.clone(), Rational::zero());
    let picked = search
        .best_ids
        .iter()
        .map(|id| *sorted.iter().find(|it| it.id == *id).expect("picked from sorted"));
    Ok(Outcome::from_items(picked))
}

struct Search<'a> {
    items: &'a [&'a Item],
    weights: &'a [Rational],
    best_value: Rational,
    best_ids: Vec<ItemId>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn dfs(&mut self, k: usize, room: Rational, value: Rational) {
        if k == self.items.len() {
            self.offer(&value);
            return;
        }
        if self.bound(k, &room, &value) < self.best_value {
            return;
        }
        if self.weights[k] <= room {
            self.chosen.push(k);
            let next_room = &room - &self.weights[k];
            let next_value = &value + &self.items[k].value;
            self.dfs(k + 1, next_room, next_value);
            self.chosen.pop();
        }
        self.dfs(k + 1, room, value);
    }

    /// Fractional relaxation over the remaining items. Items are sorted by
    /// value per unit of weight, so the relaxation is a greedy prefix.
    fn bound(&self, k: usize, room: &Rational, value: &Rational) -> Rational {
        let mut room = room.clone();
        let mut bound = value.clone();
        for j in k..self.items.len() {
            let w = &self.weights[j];
            if *w <= room {
                room -= w;
                bound += &self.items[j].value;
            } else {
                bound += &self.items[j].value * &room / w;
                break;
            }
        }
        bound
    }

    fn offer(&mut self, value: &Rational) {
        match value.cmp(&self.best_value) {
            Ordering::Less => {}
            Ordering::Greater => {
                self.best_value = value.clone();
                self.best_ids = self.current_ids();
            }
            Ordering::Equal => {
                let ids = self.current_ids();
                if ids < self.best_ids {
                    self.best_ids = ids;
                }
            }
        }
    }

    fn current_ids(&self) -> Vec<ItemId> {
        let mut ids: Vec<ItemId> = self.chosen.iter().map(|&k| self.items[k].id).collect();
        ids.sort_unstable();
        ids
    }
}
