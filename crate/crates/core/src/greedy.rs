//! Greedy order and the fractional greedy packing.

use std::cmp::Ordering;

use serde::Serialize;

use crate::model::{AgentId, Instance, Item, ItemId, Outcome};
use crate::rational::Rational;

/// Density descending, then value descending, then id ascending.
///
/// Densities are compared by cross-multiplication so no division happens
/// on the hot path.
pub fn compare_items(a: &Item, b: &Item) -> Ordering {
    let lhs = &b.value * &a.size;
    let rhs = &a.value * &b.size;
    lhs.cmp(&rhs)
        .then_with(|| b.value.cmp(&a.value))
        .then_with(|| a.id.cmp(&b.id))
}

/// Items of `instance` in greedy order.
pub fn sorted_items(instance: &Instance) -> Vec<&Item> {
    let mut items: Vec<&Item> = instance.items().iter().collect();
    items.sort_by(|a, b| compare_items(a, b));
    items
}

pub fn canonical_order(instance: &Instance) -> Vec<ItemId> {
    sorted_items(instance).into_iter().map(|it| it.id).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FractionalGreedySolution {
    /// Item ids in greedy order.
    pub order: Vec<ItemId>,
    /// Number of leading items that fit completely.
    pub ell: usize,
    /// Fraction packed of each item, aligned with `order`.
    pub fractions: Vec<Rational>,
    /// The one item packed strictly between 0 and 1, if any.
    pub fractional_item: Option<ItemId>,
}

impl FractionalGreedySolution {
    pub fn fraction(&self, id: ItemId) -> Option<&Rational> {
        self.order.iter().position(|&o| o == id).map(|p| &self.fractions[p])
    }

    /// Σ v·x over all items.
    pub fn value(&self, instance: &Instance) -> Rational {
        self.weighted(instance, |_| true, |it| &it.value)
    }

    /// Σ s·x over all items.
    pub fn size(&self, instance: &Instance) -> Rational {
        self.weighted(instance, |_| true, |it| &it.size)
    }

    /// Σ v·x over `agent`'s items.
    pub fn agent_value(&self, instance: &Instance, agent: AgentId) -> Rational {
        self.weighted(instance, |it| it.owner == agent, |it| &it.value)
    }

    /// Σ s·x over `agent`'s items.
    pub fn agent_size(&self, instance: &Instance, agent: AgentId) -> Rational {
        self.weighted(instance, |it| it.owner == agent, |it| &it.size)
    }

    fn weighted(
        &self,
        instance: &Instance,
        keep: impl Fn(&Item) -> bool,
        field: impl Fn(&Item) -> &Rational,
    ) -> Rational {
        let mut total = Rational::zero();
        for (id, x) in self.order.iter().zip(&self.fractions) {
            if x.is_zero() {
                continue;
            }
            let item = instance.item(*id).expect("solution belongs to instance");
            if keep(item) {
                total += field(item) * x;
            }
        }
        total
    }
}

pub fn fractional_greedy(instance: &Instance) -> FractionalGreedySolution {
    let sorted = sorted_items(instance);
    let capacity = instance.capacity();
    let mut used = Rational::zero();
    let mut ell = 0;
    let mut fractions = Vec::with_capacity(sorted.len());
    let mut fractional_item = None;
    let mut full = true;
    for item in &sorted {
        if full {
            let next = &used + &item.size;
            if next <= *capacity {
                used = next;
                ell += 1;
                fractions.push(Rational::one());
                continue;
            }
            full = false;
            let x = (capacity - &used) / &item.size;
            if x.is_positive() {
                fractional_item = Some(item.id);
            }
            fractions.push(x);
        } else {
            fractions.push(Rational::zero());
        }
    }
    FractionalGreedySolution {
        order: sorted.iter().map(|it| it.id).collect(),
        ell,
        fractions,
        fractional_item,
    }
}

/// The items packed completely by the fractional greedy solution.
pub fn integral_greedy(instance: &Instance) -> Outcome {
    let sorted = sorted_items(instance);
    let ell = fractional_greedy(instance).ell;
    Outcome::from_items(sorted.into_iter().take(ell))
}
