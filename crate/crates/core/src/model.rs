//! Items, instances, and packed outcomes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

pub type ItemId = u32;
pub type AgentId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Item {
    pub id: ItemId,
    pub owner: AgentId,
    pub value: Rational,
    pub size: Rational,
}

impl Item {
    pub fn new(id: ItemId, owner: AgentId, value: Rational, size: Rational) -> Self {
        Item { id, owner, value, size }
    }

    /// An item whose size equals its value.
    pub fn unit(id: ItemId, owner: AgentId, value: Rational) -> Self {
        Item {
            id,
            owner,
            size: value.clone(),
            value,
        }
    }

    pub fn density(&self) -> Rational {
        &self.value / &self.size
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("capacity must be positive, got {0}")]
    NonPositiveCapacity(Rational),
    #[error("agent count must be at least 1")]
    NoAgents,
    #[error("item {id}: value must be positive, got {value}")]
    NonPositiveValue { id: ItemId, value: Rational },
    #[error("item {id}: size must be positive, got {size}")]
    NonPositiveSize { id: ItemId, size: Rational },
    #[error("item {id}: owner {owner} is out of range for {agents} agents")]
    OwnerOutOfRange { id: ItemId, owner: AgentId, agents: usize },
    #[error("item {id}: size {size} exceeds capacity {capacity} (no item may exceed the capacity)")]
    ItemExceedsCapacity {
        id: ItemId,
        size: Rational,
        capacity: Rational,
    },
    #[error("duplicate item id {0}")]
    DuplicateId(ItemId),
    #[error("item id {0} is not part of the instance")]
    UnknownItem(ItemId),
}

/// A validated strategic knapsack instance.
///
/// Every owner is below `agent_count`, every value and size is positive, and
/// no single item is larger than the capacity. Item order is preserved as
/// given; all mechanisms sort through [`crate::greedy::canonical_order`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Instance {
    items: Vec<Item>,
    capacity: Rational,
    agent_count: usize,
}

impl Instance {
    pub fn new(items: Vec<Item>, capacity: Rational, agent_count: usize) -> Result<Self, InstanceError> {
        if !capacity.is_positive() {
            return Err(InstanceError::NonPositiveCapacity(capacity));
        }
        if agent_count == 0 {
            return Err(InstanceError::NoAgents);
        }
        let mut seen = BTreeSet::new();
        for item in &items {
            if !seen.insert(item.id) {
                return Err(InstanceError::DuplicateId(item.id));
            }
            if !item.value.is_positive() {
                return Err(InstanceError::NonPositiveValue {
                    id: item.id,
                    value: item.value.clone(),
                });
            }
            if !item.size.is_positive() {
                return Err(InstanceError::NonPositiveSize {
                    id: item.id,
                    size: item.size.clone(),
                });
            }
            if item.owner >= agent_count {
                return Err(InstanceError::OwnerOutOfRange {
                    id: item.id,
                    owner: item.owner,
                    agents: agent_count,
                });
            }
            if item.size > capacity {
                return Err(InstanceError::ItemExceedsCapacity {
                    id: item.id,
                    size: item.size.clone(),
                    capacity: capacity.clone(),
                });
            }
        }
        Ok(Instance {
            items,
            capacity,
            agent_count,
        })
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn capacity(&self) -> &Rational {
        &self.capacity
    }

    pub fn agent_count(&self) -> usize {
        self.agent_count
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn item(&self, id: ItemId) -> Option<&Item> {
        self.items.iter().find(|it| it.id == id)
    }

    pub fn ids(&self) -> Vec<ItemId> {
        self.items.iter().map(|it| it.id).collect()
    }

    pub fn agent_items(&self, agent: AgentId) -> Vec<Item> {
        self.items.iter().filter(|it| it.owner == agent).cloned().collect()
    }

    pub fn is_unit_density(&self) -> bool {
        self.items.iter().all(|it| it.value == it.size)
    }

    /// True when two items share a value or a size. Such inputs fall outside
    /// the distinctness assumption and are resolved only by id tie-breaking.
    pub fn is_degenerate(&self) -> bool {
        let mut values = BTreeSet::new();
        let mut sizes = BTreeSet::new();
        self.items
            .iter()
            .any(|it| !values.insert(&it.value) || !sizes.insert(&it.size))
    }

    pub fn total_value(&self) -> Rational {
        self.items.iter().map(|it| &it.value).sum()
    }

    pub fn total_size(&self) -> Rational {
        self.items.iter().map(|it| &it.size).sum()
    }

    /// The instance with the given items removed; capacity and agent count
    /// are kept.
    pub fn without(&self, hidden: &BTreeSet<ItemId>) -> Instance {
        Instance {
            items: self
                .items
                .iter()
                .filter(|it| !hidden.contains(&it.id))
                .cloned()
                .collect(),
            capacity: self.capacity.clone(),
            agent_count: self.agent_count,
        }
    }

    /// The sub-instance made of exactly the given ids.
    pub fn restrict_to(&self, keep: &BTreeSet<ItemId>) -> Result<Instance, InstanceError> {
        for id in keep {
            if self.item(*id).is_none() {
                return Err(InstanceError::UnknownItem(*id));
            }
        }
        Ok(Instance {
            items: self.items.iter().filter(|it| keep.contains(&it.id)).cloned().collect(),
            capacity: self.capacity.clone(),
            agent_count: self.agent_count,
        })
    }

    /// Total value of `agent`'s items among `packed`.
    pub fn agent_value(&self, agent: AgentId, packed: &[ItemId]) -> Rational {
        self.items
            .iter()
            .filter(|it| it.owner == agent && packed.contains(&it.id))
            .map(|it| &it.value)
            .sum()
    }
}

/// A feasible packed subset. `packed` is sorted by id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Outcome {
    pub packed: Vec<ItemId>,
    pub value: Rational,
    pub size: Rational,
}

impl Outcome {
    pub fn empty() -> Self {
        Outcome {
            packed: Vec::new(),
            value: Rational::zero(),
            size: Rational::zero(),
        }
    }

    pub fn from_items<'a>(items: impl IntoIterator<Item = &'a Item>) -> Self {
        let mut out = Outcome::empty();
        for it in items {
            out.packed.push(it.id);
            out.value += &it.value;
            out.size += &it.size;
        }
        out.packed.sort_unstable();
        out
    }

    /// Union of disjoint outcomes.
    pub fn union(parts: impl IntoIterator<Item = Outcome>) -> Self {
        let mut out = Outcome::empty();
        for p in parts {
            out.packed.extend(p.packed);
            out.value += p.value;
            out.size += p.size;
        }
        out.packed.sort_unstable();
        out
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.packed.binary_search(&id).is_ok()
    }

    pub fn is_feasible_for(&self, instance: &Instance) -> bool {
        self.size <= *instance.capacity() && self.packed.iter().all(|id| instance.item(*id).is_some())
    }
}
